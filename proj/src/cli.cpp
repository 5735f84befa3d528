#include "aerostp/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

#include "aerostp/config.hpp"
#include "aerostp/errors.hpp"
#include "aerostp/io.hpp"
#include "aerostp/sweep.hpp"

namespace aerostp {

namespace {

constexpr std::uint64_t kMinTrials = 100;

using Clock = std::chrono::steady_clock;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Output file with a suffix inserted before the extension:
// "out/two_layer.csv" + "_argmax" -> "out/two_layer_argmax.csv".
std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const auto ext = p.extension().string();
  p.replace_extension();
  return p.string() + suffix + ext;
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

struct Common {
  std::string config_path;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<unsigned> threads;
};

struct Context {
  std::vector<std::string> command_line;
  Clock::time_point start;
  std::ostream& out;
  std::ostream& err;
};

RunConfig load(const Common& c) {
  RunConfig cfg = load_config(c.config_path);
  if (c.seed) cfg.sim.seed = *c.seed;
  if (c.trials) cfg.sim.trials = *c.trials;
  if (c.threads) cfg.sim.threads = *c.threads;
  return cfg;
}

void require_trials(const SimConfig& sim) {
  if (sim.trials < kMinTrials) {
    throw ValidationError("trials must be at least " + std::to_string(kMinTrials) + ", got " +
                          std::to_string(sim.trials));
  }
}

void write_manifests(const Context& ctx, const RunConfig& cfg,
                     const std::vector<std::string>& outputs, std::optional<std::uint64_t> seed,
                     const Json& extra = Json::object()) {
  RunManifest m;
  m.config_path = cfg.origin;
  m.config_sha256 = sha256_hex(cfg.text);
  m.config_text = cfg.text;
  m.command_line = ctx.command_line;
  m.seed = seed;
  m.outputs = outputs;
  m.duration_seconds = std::chrono::duration<double>(Clock::now() - ctx.start).count();
  m.engine_version = engine_version();
  m.timestamp = utc_now();
  m.extra = extra;
  const std::string text = json_text(to_json(m));
  for (const auto& o : outputs) write_text_file(manifest_path(o), text);
}

// analyze ---------------------------------------------------------------------

std::vector<double> spot_distances(const LayerSpec& layer) {
  if (layer.altitude > 0.0) {
    const double h = layer.altitude;
    return {h, 1.5 * h, 2.0 * h, 4.0 * h};
  }
  return {10.0, 50.0, 100.0, 500.0};
}

int cmd_analyze(const Common& c, const Context& ctx) {
  const RunConfig cfg = load(c);
  const auto& net = cfg.network;
  const StpResult stp = total_stp(net, cfg.analysis);
  const AssociationTable assoc = association_probability(net, cfg.analysis);

  Json conditional = Json::object();
  for (const auto& [cls, a] : assoc.entries) {
    if (!(a > 0.0)) continue;
    Json spots = Json::array();
    for (double y : spot_distances(net.layers[cls.layer])) {
      spots.push_back({{"y", y}, {"stp", aerostp::conditional_stp(net, cls, y, cfg.analysis)}});
    }
    conditional[to_string(cls)] = spots;
  }
  Json result = {{"stp", stp.value},
                 {"stp_error", stp.error},
                 {"association", to_json(assoc)},
                 {"conditional_stp", conditional},
                 {"params", {{"network", to_json(net)}, {"quadrature", to_json(cfg.analysis)}}}};
  if (c.output.empty()) {
    ctx.out << json_text(result);
    return kExitOk;
  }
  write_text_file(c.output, json_text(result));
  write_manifests(ctx, cfg, {c.output}, std::nullopt);
  ctx.out << "stp " << format_double(stp.value) << "\n";
  return kExitOk;
}

// simulate --------------------------------------------------------------------

int cmd_simulate(const Common& c, const Context& ctx) {
  const RunConfig cfg = load(c);
  require_trials(cfg.sim);
  const SimSummary summary = simulate(cfg.network, cfg.sim);
  const Estimate stp = estimate_stp(summary);
  Json assoc = Json::object();
  for (const auto& [cls, e] : estimate_association(cfg.network, summary)) {
    assoc[to_string(cls)] = to_json(e);
  }
  Json result = {{"stp",
                  {{"mean", stp.mean},
                   {"stderr", stp.std_error},
                   {"trials", stp.trials},
                   {"empty_windows", summary.empty_windows}}},
                 {"association", assoc},
                 {"seed", cfg.sim.seed},
                 {"params",
                  {{"network", to_json(cfg.network)}, {"simulation", to_json(cfg.sim)}}}};
  if (c.output.empty()) {
    ctx.out << json_text(result);
    return kExitOk;
  }
  write_text_file(c.output, json_text(result));
  write_manifests(ctx, cfg, {c.output}, cfg.sim.seed);
  ctx.out << "stp " << format_double(stp.mean) << " +- " << format_double(stp.std_error)
          << "\n";
  return kExitOk;
}

// sweep -----------------------------------------------------------------------

struct SweepFlags {
  std::vector<std::string> grids;
  std::string engines = "analytic";
  bool association = false;
  std::string iso_total;
  std::size_t fractions = 21;
  bool optimize = false;
};

Engines parse_engines(const std::string& text) {
  Engines e{false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "analytic") {
      e.analytic = true;
    } else if (item == "mc" || item == "montecarlo") {
      e.montecarlo = true;
    } else {
      throw ValidationError("unknown engine '" + item + "' (use analytic, mc)");
    }
  }
  if (!e.analytic && !e.montecarlo) throw ValidationError("no engine selected");
  return e;
}

std::size_t count_failures(const SweepResult& r) {
  std::size_t n = 0;
  for (const auto& p : r.points) n += p.error.empty() ? 0 : 1;
  return n;
}

std::size_t density_layer(const std::string& parameter) {
  if (parameter.rfind("lambda", 0) != 0 || parameter.size() == 6) {
    throw ValidationError("--optimize needs a density axis lambda<k>, got '" + parameter + "'");
  }
  const std::string digits = parameter.substr(6);
  if (digits.find_first_not_of("0123456789") != std::string::npos) {
    throw ValidationError("--optimize needs a density axis lambda<k>, got '" + parameter + "'");
  }
  const auto k = std::stoul(digits);
  if (k < 1) throw ValidationError("layer numbers start at 1");
  return k - 1;
}

int finish_sweep(const Context& ctx, std::size_t failures) {
  if (failures > 0) ctx.err << "warning: " << failures << " grid point(s) failed\n";
  return kExitOk;
}

int cmd_sweep_iso(const Common& c, const SweepFlags& f, const RunConfig& cfg,
                  const SweepOptions& options, const Context& ctx) {
  if (!f.grids.empty()) throw ValidationError("--iso-total does not combine with --grid");
  if (f.fractions < 2) throw ValidationError("--fractions must be >= 2");
  const GridSpec totals = GridSpec::parse("lambda_total=" + f.iso_total);
  const GridSpec fractions = GridSpec::linear("f", 0.0, 1.0, f.fractions);

  SweepResult all;
  all.axes = {totals, fractions};
  std::ostringstream summary;
  write_csv_row(summary, {"lambda_total", "argmax_fraction", "max_stp"});
  std::size_t failures = 0;
  Json argmax = Json::array();
  for (double total : totals.values) {
    IsoDensityResult iso = iso_total_density(cfg.network, total, fractions.values, options);
    failures += count_failures(iso.sweep);
    for (auto& p : iso.sweep.points) {
      p.coords.insert(p.coords.begin(), total);
      all.points.push_back(std::move(p));
    }
    all.metadata = iso.sweep.metadata;
    write_csv_row(summary, {format_double(total), format_double(iso.argmax_fraction),
                            format_double(iso.max_stp)});
    argmax.push_back({{"lambda_total", total},
                      {"argmax_fraction", iso.argmax_fraction},
                      {"max_stp", iso.max_stp}});
    ctx.out << "lambda_total " << format_double(total) << " argmax_fraction "
            << format_double(iso.argmax_fraction) << " max_stp "
            << format_double(iso.max_stp) << "\n";
  }
  all.metadata.network = cfg.network;
  std::ostringstream csv;
  write_sweep_csv(csv, all);
  const std::string summary_path = sibling(c.output, "_argmax");
  write_text_file(c.output, csv.str());
  write_text_file(summary_path, summary.str());
  Json extra = {{"sweep", to_json(all.metadata, all.axes)}, {"argmax", argmax}};
  write_manifests(ctx, cfg, {c.output, summary_path},
                  options.engines.montecarlo ? std::optional(cfg.sim.seed) : std::nullopt,
                  extra);
  return finish_sweep(ctx, failures);
}

void write_optimum(const std::vector<GridSpec>& grids, std::size_t density_axis,
                   const RunConfig& cfg, unsigned threads, std::ostringstream& csv,
                   Json& rows, const Context& ctx) {
  const GridSpec& density = grids[density_axis];
  const std::size_t layer = density_layer(density.parameter);
  const GridSpec* outer = grids.size() == 2 ? &grids[1 - density_axis] : nullptr;

  std::vector<std::string> header;
  if (outer) header.push_back(outer->parameter);
  for (const char* h : {"argmax_density", "max_stp", "bound", "bound_ge_argmax",
                        "boundary_solution", "warning"}) {
    header.emplace_back(h);
  }
  write_csv_row(csv, header);
  const std::vector<double> outer_values = outer ? outer->values : std::vector<double>{0.0};
  for (double v : outer_values) {
    const NetworkSpec net =
        outer ? with_parameter(cfg.network, outer->parameter, v) : cfg.network;
    const OptimalDensity od = optimal_density(net, layer, density, cfg.analysis, threads);
    std::vector<std::string> row;
    if (outer) row.push_back(format_double(v));
    row.push_back(format_double(od.argmax_density));
    row.push_back(format_double(od.max_stp));
    row.push_back(od.bound ? format_double(*od.bound) : "");
    row.push_back(od.bound ? (od.bound_ge_argmax ? "1" : "0") : "");
    row.push_back(od.boundary_solution ? "1" : "0");
    row.push_back(od.warning);
    write_csv_row(csv, row);
    Json j = Json::object();
    if (outer) j[outer->parameter] = v;
    j["argmax_density"] = od.argmax_density;
    j["max_stp"] = od.max_stp;
    j["bound"] = od.bound ? Json(*od.bound) : Json();
    j["boundary_solution"] = od.boundary_solution;
    rows.push_back(j);
    if (!od.warning.empty()) ctx.err << "warning: " << od.warning << "\n";
  }
}

int cmd_sweep(const Common& c, const SweepFlags& f, const Context& ctx) {
  if (c.output.empty()) throw ValidationError("sweep needs --output");
  RunConfig cfg = load(c);
  SweepOptions options;
  options.engines = parse_engines(f.engines);
  options.analysis = cfg.analysis;
  options.association = f.association;
  options.threads = cfg.sim.threads;
  options.sim = cfg.sim;
  options.sim.threads = 1;  // grid points already run in parallel
  if (options.engines.montecarlo) require_trials(options.sim);

  if (!f.iso_total.empty()) return cmd_sweep_iso(c, f, cfg, options, ctx);

  if (f.grids.empty() || f.grids.size() > 2) {
    throw ValidationError("sweep needs one or two --grid specs");
  }
  std::vector<GridSpec> grids;
  for (const auto& g : f.grids) grids.push_back(GridSpec::parse(g));
  const SweepResult result = grids.size() == 1
                                 ? sweep_1d(cfg.network, grids[0], options)
                                 : sweep_2d(cfg.network, grids[0], grids[1], options);
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  std::vector<std::string> outputs{c.output};
  Json extra = {{"sweep", to_json(result.metadata, result.axes)}};

  std::ostringstream optimum;
  if (f.optimize) {
    std::size_t axis = grids.size();
    for (std::size_t i = 0; i < grids.size(); ++i) {
      if (grids[i].parameter.rfind("lambda", 0) == 0) {
        axis = i;
        break;
      }
    }
    if (axis == grids.size()) throw ValidationError("--optimize needs a lambda<k> grid");
    Json rows = Json::array();
    write_optimum(grids, axis, cfg, options.threads, optimum, rows, ctx);
    extra["optimum"] = rows;
    outputs.push_back(sibling(c.output, "_optimum"));
  }

  write_text_file(c.output, csv.str());
  if (f.optimize) write_text_file(outputs[1], optimum.str());
  write_manifests(ctx, cfg, outputs,
                  options.engines.montecarlo ? std::optional(cfg.sim.seed) : std::nullopt,
                  extra);
  ctx.out << result.points.size() << " point(s) written to " << c.output << "\n";
  return finish_sweep(ctx, count_failures(result));
}

// bound -----------------------------------------------------------------------

int cmd_bound(const Common& c, const Context& ctx) {
  const RunConfig cfg = load(c);
  Json bounds = Json::array();
  double total = 0.0;
  for (std::size_t k = 0; k < cfg.network.layers.size(); ++k) {
    const auto& layer = cfg.network.layers[k];
    if (!(layer.altitude > 0.0)) continue;  // aerial layers only
    const double b = density_upper_bound(layer, cfg.network.channel, cfg.analysis.inner);
    total += b;
    bounds.push_back({{"layer", k + 1}, {"altitude", layer.altitude}, {"bound", b}});
    ctx.out << "layer" << (k + 1) << " altitude " << format_double(layer.altitude)
            << " bound " << format_double(b) << "\n";
  }
  if (bounds.empty()) throw ValidationError("no aerial layer (altitude > 0) in the config");
  ctx.out << "total bound " << format_double(total) << "\n";
  if (!c.output.empty()) {
    const Json result = {{"bounds", bounds},
                         {"total", total},
                         {"params", {{"network", to_json(cfg.network)}}}};
    write_text_file(c.output, json_text(result));
    write_manifests(ctx, cfg, {c.output}, std::nullopt);
  }
  return kExitOk;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedCaseError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const NonConvergenceError& e) {
    err << "numerical error: " << e.what() << " (estimate " << format_double(e.estimate())
        << ", error " << format_double(e.error()) << ")\n";
    return kExitNumerical;
  } catch (const NumericalConsistencyError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const UndefinedDistributionError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Success probability of multi-layer aerial networks: analysis and simulation",
               "aerostp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", engine_version());

  Common common;
  SweepFlags sweep_flags;
  auto add_common = [&common](CLI::App* sub, bool mc_flags) {
    sub->add_option("-c,--config", common.config_path, "YAML config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output", common.output, "output file");
    sub->add_option("--threads", common.threads, "worker threads (results do not depend on it)")
        ->check(CLI::Range(1u, 1024u));
    if (mc_flags) {
      sub->add_option("--seed", common.seed, "Monte Carlo seed (overrides the config)");
      sub->add_option("--trials", common.trials, "Monte Carlo trials (overrides the config)");
    }
  };

  auto* analyze = app.add_subcommand("analyze", "analytic STP, association and spot values");
  add_common(analyze, false);
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo STP estimate");
  add_common(simulate_cmd, true);
  auto* sweep = app.add_subcommand("sweep", "evaluate a 1-D or 2-D parameter grid to CSV");
  add_common(sweep, true);
  sweep->add_option("--grid", sweep_flags.grids,
                    "axis spec name=min:max:count[:lin|log] or name=v1,v2,... (once or twice)");
  sweep->add_option("--engines", sweep_flags.engines, "analytic, mc or analytic,mc");
  sweep->add_flag("--association", sweep_flags.association, "record association columns");
  sweep->add_option("--iso-total", sweep_flags.iso_total,
                    "total densities for iso-total-density slices (v1,v2,... or min:max:n:log)");
  sweep->add_option("--fractions", sweep_flags.fractions,
                    "points on the layer-1 fraction grid [0, 1]");
  sweep->add_flag("--optimize", sweep_flags.optimize,
                  "also write the grid-search optimal density per outer-axis value");
  auto* bound = app.add_subcommand("bound", "upper bound on the optimal density per layer");
  add_common(bound, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Context ctx{{argv, argv + argc}, Clock::now(), out, err};
  if (*analyze) return guarded([&] { return cmd_analyze(common, ctx); }, err);
  if (*simulate_cmd) return guarded([&] { return cmd_simulate(common, ctx); }, err);
  if (*sweep) return guarded([&] { return cmd_sweep(common, sweep_flags, ctx); }, err);
  return guarded([&] { return cmd_bound(common, ctx); }, err);
}

}  // namespace aerostp
