#include "aerostp/sweep.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <thread>

#include "aerostp/errors.hpp"

namespace aerostp {

namespace {

double parse_number(const std::string& token) {
  std::string t = token;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  double base = 1.0;
  bool power = false;
  if (t.rfind("10^", 0) == 0) {
    power = true;
    t = t.substr(3);
    base = 10.0;
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + token + "'");
  }
  if (used != t.size()) throw ValidationError("not a number: '" + token + "'");
  return power ? std::pow(base, value) : value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// "h12" -> ("h", 12); returns false when the name has no trailing index.
bool split_indexed(const std::string& name, const std::string& prefix, std::size_t& index) {
  if (name.size() <= prefix.size() || name.rfind(prefix, 0) != 0) return false;
  const std::string digits = name.substr(prefix.size());
  if (digits.find_first_not_of("0123456789") != std::string::npos) return false;
  index = std::stoul(digits);
  return true;
}

int as_shape(double value, const std::string& name) {
  if (value != std::floor(value) || value < 1.0) {
    throw ValidationError(name + " must be an integer >= 1, got " + std::to_string(value));
  }
  return static_cast<int>(value);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename Body>
void parallel_points(std::size_t count, unsigned threads, Body&& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

using Mutator = std::function<NetworkSpec(const std::vector<double>&)>;

SweepPoint evaluate_point(const NetworkSpec& network, const std::vector<double>& coords,
                          const SweepOptions& options, unsigned sim_threads) {
  SweepPoint point;
  point.coords = coords;
  auto note = [&](const std::string& engine, const std::string& what) {
    if (!point.error.empty()) point.error += "; ";
    point.error += engine + ": " + what;
  };
  if (options.engines.analytic) {
    point.ran_analytic = true;
    try {
      const auto r = total_stp(network, options.analysis);
      point.analytic_stp = r.value;
      point.analytic_error = r.error;
      if (options.association) {
        point.association = association_probability(network, options.analysis);
      }
    } catch (const Error& e) {
      note("analytic", e.what());
    }
  }
  if (options.engines.montecarlo) {
    point.ran_montecarlo = true;
    try {
      SimConfig cfg = options.sim;
      cfg.seed = point_seed(options.sim.seed, coords);
      cfg.threads = sim_threads;
      const auto summary = simulate(network, cfg);
      point.mc = estimate_stp(summary);
      point.mc_empty_windows = summary.empty_windows;
    } catch (const Error& e) {
      note("montecarlo", e.what());
    }
  }
  return point;
}

SweepResult run_grid(const NetworkSpec& network, std::vector<GridSpec> axes,
                     const Mutator& mutate, const SweepOptions& options) {
  for (const auto& axis : axes) validate(axis);
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis.values.size();

  SweepResult result;
  result.metadata.network = network;
  if (options.engines.montecarlo) result.metadata.sim = options.sim;
  result.metadata.engine_version = engine_version();
  result.metadata.timestamp = utc_timestamp();
  result.points.resize(total);

  const unsigned sim_threads = options.threads > 1 ? 1u : options.sim.threads;
  parallel_points(total, options.threads, [&](std::size_t index) {
    std::vector<double> coords(axes.size());
    std::size_t rest = index;
    for (std::size_t d = axes.size(); d-- > 0;) {
      coords[d] = axes[d].values[rest % axes[d].values.size()];
      rest /= axes[d].values.size();
    }
    SweepPoint point;
    try {
      point = evaluate_point(mutate(coords), coords, options, sim_threads);
    } catch (const Error& e) {
      point.coords = coords;
      point.ran_analytic = options.engines.analytic;
      point.ran_montecarlo = options.engines.montecarlo;
      point.error = e.what();
    }
    result.points[index] = std::move(point);
  });
  result.axes = std::move(axes);
  return result;
}

}  // namespace

std::string engine_version() { return "aerostp 0.1.0"; }

GridSpec GridSpec::linear(std::string parameter, double min, double max, std::size_t count) {
  GridSpec g{std::move(parameter), {}};
  if (count < 1) throw ValidationError("grid needs at least one point");
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    g.values.push_back(i + 1 == count ? max : min + t * (max - min));
  }
  return g;
}

GridSpec GridSpec::logarithmic(std::string parameter, double min, double max,
                               std::size_t count) {
  if (!(min > 0.0) || !(max > 0.0)) throw ValidationError("log grids require min > 0");
  GridSpec g = linear(std::move(parameter), std::log10(min), std::log10(max), count);
  for (auto& v : g.values) v = std::pow(10.0, v);
  g.values.front() = min;
  g.values.back() = max;
  return g;
}

GridSpec GridSpec::parse(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("grid spec '" + text + "' must look like name=min:max:count[:log]");
  }
  const std::string name = text.substr(0, eq);
  const std::string body = text.substr(eq + 1);
  GridSpec grid;
  if (body.find(':') != std::string::npos) {
    const auto parts = split(body, ':');
    if (parts.size() < 3 || parts.size() > 4) {
      throw ValidationError("grid spec '" + text + "' must look like name=min:max:count[:log]");
    }
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double count = parse_number(parts[2]);
    if (count != std::floor(count) || count < 2) {
      throw ValidationError("grid spec '" + text + "': count must be an integer >= 2");
    }
    const std::string scale = parts.size() == 4 ? parts[3] : "lin";
    if (scale == "log") {
      grid = logarithmic(name, lo, hi, static_cast<std::size_t>(count));
    } else if (scale == "lin" || scale == "linear") {
      grid = linear(name, lo, hi, static_cast<std::size_t>(count));
    } else {
      throw ValidationError("grid spec '" + text + "': scale must be lin or log");
    }
  } else {
    grid.parameter = name;
    for (const auto& token : split(body, ',')) grid.values.push_back(parse_number(token));
  }
  validate(grid);
  return grid;
}

void validate(const GridSpec& grid) {
  if (grid.parameter.empty()) throw ValidationError("grid parameter name is empty");
  if (grid.values.empty()) throw ValidationError("grid '" + grid.parameter + "' has no values");
  for (double v : grid.values) {
    if (!std::isfinite(v)) throw ValidationError("grid '" + grid.parameter + "' has a non-finite value");
  }
}

NetworkSpec with_parameter(const NetworkSpec& network, const std::string& parameter,
                           double value) {
  NetworkSpec out = network;
  auto& ch = out.channel;
  std::size_t index = 0;
  auto layer = [&]() -> LayerSpec& {
    if (index < 1 || index > out.layers.size()) {
      throw ValidationError("parameter '" + parameter + "' names a layer that does not exist");
    }
    return out.layers[index - 1];
  };
  if (split_indexed(parameter, "lambda", index)) {
    layer().density = value;
  } else if (split_indexed(parameter, "h", index)) {
    layer().altitude = value;
  } else if (split_indexed(parameter, "p", index)) {
    layer().power = value;
  } else if (parameter == "beta") {
    ch.beta = value;
  } else if (parameter == "noise") {
    ch.noise = value;
  } else if (parameter == "alpha_los") {
    ch.alpha_los = value;
  } else if (parameter == "alpha_nlos") {
    ch.alpha_nlos = value;
  } else if (parameter == "m_los") {
    ch.m_los = as_shape(value, parameter);
  } else if (parameter == "m_nlos") {
    ch.m_nlos = as_shape(value, parameter);
  } else if (parameter == "a") {
    ch.a = value;
  } else if (parameter == "b") {
    ch.b = value;
  } else {
    throw ValidationError("unknown sweep parameter '" + parameter + "'");
  }
  return out;
}

std::uint64_t point_seed(std::uint64_t seed, const std::vector<double>& coords) {
  std::uint64_t out = seed;
  for (double c : coords) out = derive_seed(out, std::bit_cast<std::uint64_t>(c));
  return out;
}

SweepResult sweep_1d(const NetworkSpec& network, const GridSpec& grid,
                     const SweepOptions& options) {
  with_parameter(network, grid.parameter, grid.values.empty() ? 0.0 : grid.values.front());
  return run_grid(
      network, {grid},
      [&](const std::vector<double>& c) { return with_parameter(network, grid.parameter, c[0]); },
      options);
}

SweepResult sweep_2d(const NetworkSpec& network, const GridSpec& grid_a,
                     const GridSpec& grid_b, const SweepOptions& options) {
  if (grid_a.parameter == grid_b.parameter) {
    throw ValidationError("2-D sweep axes must name different parameters");
  }
  return run_grid(
      network, {grid_a, grid_b},
      [&](const std::vector<double>& c) {
        return with_parameter(with_parameter(network, grid_a.parameter, c[0]),
                              grid_b.parameter, c[1]);
      },
      options);
}

OptimalDensity optimal_density(const NetworkSpec& network, std::size_t layer,
                               const GridSpec& grid, const AnalysisOptions& options,
                               unsigned threads) {
  if (layer >= network.layers.size()) throw ValidationError("layer index out of range");
  validate(grid);
  OptimalDensity out;
  out.stp.assign(grid.values.size(), 0.0);
  parallel_points(grid.values.size(), threads, [&](std::size_t i) {
    NetworkSpec net = network;
    net.layers[layer].density = grid.values[i];
    out.stp[i] = total_stp(net, options).value;
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.stp.size(); ++i) {
    if (out.stp[i] > out.stp[best]) best = i;
  }
  out.argmax_density = grid.values[best];
  out.max_stp = out.stp[best];
  out.boundary_solution = best == 0 || best + 1 == grid.values.size();
  try {
    out.bound = density_upper_bound(network.layers[layer], network.channel);
    out.bound_ge_argmax = *out.bound >= out.argmax_density;
  } catch (const UnsupportedCaseError& e) {
    out.warning = e.what();
  }
  return out;
}

IsoDensityResult iso_total_density(const NetworkSpec& network, double total,
                                   const std::vector<double>& fractions,
                                   const SweepOptions& options) {
  if (network.layers.size() < 2) {
    throw ValidationError("iso-total-density sweeps need at least two layers");
  }
  if (!(total > 0.0)) throw ValidationError("total density must be > 0");
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("fractions must lie in [0, 1]");
  }
  IsoDensityResult out;
  out.total = total;
  out.sweep = run_grid(
      network, {GridSpec{"f", fractions}},
      [&](const std::vector<double>& c) {
        NetworkSpec net = network;
        net.layers[0].density = c[0] * total;
        net.layers[1].density = (1.0 - c[0]) * total;
        return net;
      },
      options);
  bool found = false;
  for (const auto& p : out.sweep.points) {
    if (!p.analytic_stp) continue;
    if (!found || *p.analytic_stp > out.max_stp) {
      out.max_stp = *p.analytic_stp;
      out.argmax_fraction = p.coords[0];
      found = true;
    }
  }
  if (!found) throw NumericalConsistencyError("no grid point produced an analytic STP");
  return out;
}

}  // namespace aerostp
