#include "aerostp/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace aerostp {

namespace {

std::string located(const std::string& origin, int line, const std::string& message) {
  if (line <= 0) return origin + ": " + message;
  return origin + ":" + std::to_string(line) + ": " + message;
}

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
    throw ConfigError(origin_, at.Mark().line + 1, message);
  }

  void expect_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void only_keys(const YAML::Node& node, const std::string& what,
                 std::initializer_list<const char*> allowed) const {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.contains(key)) fail(kv.first, "unknown key '" + key + "' in " + what);
    }
  }

  double number(const YAML::Node& node, const std::string& name) const {
    if (!node.IsScalar()) fail(node, name + " must be a number");
    const std::string text = node.Scalar();
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    fail(node, name + " must be a number, got '" + text + "'");
  }

  int shape(const YAML::Node& node, const std::string& name) const {
    const double v = number(node, name);
    if (v != std::floor(v) || v < 1.0 || v > 1000.0) {
      fail(node, name + " must be an integer Nakagami shape >= 1, got " + node.Scalar());
    }
    return static_cast<int>(v);
  }

  std::uint64_t count(const YAML::Node& node, const std::string& name) const {
    const double v = number(node, name);
    if (v != std::floor(v) || v < 0.0 || v > 1.8e19) {
      fail(node, name + " must be a non-negative integer, got " + node.Scalar());
    }
    return static_cast<std::uint64_t>(v);
  }

  const std::string& origin() const noexcept { return origin_; }

 private:
  std::string origin_;
};

// Maps a validation message back to the key it talks about.
int line_for(const std::string& message, const std::map<std::string, int>& lines,
             int fallback) {
  std::size_t best = std::string::npos;
  int line = fallback;
  for (const auto& [key, l] : lines) {
    if (key.size() < 4) continue;
    const auto pos = message.find(key);
    if (pos < best) {
      best = pos;
      line = l;
    }
  }
  return line;
}

LosModel parse_los_model(const Reader& r, const YAML::Node& node) {
  const auto s = node.as<std::string>();
  if (s == "elevation") return LosModel::kElevation;
  if (s == "always_los") return LosModel::kAlwaysLos;
  if (s == "always_nlos") return LosModel::kAlwaysNlos;
  r.fail(node, "los_model must be elevation, always_los or always_nlos");
}

double parse_beta(const Reader& r, const YAML::Node& node) {
  if (node.IsScalar()) return r.number(node, "beta");
  r.expect_map(node, "beta");
  r.only_keys(node, "beta", {"value", "unit"});
  if (!node["value"]) r.fail(node, "beta needs a value");
  const double v = r.number(node["value"], "beta.value");
  const std::string unit = node["unit"] ? node["unit"].as<std::string>() : "linear";
  if (unit == "dB" || unit == "db") return db_to_linear(v);
  if (unit == "linear") return v;
  r.fail(node["unit"], "beta.unit must be dB or linear");
}

void parse_channel(const Reader& r, const YAML::Node& node, ChannelParams& ch) {
  r.expect_map(node, "channel");
  r.only_keys(node, "channel",
              {"a", "b", "alpha_los", "alpha_nlos", "m_los", "m_nlos", "beta", "noise",
               "los_model"});
  std::map<std::string, int> lines;
  for (const auto& kv : node) lines[kv.first.as<std::string>()] = kv.first.Mark().line + 1;
  if (node["a"]) ch.a = r.number(node["a"], "a");
  if (node["b"]) ch.b = r.number(node["b"], "b");
  if (node["alpha_los"]) ch.alpha_los = r.number(node["alpha_los"], "alpha_los");
  if (node["alpha_nlos"]) ch.alpha_nlos = r.number(node["alpha_nlos"], "alpha_nlos");
  if (node["m_los"]) ch.m_los = r.shape(node["m_los"], "m_los");
  if (node["m_nlos"]) ch.m_nlos = r.shape(node["m_nlos"], "m_nlos");
  if (node["beta"]) ch.beta = parse_beta(r, node["beta"]);
  if (node["noise"]) ch.noise = r.number(node["noise"], "noise");
  if (node["los_model"]) ch.los_model = parse_los_model(r, node["los_model"]);
  try {
    validate(ch);
  } catch (const ValidationError& e) {
    throw ConfigError(r.origin(), line_for(e.what(), lines, node.Mark().line + 1), e.what());
  }
}

void parse_layers(const Reader& r, const YAML::Node& node, std::vector<LayerSpec>& out) {
  if (!node.IsSequence() || node.size() == 0) {
    r.fail(node, "layers must be a non-empty list");
  }
  for (std::size_t i = 0; i < node.size(); ++i) {
    const YAML::Node item = node[i];
    const std::string what = "layer " + std::to_string(i + 1);
    r.expect_map(item, what);
    r.only_keys(item, what, {"density", "altitude", "power"});
    LayerSpec layer;
    if (!item["density"]) r.fail(item, what + " needs a density");
    if (!item["altitude"]) r.fail(item, what + " needs an altitude");
    layer.density = r.number(item["density"], "density");
    layer.altitude = r.number(item["altitude"], "altitude");
    if (item["power"]) layer.power = r.number(item["power"], "power");
    try {
      validate(layer);
    } catch (const ValidationError& e) {
      std::map<std::string, int> lines;
      for (const auto& kv : item) lines[kv.first.as<std::string>()] = kv.first.Mark().line + 1;
      throw ConfigError(r.origin(), line_for(e.what(), lines, item.Mark().line + 1),
                        what + ": " + e.what());
    }
    out.push_back(layer);
  }
}

void parse_simulation(const Reader& r, const YAML::Node& node, SimConfig& sim) {
  r.expect_map(node, "simulation");
  r.only_keys(node, "simulation",
              {"trials", "window_radius", "far_field_radius", "seed", "bin_width", "threads"});
  if (node["trials"]) sim.trials = r.count(node["trials"], "trials");
  if (node["window_radius"]) sim.window_radius = r.number(node["window_radius"], "window_radius");
  if (node["far_field_radius"]) {
    sim.far_field_radius = r.number(node["far_field_radius"], "far_field_radius");
  }
  if (node["seed"]) sim.seed = r.count(node["seed"], "seed");
  if (node["bin_width"]) sim.bin_width = r.number(node["bin_width"], "bin_width");
  if (node["threads"]) {
    const auto t = r.count(node["threads"], "threads");
    if (t < 1 || t > 1024) r.fail(node["threads"], "threads must be in [1, 1024]");
    sim.threads = static_cast<unsigned>(t);
  }
  try {
    validate(sim);
  } catch (const ValidationError& e) {
    r.fail(node, e.what());
  }
}

void parse_quadrature(const Reader& r, const YAML::Node& node, AnalysisOptions& opts) {
  r.expect_map(node, "quadrature");
  r.only_keys(node, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions"});
  if (node["rel_tol"]) {
    opts.outer.rel_tol = r.number(node["rel_tol"], "rel_tol");
    if (!(opts.outer.rel_tol > 0.0)) r.fail(node["rel_tol"], "rel_tol must be > 0");
    // Inner integrals run two orders tighter so their noise stays below the
    // outer tolerance.
    opts.inner.rel_tol = std::max(opts.outer.rel_tol * 1e-2, 1e-13);
  }
  if (node["abs_tol"]) {
    opts.outer.abs_tol = r.number(node["abs_tol"], "abs_tol");
    if (opts.outer.abs_tol < 0.0) r.fail(node["abs_tol"], "abs_tol must be >= 0");
    opts.inner.abs_tol = opts.outer.abs_tol * 1e-2;
  }
  if (node["max_subdivisions"]) {
    const auto n = r.count(node["max_subdivisions"], "max_subdivisions");
    if (n < 1 || n > 1000000) r.fail(node["max_subdivisions"], "max_subdivisions out of range");
    opts.outer.max_subdivisions = static_cast<int>(n);
    opts.inner.max_subdivisions = static_cast<int>(n);
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& origin, int line, const std::string& message)
    : ValidationError(located(origin, line, message)), line_(line) {}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

RunConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin, e.mark.line + 1, e.msg);
  }
  const Reader r(origin);
  if (!root.IsMap()) throw ConfigError(origin, 0, "config must be a mapping");
  r.only_keys(root, "config", {"layers", "channel", "simulation", "quadrature"});

  RunConfig cfg;
  cfg.origin = origin;
  cfg.text = text;
  try {
    if (!root["layers"]) throw ConfigError(origin, 0, "config needs a 'layers' list");
    parse_layers(r, root["layers"], cfg.network.layers);
    if (root["channel"]) parse_channel(r, root["channel"], cfg.network.channel);
    if (root["simulation"]) parse_simulation(r, root["simulation"], cfg.sim);
    if (root["quadrature"]) parse_quadrature(r, root["quadrature"], cfg.analysis);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin, e.mark.line + 1, e.msg);
  }
  try {
    validate(cfg.network);
  } catch (const ValidationError& e) {
    throw ConfigError(origin, root["layers"].Mark().line + 1, e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace aerostp
