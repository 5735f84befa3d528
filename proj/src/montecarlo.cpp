#include "aerostp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "aerostp/errors.hpp"
#include "aerostp/quadrature.hpp"

namespace aerostp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Calls body(begin, end, worker) on contiguous blocks of [0, count).
template <typename Body>
void parallel_blocks(std::uint64_t count, unsigned threads, Body&& body) {
  const auto workers = static_cast<unsigned>(
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, count)));
  if (workers <= 1) {
    body(std::uint64_t{0}, count, 0u);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::uint64_t block = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = std::min(count, w * block);
    const std::uint64_t end = std::min(count, begin + block);
    pool.emplace_back([&body, begin, end, w] { body(begin, end, w); });
  }
  for (auto& t : pool) t.join();
}

// Gamma(m, 1/m) gains; m = 1 takes the exponential shortcut.
class Fading {
 public:
  explicit Fading(int m) : m_(m), gamma_(m, 1.0 / m) {}
  double operator()(Rng& rng) { return m_ == 1 ? exponential_(rng) : gamma_(rng); }

 private:
  int m_;
  std::gamma_distribution<double> gamma_;
  std::exponential_distribution<double> exponential_{1.0};
};

void merge(SimSummary& into, const SimSummary& from) {
  into.trials += from.trials;
  into.successes += from.successes;
  into.empty_windows += from.empty_windows;
  for (const auto& [cls, n] : from.association_counts) into.association_counts[cls] += n;
  for (const auto& [cls, n] : from.association_successes) into.association_successes[cls] += n;
}

}  // namespace

void validate(const SimConfig& config) {
  if (config.trials < 1) throw ValidationError("trials must be >= 1");
  if (!(config.window_radius > 0.0) || !std::isfinite(config.window_radius)) {
    throw ValidationError("window_radius must be positive");
  }
  if (!(config.far_field_radius >= 0.0) || !std::isfinite(config.far_field_radius)) {
    throw ValidationError("far_field_radius must be >= 0 (0 disables the far field)");
  }
  if (!(config.bin_width > 0.0)) throw ValidationError("bin_width must be positive");
}

Estimate Estimate::from_counts(std::uint64_t hits, std::uint64_t trials) {
  Estimate e;
  e.trials = trials;
  if (trials == 0) return e;
  e.mean = static_cast<double>(hits) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(trials));
  return e;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

void sample_layer_into(const LayerSpec& layer, const ChannelParams& channel,
                       double window_radius, Rng& rng, std::vector<Node>& out) {
  out.clear();
  if (!(window_radius > 0.0)) throw DomainError("window_radius must be positive");
  if (layer.density == 0.0) return;
  const double h2 = layer.altitude * layer.altitude;
  const auto rings = static_cast<std::size_t>(std::ceil(window_radius / kRingWidth));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Fading fading_los(channel.m_los);
  Fading fading_nlos(channel.m_nlos);
  for (std::size_t i = 0; i < rings; ++i) {
    const double r0 = kRingWidth * static_cast<double>(i);
    const double r1 = r0 + kRingWidth;
    const double span = r1 * r1 - r0 * r0;
    std::poisson_distribution<std::uint64_t> count(layer.density * std::numbers::pi * span);
    const std::uint64_t n = count(rng);
    for (std::uint64_t j = 0; j < n; ++j) {
      Node node;
      node.horizontal = std::sqrt(r0 * r0 + uniform(rng) * span);
      node.distance = std::sqrt(node.horizontal * node.horizontal + h2);
      const double p_los =
          node.distance > 0.0 ? los_probability(layer, channel, node.distance) : 1.0;
      node.env = uniform(rng) < p_los ? Environment::kLos : Environment::kNlos;
      node.gain = node.env == Environment::kLos ? fading_los(rng) : fading_nlos(rng);
      // Nodes past the window edge are still drawn so that the stream
      // position does not depend on window_radius.
      if (node.horizontal <= window_radius && node.distance > 0.0) out.push_back(node);
    }
  }
}

std::vector<Node> sample_layer(const LayerSpec& layer, const ChannelParams& channel,
                               double window_radius, Rng& rng) {
  std::vector<Node> out;
  sample_layer_into(layer, channel, window_radius, rng, out);
  return out;
}

std::vector<FarFieldRing> far_field_rings(const LayerSpec& layer,
                                          const ChannelParams& channel,
                                          double inner_radius, double outer_radius) {
  std::vector<FarFieldRing> rings;
  if (layer.density == 0.0 || !(outer_radius > inner_radius) || !(inner_radius > 0.0)) {
    return rings;
  }
  const QuadSpec spec{1e-10, 0.0, 200};
  const double h2 = layer.altitude * layer.altitude;
  for (double r0 = inner_radius; r0 < outer_radius;) {
    const double r1 = std::min(r0 * kFarFieldRatio, outer_radius);
    FarFieldRing ring{r0, r1, {}, {}};
    for (auto env : kEnvironments) {
      const double alpha = channel.alpha(env);
      auto count = [&](double r) {
        const double x = std::sqrt(r * r + h2);
        return 2.0 * std::numbers::pi * r * env_probability(layer, channel, env, x);
      };
      auto gain = [&](double r) {
        const double x = std::sqrt(r * r + h2);
        return 2.0 * std::numbers::pi * r * env_probability(layer, channel, env, x) *
               std::pow(x, -alpha);
      };
      const auto e = static_cast<std::size_t>(env);
      const double n = integrate_finite(count, r0, r1, spec).value;
      ring.mean_count[e] = layer.density * n;
      ring.path_gain[e] = n > 0.0 ? integrate_finite(gain, r0, r1, spec).value / n : 0.0;
    }
    rings.push_back(ring);
    r0 = r1;
  }
  return rings;
}

double sample_far_field(const std::vector<FarFieldRing>& rings, double power,
                        const ChannelParams& channel, Rng& rng) {
  double total = 0.0;
  for (const auto& ring : rings) {
    for (auto env : kEnvironments) {
      const auto e = static_cast<std::size_t>(env);
      if (ring.mean_count[e] == 0.0) continue;
      std::poisson_distribution<std::uint64_t> count(ring.mean_count[e]);
      const std::uint64_t n = count(rng);
      if (n == 0) continue;
      const double m = channel.shape(env);
      std::gamma_distribution<double> gains(static_cast<double>(n) * m, 1.0 / m);
      total += power * ring.path_gain[e] * gains(rng);
    }
  }
  return total;
}

struct Simulator::Scratch {
  std::vector<std::vector<Node>> nodes;   // per layer
  std::vector<std::vector<double>> avg;   // fading-free received power
};

Simulator::Simulator(NetworkSpec network, SimConfig config)
    : network_(std::move(network)), config_(config) {
  validate(network_);
  validate(config_);
  far_field_.resize(network_.layers.size());
  if (config_.far_field_radius > config_.window_radius) {
    for (std::size_t k = 0; k < network_.layers.size(); ++k) {
      far_field_[k] = far_field_rings(network_.layers[k], network_.channel,
                                      config_.window_radius, config_.far_field_radius);
    }
  }
}

TrialOutcome Simulator::trial(Rng& rng, Scratch& scratch) const {
  const auto& ch = network_.channel;
  const std::size_t layers = network_.layers.size();
  const std::uint64_t key = rng();
  scratch.nodes.resize(layers);
  scratch.avg.resize(layers);

  // Association: strongest average power; ties go to the smaller layer
  // index, then the shorter link.
  bool found = false;
  std::size_t best_layer = 0;
  std::size_t best_index = 0;
  double best_avg = -1.0;
  for (std::size_t k = 0; k < layers; ++k) {
    Rng stream(derive_seed(key, k));
    auto& nodes = scratch.nodes[k];
    auto& avg = scratch.avg[k];
    sample_layer_into(network_.layers[k], ch, config_.window_radius, stream, nodes);
    avg.resize(nodes.size());
    const double power = network_.layers[k].power;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      avg[i] = power * std::pow(nodes[i].distance, -ch.alpha(nodes[i].env));
      const bool better =
          !found || avg[i] > best_avg ||
          (avg[i] == best_avg && (k < best_layer || (k == best_layer &&
                                                     nodes[i].distance <
                                                         scratch.nodes[best_layer][best_index].distance)));
      if (better) {
        found = true;
        best_layer = k;
        best_index = i;
        best_avg = avg[i];
      }
    }
  }

  TrialOutcome out;
  if (!found) return out;

  double interference = 0.0;
  for (std::size_t k = 0; k < layers; ++k) {
    const auto& nodes = scratch.nodes[k];
    const auto& avg = scratch.avg[k];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (k == best_layer && i == best_index) continue;
      interference += avg[i] * nodes[i].gain;
    }
    if (!far_field_[k].empty()) {
      Rng far(derive_seed(key, layers + k));
      interference += sample_far_field(far_field_[k], network_.layers[k].power, ch, far);
    }
  }
  const auto& main = scratch.nodes[best_layer][best_index];
  const double signal = best_avg * main.gain;
  const double denominator = interference + ch.noise;
  const double sinr =
      denominator > 0.0 ? signal / denominator : std::numeric_limits<double>::infinity();
  out.main_class = LinkClass{best_layer, main.env};
  out.main_distance = main.distance;
  out.sinr = sinr;
  out.success = sinr > ch.beta;
  return out;
}

TrialOutcome Simulator::run_trial(Rng& rng) const {
  Scratch scratch;
  return trial(rng, scratch);
}

template <typename Visit>
void Simulator::for_each_trial(std::vector<SimSummary>& partial, Visit&& visit) const {
  partial.assign(std::max(1u, config_.threads), SimSummary{});
  parallel_blocks(config_.trials, config_.threads,
                  [&](std::uint64_t begin, std::uint64_t end, unsigned worker) {
                    Scratch scratch;
                    for (std::uint64_t i = begin; i < end; ++i) {
                      Rng rng(derive_seed(config_.seed, i));
                      visit(partial[worker], trial(rng, scratch));
                    }
                  });
}

SimSummary Simulator::run() const {
  std::vector<SimSummary> partial;
  for_each_trial(partial, [](SimSummary& acc, const TrialOutcome& t) {
    ++acc.trials;
    if (!t.main_class) {
      ++acc.empty_windows;
      return;
    }
    ++acc.association_counts[*t.main_class];
    if (t.success) {
      ++acc.successes;
      ++acc.association_successes[*t.main_class];
    }
  });
  SimSummary total;
  for (const auto& p : partial) merge(total, p);
  return total;
}

Estimate Simulator::conditional_stp(LinkClass cls, double y) const {
  const double half = 0.5 * config_.bin_width;
  std::vector<SimSummary> partial;
  // Here `trials` counts trials in the bin and `successes` the successful ones.
  for_each_trial(partial, [&](SimSummary& acc, const TrialOutcome& t) {
    if (!t.main_class || *t.main_class != cls) return;
    if (std::abs(*t.main_distance - y) > half) return;
    ++acc.trials;
    if (t.success) ++acc.successes;
  });
  SimSummary total;
  for (const auto& p : partial) merge(total, p);
  return Estimate::from_counts(total.successes, total.trials);
}

double Simulator::conditional_interference(LinkClass main, double y, Rng& rng) const {
  const auto& ch = network_.channel;
  if (main.layer >= network_.layers.size()) throw DomainError("layer index out of range");
  const double threshold =
      avg_rx_power(network_.layers[main.layer].power, y, ch.alpha(main.env));
  const std::size_t layers = network_.layers.size();
  const std::uint64_t key = rng();
  std::vector<Node> nodes;
  double interference = 0.0;
  for (std::size_t k = 0; k < layers; ++k) {
    const auto& layer = network_.layers[k];
    Rng stream(derive_seed(key, k));
    sample_layer_into(layer, ch, config_.window_radius, stream, nodes);
    for (const auto& node : nodes) {
      const double avg = avg_rx_power(layer.power, node.distance, ch.alpha(node.env));
      if (avg > threshold) continue;  // would have been selected instead
      interference += avg * node.gain;
    }
    if (far_field_[k].empty()) continue;
    const double edge = std::hypot(config_.window_radius, layer.altitude);
    for (auto env : kEnvironments) {
      if (avg_rx_power(layer.power, edge, ch.alpha(env)) > threshold) {
        throw DomainError("exclusion region reaches past the sampling window; "
                          "increase window_radius");
      }
    }
    Rng far(derive_seed(key, layers + k));
    interference += sample_far_field(far_field_[k], layer.power, ch, far);
  }
  return interference;
}

MeanEstimate Simulator::conditional_laplace(LinkClass main, double y, double s) const {
  std::vector<double> values(config_.trials);
  parallel_blocks(config_.trials, config_.threads,
                  [&](std::uint64_t begin, std::uint64_t end, unsigned) {
                    for (std::uint64_t i = begin; i < end; ++i) {
                      Rng rng(derive_seed(config_.seed, i));
                      values[i] = std::exp(-s * conditional_interference(main, y, rng));
                    }
                  });
  // Sequential reduction keeps the result independent of the worker count.
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t n = 0;
  for (double v : values) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  MeanEstimate out;
  out.samples = n;
  out.mean = mean;
  out.std_error =
      n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return out;
}

TrialOutcome run_trial(const NetworkSpec& network, const SimConfig& config, Rng& rng) {
  return Simulator(network, config).run_trial(rng);
}

SimSummary simulate(const NetworkSpec& network, const SimConfig& config) {
  return Simulator(network, config).run();
}

Estimate estimate_stp(const SimSummary& summary) {
  return Estimate::from_counts(summary.successes, summary.trials);
}

Estimate estimate_stp(const NetworkSpec& network, const SimConfig& config) {
  return estimate_stp(simulate(network, config));
}

std::map<LinkClass, Estimate> estimate_association(const NetworkSpec& network,
                                                   const SimSummary& summary) {
  std::map<LinkClass, Estimate> out;
  for (const auto& cls : link_classes(network)) {
    const auto it = summary.association_counts.find(cls);
    const std::uint64_t hits = it == summary.association_counts.end() ? 0 : it->second;
    out[cls] = Estimate::from_counts(hits, summary.trials);
  }
  return out;
}

std::map<LinkClass, Estimate> estimate_association(const NetworkSpec& network,
                                                   const SimConfig& config) {
  return estimate_association(network, simulate(network, config));
}

Estimate estimate_conditional_stp(const NetworkSpec& network, LinkClass cls, double y,
                                  const SimConfig& config) {
  return Simulator(network, config).conditional_stp(cls, y);
}

double sample_conditional_interference(const NetworkSpec& network, LinkClass main,
                                       double y, const SimConfig& config, Rng& rng) {
  return Simulator(network, config).conditional_interference(main, y, rng);
}

MeanEstimate estimate_conditional_laplace(const NetworkSpec& network, LinkClass main,
                                          double y, double s, const SimConfig& config) {
  return Simulator(network, config).conditional_laplace(main, y, s);
}

}  // namespace aerostp
