#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "aerostp/analysis.hpp"
#include "aerostp/model.hpp"

namespace aerostp {

struct SimConfig {
  std::uint64_t trials = 100000;
  // Horizontal radius of the disk in which nodes are sampled individually.
  double window_radius = 5000.0;
  // Outer radius of the aggregated far field; 0 disables it, which
  // truncates the network at window_radius.
  double far_field_radius = 1e8;
  std::uint64_t seed = 1;
  double bin_width = 2.0;  // m, for conditional (binned) estimates
  unsigned threads = 1;    // workers; never changes results
};

void validate(const SimConfig& config);

/// One sampled transmitter as seen from the receiver at the origin.
struct Node {
  double horizontal = 0.0;  // m
  double distance = 0.0;    // 3-D link length, m
  Environment env = Environment::kLos;
  double gain = 1.0;  // fading power gain
};

/// Bernoulli estimate; std_error = sqrt(mean (1 - mean) / trials).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;

  static Estimate from_counts(std::uint64_t hits, std::uint64_t trials);
};

/// Sample mean of a bounded statistic with its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

struct TrialOutcome {
  bool success = false;
  std::optional<LinkClass> main_class;  // none only for an empty window
  std::optional<double> main_distance;
  std::optional<double> sinr;
};

/// Aggregate counts of a batch of trials.
struct SimSummary {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t empty_windows = 0;
  std::map<LinkClass, std::uint64_t> association_counts;
  std::map<LinkClass, std::uint64_t> association_successes;
};

/// Width of the concentric rings the sampling disk is built from. Rings are
/// drawn innermost first from one stream, so a realisation in a larger
/// window extends the one in a smaller window instead of replacing it.
inline constexpr double kRingWidth = 500.0;

/// Outer/inner radius ratio of the far-field rings.
inline constexpr double kFarFieldRatio = 1.2;

/// Stateless 64-bit mix of (seed, index) used for per-trial and per-point
/// stream derivation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// One PPP realisation of a layer inside the horizontal disk, with
/// environment and fading drawn per node.
std::vector<Node> sample_layer(const LayerSpec& layer, const ChannelParams& channel,
                               double window_radius, Rng& rng);
void sample_layer_into(const LayerSpec& layer, const ChannelParams& channel,
                       double window_radius, Rng& rng, std::vector<Node>& out);

/// Aggregated annulus of one layer. Per environment: the expected number of
/// nodes and their mean path gain E[x^-alpha].
struct FarFieldRing {
  double inner = 0.0;  // horizontal radii, m
  double outer = 0.0;
  std::array<double, 2> mean_count{};
  std::array<double, 2> path_gain{};
};

std::vector<FarFieldRing> far_field_rings(const LayerSpec& layer,
                                          const ChannelParams& channel,
                                          double inner_radius, double outer_radius);

/// Interference received from one realisation of the far field: per ring
/// and environment N ~ Poisson, gain sum ~ Gamma(N m, 1/m).
double sample_far_field(const std::vector<FarFieldRing>& rings, double power,
                        const ChannelParams& channel, Rng& rng);

/// Monte Carlo engine for one network. Holds the precomputed far-field
/// tables; all methods are const and thread-safe.
class Simulator {
 public:
  Simulator(NetworkSpec network, SimConfig config);

  const NetworkSpec& network() const noexcept { return network_; }
  const SimConfig& config() const noexcept { return config_; }

  /// One snapshot: strongest-average-power association among the nodes of
  /// the window, then SINR with fading over every node including the far
  /// field. Draws one key from `rng` and derives one stream per layer.
  TrialOutcome run_trial(Rng& rng) const;

  /// config.trials trials; trial i uses the stream derive_seed(seed, i), so
  /// the summary does not depend on the worker count.
  SimSummary run() const;

  /// Binned conditional success frequency (see estimate_conditional_stp).
  Estimate conditional_stp(LinkClass cls, double y) const;

  /// Interference given that `main` serves at distance y: every node that
  /// would out-power the main link is removed, the rest contribute with
  /// fading.
  double conditional_interference(LinkClass main, double y, Rng& rng) const;

  MeanEstimate conditional_laplace(LinkClass main, double y, double s) const;

 private:
  struct Scratch;
  TrialOutcome trial(Rng& rng, Scratch& scratch) const;
  template <typename Visit>
  void for_each_trial(std::vector<SimSummary>& partial, Visit&& visit) const;

  NetworkSpec network_;
  SimConfig config_;
  std::vector<std::vector<FarFieldRing>> far_field_;  // per layer
};

TrialOutcome run_trial(const NetworkSpec& network, const SimConfig& config, Rng& rng);

SimSummary simulate(const NetworkSpec& network, const SimConfig& config);

Estimate estimate_stp(const NetworkSpec& network, const SimConfig& config);
Estimate estimate_stp(const SimSummary& summary);

std::map<LinkClass, Estimate> estimate_association(const NetworkSpec& network,
                                                   const SimConfig& config);
std::map<LinkClass, Estimate> estimate_association(const NetworkSpec& network,
                                                   const SimSummary& summary);

/// Success frequency among trials served by `cls` at a distance within
/// bin_width / 2 of y.
Estimate estimate_conditional_stp(const NetworkSpec& network, LinkClass cls, double y,
                                  const SimConfig& config);

double sample_conditional_interference(const NetworkSpec& network, LinkClass main,
                                       double y, const SimConfig& config, Rng& rng);

/// E[exp(-s I) | main link], the Monte Carlo counterpart of the conditional
/// Laplace transform of interference.
MeanEstimate estimate_conditional_laplace(const NetworkSpec& network, LinkClass main,
                                          double y, double s, const SimConfig& config);

}  // namespace aerostp
