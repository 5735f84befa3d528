#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "aerostp/model.hpp"
#include "aerostp/quadrature.hpp"

namespace aerostp {

/// A (layer, environment) pair. Association and success probability both
/// decompose over link classes. `layer` is a 0-based index into
/// NetworkSpec::layers.
struct LinkClass {
  std::size_t layer = 0;
  Environment env = Environment::kLos;

  friend auto operator<=>(const LinkClass&, const LinkClass&) = default;
};

/// "layer<k>_<env>" with a 1-based layer number, e.g. "layer1_los".
std::string to_string(LinkClass cls);

/// Every class of the network in (layer, LoS before NLoS) order.
std::vector<LinkClass> link_classes(const NetworkSpec& network);

/// Tolerances for the nested integrals. `inner` drives the integrals inside
/// a single evaluation (void probabilities, Laplace exponents); `outer`
/// drives the integrals over the main-link distance.
struct AnalysisOptions {
  QuadSpec inner{1e-10, 1e-14, 2000};
  QuadSpec outer{1e-8, 1e-12, 2000};
};

struct AssociationTable {
  std::map<LinkClass, double> entries;
  double error = 0.0;  // summed quadrature error estimate

  double at(LinkClass cls) const;
  double layer_total(std::size_t layer) const;
  double total() const;
};

/// [L(s), L'(s), ..., L^(n)(s)] of the conditional Laplace transform of
/// interference plus noise.
struct LaplaceDerivatives {
  std::vector<double> values;
};

struct StpResult {
  double value = 0.0;
  double error = 0.0;
};

// --- distance distributions -------------------------------------------

/// P[no node of class `cls` closer than v].
double nearest_ccdf(const NetworkSpec& network, LinkClass cls, double v,
                    const AnalysisOptions& options = {});

/// Density of the distance to the nearest node of class `cls`.
double nearest_pdf(const NetworkSpec& network, LinkClass cls, double v,
                   const AnalysisOptions& options = {});

/// Distance below which a node of class `other` would out-power a `main`
/// link of length y.
double exclusion_radius(const NetworkSpec& network, LinkClass main,
                        LinkClass other, double y);

/// Joint density that the serving link is of class `cls` and has length y,
/// i.e. the main-link pdf times the association probability.
double unnormalized_mainlink_density(const NetworkSpec& network, LinkClass cls,
                                     double y, const AnalysisOptions& options = {});

AssociationTable association_probability(const NetworkSpec& network,
                                         const AnalysisOptions& options = {});

/// Density of the main-link length given that class `cls` serves. Throws
/// UndefinedDistributionError when the class is never selected.
double mainlink_pdf(const NetworkSpec& network, LinkClass cls, double y,
                    const AssociationTable& association,
                    const AnalysisOptions& options = {});
double mainlink_pdf(const NetworkSpec& network, LinkClass cls, double y,
                    const AnalysisOptions& options = {});

// --- interference -------------------------------------------------------

/// Log-Laplace transform of the interference from class `other` given a
/// `main` link of length y, and its first n_max derivatives in s.
std::vector<double> log_laplace_derivs(const NetworkSpec& network, LinkClass main,
                                       LinkClass other, double y, double s,
                                       int n_max, const AnalysisOptions& options = {});

/// Laplace transform of total interference plus noise and its derivatives.
LaplaceDerivatives conditional_laplace_derivs(const NetworkSpec& network,
                                              LinkClass main, double y, double s,
                                              int n_max,
                                              const AnalysisOptions& options = {});

// --- success probability -------------------------------------------------

/// The Laplace argument m * beta * y^alpha / P at which the conditional
/// success probability is evaluated.
double stp_laplace_argument(const NetworkSpec& network, LinkClass cls, double y);

/// P[SINR > beta | class `cls` serves at distance y].
double conditional_stp(const NetworkSpec& network, LinkClass cls, double y,
                       const AnalysisOptions& options = {});

/// Network-wide success probability.
StpResult total_stp(const NetworkSpec& network, const AnalysisOptions& options = {});

// --- density bound ---------------------------------------------------------

/// Effective interference area of one layer at Laplace argument s (m^2).
double epsilon(const LayerSpec& layer, const ChannelParams& channel, double s,
               const QuadSpec& spec = {1e-10, 1e-14, 2000});

/// Upper bound on the STP-maximising density of one layer. Only defined for
/// Rayleigh fading on both environments (throws UnsupportedCaseError
/// otherwise); +inf for a terrestrial layer.
double density_upper_bound(const LayerSpec& layer, const ChannelParams& channel,
                           const QuadSpec& spec = {1e-10, 1e-14, 2000});

/// Density-free exponent of layer k's contribution to the success term of a
/// `main` link of length y, evaluated at Laplace argument s (m^2).
double phi(const NetworkSpec& network, LinkClass main, std::size_t other_layer,
           double y, double s, const QuadSpec& spec = {1e-10, 1e-14, 2000});

}  // namespace aerostp
