#include "aerostp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "aerostp/errors.hpp"

namespace aerostp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kProbabilitySlack = 1e-9;

const LayerSpec& layer_of(const NetworkSpec& network, std::size_t index) {
  if (index >= network.layers.size()) {
    throw DomainError("layer index " + std::to_string(index + 1) + " is out of range");
  }
  return network.layers[index];
}

// Integral over [lo, hi] with x = lo + u^2, which removes the square-root
// behaviour of the elevation angle at x = altitude.
QuadResult integrate_from(const Integrand& f, double lo, double hi,
                          const QuadSpec& spec) {
  if (!(hi > lo)) return {};
  auto g = [&](double u) { return 2.0 * u * f(lo + u * u); };
  return integrate_finite(g, 0.0, std::sqrt(hi - lo), spec);
}

// Integral of x * rho_env(x) over [lo, hi] for one layer.
double env_area(const LayerSpec& layer, const ChannelParams& channel,
                Environment env, double lo, double hi, const QuadSpec& spec) {
  auto f = [&](double x) { return x * env_probability(layer, channel, env, x); };
  return integrate_from(f, lo, hi, spec).value;
}

double total_density(const NetworkSpec& network) {
  double sum = 0.0;
  for (const auto& layer : network.layers) sum += layer.density;
  return sum;
}

// Length scale over which the void probability of the whole network decays
// beyond distance `from`.
double decay_scale(const NetworkSpec& network, double from) {
  const double density = total_density(network);
  if (!(density > 0.0)) return std::max(from, 1.0);
  const double area = 1.0 / (std::numbers::pi * density);
  return std::max(std::sqrt(from * from + area) - from, 1e-3);
}

// Main-link distances at which some other class's exclusion radius crosses
// that class's altitude; the integrands over y have kinks there.
std::vector<double> kink_points(const NetworkSpec& network, LinkClass main) {
  const auto& ch = network.channel;
  const auto& own = network.layers[main.layer];
  std::vector<double> points{own.altitude};
  for (const auto& other : link_classes(network)) {
    const auto& layer = network.layers[other.layer];
    if (other == main || layer.density == 0.0 || layer.altitude == 0.0) continue;
    const double y = std::exp((ch.alpha(other.env) * std::log(layer.altitude) +
                               std::log(own.power / layer.power)) /
                              ch.alpha(main.env));
    if (y > own.altitude * (1.0 + 1e-12)) points.push_back(y);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(),
                           [](double a, double b) { return b - a <= 1e-9 * b; }),
               points.end());
  return points;
}

// Integral over the main-link distance of a class, split at the kinks.
StpResult integrate_mainlink(const NetworkSpec& network, LinkClass main,
                             const Integrand& g, const AnalysisOptions& options) {
  const auto points = kink_points(network, main);
  StpResult out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const auto piece = integrate_from(g, points[i], points[i + 1], options.outer);
    out.value += piece.value;
    out.error += piece.error;
  }
  const double last = points.back();
  const auto tail =
      integrate_semi_infinite(g, last, options.outer, decay_scale(network, last));
  out.value += tail.value;
  out.error += tail.error;
  return out;
}

bool env_possible(const ChannelParams& channel, Environment env) {
  if (channel.los_model == LosModel::kAlwaysLos) return env == Environment::kLos;
  if (channel.los_model == LosModel::kAlwaysNlos) return env == Environment::kNlos;
  return true;
}

double rising_factorial(double m, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= m + i;
  return out;
}

}  // namespace

std::string to_string(LinkClass cls) {
  return "layer" + std::to_string(cls.layer + 1) + "_" + std::string(to_string(cls.env));
}

std::vector<LinkClass> link_classes(const NetworkSpec& network) {
  std::vector<LinkClass> out;
  out.reserve(2 * network.layers.size());
  for (std::size_t k = 0; k < network.layers.size(); ++k) {
    for (auto env : kEnvironments) out.push_back({k, env});
  }
  return out;
}

double AssociationTable::at(LinkClass cls) const {
  const auto it = entries.find(cls);
  return it == entries.end() ? 0.0 : it->second;
}

double AssociationTable::layer_total(std::size_t layer) const {
  return at({layer, Environment::kLos}) + at({layer, Environment::kNlos});
}

double AssociationTable::total() const {
  double sum = 0.0;
  for (const auto& [cls, p] : entries) sum += p;
  return sum;
}

double nearest_ccdf(const NetworkSpec& network, LinkClass cls, double v,
                    const AnalysisOptions& options) {
  const auto& layer = layer_of(network, cls.layer);
  if (layer.density == 0.0 || v <= layer.altitude) return 1.0;
  const double area =
      env_area(layer, network.channel, cls.env, layer.altitude, v, options.inner);
  return std::exp(-kTwoPi * layer.density * area);
}

double nearest_pdf(const NetworkSpec& network, LinkClass cls, double v,
                   const AnalysisOptions& options) {
  const auto& layer = layer_of(network, cls.layer);
  if (layer.density == 0.0 || v < layer.altitude || !(v > 0.0)) return 0.0;
  const double intensity = radial_intensity(layer, network.channel, cls.env, v);
  if (intensity == 0.0) return 0.0;
  return intensity * nearest_ccdf(network, cls, v, options);
}

double exclusion_radius(const NetworkSpec& network, LinkClass main, LinkClass other,
                        double y) {
  const auto& own = layer_of(network, main.layer);
  const auto& layer = layer_of(network, other.layer);
  if (!(y > 0.0)) throw DomainError("main-link distance must be positive");
  const auto& ch = network.channel;
  if (main.env == other.env && own.power == layer.power) return y;
  return std::exp((std::log(layer.power / own.power) + ch.alpha(main.env) * std::log(y)) /
                  ch.alpha(other.env));
}

double unnormalized_mainlink_density(const NetworkSpec& network, LinkClass cls,
                                     double y, const AnalysisOptions& options) {
  const double nearest = nearest_pdf(network, cls, y, options);
  if (nearest == 0.0) return 0.0;
  double product = nearest;
  for (const auto& other : link_classes(network)) {
    if (other == cls || network.layers[other.layer].density == 0.0) continue;
    product *= nearest_ccdf(network, other, exclusion_radius(network, cls, other, y),
                            options);
    if (product == 0.0) break;
  }
  return product;
}

AssociationTable association_probability(const NetworkSpec& network,
                                         const AnalysisOptions& options) {
  validate(network);
  AssociationTable table;
  for (const auto& cls : link_classes(network)) {
    if (network.layers[cls.layer].density == 0.0 ||
        !env_possible(network.channel, cls.env)) {
      table.entries[cls] = 0.0;
      continue;
    }
    auto g = [&](double y) { return unnormalized_mainlink_density(network, cls, y, options); };
    const auto r = integrate_mainlink(network, cls, g, options);
    table.entries[cls] = std::clamp(r.value, 0.0, 1.0);  // round-off only
    table.error += r.error;
  }
  return table;
}

double mainlink_pdf(const NetworkSpec& network, LinkClass cls, double y,
                    const AssociationTable& association,
                    const AnalysisOptions& options) {
  const double p = association.at(cls);
  if (!(p > 0.0)) {
    throw UndefinedDistributionError("class " + to_string(cls) +
                                     " has zero association probability");
  }
  return unnormalized_mainlink_density(network, cls, y, options) / p;
}

double mainlink_pdf(const NetworkSpec& network, LinkClass cls, double y,
                    const AnalysisOptions& options) {
  return mainlink_pdf(network, cls, y, association_probability(network, options),
                      options);
}

std::vector<double> log_laplace_derivs(const NetworkSpec& network, LinkClass main,
                                       LinkClass other, double y, double s, int n_max,
                                       const AnalysisOptions& options) {
  if (s < 0.0) throw DomainError("Laplace argument must be >= 0");
  if (n_max < 0) throw DomainError("derivative order must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  const auto& layer = layer_of(network, other.layer);
  if (layer.density == 0.0 || !env_possible(network.channel, other.env)) return out;

  const auto& ch = network.channel;
  const double alpha = ch.alpha(other.env);
  const double m = ch.shape(other.env);
  const double lower = std::max(exclusion_radius(network, main, other, y), layer.altitude);
  const double scale = std::max(lower, 1.0);
  const double prefactor = kTwoPi * layer.density;
  auto rho = [&](double x) { return env_probability(layer, ch, other.env, x); };

  // z = s * P * x^-alpha / m is dimensionless; for s > 0 the n-th derivative
  // integrand is written in z to keep every order on the same scale.
  for (int n = 0; n <= n_max; ++n) {
    if (n == 0) {
      if (s == 0.0) continue;
      auto f = [&](double x) {
        const double z = s * layer.power * std::pow(x, -alpha) / m;
        return x * rho(x) * -std::expm1(-m * std::log1p(z));
      };
      out[0] = -prefactor *
               integrate_semi_infinite(f, lower, options.inner, scale, alpha - 1.0).value;
      continue;
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double poch = rising_factorial(m, n);
    if (s > 0.0) {
      auto f = [&](double x) {
        const double z = s * layer.power * std::pow(x, -alpha) / m;
        return x * rho(x) * std::pow(z, n) * std::pow(1.0 + z, -m - n);
      };
      const double integral =
          integrate_semi_infinite(f, lower, options.inner, scale, n * alpha - 1.0).value;
      out[n] = prefactor * sign * poch * integral / std::pow(s, n);
    } else {
      auto f = [&](double x) {
        const double c = layer.power * std::pow(x, -alpha) / m;
        return x * rho(x) * std::pow(c, n);
      };
      const double integral =
          integrate_semi_infinite(f, lower, options.inner, scale, n * alpha - 1.0).value;
      out[n] = prefactor * sign * poch * integral;
    }
  }
  return out;
}

LaplaceDerivatives conditional_laplace_derivs(const NetworkSpec& network,
                                              LinkClass main, double y, double s,
                                              int n_max,
                                              const AnalysisOptions& options) {
  if (s < 0.0) throw DomainError("Laplace argument must be >= 0");
  if (n_max < 0) throw DomainError("derivative order must be >= 0");
  const std::size_t count = static_cast<std::size_t>(n_max) + 1;
  std::vector<double> eta(count, 0.0);
  const double noise = network.channel.noise;
  eta[0] = -s * noise;
  if (count > 1) eta[1] = -noise;
  for (const auto& other : link_classes(network)) {
    const auto part = log_laplace_derivs(network, main, other, y, s, n_max, options);
    for (std::size_t n = 0; n < count; ++n) eta[n] += part[n];
  }

  // Derivatives of exp(eta): L^(n) = sum_i C(n-1, i) eta^(n-i) L^(i).
  LaplaceDerivatives out;
  out.values.assign(count, 0.0);
  out.values[0] = std::exp(eta[0]);
  for (std::size_t n = 1; n < count; ++n) {
    double binom = 1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += binom * eta[n - i] * out.values[i];
      binom = binom * static_cast<double>(n - 1 - i) / static_cast<double>(i + 1);
    }
    out.values[n] = sum;
  }
  return out;
}

double stp_laplace_argument(const NetworkSpec& network, LinkClass cls, double y) {
  const auto& layer = layer_of(network, cls.layer);
  const auto& ch = network.channel;
  return ch.shape(cls.env) * ch.beta * std::pow(y, ch.alpha(cls.env)) / layer.power;
}

double conditional_stp(const NetworkSpec& network, LinkClass cls, double y,
                       const AnalysisOptions& options) {
  const auto& layer = layer_of(network, cls.layer);
  if (!(y > 0.0) || y < layer.altitude) {
    throw DomainError("main-link distance must be positive and not below the altitude");
  }
  const int m = network.channel.shape(cls.env);
  const double s = stp_laplace_argument(network, cls, y);
  const auto derivs = conditional_laplace_derivs(network, cls, y, s, m - 1, options);
  double sum = 0.0;
  double term_scale = 1.0;  // (-s)^n / n!
  for (int n = 0; n < m; ++n) {
    sum += term_scale * derivs.values[static_cast<std::size_t>(n)];
    term_scale *= -s / static_cast<double>(n + 1);
  }
  if (sum < -kProbabilitySlack || sum > 1.0 + kProbabilitySlack || !std::isfinite(sum)) {
    throw NumericalConsistencyError("conditional success probability " +
                                    std::to_string(sum) + " is outside [0, 1]");
  }
  return std::clamp(sum, 0.0, 1.0);
}

StpResult total_stp(const NetworkSpec& network, const AnalysisOptions& options) {
  validate(network);
  StpResult out;
  for (const auto& cls : link_classes(network)) {
    if (network.layers[cls.layer].density == 0.0 ||
        !env_possible(network.channel, cls.env)) {
      continue;
    }
    // f * A: the normalisation of the main-link pdf cancels.
    auto g = [&](double y) {
      const double density = unnormalized_mainlink_density(network, cls, y, options);
      if (density == 0.0) return 0.0;
      return density * conditional_stp(network, cls, y, options);
    };
    const auto r = integrate_mainlink(network, cls, g, options);
    out.value += r.value;
    out.error += r.error;
  }
  if (out.value > 1.0 + kProbabilitySlack || out.value < -kProbabilitySlack) {
    throw NumericalConsistencyError("success probability " + std::to_string(out.value) +
                                    " is outside [0, 1]");
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

double epsilon(const LayerSpec& layer, const ChannelParams& channel, double s,
               const QuadSpec& spec) {
  if (!(channel.alpha_los > 2.0)) {
    throw DomainError("epsilon diverges unless alpha_los > 2");
  }
  if (s < 0.0) throw DomainError("Laplace argument must be >= 0");
  if (s == 0.0) return 0.0;
  // 1 - rho_L/(1+z_L) - rho_N/(1+z_N) rewritten without the cancellation.
  auto f = [&](double x) {
    const double zl = s * layer.power * std::pow(x, -channel.alpha_los);
    const double zn = s * layer.power * std::pow(x, -channel.alpha_nlos);
    const double pl = env_probability(layer, channel, Environment::kLos, x);
    const double pn = env_probability(layer, channel, Environment::kNlos, x);
    return x * (pl * zl / (1.0 + zl) + pn * zn / (1.0 + zn));
  };
  return integrate_semi_infinite(f, layer.altitude, spec, std::max(layer.altitude, 1.0),
                                 channel.alpha_los - 1.0)
      .value;
}

double density_upper_bound(const LayerSpec& layer, const ChannelParams& channel,
                           const QuadSpec& spec) {
  if (channel.m_los != 1 || channel.m_nlos != 1) {
    throw UnsupportedCaseError(
        "the density bound is only established for m_los = m_nlos = 1");
  }
  validate(layer);
  const double s = channel.beta * std::pow(layer.altitude, channel.alpha_los) / layer.power;
  const double area = epsilon(layer, channel, s, spec);
  if (area == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (kTwoPi * area);
}

double phi(const NetworkSpec& network, LinkClass main, std::size_t other_layer, double y,
           double s, const QuadSpec& spec) {
  const auto& own = layer_of(network, main.layer);
  const auto& layer = layer_of(network, other_layer);
  if (!(y > 0.0) || y < own.altitude) {
    throw DomainError("main-link distance must be positive and not below the altitude");
  }
  if (s < 0.0) throw DomainError("Laplace argument must be >= 0");
  const auto& ch = network.channel;
  double total = 0.0;
  for (auto env : kEnvironments) {
    const LinkClass other{other_layer, env};
    const double edge = std::max(exclusion_radius(network, main, other, y), layer.altitude);
    auto rho = [&](double x) { return env_probability(layer, ch, env, x); };
    auto inside = [&](double x) { return x * rho(x); };
    total += integrate_from(inside, layer.altitude, edge, spec).value;
    if (s == 0.0) continue;
    const double alpha = ch.alpha(env);
    auto outside = [&](double x) {
      const double z = s * layer.power * std::pow(x, -alpha);
      return x * rho(x) * z / (1.0 + z);
    };
    total += integrate_semi_infinite(outside, edge, spec, std::max(edge, 1.0), alpha - 1.0).value;
  }
  return total;
}

}  // namespace aerostp
