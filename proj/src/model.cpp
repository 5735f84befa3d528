#include "aerostp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aerostp/errors.hpp"

namespace aerostp {

std::string_view to_string(Environment env) {
  return env == Environment::kLos ? "los" : "nlos";
}

std::string_view to_string(LosModel model) {
  switch (model) {
    case LosModel::kElevation:
      return "elevation";
    case LosModel::kAlwaysLos:
      return "always_los";
    case LosModel::kAlwaysNlos:
      return "always_nlos";
  }
  return "unknown";
}

void validate(const LayerSpec& layer) {
  if (!std::isfinite(layer.density) || layer.density < 0.0) {
    throw ValidationError("layer density must be finite and >= 0");
  }
  if (!std::isfinite(layer.altitude) || layer.altitude < 0.0) {
    throw ValidationError("layer altitude must be finite and >= 0");
  }
  if (!std::isfinite(layer.power) || layer.power <= 0.0) {
    throw ValidationError("layer power must be finite and > 0");
  }
}

void validate(const ChannelParams& channel) {
  if (!std::isfinite(channel.a) || channel.a <= 0.0 ||
      !std::isfinite(channel.b) || channel.b < 0.0) {
    throw ValidationError("LoS constants require a > 0 and b >= 0");
  }
  if (!(channel.alpha_los > 2.0)) {
    throw ValidationError(
        "alpha_los must be > 2 (interference integrals diverge otherwise)");
  }
  if (!(channel.alpha_los <= channel.alpha_nlos)) {
    throw ValidationError("alpha_los must not exceed alpha_nlos");
  }
  if (!(channel.alpha_nlos <= 6.0)) {
    throw ValidationError("alpha_nlos must be <= 6");
  }
  if (channel.m_los < 1 || channel.m_nlos < 1) {
    throw ValidationError("Nakagami shapes m_los and m_nlos must be integers >= 1");
  }
  if (!std::isfinite(channel.beta) || channel.beta <= 0.0) {
    throw ValidationError("target SINR beta must be > 0");
  }
  if (!std::isfinite(channel.noise) || channel.noise < 0.0) {
    throw ValidationError("noise power must be finite and >= 0");
  }
}

void validate(const NetworkSpec& network) {
  validate(network.channel);
  if (network.layers.empty()) {
    throw ValidationError("network needs at least one layer");
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < network.layers.size(); ++i) {
    try {
      validate(network.layers[i]);
    } catch (const ValidationError& e) {
      throw ValidationError("layer " + std::to_string(i + 1) + ": " + e.what());
    }
    any_positive = any_positive || network.layers[i].density > 0.0;
  }
  if (!any_positive) {
    throw ValidationError("at least one layer must have density > 0");
  }
}

double elevation_deg(double altitude, double distance) {
  const double ratio = std::min(1.0, altitude / distance);
  return std::asin(ratio) * (180.0 / std::numbers::pi);
}

namespace {

void check_link(const LayerSpec& layer, double x) {
  if (!(x > 0.0) || x < layer.altitude) {
    throw DomainError("link distance " + std::to_string(x) +
                      " is not valid for altitude " +
                      std::to_string(layer.altitude));
  }
}

// exp(-b (theta - a)) * a, the odds of NLoS against LoS.
double nlos_odds(const LayerSpec& layer, const ChannelParams& channel, double x) {
  const double theta = elevation_deg(layer.altitude, x);
  return channel.a * std::exp(-channel.b * (theta - channel.a));
}

}  // namespace

double los_probability(const LayerSpec& layer, const ChannelParams& channel,
                       double x) {
  return env_probability(layer, channel, Environment::kLos, x);
}

double env_probability(const LayerSpec& layer, const ChannelParams& channel,
                       Environment env, double x) {
  check_link(layer, x);
  switch (channel.los_model) {
    case LosModel::kAlwaysLos:
      return env == Environment::kLos ? 1.0 : 0.0;
    case LosModel::kAlwaysNlos:
      return env == Environment::kLos ? 0.0 : 1.0;
    case LosModel::kElevation:
      break;
  }
  // Both branches are computed from the odds so that neither loses digits
  // to a 1 - p subtraction.
  const double odds = nlos_odds(layer, channel, x);
  return env == Environment::kLos ? 1.0 / (1.0 + odds) : odds / (1.0 + odds);
}

double radial_intensity(const LayerSpec& layer, const ChannelParams& channel,
                        Environment env, double x) {
  if (layer.density == 0.0 || !(x > 0.0) || x < layer.altitude) return 0.0;
  return 2.0 * std::numbers::pi * x * layer.density *
         env_probability(layer, channel, env, x);
}

double avg_rx_power(double power, double x, double alpha) {
  if (!(x > 0.0)) {
    throw DomainError("received power needs a positive distance");
  }
  return power * std::pow(x, -alpha);
}

double sample_fading(Environment env, const ChannelParams& channel, Rng& rng) {
  const double m = channel.shape(env);
  std::gamma_distribution<double> gain(m, 1.0 / m);
  return gain(rng);
}

}  // namespace aerostp
