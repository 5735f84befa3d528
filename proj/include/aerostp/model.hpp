#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace aerostp {

/// Propagation environment of a single air-to-ground link.
enum class Environment : std::uint8_t { kLos = 0, kNlos = 1 };

inline constexpr std::array<Environment, 2> kEnvironments{Environment::kLos,
                                                          Environment::kNlos};

std::string_view to_string(Environment env);

/// How the LoS probability of a link is obtained. kElevation is the
/// sigmoid-in-elevation-angle model; the other two pin every link to one
/// environment and exist for degenerate-channel studies.
enum class LosModel : std::uint8_t { kElevation, kAlwaysLos, kAlwaysNlos };

std::string_view to_string(LosModel model);

/// One layer of transmitters: a homogeneous planar PPP at a fixed altitude.
/// Altitude 0 is a terrestrial layer.
struct LayerSpec {
  double density = 0.0;   // nodes / m^2
  double altitude = 0.0;  // m
  double power = 1.0;     // W
};

struct ChannelParams {
  // LoS probability constants (urban defaults). b is per degree.
  double a = 12.4231;
  double b = 0.1202;
  double alpha_los = 2.5;
  double alpha_nlos = 3.5;
  // Nakagami shapes; integer by construction.
  int m_los = 1;
  int m_nlos = 1;
  double beta = 0.7;   // target SINR, linear
  double noise = 0.0;  // W
  LosModel los_model = LosModel::kElevation;

  double alpha(Environment env) const noexcept {
    return env == Environment::kLos ? alpha_los : alpha_nlos;
  }
  int shape(Environment env) const noexcept {
    return env == Environment::kLos ? m_los : m_nlos;
  }
};

struct NetworkSpec {
  std::vector<LayerSpec> layers;
  ChannelParams channel;
};

// Throw ValidationError with a message naming the violated rule.
void validate(const LayerSpec& layer);
void validate(const ChannelParams& channel);
void validate(const NetworkSpec& network);

/// Elevation angle, in degrees, of a transmitter at `altitude` seen over a
/// link of length `distance`.
double elevation_deg(double altitude, double distance);

/// Probability that the link from a layer node at distance x is LoS.
/// Throws DomainError when x <= 0 or x < altitude.
double los_probability(const LayerSpec& layer, const ChannelParams& channel,
                       double x);

double env_probability(const LayerSpec& layer, const ChannelParams& channel,
                       Environment env, double x);

/// Intensity (nodes per metre of link distance) of the layer's env-thinned
/// process at distance x; 0 below the layer altitude.
double radial_intensity(const LayerSpec& layer, const ChannelParams& channel,
                        Environment env, double x);

/// Fading-averaged received power power * x^(-alpha).
double avg_rx_power(double power, double x, double alpha);

using Rng = std::mt19937_64;

/// Gamma(m, 1/m) power gain for the environment's Nakagami shape.
double sample_fading(Environment env, const ChannelParams& channel, Rng& rng);

}  // namespace aerostp
