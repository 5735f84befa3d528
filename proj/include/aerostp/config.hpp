#pragma once

#include <string>

#include "aerostp/analysis.hpp"
#include "aerostp/errors.hpp"
#include "aerostp/montecarlo.hpp"
#include "aerostp/model.hpp"

namespace aerostp {

/// Config file problem; line() is 1-based, 0 when no position applies.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& origin, int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Everything a run needs besides the command-line flags.
///
/// File layout (YAML):
///
///   layers:
///     - {density: 1e-5, altitude: 100, power: 1}
///   channel:
///     a: 12.4231
///     b: 0.1202
///     alpha_los: 2.5
///     alpha_nlos: 3.5
///     m_los: 1
///     m_nlos: 1
///     beta: {value: -1.55, unit: dB}   # or a linear number
///     noise: 0
///     los_model: elevation             # always_los | always_nlos
///   simulation:
///     trials: 100000
///     window_radius: 5000
///     far_field_radius: 1e8
///     seed: 1
///     bin_width: 2
///     threads: 1
///   quadrature:
///     rel_tol: 1e-8
///     abs_tol: 1e-12
///     max_subdivisions: 2000
///
/// Only `layers` is required; unknown keys are rejected.
struct RunConfig {
  NetworkSpec network;
  SimConfig sim;
  AnalysisOptions analysis;
  std::string origin;  // file path or "<string>"
  std::string text;    // raw content, hashed into run manifests
};

RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::string& path);

double db_to_linear(double db);

}  // namespace aerostp
