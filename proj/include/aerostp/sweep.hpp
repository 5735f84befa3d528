#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aerostp/analysis.hpp"
#include "aerostp/montecarlo.hpp"

namespace aerostp {

/// Version string recorded in sweep metadata and run manifests.
std::string engine_version();

/// One sweep axis: a network parameter and the values it takes.
///
/// Parameter names: h<k>, lambda<k>, p<k> (altitude, density and power of
/// the 1-based layer k), beta, noise, alpha_los, alpha_nlos, m_los, m_nlos,
/// a, b.
struct GridSpec {
  std::string parameter;
  std::vector<double> values;

  static GridSpec linear(std::string parameter, double min, double max, std::size_t count);
  static GridSpec logarithmic(std::string parameter, double min, double max, std::size_t count);

  /// Parses "name=min:max:count[:lin|log]" or "name=v1,v2,...". Numbers may
  /// be written as 10^x.
  static GridSpec parse(const std::string& text);
};

void validate(const GridSpec& grid);

/// Sets one named parameter on a copy of the network.
NetworkSpec with_parameter(const NetworkSpec& network, const std::string& parameter,
                           double value);

struct Engines {
  bool analytic = true;
  bool montecarlo = false;
};

struct SweepOptions {
  Engines engines;
  SimConfig sim;
  AnalysisOptions analysis;
  bool association = false;  // also record the analytic association table
  unsigned threads = 1;      // grid points evaluated concurrently
};

struct SweepPoint {
  std::vector<double> coords;  // one per axis
  bool ran_analytic = false;
  bool ran_montecarlo = false;
  std::optional<double> analytic_stp;
  std::optional<double> analytic_error;
  std::optional<Estimate> mc;
  std::optional<std::uint64_t> mc_empty_windows;
  std::optional<AssociationTable> association;
  std::string error;  // empty when every requested engine succeeded
};

struct SweepMetadata {
  NetworkSpec network;
  std::optional<SimConfig> sim;
  std::string engine_version;
  std::string timestamp;  // ISO-8601 UTC
};

struct SweepResult {
  std::vector<GridSpec> axes;
  std::vector<SweepPoint> points;  // row-major over axes
  SweepMetadata metadata;
};

/// Seed of the Monte Carlo run at one grid point, a function of the sweep
/// seed and the point's coordinates.
std::uint64_t point_seed(std::uint64_t seed, const std::vector<double>& coords);

SweepResult sweep_1d(const NetworkSpec& network, const GridSpec& grid,
                     const SweepOptions& options);
SweepResult sweep_2d(const NetworkSpec& network, const GridSpec& grid_a,
                     const GridSpec& grid_b, const SweepOptions& options);

struct OptimalDensity {
  double argmax_density = 0.0;
  double max_stp = 0.0;
  std::optional<double> bound;  // absent when the bound is unsupported
  bool bound_ge_argmax = false;
  bool boundary_solution = false;  // argmax sits at a grid end
  std::string warning;
  std::vector<double> stp;  // analytic STP per grid value
};

/// Grid search over the density of layer `layer` (0-based), compared with
/// the analytic density bound. `grid.parameter` is ignored; the values are
/// densities.
OptimalDensity optimal_density(const NetworkSpec& network, std::size_t layer,
                               const GridSpec& grid, const AnalysisOptions& options = {},
                               unsigned threads = 1);

struct IsoDensityResult {
  double total = 0.0;
  SweepResult sweep;  // axis "f": lambda1 = f * total, lambda2 = (1 - f) * total
  double argmax_fraction = 0.0;
  double max_stp = 0.0;
};

/// Splits a fixed total density between the first two layers and evaluates
/// the analytic STP along the split.
IsoDensityResult iso_total_density(const NetworkSpec& network, double total,
                                   const std::vector<double>& fractions,
                                   const SweepOptions& options);

}  // namespace aerostp
