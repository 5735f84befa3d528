#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <numbers>

namespace oracle {

constexpr double kA = 12.4231;
constexpr double kB = 0.1202;

inline double rho_los(double h, double x) {
  const double theta = std::asin(std::min(1.0, h / x)) * 180.0 / std::numbers::pi;
  return 1.0 / (1.0 + kA * std::exp(-kB * (theta - kA)));
}

// Composite Simpson on [a, b] with n (even) panels.
template <typename F>
double simpson(F f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// P[no node of the given environment within distance v] for one urban layer.
inline double nearest_ccdf(double density, double h, bool los, double v) {
  if (v <= h) return 1.0;
  auto f = [&](double x) {
    const double p = rho_los(h, x);
    return x * (los ? p : 1.0 - p);
  };
  // x = h + u^2 removes the square-root behaviour of rho near x = h
  auto g = [&](double u) { return 2.0 * u * f(h + u * u); };
  return std::exp(-2.0 * std::numbers::pi * density * simpson(g, 0.0, std::sqrt(v - h)));
}

// Rayleigh, rho = 1, alpha = 4: log-Laplace transform of PPP interference
// from beyond distance r.
inline double eta_alpha4(double density, double r, double s) {
  const double q = std::sqrt(s);
  return -std::numbers::pi * density * q * (std::numbers::pi / 2.0 - std::atan(r * r / q));
}

// Same setting, ground layer: network STP 1 / (1 + sqrt(beta) (pi/2 - atan(1/sqrt(beta)))).
inline double stp_alpha4(double beta) {
  const double q = std::sqrt(beta);
  return 1.0 / (1.0 + q * (std::numbers::pi / 2.0 - std::atan(1.0 / q)));
}

}  // namespace oracle
