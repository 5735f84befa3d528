#pragma once

#include <functional>

namespace aerostp {

struct QuadSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
};

void validate(const QuadSpec& spec);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;   // number of subintervals in the final partition
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) integration over [a, b].
/// Throws NonConvergenceError (carrying the best estimate) when the
/// subdivision budget runs out before the tolerance is met.
QuadResult integrate_finite(const Integrand& f, double a, double b,
                            const QuadSpec& spec = {});

/// Integral over [a, inf). The interval is mapped onto [0, 1) with
/// x = a + scale * (t / (1 - t))^p. `scale` should be of the order of the
/// integrand's length scale. `tail_power` is the decay exponent q of an
/// integrand ~ x^-q (0 when unknown or faster than any power); p is chosen
/// as max(2, 2 / (q - 1)) so the mapped integrand vanishes at t = 1.
QuadResult integrate_semi_infinite(const Integrand& f, double a,
                                   const QuadSpec& spec = {},
                                   double scale = 1.0, double tail_power = 0.0);

}  // namespace aerostp
