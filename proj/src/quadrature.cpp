#include "aerostp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "aerostp/errors.hpp"

namespace aerostp {

namespace {

// Kronrod 15-point abscissae (descending, last is the centre) and weights;
// the odd-indexed abscissae are the embedded 7-point Gauss nodes.
constexpr std::array<double, 8> kNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
Segment gauss_kronrod(const F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double f1 = f(centre - dx);
    const double f2 = f(centre + dx);
    kronrod += kKronrodWeights[i] * (f1 + f2);
    abs_sum += kKronrodWeights[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double roundoff = 50.0 * kEps * abs_sum * std::abs(half);
  const double error = std::max(std::abs((kronrod - gauss) * half), roundoff);
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "integrand is not finite on [" << a << ", " << b << "]";
    throw NonConvergenceError(msg.str(), value, std::numeric_limits<double>::infinity());
  }
  return {a, b, value, error};
}

template <typename F>
QuadResult adaptive(const F& f, double a, double b, const QuadSpec& spec) {
  validate(spec);
  if (a == b) return {0.0, 0.0, 1};

  std::priority_queue<Segment> heap;
  std::vector<Segment> frozen;  // too narrow to split further
  Segment first = gauss_kronrod(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  int splits = 0;

  auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(value)); };

  while (error > target() && !heap.empty()) {
    if (splits >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "quadrature on [" << a << ", " << b << "] did not converge after "
          << splits << " subdivisions (estimate " << value << ", error " << error
          << ")";
      throw NonConvergenceError(msg.str(), value, error);
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const double scale = std::max(std::abs(worst.a), std::abs(worst.b));
    if (worst.b - worst.a <= 1e3 * kEps * scale || mid <= worst.a || mid >= worst.b) {
      frozen.push_back(worst);
      continue;
    }
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }

  // Re-sum from the partition to shed the drift of incremental updates.
  double sum = 0.0;
  double err = 0.0;
  int count = static_cast<int>(frozen.size() + heap.size());
  for (const auto& s : frozen) {
    sum += s.value;
    err += s.error;
  }
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  const double goal = std::max(spec.abs_tol, spec.rel_tol * std::abs(sum));
  if (err > goal) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b
        << "] stalled at the resolution limit (estimate " << sum << ", error "
        << err << ")";
    throw NonConvergenceError(msg.str(), sum, err);
  }
  return {sum, err, count};
}

}  // namespace

void validate(const QuadSpec& spec) {
  if (!(spec.rel_tol > 0.0) || !(spec.abs_tol >= 0.0) || spec.max_subdivisions < 1) {
    throw ValidationError(
        "quadrature spec requires rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1");
  }
}

QuadResult integrate_finite(const Integrand& f, double a, double b,
                            const QuadSpec& spec) {
  if (!(a <= b)) {
    throw DomainError("integrate_finite requires a <= b");
  }
  return adaptive(f, a, b, spec);
}

QuadResult integrate_semi_infinite(const Integrand& f, double a,
                                   const QuadSpec& spec, double scale, double tail_power) {
  if (!std::isfinite(a)) throw DomainError("lower limit must be finite");
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  const double p =
      tail_power > 1.0 ? std::clamp(2.0 / (tail_power - 1.0), 2.0, 20.0) : 2.0;
  auto mapped = [&](double t) {
    const double w = 1.0 - t;
    const double u = t / w;
    const double up = p == 2.0 ? u * u : std::pow(u, p);
    const double fx = f(a + scale * up);
    if (fx == 0.0) return 0.0;
    return fx * (p * scale * (up / u) / (w * w));
  };
  return adaptive(mapped, 0.0, 1.0, spec);
}

}  // namespace aerostp
