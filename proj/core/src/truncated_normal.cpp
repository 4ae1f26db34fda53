#include "npf/truncated_normal.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "npf/types.hpp"

namespace npf {

namespace {

constexpr double kMinRejectionMass = 0.01;

/// Upper tail P(Z > z).
double upper_tail(double z) { return 0.5 * boost::math::erfc(z / std::numbers::sqrt2); }

/// z with P(Z > z) = q.
double upper_tail_inverse(double q) {
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

/// Standard normal restricted to (a, b) with 0 <= a < b and P(Z > a)
/// too small to resolve.
double far_tail(double a, double b, Rng& rng) {
  if ((b - a) * (a + b) < 2.0) {
    // exp(-(z^2 - a^2)/2) >= exp(-1) on the whole interval.
    for (;;) {
      const double z = rng.uniform(a, b);
      if (rng.uniform() <= std::exp(-0.5 * (z - a) * (z + a))) return z;
    }
  }
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(rng.uniform_open()) / alpha;
    if (z >= b) continue;
    const double d = z - alpha;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
  }
}

/// Standard normal restricted to (a, b), a >= 0, via the upper tail.
double upper_interval(double a, double b, Rng& rng) {
  const double qa = upper_tail(a);
  const double qb = upper_tail(b);
  if (!(qa > 0.0) || !(qa > qb) || qa < 1e-300) return far_tail(a, b, rng);
  const double q = qa - rng.uniform_open() * (qa - qb);
  double z = upper_tail_inverse(q);
  if (!(z > a)) z = std::nextafter(a, INFINITY);
  if (!(z < b)) z = std::nextafter(b, -INFINITY);
  return z;
}

double standard_interval(double a, double b, Rng& rng) {
  const double mass = a >= 0.0   ? upper_tail(a) - upper_tail(b)
                      : b <= 0.0 ? upper_tail(-b) - upper_tail(-a)
                                 : 1.0 - upper_tail(b) - upper_tail(-a);
  if (mass >= kMinRejectionMass) {
    for (;;) {
      const double z = rng.normal();
      if (a < z && z < b) return z;
    }
  }
  if (a >= 0.0) return upper_interval(a, b, rng);
  if (b <= 0.0) return -upper_interval(-b, -a, rng);
  // Narrow interval straddling zero: the CDF is well resolved here.
  const double pa = normal_cdf(a);
  const double pb = normal_cdf(b);
  const double p = pa + rng.uniform_open() * (pb - pa);
  double z = -upper_tail_inverse(p);
  if (!(z > a)) z = std::nextafter(a, INFINITY);
  if (!(z < b)) z = std::nextafter(b, -INFINITY);
  return z;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / std::numbers::sqrt2); }

double sample_truncated_normal(double mean, double var, double lo, double hi, Rng& rng) {
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw ContractViolation("sample_truncated_normal: variance must be positive and finite");
  }
  if (!(lo < hi)) throw ContractViolation("sample_truncated_normal: need lo < hi");
  if (!std::isfinite(mean)) throw ContractViolation("sample_truncated_normal: mean not finite");

  const double s = std::sqrt(var);
  const double a = (lo - mean) / s;
  const double b = (hi - mean) / s;
  double x = mean + s * standard_interval(a, b, rng);
  // Rounding in mean + s*z can land on an endpoint; keep the support open.
  if (!(x > lo)) x = std::nextafter(lo, hi);
  if (!(x < hi)) x = std::nextafter(hi, lo);
  return x;
}

}  // namespace npf
