#include "npf/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "npf/types.hpp"

namespace npf {

namespace {

double max_finite(std::span<const double> v) noexcept {
  double m = -INFINITY;
  for (double x : v) {
    if (x > m) m = x;
  }
  return m;
}

void check_some_finite(double max_log, std::size_t step) {
  if (!std::isfinite(max_log)) {
    throw DegenerateWeightsError(
        "all weights are zero (every log-weight is -inf) at step " + std::to_string(step), step);
  }
}

}  // namespace

double log_sum_exp(std::span<const double> log_values) noexcept {
  const double m = max_finite(log_values);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : log_values) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> normalize_log_weights(std::span<const double> log_w, std::size_t step) {
  const double m = max_finite(log_w);
  check_some_finite(m, step);
  std::vector<double> w(log_w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    w[i] = std::exp(log_w[i] - m);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<std::size_t> multinomial_indices(std::span<const double> log_w, std::size_t count,
                                             Rng& rng, std::size_t step) {
  const double m = max_finite(log_w);
  check_some_finite(m, step);

  std::vector<double> cumulative(log_w.size());
  double total = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    const double w = std::exp(log_w[i] - m);
    if (w > 0.0) last_positive = i;
    total += w;
    cumulative[i] = total;
  }

  std::vector<std::size_t> out(count);
  for (auto& idx : out) {
    const double v = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), v);
    idx = it == cumulative.end() ? last_positive
                                 : static_cast<std::size_t>(it - cumulative.begin());
  }
  return out;
}

}  // namespace npf
