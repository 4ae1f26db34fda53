#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "npf/types.hpp"

namespace npf {

/// Normalised effective sample size of one weighted parameter system,
/// counting bit-identical parameter particles as replicas of one another.
struct NessRecord {
  double ness = 1.0;             ///< in [1/N, 1]
  std::size_t n_distinct = 0;    ///< number of distinct particles
  std::size_t max_replicas = 0;  ///< largest replica count
  std::size_t n_total = 0;       ///< N
};

struct DistinctCount {
  std::size_t n_distinct = 0;
  /// Replica count per distinct particle, in order of first appearance.
  std::vector<std::size_t> counts;
  /// Group index of every input particle.
  std::vector<std::size_t> group_of;
};

/// Group particles by exact bit equality of all coordinates.
DistinctCount count_distinct(std::span<const ParamVector> thetas);

/// NESS = (sum_j u_j)^2 / (N * sum_i (n_i * u~_i)^2), where i runs over the
/// distinct particles, n_i is the replica count and u~_i is the mean of the
/// replicas' likelihoods. Computed from log-likelihoods after dividing by
/// max u. Throws DegenerateWeightsError if every log_u is -inf.
NessRecord compute_ness(std::span<const ParamVector> thetas, std::span<const double> log_u);

struct NessBoundReport {
  double g_bound = 1.0;
  double bound_all_distinct = 1.0;  ///< 1 / g^4, applies when every particle is distinct
  double bound_near_distinct = 0.5; ///< 1 / (2 g^4), applies when n_distinct >= N - sqrt(N) + 1
  double min_ness = 1.0;
  std::size_t steps_all_distinct = 0;
  std::size_t steps_near_distinct = 0;
  std::size_t steps_uncovered = 0;  ///< too few distinct particles for either bound
  /// Every covered step satisfies its bound (up to 1e-12 relative rounding).
  bool holds = true;
};

/// Check a NESS history against the lower bounds that hold for likelihoods
/// confined to [1/g_bound, g_bound].
NessBoundReport check_ness_bound(std::span<const NessRecord> history, double g_bound);

/// |estimate - truth| / |truth|; throws ContractViolation for truth = 0.
double normalized_abs_error(double estimate, double truth);

struct RateFit {
  double c_hat = 0.0;
  double residual = 0.0;  ///< sum of squared residuals
};

/// Least-squares fit of e(N) = c / sqrt(N):
/// c = sum(e_k / sqrt(N_k)) / sum(1 / N_k).
RateFit fit_inverse_sqrt_rate(std::span<const std::pair<double, double>> points);

/// Least-squares slope of log(y) against log(x). Needs >= 2 points, all positive.
double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// `t,ness,n_distinct,max_replicas`, one row per record, t starting at 1.
void write_ness_csv(std::span<const NessRecord> history, std::ostream& os);

}  // namespace npf
