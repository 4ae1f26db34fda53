#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "npf/rng.hpp"
#include "npf/types.hpp"

namespace npf {

/// kappa_N = (1 - eps_N) delta_{theta'} + eps_N * base, with
/// eps_N = min(1, N^{-p/2}) unless overridden. The base kernel is uniform
/// over the support box, or a per-dimension truncated Gaussian centred on
/// theta' when base_spread is given.
struct MixtureDiracKernel {
  double p = 1.0;
  std::optional<double> epsilon;    ///< fixed eps_N for every N
  std::vector<double> base_spread;  ///< standard deviations; empty = uniform base
};

/// Independent truncated Gaussians per dimension, centred on theta', with
/// variances c_k * N^{-(p+2)/2}, truncated to the support box.
struct TruncatedGaussianKernel {
  double p = 1.0;
  std::vector<double> constants;
};

class JitterKernel {
 public:
  enum class Kind { MixtureDirac, TruncatedGaussian };

  JitterKernel(SupportBox box, MixtureDiracKernel params);
  JitterKernel(SupportBox box, TruncatedGaussianKernel params);

  /// Mixture kernel with eps_N = 0: parameters are never moved.
  static JitterKernel none(SupportBox box);
  /// Truncated Gaussian kernel with exponent p = 1.
  static JitterKernel truncated_gaussian(SupportBox box, std::vector<double> constants,
                                         double p = 1.0);
  static JitterKernel mixture_dirac(SupportBox box, double p = 1.0,
                                    std::optional<double> epsilon = std::nullopt,
                                    std::vector<double> base_spread = {});

  Kind kind() const noexcept;
  std::string describe() const;
  const SupportBox& support() const noexcept { return box_; }
  const std::variant<MixtureDiracKernel, TruncatedGaussianKernel>& params() const noexcept {
    return params_;
  }
  /// True when the kernel always returns its anchor.
  bool is_identity() const noexcept;

  /// Probability that an anchor is perturbed. 1 for the truncated Gaussian.
  double epsilon(std::size_t N) const;

 private:
  SupportBox box_;
  std::variant<MixtureDiracKernel, TruncatedGaussianKernel> params_;
};

/// Per-dimension jitter variances c_k * N^{-(p+2)/2} of a truncated Gaussian
/// kernel. Throws ContractViolation for N = 0 or a mixture kernel.
std::vector<double> variance_schedule(const JitterKernel& kernel, std::size_t N);

/// One draw from kappa_N^{anchor}. Throws ContractViolation if the anchor is
/// outside the kernel's support or N = 0.
ParamVector sample_jitter(const JitterKernel& kernel, const ParamVector& anchor, std::size_t N,
                          Rng& rng);

struct MomentAtN {
  std::size_t N = 0;
  double sup_moment = 0.0;       ///< max over anchors of the mean ||theta - anchor||^p
  std::size_t worst_anchor = 0;  ///< index of the anchor attaining the max
  double scaled = 0.0;           ///< sup_moment * N^{p/2}
};

struct MomentReport {
  double p = 1.0;
  std::vector<MomentAtN> points;
  /// Smallest c with sup_moment <= c^p / N^{p/2} at every N tested.
  double fitted_constant = 0.0;
  /// Least-squares slope of log sup_moment against log N; NaN if any moment is 0.
  double loglog_slope = 0.0;
  /// The bound's constant does not grow with N: slope <= -p/2 + slope_tolerance,
  /// or every moment is exactly zero.
  bool stable = false;
};

struct MomentCheckOptions {
  std::size_t trials = 1000;
  /// Anchors to take the supremum over; empty = a 3-level grid per dimension
  /// (lower, midpoint, upper).
  std::vector<ParamVector> anchors;
  double slope_tolerance = 0.15;
};

/// Monte Carlo check of sup_{anchor} E ||theta - anchor||^p <= c^p / N^{p/2}.
/// Requires trials >= 1000 and at least one N.
MomentReport check_moment_bound(const JitterKernel& kernel, const std::vector<std::size_t>& N_values,
                                double p, Rng& rng, const MomentCheckOptions& options = {});

/// Grid of anchors with `levels` equally spaced values per dimension,
/// endpoints included.
std::vector<ParamVector> anchor_grid(const SupportBox& box, std::size_t levels);

}  // namespace npf
