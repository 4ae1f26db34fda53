#pragma once

#include <memory>

#include "npf/model.hpp"

namespace npf {

struct LinearGaussianConfig {
  double a = 0.9;  ///< true autoregression coefficient (used for simulation)
  double q = 1.0;  ///< transition noise variance
  double r = 1.0;  ///< observation noise variance
  double prior_mean = 0.0;
  double prior_var = 1.0;
  double a_lower = -1.0;  ///< support of the unknown coefficient
  double a_upper = 1.0;
};

/// Scalar AR(1) observed in Gaussian noise, with the coefficient as the
/// unknown parameter:
///   x_t = a x_{t-1} + u_t,  u_t ~ N(0, q)
///   y_t = x_t + v_t,        v_t ~ N(0, r)
/// The exact Kalman recursion is available for it, which makes it the
/// reference model for checking the particle filters.
class LinearGaussianModel final : public StateSpaceModel {
 public:
  explicit LinearGaussianModel(const LinearGaussianConfig& cfg);

  std::string name() const override { return "linear_gaussian"; }
  std::size_t param_dim() const override { return 1; }
  std::size_t state_dim() const override { return 1; }
  std::size_t obs_dim() const override { return 1; }

  StateVector sample_state_prior(Rng& rng) const override;
  StateVector sample_transition(const ParamVector& theta, const StateVector& prev,
                                std::size_t t, Rng& rng) const override;
  double log_likelihood(const ParamVector& theta, const StateVector& x,
                        const ObsVector& y, std::size_t t) const override;
  ParamVector sample_param_prior(Rng& rng) const override;
  const SupportBox& support() const override { return box_; }
  ObsVector sample_observation(const ParamVector& theta, const StateVector& x,
                               std::size_t t, Rng& rng) const override;

  const LinearGaussianConfig& config() const noexcept { return cfg_; }
  ParamVector true_params() const { return ParamVector{cfg_.a}; }

 private:
  LinearGaussianConfig cfg_;
  SupportBox box_;
};

/// Requires q > 0 and r > 0.
std::shared_ptr<const LinearGaussianModel> build_linear_gaussian_model(double a, double q,
                                                                       double r);
std::shared_ptr<const LinearGaussianModel> build_linear_gaussian_model(
    const LinearGaussianConfig& cfg);

}  // namespace npf
