#pragma once

#include <memory>

#include "npf/model.hpp"

namespace npf {

/// Synthetic model whose likelihood is confined to [1/g_bound, g_bound]:
///   x_t = 0.5 x_{t-1} + u_t,              u_t ~ N(0, 1)
///   y_t = theta + x_t + v_t,              v_t ~ N(0, 1)
///   log g = log(g_bound) * (2 exp(-(y - theta - x)^2 / 2) - 1)
/// theta lives in [0, 1]. With g_bound = 1 the likelihood is constant.
class BoundedLikelihoodModel final : public StateSpaceModel {
 public:
  BoundedLikelihoodModel(double g_bound, double true_theta);

  std::string name() const override { return "bounded_likelihood"; }
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

  double g_bound() const noexcept { return g_bound_; }
  ParamVector true_params() const { return ParamVector{true_theta_}; }

 private:
  double g_bound_;
  double log_g_bound_;
  double true_theta_;
  SupportBox box_;
};

}  // namespace npf
