#include "npf/bounded_likelihood.hpp"

#include <cmath>

namespace npf {

BoundedLikelihoodModel::BoundedLikelihoodModel(double g_bound, double true_theta)
    : g_bound_(g_bound),
      log_g_bound_(std::log(g_bound)),
      true_theta_(true_theta),
      box_({0.0}, {1.0}) {
  if (!(g_bound >= 1.0) || !std::isfinite(g_bound)) {
    throw ContractViolation("bounded-likelihood model: g_bound must be finite and >= 1");
  }
}

StateVector BoundedLikelihoodModel::sample_state_prior(Rng& rng) const {
  return StateVector{rng.normal()};
}

StateVector BoundedLikelihoodModel::sample_transition(const ParamVector&,
                                                      const StateVector& prev, std::size_t,
                                                      Rng& rng) const {
  return StateVector{0.5 * prev[0] + rng.normal()};
}

double BoundedLikelihoodModel::log_likelihood(const ParamVector& theta, const StateVector& x,
                                              const ObsVector& y, std::size_t) const {
  if (!std::isfinite(x[0])) return -INFINITY;
  const double d = y[0] - theta[0] - x[0];
  return log_g_bound_ * (2.0 * std::exp(-0.5 * d * d) - 1.0);
}

ParamVector BoundedLikelihoodModel::sample_param_prior(Rng& rng) const {
  return sample_uniform(box_, rng);
}

ObsVector BoundedLikelihoodModel::sample_observation(const ParamVector& theta,
                                                     const StateVector& x, std::size_t,
                                                     Rng& rng) const {
  return ObsVector{theta[0] + x[0] + rng.normal()};
}

}  // namespace npf
