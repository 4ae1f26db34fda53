#include "npf/linear_gaussian.hpp"

#include <cmath>

namespace npf {

namespace {

const LinearGaussianConfig& validated(const LinearGaussianConfig& cfg) {
  if (!(cfg.q > 0.0) || !(cfg.r > 0.0) || !(cfg.prior_var > 0.0)) {
    throw ContractViolation("linear-Gaussian model: variances must be positive");
  }
  return cfg;
}

}  // namespace

LinearGaussianModel::LinearGaussianModel(const LinearGaussianConfig& cfg)
    : cfg_(validated(cfg)), box_({cfg.a_lower}, {cfg.a_upper}) {}

StateVector LinearGaussianModel::sample_state_prior(Rng& rng) const {
  return StateVector{cfg_.prior_mean + std::sqrt(cfg_.prior_var) * rng.normal()};
}

StateVector LinearGaussianModel::sample_transition(const ParamVector& theta,
                                                   const StateVector& prev, std::size_t,
                                                   Rng& rng) const {
  return StateVector{theta[0] * prev[0] + std::sqrt(cfg_.q) * rng.normal()};
}

double LinearGaussianModel::log_likelihood(const ParamVector&, const StateVector& x,
                                           const ObsVector& y, std::size_t) const {
  if (!std::isfinite(x[0])) return -INFINITY;
  return log_normal_pdf(y[0], x[0], cfg_.r);
}

ParamVector LinearGaussianModel::sample_param_prior(Rng& rng) const {
  return sample_uniform(box_, rng);
}

ObsVector LinearGaussianModel::sample_observation(const ParamVector&, const StateVector& x,
                                                  std::size_t, Rng& rng) const {
  return ObsVector{x[0] + std::sqrt(cfg_.r) * rng.normal()};
}

std::shared_ptr<const LinearGaussianModel> build_linear_gaussian_model(double a, double q,
                                                                       double r) {
  LinearGaussianConfig cfg;
  cfg.a = a;
  cfg.q = q;
  cfg.r = r;
  return build_linear_gaussian_model(cfg);
}

std::shared_ptr<const LinearGaussianModel> build_linear_gaussian_model(
    const LinearGaussianConfig& cfg) {
  return std::make_shared<const LinearGaussianModel>(cfg);
}

}  // namespace npf
