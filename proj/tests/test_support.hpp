#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "npf/linear_gaussian.hpp"
#include "npf/model.hpp"

namespace npf::test {

/// Scalar model with x' = x, a constant likelihood and theta in [0, 1].
class IdentityModel final : public StateSpaceModel {
 public:
  explicit IdentityModel(double log_g = 0.0) : log_g_(log_g), box_({0.0}, {1.0}) {}
  std::string name() const override { return "identity"; }
  std::size_t param_dim() const override { return 1; }
  std::size_t state_dim() const override { return 1; }
  std::size_t obs_dim() const override { return 1; }
  StateVector sample_state_prior(Rng& rng) const override { return StateVector{rng.normal()}; }
  StateVector sample_transition(const ParamVector&, const StateVector& prev, std::size_t,
                                Rng&) const override {
    return prev;
  }
  double log_likelihood(const ParamVector&, const StateVector& x, const ObsVector&,
                        std::size_t) const override {
    return x.all_finite() ? log_g_ : -INFINITY;
  }
  ParamVector sample_param_prior(Rng& rng) const override { return sample_uniform(box_, rng); }
  const SupportBox& support() const override { return box_; }
  ObsVector sample_observation(const ParamVector&, const StateVector& x, std::size_t,
                               Rng&) const override {
    return ObsVector{x[0]};
  }

 private:
  double log_g_;
  SupportBox box_;
};

/// Two-parameter model whose transition copies theta into the state, so an
/// inner set always reveals the parameter it was last propagated under.
class ThetaEchoModel final : public StateSpaceModel {
 public:
  ThetaEchoModel() : box_({0.0, 0.0}, {1.0, 1.0}) {}
  std::string name() const override { return "theta_echo"; }
  std::size_t param_dim() const override { return 2; }
  std::size_t state_dim() const override { return 2; }
  std::size_t obs_dim() const override { return 1; }
  StateVector sample_state_prior(Rng&) const override { return StateVector{-1.0, -1.0}; }
  StateVector sample_transition(const ParamVector& theta, const StateVector&, std::size_t,
                                Rng&) const override {
    return StateVector{theta[0], theta[1]};
  }
  double log_likelihood(const ParamVector&, const StateVector& x, const ObsVector& y,
                        std::size_t) const override {
    return log_normal_pdf(y[0], x[0] + x[1], 0.5);
  }
  ParamVector sample_param_prior(Rng& rng) const override { return sample_uniform(box_, rng); }
  const SupportBox& support() const override { return box_; }
  ObsVector sample_observation(const ParamVector&, const StateVector& x, std::size_t,
                               Rng& rng) const override {
    return ObsVector{x[0] + x[1] + std::sqrt(0.5) * rng.normal()};
  }

 private:
  SupportBox box_;
};

/// Wraps a model and replaces its parameter prior by a point mass.
class PointPriorModel final : public StateSpaceModel {
 public:
  PointPriorModel(ModelPtr base, ParamVector point) : base_(std::move(base)), point_(std::move(point)) {}
  std::string name() const override { return base_->name() + "_point"; }
  std::size_t param_dim() const override { return base_->param_dim(); }
  std::size_t state_dim() const override { return base_->state_dim(); }
  std::size_t obs_dim() const override { return base_->obs_dim(); }
  StateVector sample_state_prior(Rng& rng) const override { return base_->sample_state_prior(rng); }
  StateVector sample_transition(const ParamVector& theta, const StateVector& prev, std::size_t t,
                                Rng& rng) const override {
    return base_->sample_transition(theta, prev, t, rng);
  }
  double log_likelihood(const ParamVector& theta, const StateVector& x, const ObsVector& y,
                        std::size_t t) const override {
    return base_->log_likelihood(theta, x, y, t);
  }
  ParamVector sample_param_prior(Rng&) const override { return point_; }
  const SupportBox& support() const override { return base_->support(); }
  ObsVector sample_observation(const ParamVector& theta, const StateVector& x, std::size_t t,
                               Rng& rng) const override {
    return base_->sample_observation(theta, x, t, rng);
  }

 private:
  ModelPtr base_;
  ParamVector point_;
};

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Standard error of the sample mean.
inline double std_error(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

inline std::vector<double> scalar_obs(const std::vector<ObsVector>& obs) {
  std::vector<double> ys;
  for (const auto& y : obs) ys.push_back(y[0]);
  return ys;
}

}  // namespace npf::test
