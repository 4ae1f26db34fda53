#include "npf/model.hpp"

#include <cmath>
#include <numbers>

namespace npf {

SupportBox::SupportBox(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw ContractViolation("SupportBox: lower/upper dimension mismatch");
  }
  if (lower_.empty()) throw ContractViolation("SupportBox: empty box");
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    if (!(lower_[k] < upper_[k]) || !std::isfinite(lower_[k]) ||
        !std::isfinite(upper_[k])) {
      throw ContractViolation("SupportBox: need finite lower < upper in every dimension");
    }
  }
}

ParamVector SupportBox::midpoint() const {
  ParamVector m(dim());
  for (std::size_t k = 0; k < dim(); ++k) m[k] = 0.5 * (lower_[k] + upper_[k]);
  return m;
}

double SupportBox::diameter() const {
  double s = 0.0;
  for (std::size_t k = 0; k < dim(); ++k) s += width(k) * width(k);
  return std::sqrt(s);
}

bool contains(const SupportBox& box, const ParamVector& theta) {
  if (theta.size() != box.dim()) {
    throw ContractViolation("contains: parameter dimension " + std::to_string(theta.size()) +
                            " does not match box dimension " + std::to_string(box.dim()));
  }
  for (std::size_t k = 0; k < box.dim(); ++k) {
    if (!(box.lower(k) <= theta[k] && theta[k] <= box.upper(k))) return false;
  }
  return true;
}

double log_normal_pdf(double x, double mean, double var) noexcept {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

ParamVector sample_uniform(const SupportBox& box, Rng& rng) {
  ParamVector theta(box.dim());
  for (std::size_t k = 0; k < box.dim(); ++k) {
    theta[k] = rng.uniform(box.lower(k), box.upper(k));
  }
  return theta;
}

Trajectory simulate(const StateSpaceModel& model, const ParamVector& theta,
                    std::size_t steps, Rng& rng) {
  Trajectory out;
  out.initial_state = model.sample_state_prior(rng);
  out.states.reserve(steps);
  out.observations.reserve(steps);
  StateVector x = out.initial_state;
  for (std::size_t t = 1; t <= steps; ++t) {
    x = model.sample_transition(theta, x, t, rng);
    if (!x.all_finite()) {
      throw DivergenceError(model.name() + ": state diverged at step " + std::to_string(t), t);
    }
    out.observations.push_back(model.sample_observation(theta, x, t, rng));
    out.states.push_back(x);
  }
  return out;
}

}  // namespace npf
