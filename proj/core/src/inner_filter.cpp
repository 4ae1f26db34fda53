#include "npf/inner_filter.hpp"

#include <cmath>

#include "npf/weights.hpp"

namespace npf {

InnerParticleSet::InnerParticleSet(std::vector<StateVector> particles)
    : particles_(std::move(particles)) {
  if (particles_.empty()) throw ContractViolation("InnerParticleSet: M must be >= 1");
}

StateVector InnerParticleSet::mean() const {
  StateVector m(particles_.front().size());
  for (const auto& x : particles_) {
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += x[k];
  }
  for (auto& v : m) v /= static_cast<double>(particles_.size());
  return m;
}

InnerParticleSet sample_inner_prior(const StateSpaceModel& model, std::size_t M, Rng& rng) {
  if (M < 1) throw ContractViolation("sample_inner_prior: M must be >= 1");
  std::vector<StateVector> xs;
  xs.reserve(M);
  for (std::size_t j = 0; j < M; ++j) xs.push_back(model.sample_state_prior(rng));
  return InnerParticleSet(std::move(xs));
}

InnerParticleSet propagate(const InnerParticleSet& set, const StateSpaceModel& model,
                           const ParamVector& theta, std::size_t t, Rng& rng) {
  std::vector<StateVector> xs;
  xs.reserve(set.size());
  for (const auto& x : set.particles()) {
    if (!x.all_finite()) {
      xs.push_back(x);
      continue;
    }
    xs.push_back(model.sample_transition(theta, x, t, rng));
  }
  return InnerParticleSet(std::move(xs));
}

LikelihoodEstimate estimate_likelihood(const InnerParticleSet& predicted,
                                       const StateSpaceModel& model, const ParamVector& theta,
                                       const ObsVector& y, std::size_t t) {
  LikelihoodEstimate est;
  est.per_particle_log_g.reserve(predicted.size());
  for (const auto& x : predicted.particles()) {
    double lg = x.all_finite() ? model.log_likelihood(theta, x, y, t) : -INFINITY;
    if (std::isnan(lg)) lg = -INFINITY;
    est.per_particle_log_g.push_back(lg);
  }
  est.log_u = log_sum_exp(est.per_particle_log_g) - std::log(static_cast<double>(predicted.size()));
  return est;
}

InnerParticleSet resample_multinomial(const InnerParticleSet& set,
                                      std::span<const double> per_particle_log_g, Rng& rng,
                                      std::size_t step) {
  if (per_particle_log_g.size() != set.size()) {
    throw ContractViolation("resample_multinomial: one log-weight per particle required");
  }
  const auto idx = multinomial_indices(per_particle_log_g, set.size(), rng, step);
  std::vector<StateVector> xs;
  xs.reserve(set.size());
  for (auto j : idx) xs.push_back(set[j]);
  return InnerParticleSet(std::move(xs));
}

double BootstrapRun::log_marginal() const {
  double s = 0.0;
  for (const auto& st : steps) s += st.estimate.log_u;
  return s;
}

BootstrapRun run_bootstrap(const StateSpaceModel& model, const ParamVector& theta,
                           std::span<const ObsVector> observations, std::size_t M, Rng& rng) {
  if (M < 1) throw ContractViolation("run_bootstrap: M must be >= 1");
  BootstrapRun run{sample_inner_prior(model, M, rng), {}};
  run.steps.reserve(observations.size());

  const InnerParticleSet* current = &run.initial;
  for (std::size_t t = 1; t <= observations.size(); ++t) {
    auto predicted = propagate(*current, model, theta, t, rng);
    auto est = estimate_likelihood(predicted, model, theta, observations[t - 1], t);
    auto filtered = resample_multinomial(predicted, est.per_particle_log_g, rng, t);
    auto mean = filtered.mean();
    run.steps.push_back({std::move(filtered), std::move(est), std::move(mean)});
    current = &run.steps.back().filtered;
  }
  return run;
}

}  // namespace npf
