#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "npf/model.hpp"

namespace npf {

/// M state particles approximating a conditional filter for one parameter
/// value. The particle count is fixed at construction.
class InnerParticleSet {
 public:
  /// Throws ContractViolation if `particles` is empty.
  explicit InnerParticleSet(std::vector<StateVector> particles);

  std::size_t size() const noexcept { return particles_.size(); }
  const StateVector& operator[](std::size_t j) const { return particles_[j]; }
  const std::vector<StateVector>& particles() const noexcept { return particles_; }

  /// Coordinate-wise mean over the particles.
  StateVector mean() const;

 private:
  std::vector<StateVector> particles_;
};

/// u_t^M(theta) in log domain together with the per-particle terms needed
/// by the resampling step.
struct LikelihoodEstimate {
  double log_u = 0.0;
  std::vector<double> per_particle_log_g;
};

/// M i.i.d. draws from the state prior.
InnerParticleSet sample_inner_prior(const StateSpaceModel& model, std::size_t M, Rng& rng);

/// Move every particle through the transition kernel under theta. Diverged
/// draws are kept as non-finite sentinels; they get zero likelihood.
InnerParticleSet propagate(const InnerParticleSet& set, const StateSpaceModel& model,
                           const ParamVector& theta, std::size_t t, Rng& rng);

/// log u = logsumexp(log g_j) - log M over the predicted particles. All-zero
/// likelihood gives log_u = -inf, which is a valid result.
LikelihoodEstimate estimate_likelihood(const InnerParticleSet& predicted,
                                       const StateSpaceModel& model, const ParamVector& theta,
                                       const ObsVector& y, std::size_t t);

/// M draws with replacement, probabilities proportional to exp(log g).
/// Throws DegenerateWeightsError (with `step`) when every log g is -inf.
InnerParticleSet resample_multinomial(const InnerParticleSet& set,
                                      std::span<const double> per_particle_log_g, Rng& rng,
                                      std::size_t step = 0);

struct BootstrapStep {
  InnerParticleSet filtered;  ///< after resampling
  LikelihoodEstimate estimate;
  StateVector filter_mean;  ///< mean of the filtered set
};

struct BootstrapRun {
  InnerParticleSet initial;
  std::vector<BootstrapStep> steps;

  double log_marginal() const;
};

/// Bootstrap filter for a fixed parameter: prior initialisation, then for
/// every observation propagate, weight and resample.
BootstrapRun run_bootstrap(const StateSpaceModel& model, const ParamVector& theta,
                           std::span<const ObsVector> observations, std::size_t M, Rng& rng);

}  // namespace npf
