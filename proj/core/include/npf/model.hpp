#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "npf/rng.hpp"
#include "npf/types.hpp"

namespace npf {

/// A state-space Markov model indexed by a static parameter.
///
/// Implementations are immutable after construction and every method is
/// safe to call concurrently; randomness only enters through the Rng the
/// caller passes in. Time indices are explicit so inhomogeneous kernels are
/// representable.
///
/// Likelihoods are returned in log domain. A value of -infinity means the
/// observation is impossible under (theta, x); NaN is never returned.
class StateSpaceModel {
 public:
  virtual ~StateSpaceModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t param_dim() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t obs_dim() const = 0;

  /// Draw X_0 from the (parameter-free) state prior.
  virtual StateVector sample_state_prior(Rng& rng) const = 0;

  /// Draw X_t given X_{t-1} = prev under parameter theta. A trajectory that
  /// diverges is reported by returning a state with non-finite coordinates.
  virtual StateVector sample_transition(const ParamVector& theta,
                                        const StateVector& prev, std::size_t t,
                                        Rng& rng) const = 0;

  /// log g_{t,theta}(y | x).
  virtual double log_likelihood(const ParamVector& theta, const StateVector& x,
                                const ObsVector& y, std::size_t t) const = 0;

  /// Draw from the parameter prior; the result is always inside support().
  virtual ParamVector sample_param_prior(Rng& rng) const = 0;

  virtual const SupportBox& support() const = 0;

  /// Draw Y_t given X_t = x, used to synthesise ground truth.
  virtual ObsVector sample_observation(const ParamVector& theta,
                                       const StateVector& x, std::size_t t,
                                       Rng& rng) const = 0;
};

using ModelPtr = std::shared_ptr<const StateSpaceModel>;

/// Log-density of N(mean, var) at x.
double log_normal_pdf(double x, double mean, double var) noexcept;

/// Uniform draw over a box.
ParamVector sample_uniform(const SupportBox& box, Rng& rng);

/// Simulated trajectory of a generic model: hidden states X_1..X_T and the
/// observations Y_1..Y_T.
struct Trajectory {
  StateVector initial_state;
  std::vector<StateVector> states;
  std::vector<ObsVector> observations;
};

/// Simulate T steps of `model` under `theta`. Throws DivergenceError if the
/// transition ever produces a non-finite state.
Trajectory simulate(const StateSpaceModel& model, const ParamVector& theta,
                    std::size_t steps, Rng& rng);

}  // namespace npf
