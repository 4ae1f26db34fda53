#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "npf/csv.hpp"
#include "npf/diagnostics.hpp"
#include "npf/inner_filter.hpp"
#include "npf/jitter.hpp"
#include "npf/model.hpp"

namespace npf {

/// N parameter particles, each carrying its own M-particle state filter.
struct NestedSystem {
  struct Entry {
    ParamVector theta;
    InnerParticleSet inner;
  };

  std::vector<Entry> outer;
  /// log u_t^M of the last step before resampling; all zero afterwards.
  std::vector<double> log_weights;
  std::size_t t = 0;

  std::size_t N() const noexcept { return outer.size(); }
  std::size_t M() const noexcept { return outer.empty() ? 0 : outer.front().inner.size(); }
  std::vector<ParamVector> thetas() const;
};

/// Everything a step reports. Statistics are taken from the weighted system
/// before outer resampling; mu_hat is the resampled, equally weighted set.
struct StepOutput {
  std::size_t t = 0;
  std::vector<ParamVector> mu_hat;
  std::vector<ParamVector> jittered;  ///< parameters after jittering, pre-resampling
  std::vector<double> per_theta_log_u;
  std::vector<double> weights;  ///< normalised outer weights
  std::vector<std::size_t> ancestors;  ///< outer resampling: new i came from ancestors[i]
  NessRecord ness;
  ParamVector param_mean;        ///< sum_i w_i * theta_bar_i
  StateVector joint_state_mean;  ///< sum_i w_i * mean_j x_tilde_ij
  double max_log_u = 0.0;
};

/// N parameters from the parameter prior, N*M states from the state prior.
NestedSystem initialize(const StateSpaceModel& model, std::size_t N, std::size_t M, Rng& rng);

/// One recursive step for observation y:
///  (a) for every i: jitter theta_i, push its inner set one step forward
///      under the jittered value, estimate u_t^M from the predicted set and
///      resample the inner set; this map runs in parallel with per-particle
///      streams derived from one draw of `rng`;
///  (b) normalise the outer weights proportional to u_t^M;
///  (c) resample (theta, inner set) pairs multinomially.
/// The inner filters are never re-run from time zero. Throws
/// DegenerateWeightsError carrying the epoch if every u_t^M is zero.
StepOutput step(NestedSystem& sys, const StateSpaceModel& model, const JitterKernel& kernel,
                const ObsVector& y, Rng& rng);

/// (1/N) sum_i h(theta_i) over the current equally weighted system.
double estimate_param(const NestedSystem& sys, const std::function<double(const ParamVector&)>& h);
double estimate_param(const StepOutput& out, const std::function<double(const ParamVector&)>& h);
/// Componentwise mean of the current parameter particles.
ParamVector param_estimate(const NestedSystem& sys);

/// (1/(N M)) sum_i sum_j f(theta_i, x_ij).
double estimate_joint(const NestedSystem& sys,
                      const std::function<double(const ParamVector&, const StateVector&)>& f);

using StepObserver = std::function<void(const NestedSystem&, const StepOutput&)>;

/// Initialise and step through every observation; the observer, if set,
/// sees each post-resampling system together with its step output.
NestedSystem run_nested(const StateSpaceModel& model, const JitterKernel& kernel,
                        std::span<const ObsVector> observations, std::size_t N, std::size_t M,
                        Rng& rng, const StepObserver& observer = {});

/// `t,ness,param_mean_1..d_theta,state_mean_1..d_x,max_log_u`.
class StepCsvWriter {
 public:
  StepCsvWriter(std::ostream& os, std::size_t param_dim, std::size_t state_dim);
  void write(const StepOutput& out);

 private:
  std::size_t param_dim_;
  std::size_t state_dim_;
  CsvWriter csv_;
};

}  // namespace npf
