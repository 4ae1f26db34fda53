#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include "npf/model.hpp"

namespace npf::lorenz63 {

/// Parameter layout: (S, R, B, k_o).
inline constexpr std::size_t kParamDim = 4;
inline constexpr std::size_t kStateDim = 3;
inline constexpr std::size_t kObsDim = 2;
/// Any coordinate beyond this magnitude counts as a diverged trajectory.
inline constexpr double kDivergenceThreshold = 1e6;

struct LorenzConfig {
  double T_e = 1e-3;         ///< Euler-Maruyama integration step
  std::size_t obs_gap = 40;  ///< discrete steps between observations
  double obs_var = 0.1;      ///< observation noise variance
  StateVector x_star{-5.91652, -5.52332, 24.5723};
  double v0_sq = 10.0;  ///< prior variance of each state coordinate

  /// Throws ContractViolation unless T_e > 0, obs_gap >= 1, obs_var > 0, v0_sq > 0.
  void validate() const;
};

/// Uniform prior box: S in (5,20), R in (18,50), B in (1,8), k_o in (0.5,3).
SupportBox support_box();
/// (10, 28, 8/3, 0.8).
ParamVector reference_params();

/// One Euler-Maruyama step of the stochastic Lorenz 63 system. Only (S,R,B)
/// of theta are read.
StateVector euler_step(const ParamVector& theta, const StateVector& x,
                       const std::array<double, 3>& noise, double T_e);

/// (k_o x1 + obs_std n1, k_o x3 + obs_std n2).
ObsVector observe(const ParamVector& theta, const StateVector& x,
                  const std::array<double, 2>& noise, double obs_std);

struct GroundTruth {
  StateVector initial_state;
  /// X_1 .. X_{n_steps}: states[k] is the state after k+1 Euler steps.
  std::vector<StateVector> states;
  /// Y_1 .. Y_n, Y_n observing X_{n * obs_gap}.
  std::vector<ObsVector> observations;
  ParamVector true_params;
  std::size_t obs_gap = 40;
  double T_e = 1e-3;

  std::size_t epochs() const noexcept { return observations.size(); }
  /// The hidden state observed at epoch n (1-based).
  const StateVector& state_at_epoch(std::size_t n) const {
    return states[n * obs_gap - 1];
  }
};

/// Simulate the truth: X_0 ~ N(x_star, v0_sq I), n_steps Euler steps, one
/// observation every obs_gap steps. Throws DivergenceError naming the step
/// if any coordinate exceeds kDivergenceThreshold. With observation_noise
/// false the observations are the noiseless k_o-scaled states.
GroundTruth simulate_truth(const LorenzConfig& cfg, const ParamVector& theta_true,
                           std::size_t n_steps, Rng& rng, bool observation_noise = true);

/// `epoch,t_continuous,x1,x2,x3,y1,y3`, one row per observation epoch.
void write_truth_csv(const GroundTruth& truth, std::ostream& os);

/// The filtering model at observation epochs: one transition chains obs_gap
/// Euler steps, so the hidden state at epoch n is X_{n * obs_gap}.
class LorenzModel final : public StateSpaceModel {
 public:
  explicit LorenzModel(LorenzConfig cfg);

  std::string name() const override { return "lorenz63"; }
  std::size_t param_dim() const override { return kParamDim; }
  std::size_t state_dim() const override { return kStateDim; }
  std::size_t obs_dim() const override { return kObsDim; }

  StateVector sample_state_prior(Rng& rng) const override;
  /// A diverged chain returns a state of +infinity in every coordinate.
  StateVector sample_transition(const ParamVector& theta, const StateVector& prev,
                                std::size_t t, Rng& rng) const override;
  double log_likelihood(const ParamVector& theta, const StateVector& x,
                        const ObsVector& y, std::size_t t) const override;
  ParamVector sample_param_prior(Rng& rng) const override;
  const SupportBox& support() const override { return box_; }
  ObsVector sample_observation(const ParamVector& theta, const StateVector& x,
                               std::size_t t, Rng& rng) const override;

  const LorenzConfig& config() const noexcept { return cfg_; }

 private:
  LorenzConfig cfg_;
  SupportBox box_;
  double obs_std_;
};

std::shared_ptr<const LorenzModel> build_lorenz_model(const LorenzConfig& cfg);

}  // namespace npf::lorenz63
