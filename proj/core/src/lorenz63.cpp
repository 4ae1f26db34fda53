#include "npf/lorenz63.hpp"

#include <cmath>
#include <ostream>

#include "npf/csv.hpp"

namespace npf::lorenz63 {

namespace {

using State3 = std::array<double, 3>;

inline void euler_inplace(double S, double R, double B, State3& x, const State3& n,
                          double T_e, double sqrt_T_e) {
  const double x1 = x[0];
  const double x2 = x[1];
  const double x3 = x[2];
  x[0] = x1 - T_e * S * (x1 - x2) + sqrt_T_e * n[0];
  x[1] = x2 + T_e * (R * x1 - x2 - x1 * x3) + sqrt_T_e * n[1];
  x[2] = x3 + T_e * (x1 * x2 - B * x3) + sqrt_T_e * n[2];
}

inline bool diverged(const State3& x) {
  for (double v : x) {
    if (!(std::abs(v) <= kDivergenceThreshold)) return true;
  }
  return false;
}

}  // namespace

void LorenzConfig::validate() const {
  if (!(T_e > 0.0)) throw ContractViolation("LorenzConfig: T_e must be positive");
  if (obs_gap < 1) throw ContractViolation("LorenzConfig: obs_gap must be >= 1");
  if (!(obs_var > 0.0)) throw ContractViolation("LorenzConfig: obs_var must be positive");
  if (!(v0_sq > 0.0)) throw ContractViolation("LorenzConfig: v0_sq must be positive");
  if (x_star.size() != kStateDim) throw ContractViolation("LorenzConfig: x_star must be 3-d");
}

SupportBox support_box() { return SupportBox({5.0, 18.0, 1.0, 0.5}, {20.0, 50.0, 8.0, 3.0}); }

ParamVector reference_params() { return ParamVector{10.0, 28.0, 8.0 / 3.0, 0.8}; }

StateVector euler_step(const ParamVector& theta, const StateVector& x,
                       const std::array<double, 3>& noise, double T_e) {
  State3 s{x[0], x[1], x[2]};
  euler_inplace(theta[0], theta[1], theta[2], s, noise, T_e, std::sqrt(T_e));
  return StateVector{s[0], s[1], s[2]};
}

ObsVector observe(const ParamVector& theta, const StateVector& x,
                  const std::array<double, 2>& noise, double obs_std) {
  const double k_o = theta[3];
  return ObsVector{k_o * x[0] + obs_std * noise[0], k_o * x[2] + obs_std * noise[1]};
}

GroundTruth simulate_truth(const LorenzConfig& cfg, const ParamVector& theta_true,
                           std::size_t n_steps, Rng& rng, bool observation_noise) {
  cfg.validate();
  if (theta_true.size() != kParamDim) {
    throw ContractViolation("simulate_truth: theta must be (S, R, B, k_o)");
  }
  if (n_steps < cfg.obs_gap) {
    throw ContractViolation("simulate_truth: n_steps must be >= obs_gap");
  }

  GroundTruth truth;
  truth.true_params = theta_true;
  truth.obs_gap = cfg.obs_gap;
  truth.T_e = cfg.T_e;

  const double v0 = std::sqrt(cfg.v0_sq);
  State3 x;
  for (std::size_t k = 0; k < kStateDim; ++k) x[k] = cfg.x_star[k] + v0 * rng.normal();
  truth.initial_state = StateVector{x[0], x[1], x[2]};

  const double sqrt_T_e = std::sqrt(cfg.T_e);
  const double obs_std = std::sqrt(cfg.obs_var);
  truth.states.reserve(n_steps);
  truth.observations.reserve(n_steps / cfg.obs_gap);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const State3 n{rng.normal(), rng.normal(), rng.normal()};
    euler_inplace(theta_true[0], theta_true[1], theta_true[2], x, n, cfg.T_e, sqrt_T_e);
    if (diverged(x)) {
      throw DivergenceError("simulate_truth: Lorenz state diverged at Euler step " +
                                std::to_string(step),
                            step);
    }
    truth.states.push_back(StateVector{x[0], x[1], x[2]});
    if (step % cfg.obs_gap == 0) {
      std::array<double, 2> v{0.0, 0.0};
      if (observation_noise) v = {rng.normal(), rng.normal()};
      truth.observations.push_back(observe(theta_true, truth.states.back(), v, obs_std));
    }
  }
  return truth;
}

void write_truth_csv(const GroundTruth& truth, std::ostream& os) {
  CsvWriter csv(os, {"epoch", "t_continuous", "x1", "x2", "x3", "y1", "y3"});
  for (std::size_t n = 1; n <= truth.epochs(); ++n) {
    const auto& x = truth.state_at_epoch(n);
    const auto& y = truth.observations[n - 1];
    const double t = static_cast<double>(n * truth.obs_gap) * truth.T_e;
    csv.row(n, t, x[0], x[1], x[2], y[0], y[1]);
  }
}

LorenzModel::LorenzModel(LorenzConfig cfg)
    : cfg_(std::move(cfg)), box_(support_box()), obs_std_(0.0) {
  cfg_.validate();
  obs_std_ = std::sqrt(cfg_.obs_var);
}

StateVector LorenzModel::sample_state_prior(Rng& rng) const {
  const double v0 = std::sqrt(cfg_.v0_sq);
  StateVector x(kStateDim);
  for (std::size_t k = 0; k < kStateDim; ++k) x[k] = cfg_.x_star[k] + v0 * rng.normal();
  return x;
}

StateVector LorenzModel::sample_transition(const ParamVector& theta, const StateVector& prev,
                                           std::size_t, Rng& rng) const {
  State3 x{prev[0], prev[1], prev[2]};
  const double sqrt_T_e = std::sqrt(cfg_.T_e);
  for (std::size_t k = 0; k < cfg_.obs_gap; ++k) {
    const State3 n{rng.normal(), rng.normal(), rng.normal()};
    euler_inplace(theta[0], theta[1], theta[2], x, n, cfg_.T_e, sqrt_T_e);
    if (diverged(x)) return StateVector(kStateDim, INFINITY);
  }
  return StateVector{x[0], x[1], x[2]};
}

double LorenzModel::log_likelihood(const ParamVector& theta, const StateVector& x,
                                   const ObsVector& y, std::size_t) const {
  if (!x.all_finite()) return -INFINITY;
  const double k_o = theta[3];
  return log_normal_pdf(y[0], k_o * x[0], cfg_.obs_var) +
         log_normal_pdf(y[1], k_o * x[2], cfg_.obs_var);
}

ParamVector LorenzModel::sample_param_prior(Rng& rng) const {
  return sample_uniform(box_, rng);
}

ObsVector LorenzModel::sample_observation(const ParamVector& theta, const StateVector& x,
                                          std::size_t, Rng& rng) const {
  const double n1 = rng.normal();
  const double n2 = rng.normal();
  return observe(theta, x, {n1, n2}, obs_std_);
}

std::shared_ptr<const LorenzModel> build_lorenz_model(const LorenzConfig& cfg) {
  return std::make_shared<const LorenzModel>(cfg);
}

}  // namespace npf::lorenz63
