#include "npf/nested.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include "npf/csv.hpp"
#include "npf/parallel.hpp"
#include "npf/weights.hpp"

namespace npf {

std::vector<ParamVector> NestedSystem::thetas() const {
  std::vector<ParamVector> out;
  out.reserve(outer.size());
  for (const auto& e : outer) out.push_back(e.theta);
  return out;
}

NestedSystem initialize(const StateSpaceModel& model, std::size_t N, std::size_t M, Rng& rng) {
  if (N < 1 || M < 1) throw ContractViolation("initialize: N and M must be >= 1");
  NestedSystem sys;
  sys.outer.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    auto theta = model.sample_param_prior(rng);
    sys.outer.push_back({std::move(theta), sample_inner_prior(model, M, rng)});
  }
  sys.log_weights.assign(N, 0.0);
  return sys;
}

StepOutput step(NestedSystem& sys, const StateSpaceModel& model, const JitterKernel& kernel,
                const ObsVector& y, Rng& rng) {
  const std::size_t N = sys.N();
  if (N == 0) throw ContractViolation("step: empty system");
  if (y.size() != model.obs_dim() || !y.all_finite()) {
    throw ContractViolation("step: observation must be finite with the model's dimension");
  }
  const std::size_t t = sys.t + 1;

  // (a) independent per-particle work.
  const Rng streams(rng.next_u64());
  std::vector<ParamVector> jittered(N);
  std::vector<std::optional<InnerParticleSet>> filtered(N);
  std::vector<double> log_u(N);
  parallel_for(N, [&](std::size_t i) {
    Rng r = streams.child(i);
    const auto& entry = sys.outer[i];
    jittered[i] = sample_jitter(kernel, entry.theta, N, r);
    auto predicted = propagate(entry.inner, model, jittered[i], t, r);
    auto est = estimate_likelihood(predicted, model, jittered[i], y, t);
    log_u[i] = est.log_u;
    if (std::isfinite(est.log_u)) {
      filtered[i] = resample_multinomial(predicted, est.per_particle_log_g, r, t);
    } else {
      // Zero outer weight: this entry can never be selected below.
      filtered[i] = std::move(predicted);
    }
  });

  // (b) barrier: weights and statistics of the weighted system.
  StepOutput out;
  out.t = t;
  out.weights = normalize_log_weights(log_u, t);
  out.ness = compute_ness(jittered, log_u);
  out.max_log_u = *std::max_element(log_u.begin(), log_u.end());

  out.param_mean = ParamVector(model.param_dim());
  out.joint_state_mean = StateVector(model.state_dim());
  for (std::size_t i = 0; i < N; ++i) {
    const double w = out.weights[i];
    if (w == 0.0) continue;
    for (std::size_t k = 0; k < out.param_mean.size(); ++k) out.param_mean[k] += w * jittered[i][k];
    const auto m = filtered[i]->mean();
    for (std::size_t k = 0; k < out.joint_state_mean.size(); ++k) {
      out.joint_state_mean[k] += w * m[k];
    }
  }

  // (c) resample (theta_bar, inner set) pairs together.
  out.ancestors = multinomial_indices(log_u, N, rng, t);
  std::vector<NestedSystem::Entry> next;
  next.reserve(N);
  for (auto l : out.ancestors) next.push_back({jittered[l], *filtered[l]});

  sys.outer = std::move(next);
  sys.log_weights.assign(N, 0.0);
  sys.t = t;

  out.mu_hat = sys.thetas();
  out.jittered = std::move(jittered);
  out.per_theta_log_u = std::move(log_u);
  return out;
}

double estimate_param(const NestedSystem& sys,
                      const std::function<double(const ParamVector&)>& h) {
  double s = 0.0;
  for (const auto& e : sys.outer) s += h(e.theta);
  return s / static_cast<double>(sys.N());
}

double estimate_param(const StepOutput& out,
                      const std::function<double(const ParamVector&)>& h) {
  double s = 0.0;
  for (const auto& theta : out.mu_hat) s += h(theta);
  return s / static_cast<double>(out.mu_hat.size());
}

ParamVector param_estimate(const NestedSystem& sys) {
  ParamVector m(sys.outer.front().theta.size());
  for (const auto& e : sys.outer) {
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += e.theta[k];
  }
  for (auto& v : m) v /= static_cast<double>(sys.N());
  return m;
}

double estimate_joint(const NestedSystem& sys,
                      const std::function<double(const ParamVector&, const StateVector&)>& f) {
  double s = 0.0;
  for (const auto& e : sys.outer) {
    double inner = 0.0;
    for (const auto& x : e.inner.particles()) inner += f(e.theta, x);
    s += inner / static_cast<double>(e.inner.size());
  }
  return s / static_cast<double>(sys.N());
}

NestedSystem run_nested(const StateSpaceModel& model, const JitterKernel& kernel,
                        std::span<const ObsVector> observations, std::size_t N, std::size_t M,
                        Rng& rng, const StepObserver& observer) {
  auto sys = initialize(model, N, M, rng);
  for (const auto& y : observations) {
    auto out = step(sys, model, kernel, y, rng);
    if (observer) observer(sys, out);
  }
  return sys;
}

namespace {

std::vector<std::string> step_header(std::size_t param_dim, std::size_t state_dim) {
  std::vector<std::string> header{"t", "ness"};
  for (std::size_t k = 1; k <= param_dim; ++k) header.push_back("param_mean_" + std::to_string(k));
  for (std::size_t k = 1; k <= state_dim; ++k) header.push_back("state_mean_" + std::to_string(k));
  header.push_back("max_log_u");
  return header;
}

}  // namespace

StepCsvWriter::StepCsvWriter(std::ostream& os, std::size_t param_dim, std::size_t state_dim)
    : param_dim_(param_dim), state_dim_(state_dim), csv_(os, step_header(param_dim, state_dim)) {}

void StepCsvWriter::write(const StepOutput& out) {
  std::vector<double> cells;
  cells.reserve(param_dim_ + state_dim_ + 2);
  cells.push_back(out.ness.ness);
  cells.insert(cells.end(), out.param_mean.begin(), out.param_mean.end());
  cells.insert(cells.end(), out.joint_state_mean.begin(), out.joint_state_mean.end());
  cells.push_back(out.max_log_u);
  csv_.row_keyed(out.t, cells);
}

}  // namespace npf
