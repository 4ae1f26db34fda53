#include "npf/jitter.hpp"

#include <cmath>
#include <sstream>

#include "npf/diagnostics.hpp"
#include "npf/model.hpp"
#include "npf/truncated_normal.hpp"

namespace npf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive_N(std::size_t N, const char* who) {
  if (N == 0) throw ContractViolation(std::string(who) + ": N must be >= 1");
}

}  // namespace

JitterKernel::JitterKernel(SupportBox box, MixtureDiracKernel params)
    : box_(std::move(box)), params_(std::move(params)) {
  const auto& m = std::get<MixtureDiracKernel>(params_);
  if (!(m.p > 0.0)) throw ContractViolation("mixture kernel: p must be positive");
  if (m.epsilon && !(*m.epsilon >= 0.0 && *m.epsilon <= 1.0)) {
    throw ContractViolation("mixture kernel: epsilon must lie in [0, 1]");
  }
  if (!m.base_spread.empty()) {
    if (m.base_spread.size() != box_.dim()) {
      throw ContractViolation("mixture kernel: base_spread dimension mismatch");
    }
    for (double s : m.base_spread) {
      if (!(s > 0.0)) throw ContractViolation("mixture kernel: base_spread must be positive");
    }
  }
}

JitterKernel::JitterKernel(SupportBox box, TruncatedGaussianKernel params)
    : box_(std::move(box)), params_(std::move(params)) {
  const auto& g = std::get<TruncatedGaussianKernel>(params_);
  if (!(g.p > 0.0)) throw ContractViolation("truncated Gaussian kernel: p must be positive");
  if (g.constants.size() != box_.dim()) {
    throw ContractViolation("truncated Gaussian kernel: one constant per parameter required");
  }
  for (double c : g.constants) {
    if (!(c > 0.0)) throw ContractViolation("truncated Gaussian kernel: constants must be positive");
  }
}

JitterKernel JitterKernel::none(SupportBox box) {
  return JitterKernel(std::move(box), MixtureDiracKernel{1.0, 0.0, {}});
}

JitterKernel JitterKernel::truncated_gaussian(SupportBox box, std::vector<double> constants,
                                              double p) {
  return JitterKernel(std::move(box), TruncatedGaussianKernel{p, std::move(constants)});
}

JitterKernel JitterKernel::mixture_dirac(SupportBox box, double p, std::optional<double> epsilon,
                                         std::vector<double> base_spread) {
  return JitterKernel(std::move(box), MixtureDiracKernel{p, epsilon, std::move(base_spread)});
}

JitterKernel::Kind JitterKernel::kind() const noexcept {
  return std::holds_alternative<MixtureDiracKernel>(params_) ? Kind::MixtureDirac
                                                             : Kind::TruncatedGaussian;
}

bool JitterKernel::is_identity() const noexcept {
  const auto* m = std::get_if<MixtureDiracKernel>(&params_);
  return m != nullptr && m->epsilon && *m->epsilon == 0.0;
}

std::string JitterKernel::describe() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const MixtureDiracKernel& m) {
                          if (is_identity()) {
                            os << "none";
                            return;
                          }
                          os << "mixture_dirac(p=" << m.p;
                          if (m.epsilon) os << ", epsilon=" << *m.epsilon;
                          os << (m.base_spread.empty() ? ", base=uniform)" : ", base=gaussian)");
                        },
                        [&](const TruncatedGaussianKernel& g) {
                          os << "truncated_gaussian(p=" << g.p << ", c=(";
                          for (std::size_t k = 0; k < g.constants.size(); ++k) {
                            os << (k ? "," : "") << g.constants[k];
                          }
                          os << "))";
                        }},
             params_);
  return os.str();
}

double JitterKernel::epsilon(std::size_t N) const {
  require_positive_N(N, "epsilon");
  if (const auto* m = std::get_if<MixtureDiracKernel>(&params_)) {
    if (m->epsilon) return *m->epsilon;
    return std::min(1.0, std::pow(static_cast<double>(N), -m->p / 2.0));
  }
  return 1.0;
}

std::vector<double> variance_schedule(const JitterKernel& kernel, std::size_t N) {
  require_positive_N(N, "variance_schedule");
  const auto* g = std::get_if<TruncatedGaussianKernel>(&kernel.params());
  if (g == nullptr) {
    throw ContractViolation("variance_schedule: only defined for the truncated Gaussian kernel");
  }
  const double scale = std::pow(static_cast<double>(N), -(g->p + 2.0) / 2.0);
  std::vector<double> var(g->constants.size());
  for (std::size_t k = 0; k < var.size(); ++k) var[k] = g->constants[k] * scale;
  return var;
}

ParamVector sample_jitter(const JitterKernel& kernel, const ParamVector& anchor, std::size_t N,
                          Rng& rng) {
  require_positive_N(N, "sample_jitter");
  const SupportBox& box = kernel.support();
  if (!contains(box, anchor)) throw ContractViolation("sample_jitter: anchor outside support");

  return std::visit(
      overloaded{[&](const MixtureDiracKernel& m) -> ParamVector {
                   const double eps = kernel.epsilon(N);
                   if (eps == 0.0 || rng.uniform() >= eps) return anchor;
                   if (m.base_spread.empty()) return sample_uniform(box, rng);
                   ParamVector out(anchor.size());
                   for (std::size_t k = 0; k < out.size(); ++k) {
                     out[k] = sample_truncated_normal(anchor[k], m.base_spread[k] * m.base_spread[k],
                                                      box.lower(k), box.upper(k), rng);
                   }
                   return out;
                 },
                 [&](const TruncatedGaussianKernel&) -> ParamVector {
                   const auto var = variance_schedule(kernel, N);
                   ParamVector out(anchor.size());
                   for (std::size_t k = 0; k < out.size(); ++k) {
                     out[k] = sample_truncated_normal(anchor[k], var[k], box.lower(k),
                                                      box.upper(k), rng);
                   }
                   return out;
                 }},
      kernel.params());
}

std::vector<ParamVector> anchor_grid(const SupportBox& box, std::size_t levels) {
  if (levels < 2) throw ContractViolation("anchor_grid: need at least 2 levels");
  const std::size_t d = box.dim();
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= levels;

  std::vector<ParamVector> grid;
  grid.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ParamVector a(d);
    std::size_t rest = idx;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t level = rest % levels;
      rest /= levels;
      if (level == 0) {
        a[k] = box.lower(k);
      } else if (level == levels - 1) {
        a[k] = box.upper(k);
      } else {
        a[k] = box.lower(k) + box.width(k) * static_cast<double>(level) /
                                  static_cast<double>(levels - 1);
      }
    }
    grid.push_back(std::move(a));
  }
  return grid;
}

MomentReport check_moment_bound(const JitterKernel& kernel,
                                const std::vector<std::size_t>& N_values, double p, Rng& rng,
                                const MomentCheckOptions& options) {
  if (options.trials < 1000) throw ContractViolation("check_moment_bound: trials must be >= 1000");
  if (N_values.empty()) throw ContractViolation("check_moment_bound: no N values");
  if (!(p > 0.0)) throw ContractViolation("check_moment_bound: p must be positive");

  const auto anchors =
      options.anchors.empty() ? anchor_grid(kernel.support(), 3) : options.anchors;

  MomentReport report;
  report.p = p;
  for (std::size_t N : N_values) {
    MomentAtN at;
    at.N = N;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      double acc = 0.0;
      for (std::size_t trial = 0; trial < options.trials; ++trial) {
        const auto theta = sample_jitter(kernel, anchors[a], N, rng);
        double sq = 0.0;
        for (std::size_t k = 0; k < theta.size(); ++k) {
          const double d = theta[k] - anchors[a][k];
          sq += d * d;
        }
        acc += std::pow(std::sqrt(sq), p);
      }
      const double moment = acc / static_cast<double>(options.trials);
      if (a == 0 || moment > at.sup_moment) {
        at.sup_moment = moment;
        at.worst_anchor = a;
      }
    }
    at.scaled = at.sup_moment * std::pow(static_cast<double>(N), p / 2.0);
    report.fitted_constant = std::max(report.fitted_constant, at.scaled);
    report.points.push_back(at);
  }
  report.fitted_constant = std::pow(report.fitted_constant, 1.0 / p);

  bool all_zero = true;
  bool any_zero = false;
  std::vector<double> ns;
  std::vector<double> ms;
  for (const auto& pt : report.points) {
    all_zero = all_zero && pt.sup_moment == 0.0;
    any_zero = any_zero || pt.sup_moment == 0.0;
    ns.push_back(static_cast<double>(pt.N));
    ms.push_back(pt.sup_moment);
  }
  if (any_zero || report.points.size() < 2) {
    report.loglog_slope = NAN;
    report.stable = all_zero;
  } else {
    report.loglog_slope = fit_loglog_slope(ns, ms);
    report.stable = report.loglog_slope <= -p / 2.0 + options.slope_tolerance;
  }
  return report;
}

}  // namespace npf
