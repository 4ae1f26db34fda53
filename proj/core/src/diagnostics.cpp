#include "npf/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>

#include "npf/csv.hpp"

namespace npf {

DistinctCount count_distinct(std::span<const ParamVector> thetas) {
  DistinctCount out;
  out.group_of.resize(thetas.size());
  std::map<std::vector<std::uint64_t>, std::size_t> groups;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    std::vector<std::uint64_t> key;
    key.reserve(thetas[i].size());
    for (double v : thetas[i]) key.push_back(std::bit_cast<std::uint64_t>(v));
    auto [it, inserted] = groups.try_emplace(std::move(key), out.counts.size());
    if (inserted) out.counts.push_back(0);
    ++out.counts[it->second];
    out.group_of[i] = it->second;
  }
  out.n_distinct = out.counts.size();
  return out;
}

NessRecord compute_ness(std::span<const ParamVector> thetas, std::span<const double> log_u) {
  if (thetas.size() != log_u.size() || thetas.empty()) {
    throw ContractViolation("compute_ness: need one log-likelihood per particle");
  }
  const double max_log = *std::max_element(log_u.begin(), log_u.end());
  if (!std::isfinite(max_log)) {
    throw DegenerateWeightsError("compute_ness: every likelihood is zero", 0);
  }

  const auto distinct = count_distinct(thetas);
  std::vector<double> group_sum(distinct.n_distinct, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double u = std::exp(log_u[i] - max_log);
    total += u;
    group_sum[distinct.group_of[i]] += u;
  }
  // n_i * mean(u over the replicas of i) is the group's summed likelihood.
  double sum_sq = 0.0;
  for (double s : group_sum) sum_sq += s * s;

  NessRecord rec;
  rec.n_total = thetas.size();
  rec.n_distinct = distinct.n_distinct;
  rec.max_replicas = *std::max_element(distinct.counts.begin(), distinct.counts.end());
  rec.ness = (total * total) / (static_cast<double>(thetas.size()) * sum_sq);
  return rec;
}

NessBoundReport check_ness_bound(std::span<const NessRecord> history, double g_bound) {
  if (!(g_bound >= 1.0)) throw ContractViolation("check_ness_bound: g_bound must be >= 1");
  NessBoundReport r;
  r.g_bound = g_bound;
  const double g4 = std::pow(g_bound, 4);
  r.bound_all_distinct = 1.0 / g4;
  r.bound_near_distinct = 1.0 / (2.0 * g4);
  constexpr double kSlack = 1.0 - 1e-12;
  for (const auto& rec : history) {
    r.min_ness = std::min(r.min_ness, rec.ness);
    const double N = static_cast<double>(rec.n_total);
    if (rec.n_distinct == rec.n_total) {
      ++r.steps_all_distinct;
      if (rec.ness < r.bound_all_distinct * kSlack) r.holds = false;
    } else if (static_cast<double>(rec.n_distinct) >= N - std::sqrt(N) + 1.0) {
      ++r.steps_near_distinct;
      if (rec.ness < r.bound_near_distinct * kSlack) r.holds = false;
    } else {
      ++r.steps_uncovered;
    }
  }
  return r;
}

double normalized_abs_error(double estimate, double truth) {
  if (truth == 0.0) throw ContractViolation("normalized_abs_error: truth must be nonzero");
  return std::abs(estimate - truth) / std::abs(truth);
}

RateFit fit_inverse_sqrt_rate(std::span<const std::pair<double, double>> points) {
  if (points.empty()) throw ContractViolation("fit_inverse_sqrt_rate: no points");
  double num = 0.0;
  double den = 0.0;
  for (auto [N, e] : points) {
    if (!(N >= 1.0)) throw ContractViolation("fit_inverse_sqrt_rate: N must be >= 1");
    if (!(e >= 0.0)) throw ContractViolation("fit_inverse_sqrt_rate: errors must be >= 0");
    num += e / std::sqrt(N);
    den += 1.0 / N;
  }
  RateFit fit;
  fit.c_hat = num / den;
  for (auto [N, e] : points) {
    const double r = e - fit.c_hat / std::sqrt(N);
    fit.residual += r * r;
  }
  return fit;
}

double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ContractViolation("fit_loglog_slope: need >= 2 paired points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!(xs[k] > 0.0) || !(ys[k] > 0.0)) {
      throw ContractViolation("fit_loglog_slope: values must be positive");
    }
    mx += std::log(xs[k]);
    my += std::log(ys[k]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = std::log(xs[k]) - mx;
    sxy += dx * (std::log(ys[k]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ContractViolation("fit_loglog_slope: x values are all equal");
  return sxy / sxx;
}

void write_ness_csv(std::span<const NessRecord> history, std::ostream& os) {
  CsvWriter csv(os, {"t", "ness", "n_distinct", "max_replicas"});
  for (std::size_t t = 0; t < history.size(); ++t) {
    csv.row(t + 1, history[t].ness, history[t].n_distinct, history[t].max_replicas);
  }
}

}  // namespace npf
