#include "npf/kalman.hpp"

#include "npf/model.hpp"

namespace npf {

KalmanResult kalman_filter(double a, double q, double r, double prior_mean,
                           double prior_var, std::span<const double> observations) {
  KalmanResult out;
  out.filter_mean.reserve(observations.size());
  out.filter_var.reserve(observations.size());
  out.step_log_likelihood.reserve(observations.size());

  double m = prior_mean;
  double p = prior_var;
  for (double y : observations) {
    m = a * m;
    p = a * a * p + q;
    const double s = p + r;
    const double ll = log_normal_pdf(y, m, s);
    const double gain = p / s;
    m += gain * (y - m);
    p *= 1.0 - gain;
    out.filter_mean.push_back(m);
    out.filter_var.push_back(p);
    out.step_log_likelihood.push_back(ll);
    out.log_marginal += ll;
  }
  return out;
}

KalmanResult kalman_filter(const LinearGaussianConfig& cfg, double a,
                           std::span<const double> observations) {
  return kalman_filter(a, cfg.q, cfg.r, cfg.prior_mean, cfg.prior_var, observations);
}

}  // namespace npf
