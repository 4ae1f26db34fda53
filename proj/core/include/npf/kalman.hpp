#pragma once

#include <span>
#include <vector>

#include "npf/linear_gaussian.hpp"

namespace npf {

/// Output of the exact scalar Kalman filter, one entry per observation.
struct KalmanResult {
  std::vector<double> filter_mean;
  std::vector<double> filter_var;
  /// log p(y_t | y_{1:t-1}) from the prediction-error decomposition.
  std::vector<double> step_log_likelihood;
  double log_marginal = 0.0;
};

/// Exact filter for x_t = a x_{t-1} + N(0,q), y_t = x_t + N(0,r),
/// x_0 ~ N(prior_mean, prior_var).
KalmanResult kalman_filter(double a, double q, double r, double prior_mean,
                           double prior_var, std::span<const double> observations);

KalmanResult kalman_filter(const LinearGaussianConfig& cfg, double a,
                           std::span<const double> observations);

}  // namespace npf
