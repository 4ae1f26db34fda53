#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "npf/bounded_likelihood.hpp"
#include "npf/csv.hpp"
#include "npf/kalman.hpp"
#include "npf/linear_gaussian.hpp"
#include "npf/lorenz63.hpp"
#include "npf/rng.hpp"
#include "npf/weights.hpp"
#include "test_support.hpp"

using namespace npf;

TEST(SupportBox, BoundaryIsInside) {
  SupportBox box({0.0, 0.0}, {1.0, 1.0});
  EXPECT_TRUE(contains(box, ParamVector{0.0, 1.0}));
}

TEST(SupportBox, OutsideOneCoordinate) {
  SupportBox box({0.0, 0.0}, {1.0, 1.0});
  EXPECT_FALSE(contains(box, ParamVector{0.5, 1.5}));
}

TEST(SupportBox, LorenzReferenceInside) {
  EXPECT_TRUE(contains(lorenz63::support_box(), ParamVector{10.0, 28.0, 8.0 / 3.0, 0.8}));
}

TEST(SupportBox, DimensionMismatchThrows) {
  SupportBox box({0.0, 0.0}, {1.0, 1.0});
  EXPECT_THROW(contains(box, ParamVector{0.5}), ContractViolation);
}

TEST(SupportBox, RejectsEmptyOrInvertedBounds) {
  EXPECT_THROW(SupportBox({1.0}, {1.0}), ContractViolation);
  EXPECT_THROW(SupportBox({2.0}, {1.0}), ContractViolation);
  EXPECT_THROW(SupportBox({0.0, 0.0}, {1.0}), ContractViolation);
}

TEST(SupportBox, MidpointAndDiameter) {
  SupportBox box({0.0, -1.0}, {4.0, 2.0});
  EXPECT_EQ(box.midpoint(), (ParamVector{2.0, 0.5}));
  EXPECT_DOUBLE_EQ(box.diameter(), 5.0);
}

TEST(LinearGaussian, Dimensions) {
  auto m = build_linear_gaussian_model(0.9, 1.0, 1.0);
  EXPECT_EQ(m->param_dim(), 1u);
  EXPECT_EQ(m->state_dim(), 1u);
  EXPECT_EQ(m->obs_dim(), 1u);
}

TEST(LinearGaussian, LikelihoodAtMode) {
  const double r = 2.5;
  auto m = build_linear_gaussian_model(0.9, 1.0, r);
  EXPECT_NEAR(m->log_likelihood(ParamVector{0.9}, StateVector{1.3}, ObsVector{1.3}, 1),
              -0.5 * std::log(2.0 * std::numbers::pi * r), 1e-15);
}

TEST(LinearGaussian, NonpositiveVarianceThrows) {
  EXPECT_THROW(build_linear_gaussian_model(0.9, 0.0, 1.0), ContractViolation);
  EXPECT_THROW(build_linear_gaussian_model(0.9, 1.0, -1.0), ContractViolation);
}

TEST(LinearGaussian, DivergedStateHasZeroLikelihood) {
  auto m = build_linear_gaussian_model(0.9, 1.0, 1.0);
  const double ll = m->log_likelihood(ParamVector{0.9}, StateVector{INFINITY}, ObsVector{0.0}, 1);
  EXPECT_EQ(ll, -INFINITY);
}

TEST(ModelContract, ParamPriorStaysInSupport) {
  std::vector<ModelPtr> models{build_linear_gaussian_model(0.9, 1.0, 1.0),
                               lorenz63::build_lorenz_model({}),
                               std::make_shared<BoundedLikelihoodModel>(2.0, 0.3)};
  Rng rng(11);
  for (const auto& m : models) {
    for (int i = 0; i < 10000; ++i) {
      ASSERT_TRUE(contains(m->support(), m->sample_param_prior(rng))) << m->name();
    }
  }
}

TEST(ModelContract, LikelihoodIsDeterministicAndNeverNaN) {
  std::vector<ModelPtr> models{build_linear_gaussian_model(0.9, 1.0, 1.0),
                               lorenz63::build_lorenz_model({}),
                               std::make_shared<BoundedLikelihoodModel>(2.0, 0.3)};
  Rng rng(12);
  for (const auto& m : models) {
    for (int i = 0; i < 1000; ++i) {
      const auto theta = m->sample_param_prior(rng);
      auto x = m->sample_state_prior(rng);
      const auto y = m->sample_observation(theta, x, 1, rng);
      if (i % 7 == 0) x[0] = INFINITY;
      const double a = m->log_likelihood(theta, x, y, 1);
      const double b = m->log_likelihood(theta, x, y, 1);
      ASSERT_FALSE(std::isnan(a)) << m->name();
      ASSERT_EQ(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b));
      ASSERT_GE(std::exp(a), 0.0);
    }
  }
}

TEST(BoundedLikelihood, StaysWithinBounds) {
  BoundedLikelihoodModel m(2.0, 0.4);
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const ParamVector theta{rng.uniform()};
    const StateVector x{3.0 * rng.normal()};
    const ObsVector y{3.0 * rng.normal()};
    const double g = std::exp(m.log_likelihood(theta, x, y, 1));
    ASSERT_GE(g, 0.5 * (1 - 1e-12));
    ASSERT_LE(g, 2.0 * (1 + 1e-12));
  }
  EXPECT_NEAR(m.log_likelihood(ParamVector{0.4}, StateVector{1.0}, ObsVector{1.4}, 1),
              std::log(2.0), 1e-14);
}

TEST(BoundedLikelihood, UnitBoundIsConstant) {
  BoundedLikelihoodModel m(1.0, 0.4);
  EXPECT_EQ(m.log_likelihood(ParamVector{0.1}, StateVector{5.0}, ObsVector{-3.0}, 1), 0.0);
}

TEST(Simulate, DeterministicAndSized) {
  auto m = build_linear_gaussian_model(0.9, 1.0, 1.0);
  Rng a(5), b(5);
  const auto ta = simulate(*m, ParamVector{0.9}, 20, a);
  const auto tb = simulate(*m, ParamVector{0.9}, 20, b);
  ASSERT_EQ(ta.states.size(), 20u);
  ASSERT_EQ(ta.observations.size(), 20u);
  EXPECT_EQ(ta.states, tb.states);
  EXPECT_EQ(ta.observations, tb.observations);
}

namespace {

// Batch oracle: (x_T, y_1..T) is jointly Gaussian, so E[x_T | y] and
// log p(y) follow from one covariance matrix.
struct BatchOracle {
  double mean;
  double log_marginal;
};

BatchOracle batch_gaussian(double a, double q, double r, double p0, const std::vector<double>& y) {
  const int T = static_cast<int>(y.size());
  // Var(x_t) for t = 0..T and Cov(x_s, x_t) = a^{t-s} Var(x_s).
  std::vector<double> var(T + 1);
  var[0] = p0;
  for (int t = 1; t <= T; ++t) var[t] = a * a * var[t - 1] + q;
  auto cov = [&](int s, int t) {
    if (s > t) std::swap(s, t);
    return std::pow(a, t - s) * var[s];
  };
  Eigen::MatrixXd Sy(T, T);
  Eigen::VectorXd cxy(T), yv(T);
  for (int s = 1; s <= T; ++s) {
    yv(s - 1) = y[s - 1];
    cxy(s - 1) = cov(T, s);
    for (int t = 1; t <= T; ++t) Sy(s - 1, t - 1) = cov(s, t) + (s == t ? r : 0.0);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(Sy);
  const Eigen::VectorXd alpha = llt.solve(yv);
  const Eigen::MatrixXd L = llt.matrixL();
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  const double lm = -0.5 * (yv.dot(alpha) + logdet + T * std::log(2.0 * std::numbers::pi));
  return {cxy.dot(alpha), lm};
}

}  // namespace

TEST(Kalman, OneStepByHand) {
  const std::vector<double> y{0.7};
  const auto k = kalman_filter(0.9, 1.0, 1.0, 0.0, 1.0, y);
  const double pred_var = 0.81 + 1.0;
  EXPECT_NEAR(k.filter_mean[0], pred_var / (pred_var + 1.0) * 0.7, 1e-14);
  EXPECT_NEAR(k.filter_var[0], pred_var / (pred_var + 1.0), 1e-14);
  EXPECT_NEAR(k.step_log_likelihood[0], log_normal_pdf(0.7, 0.0, pred_var + 1.0), 1e-14);
}

TEST(Kalman, MatchesBatchGaussianOracle) {
  auto m = build_linear_gaussian_model(0.9, 1.0, 1.0);
  Rng rng(21);
  const auto traj = simulate(*m, ParamVector{0.9}, 50, rng);
  const auto ys = test::scalar_obs(traj.observations);
  const auto k = kalman_filter(0.9, 1.0, 1.0, 0.0, 1.0, ys);
  for (std::size_t T : {1u, 7u, 50u}) {
    std::vector<double> prefix(ys.begin(), ys.begin() + T);
    const auto o = batch_gaussian(0.9, 1.0, 1.0, 1.0, prefix);
    EXPECT_NEAR(k.filter_mean[T - 1], o.mean, 1e-9) << "T=" << T;
    double ll = 0.0;
    for (std::size_t t = 0; t < T; ++t) ll += k.step_log_likelihood[t];
    EXPECT_NEAR(ll, o.log_marginal, 1e-9) << "T=" << T;
  }
  EXPECT_NEAR(k.log_marginal, batch_gaussian(0.9, 1.0, 1.0, 1.0, ys).log_marginal, 1e-9);
}

TEST(Kalman, LargeObservationNoiseTracksPrior) {
  const std::vector<double> y(20, 3.0);
  const auto k = kalman_filter(0.9, 1.0, 1e12, 0.0, 1.0, y);
  for (double m : k.filter_mean) EXPECT_NEAR(m, 0.0, 1e-9);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, ChildIgnoresParentConsumption) {
  Rng a(99), b(99);
  for (int i = 0; i < 10; ++i) b.next_u64();
  EXPECT_EQ(a.child(3).next_u64(), b.child(3).next_u64());
  EXPECT_NE(a.child(3).next_u64(), a.child(4).next_u64());
  EXPECT_NE(a.child({1, 2}).next_u64(), a.child({2, 1}).next_u64());
}

TEST(Rng, UniformRanges) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    ASSERT_LT(rng.index(7), 7u);
  }
}

TEST(Weights, LogSumExpStable) {
  const std::vector<double> v{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(v), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> none{-INFINITY, -INFINITY};
  EXPECT_EQ(log_sum_exp(none), -INFINITY);
}

TEST(Weights, NormaliseSumsToOne) {
  const std::vector<double> lw{-800.0, -801.0, -INFINITY, -799.5};
  const auto w = normalize_log_weights(lw);
  double s = 0.0;
  for (double x : w) s += x;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_EQ(w[2], 0.0);
}

TEST(Weights, DegenerateThrowsWithStep) {
  const std::vector<double> lw{-INFINITY, -INFINITY};
  Rng rng(1);
  try {
    multinomial_indices(lw, 3, rng, 17);
    FAIL();
  } catch (const DegenerateWeightsError& e) {
    EXPECT_EQ(e.step(), 17u);
  }
  EXPECT_THROW(normalize_log_weights(lw), DegenerateWeightsError);
}

TEST(Weights, NeverPicksZeroWeight) {
  const std::vector<double> lw{-INFINITY, 0.0, -INFINITY, 0.0, -INFINITY};
  Rng rng(2);
  for (auto i : multinomial_indices(lw, 10000, rng)) ASSERT_TRUE(i == 1 || i == 3);
}

TEST(Csv, RealsRoundTrip) {
  Rng rng(4);
  std::stringstream ss;
  CsvWriter w(ss, {"k", "v"});
  std::vector<double> values;
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.index(200)) - 100);
    values.push_back(v);
    w.row(i, v);
  }
  const auto table = read_csv(ss);
  ASSERT_EQ(table.rows.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ASSERT_EQ(table.rows[i][table.column("v")], values[i]);
  }
}

TEST(Csv, ColumnCountEnforced) {
  std::stringstream ss;
  CsvWriter w(ss, {"a", "b"});
  EXPECT_THROW(w.row(1.0), std::exception);
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
}

TEST(Csv, MalformedCellReportsLine) {
  std::stringstream ss("a,b\n1,2\n3,x\n");
  try {
    read_csv(ss);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos);
  }
}
