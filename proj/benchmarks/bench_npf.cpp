#include <benchmark/benchmark.h>

#include "npf/inner_filter.hpp"
#include "npf/jitter.hpp"
#include "npf/linear_gaussian.hpp"
#include "npf/lorenz63.hpp"
#include "npf/nested.hpp"
#include "npf/truncated_normal.hpp"

using namespace npf;

static void BM_EulerStep(benchmark::State& state) {
  const auto theta = lorenz63::reference_params();
  StateVector x = lorenz63::LorenzConfig{}.x_star;
  for (auto _ : state) {
    x = lorenz63::euler_step(theta, x, {0.01, -0.02, 0.005}, 1e-3);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_EulerStep);

static void BM_TruncatedNormal(benchmark::State& state) {
  // range(0): distance of the mean below the interval, in standard deviations.
  const double offset = static_cast<double>(state.range(0));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_truncated_normal(-offset, 1.0, 0.0, 1.0, rng));
}
BENCHMARK(BM_TruncatedNormal)->Arg(0)->Arg(3)->Arg(40);

static void BM_JitterLorenz(benchmark::State& state) {
  const auto kernel = JitterKernel::truncated_gaussian(lorenz63::support_box(), {60, 60, 10, 1});
  const auto anchor = lorenz63::reference_params();
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_jitter(kernel, anchor, 100, rng));
}
BENCHMARK(BM_JitterLorenz);

static void BM_PropagateLorenz(benchmark::State& state) {
  const auto model = lorenz63::build_lorenz_model({});
  Rng rng(3);
  const auto set = sample_inner_prior(*model, static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate(set, *model, lorenz63::reference_params(), 1, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PropagateLorenz)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_NestedStepLinearGaussian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = build_linear_gaussian_model(0.9, 1.0, 1.0);
  const auto kernel = JitterKernel::truncated_gaussian(model->support(), {1.0});
  Rng rng(4);
  auto sys = initialize(*model, n, n, rng);
  const ObsVector y{0.4};
  for (auto _ : state) benchmark::DoNotOptimize(step(sys, *model, kernel, y, rng));
}
BENCHMARK(BM_NestedStepLinearGaussian)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_NestedStepLorenz(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = lorenz63::build_lorenz_model({});
  const auto kernel = JitterKernel::truncated_gaussian(model->support(), {60, 60, 10, 1});
  Rng rng(5);
  Rng truth_rng(6);
  const auto truth = lorenz63::simulate_truth({}, lorenz63::reference_params(), 40, truth_rng);
  for (auto _ : state) {
    state.PauseTiming();
    auto sys = initialize(*model, n, n, rng);
    state.ResumeTiming();
    benchmark::DoNotOptimize(step(sys, *model, kernel, truth.observations[0], rng));
  }
}
BENCHMARK(BM_NestedStepLorenz)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
