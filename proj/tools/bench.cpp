#include <benchmark/benchmark.h>

#include <cstdint>

#include "alp/kernel.hpp"
#include "alp/pyramid.hpp"
#include "alp/synthetic.hpp"

namespace {

using alp::Matrix;

Matrix bench_points(Eigen::Index n, Eigen::Index dim) {
  Matrix points(n, dim);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      points(i, j) = double(state >> 11) / double(1ull << 53);
    }
  }
  return points;
}

void bm_pairwise_sq_dists(benchmark::State& state) {
  const Matrix points = bench_points(state.range(0), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alp::pairwise_sq_dists(points, points));
  }
}

void bm_pairwise_sq_dists_serial(benchmark::State& state) {
  const Matrix points = bench_points(state.range(0), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alp::serial::pairwise_sq_dists(points, points));
  }
}

void bm_gaussian_kernel(benchmark::State& state) {
  const Matrix points = bench_points(state.range(0), 3);
  const Matrix sq = alp::pairwise_sq_dists(points, points);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alp::gaussian_kernel(sq, 0.5));
  }
}

void bm_gaussian_kernel_serial(benchmark::State& state) {
  const Matrix points = bench_points(state.range(0), 3);
  const Matrix sq = alp::pairwise_sq_dists(points, points);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alp::serial::gaussian_kernel(sq, 0.5));
  }
}

Matrix bench_operator(Eigen::Index n) {
  const Matrix points = bench_points(n, 3);
  const Matrix sq = alp::pairwise_sq_dists(points, points);
  return alp::smoothing_operator(alp::gaussian_kernel(sq, 0.5),
                                 alp::KernelMode::zero_diag_then_normalize, 0.5)
      .values;
}

void bm_apply_operator(benchmark::State& state) {
  const Matrix op = bench_operator(state.range(0));
  const Matrix values = bench_points(state.range(0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alp::apply_operator(op, values));
  }
}

void bm_apply_operator_serial(benchmark::State& state) {
  const Matrix op = bench_operator(state.range(0));
  const Matrix values = bench_points(state.range(0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alp::serial::apply_operator(op, values));
  }
}

void bm_alp_train(benchmark::State& state) {
  const alp::Dataset data = alp::composite_sine(state.range(0), 0.1, 7);
  alp::TrainOptions options;
  options.max_iter = 8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(alp::alp_train(data.points, data.targets, options));
  }
}

BENCHMARK(bm_pairwise_sq_dists)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_pairwise_sq_dists_serial)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gaussian_kernel)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gaussian_kernel_serial)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_apply_operator)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_apply_operator_serial)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_alp_train)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
