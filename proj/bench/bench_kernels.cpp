// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP twins.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "apollo/apollo.hpp"
#include "apollo/kernels.hpp"
#include "apollo/tensor.hpp"

namespace k = apollo::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

template <bool Parallel>
void BM_Dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vec(n, 1), b = random_vec(n, 2);
  for (auto _ : state) {
    double r = Parallel ? k::dot(a, b) : k::reference::dot(a, b);
    benchmark::DoNotOptimize(r);
  }
  state.SetBytesProcessed(state.iterations() * 2 * n * sizeof(double));
}

template <bool Parallel>
void BM_SumPow4(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vec(n, 3);
  for (auto _ : state) {
    double r = Parallel ? k::sum_pow4(a) : k::reference::sum_pow4(a);
    benchmark::DoNotOptimize(r);
  }
  state.SetBytesProcessed(state.iterations() * n * sizeof(double));
}

template <bool Parallel>
void BM_Axpy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_vec(n, 4);
  auto y = random_vec(n, 5);
  for (auto _ : state) {
    if (Parallel)
      k::axpy(1e-9, x, y);
    else
      k::reference::axpy(1e-9, x, y);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * 3 * n * sizeof(double));
}

// Both fused passes of one Apollo update.
template <bool Parallel>
void BM_ApolloPasses(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto m = random_vec(n, 6), d = random_vec(n, 7), hess = random_vec(n, 8);
  auto theta = random_vec(n, 9);
  const auto g = random_vec(n, 10);
  const k::DirectionParams p{1e-6, 1.0, 1e-6, 0.0};
  for (auto _ : state) {
    k::MomentSums s = Parallel ? k::apollo_moment(m, g, theta, d, hess, 0.1, 0.0)
                               : k::reference::apollo_moment(m, g, theta, d, hess, 0.1, 0.0);
    benchmark::DoNotOptimize(s);
    if (Parallel)
      k::apollo_direction(hess, d, theta, m, p);
    else
      k::reference::apollo_direction(hess, d, theta, m, p);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n);
}

template <bool Parallel>
void BM_AffineForward(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t in = 256, out_dim = 256;
  const auto x = random_vec(rows * in, 11), w = random_vec(out_dim * in, 12);
  const auto bias = random_vec(out_dim, 13);
  std::vector<double> out(rows * out_dim);
  for (auto _ : state) {
    if (Parallel)
      k::affine_forward(x, w, bias, rows, in, out_dim, out);
    else
      k::reference::affine_forward(x, w, bias, rows, in, out_dim, out);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * rows * in * out_dim);
}

// Full library step (allocations and bookkeeping included).
void BM_ApolloStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  apollo::Tensor theta(apollo::Shape{n});
  apollo::Tensor grad(apollo::Shape{n});
  const auto g = random_vec(n, 14);
  for (std::size_t i = 0; i < n; ++i) grad[i] = g[i];
  apollo::ApolloState st(apollo::Shape{n});
  const apollo::ApolloConfig cfg{};
  for (auto _ : state) {
    apollo::apollo_step(theta, grad, st, cfg, 1e-6);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

#define APOLLO_PAIR(fn, lo, hi)                                             \
  BENCHMARK_TEMPLATE(fn, false)->Name(#fn "/reference")->RangeMultiplier(8)->Range(lo, hi); \
  BENCHMARK_TEMPLATE(fn, true)->Name(#fn "/openmp")->RangeMultiplier(8)->Range(lo, hi)

APOLLO_PAIR(BM_Dot, 1 << 12, 1 << 21);
APOLLO_PAIR(BM_SumPow4, 1 << 12, 1 << 21);
APOLLO_PAIR(BM_Axpy, 1 << 12, 1 << 21);
APOLLO_PAIR(BM_ApolloPasses, 1 << 12, 1 << 21);
APOLLO_PAIR(BM_AffineForward, 8, 512);
BENCHMARK(BM_ApolloStep)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);

BENCHMARK_MAIN();
