// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "spinkac/collision.hpp"
#include "spinkac/dynamics.hpp"
#include "spinkac/instances.hpp"

using namespace spinkac;

namespace {

struct Setup {
  CollisionContext ctx;
  ProbVec p;
};

Setup make_setup(int n) {
  Rng rng = make_rng(1, static_cast<std::uint64_t>(n));
  return {CollisionContext(random_symmetric_interaction(n, 0.5, rng), TransportKernel::mean_field(n)),
          random_positive_measure(n, 1.0, rng)};
}

void product(benchmark::State& state, ProductMode mode) {
  const auto s = make_setup(static_cast<int>(state.range(0)));
  std::vector<double> out(s.p.weights().size());
  for (auto _ : state) {
    collision_product_into(s.ctx, s.p.weights(), s.p.weights(), out, mode);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ProductReference(benchmark::State& state) { product(state, ProductMode::kReference); }
void BM_ProductOptimized(benchmark::State& state) { product(state, ProductMode::kOptimized); }

void BM_EvolveUnitTime(benchmark::State& state) {
  const auto s = make_setup(static_cast<int>(state.range(0)));
  EvolveOptions opts;
  opts.store_stride = 1 << 30;
  for (auto _ : state) benchmark::DoNotOptimize(evolve(s.ctx, s.p, 1.0, 0.01, opts));
}

}  // namespace

BENCHMARK(BM_ProductReference)->DenseRange(2, 8, 2);
BENCHMARK(BM_ProductOptimized)->DenseRange(2, 12, 2);
BENCHMARK(BM_EvolveUnitTime)->Arg(4)->Arg(8);
BENCHMARK_MAIN();
