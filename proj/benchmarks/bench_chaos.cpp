// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "spinkac/chaos.hpp"
#include "spinkac/down_up.hpp"
#include "spinkac/instances.hpp"

using namespace spinkac;

namespace {

void BM_ChaosScan(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng = make_rng(3, 0);
  const auto nu = random_positive_measure(n, 1.0, rng);
  const auto a = SitePartition::whole(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chaos_scan(nu, a, 2, {8, 16, 32, 64, 128, 256}));
  }
}

void BM_DownUpGenerator(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  Rng rng = make_rng(4, 0);
  const auto lam = random_psd_interaction(l, 0.3, rng);
  const DuMeasure m(DuInstance::single_block(l, lam.entries(), std::vector<double>(l, 0.1), 0));
  for (auto _ : state) benchmark::DoNotOptimize(du_generator(m));
  state.counters["states"] = static_cast<double>(m.size());
}

}  // namespace

BENCHMARK(BM_ChaosScan)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DownUpGenerator)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);
