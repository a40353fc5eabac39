// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "spinkac/instances.hpp"
#include "spinkac/kac.hpp"

using namespace spinkac;

namespace {

// Events per second of the particle simulation.
void BM_KacEvents(benchmark::State& state) {
  const int n = 4;
  const int np = static_cast<int>(state.range(0));
  Rng rng = make_rng(2, 0);
  CollisionContext ctx(random_symmetric_interaction(n, 0.5, rng), TransportKernel::mean_field(n));
  const DensityProfile rho(SitePartition::whole(n), np, {n * np / 2});
  const auto init = random_state(n, rho, rng);
  std::uint64_t events = 0;
  for (auto _ : state) {
    const auto run = simulate_particles(ctx, init, rho, 1.0, rng);
    events += run.total_events;
  }
  state.counters["events"] = benchmark::Counter(static_cast<double>(events),
                                                benchmark::Counter::kIsRate);
}

void BM_ParticleGenerator(benchmark::State& state) {
  const int n = 2;
  const int np = static_cast<int>(state.range(0));
  CollisionContext ctx(InteractionMatrix(n, {0.0, 0.2, 0.2, 0.0}), TransportKernel::mean_field(n));
  const CanonicalMeasure mu(ctx.interaction(), {}, DensityProfile(SitePartition::whole(n), np, {np}));
  for (auto _ : state) benchmark::DoNotOptimize(particle_generator(ctx, mu));
  state.counters["states"] = static_cast<double>(mu.size());
}

}  // namespace

BENCHMARK(BM_KacEvents)->Arg(100)->Arg(10000);
BENCHMARK(BM_ParticleGenerator)->Arg(4)->Arg(8);
