// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "oracles/brute.hpp"
#include "spinkac/dynamics.hpp"
#include "spinkac/error.hpp"
#include "spinkac/instances.hpp"

using namespace spinkac;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

}  // namespace

TEST_CASE("alpha bound closed form") {
  auto b1 = alpha_bound(InteractionMatrix(1));
  CHECK(b1.applicable);
  CHECK(b1.value == 0.25);
  CHECK(alpha_bound(InteractionMatrix(4)).value == 0.0625);
  auto b = alpha_bound(InteractionMatrix(2, {0.125, 0.125, 0.125, 0.125}));
  CHECK(b.applicable);
  CHECK(std::abs(b.value - 0.0005723637152729431) < 1e-17);
  auto neg = alpha_bound(InteractionMatrix(2, {0, 0.2, 0.2, 0}));
  CHECK_FALSE(neg.applicable);
  CHECK(neg.reason.find("nonnegative definite") != std::string::npos);
  auto hot = alpha_bound(InteractionMatrix(2, {0.3, 0.3, 0.3, 0.3}));
  CHECK_FALSE(hot.applicable);
}

TEST_CASE("dissipation matches the quadruple sum") {
  Rng rng = make_rng(31, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 1 + trial % 3;
    auto j = random_symmetric_interaction(n, 0.6, rng);
    auto a = random_partition(n, 2, rng);
    auto k = random_kernel_with_components(a, rng);
    CollisionContext ctx(j, k);
    auto mu = gibbs_measure(j, random_block_field(ctx.partition(), 1.0, rng));
    auto p = random_positive_measure(n, 1.0, rng);
    auto f = density(p, mu);
    const double d = dissipation(ctx, f, mu).value();
    const double oracle = brute::dissipation(j.entries(), k.entries(), n, f, mu.weights());
    CHECK(std::abs(d - oracle) <= 1e-14 + 1e-12 * oracle);
    CHECK(d >= 0.0);
  }
}

TEST_CASE("dissipation vanishes on stationary densities") {
  Rng rng = make_rng(32, 0);
  const int n = 3;
  auto j = random_symmetric_interaction(n, 0.5, rng);
  SitePartition a(n, {{0, 1}, {2}});
  CollisionContext ctx(j, TransportKernel::blocks(a));
  auto mu = gibbs_measure(j, random_block_field(a, 1.0, rng));
  CHECK(dissipation(ctx, std::vector<double>(8, 1.0), mu).value() == 0.0);
  auto other = gibbs_measure(j, random_block_field(a, 1.0, rng));
  CHECK(dissipation(ctx, density(other, mu), mu).value() < 1e-15);
  CHECK(stationarity_residual(ctx, other) <= 1e-12);
}

TEST_CASE("dissipation is infinite when a move reaches a zero of f") {
  CollisionContext ctx(InteractionMatrix(2), TransportKernel::mean_field(2));
  auto mu = ProbVec::uniform(2);
  CHECK_FALSE(dissipation(ctx, {2.0, 2.0, 0.0, 0.0}, mu).is_finite());
}

TEST_CASE("stationarity residual") {
  Rng rng = make_rng(33, 0);
  const int n = 3;
  auto j = random_symmetric_interaction(n, 0.7, rng);
  CollisionContext ctx(j, TransportKernel::mean_field(n));
  auto mu = gibbs_measure(j, FieldVector(std::vector<double>(n, 0.4)));
  CHECK(stationarity_residual(ctx, mu) <= 1e-12);
  auto w = mu.weights();
  w[0] *= 1.1;
  CHECK(stationarity_residual(ctx, ProbVec::normalized(n, w)) > 1e-6);

  SitePartition a(4, {{0, 3}, {1, 2}});
  CollisionContext free(InteractionMatrix(4), TransportKernel::blocks(a));
  CHECK(stationarity_residual(free, product_bernoulli({0.2, 0.7, 0.7, 0.2})) <= 1e-12);
  CHECK(stationarity_residual(free, product_bernoulli({0.2, 0.7, 0.6, 0.2})) > 1e-6);
}

TEST_CASE("evolve from equilibrium stays put") {
  Rng rng = make_rng(34, 0);
  const int n = 3;
  auto j = random_symmetric_interaction(n, 0.8, rng);
  auto a = SitePartition(n, {{0}, {1, 2}});
  CollisionContext ctx(j, TransportKernel::blocks(a));
  auto mu = gibbs_measure(j, random_block_field(a, 1.0, rng));
  auto traj = evolve(ctx, mu, 5.0, 0.05);
  for (const auto& p : traj.states) CHECK(max_diff(p.weights(), mu.weights()) < 1e-10);
  CHECK(max_diff(traj.equilibrium.weights(), mu.weights()) < 1e-10);
}

TEST_CASE("free single-site dynamics keeps site marginals") {
  const int n = 3;
  CollisionContext ctx(InteractionMatrix(n), TransportKernel::single_site(n));
  auto p0 = product_bernoulli({0.3, 0.6, 0.8});
  auto traj = evolve(ctx, p0, 3.0, 0.05, {.store_stride = 10});
  auto m0 = site_magnetizations(n, p0.weights());
  for (const auto& p : traj.states) CHECK(max_diff(site_magnetizations(n, p.weights()), m0) < 1e-12);
}

TEST_CASE("evolve conserves mass and profile and decreases entropy") {
  Rng rng = make_rng(35, 0);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 2 + trial % 3;
    auto j = random_symmetric_interaction(n, 0.8, rng);
    auto a = random_partition(n, 2, rng);
    CollisionContext ctx(j, random_kernel_with_components(a, rng));
    auto p0 = random_positive_measure(n, 1.5, rng);
    auto traj = evolve(ctx, p0, 4.0, 0.02);
    CHECK(traj.max_mass_error <= 1e-10);
    CHECK(traj.max_profile_drift <= 1e-10);
    double prev = relative_entropy(traj.states[0], traj.equilibrium).value();
    for (const auto& p : traj.states) {
      const double h = relative_entropy(p, traj.equilibrium).value();
      CHECK(h <= prev + 1e-12);
      prev = h;
    }
  }
}

TEST_CASE("entropy derivative equals minus the dissipation") {
  Rng rng = make_rng(36, 0);
  const int n = 3;
  auto j = random_symmetric_interaction(n, 0.5, rng);
  CollisionContext ctx(j, TransportKernel::mean_field(n));
  auto traj = evolve(ctx, random_positive_measure(n, 1.0, rng), 0.5, 1e-3);
  const auto& mu = traj.equilibrium;
  for (std::size_t i = 1; i + 1 < traj.states.size(); i += 50) {
    const double hp = relative_entropy(traj.states[i + 1], mu).value();
    const double hm = relative_entropy(traj.states[i - 1], mu).value();
    const double slope = (hp - hm) / (traj.times[i + 1] - traj.times[i - 1]);
    const double d = dissipation(ctx, density(traj.states[i], mu), mu).value();
    CHECK(std::abs(slope + d) < 1e-6);
  }
}

TEST_CASE("RK4 converges at fourth order") {
  Rng rng = make_rng(37, 0);
  const int n = 2;
  CollisionContext ctx(random_symmetric_interaction(n, 0.9, rng), TransportKernel::mean_field(n));
  auto p0 = random_positive_measure(n, 2.0, rng);
  const double t = 2.0, dt = 0.1;
  auto end = [&](double h) { return evolve(ctx, p0, t, h, {.store_stride = 1000000}).states.back().weights(); };
  auto ref = end(dt / 8);
  const double e1 = max_diff(end(dt), ref), e2 = max_diff(end(dt / 2), ref);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("degenerate and invalid initial data") {
  CollisionContext ctx(InteractionMatrix(3), TransportKernel::blocks(SitePartition(3, {{0, 1}, {2}})));
  try {
    evolve(ctx, ProbVec::point_mass(3, 0b100), 1.0, 0.1);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("block 1 {1,2}") != std::string::npos);
  }
  CHECK_THROWS_AS(evolve(ctx, ProbVec::uniform(3), 1.0, 0.2), PreconditionError);
}

TEST_CASE("decay report") {
  const int n = 2;
  CollisionContext ctx(InteractionMatrix(n), TransportKernel::mean_field(n));
  auto stat = decay_report(ctx, evolve(ctx, ProbVec::uniform(n), 1.0, 0.1));
  CHECK(stat.entropy_vanishes);
  CHECK_THROWS_AS(decay_report(ctx, evolve(ctx, product_bernoulli({0.1, 0.7}), 0.2, 0.1)), FitError);

  Rng rng = make_rng(38, 0);
  for (int trial = 0; trial < 3; ++trial) {
    const int m = 2 + trial;
    auto j = random_psd_interaction(m, 0.2, rng);
    CollisionContext c(j, TransportKernel::mean_field(m));
    auto traj = evolve(c, random_positive_measure(m, 1.0, rng), 40.0, 0.1, {.store_stride = 5});
    auto rep = decay_report(c, traj);
    REQUIRE(rep.bound.applicable);
    CHECK(rep.alpha_fit >= rep.bound.value);
    for (std::size_t i = 0; i < rep.entropy.size(); ++i) {
      CHECK(rep.tv[i] <= rep.pinsker[i] + 1e-15);
      CHECK(rep.tv[i] <= rep.tv_bound[i]);
      CHECK(rep.dissipation[i] >= 0.0);
    }
  }
}

TEST_CASE("nonlinear MLSI scan") {
  Rng rng = make_rng(39, 0);
  const int n = 3;
  auto j = random_psd_interaction(n, 0.2, rng);
  SitePartition a(n, {{0, 2}, {1}});
  CollisionContext ctx(j, TransportKernel::blocks(a));
  auto h = random_block_field(a, 0.5, rng);
  auto res = nonlinear_mlsi_scan(ctx, h, 140, 7);
  CHECK(res.accepted > 100);
  CHECK(res.min_ratio >= alpha_bound(j).value);
  auto again = nonlinear_mlsi_scan(ctx, h, 140, 7);
  CHECK(again.ratios == res.ratios);

  // On one site the constraint pins f to 1, so every sample is degenerate.
  CollisionContext one(InteractionMatrix(1), TransportKernel::single_site(1));
  auto trivial = nonlinear_mlsi_scan(one, FieldVector(1), 20, 1);
  CHECK(trivial.accepted == 0);
  CHECK(trivial.discarded == 20);
  CHECK_THROWS_AS(nonlinear_mlsi_scan(ctx, FieldVector({0.1, 0.2, 0.3}), 5, 1), PreconditionError);
}
