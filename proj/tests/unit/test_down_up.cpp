// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles/brute.hpp"
#include "spinkac/down_up.hpp"
#include "spinkac/error.hpp"
#include "spinkac/instances.hpp"

using namespace spinkac;

namespace {

DuInstance random_instance(int l, double lambda, const SitePartition& blocks,
                           const std::vector<int>& mag, Rng& rng) {
  auto j = random_psd_interaction(l, lambda, rng);
  std::vector<double> w(l);
  for (double& x : w) x = 0.5 * standard_normal(rng);
  return DuInstance(l, j.entries(), w, blocks, mag);
}

}  // namespace

TEST_CASE("combinadic enumeration") {
  const SitePartition blocks(7, {{0, 2, 5}, {1, 3, 4, 6}});
  DuInstance inst(7, std::vector<double>(49, 0.0), std::vector<double>(7, 0.0), blocks, {1, 0});
  DuSpace space(inst);
  // C(3, 2) * C(4, 2)
  REQUIRE(space.size() == 18);
  std::set<Mask> seen;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const Mask eta = space.state(x);
    CHECK(space.contains(eta));
    CHECK(space.rank(eta) == x);
    seen.insert(eta);
  }
  CHECK(seen.size() == 18);
  CHECK_FALSE(space.contains(0u));
  CHECK_THROWS_AS(space.rank(0u), DomainError);
  CHECK_THROWS_AS(space.state(18), DomainError);
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(DuInstance::single_block(3, std::vector<double>(9, 0.0),
                                           std::vector<double>(3, 0.0), 0),
                  DomainError);
  std::vector<double> asym(4, 0.0);
  asym[1] = 0.1;
  CHECK_THROWS_AS(DuInstance::single_block(2, asym, {0.0, 0.0}, 0), DomainError);
}

TEST_CASE("measure matches Boltzmann weights") {
  Rng rng = make_rng(91, 0);
  auto inst = random_instance(5, 0.3, SitePartition::whole(5), {1}, rng);
  DuMeasure m(inst);
  CHECK(m.size() == 10);
  double z = 0.0;
  std::vector<double> w;
  for (Mask eta : m.states()) {
    w.push_back(std::exp(brute::energy(inst.lambda(), inst.field(), 5, eta)));
    z += w.back();
  }
  for (std::size_t x = 0; x < m.size(); ++x) CHECK(std::abs(m.prob(x) - w[x] / z) < 1e-15);
}

TEST_CASE("rates for two sites") {
  // One ball on two sites with Lambda_{12} = 0.3 and w = (0.2, -0.1).
  std::vector<double> lambda = {0.0, 0.3, 0.3, 0.0};
  auto inst = DuInstance::single_block(2, lambda, {0.2, -0.1}, 0);
  // eta = (+, -) and (-, +) have equal quadratic terms; linear 0.3 and -0.3.
  const double a = std::exp(0.3), b = std::exp(-0.3);
  CHECK(std::abs(du_rates(inst, 0b01u, 0, 1) - b / (a + b)) < 1e-15);
  CHECK(std::abs(du_rates(inst, 0b01u, 0, 0) - a / (a + b)) < 1e-15);
  CHECK(std::abs(du_rates(inst, 0b10u, 1, 0) - a / (a + b)) < 1e-15);
  CHECK(du_rates(inst, 0b01u, 1, 0) == 0.0);

  DuMeasure m(inst);
  const auto q = du_generator(m);
  CHECK(q.rate.size() == 2);
  const auto c = m.covariance();
  CHECK(std::abs(c[1] + 1.0 + (c[0] - 1.0)) < 1e-15);
}

TEST_CASE("rates without interaction are uniform") {
  auto inst = DuInstance::single_block(5, std::vector<double>(25, 0.0),
                                       std::vector<double>(5, 0.0), -1);
  const Mask eta = 0b00101u;
  for (int j : {1, 3, 4, 0}) CHECK(std::abs(du_rates(inst, eta, 0, j) - 0.25) < 1e-15);
  CHECK(du_rates(inst, eta, 0, 2) == 0.0);
}

TEST_CASE("rates for three sites by hand") {
  // One ball, w = (0, log 2, log 3): the ball sits at k with weight e^{2 w_k}.
  auto inst = DuInstance::single_block(3, std::vector<double>(9, 0.0),
                                       {0.0, std::log(2.0), std::log(3.0)}, -1);
  CHECK(std::abs(du_rates(inst, 0b001u, 0, 1) - 4.0 / 14.0) < 1e-15);
  CHECK(std::abs(du_rates(inst, 0b001u, 0, 2) - 9.0 / 14.0) < 1e-15);
  CHECK(std::abs(du_rates(inst, 0b001u, 0, 0) - 1.0 / 14.0) < 1e-15);
}

TEST_CASE("generator agrees with the ball rates") {
  Rng rng = make_rng(92, 0);
  const SitePartition blocks(6, {{0, 1, 4}, {2, 3, 5}});
  auto inst = random_instance(6, 0.4, blocks, {1, -1}, rng);
  DuMeasure m(inst);
  const auto q = du_generator(m);
  CHECK(detailed_balance_residual(q, m.probs()) < 1e-15);
  CHECK(is_irreducible(q));
  std::size_t moves = 0;
  for (std::size_t x = 0; x < m.size(); ++x) {
    const Mask eta = m.state(x);
    for (std::size_t e = q.row_start[x]; e < q.row_start[x + 1]; ++e) {
      const Mask to = m.state(q.column[e]);
      const Mask diff = eta ^ to;
      REQUIRE(std::popcount(diff) == 2);
      const int i = std::countr_zero(diff & eta);
      const int j = std::countr_zero(diff & to);
      CHECK(std::abs(q.rate[e] - du_rates(inst, eta, i, j)) < 1e-15);
      ++moves;
    }
  }
  // Every state has 2 * 1 + 1 * 2 moves.
  CHECK(moves == 4 * m.size());

  std::vector<double> f(m.size()), g(m.size());
  for (std::size_t x = 0; x < m.size(); ++x) {
    f[x] = std::exp(standard_normal(rng));
    g[x] = standard_normal(rng);
  }
  CHECK(std::abs(du_dirichlet_form(m, ball_groups(m), f, g) -
                 dirichlet_form(q, m.probs(), f, g)) < 1e-14);
}

TEST_CASE("tilts") {
  Rng rng = make_rng(93, 0);
  auto inst = random_instance(4, 0.3, SitePartition::whole(4), {0}, rng);
  DuMeasure m(inst);
  const auto same = m.tilt(std::vector<double>(4, 0.0));
  for (std::size_t x = 0; x < m.size(); ++x) CHECK(std::abs(same.prob(x) - m.prob(x)) < 1e-15);
  std::vector<double> v = {0.7, -0.2, 0.0, 1.1};
  const auto t = m.tilt(v);
  double z = 0.0;
  std::vector<double> w(m.size());
  for (std::size_t x = 0; x < m.size(); ++x) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += v[i] * brute::spin(m.state(x), i);
    z += w[x] = m.prob(x) * std::exp(s);
  }
  for (std::size_t x = 0; x < m.size(); ++x) CHECK(std::abs(t.prob(x) - w[x] / z) < 1e-15);
  // A huge tilt freezes site 0 at +1 and site 1 at -1.
  const auto frozen = m.tilt({200.0, -200.0, 0.0, 0.0});
  const auto c = frozen.covariance();
  CHECK(std::abs(c[0]) < 1e-15);
  CHECK(std::abs(c[5]) < 1e-15);
}

TEST_CASE("negative correlation without interaction") {
  auto two = DuMeasure(DuInstance::single_block(2, std::vector<double>(4, 0.0), {0.0, 0.0}, 0));
  CHECK(two.covariance()[1] == -1.0);
  CHECK(strong_rayleigh_negcorr_check(two) == -1.0);
  Rng rng = make_rng(94, 0);
  std::vector<double> w(7);
  for (double& x : w) x = standard_normal(rng);
  DuMeasure m(DuInstance::single_block(7, std::vector<double>(49, 0.0), w, 1));
  CHECK(strong_rayleigh_negcorr_check(m) <= 1e-15);
  auto inter = random_instance(4, 0.2, SitePartition::whole(4), {0}, rng);
  CHECK_THROWS_AS(strong_rayleigh_negcorr_check(DuMeasure(inter)), PreconditionError);
}

TEST_CASE("entropy factorization") {
  Rng rng = make_rng(95, 0);
  auto single = random_instance(6, 0.3, SitePartition::whole(6), {0}, rng);
  const auto r1 = factorization_check(DuMeasure(single), 40, 1);
  CHECK(r1.accepted > 0);
  CHECK(std::abs(r1.block_min_ratio - 1.0) < 1e-12);
  CHECK(r1.jensen_max_excess <= 1e-15);

  const SitePartition blocks(6, {{0, 1, 2}, {3, 4, 5}});
  auto multi = random_instance(6, 0.25, blocks, {1, -1}, rng);
  const auto r2 = factorization_check(DuMeasure(multi), 40, 2);
  CHECK(r2.block_min_ratio >= r2.constant);
  CHECK(r2.jensen_max_excess <= 1e-15);

  DuMeasure free(DuInstance::single_block(6, std::vector<double>(36, 0.0),
                                          std::vector<double>(6, 0.0), 0));
  CHECK(factorization_check(free, 40, 3).ball_min_ratio >= 1.0 - 1e-12);
}

TEST_CASE("MLSI scan and spectral gap") {
  Rng rng = make_rng(96, 0);
  auto inst = random_instance(6, 0.3, SitePartition::whole(6), {0}, rng);
  DuMeasure m(inst);
  const auto r = du_mlsi_scan(m, 70, 4);
  CHECK(r.scan.accepted > 60);
  CHECK(std::abs(r.constant - (1.0 - 2.0 * inst.largest_eigenvalue())) < 1e-12);
  CHECK(r.scan.min_ratio >= r.constant);
  CHECK(std::abs(r.linearized_ratio - 2.0 * r.gap) <= 1e-3 * 2.0 * r.gap);
  CHECK(r.scan.min_ratio <= 2.0 * r.gap * (1.0 + 1e-3));

  const SitePartition blocks(6, {{0, 1, 2}, {3, 4, 5}});
  DuInstance multi(6, inst.lambda(), inst.field(), blocks, {1, -1});
  CHECK(std::abs(du_mlsi_constant(multi) - r.constant * r.constant) < 1e-12);
}

TEST_CASE("covariance bound") {
  Rng rng = make_rng(97, 0);
  auto inst = random_instance(5, 0.35, SitePartition::whole(5), {1}, rng);
  const auto r = cov_bound_check(inst, 40, 6);
  CHECK_FALSE(r.regularized);
  CHECK(r.max_eigenvalue <= r.bound);
  CHECK(std::abs(r.bound - 2.0 / (1.0 - 2.0 * r.lambda)) < 1e-15);

  auto zero = DuInstance::single_block(3, std::vector<double>(9, 0.0), {0.0, 0.0, 0.0}, 1);
  const auto z = cov_bound_check(zero, 10, 7);
  CHECK(z.regularized);
  CHECK(std::abs(z.lambda - 1e-9) < 1e-15);

  std::vector<double> indefinite = {0.0, 0.3, 0.3, 0.0};
  CHECK_THROWS_AS(cov_bound_check(DuInstance::single_block(2, indefinite, {0.0, 0.0}, 0), 4, 1),
                  PreconditionError);
}

TEST_CASE("relaxed eigenvalue condition") {
  const int l = 4;
  std::vector<double> lambda(l * l, 0.6 / l);
  auto inst = DuInstance::single_block(l, lambda, std::vector<double>(l, 0.0), 0);
  const auto rc = relaxed_condition(inst);
  CHECK(rc.constant_top);
  CHECK(std::abs(rc.largest - 0.6) < 1e-12);
  CHECK(std::abs(rc.second) < 1e-12);
  CHECK(rc.differs);
  CHECK_THROWS_AS(cov_bound_check(inst, 4, 1), PreconditionError);
}

TEST_CASE("bridge between the particle and Down-Up walks") {
  Rng rng = make_rng(98, 0);
  const int n = 2, np = 3;
  auto j = random_psd_interaction(n, 0.2, rng);
  std::vector<FieldVector> fields;
  for (int i = 0; i < np; ++i) {
    fields.emplace_back(std::vector<double>{0.3 * standard_normal(rng), 0.3 * standard_normal(rng)});
  }
  for (int x : {2, 3, 4}) {
    const auto r = bridge_check(j, fields, x, 40, 8);
    CHECK(r.hole_walk == (2 * x > n * np));
    CHECK(r.accepted > 30);
    CHECK(r.min_ratio >= r.constant);
  }
}
