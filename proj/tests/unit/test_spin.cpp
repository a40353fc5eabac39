// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <unordered_set>

#include "doctest.h"
#include "oracles/brute.hpp"
#include "spinkac/error.hpp"
#include "spinkac/gibbs.hpp"
#include "spinkac/instances.hpp"
#include "spinkac/linalg.hpp"
#include "spinkac/rng.hpp"
#include "spinkac/spin.hpp"

using namespace spinkac;

TEST_CASE("spin config encoding") {
  SpinConfig s(0b101, 3);
  CHECK(s.spin(0) == 1);
  CHECK(s.spin(1) == -1);
  CHECK(s.to_string() == "+-+");
  CHECK(s.flipped(1).bits() == 0b111u);
  CHECK(s.with_spin(0, -1).bits() == 0b100u);
  CHECK_THROWS_AS(SpinConfig(8, 3), DomainError);
  CHECK_THROWS_AS(check_sites(25), CapacityError);
  CHECK_THROWS_AS(check_sites(0), DomainError);
}

TEST_CASE("partition validation and canonical order") {
  SitePartition a(4, {{3, 1}, {0}, {2}});
  CHECK(a.block(0) == std::vector<int>{0});
  CHECK(a.block(1) == std::vector<int>{1, 3});
  CHECK(a.block_of(3) == 1);
  CHECK(a.mask(1) == 0b1010u);
  CHECK_THROWS_AS(SitePartition(3, {{0, 1}}), DomainError);
  CHECK_THROWS_AS(SitePartition(3, {{0, 1}, {1, 2}}), DomainError);
  CHECK_THROWS_AS(SitePartition(3, {{0, 1, 2}, {}}), DomainError);
}

TEST_CASE("asymmetric interaction is rejected with the offending pair") {
  try {
    InteractionMatrix j(3, {0, 1, 0, 1, 0, 2, 0, 2.5, 0});
    FAIL("expected an exception");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("J(2,3)") != std::string::npos);
  }
}

TEST_CASE("gibbs measure small cases") {
  auto p = gibbs_measure(InteractionMatrix(1), FieldVector(1));
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));

  InteractionMatrix j(2, {0, 0.3, 0.3, 0});
  auto q = gibbs_measure(j, FieldVector(2));
  CHECK(std::abs(q[3] - 0.32282815311289775) < 1e-15);
  CHECK(std::abs(q[0] - 0.32282815311289775) < 1e-15);
}

TEST_CASE("gibbs measure matches direct energy enumeration") {
  Rng rng = make_rng(11, 0);
  for (int n = 1; n <= 6; ++n) {
    auto j = random_symmetric_interaction(n, 0.7, rng);
    std::vector<double> je = j.entries();
    for (int a = 0; a < n; ++a) je[a * n + a] = 0.3 * a;
    InteractionMatrix jd(n, je);
    std::vector<double> h(n);
    for (double& x : h) x = standard_normal(rng);
    auto p = gibbs_measure(jd, FieldVector(h));
    auto b = brute::gibbs(je, h, n);
    double sum = 0.0;
    for (std::size_t s = 0; s < b.size(); ++s) {
      CHECK(std::abs(p[static_cast<Mask>(s)] - b[s]) < 1e-14);
      CHECK(p[static_cast<Mask>(s)] > 0.0);
      sum += p[static_cast<Mask>(s)];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("zero field gibbs measure is flip symmetric") {
  Rng rng = make_rng(12, 0);
  const int n = 5;
  auto p = gibbs_measure(random_symmetric_interaction(n, 1.0, rng), FieldVector(n));
  const Mask all = (1u << n) - 1;
  for (Mask s = 0; s <= all; ++s) CHECK(std::abs(p[s] - p[all ^ s]) < 1e-15);
}

TEST_CASE("magnetization profile") {
  SitePartition a(3, {{0, 1}, {2}});
  auto u = magnetization_profile(ProbVec::uniform(3), a);
  CHECK(std::abs(u[0]) < 1e-15);
  CHECK(std::abs(u[1]) < 1e-15);
  auto top = magnetization_profile(ProbVec::point_mass(3, 7), a);
  CHECK(top[0] == 1.0);
  CHECK(top[1] == 1.0);
  auto prod = magnetization_profile(product_bernoulli({0.2, 0.7, 0.9}), a);
  CHECK(std::abs(prod[0] - 0.5 * ((0.4 - 1) + (1.4 - 1))) < 1e-14);
  CHECK(std::abs(prod[1] - 0.8) < 1e-14);
}

TEST_CASE("magnetization profile is affine") {
  Rng rng = make_rng(13, 0);
  const int n = 4;
  SitePartition a(n, {{0, 2}, {1, 3}});
  auto p = random_positive_measure(n, 1.0, rng);
  auto q = random_positive_measure(n, 1.0, rng);
  const double al = 0.3;
  std::vector<double> mix(p.size());
  for (std::size_t s = 0; s < mix.size(); ++s) mix[s] = al * p.weights()[s] + (1 - al) * q.weights()[s];
  auto mm = magnetization_profile(ProbVec(n, mix), a);
  auto mp = magnetization_profile(p, a), mq = magnetization_profile(q, a);
  for (int b = 0; b < a.size(); ++b) CHECK(std::abs(mm[b] - (al * mp[b] + (1 - al) * mq[b])) < 1e-14);
}

TEST_CASE("solve_field closed form at J = 0") {
  SitePartition a(3, {{0, 2}, {1}});
  auto h = solve_field(InteractionMatrix(3), a, {0.4, -0.6});
  CHECK(std::abs(h[0] - std::atanh(0.4)) < 1e-10);
  CHECK(std::abs(h[2] - std::atanh(0.4)) < 1e-10);
  CHECK(std::abs(h[1] - std::atanh(-0.6)) < 1e-10);
}

TEST_CASE("solve_field with zero target under flip symmetry gives zero field") {
  Rng rng = make_rng(14, 0);
  auto j = random_symmetric_interaction(4, 0.5, rng);
  auto h = solve_field(j, SitePartition(4, {{0, 1}, {2, 3}}), {0.0, 0.0});
  for (int l = 0; l < 4; ++l) CHECK(std::abs(h[l]) < 1e-12);
}

TEST_CASE("solve_field round trip on random models") {
  Rng rng = make_rng(15, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 5;
    auto j = random_symmetric_interaction(n, 0.6, rng);
    auto a = random_partition(n, 3, rng);
    std::vector<double> target(a.size());
    for (double& x : target) x = 1.8 * uniform01(rng) - 0.9;
    auto h = solve_field(j, a, target);
    CHECK(h.constant_on(a));
    auto m = magnetization_profile(gibbs_measure(j, h), a);
    for (int b = 0; b < a.size(); ++b) CHECK(std::abs(m[b] - target[b]) < 1e-10);
  }
}

TEST_CASE("solve_field rejects boundary targets") {
  CHECK_THROWS_AS(solve_field(InteractionMatrix(2), SitePartition::whole(2), {1.0}), DomainError);
  CHECK_THROWS_AS(solve_field(InteractionMatrix(2), SitePartition::whole(2), {-1.0}), DomainError);
}

TEST_CASE("relative entropy and total variation") {
  auto u = ProbVec::uniform(1);
  auto d = ProbVec::point_mass(1, 1);
  CHECK(relative_entropy(u, u).value() == 0.0);
  CHECK(std::abs(relative_entropy(d, u).value() - 0.6931471805599453) < 1e-15);
  CHECK_FALSE(relative_entropy(u, d).is_finite());
  CHECK_THROWS_AS(relative_entropy(u, d).value(), DomainError);
  CHECK(tv_distance(u, u) == 0.0);
  CHECK(tv_distance(ProbVec::point_mass(2, 0), ProbVec::point_mass(2, 3)) == 1.0);
}

TEST_CASE("Pinsker and triangle inequality on random pairs") {
  Rng rng = make_rng(16, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    auto p = random_positive_measure(n, 1.5, rng);
    auto q = random_positive_measure(n, 1.5, rng);
    auto r = random_positive_measure(n, 1.5, rng);
    const double tv = tv_distance(p, q);
    CHECK(relative_entropy(p, q).value() >= 2.0 * tv * tv - 1e-15);
    CHECK(tv == tv_distance(q, p));
    CHECK(tv <= tv_distance(p, r) + tv_distance(r, q) + 1e-15);
  }
}

TEST_CASE("Jacobi eigenvalues") {
  auto e = jacobi_eigen({2, 1, 0, 1, 2, 0, 0, 0, 5}, 3);
  CHECK(std::abs(e.values[0] - 1.0) < 1e-12);
  CHECK(std::abs(e.values[1] - 3.0) < 1e-12);
  CHECK(std::abs(e.values[2] - 5.0) < 1e-12);
  InteractionMatrix j(2, {0, 0.25, 0.25, 0});
  CHECK(std::abs(j.largest_eigenvalue() - 0.25) < 1e-12);
  CHECK(std::abs(j.smallest_eigenvalue() + 0.25) < 1e-12);
  CHECK(j.max_abs_row_sum() == 0.25);
}

TEST_CASE("random psd interaction has the requested top eigenvalue") {
  Rng rng = make_rng(17, 0);
  auto j = random_psd_interaction(5, 0.3, rng);
  CHECK(std::abs(j.largest_eigenvalue() - 0.3) < 1e-10);
  CHECK(j.smallest_eigenvalue() > -1e-12);
}

TEST_CASE("seed splitting") {
  CHECK(seed_split(1, 0) == seed_split(1, 0));
  CHECK(seed_split(1, 0) != seed_split(1, 1));
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 10000; ++s) seen.insert(seed_split(42, s));
  CHECK(seen.size() == 10000);
}
