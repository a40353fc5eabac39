// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "spinkac/dynamics.hpp"
#include "spinkac/error.hpp"
#include "spinkac/instances.hpp"
#include "spinkac/wild_tree.hpp"

using namespace spinkac;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

}  // namespace

TEST_CASE("tree structure validation") {
  CollisionTree root;
  CHECK(root.leaf_count() == 1);
  CHECK(root.leaves() == std::vector<std::string>{""});
  CollisionTree comb({"", "0", "1", "00", "01", "000", "001"});
  CHECK(comb.leaf_count() == 4);
  CHECK(comb.leaves() == std::vector<std::string>{"000", "001", "01", "1"});
  CHECK(comb.shape() == "(((..).).)");
  CHECK_THROWS_AS(CollisionTree({"", "0"}), DomainError);
  CHECK_THROWS_AS(CollisionTree({"", "00", "01"}), DomainError);
  CHECK_THROWS_AS(CollisionTree({"0", "1"}), DomainError);
  CHECK_THROWS_AS(CollisionTree({"", "0", "2"}), DomainError);
  CHECK(CollisionTree::regular(3).leaf_count() == 8);
}

TEST_CASE("sampled trees") {
  Rng rng = make_rng(41, 0);
  CHECK(sample_tree(0.0, rng) == CollisionTree());
  CHECK_THROWS_AS(sample_tree(-1.0, rng), DomainError);
  const int runs = 100000;
  double leaves = 0.0, leaves_sq = 0.0;
  int unsplit = 0;
  for (int i = 0; i < runs; ++i) {
    auto tree = sample_tree(1.0, rng);
    CHECK_NOTHROW(CollisionTree(tree.nodes()));
    const double l = static_cast<double>(tree.leaf_count());
    leaves += l;
    leaves_sq += l * l;
    unsplit += tree.leaf_count() == 1;
  }
  const double mean = leaves / runs;
  const double sd = std::sqrt((leaves_sq / runs - mean * mean) / runs);
  CHECK(std::abs(mean - std::exp(1.0)) < 3 * sd);
  const double p = std::exp(-1.0);
  CHECK(std::abs(unsplit / static_cast<double>(runs) - p) < 3 * std::sqrt(p * (1 - p) / runs));
}

TEST_CASE("tree evaluation") {
  Rng rng = make_rng(42, 0);
  const int n = 3;
  auto j = random_symmetric_interaction(n, 0.6, rng);
  CollisionContext ctx(j, TransportKernel::mean_field(n));
  auto p = random_positive_measure(n, 1.0, rng);
  CHECK(eval_tree(ctx, CollisionTree(), {p}).weights() == p.weights());
  CHECK(eval_tree(ctx, CollisionTree::regular(1), {p}).weights() == collision_product(ctx, p, p).weights());

  CollisionTree comb({"", "0", "1", "00", "01", "000", "001"});
  auto pp = collision_product(ctx, p, p);
  auto direct = collision_product(ctx, collision_product(ctx, pp, p), p);
  CHECK(max_diff(eval_tree(ctx, comb, {p}).weights(), direct.weights()) < 1e-15);

  auto q = random_positive_measure(n, 1.0, rng), r = random_positive_measure(n, 1.0, rng),
       s = random_positive_measure(n, 1.0, rng);
  // Leaves "000", "001", "01", "1" receive p, q, r, s.
  auto multi = collision_product(ctx, collision_product(ctx, collision_product(ctx, p, q), r), s);
  CHECK(max_diff(eval_tree(ctx, comb, {p, q, r, s}).weights(), multi.weights()) < 1e-15);
  CHECK_THROWS_AS(eval_tree(ctx, comb, {p, q}), DomainError);

  auto fig = collision_product(ctx, pp, pp);
  CHECK(max_diff(discrete_iterate(ctx, p, 2).weights(), fig.weights()) < 1e-15);
  CHECK(max_diff(eval_tree(ctx, CollisionTree::regular(2), {p}).weights(), fig.weights()) < 1e-15);
  CHECK(discrete_iterate(ctx, p, 0).weights() == p.weights());
  auto four = discrete_iterate(ctx, {p, q, r, s});
  auto pairs = collision_product(ctx, collision_product(ctx, p, q), collision_product(ctx, r, s));
  CHECK(max_diff(four.weights(), pairs.weights()) < 1e-15);
}

TEST_CASE("discrete iterates conserve the block profile") {
  Rng rng = make_rng(43, 0);
  const int n = 4;
  SitePartition a(n, {{0, 1}, {2, 3}});
  CollisionContext ctx(random_symmetric_interaction(n, 0.5, rng), TransportKernel::blocks(a));
  auto p = random_positive_measure(n, 1.5, rng);
  auto m0 = magnetization_profile(p, a);
  for (int k = 1; k <= 4; ++k) CHECK(max_diff(magnetization_profile(discrete_iterate(ctx, p, k), a), m0) < 1e-12);
}

TEST_CASE("equilibrium is invariant under any tree") {
  Rng rng = make_rng(44, 0);
  const int n = 3;
  auto j = random_symmetric_interaction(n, 0.8, rng);
  SitePartition a(n, {{0, 2}, {1}});
  CollisionContext ctx(j, TransportKernel::blocks(a));
  auto mu = gibbs_measure(j, random_block_field(a, 1.0, rng));
  for (int i = 0; i < 20; ++i) {
    CHECK(max_diff(eval_tree(ctx, sample_tree(2.0, rng), {mu}).weights(), mu.weights()) < 1e-12);
  }
}

TEST_CASE("branching representation agrees with the ODE") {
  Rng rng = make_rng(45, 0);
  const int n = 2;
  auto j = random_symmetric_interaction(n, 0.7, rng);
  CollisionContext ctx(j, TransportKernel::mean_field(n));
  auto p0 = random_positive_measure(n, 1.5, rng);
  CHECK(max_diff(mc_solution(ctx, p0, 0.0, 10, 1).mean, p0.weights()) < 1e-15);
  auto est = mc_solution(ctx, p0, 1.0, 10000, 2);
  auto ode = evolve(ctx, p0, 1.0, 0.01).states.back();
  for (std::size_t s = 0; s < ode.size(); ++s) {
    CHECK(std::abs(est.mean[s] - ode[static_cast<Mask>(s)]) <= 3 * est.std_error[s]);
  }
  WorkerPool pool(3);
  auto threaded = mc_solution(ctx, p0, 1.0, 10000, 2, Execution{&pool, Reduction::kDeterministic});
  CHECK(threaded.mean == est.mean);
}

TEST_CASE("Monte Carlo error shrinks like one over the sample count") {
  Rng rng = make_rng(46, 0);
  const int n = 2;
  CollisionContext ctx(random_symmetric_interaction(n, 0.7, rng), TransportKernel::mean_field(n));
  auto p0 = random_positive_measure(n, 1.5, rng);
  auto small = mc_solution(ctx, p0, 1.0, 2000, 3);
  auto large = mc_solution(ctx, p0, 1.0, 32000, 3);
  for (std::size_t s = 0; s < small.mean.size(); ++s) {
    const double ratio = small.std_error[s] * small.std_error[s] / (large.std_error[s] * large.std_error[s]);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
  }
}

TEST_CASE("marked partition rules") {
  const int n = 3;
  auto k = TransportKernel::mean_field(n);
  Rng rng = make_rng(47, 0);
  MarkedPartition empty{n, {Fragment{}, Fragment{0b111, -1}}};
  for (int i = 0; i < 50; ++i) {
    auto next = mpp_step(empty, k, rng);
    CHECK(next.fragments[0] == Fragment{});
    CHECK(next.fragments[1] == Fragment{});
    CHECK_NOTHROW(next.validate(k));
  }
  auto c = MarkedPartition::initial(n);
  for (int g = 0; g < 6; ++g) {
    c = mpp_step(c, k, rng);
    CHECK_NOTHROW(c.validate(k));
  }
  CHECK(c.fragments.size() == 64);

  auto ss = TransportKernel::single_site(n);
  MarkedPartition bad{n, {Fragment{0b001, 1}, Fragment{0b110, -1}}};
  CHECK_THROWS_AS(bad.validate(ss), DomainError);
  MarkedPartition overlap{n, {Fragment{0b011, -1}, Fragment{0b110, -1}}};
  CHECK_THROWS_AS(overlap.validate(ss), DomainError);
}

TEST_CASE("marked partition transition frequencies") {
  // Explicit kernel on 3 sites; track the children of ([n], 0) and of ({1}, 2).
  const int n = 3;
  auto k = TransportKernel::from_matrix(n, {0.5, 0.5, 0, 0.5, 0.25, 0.25, 0, 0.25, 0.75});
  Rng rng = make_rng(48, 0);
  const int runs = 200000;
  int split_first_site = 0, split_first_to_second = 0;
  int lazy_moves = 0, marked_stays_left = 0;
  MarkedPartition single{n, {Fragment{0b001, 1}}};
  for (int r = 0; r < runs; ++r) {
    auto c = mpp_step(MarkedPartition::initial(n), k, rng);
    // B = 3 with U = site 1 gives ((A \ {1}, 0), ({1}, X)).
    if (c.fragments[0] == Fragment{0b110, -1} && c.fragments[1].sites == 0b001) {
      ++split_first_site;
      split_first_to_second += c.fragments[1].mark == 1;
    }
    auto d = mpp_step(single, k, rng);
    if (d.fragments[0].sites == 0b001 && d.fragments[1].sites == 0) {
      if (d.fragments[0].mark != 1) ++lazy_moves;
      ++marked_stays_left;
    }
  }
  auto within = [&](double x, double p, double trials) {
    return std::abs(x / trials - p) < 4 * std::sqrt(p * (1 - p) / trials);
  };
  CHECK(within(split_first_site, 1.0 / 12.0, runs));
  CHECK(within(split_first_to_second, 0.5, split_first_site));
  // B = 1 keeps the fragment on the left unchanged; B = 3 moves it with the
  // lazy kernel: leaves row 2 with probability (1/3)(1 - K(2,2)).
  CHECK(within(marked_stays_left, 0.5, runs));
  CHECK(within(lazy_moves, 0.25 * (1.0 / 3.0) * 0.75, runs));
}

TEST_CASE("fragmentation time") {
  Rng rng = make_rng(49, 0);
  // One site: H is geometric with success probability 1/2.
  double mean = 0.0;
  for (int i = 0; i < 40000; ++i) mean += fragmentation_time(1, rng);
  mean /= 40000;
  CHECK(std::abs(mean - 2.0) < 0.03);

  double prev_mean = 0.0;
  for (int n : {2, 4, 8}) {
    auto tail = fragmentation_tail(n, 10000, 5 + n, 20 * n);
    for (std::size_t u = 0; u < tail.u.size(); ++u) {
      CHECK(tail.empirical[u] <= tail.bound[u] + 3 * tail.std_error[u]);
    }
    // Coupon collector with probability 1/2 per draw: 2 n H_n.
    double harmonic = 0.0;
    for (int i = 1; i <= n; ++i) harmonic += 1.0 / i;
    CHECK(std::abs(tail.mean - 2.0 * n * harmonic) < 0.05 * 2.0 * n * harmonic);
    CHECK(tail.mean > prev_mean);
    prev_mean = tail.mean;
  }
}

TEST_CASE("marked partition representation") {
  Rng rng = make_rng(50, 0);
  {
    const int n = 2;
    CollisionContext ctx(InteractionMatrix(n), TransportKernel::single_site(n));
    auto p = random_positive_measure(n, 1.0, rng);
    auto rc0 = mpp_representation_check(ctx, {p}, 0, 10, 1);
    CHECK(max_diff(rc0.estimate, p.weights()) < 1e-15);
    auto q = random_positive_measure(n, 1.0, rng);
    auto rc1 = mpp_representation_check(ctx, {p, q}, 1, 100000, 2);
    CHECK(rc1.max_z <= 3.0);
  }
  {
    const int n = 3;
    CollisionContext ctx(InteractionMatrix(n), TransportKernel::mean_field(n));
    std::vector<ProbVec> leaves;
    for (int i = 0; i < 8; ++i) leaves.push_back(random_positive_measure(n, 1.0, rng));
    auto rc = mpp_representation_check(ctx, leaves, 3, 100000, 3);
    CHECK(rc.max_z <= 3.0);
  }
  CollisionContext hot(InteractionMatrix(2, {0, 0.1, 0.1, 0}), TransportKernel::mean_field(2));
  CHECK_THROWS_AS(mpp_representation_check(hot, {ProbVec::uniform(2)}, 1, 10, 1), PreconditionError);
}
