// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "oracles/brute.hpp"
#include "spinkac/collision.hpp"
#include "spinkac/error.hpp"
#include "spinkac/gibbs.hpp"
#include "spinkac/instances.hpp"

using namespace spinkac;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

TransportKernel kernel_family(int family, const SitePartition& a, Rng& rng) {
  switch (family % 4) {
    case 0: return TransportKernel::single_site(a.sites());
    case 1: return TransportKernel::mean_field(a.sites());
    case 2: return TransportKernel::blocks(a);
    default: return random_kernel_with_components(a, rng);
  }
}

// Marginal of p on all sites except l, evaluated at tau.
double marginal_without(const std::vector<double>& p, unsigned tau, int l) {
  const unsigned bit = 1u << l;
  return p[tau & ~bit] + p[tau | bit];
}

double site_marginal(const std::vector<double>& p, int k, int value) {
  double m = 0.0;
  for (unsigned s = 0; s < p.size(); ++s) {
    if (static_cast<int>((s >> k) & 1u) == value) m += p[s];
  }
  return m;
}

}  // namespace

TEST_CASE("kernel families") {
  auto ss = TransportKernel::single_site(3);
  CHECK(ss(0, 0) == 1.0);
  CHECK(ss(0, 1) == 0.0);
  CHECK(ss.components() == SitePartition::singletons(3));
  auto mf = TransportKernel::mean_field(4);
  CHECK(mf(1, 3) == 0.25);
  CHECK(mf.components() == SitePartition::whole(4));
  auto bk = TransportKernel::blocks(SitePartition(3, {{0, 1}, {2}}));
  CHECK(bk(0, 1) == 0.5);
  CHECK(bk(1, 1) == 0.5);
  CHECK(bk(0, 2) == 0.0);
  CHECK(bk(2, 2) == 1.0);
  CHECK(bk.components() == SitePartition(3, {{0, 1}, {2}}));
  CHECK(bk.is_block_kernel());
}

TEST_CASE("explicit kernels are validated") {
  CHECK_THROWS_AS(TransportKernel::from_matrix(2, {0.5, 0.5, 0.4, 0.6}), DomainError);
  CHECK_THROWS_AS(TransportKernel::from_matrix(2, {0.6, 0.6, 0.6, 0.6}), DomainError);
  CHECK_THROWS_AS(TransportKernel::from_matrix(2, {1.5, -0.5, -0.5, 1.5}), DomainError);
  auto k = TransportKernel::from_matrix(3, {0, 1, 0, 1, 0, 0, 0, 0, 1});
  CHECK(k.components() == SitePartition(3, {{0, 1}, {2}}));
  CHECK_FALSE(k.is_block_kernel());
}

TEST_CASE("random kernels are symmetric stochastic with the requested components") {
  Rng rng = make_rng(21, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    auto a = random_partition(n, 3, rng);
    auto k = random_kernel_with_components(a, rng);
    CHECK(k.components() == a);
    for (int l = 0; l < n; ++l) {
      double row = 0.0;
      for (int m = 0; m < n; ++m) row += k(l, m);
      CHECK(std::abs(row - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("exchange move") {
  // sigma = (+,-), sigma' = (-,-), exchange site 1 of sigma with site 2 of sigma'
  auto [t, u] = exchange(SpinConfig(0b01, 2), SpinConfig(0b00, 2), 0, 1);
  CHECK(t.to_string() == "--");
  CHECK(u.to_string() == "-+");
  auto [a, b] = exchange(SpinConfig(0b11, 2), SpinConfig(0b10, 2), 0, 1);
  CHECK(a.bits() == 0b11u);
  CHECK(b.bits() == 0b10u);
  CHECK_THROWS_AS(exchange(SpinConfig(0, 2), SpinConfig(0, 2), 2, 0), DomainError);

  Rng rng = make_rng(22, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + uniform_int(rng, 8);
    const Mask s = static_cast<Mask>(rng() & ((1u << n) - 1));
    const Mask r = static_cast<Mask>(rng() & ((1u << n) - 1));
    const int l = uniform_int(rng, n), k = uniform_int(rng, n);
    auto [x, y] = exchange_bits(s, r, l, k);
    auto [x2, y2] = exchange_bits(x, y, l, k);
    CHECK(x2 == s);
    CHECK(y2 == r);
  }
}

TEST_CASE("acceptance probabilities") {
  Rng rng = make_rng(23, 0);
  const int n = 3;
  CollisionContext free(InteractionMatrix(n), TransportKernel::mean_field(n));
  auto j = random_symmetric_interaction(n, 0.8, rng);
  CollisionContext ctx(j, TransportKernel::mean_field(n));
  const double jbar = j.max_abs_row_sum();
  const double lo = 1.0 / (1.0 + std::exp(4.0 * jbar));
  const double hi = std::exp(4.0 * jbar) / (1.0 + std::exp(4.0 * jbar));
  const std::vector<double> zero(n, 0.0);
  auto w = [&](unsigned x) { return std::exp(brute::energy(j.entries(), zero, n, x)); };
  for (Mask s = 0; s < 8; ++s) {
    for (Mask t = 0; t < 8; ++t) {
      for (int l = 0; l < n; ++l) {
        for (int k = 0; k < n; ++k) {
          CHECK(acceptance_prob(free, l, k, s, t) == 0.5);
          const double a = acceptance_prob(ctx, l, k, s, t);
          auto [u, v] = exchange_bits(s, t, l, k);
          const double expect = w(u) * w(v) / (w(s) * w(t) + w(u) * w(v));
          CHECK(std::abs(a - expect) < 1e-14);
          CHECK(a >= lo - 1e-15);
          CHECK(a <= hi + 1e-15);
          if (u == s && v == t) {
            CHECK(a == 0.5);
          } else {
            CHECK(std::abs(a + acceptance_prob(ctx, l, k, u, v) - 1.0) < 1e-15);
          }
        }
      }
    }
  }
}

TEST_CASE("diagonal acceptance") {
  CollisionContext free(InteractionMatrix(2), TransportKernel::mean_field(2));
  CHECK(diagonal_acceptance(free, 0, 1, 0b01) == 0.5);
  // J12 = 0.5, J23 = -0.2, sigma = (+,-,+): swapping sites 1 and 2 lowers
  // the energy from -0.3 to -0.7.
  InteractionMatrix j(3, {0, 0.5, 0, 0.5, 0, -0.2, 0, -0.2, 0});
  CollisionContext ctx(j, TransportKernel::mean_field(3));
  CHECK(diagonal_acceptance(ctx, 0, 1, 0b111) == 0.5);
  CHECK(std::abs(diagonal_acceptance(ctx, 0, 1, 0b101) - 1.0 / (1.0 + std::exp(0.4))) < 1e-15);
  CHECK(std::abs(diagonal_acceptance(ctx, 0, 1, 0b101) - 0.401312339887548) < 1e-14);
}

TEST_CASE("collision product agrees with the literal definition") {
  Rng rng = make_rng(24, 0);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 1 + trial % 5;
    auto j = random_symmetric_interaction(n, 0.7, rng);
    auto a = random_partition(n, 3, rng);
    auto k = kernel_family(trial, a, rng);
    CollisionContext ctx(j, k);
    auto p = random_positive_measure(n, 1.0, rng);
    auto q = random_positive_measure(n, 1.0, rng);
    auto oracle = brute::collision_product(j.entries(), k.entries(), n, p.weights(), q.weights());
    std::vector<double> ref, opt, opt_swapped;
    collision_product_into(ctx, p.weights(), q.weights(), ref, ProductMode::kReference);
    collision_product_into(ctx, p.weights(), q.weights(), opt, ProductMode::kOptimized);
    collision_product_into(ctx, q.weights(), p.weights(), opt_swapped, ProductMode::kOptimized);
    CHECK(max_diff(ref, oracle) < 1e-14);
    CHECK(max_diff(opt, ref) < 1e-13);
    CHECK(opt == opt_swapped);
    double mass = 0.0;
    for (double x : opt) mass += x;
    CHECK(std::abs(mass - 1.0) < 1e-12);
  }
}

TEST_CASE("gibbs measures with admissible fields are stationary") {
  Rng rng = make_rng(25, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    auto j = random_symmetric_interaction(n, 1.0, rng);
    auto a = random_partition(n, 3, rng);
    auto k = kernel_family(trial, a, rng);
    CollisionContext ctx(j, k);
    auto mu = gibbs_measure(j, random_block_field(ctx.partition(), 1.5, rng));
    for (auto mode : {ProductMode::kReference, ProductMode::kOptimized}) {
      std::vector<double> out;
      collision_product_into(ctx, mu.weights(), mu.weights(), out, mode);
      CHECK(max_diff(out, mu.weights()) < 1e-12);
    }
  }
}

TEST_CASE("zero interaction closed form") {
  Rng rng = make_rng(26, 0);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + trial % 4;
    auto a = random_partition(n, 2, rng);
    auto k = kernel_family(trial, a, rng);
    CollisionContext ctx(InteractionMatrix(n), k);
    auto p = random_positive_measure(n, 1.0, rng).weights();
    auto q = random_positive_measure(n, 1.0, rng).weights();
    std::vector<double> out;
    collision_product_into(ctx, p, q, out);
    for (unsigned tau = 0; tau < p.size(); ++tau) {
      double v = 0.25 * p[tau] + 0.25 * q[tau];
      for (int l = 0; l < n; ++l) {
        for (int m = 0; m < n; ++m) {
          const int tl = (tau >> l) & 1u;
          v += k(l, m) / (4.0 * n) *
               (marginal_without(p, tau, l) * site_marginal(q, m, tl) +
                site_marginal(p, m, tl) * marginal_without(q, tau, l));
        }
      }
      CHECK(std::abs(out[tau] - v) < 1e-14);
    }
  }
}

TEST_CASE("block magnetizations average under collisions") {
  Rng rng = make_rng(27, 0);
  for (int trial = 0; trial < 16; ++trial) {
    const int n = 2 + trial % 4;
    auto j = random_symmetric_interaction(n, 0.8, rng);
    auto a = random_partition(n, 3, rng);
    CollisionContext ctx(j, kernel_family(trial, a, rng));
    auto p = random_positive_measure(n, 1.2, rng);
    auto q = random_positive_measure(n, 1.2, rng);
    auto r = collision_product(ctx, p, q);
    auto mr = magnetization_profile(r, ctx.partition());
    auto mp = magnetization_profile(p, ctx.partition());
    auto mq = magnetization_profile(q, ctx.partition());
    for (std::size_t b = 0; b < mr.size(); ++b) CHECK(std::abs(mr[b] - 0.5 * (mp[b] + mq[b])) < 1e-12);
  }
}

TEST_CASE("two-configuration kernel") {
  Rng rng = make_rng(28, 0);
  const int n = 3;
  auto j = random_symmetric_interaction(n, 0.9, rng);
  auto k = random_kernel_with_components(SitePartition(n, {{0, 2}, {1}}), rng);
  CollisionContext ctx(j, k);
  for (Mask s = 0; s < 8; ++s) {
    for (Mask t = 0; t < 8; ++t) {
      auto oracle = brute::pair_kernel(j.entries(), k.entries(), n, s, t);
      auto out = pair_kernel(ctx, s, t);
      double total = 0.0;
      for (const auto& o : out) {
        CHECK(std::abs(o.prob - oracle[{o.first, o.second}]) < 1e-14);
        total += o.prob;
      }
      CHECK(out.size() <= oracle.size());
      CHECK(std::abs(total - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("detailed balance") {
  Rng rng = make_rng(29, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3;
    auto j = random_symmetric_interaction(n, 1.0, rng);
    auto a = random_partition(n, 3, rng);
    CollisionContext ctx(j, kernel_family(trial, a, rng));
    CHECK(check_detailed_balance(ctx, FieldVector(n)) <= 1e-12);
    CHECK(check_detailed_balance(ctx, random_block_field(ctx.partition(), 2.0, rng)) <= 1e-12);
  }
  CollisionContext mf(InteractionMatrix(3), TransportKernel::mean_field(3));
  CHECK_THROWS_AS(check_detailed_balance(mf, FieldVector({0.1, 0.2, 0.1})), PreconditionError);
}

TEST_CASE("parallel product is bitwise identical to the serial one") {
  Rng rng = make_rng(30, 0);
  const int n = 10;
  auto j = random_symmetric_interaction(n, 0.3, rng);
  CollisionContext ctx(j, TransportKernel::blocks(SitePartition(n, {{0, 1, 2, 3}, {4, 5, 6}, {7, 8, 9}})));
  auto p = random_positive_measure(n, 1.0, rng);
  auto q = random_positive_measure(n, 1.0, rng);
  std::vector<double> serial, threaded;
  collision_product_into(ctx, p.weights(), q.weights(), serial);
  WorkerPool pool(3);
  collision_product_into(ctx, p.weights(), q.weights(), threaded, ProductMode::kOptimized,
                         Execution{&pool, Reduction::kDeterministic});
  CHECK(serial == threaded);
}

TEST_CASE("capacity limits") {
  CHECK_THROWS_AS(CollisionContext(InteractionMatrix(17), TransportKernel::mean_field(17)), CapacityError);
  CollisionContext ctx(InteractionMatrix(13), TransportKernel::single_site(13));
  auto u = ProbVec::uniform(13);
  std::vector<double> out;
  CHECK_THROWS_AS(collision_product_into(ctx, u.weights(), u.weights(), out, ProductMode::kReference),
                  CapacityError);
}
