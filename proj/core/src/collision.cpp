// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spinkac/error.hpp"
#include "spinkac/gibbs.hpp"

namespace spinkac {

namespace {

constexpr double kKernelTolerance = 1e-14;
constexpr int kMaxContextSites = 16;
constexpr int kMaxReferenceSites = 12;

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

SitePartition support_components(int n, const std::vector<double>& k) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (k[a * n + b] > 0.0) {
        int ra = find_root(parent, a), rb = find_root(parent, b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }
  std::vector<std::vector<int>> blocks;
  std::vector<int> index(n, -1);
  for (int a = 0; a < n; ++a) {
    int r = find_root(parent, a);
    if (index[r] < 0) {
      index[r] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[index[r]].push_back(a);
  }
  return SitePartition(n, std::move(blocks));
}

void check_site(int n, int l) {
  if (l < 0 || l >= n) {
    throw DomainError("site " + std::to_string(l + 1) + " is outside 1.." + std::to_string(n));
  }
}

}  // namespace

TransportKernel::TransportKernel(int n, std::vector<double> k)
    : n_(n), k_(std::move(k)), components_(support_components(n_, k_)) {}

TransportKernel TransportKernel::single_site(int n) {
  check_sites(n);
  std::vector<double> k(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = 0; a < n; ++a) k[a * n + a] = 1.0;
  return TransportKernel(n, std::move(k));
}

TransportKernel TransportKernel::mean_field(int n) {
  check_sites(n);
  return TransportKernel(n, std::vector<double>(static_cast<std::size_t>(n) * n, 1.0 / n));
}

TransportKernel TransportKernel::blocks(const SitePartition& a) {
  const int n = a.sites();
  check_sites(n);
  std::vector<double> k(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& block : a.blocks()) {
    const double v = 1.0 / static_cast<double>(block.size());
    for (int x : block) {
      for (int y : block) k[x * n + y] = v;
    }
  }
  return TransportKernel(n, std::move(k));
}

TransportKernel TransportKernel::from_matrix(int n, std::vector<double> k) {
  check_sites(n);
  if (k.size() != static_cast<std::size_t>(n) * n) {
    throw DomainError("kernel needs " + std::to_string(n * n) + " entries, got " +
                      std::to_string(k.size()));
  }
  for (int a = 0; a < n; ++a) {
    double row = 0.0;
    for (int b = 0; b < n; ++b) {
      const double v = k[a * n + b];
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("kernel entry K(" + std::to_string(a + 1) + "," +
                          std::to_string(b + 1) + ") is negative or not finite");
      }
      if (std::abs(v - k[b * n + a]) > kKernelTolerance) {
        throw DomainError("kernel is not symmetric at K(" + std::to_string(a + 1) + "," +
                          std::to_string(b + 1) + ")");
      }
      row += v;
    }
    if (std::abs(row - 1.0) > kKernelTolerance * n) {
      std::ostringstream os;
      os.precision(17);
      os << "kernel row " << a + 1 << " sums to " << row;
      throw DomainError(os.str());
    }
  }
  return TransportKernel(n, std::move(k));
}

bool TransportKernel::is_block_kernel() const {
  return blocks(components_).entries() == k_;
}

TransportKernel build_transport_kernel(int n, const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelSpec::Kind::kSingleSite:
      return TransportKernel::single_site(n);
    case KernelSpec::Kind::kMeanField:
      return TransportKernel::mean_field(n);
    case KernelSpec::Kind::kBlocks:
      return TransportKernel::blocks(SitePartition(n, spec.blocks));
    case KernelSpec::Kind::kMatrix:
      return TransportKernel::from_matrix(n, spec.matrix);
  }
  throw DomainError("unknown kernel kind");
}

std::pair<SpinConfig, SpinConfig> exchange(const SpinConfig& s, const SpinConfig& t,
                                           int l, int k) {
  if (s.size() != t.size()) throw DomainError("configurations have different sizes");
  check_site(s.size(), l);
  check_site(s.size(), k);
  auto [a, b] = exchange_bits(s.bits(), t.bits(), l, k);
  return {SpinConfig(a, s.size()), SpinConfig(b, s.size())};
}

CollisionContext::CollisionContext(InteractionMatrix j, TransportKernel k)
    : n_(j.size()), j_(std::move(j)), k_(std::move(k)) {
  check_sites(n_);
  if (n_ > kMaxContextSites) {
    throw CapacityError("collision context supports at most " +
                        std::to_string(kMaxContextSites) + " sites, got " +
                        std::to_string(n_));
  }
  if (k_.size() != n_) throw DomainError("kernel and interaction sizes differ");
  logw_ = spinkac::log_weights(j_, FieldVector(n_));
  const std::size_t states = state_count(n_);
  delta_.resize(states * n_);
  inv_ratio_.resize(states * n_);
  double worst = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    for (int l = 0; l < n_; ++l) {
      const double d = logw_[s ^ (std::size_t{1} << l)] - logw_[s];
      delta_[s * n_ + l] = d;
      inv_ratio_[s * n_ + l] = std::exp(-d);
      worst = std::max(worst, std::abs(d));
    }
  }
  bounded_ = worst < 300.0;
  rows_.resize(n_);
  for (int l = 0; l < n_; ++l) {
    for (int kk = 0; kk < n_; ++kk) {
      const double v = k_(l, kk);
      if (v > 0.0) {
        rows_[l].push_back(static_cast<int>(entries_.size()));
        entries_.push_back({l, kk, v / n_});
      }
    }
  }
  partners_.resize(2 * n_);
  partner_inv_.resize(2 * n_);
  for (int kk = 0; kk < n_; ++kk) {
    for (int b = 0; b < 2; ++b) {
      auto& list = partners_[2 * kk + b];
      auto& inv = partner_inv_[2 * kk + b];
      list.reserve(states / 2);
      inv.reserve(states / 2);
      for (std::size_t s = 0; s < states; ++s) {
        if (((s >> kk) & 1u) == static_cast<std::size_t>(b)) {
          list.push_back(static_cast<Mask>(s));
          inv.push_back(inv_ratio_[s * n_ + kk]);
        }
      }
    }
  }
}

double acceptance_prob(const CollisionContext& ctx, int l, int k, Mask s, Mask t) {
  const int n = ctx.sites();
  check_site(n, l);
  check_site(n, k);
  if (((s >> l) & 1u) == ((t >> k) & 1u)) return 0.5;
  // The exchange flips spin l of s and spin k of t.
  const double x = ctx.flip_delta(s, l) + ctx.flip_delta(t, k);
  return 1.0 / (1.0 + std::exp(-x));
}

double diagonal_acceptance(const CollisionContext& ctx, int l, int k, Mask s) {
  const int n = ctx.sites();
  check_site(n, l);
  check_site(n, k);
  if (((s >> l) & 1u) == ((s >> k) & 1u)) return 0.5;
  const Mask flipped_l = s ^ (Mask{1} << l);
  const double x = ctx.flip_delta(s, l) + ctx.flip_delta(flipped_l, k);
  return 1.0 / (1.0 + std::exp(-x));
}

namespace {

void check_product_args(const CollisionContext& ctx, const std::vector<double>& p,
                        const std::vector<double>& q, std::vector<double>& out) {
  const std::size_t states = state_count(ctx.sites());
  if (p.size() != states || q.size() != states) {
    throw DomainError("measure length does not match the collision context");
  }
  if (&out == &p || &out == &q) throw DomainError("output aliases an input");
  out.assign(states, 0.0);
}

void reference_product(const CollisionContext& ctx, const std::vector<double>& p,
                       const std::vector<double>& q, std::vector<double>& out) {
  const int n = ctx.sites();
  if (n > kMaxReferenceSites) {
    throw CapacityError("reference collision product supports at most " +
                        std::to_string(kMaxReferenceSites) + " sites");
  }
  const std::size_t states = state_count(n);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t t = 0; t < states; ++t) {
      const double r = 0.5 * (p[s] * q[t] + p[t] * q[s]);
      if (r == 0.0) continue;
      for (const auto& e : ctx.entries()) {
        const double a = acceptance_prob(ctx, e.l, e.k, static_cast<Mask>(s),
                                         static_cast<Mask>(t));
        const Mask moved = exchange_bits(static_cast<Mask>(s), static_cast<Mask>(t), e.l, e.k).first;
        out[moved] += r * e.weight * a;
        out[s] += r * e.weight * (1.0 - a);
      }
    }
  }
}

// Sum over the partners t of s for entry (l,k) of v(t) * acceptance, for two
// vectors at once.
void gather(const CollisionContext& ctx, int l, int k, Mask s, const double* pk,
            const double* qk, double& gp, double& gq) {
  const int need = ((s >> l) & 1u) ? 0 : 1;
  const auto& inv = ctx.partner_inverse_ratio(k, need);
  const std::size_t half = inv.size();
  const double r = ctx.inverse_flip_ratio(s, l);
  double sp = 0.0, sq = 0.0;
  if (ctx.ratios_bounded()) {
    for (std::size_t i = 0; i < half; ++i) {
      const double a = 1.0 / (1.0 + r * inv[i]);
      sp += pk[i] * a;
      sq += qk[i] * a;
    }
  } else {
    const auto& list = ctx.partners(k, need);
    const double ds = ctx.flip_delta(s, l);
    for (std::size_t i = 0; i < half; ++i) {
      const double a = 1.0 / (1.0 + std::exp(-(ds + ctx.flip_delta(list[i], k))));
      sp += pk[i] * a;
      sq += qk[i] * a;
    }
  }
  gp = sp;
  gq = sq;
}

void optimized_product(const CollisionContext& ctx, const std::vector<double>& p,
                       const std::vector<double>& q, std::vector<double>& out,
                       const Execution& ex) {
  const int n = ctx.sites();
  const std::size_t states = state_count(n);
  const std::size_t half = states / 2;

  // p and q restricted to {t : bit k of t = b}, in partner order.
  std::vector<double> pk(states * n), qk(states * n);
  for (int k = 0; k < n; ++k) {
    for (int b = 0; b < 2; ++b) {
      const auto& list = ctx.partners(k, b);
      double* dp = pk.data() + (2 * k + b) * half;
      double* dq = qk.data() + (2 * k + b) * half;
      for (std::size_t i = 0; i < half; ++i) {
        dp[i] = p[list[i]];
        dq[i] = q[list[i]];
      }
    }
  }

  double sum_p = 0.0, sum_q = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    sum_p += p[s];
    sum_q += q[s];
  }

  // moved[s * n + l]: mass that leaves s through a flip of spin l.
  std::vector<double> moved(states * n, 0.0);
  auto fill = [&](std::size_t s) {
    for (int l = 0; l < n; ++l) {
      const int need = ((s >> l) & 1u) ? 0 : 1;
      double acc = 0.0;
      for (int idx : ctx.row_entries(l)) {
        const auto& e = ctx.entries()[idx];
        const std::size_t off = (2 * e.k + need) * half;
        double gp, gq;
        gather(ctx, l, e.k, static_cast<Mask>(s), pk.data() + off, qk.data() + off, gp, gq);
        acc += e.weight * (0.5 * p[s] * gq + 0.5 * q[s] * gp);
      }
      moved[s * n + l] = acc;
    }
  };
  const int chunks = n >= 10 ? 64 : 1;
  const std::size_t per = (states + chunks - 1) / chunks;
  parallel_for(chunks > 1 ? ex : Execution{}, chunks, [&](int c) {
    const std::size_t lo = c * per, hi = std::min(states, lo + per);
    for (std::size_t s = lo; s < hi; ++s) fill(s);
  });

  for (std::size_t s = 0; s < states; ++s) {
    double v = 0.5 * (p[s] * sum_q + q[s] * sum_p);
    double lost = 0.0, gained = 0.0;
    for (int l = 0; l < n; ++l) {
      lost += moved[s * n + l];
      gained += moved[(s ^ (std::size_t{1} << l)) * n + l];
    }
    out[s] = v - lost + gained;
  }
}

}  // namespace

void collision_product_into(const CollisionContext& ctx, const std::vector<double>& p,
                            const std::vector<double>& q, std::vector<double>& out,
                            ProductMode mode, const Execution& ex) {
  check_product_args(ctx, p, q, out);
  if (mode == ProductMode::kReference) {
    reference_product(ctx, p, q, out);
  } else {
    optimized_product(ctx, p, q, out, ex);
  }
}

ProbVec collision_product(const CollisionContext& ctx, const ProbVec& p, const ProbVec& q,
                          ProductMode mode, const Execution& ex) {
  std::vector<double> out;
  collision_product_into(ctx, p.weights(), q.weights(), out, mode, ex);
  for (double& x : out) x = std::max(x, 0.0);
  return ProbVec::normalized(ctx.sites(), std::move(out));
}

std::vector<PairOutcome> pair_kernel(const CollisionContext& ctx, Mask s, Mask t) {
  std::vector<PairOutcome> out;
  double stay = 0.0;
  for (const auto& e : ctx.entries()) {
    if (((s >> e.l) & 1u) == ((t >> e.k) & 1u)) {
      stay += e.weight;
      continue;
    }
    const double a = acceptance_prob(ctx, e.l, e.k, s, t);
    auto [u, v] = exchange_bits(s, t, e.l, e.k);
    out.push_back({u, v, e.weight * a});
    stay += e.weight * (1.0 - a);
  }
  out.push_back({s, t, stay});
  return out;
}

double check_detailed_balance(const CollisionContext& ctx, const FieldVector& h) {
  const int n = ctx.sites();
  if (h.size() != n) throw DomainError("field length does not match the context");
  if (!h.constant_on(ctx.partition())) {
    throw PreconditionError("field is not constant on the irreducible components of K");
  }
  if (n > 10) throw CapacityError("detailed balance check supports at most 10 sites");
  const ProbVec mu = gibbs_measure(ctx.interaction(), h);
  const std::size_t states = state_count(n);
  double worst = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t t = 0; t < states; ++t) {
      const double fwd_mass = mu[s] * mu[t];
      for (const auto& e : ctx.entries()) {
        if (((s >> e.l) & 1u) == ((t >> e.k) & 1u)) continue;
        auto [u, v] = exchange_bits(static_cast<Mask>(s), static_cast<Mask>(t), e.l, e.k);
        const double fwd = fwd_mass * e.weight *
                           acceptance_prob(ctx, e.l, e.k, static_cast<Mask>(s), static_cast<Mask>(t));
        const double bwd = mu[u] * mu[v] * e.weight * acceptance_prob(ctx, e.l, e.k, u, v);
        worst = std::max(worst, std::abs(fwd - bwd));
      }
    }
  }
  return worst;
}

}  // namespace spinkac
