// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "spinkac/execution.hpp"
#include "spinkac/spin.hpp"

namespace spinkac {

// Symmetric stochastic matrix choosing which pair of sites exchanges spins.
class TransportKernel {
 public:
  static TransportKernel single_site(int n);
  static TransportKernel mean_field(int n);
  // K(l,k) = 1/|A| when l and k share a block A, else 0.
  static TransportKernel blocks(const SitePartition& a);
  // Validates nonnegativity, symmetry and unit row sums (tolerance 1e-14).
  static TransportKernel from_matrix(int n, std::vector<double> k);

  int size() const { return n_; }
  double operator()(int l, int k) const { return k_[l * n_ + k]; }
  const std::vector<double>& entries() const { return k_; }
  // Connected components of the support graph of K.
  const SitePartition& components() const { return components_; }
  // True when K equals the block kernel of its own components.
  bool is_block_kernel() const;

 private:
  TransportKernel(int n, std::vector<double> k);
  int n_;
  std::vector<double> k_;
  SitePartition components_;
};

struct KernelSpec {
  enum class Kind { kSingleSite, kMeanField, kBlocks, kMatrix };
  Kind kind = Kind::kMeanField;
  std::vector<std::vector<int>> blocks;  // kBlocks: 0-based sites
  std::vector<double> matrix;            // kMatrix: row-major n x n
};

TransportKernel build_transport_kernel(int n, const KernelSpec& spec);

// Exchange of spin l of s with spin k of t: (S_l(s, t_k), S_k(t, s_l)).
// Sites are 0-based.
inline std::pair<Mask, Mask> exchange_bits(Mask s, Mask t, int l, int k) {
  const Mask bl = (s >> l) & 1u, bk = (t >> k) & 1u;
  return {(s & ~(Mask{1} << l)) | (bk << l), (t & ~(Mask{1} << k)) | (bl << k)};
}

std::pair<SpinConfig, SpinConfig> exchange(const SpinConfig& s, const SpinConfig& t,
                                           int l, int k);

// Interaction, transport kernel and cached zero-field flip ratios.
class CollisionContext {
 public:
  CollisionContext(InteractionMatrix j, TransportKernel k);

  int sites() const { return n_; }
  const InteractionMatrix& interaction() const { return j_; }
  const TransportKernel& kernel() const { return k_; }
  const SitePartition& partition() const { return k_.components(); }
  // Zero-field log weights.
  const std::vector<double>& log_weights() const { return logw_; }

  // log mu_J(s with spin l flipped) - log mu_J(s)
  double flip_delta(Mask s, int l) const { return delta_[s * n_ + l]; }
  // exp(-flip_delta)
  double inverse_flip_ratio(Mask s, int l) const { return inv_ratio_[s * n_ + l]; }

  struct Entry {
    int l;
    int k;
    double weight;  // K(l,k) / n
  };
  // Nonzero kernel entries in row-major order.
  const std::vector<Entry>& entries() const { return entries_; }
  // entries() indices belonging to row l.
  const std::vector<int>& row_entries(int l) const { return rows_[l]; }

  // States with bit k equal to b, in increasing order, and their
  // inverse_flip_ratio at site k.
  const std::vector<Mask>& partners(int k, int b) const { return partners_[2 * k + b]; }
  const std::vector<double>& partner_inverse_ratio(int k, int b) const {
    return partner_inv_[2 * k + b];
  }
  // False when some flip ratio is too extreme for the product of ratios to
  // be evaluated without overflow.
  bool ratios_bounded() const { return bounded_; }

 private:
  int n_;
  InteractionMatrix j_;
  TransportKernel k_;
  std::vector<double> logw_;
  std::vector<double> delta_;
  std::vector<double> inv_ratio_;
  std::vector<Entry> entries_;
  std::vector<std::vector<int>> rows_;
  std::vector<std::vector<Mask>> partners_;
  std::vector<std::vector<double>> partner_inv_;
  bool bounded_ = true;
};

// Probability that the (l,k) exchange between s and t is accepted.
double acceptance_prob(const CollisionContext& ctx, int l, int k, Mask s, Mask t);
// Acceptance of swapping spins l and k inside a single configuration.
double diagonal_acceptance(const CollisionContext& ctx, int l, int k, Mask s);

enum class ProductMode {
  kReference,  // literal O(4^n n^2) sum, n <= 12
  kOptimized,  // gather form over moving pairs only
};

// Collision product on raw vectors (not necessarily normalized). `out` must
// have 2^n entries and must not alias p or q.
void collision_product_into(const CollisionContext& ctx, const std::vector<double>& p,
                            const std::vector<double>& q, std::vector<double>& out,
                            ProductMode mode = ProductMode::kOptimized,
                            const Execution& ex = {});

ProbVec collision_product(const CollisionContext& ctx, const ProbVec& p, const ProbVec& q,
                          ProductMode mode = ProductMode::kOptimized,
                          const Execution& ex = {});

// Outcomes (tau, tau') with their probabilities for an input pair, the
// no-change outcome included once.
struct PairOutcome {
  Mask first;
  Mask second;
  double prob;
};
std::vector<PairOutcome> pair_kernel(const CollisionContext& ctx, Mask s, Mask t);

// Largest detailed-balance violation of the two-configuration kernel with
// respect to mu_{J,h} x mu_{J,h}. h must be constant on the kernel components.
double check_detailed_balance(const CollisionContext& ctx, const FieldVector& h);

}  // namespace spinkac
