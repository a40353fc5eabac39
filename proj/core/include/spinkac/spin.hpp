// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace spinkac {

// Largest cube dimension handled by dense enumeration.
inline constexpr int kMaxSites = 24;

// A configuration of n spins packed into an integer: bit l set means spin l is +1.
using Mask = std::uint32_t;

inline int spin_of(Mask bits, int site) {
  return ((bits >> site) & 1u) ? 1 : -1;
}

inline std::size_t state_count(int n) { return std::size_t{1} << n; }

// Validates 1 <= n <= kMaxSites.
void check_sites(int n);

class SpinConfig {
 public:
  SpinConfig(Mask bits, int n);

  Mask bits() const { return bits_; }
  int size() const { return n_; }
  int spin(int site) const;
  SpinConfig flipped(int site) const;
  SpinConfig with_spin(int site, int value) const;
  std::string to_string() const;  // e.g. "+-+", site 0 first

  bool operator==(const SpinConfig& o) const {
    return bits_ == o.bits_ && n_ == o.n_;
  }

 private:
  Mask bits_;
  int n_;
};

// Partition of the sites {0,...,n-1} into nonempty disjoint blocks. Blocks are
// stored in canonical order (sorted sites, blocks ordered by smallest site).
class SitePartition {
 public:
  SitePartition(int n, std::vector<std::vector<int>> blocks);
  static SitePartition singletons(int n);
  static SitePartition whole(int n);

  int sites() const { return n_; }
  int size() const { return static_cast<int>(blocks_.size()); }
  const std::vector<int>& block(int b) const { return blocks_[b]; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  int block_of(int site) const { return owner_[site]; }
  Mask mask(int b) const { return masks_[b]; }

  bool operator==(const SitePartition& o) const {
    return n_ == o.n_ && blocks_ == o.blocks_;
  }

 private:
  int n_;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> owner_;
  std::vector<Mask> masks_;
};

// Symmetric n x n interaction matrix, stored row-major.
class InteractionMatrix {
 public:
  explicit InteractionMatrix(int n);
  // Throws DomainError naming the first (i,j) pair (1-based) with
  // entries(i,j) != entries(j,i).
  InteractionMatrix(int n, std::vector<double> entries);

  int size() const { return n_; }
  double operator()(int i, int j) const { return a_[i * n_ + j]; }
  const std::vector<double>& entries() const { return a_; }

  double largest_eigenvalue() const;
  double smallest_eigenvalue() const;
  // max_i sum_j |J(i,j)|
  double max_abs_row_sum() const;
  bool is_zero() const;

 private:
  int n_;
  std::vector<double> a_;
};

class FieldVector {
 public:
  explicit FieldVector(int n) : h_(n, 0.0) {}
  explicit FieldVector(std::vector<double> h) : h_(std::move(h)) {}

  int size() const { return static_cast<int>(h_.size()); }
  double operator[](int i) const { return h_[i]; }
  const std::vector<double>& values() const { return h_; }

  // True when h is exactly constant on every block of A.
  bool constant_on(const SitePartition& a) const;
  double max_abs() const;

 private:
  std::vector<double> h_;
};

// Probability vector over the 2^n configurations, indexed by Mask.
class ProbVec {
 public:
  // Requires nonnegative entries summing to 1 within 1e-12.
  ProbVec(int n, std::vector<double> weights);

  static ProbVec uniform(int n);
  static ProbVec point_mass(int n, Mask state);
  // Rescales nonnegative weights with positive total.
  static ProbVec normalized(int n, std::vector<double> weights);

  int sites() const { return n_; }
  std::size_t size() const { return w_.size(); }
  double operator[](Mask s) const { return w_[s]; }
  const std::vector<double>& weights() const { return w_; }
  bool strictly_positive() const;

 private:
  ProbVec() = default;
  int n_ = 0;
  std::vector<double> w_;
};

}  // namespace spinkac
