// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinkac/collision.hpp"
#include "spinkac/rng.hpp"

namespace spinkac {

// Finite rooted binary tree stored as the sorted set of its node paths. The
// root is the empty path; "01" is the right child of the left child.
class CollisionTree {
 public:
  // Root only.
  CollisionTree();
  // Throws DomainError unless the set is ancestor-closed and every node has
  // zero or two children.
  explicit CollisionTree(std::vector<std::string> nodes);

  static CollisionTree regular(int depth);

  const std::vector<std::string>& nodes() const { return nodes_; }
  // Leaves in lexicographic order of their paths.
  std::vector<std::string> leaves() const;
  std::size_t leaf_count() const { return (nodes_.size() + 1) / 2; }
  bool contains(const std::string& path) const;
  // Canonical shape with children ordered, e.g. "((..).)".
  std::string shape() const;

  bool operator==(const CollisionTree& o) const { return nodes_ == o.nodes_; }

 private:
  std::vector<std::string> nodes_;
};

// Branching tree at time t built from i.i.d. unit exponential passage times.
CollisionTree sample_tree(double t, Rng& rng);

// Collides the leaf measures up to the root. `leaves` holds one measure per
// leaf (lexicographic order) or a single measure used at every leaf.
ProbVec eval_tree(const CollisionContext& ctx, const CollisionTree& tree,
                  const std::vector<ProbVec>& leaves);

struct MonteCarloEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;  // standard error of each mean entry
  long samples = 0;
};

// Estimates p_t as the average of T_gamma(p0) over sampled branching trees.
// Work is split into a fixed number of replicas, replica r drawing from
// stream r of `seed`, so the result does not depend on the thread count.
MonteCarloEstimate mc_solution(const CollisionContext& ctx, const ProbVec& p0, double t,
                               long samples, std::uint64_t seed, const Execution& ex = {});

// Phi_k(p): k rounds of squaring under the collision product.
ProbVec discrete_iterate(const CollisionContext& ctx, const ProbVec& p, int k);

// Phi_u(p_1, ..., p_{2^u}) on the regular tree of depth u.
ProbVec discrete_iterate(const CollisionContext& ctx, const std::vector<ProbVec>& leaves);

// Fragment (A, x) of a marked partition. `mark` is -1 for the zero mark,
// otherwise a 0-based site.
struct Fragment {
  Mask sites = 0;
  int mark = -1;

  bool operator==(const Fragment& o) const { return sites == o.sites && mark == o.mark; }
};

struct MarkedPartition {
  int n = 0;
  std::vector<Fragment> fragments;

  static MarkedPartition initial(int n);
  // Throws DomainError describing the first violated property.
  void validate(const TransportKernel& k) const;
};

// One generation of the marked partition process.
MarkedPartition mpp_step(const MarkedPartition& state, const TransportKernel& k, Rng& rng);

// psi(p, C)(tau) for every tau.
std::vector<double> psi(const ProbVec& p, const Fragment& c);

// Product over fragments of psi(p_i, C_i).
std::vector<double> psi_product(const std::vector<ProbVec>& p, const MarkedPartition& c);

// First generation at which the unmarked fragment is empty.
int fragmentation_time(int n, Rng& rng);

struct FragmentationTail {
  std::vector<int> u;
  std::vector<double> empirical;  // P(H >= u)
  std::vector<double> std_error;
  std::vector<double> bound;      // n exp(-u / 2n)
  double mean = 0.0;
};

FragmentationTail fragmentation_tail(int n, long runs, std::uint64_t seed, int max_u);

struct RepresentationCheck {
  std::vector<double> exact;     // Phi^0_u(p_1, ..., p_{2^u})
  std::vector<double> estimate;  // average of Psi over runs
  std::vector<double> std_error;
  double max_deviation = 0.0;
  double max_z = 0.0;            // largest |estimate - exact| / stderr
  long runs = 0;
};

// Compares the Monte Carlo average of Psi(p, C^u) with the exact discrete
// iterate. Requires J = 0.
RepresentationCheck mpp_representation_check(const CollisionContext& ctx,
                                             const std::vector<ProbVec>& p, int u, long runs,
                                             std::uint64_t seed);

}  // namespace spinkac
