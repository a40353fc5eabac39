// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spinkac/dynamics.hpp"
#include "spinkac/execution.hpp"
#include "spinkac/markov.hpp"
#include "spinkac/spin.hpp"

namespace spinkac {

// Largest L for the enumerated Down-Up state space.
inline constexpr int kMaxDownUpSites = 22;

// Ising spins eta in {-1,+1}^L with weight exp(1/2 <eta, Lambda eta> +
// <w, eta>), restricted to sum_{i in B} eta_i = M_B for every block B.
// In the state masks bit i set means eta_i = +1 (a ball at site i).
class DuInstance {
 public:
  // Requires Lambda symmetric (L x L, row-major), |M_B| <= |B| and |B| + M_B
  // even for every block.
  DuInstance(int sites, std::vector<double> lambda, std::vector<double> field,
             SitePartition blocks, std::vector<int> magnetization);
  static DuInstance single_block(int sites, std::vector<double> lambda,
                                 std::vector<double> field, int magnetization);

  int sites() const { return l_; }
  double lambda(int i, int j) const { return lambda_[i * l_ + j]; }
  const std::vector<double>& lambda() const { return lambda_; }
  const std::vector<double>& field() const { return w_; }
  const SitePartition& blocks() const { return blocks_; }
  int magnetization(int b) const { return m_[b]; }
  const std::vector<int>& magnetizations() const { return m_; }
  // Number of balls (+1 spins) in block b: (|B| + M_B) / 2.
  int balls(int b) const;

  double log_weight(Mask eta) const;
  // Largest eigenvalue of Lambda.
  double largest_eigenvalue() const;

 private:
  int l_;
  std::vector<double> lambda_;
  std::vector<double> w_;
  SitePartition blocks_;
  std::vector<int> m_;
};

// Combinadic enumeration of Omega_{L,M}: the index mixes, block by block,
// the rank sum_t C(p_t, t) of the occupied local positions p_1 < ... < p_K.
class DuSpace {
 public:
  explicit DuSpace(const DuInstance& inst);

  std::size_t size() const { return size_; }
  Mask state(std::size_t index) const;
  // Index of a state in the space; DomainError otherwise.
  std::size_t rank(Mask eta) const;
  bool contains(Mask eta) const;

 private:
  std::vector<std::vector<int>> sites_;  // per block, ascending
  std::vector<int> balls_;
  std::vector<std::size_t> stride_;
  std::vector<std::size_t> count_;
  std::vector<Mask> block_mask_;
  std::size_t size_ = 0;
};

// Exact distribution on the enumerated space.
class DuMeasure {
 public:
  explicit DuMeasure(const DuInstance& inst);

  const DuInstance& instance() const { return inst_; }
  const DuSpace& space() const { return space_; }
  std::size_t size() const { return states_.size(); }
  Mask state(std::size_t x) const { return states_[x]; }
  const std::vector<Mask>& states() const { return states_; }
  double prob(std::size_t x) const { return prob_[x]; }
  const std::vector<double>& probs() const { return prob_; }

  // T_v: reweight by exp(<v, eta>) and renormalize on the same support.
  DuMeasure tilt(const std::vector<double>& v) const;
  // L x L covariance of the spins, row-major.
  std::vector<double> covariance() const;

 private:
  DuMeasure(const DuMeasure& base, const std::vector<double>& logp);

  DuInstance inst_;
  DuSpace space_;
  std::vector<Mask> states_;
  std::vector<double> prob_;
};

// c_B(eta, eta^{ij}): the probability that the ball at i moves to j among
// the holes of its block and i itself, proportional to the weight after the
// move. For j == i this is the probability of staying. Zero unless eta_i =
// +1, eta_j = -1 (or j == i) and i, j share a block.
double du_rates(const DuInstance& inst, Mask eta, int i, int j);

// Groups of states sharing everything but the position of one ball inside
// one block: each group is a configuration with that ball removed, and its
// members are the configurations obtained by placing the ball on any hole of
// the block.
struct BallGroups {
  std::vector<std::size_t> start;  // size groups + 1
  std::vector<std::uint32_t> members;

  std::size_t size() const { return start.size() - 1; }
};
BallGroups ball_groups(const DuMeasure& m);

// Groups of states with equal spins outside block B, over all blocks B.
BallGroups block_groups(const DuMeasure& m);

// Sparse generator of the Down-Up walk (stay moves omitted).
SparseGenerator du_generator(const DuMeasure& m);

// E^du(F, G) = sum over ball groups g of Z_g Cov_g(F, G).
double du_dirichlet_form(const DuMeasure& m, const BallGroups& g, const std::vector<double>& f,
                         const std::vector<double>& h);

// (1 - 2 lambda) for one block, (1 - 2 lambda)^2 otherwise.
double du_mlsi_constant(const DuInstance& inst);

struct DuScanResult {
  MlsiScanResult scan;
  double constant = 0.0;
  // Ratio at 1 + eps phi for the gap eigenfunction phi, which tends to twice
  // the spectral gap as eps -> 0. NaN when the space is too large.
  double gap = 0.0;
  double linearized_ratio = 0.0;
};

// Min of E^du(F, log F) / Ent(F) over mixtures of exponentials of random
// linear fields, smoothed Hamming-ball indicators, near point masses and
// near-constant functions, plus the gap eigenfunction probe.
DuScanResult du_mlsi_scan(const DuMeasure& m, int trials, std::uint64_t seed,
                          const Execution& ex = {});

struct FactorizationResult {
  double block_min_ratio = 0.0;  // sum_B nu[Ent_{nu_B} F] / Ent F
  double ball_min_ratio = 0.0;   // sum_g Z_g Ent_g F / Ent F
  double jensen_max_excess = 0.0;  // max_g (Ent_g F - Cov_g(F, log F))
  double constant = 0.0;           // 1 - 2 lambda
  int accepted = 0;
  int discarded = 0;
};

FactorizationResult factorization_check(const DuMeasure& m, int trials, std::uint64_t seed,
                                        const Execution& ex = {});

struct CovBoundResult {
  double max_eigenvalue = 0.0;
  double bound = 0.0;   // 2 / (1 - 2 lambda)
  double lambda = 0.0;  // after regularization
  bool regularized = false;
  int tilts = 0;
};

// Largest eigenvalue (Jacobi, tolerance 1e-12) of Cov[T_v nu] over v drawn
// from scaled Gaussians plus large deterministic tilts. A Lambda that is
// only semidefinite is treated as Lambda + 1e-9 I.
CovBoundResult cov_bound_check(const DuInstance& inst, int tilts, std::uint64_t seed,
                               const Execution& ex = {});

// Largest off-diagonal covariance. Requires Lambda = 0.
double strong_rayleigh_negcorr_check(const DuMeasure& m);

struct RelaxedCondition {
  double largest = 0.0;
  double second = 0.0;
  bool constant_top = false;  // Lambda 1 = largest * 1
  // The theorem hypothesis fails but would hold for the second eigenvalue.
  bool differs = false;
};
RelaxedCondition relaxed_condition(const DuInstance& inst);

struct BridgeResult {
  double min_ratio = 0.0;  // min over F of Ebar(F, log F) / E^du(F, log F)
  double constant = 0.0;   // exp(-8 (Jbar + hbar)) / 4
  bool hole_walk = false;  // compared with the walk of the flipped system
  int accepted = 0;
};

// Particle system of N particles with one block, fields h(i), and its
// Down-Up counterpart on L = N n sites with Lambda = diag(J, ..., J) and w
// the stacked fields. For M > 0 the walk of the flipped system eta -> -eta
// (holes moving instead of balls) is used.
BridgeResult bridge_check(const InteractionMatrix& j, const std::vector<FieldVector>& fields,
                          int plus_count, int trials, std::uint64_t seed,
                          const Execution& ex = {});

}  // namespace spinkac
