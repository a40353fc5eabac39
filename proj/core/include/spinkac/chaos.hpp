// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "spinkac/collision.hpp"
#include "spinkac/kac.hpp"
#include "spinkac/spin.hpp"

namespace spinkac {

// True when, for every block A, some value S of the block-sum vector
// M = (sum_{l in A} sigma_l)_A has nu(M = S) > 0 and nu(M = S + 2 e_A) > 0.
// Otherwise the first failing block is stored in *failing_block.
bool is_irreducible(const ProbVec& nu, const SitePartition& a, int* failing_block = nullptr);

// Throws PreconditionError naming the failing block and its sites (1-based).
void require_irreducible(const ProbVec& nu, const SitePartition& a);

// rho(A) = floor(N|A|(1 + m(A, nu))/2) / (N|A|). The floor argument gets a
// 1e-9 allowance so that exact integers survive rounding in m.
DensityProfile canonical_density(const ProbVec& nu, int particles, const SitePartition& a);

// Log-domain law of the summed stripe plus-count vector of m independent
// particles with law nu, built by convolving one particle at a time.
class ProfileLattice {
 public:
  // Snapshots are kept for the particle counts listed in `keep` (all <=
  // max_particles).
  ProfileLattice(const ProbVec& nu, const SitePartition& a, int max_particles,
                 const std::vector<int>& keep);

  const SitePartition& partition() const { return a_; }
  // log P(plus counts = c) after m particles; -inf when impossible or out of
  // range. Throws DomainError when m was not kept.
  double log_prob(int m, const std::vector<int>& c) const;
  // Support of one particle: plus-count vectors and their log probabilities.
  const std::vector<std::vector<int>>& atoms() const { return atoms_; }
  const std::vector<double>& atom_log_probs() const { return atom_logp_; }
  // Every plus-count vector reachable with m particles, with its log
  // probability (m must be kept).
  std::vector<std::pair<std::vector<int>, double>> support(int m) const;

 private:
  struct Layer {
    int m;
    std::vector<int> dims;
    std::vector<double> logp;
  };
  const Layer& layer(int m) const;

  SitePartition a_;
  std::vector<std::vector<int>> atoms_;
  std::vector<double> atom_logp_;
  std::vector<Layer> layers_;
};

// Plus-count vector of one configuration.
std::vector<int> plus_counts(Mask s, const SitePartition& a);

// log nu^{(x) N}(Omega_{N,rho})
double log_restricted_mass(const ProbVec& nu, const DensityProfile& rho);

struct LocalCltComparison {
  double mass = 0.0;      // nu^{(x) N}(Omega_{N,rho})
  double gaussian = 0.0;  // 2^{|A|} exp(-|z|^2/2) / ((2 pi N)^{|A|/2} sqrt(det V))
  double ratio = 0.0;     // mass / gaussian
  double z_squared = 0.0;
  double det_cov = 0.0;
};

// The restricted mass against its lattice Gaussian approximation. The
// block sums move in steps of 2, hence the factor 2^{|A|}.
LocalCltComparison local_clt(const ProbVec& nu, const DensityProfile& rho);

struct ChaosRow {
  int particles = 0;
  std::vector<int> plus_counts;  // canonical density times N|A|
  double tv = 0.0;               // || P_k gamma_N(nu) - nu^{(x) k} ||_TV
  double log_mass = 0.0;         // log nu^{(x) N}(Omega_{N,rho})
  double clt_ratio = 0.0;
  double entropy_per_particle = 0.0;  // (1/N) H_N(gamma_N(nu) | gamma_N(ref))
  double entropy_gap = 0.0;           // |entropy_per_particle - H(nu | ref)|
};

struct ChaosReport {
  int k = 1;
  std::vector<ChaosRow> rows;
  // Least-squares slope of log tv against log N over rows with tv > 0.
  double tv_slope = 0.0;
  // H(nu | ref); NaN without a reference.
  double relative_entropy = 0.0;
};

// Marginal chaos, restricted masses and (with `reference`) entropic chaos
// along a grid of particle counts. Both measures must be irreducible;
// the reference must share nu's block magnetizations and dominate nu.
ChaosReport chaos_scan(const ProbVec& nu, const SitePartition& a, int k,
                       const std::vector<int>& n_grid, const ProbVec* reference = nullptr);

struct FisherRow {
  int particles = 0;
  std::size_t states = 0;
  double value = 0.0;   // (1/N) E_N(F_N, log F_N)
  double target = 0.0;  // 2 D_mu(f)
  double gap = 0.0;
};

// F_N = gamma_N(f mu) / gamma_N(mu) evaluated exactly on Omega_{N,rho} for
// mu = mu_{J,h}, h constant on the components of K. f must be positive,
// lie in S_h and make f mu irreducible. N n <= kMaxEnumeratedSites per grid point.
std::vector<FisherRow> fisher_chaos_check(const CollisionContext& ctx, const FieldVector& h,
                                          const std::vector<double>& f,
                                          const std::vector<int>& n_grid);

}  // namespace spinkac
