// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spinkac/collision.hpp"
#include "spinkac/dynamics.hpp"
#include "spinkac/execution.hpp"
#include "spinkac/markov.hpp"
#include "spinkac/rng.hpp"
#include "spinkac/spin.hpp"

namespace spinkac {

// Largest N*n handled by enumerating Omega_{N,rho}.
inline constexpr int kMaxEnumeratedSites = 22;
// Largest N*n for dense generator algebra (matrix exponentials).
inline constexpr int kMaxDenseSites = 12;

// A density profile rho in D_{A,N}, stored as the number N|A|rho(A) of +
// spins in each stripe [N] x A.
class DensityProfile {
 public:
  DensityProfile(SitePartition a, int particles, std::vector<int> plus_counts);
  // Throws DomainError unless every N|A|rho(A) is within 1e-9 of an integer.
  static DensityProfile from_densities(SitePartition a, int particles,
                                       const std::vector<double>& rho);
  // All of D_{A,N}, counts in lexicographic order.
  static std::vector<DensityProfile> all(const SitePartition& a, int particles);

  const SitePartition& partition() const { return a_; }
  int particles() const { return n_particles_; }
  int plus_count(int b) const { return plus_[b]; }
  const std::vector<int>& plus_counts() const { return plus_; }
  int stripe_size(int b) const {
    return n_particles_ * static_cast<int>(a_.block(b).size());
  }
  double density(int b) const;
  // (2 rho(A) - 1) N |A|
  int block_sum(int b) const { return 2 * plus_[b] - stripe_size(b); }

  bool operator==(const DensityProfile& o) const {
    return a_ == o.a_ && n_particles_ == o.n_particles_ && plus_ == o.plus_;
  }

 private:
  SitePartition a_;
  int n_particles_;
  std::vector<int> plus_;
};

// N particles of n spins each.
struct ParticleState {
  int sites = 0;
  std::vector<Mask> configs;

  int particles() const { return static_cast<int>(configs.size()); }
};

// Number of + spins in every stripe [N] x A.
std::vector<int> stripe_plus_counts(const ParticleState& s, const SitePartition& a);
bool satisfies(const ParticleState& s, const DensityProfile& rho);
// Uniform member of Omega_{N,rho}.
ParticleState random_state(int n, const DensityProfile& rho, Rng& rng);

// Particle i occupies bits [i n, (i+1) n) of the packed key. N n <= 32.
Mask pack(const ParticleState& s);
ParticleState unpack(Mask key, int n, int particles);

// The configuration after exchanging spin l of particle i with spin k of
// particle j (a swap inside particle i when i == j), on packed keys.
Mask exchange_key(Mask key, int n, int i, int l, int j, int k);

// Multi-canonical measure: the product of mu_{J,h(i)} restricted to
// Omega_{N,rho}, enumerated over packed keys in increasing order.
class CanonicalMeasure {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // `fields` is empty (zero field) or holds one vector per particle.
  // Requires N n <= kMaxEnumeratedSites.
  CanonicalMeasure(const InteractionMatrix& j, std::vector<FieldVector> fields,
                   const DensityProfile& rho);

  int sites() const { return n_; }
  int particles() const { return rho_.particles(); }
  const DensityProfile& profile() const { return rho_; }
  const InteractionMatrix& interaction() const { return j_; }
  std::size_t size() const { return keys_.size(); }
  Mask key(std::size_t x) const { return keys_[x]; }
  const std::vector<Mask>& keys() const { return keys_; }
  double prob(std::size_t x) const { return prob_[x]; }
  const std::vector<double>& probs() const { return prob_; }
  // Index of a packed key, or npos outside Omega_{N,rho}.
  std::size_t index_of(Mask key) const;
  // log mu_{J,h(i)}(s) up to the normalization of particle i.
  double particle_log_weight(int i, Mask s) const {
    return logw_[fields_.empty() ? 0 : i][s];
  }
  // max_{i,l} |h_l(i)|
  double max_field() const;

 private:
  int n_;
  InteractionMatrix j_;
  std::vector<FieldVector> fields_;
  DensityProfile rho_;
  std::vector<std::vector<double>> logw_;
  std::vector<Mask> keys_;
  std::vector<double> prob_;
};

// Rates of L_N: (1/(N n)) sum over ordered particle pairs (i, j), i == j
// included, and kernel entries of K(l,k) times the acceptance p-hat.
// The context interaction must be the measure's.
SparseGenerator particle_generator(const CollisionContext& ctx, const CanonicalMeasure& m);

// Rates (1/(N n)) sum over (i, j) and all site pairs (l, k) of
// r = mu(sigma') / (mu(sigma) + mu(sigma')) for the measure's own fields.
// Requires a single-block profile.
SparseGenerator field_aware_generator(const CanonicalMeasure& m);

// The Dirichlet form of L_N summed move by move without storing the
// generator; valid up to N n = kMaxEnumeratedSites. For a stored generator
// use dirichlet_form(q, m.probs(), f, g).
double dirichlet_form(const CollisionContext& ctx, const CanonicalMeasure& m,
                      const std::vector<double>& f, const std::vector<double>& g);

struct ParticleDecay {
  std::vector<double> times;
  std::vector<double> entropy;  // H(nu_t | mu)
  std::vector<std::vector<double>> states;
  double negative_mass = 0.0;  // largest rounding undershoot clipped to zero
};

// nu_t = nu_0 exp(t L) by the eigendecomposition of the symmetrized
// generator. Requires N n <= kMaxDenseSites.
ParticleDecay particle_entropy_decay(const SparseGenerator& q, const CanonicalMeasure& m,
                                     const std::vector<double>& nu0,
                                     const std::vector<double>& times);

// Min of E(F, log F) / Ent(F) over random positive F on Omega_{N,rho}:
// Gaussian log-fields at several scales, smoothed point masses and
// near-constant functions. Sample i uses stream i of `seed`.
MlsiScanResult particle_mlsi_scan(const SparseGenerator& q, const CanonicalMeasure& m,
                                  int trials, std::uint64_t seed, const Execution& ex = {});

struct KacOptions {
  double record_interval = 1.0;
  // When set (N n <= kMaxDenseSites), the TV distance between the time
  // average occupation and this measure is recorded at every record time.
  const CanonicalMeasure* equilibrium = nullptr;
};

struct KacRun {
  std::vector<double> times;
  std::vector<std::uint64_t> events;        // events fired up to each time
  std::vector<std::vector<int>> block_sums;  // per record time
  std::vector<double> occupation_tv;         // empty without an equilibrium
  ParticleState final_state;
  std::uint64_t total_events = 0;
  std::uint64_t accepted = 0;
};

// Kinetic Monte Carlo of the particle chain: events at total rate N, the
// ordered pair (i, j) uniform, l uniform, k ~ K(l, .), acceptance p-hat.
// The stripe counts are checked against rho after every event.
KacRun simulate_particles(const CollisionContext& ctx, const ParticleState& init,
                          const DensityProfile& rho, double t_end, Rng& rng,
                          const KacOptions& opts = {});

}  // namespace spinkac
