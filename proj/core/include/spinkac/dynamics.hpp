// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spinkac/collision.hpp"
#include "spinkac/error.hpp"
#include "spinkac/gibbs.hpp"
#include "spinkac/rng.hpp"

namespace spinkac {

struct EvolveOptions {
  int store_stride = 1;  // keep every k-th step (the last step is always kept)
  ProductMode mode = ProductMode::kOptimized;
  Execution execution;
  double max_drift = 1e-10;  // renormalization drift tolerated per step
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ProbVec> states;
  // Equilibrium with the conserved profile of p0.
  FieldVector field{0};
  ProbVec equilibrium = ProbVec::uniform(1);
  SitePartition partition = SitePartition::whole(1);
  std::vector<double> initial_profile;
  // Monitored over every step, stored or not.
  double max_mass_error = 0.0;
  double max_profile_drift = 0.0;
  int rejected_steps = 0;
};

// Integrates dp/dt = p o p - p with classical RK4. Throws PreconditionError
// when some block of p0 is fully magnetized.
Trajectory evolve(const CollisionContext& ctx, const ProbVec& p0, double t_end, double dt,
                  const EvolveOptions& opts = {});

// Entropy dissipation of the density f (indexed like the cube) with respect
// to mu. Infinite when a move connects a zero product to a positive one.
ExtendedReal dissipation(const CollisionContext& ctx, const std::vector<double>& f,
                         const ProbVec& mu);

// Density p / mu.
std::vector<double> density(const ProbVec& p, const ProbVec& mu);

struct RateBound {
  bool applicable = false;
  double value = 0.0;
  double lambda = 0.0;  // largest eigenvalue of J
  double jbar = 0.0;    // max_i sum_j |J_ij|
  std::string reason;   // why the bound does not apply
};

// (1/4n)(1 - 2 lambda)^2 exp(-16 jbar) for nonnegative definite J with
// lambda < 1/2.
RateBound alpha_bound(const InteractionMatrix& j);

struct DecayReport {
  std::vector<double> times;
  std::vector<double> entropy;      // H(p_t | mu)
  std::vector<double> dissipation;  // +inf encoded as infinity()
  std::vector<double> tv;           // tv(p_t, mu)
  std::vector<double> tv_bound;     // sqrt(C n / 2) exp(-alpha t / 2), empty if inapplicable
  std::vector<double> pinsker;      // sqrt(H / 2)
  RateBound bound;
  bool entropy_vanishes = false;    // H below the noise floor everywhere
  double alpha_fit = 0.0;
  int fit_samples = 0;
};

// Fits the exponential decay rate of H(p_t | mu). Throws FitError when fewer
// than five samples survive the window (unless H vanishes identically).
DecayReport decay_report(const CollisionContext& ctx, const Trajectory& traj,
                         bool with_dissipation = true);

// Max-norm of p o p - p.
double stationarity_residual(const CollisionContext& ctx, const ProbVec& p,
                             ProductMode mode = ProductMode::kOptimized);

struct MlsiScanResult {
  double min_ratio = 0.0;
  double median_ratio = 0.0;
  int accepted = 0;
  int discarded = 0;
  std::vector<double> ratios;  // in sample order
};

// Min and median over the non-NaN entries; NaN marks a discarded sample.
MlsiScanResult summarize_ratios(const std::vector<double>& ratio);

// Minimum of D_mu(f) / mu[f log f] over random positive densities with the
// same block magnetizations as mu = mu_{J,h}. Sample i uses stream i of `seed`.
MlsiScanResult nonlinear_mlsi_scan(const CollisionContext& ctx, const FieldVector& h,
                                   int trials, std::uint64_t seed, const Execution& ex = {});

}  // namespace spinkac
