// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "spinkac/spin.hpp"

namespace spinkac {

// A nonnegative real or +infinity.
class ExtendedReal {
 public:
  explicit ExtendedReal(double v) : value_(v), finite_(true) {}
  static ExtendedReal infinity() { return ExtendedReal(); }

  bool is_finite() const { return finite_; }
  // Throws DomainError when infinite.
  double value() const;

 private:
  ExtendedReal() : value_(0.0), finite_(false) {}
  double value_;
  bool finite_;
};

// Energy 1/2 sum J_ij s_i s_j + sum h_i s_i for every configuration.
std::vector<double> log_weights(const InteractionMatrix& j, const FieldVector& h);

// exp(logw - max) normalized to a probability vector.
ProbVec normalize_log_weights(int n, const std::vector<double>& logw);

ProbVec gibbs_measure(const InteractionMatrix& j, const FieldVector& h);

// Expected spin at every site. Works on unnormalized weights too.
std::vector<double> site_magnetizations(int n, const std::vector<double>& w);

// Block averages of the site magnetizations.
std::vector<double> magnetization_profile(const ProbVec& p, const SitePartition& a);
std::vector<double> magnetization_profile(int n, const std::vector<double>& w,
                                          const SitePartition& a);

struct TiltOptions {
  double tolerance = 1e-12;  // max-norm of the moment residual
  int max_iterations = 200;
  int max_halvings = 60;
};

// Finds theta (one entry per block) such that the measure proportional to
//   exp(base_logw(s) + sum_A theta_A * mean_{l in A} s_l)
// has block magnetizations equal to `target`. Damped Newton on the convex
// log-partition function. `initial` may be empty (zero start).
std::vector<double> solve_block_tilt(int n, const std::vector<double>& base_logw,
                                     const SitePartition& a,
                                     const std::vector<double>& target,
                                     std::vector<double> initial = {},
                                     const TiltOptions& opts = {});

// The unique field constant on blocks of A whose Gibbs measure has block
// magnetizations `target`. Throws DomainError for targets on the boundary
// and NumericError (with residual) when Newton fails.
FieldVector solve_field(const InteractionMatrix& j, const SitePartition& a,
                        const std::vector<double>& target, const TiltOptions& opts = {});

ExtendedReal relative_entropy(const ProbVec& p, const ProbVec& q);
double tv_distance(const ProbVec& p, const ProbVec& q);

// Marginal of `w` on the sites of `subset`: entry s & subset holds the total
// weight of configurations agreeing with s on the subset. Other entries are 0.
std::vector<double> marginal_table(const std::vector<double>& w, Mask subset);

}  // namespace spinkac
