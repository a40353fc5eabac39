// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace spinkac {

// Off-diagonal rates of a continuous-time chain on an enumerated state
// space, compressed by rows with sorted columns.
struct SparseGenerator {
  std::size_t states = 0;
  std::vector<std::size_t> row_start;  // size states + 1
  std::vector<std::uint32_t> column;
  std::vector<double> rate;
};

// 1/2 sum_x pi(x) sum_y Q(x,y) (F(y) - F(x)) (G(y) - G(x)).
double dirichlet_form(const SparseGenerator& q, const std::vector<double>& pi,
                      const std::vector<double>& f, const std::vector<double>& g);

// Row-major dense generator with diagonal -sum of the row.
std::vector<double> dense_generator(const SparseGenerator& q);

// max |pi(x) Q(x,y) - pi(y) Q(y,x)|
double detailed_balance_residual(const SparseGenerator& q, const std::vector<double>& pi);

// True when every state reaches every other along positive rates.
bool is_irreducible(const SparseGenerator& q);

// Ent_pi F = pi[F log F] - pi[F] log pi[F] for F >= 0.
double entropy(const std::vector<double>& pi, const std::vector<double>& f);

// sum_x nu(x) log(nu(x) / pi(x)); entries of nu at or below zero count as 0.
double relative_entropy_on(const std::vector<double>& pi, const std::vector<double>& nu);

struct SpectralGap {
  double gap = 0.0;
  // Eigenfunction of -Q for `gap`, normalized in L2(pi).
  std::vector<double> eigenfunction;
};

// Smallest nonzero eigenvalue of -Q for a chain reversible w.r.t. pi, from
// the eigendecomposition of D^{1/2} Q D^{-1/2}. Dense, so states <= 5000.
SpectralGap spectral_gap(const SparseGenerator& q, const std::vector<double>& pi);

}  // namespace spinkac
