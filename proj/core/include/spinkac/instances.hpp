// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "spinkac/collision.hpp"
#include "spinkac/rng.hpp"
#include "spinkac/spin.hpp"

namespace spinkac {

// Random generators for test models.

// Symmetric J with zero diagonal and i.i.d. N(0, scale^2) couplings.
InteractionMatrix random_symmetric_interaction(int n, double scale, Rng& rng);

// Nonnegative definite J = c G G^T with largest eigenvalue `lambda`. The
// diagonal is kept.
InteractionMatrix random_psd_interaction(int n, double lambda, Rng& rng);

// Random partition of the sites into at most `max_blocks` nonempty blocks.
SitePartition random_partition(int n, int max_blocks, Rng& rng);

// Field constant on every block of `a`, block values uniform in [-scale, scale].
FieldVector random_block_field(const SitePartition& a, double scale, Rng& rng);

// Positive probability vector with log-weights N(0, spread^2).
ProbVec random_positive_measure(int n, double spread, Rng& rng);

// Product of independent spins with P(spin l = +1) = alpha[l].
ProbVec product_bernoulli(const std::vector<double>& alpha);

// Symmetric stochastic kernel with the given components: a random mixture
// of the block kernel, the identity and transposition kernels inside each
// block.
TransportKernel random_kernel_with_components(const SitePartition& a, Rng& rng);

double standard_normal(Rng& rng);

}  // namespace spinkac
