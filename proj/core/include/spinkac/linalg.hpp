// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace spinkac {

// Dense row-major symmetric matrix helpers used for small (n <= a few dozen)
// spectral computations.

struct SymmetricEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column j (stride n) is the eigenvector of values[j]
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
// tol times the matrix norm. `a` is n x n row-major and must be symmetric.
SymmetricEigen jacobi_eigen(std::vector<double> a, int n, double tol = 1e-12);

double largest_eigenvalue(const std::vector<double>& a, int n);
double smallest_eigenvalue(const std::vector<double>& a, int n);

// Solves the symmetric positive definite system A x = b by Cholesky.
// Returns false when A is not numerically positive definite.
bool cholesky_solve(const std::vector<double>& a, int n,
                    const std::vector<double>& b, std::vector<double>& x);

}  // namespace spinkac
