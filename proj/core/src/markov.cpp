// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/markov.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "spinkac/error.hpp"

namespace spinkac {

namespace {

constexpr std::size_t kMaxDenseStates = 5000;

void check_lengths(const SparseGenerator& q, const std::vector<double>& pi) {
  if (pi.size() != q.states) throw DomainError("measure length does not match the generator");
}

}  // namespace

double dirichlet_form(const SparseGenerator& q, const std::vector<double>& pi,
                      const std::vector<double>& f, const std::vector<double>& g) {
  check_lengths(q, pi);
  if (f.size() != q.states || g.size() != q.states) {
    throw DomainError("function length does not match the state space");
  }
  double sum = 0.0;
  for (std::size_t x = 0; x < q.states; ++x) {
    double row = 0.0;
    for (std::size_t e = q.row_start[x]; e < q.row_start[x + 1]; ++e) {
      const std::size_t y = q.column[e];
      row += q.rate[e] * (f[y] - f[x]) * (g[y] - g[x]);
    }
    sum += pi[x] * row;
  }
  return 0.5 * sum;
}

std::vector<double> dense_generator(const SparseGenerator& q) {
  const std::size_t s = q.states;
  if (s > kMaxDenseStates) {
    throw CapacityError("dense generator limited to " + std::to_string(kMaxDenseStates) +
                        " states");
  }
  std::vector<double> a(s * s, 0.0);
  for (std::size_t x = 0; x < s; ++x) {
    double out = 0.0;
    for (std::size_t e = q.row_start[x]; e < q.row_start[x + 1]; ++e) {
      a[x * s + q.column[e]] += q.rate[e];
      out += q.rate[e];
    }
    a[x * s + x] -= out;
  }
  return a;
}

double detailed_balance_residual(const SparseGenerator& q, const std::vector<double>& pi) {
  check_lengths(q, pi);
  double worst = 0.0;
  for (std::size_t x = 0; x < q.states; ++x) {
    for (std::size_t e = q.row_start[x]; e < q.row_start[x + 1]; ++e) {
      const std::size_t y = q.column[e];
      const auto b = q.column.begin() + static_cast<std::ptrdiff_t>(q.row_start[y]);
      const auto end = q.column.begin() + static_cast<std::ptrdiff_t>(q.row_start[y + 1]);
      const auto it = std::lower_bound(b, end, static_cast<std::uint32_t>(x));
      const double back = (it != end && *it == x) ? q.rate[it - q.column.begin()] : 0.0;
      worst = std::max(worst, std::abs(pi[x] * q.rate[e] - pi[y] * back));
    }
  }
  return worst;
}

bool is_irreducible(const SparseGenerator& q) {
  if (q.states == 0) return false;
  // Forward reachability from state 0 on the support graph and on its
  // reverse.
  std::vector<std::vector<std::uint32_t>> reverse(q.states);
  for (std::size_t x = 0; x < q.states; ++x) {
    for (std::size_t e = q.row_start[x]; e < q.row_start[x + 1]; ++e) {
      if (q.rate[e] > 0.0) reverse[q.column[e]].push_back(static_cast<std::uint32_t>(x));
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<char> seen(q.states, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      auto visit = [&](std::size_t y) {
        if (!seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
      };
      if (pass == 0) {
        for (std::size_t e = q.row_start[x]; e < q.row_start[x + 1]; ++e) {
          if (q.rate[e] > 0.0) visit(q.column[e]);
        }
      } else {
        for (std::uint32_t y : reverse[x]) visit(y);
      }
    }
    if (count != q.states) return false;
  }
  return true;
}

double entropy(const std::vector<double>& pi, const std::vector<double>& f) {
  if (f.size() != pi.size()) throw DomainError("function length does not match the measure");
  double mean = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x) mean += pi[x] * f[x];
  if (mean <= 0.0) return 0.0;
  // Termwise nonnegative form m ((1 + d) log(1 + d) - d), d = f/m - 1, which
  // keeps its digits for nearly constant f.
  double ent = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    const double d = (f[x] - mean) / mean;
    const double t = f[x] > 0.0 ? (1.0 + d) * std::log1p(d) - d : 1.0;
    ent += pi[x] * mean * t;
  }
  return ent;
}

double relative_entropy_on(const std::vector<double>& pi, const std::vector<double>& nu) {
  if (nu.size() != pi.size()) throw DomainError("distribution length does not match");
  double h = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    if (nu[x] > 0.0) h += nu[x] * std::log(nu[x] / pi[x]);
  }
  return h;
}

SpectralGap spectral_gap(const SparseGenerator& q, const std::vector<double>& pi) {
  check_lengths(q, pi);
  if (q.states < 2) throw DomainError("spectral gap needs at least two states");
  const auto dense = dense_generator(q);
  const auto s = static_cast<Eigen::Index>(q.states);
  Eigen::VectorXd root(s);
  for (Eigen::Index x = 0; x < s; ++x) root[x] = std::sqrt(pi[static_cast<std::size_t>(x)]);
  Eigen::MatrixXd sym(s, s);
  for (Eigen::Index x = 0; x < s; ++x) {
    for (Eigen::Index y = 0; y < s; ++y) {
      sym(x, y) = -root[x] * dense[static_cast<std::size_t>(x * s + y)] / root[y];
    }
  }
  sym = (0.5 * (sym + sym.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  SpectralGap out;
  out.gap = eig.eigenvalues()[1];
  out.eigenfunction.resize(q.states);
  for (Eigen::Index x = 0; x < s; ++x) {
    out.eigenfunction[static_cast<std::size_t>(x)] = eig.eigenvectors()(x, 1) / root[x];
  }
  return out;
}

}  // namespace spinkac
