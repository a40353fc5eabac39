// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/instances.hpp"

#include <algorithm>
#include <cmath>

#include "spinkac/error.hpp"
#include "spinkac/linalg.hpp"

namespace spinkac {

double standard_normal(Rng& rng) {
  // Box-Muller on 53-bit uniforms; std::normal_distribution differs between
  // standard libraries.
  double u = uniform01(rng);
  while (u == 0.0) u = uniform01(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

InteractionMatrix random_symmetric_interaction(int n, double scale, Rng& rng) {
  check_sites(n);
  std::vector<double> j(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double v = scale * standard_normal(rng);
      j[a * n + b] = v;
      j[b * n + a] = v;
    }
  }
  return InteractionMatrix(n, std::move(j));
}

InteractionMatrix random_psd_interaction(int n, double lambda, Rng& rng) {
  check_sites(n);
  if (lambda < 0.0) throw DomainError("target eigenvalue must be nonnegative");
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  for (double& x : g) x = standard_normal(rng);
  std::vector<double> j(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= a; ++b) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) s += g[a * n + c] * g[b * n + c];
      j[a * n + b] = s;
      j[b * n + a] = s;
    }
  }
  const double top = largest_eigenvalue(j, n);
  const double c = top > 0.0 ? lambda / top : 0.0;
  for (double& x : j) x *= c;
  return InteractionMatrix(n, std::move(j));
}

SitePartition random_partition(int n, int max_blocks, Rng& rng) {
  check_sites(n);
  const int k = 1 + uniform_int(rng, std::max(1, std::min(n, max_blocks)));
  std::vector<int> label(n);
  // Every block gets at least one site.
  for (int l = 0; l < n; ++l) label[l] = l < k ? l : uniform_int(rng, k);
  std::shuffle(label.begin(), label.end(), rng);
  std::vector<std::vector<int>> blocks(k);
  for (int l = 0; l < n; ++l) blocks[label[l]].push_back(l);
  return SitePartition(n, std::move(blocks));
}

FieldVector random_block_field(const SitePartition& a, double scale, Rng& rng) {
  std::vector<double> h(a.sites());
  for (int b = 0; b < a.size(); ++b) {
    const double v = scale * (2.0 * uniform01(rng) - 1.0);
    for (int l : a.block(b)) h[l] = v;
  }
  return FieldVector(std::move(h));
}

ProbVec random_positive_measure(int n, double spread, Rng& rng) {
  check_sites(n);
  std::vector<double> w(state_count(n));
  for (double& x : w) x = std::exp(spread * standard_normal(rng));
  return ProbVec::normalized(n, std::move(w));
}

ProbVec product_bernoulli(const std::vector<double>& alpha) {
  const int n = static_cast<int>(alpha.size());
  check_sites(n);
  std::vector<double> w(state_count(n), 1.0);
  for (std::size_t s = 0; s < w.size(); ++s) {
    for (int l = 0; l < n; ++l) w[s] *= ((s >> l) & 1u) ? alpha[l] : 1.0 - alpha[l];
  }
  return ProbVec::normalized(n, std::move(w));
}

TransportKernel random_kernel_with_components(const SitePartition& a, Rng& rng) {
  const int n = a.sites();
  std::vector<double> k(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& block : a.blocks()) {
    const int m = static_cast<int>(block.size());
    if (m == 1) {
      k[block[0] * n + block[0]] = 1.0;
      continue;
    }
    // Weight on the block kernel stays positive so the block is irreducible.
    const double wb = 0.2 + 0.8 * uniform01(rng);
    const double wi = (1.0 - wb) * uniform01(rng);
    const double wt = 1.0 - wb - wi;
    const int x = block[uniform_int(rng, m)];
    int y = block[uniform_int(rng, m - 1)];
    if (y == x) y = block[m - 1];
    for (int u : block) {
      for (int v : block) k[u * n + v] += wb / m;
      k[u * n + u] += wi;
    }
    // Transposition of x and y, identity elsewhere in the block.
    for (int u : block) {
      const int image = u == x ? y : (u == y ? x : u);
      k[u * n + image] += wt;
    }
  }
  // Symmetrize exactly.
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double s = 0.5 * (k[u * n + v] + k[v * n + u]);
      k[u * n + v] = s;
      k[v * n + u] = s;
    }
  }
  return TransportKernel::from_matrix(n, std::move(k));
}

}  // namespace spinkac
