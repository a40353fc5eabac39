// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

// Slow, direct implementations used as independent oracles. They share no
// code with the library beyond the plain data types.

#pragma once

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

namespace brute {

inline int spin(unsigned s, int l) { return ((s >> l) & 1u) ? 1 : -1; }

inline double energy(const std::vector<double>& j, const std::vector<double>& h, int n,
                     unsigned s) {
  double e = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) e += 0.5 * j[a * n + b] * spin(s, a) * spin(s, b);
    e += h[a] * spin(s, a);
  }
  return e;
}

inline std::vector<double> gibbs(const std::vector<double>& j, const std::vector<double>& h,
                                 int n) {
  std::vector<double> w(1u << n);
  double z = 0.0;
  for (unsigned s = 0; s < w.size(); ++s) {
    w[s] = std::exp(energy(j, h, n, s));
    z += w[s];
  }
  for (double& x : w) x /= z;
  return w;
}

inline unsigned set_spin(unsigned s, int l, int v) {
  return v > 0 ? (s | (1u << l)) : (s & ~(1u << l));
}

// Full two-configuration kernel Q(s,t; u,v) as a sparse map.
inline std::map<std::pair<unsigned, unsigned>, double> pair_kernel(
    const std::vector<double>& j, const std::vector<double>& k, int n, unsigned s,
    unsigned t) {
  std::vector<double> zero(n, 0.0);
  auto w = [&](unsigned x) { return std::exp(energy(j, zero, n, x)); };
  std::map<std::pair<unsigned, unsigned>, double> out;
  for (int l = 0; l < n; ++l) {
    for (int kk = 0; kk < n; ++kk) {
      const double weight = k[l * n + kk] / n;
      if (weight == 0.0) continue;
      unsigned u = set_spin(s, l, spin(t, kk));
      unsigned v = set_spin(t, kk, spin(s, l));
      const double a = w(u) * w(v) / (w(s) * w(t) + w(u) * w(v));
      out[{u, v}] += weight * a;
      out[{s, t}] += weight * (1.0 - a);
    }
  }
  return out;
}

inline std::vector<double> collision_product(const std::vector<double>& j,
                                             const std::vector<double>& k, int n,
                                             const std::vector<double>& p,
                                             const std::vector<double>& q) {
  const unsigned states = 1u << n;
  std::vector<double> out(states, 0.0);
  for (unsigned s = 0; s < states; ++s) {
    for (unsigned t = 0; t < states; ++t) {
      const double r = 0.5 * (p[s] * q[t] + p[t] * q[s]);
      for (const auto& [uv, prob] : pair_kernel(j, k, n, s, t)) out[uv.first] += r * prob;
    }
  }
  return out;
}

inline std::vector<double> magnetizations(const std::vector<double>& p, int n) {
  std::vector<double> m(n, 0.0);
  for (unsigned s = 0; s < p.size(); ++s) {
    for (int l = 0; l < n; ++l) m[l] += p[s] * spin(s, l);
  }
  return m;
}

}  // namespace brute

namespace brute {

// Entropy dissipation straight from the quadruple sum over the kernel.
inline double dissipation(const std::vector<double>& j, const std::vector<double>& k, int n,
                          const std::vector<double>& f, const std::vector<double>& mu) {
  double d = 0.0;
  for (unsigned s = 0; s < f.size(); ++s) {
    for (unsigned t = 0; t < f.size(); ++t) {
      for (const auto& [uv, q] : pair_kernel(j, k, n, s, t)) {
        const double a = f[s] * f[t], b = f[uv.first] * f[uv.second];
        if (a == b) continue;
        d += mu[s] * mu[t] * q * (a - b) * std::log(a / b);
      }
    }
  }
  return 0.25 * d;
}

}  // namespace brute
