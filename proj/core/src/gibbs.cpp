// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/gibbs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "spinkac/error.hpp"
#include "spinkac/linalg.hpp"

namespace spinkac {

double ExtendedReal::value() const {
  if (!finite_) throw DomainError("value is +infinity");
  return value_;
}

std::vector<double> log_weights(const InteractionMatrix& j, const FieldVector& h) {
  const int n = j.size();
  check_sites(n);
  if (h.size() != n) throw DomainError("field length does not match the interaction");
  const std::size_t states = state_count(n);
  std::vector<double> e(states);

  // All spins down.
  double e0 = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) e0 += 0.5 * j(a, b);
    e0 -= h[a];
  }
  e[0] = e0;
  // Raise the top set bit of s from s' = s without it: the energy changes by
  // 2 (sum_{b != t} J(t,b) s'_b + h_t).
  for (std::size_t s = 1; s < states; ++s) {
    const int t = std::bit_width(static_cast<Mask>(s)) - 1;
    const Mask prev = static_cast<Mask>(s) & ~(Mask{1} << t);
    double local = h[t];
    for (int b = 0; b < n; ++b) {
      if (b != t) local += j(t, b) * spin_of(prev, b);
    }
    e[s] = e[prev] + 2.0 * local;
  }
  return e;
}

ProbVec normalize_log_weights(int n, const std::vector<double>& logw) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : logw) mx = std::max(mx, x);
  if (!std::isfinite(mx)) throw NumericError("log weights have no finite maximum");
  std::vector<double> w(logw.size());
  double total = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) {
    w[s] = std::exp(logw[s] - mx);
    total += w[s];
  }
  for (double& x : w) x /= total;
  return ProbVec(n, std::move(w));
}

ProbVec gibbs_measure(const InteractionMatrix& j, const FieldVector& h) {
  return normalize_log_weights(j.size(), log_weights(j, h));
}

std::vector<double> site_magnetizations(int n, const std::vector<double>& w) {
  std::vector<double> m(n, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) {
    total += w[s];
    for (int l = 0; l < n; ++l) m[l] += spin_of(static_cast<Mask>(s), l) * w[s];
  }
  for (double& x : m) x /= total;
  return m;
}

std::vector<double> magnetization_profile(int n, const std::vector<double>& w,
                                          const SitePartition& a) {
  if (a.sites() != n) throw DomainError("partition does not match the cube dimension");
  auto site = site_magnetizations(n, w);
  std::vector<double> m(a.size(), 0.0);
  for (int b = 0; b < a.size(); ++b) {
    for (int l : a.block(b)) m[b] += site[l];
    m[b] /= static_cast<double>(a.block(b).size());
  }
  return m;
}

std::vector<double> magnetization_profile(const ProbVec& p, const SitePartition& a) {
  return magnetization_profile(p.sites(), p.weights(), a);
}

namespace {

struct Moments {
  std::vector<double> mean;  // per block
  std::vector<double> cov;   // blocks x blocks
};

Moments tilted_moments(int n, const std::vector<double>& base,
                       const std::vector<std::vector<double>>& stat,
                       const std::vector<double>& theta) {
  const int k = static_cast<int>(theta.size());
  const std::size_t states = base.size();
  std::vector<double> lw(states);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < states; ++s) {
    double x = base[s];
    for (int b = 0; b < k; ++b) x += theta[b] * stat[b][s];
    lw[s] = x;
    mx = std::max(mx, x);
  }
  Moments m{std::vector<double>(k, 0.0), std::vector<double>(k * k, 0.0)};
  double z = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    double w = std::exp(lw[s] - mx);
    if (w == 0.0) continue;
    z += w;
    for (int b = 0; b < k; ++b) {
      m.mean[b] += w * stat[b][s];
      for (int c = 0; c <= b; ++c) m.cov[b * k + c] += w * stat[b][s] * stat[c][s];
    }
  }
  for (int b = 0; b < k; ++b) m.mean[b] /= z;
  for (int b = 0; b < k; ++b) {
    for (int c = 0; c <= b; ++c) {
      double v = m.cov[b * k + c] / z - m.mean[b] * m.mean[c];
      m.cov[b * k + c] = v;
      m.cov[c * k + b] = v;
    }
  }
  (void)n;
  return m;
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(x[i] - y[i]));
  return r;
}

}  // namespace

std::vector<double> solve_block_tilt(int n, const std::vector<double>& base_logw,
                                     const SitePartition& a,
                                     const std::vector<double>& target,
                                     std::vector<double> initial,
                                     const TiltOptions& opts) {
  const int k = a.size();
  if (static_cast<int>(target.size()) != k) {
    throw DomainError("target has " + std::to_string(target.size()) +
                      " entries but the partition has " + std::to_string(k) + " blocks");
  }
  for (int b = 0; b < k; ++b) {
    if (!(std::abs(target[b]) < 1.0)) {
      std::ostringstream os;
      os << "target magnetization " << target[b] << " of block " << b + 1
         << " is not strictly inside (-1, 1)";
      throw DomainError(os.str());
    }
  }
  const std::size_t states = state_count(n);
  std::vector<std::vector<double>> stat(k, std::vector<double>(states, 0.0));
  for (int b = 0; b < k; ++b) {
    const double inv = 1.0 / static_cast<double>(a.block(b).size());
    for (std::size_t s = 0; s < states; ++s) {
      int sum = 0;
      for (int l : a.block(b)) sum += spin_of(static_cast<Mask>(s), l);
      stat[b][s] = sum * inv;
    }
  }

  std::vector<double> theta = initial.empty() ? std::vector<double>(k, 0.0) : std::move(initial);
  Moments m = tilted_moments(n, base_logw, stat, theta);
  double res = max_abs_diff(m.mean, target);
  for (int it = 0; it < opts.max_iterations && res > opts.tolerance; ++it) {
    std::vector<double> g(k);
    for (int b = 0; b < k; ++b) g[b] = m.mean[b] - target[b];
    std::vector<double> step;
    if (!cholesky_solve(m.cov, k, g, step)) {
      // Flat direction: fall back to a gradient step scaled by the diagonal.
      step.assign(k, 0.0);
      for (int b = 0; b < k; ++b) step[b] = g[b] / std::max(m.cov[b * k + b], 1e-300);
    }
    double t = 1.0;
    bool improved = false;
    for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
      std::vector<double> trial(k);
      for (int b = 0; b < k; ++b) trial[b] = theta[b] - t * step[b];
      Moments mt = tilted_moments(n, base_logw, stat, trial);
      double rt = max_abs_diff(mt.mean, target);
      if (rt < res) {
        theta = std::move(trial);
        m = std::move(mt);
        res = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!(res <= opts.tolerance)) {
    std::ostringstream os;
    os.precision(3);
    os << "block tilt solver did not converge (residual " << res << ")";
    throw NumericError(os.str(), res);
  }
  return theta;
}

FieldVector solve_field(const InteractionMatrix& j, const SitePartition& a,
                        const std::vector<double>& target, const TiltOptions& opts) {
  const int n = j.size();
  if (a.sites() != n) throw DomainError("partition does not match the interaction size");
  std::vector<double> init(a.size(), 0.0);
  for (int b = 0; b < a.size() && b < static_cast<int>(target.size()); ++b) {
    if (std::abs(target[b]) < 1.0) {
      init[b] = static_cast<double>(a.block(b).size()) * std::atanh(target[b]);
    }
  }
  auto base = log_weights(j, FieldVector(n));
  auto theta = solve_block_tilt(n, base, a, target, init, opts);
  std::vector<double> h(n);
  for (int b = 0; b < a.size(); ++b) {
    const double hb = theta[b] / static_cast<double>(a.block(b).size());
    for (int l : a.block(b)) h[l] = hb;
  }
  return FieldVector(std::move(h));
}

ExtendedReal relative_entropy(const ProbVec& p, const ProbVec& q) {
  if (p.size() != q.size()) throw DomainError("measures live on different cubes");
  // Each term p log(p/q) - p + q is nonnegative, which keeps small entropies
  // accurate; the added terms sum to zero.
  double h = 0.0, sp = 0.0, sq = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    const double ps = p.weights()[s], qs = q.weights()[s];
    sp += ps;
    sq += qs;
    if (ps == 0.0) {
      h += qs;
      continue;
    }
    if (qs == 0.0) return ExtendedReal::infinity();
    h += ps * std::log(ps / qs) - ps + qs;
  }
  return ExtendedReal(std::max(h - (sq - sp), 0.0));
}

double tv_distance(const ProbVec& p, const ProbVec& q) {
  if (p.size() != q.size()) throw DomainError("measures live on different cubes");
  double d = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) d += std::abs(p.weights()[s] - q.weights()[s]);
  return 0.5 * d;
}

std::vector<double> marginal_table(const std::vector<double>& w, Mask subset) {
  std::vector<double> m(w.size(), 0.0);
  for (std::size_t s = 0; s < w.size(); ++s) m[static_cast<Mask>(s) & subset] += w[s];
  return m;
}

}  // namespace spinkac
