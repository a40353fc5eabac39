// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spinkac/instances.hpp"

namespace spinkac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string block_name(const SitePartition& a, int b) {
  std::ostringstream os;
  os << "block " << b + 1 << " {";
  for (std::size_t i = 0; i < a.block(b).size(); ++i) {
    os << (i ? "," : "") << a.block(b)[i] + 1;
  }
  os << "}";
  return os.str();
}

// p o p - p
void vector_field(const CollisionContext& ctx, const std::vector<double>& p,
                  std::vector<double>& out, const EvolveOptions& opts) {
  collision_product_into(ctx, p, p, out, opts.mode, opts.execution);
  for (std::size_t s = 0; s < p.size(); ++s) out[s] -= p[s];
}

struct Stepper {
  const CollisionContext& ctx;
  const EvolveOptions& opts;
  std::vector<double> k1, k2, k3, k4, tmp;

  // One RK4 step from p; returns the mass drift of the raw result, which is
  // left in `next` after clipping and renormalization.
  double rk4(const std::vector<double>& p, double h, std::vector<double>& next) {
    const std::size_t m = p.size();
    tmp.resize(m);
    vector_field(ctx, p, k1, opts);
    for (std::size_t s = 0; s < m; ++s) tmp[s] = p[s] + 0.5 * h * k1[s];
    vector_field(ctx, tmp, k2, opts);
    for (std::size_t s = 0; s < m; ++s) tmp[s] = p[s] + 0.5 * h * k2[s];
    vector_field(ctx, tmp, k3, opts);
    for (std::size_t s = 0; s < m; ++s) tmp[s] = p[s] + h * k3[s];
    vector_field(ctx, tmp, k4, opts);
    next.resize(m);
    double total = 0.0, clipped = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      double v = p[s] + h / 6.0 * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s]);
      if (v < 0.0) {
        clipped -= v;
        v = 0.0;
      }
      next[s] = v;
      total += v;
    }
    for (double& v : next) v /= total;
    return std::abs(total - 1.0) + clipped;
  }

  // Advances by h, splitting the step while the drift is too large.
  double advance(const std::vector<double>& p, double h, std::vector<double>& next,
                 int& rejected, int depth = 0) {
    const double drift = rk4(p, h, next);
    if (drift <= opts.max_drift || depth >= 40) return drift;
    ++rejected;
    std::vector<double> mid;
    const double d1 = advance(p, 0.5 * h, mid, rejected, depth + 1);
    const double d2 = advance(mid, 0.5 * h, next, rejected, depth + 1);
    return std::max(d1, d2);
  }
};

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(x[i] - y[i]));
  return r;
}

}  // namespace

Trajectory evolve(const CollisionContext& ctx, const ProbVec& p0, double t_end, double dt,
                  const EvolveOptions& opts) {
  const int n = ctx.sites();
  if (p0.sites() != n) throw DomainError("initial measure does not match the model size");
  if (!(dt > 0.0) || dt > 0.1) throw PreconditionError("time step must lie in (0, 0.1]");
  if (!(t_end >= 0.0)) throw DomainError("end time must be nonnegative");
  if (opts.store_stride < 1) throw DomainError("store stride must be positive");

  Trajectory traj;
  traj.partition = ctx.partition();
  traj.initial_profile = magnetization_profile(p0, traj.partition);
  for (int b = 0; b < traj.partition.size(); ++b) {
    if (std::abs(traj.initial_profile[b]) >= 1.0 - 1e-14) {
      std::ostringstream os;
      os << "initial measure is fully magnetized on " << block_name(traj.partition, b)
         << " (m = " << traj.initial_profile[b] << ")";
      throw PreconditionError(os.str());
    }
  }
  traj.field = solve_field(ctx.interaction(), traj.partition, traj.initial_profile);
  traj.equilibrium = gibbs_measure(ctx.interaction(), traj.field);

  const long steps = t_end == 0.0 ? 0 : static_cast<long>(std::ceil(t_end / dt - 1e-9));
  const double h = steps ? t_end / static_cast<double>(steps) : 0.0;
  Stepper stepper{ctx, opts, {}, {}, {}, {}, {}};
  std::vector<double> p = p0.weights(), next;
  traj.times.push_back(0.0);
  traj.states.push_back(p0);
  for (long i = 1; i <= steps; ++i) {
    const double drift = stepper.advance(p, h, next, traj.rejected_steps);
    traj.max_mass_error = std::max(traj.max_mass_error, drift);
    p.swap(next);
    auto m = magnetization_profile(n, p, traj.partition);
    traj.max_profile_drift = std::max(traj.max_profile_drift, max_abs_diff(m, traj.initial_profile));
    if (i % opts.store_stride == 0 || i == steps) {
      traj.times.push_back(static_cast<double>(i) * h);
      traj.states.push_back(ProbVec::normalized(n, p));
    }
  }
  return traj;
}

std::vector<double> density(const ProbVec& p, const ProbVec& mu) {
  if (p.size() != mu.size()) throw DomainError("measures live on different cubes");
  std::vector<double> f(p.size());
  for (std::size_t s = 0; s < f.size(); ++s) f[s] = p[static_cast<Mask>(s)] / mu[static_cast<Mask>(s)];
  return f;
}

ExtendedReal dissipation(const CollisionContext& ctx, const std::vector<double>& f,
                         const ProbVec& mu) {
  const int n = ctx.sites();
  const std::size_t states = state_count(n);
  if (f.size() != states || mu.size() != states) {
    throw DomainError("density length does not match the model");
  }
  std::vector<double> logf(states);
  for (std::size_t s = 0; s < states; ++s) {
    if (!(f[s] >= 0.0)) throw DomainError("density must be nonnegative");
    logf[s] = f[s] > 0.0 ? std::log(f[s]) : -kInf;
  }
  double total = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t t = 0; t < states; ++t) {
      const double mass = mu[static_cast<Mask>(s)] * mu[static_cast<Mask>(t)];
      const double before = f[s] * f[t];
      for (const auto& e : ctx.entries()) {
        if (((s >> e.l) & 1u) == ((t >> e.k) & 1u)) continue;
        auto [u, v] = exchange_bits(static_cast<Mask>(s), static_cast<Mask>(t), e.l, e.k);
        const double after = f[u] * f[v];
        if (before == 0.0 && after == 0.0) continue;
        if (before == 0.0 || after == 0.0) return ExtendedReal::infinity();
        const double a = acceptance_prob(ctx, e.l, e.k, static_cast<Mask>(s), static_cast<Mask>(t));
        const double lr = logf[s] + logf[t] - logf[u] - logf[v];
        total += mass * e.weight * a * (before - after) * lr;
      }
    }
  }
  return ExtendedReal(std::max(0.25 * total, 0.0));
}

RateBound alpha_bound(const InteractionMatrix& j) {
  RateBound r;
  const int n = j.size();
  r.lambda = j.largest_eigenvalue();
  r.jbar = j.max_abs_row_sum();
  const double lo = j.smallest_eigenvalue();
  if (lo < -1e-12) {
    std::ostringstream os;
    os << "J is not nonnegative definite (smallest eigenvalue " << lo << ")";
    r.reason = os.str();
    return r;
  }
  if (!(r.lambda < 0.5)) {
    std::ostringstream os;
    os << "largest eigenvalue " << r.lambda << " is not below 1/2";
    r.reason = os.str();
    return r;
  }
  const double gap = 1.0 - 2.0 * r.lambda;
  r.applicable = true;
  r.value = gap * gap * std::exp(-16.0 * r.jbar) / (4.0 * n);
  return r;
}

DecayReport decay_report(const CollisionContext& ctx, const Trajectory& traj,
                         bool with_dissipation) {
  DecayReport rep;
  rep.bound = alpha_bound(ctx.interaction());
  const ProbVec& mu = traj.equilibrium;
  const std::size_t count = traj.states.size();
  rep.times = traj.times;
  double c = 0.0;
  if (rep.bound.applicable) {
    c = rep.bound.lambda + 2.0 * traj.field.max_abs() + std::log(2.0);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const ProbVec& p = traj.states[i];
    const double h = relative_entropy(p, mu).value();
    rep.entropy.push_back(h);
    rep.tv.push_back(tv_distance(p, mu));
    rep.pinsker.push_back(std::sqrt(0.5 * h));
    if (with_dissipation) {
      auto d = dissipation(ctx, density(p, mu), mu);
      rep.dissipation.push_back(d.is_finite() ? d.value() : kInf);
    }
    if (rep.bound.applicable) {
      rep.tv_bound.push_back(std::sqrt(0.5 * c * ctx.sites()) *
                             std::exp(-0.5 * rep.bound.value * traj.times[i]));
    }
  }

  const double floor = 1e-12;
  bool any_above = false;
  for (double h : rep.entropy) any_above = any_above || h >= floor;
  if (!any_above) {
    rep.entropy_vanishes = true;
    rep.alpha_fit = kInf;
    return rep;
  }
  const std::size_t first = count / 10;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t i = first; i < count; ++i) {
    if (rep.entropy[i] < floor) continue;
    const double x = traj.times[i], y = std::log(rep.entropy[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  rep.fit_samples = m;
  if (m < 5) {
    throw FitError("only " + std::to_string(m) +
                   " samples above the entropy floor; at least 5 are needed");
  }
  const double den = m * sxx - sx * sx;
  if (!(den > 0.0)) throw FitError("fit window has no time spread");
  rep.alpha_fit = -(m * sxy - sx * sy) / den;
  return rep;
}

double stationarity_residual(const CollisionContext& ctx, const ProbVec& p, ProductMode mode) {
  std::vector<double> out;
  collision_product_into(ctx, p.weights(), p.weights(), out, mode);
  return max_abs_diff(out, p.weights());
}

namespace {

std::vector<double> sample_log_density(int kind, int n, Rng& rng) {
  static constexpr double kScales[] = {0.1, 0.5, 1.0, 2.0, 4.0};
  const std::size_t states = state_count(n);
  std::vector<double> g(states, 0.0);
  if (kind < 5) {
    for (double& x : g) x = kScales[kind] * standard_normal(rng);
  } else if (kind == 5) {
    // Spike on one configuration over a small random background.
    for (double& x : g) x = 0.05 * standard_normal(rng);
    g[rng() % states] += 2.0 + 8.0 * uniform01(rng);
  } else {
    for (double& x : g) x = 1e-3 * standard_normal(rng);
  }
  return g;
}

}  // namespace

MlsiScanResult nonlinear_mlsi_scan(const CollisionContext& ctx, const FieldVector& h,
                                   int trials, std::uint64_t seed, const Execution& ex) {
  const int n = ctx.sites();
  const SitePartition& a = ctx.partition();
  if (!h.constant_on(a)) {
    throw PreconditionError("field is not constant on the irreducible components of K");
  }
  const ProbVec mu = gibbs_measure(ctx.interaction(), h);
  const auto target = magnetization_profile(mu, a);
  std::vector<double> logmu(mu.size());
  for (std::size_t s = 0; s < mu.size(); ++s) logmu[s] = std::log(mu[static_cast<Mask>(s)]);

  std::vector<double> ratio(trials, std::numeric_limits<double>::quiet_NaN());
  parallel_for(ex, trials, [&](int i) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
    auto base = sample_log_density(i % 7, n, rng);
    for (std::size_t s = 0; s < base.size(); ++s) base[s] += logmu[s];
    std::vector<double> theta;
    try {
      theta = solve_block_tilt(n, base, a, target);
    } catch (const NumericError&) {
      return;
    }
    for (std::size_t s = 0; s < base.size(); ++s) {
      for (int b = 0; b < a.size(); ++b) {
        int sum = 0;
        for (int l : a.block(b)) sum += spin_of(static_cast<Mask>(s), l);
        base[s] += theta[b] * sum / static_cast<double>(a.block(b).size());
      }
    }
    const ProbVec p = normalize_log_weights(n, base);
    const double ent = relative_entropy(p, mu).value();
    if (ent < 1e-14) return;
    const auto d = dissipation(ctx, density(p, mu), mu);
    if (!d.is_finite()) return;
    ratio[i] = d.value() / ent;
  });

  return summarize_ratios(ratio);
}

MlsiScanResult summarize_ratios(const std::vector<double>& ratio) {
  MlsiScanResult res;
  res.min_ratio = kInf;
  for (double r : ratio) {
    if (std::isnan(r)) {
      ++res.discarded;
      continue;
    }
    ++res.accepted;
    res.min_ratio = std::min(res.min_ratio, r);
    res.ratios.push_back(r);
  }
  if (!res.ratios.empty()) {
    auto sorted = res.ratios;
    std::sort(sorted.begin(), sorted.end());
    res.median_ratio = sorted[sorted.size() / 2];
  }
  return res;
}

}  // namespace spinkac
