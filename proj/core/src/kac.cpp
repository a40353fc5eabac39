// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/kac.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "spinkac/error.hpp"
#include "spinkac/gibbs.hpp"
#include "spinkac/instances.hpp"

namespace spinkac {

namespace {

constexpr double kIntegralTolerance = 1e-9;

Mask low_bits(int n) { return n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1u; }

Mask particle_of(Mask key, int n, int i) { return (key >> (i * n)) & low_bits(n); }

Mask swap_bits(Mask key, int u, int v) {
  const Mask x = ((key >> u) ^ (key >> v)) & 1u;
  return key ^ ((x << u) | (x << v));
}

// Probability of moving from a state of log weight 0 to one of log weight x
// in the two-point chain {stay, move}: 1 / (1 + e^{-x}).
double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_kernel_respects(const CollisionContext& ctx, const SitePartition& a) {
  for (const auto& e : ctx.entries()) {
    if (a.block_of(e.l) != a.block_of(e.k)) {
      throw PreconditionError("kernel exchanges sites " + std::to_string(e.l + 1) + " and " +
                              std::to_string(e.k + 1) +
                              ", which lie in different blocks of the density profile");
    }
  }
}

void check_same_interaction(const CollisionContext& ctx, const CanonicalMeasure& m) {
  if (ctx.sites() != m.sites() || ctx.interaction().entries() != m.interaction().entries()) {
    throw PreconditionError("collision context and measure use different interactions");
  }
}

// Calls fn(y, rate) for every move of L_N out of state x that changes the
// configuration; rates of coinciding moves are not merged.
template <class Fn>
void for_each_kernel_move(const CollisionContext& ctx, const CanonicalMeasure& m,
                          std::size_t x, Fn&& fn) {
  const int n = m.sites();
  const int np = m.particles();
  const Mask key = m.key(x);
  const double scale = 1.0 / np;  // entry weights already carry K/n
  for (int i = 0; i < np; ++i) {
    const Mask si = particle_of(key, n, i);
    for (int j = 0; j < np; ++j) {
      const Mask sj = particle_of(key, n, j);
      for (const auto& e : ctx.entries()) {
        const Mask y = swap_bits(key, i * n + e.l, j * n + e.k);
        if (y == key) continue;
        const double acc = i == j ? diagonal_acceptance(ctx, e.l, e.k, si)
                                  : acceptance_prob(ctx, e.l, e.k, si, sj);
        fn(m.index_of(y), e.weight * acc * scale);
      }
    }
  }
}

SparseGenerator assemble(std::size_t states,
                         const std::function<void(std::size_t,
                                                  std::vector<std::pair<std::uint32_t, double>>&)>&
                             row) {
  SparseGenerator q;
  q.states = states;
  q.row_start.assign(states + 1, 0);
  std::vector<std::pair<std::uint32_t, double>> buf;
  for (std::size_t x = 0; x < states; ++x) {
    buf.clear();
    row(x, buf);
    std::sort(buf.begin(), buf.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t t = 0; t < buf.size();) {
      std::size_t u = t;
      double r = 0.0;
      while (u < buf.size() && buf[u].first == buf[t].first) r += buf[u++].second;
      q.column.push_back(buf[t].first);
      q.rate.push_back(r);
      t = u;
    }
    q.row_start[x + 1] = q.column.size();
  }
  return q;
}

}  // namespace

DensityProfile::DensityProfile(SitePartition a, int particles, std::vector<int> plus_counts)
    : a_(std::move(a)), n_particles_(particles), plus_(std::move(plus_counts)) {
  if (particles < 1) throw DomainError("particle count must be positive");
  if (static_cast<int>(plus_.size()) != a_.size()) {
    throw DomainError("density profile needs one entry per block");
  }
  for (int b = 0; b < a_.size(); ++b) {
    if (plus_[b] < 0 || plus_[b] > stripe_size(b)) {
      throw DomainError("density of block " + std::to_string(b + 1) + " outside [0, 1]");
    }
  }
}

DensityProfile DensityProfile::from_densities(SitePartition a, int particles,
                                              const std::vector<double>& rho) {
  if (static_cast<int>(rho.size()) != a.size()) {
    throw DomainError("density profile needs one entry per block");
  }
  std::vector<int> counts(rho.size());
  for (int b = 0; b < a.size(); ++b) {
    const double x = rho[b] * particles * static_cast<double>(a.block(b).size());
    const double r = std::round(x);
    if (std::abs(x - r) > kIntegralTolerance) {
      throw DomainError("N|A|rho(A) is not an integer for block " + std::to_string(b + 1));
    }
    counts[b] = static_cast<int>(r);
  }
  return DensityProfile(std::move(a), particles, std::move(counts));
}

std::vector<DensityProfile> DensityProfile::all(const SitePartition& a, int particles) {
  std::vector<DensityProfile> out;
  std::vector<int> c(a.size(), 0);
  for (;;) {
    out.emplace_back(a, particles, c);
    int b = a.size() - 1;
    while (b >= 0 && c[b] == particles * static_cast<int>(a.block(b).size())) c[b--] = 0;
    if (b < 0) break;
    ++c[b];
  }
  return out;
}

double DensityProfile::density(int b) const {
  return static_cast<double>(plus_[b]) / stripe_size(b);
}

std::vector<int> stripe_plus_counts(const ParticleState& s, const SitePartition& a) {
  std::vector<int> c(a.size(), 0);
  for (Mask x : s.configs) {
    for (int b = 0; b < a.size(); ++b) c[b] += std::popcount(x & a.mask(b));
  }
  return c;
}

bool satisfies(const ParticleState& s, const DensityProfile& rho) {
  return s.sites == rho.partition().sites() && s.particles() == rho.particles() &&
         stripe_plus_counts(s, rho.partition()) == rho.plus_counts();
}

ParticleState random_state(int n, const DensityProfile& rho, Rng& rng) {
  const SitePartition& a = rho.partition();
  if (a.sites() != n) throw DomainError("profile partition does not match n");
  ParticleState s;
  s.sites = n;
  s.configs.assign(rho.particles(), 0);
  for (int b = 0; b < a.size(); ++b) {
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < rho.particles(); ++i) {
      for (int l : a.block(b)) cells.emplace_back(i, l);
    }
    // Partial Fisher-Yates: the first plus_count cells become +.
    for (int t = 0; t < rho.plus_count(b); ++t) {
      const int u = t + uniform_int(rng, static_cast<int>(cells.size()) - t);
      std::swap(cells[t], cells[u]);
      s.configs[cells[t].first] |= Mask{1} << cells[t].second;
    }
  }
  return s;
}

Mask pack(const ParticleState& s) {
  if (s.sites * s.particles() > 32) throw CapacityError("packed keys hold at most 32 spins");
  Mask key = 0;
  for (int i = 0; i < s.particles(); ++i) key |= s.configs[i] << (i * s.sites);
  return key;
}

ParticleState unpack(Mask key, int n, int particles) {
  ParticleState s;
  s.sites = n;
  s.configs.resize(particles);
  for (int i = 0; i < particles; ++i) s.configs[i] = particle_of(key, n, i);
  return s;
}

Mask exchange_key(Mask key, int n, int i, int l, int j, int k) {
  return swap_bits(key, i * n + l, j * n + k);
}

CanonicalMeasure::CanonicalMeasure(const InteractionMatrix& j, std::vector<FieldVector> fields,
                                   const DensityProfile& rho)
    : n_(j.size()), j_(j), fields_(std::move(fields)), rho_(rho) {
  const int np = rho.particles();
  const int total = n_ * np;
  if (rho.partition().sites() != n_) throw DomainError("profile partition does not match J");
  if (total > kMaxEnumeratedSites) {
    throw CapacityError("N n = " + std::to_string(total) + " exceeds the enumeration limit " +
                        std::to_string(kMaxEnumeratedSites));
  }
  if (!fields_.empty() && static_cast<int>(fields_.size()) != np) {
    throw DomainError("need one field vector per particle");
  }
  if (fields_.empty()) {
    logw_.push_back(log_weights(j, FieldVector(n_)));
  } else {
    for (const auto& h : fields_) {
      if (h.size() != n_) throw DomainError("field vector length does not match J");
      logw_.push_back(log_weights(j, h));
    }
  }

  const SitePartition& a = rho.partition();
  std::vector<Mask> stripe(a.size(), 0);
  for (int b = 0; b < a.size(); ++b) {
    for (int i = 0; i < np; ++i) stripe[b] |= a.mask(b) << (i * n_);
  }
  std::vector<double> lw;
  const std::uint64_t end = std::uint64_t{1} << total;
  for (std::uint64_t k = 0; k < end; ++k) {
    const Mask key = static_cast<Mask>(k);
    bool ok = true;
    for (int b = 0; b < a.size() && ok; ++b) {
      ok = std::popcount(key & stripe[b]) == rho.plus_count(b);
    }
    if (!ok) continue;
    double w = 0.0;
    for (int i = 0; i < np; ++i) w += particle_log_weight(i, particle_of(key, n_, i));
    keys_.push_back(key);
    lw.push_back(w);
  }
  if (keys_.empty()) throw Error("internal: empty constrained state space");
  const double top = *std::max_element(lw.begin(), lw.end());
  double z = 0.0;
  prob_.resize(lw.size());
  for (std::size_t x = 0; x < lw.size(); ++x) z += prob_[x] = std::exp(lw[x] - top);
  for (double& p : prob_) p /= z;
}

std::size_t CanonicalMeasure::index_of(Mask key) const {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return npos;
  return static_cast<std::size_t>(it - keys_.begin());
}

double CanonicalMeasure::max_field() const {
  double h = 0.0;
  for (const auto& f : fields_) h = std::max(h, f.max_abs());
  return h;
}

SparseGenerator particle_generator(const CollisionContext& ctx, const CanonicalMeasure& m) {
  check_same_interaction(ctx, m);
  check_kernel_respects(ctx, m.profile().partition());
  return assemble(m.size(), [&](std::size_t x, auto& buf) {
    for_each_kernel_move(ctx, m, x, [&](std::size_t y, double r) {
      buf.emplace_back(static_cast<std::uint32_t>(y), r);
    });
  });
}

SparseGenerator field_aware_generator(const CanonicalMeasure& m) {
  if (m.profile().partition().size() != 1) {
    throw PreconditionError("the field-aware form needs a single-block profile");
  }
  const int n = m.sites();
  const int np = m.particles();
  const double scale = 1.0 / (static_cast<double>(np) * n);
  return assemble(m.size(), [&](std::size_t x, auto& buf) {
    const Mask key = m.key(x);
    for (int i = 0; i < np; ++i) {
      for (int j = 0; j < np; ++j) {
        for (int l = 0; l < n; ++l) {
          for (int k = 0; k < n; ++k) {
            const Mask y = swap_bits(key, i * n + l, j * n + k);
            if (y == key) continue;
            double d = m.particle_log_weight(i, particle_of(y, n, i)) -
                       m.particle_log_weight(i, particle_of(key, n, i));
            if (j != i) {
              d += m.particle_log_weight(j, particle_of(y, n, j)) -
                   m.particle_log_weight(j, particle_of(key, n, j));
            }
            buf.emplace_back(static_cast<std::uint32_t>(m.index_of(y)), logistic(d) * scale);
          }
        }
      }
    }
  });
}

double dirichlet_form(const CollisionContext& ctx, const CanonicalMeasure& m,
                      const std::vector<double>& f, const std::vector<double>& g) {
  check_same_interaction(ctx, m);
  check_kernel_respects(ctx, m.profile().partition());
  if (f.size() != m.size() || g.size() != m.size()) {
    throw DomainError("function length does not match the state space");
  }
  double sum = 0.0;
  for (std::size_t x = 0; x < m.size(); ++x) {
    double row = 0.0;
    for_each_kernel_move(ctx, m, x, [&](std::size_t y, double r) {
      row += r * (f[y] - f[x]) * (g[y] - g[x]);
    });
    sum += m.prob(x) * row;
  }
  return 0.5 * sum;
}

ParticleDecay particle_entropy_decay(const SparseGenerator& q, const CanonicalMeasure& m,
                                     const std::vector<double>& nu0,
                                     const std::vector<double>& times) {
  if (m.sites() * m.particles() > kMaxDenseSites) {
    throw CapacityError("exact decay needs N n <= " + std::to_string(kMaxDenseSites));
  }
  const auto s = static_cast<Eigen::Index>(q.states);
  if (nu0.size() != q.states) throw DomainError("initial distribution has the wrong length");
  const auto dense = dense_generator(q);
  Eigen::VectorXd root(s);
  for (Eigen::Index x = 0; x < s; ++x) root[x] = std::sqrt(m.prob(static_cast<std::size_t>(x)));
  // D^{1/2} Q D^{-1/2} is symmetric by detailed balance.
  Eigen::MatrixXd sym(s, s);
  for (Eigen::Index x = 0; x < s; ++x) {
    for (Eigen::Index y = 0; y < s; ++y) {
      sym(x, y) = root[x] * dense[static_cast<std::size_t>(x * s + y)] / root[y];
    }
  }
  sym = (0.5 * (sym + sym.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");

  Eigen::VectorXd u(s);
  for (Eigen::Index x = 0; x < s; ++x) u[x] = nu0[static_cast<std::size_t>(x)] / root[x];
  const Eigen::VectorXd c = eig.eigenvectors().transpose() * u;

  ParticleDecay out;
  out.times = times;
  for (double t : times) {
    if (t < 0.0) throw DomainError("times must be nonnegative");
    const Eigen::VectorXd w =
        eig.eigenvectors() * (t * eig.eigenvalues().array()).exp().matrix().cwiseProduct(c);
    std::vector<double> nu(q.states);
    for (Eigen::Index x = 0; x < s; ++x) {
      double v = root[x] * w[x];
      if (v < 0.0) {
        out.negative_mass = std::max(out.negative_mass, -v);
        v = 0.0;
      }
      nu[static_cast<std::size_t>(x)] = v;
    }
    out.entropy.push_back(relative_entropy_on(m.probs(), nu));
    out.states.push_back(std::move(nu));
  }
  return out;
}

namespace {

std::vector<double> sample_particle_function(int kind, const CanonicalMeasure& m, Rng& rng) {
  static constexpr double kScales[] = {0.1, 0.5, 1.0, 2.0, 4.0};
  const std::size_t s = m.size();
  std::vector<double> g(s, 0.0);
  if (kind < 5) {
    for (double& x : g) x = kScales[kind] * standard_normal(rng);
  } else if (kind == 5) {
    for (double& x : g) x = 0.05 * standard_normal(rng);
    g[rng() % s] += 2.0 + 8.0 * uniform01(rng);
  } else if (kind == 6) {
    for (double& x : g) x = 1e-3 * standard_normal(rng);
  } else {
    // Product of one-particle functions.
    const int n = m.sites();
    std::vector<double> one(state_count(n));
    for (double& x : one) x = standard_normal(rng);
    for (std::size_t x = 0; x < s; ++x) {
      for (int i = 0; i < m.particles(); ++i) g[x] += one[particle_of(m.key(x), n, i)];
    }
  }
  const double top = *std::max_element(g.begin(), g.end());
  for (double& x : g) x = std::exp(x - top);
  return g;
}

}  // namespace

MlsiScanResult particle_mlsi_scan(const SparseGenerator& q, const CanonicalMeasure& m,
                                  int trials, std::uint64_t seed, const Execution& ex) {
  std::vector<double> ratio(trials, std::numeric_limits<double>::quiet_NaN());
  parallel_for(ex, trials, [&](int i) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
    const auto f = sample_particle_function(i % 8, m, rng);
    const double ent = entropy(m.probs(), f);
    double mean = 0.0;
    for (std::size_t x = 0; x < m.size(); ++x) mean += m.prob(x) * f[x];
    if (ent < 1e-14 * mean) return;
    std::vector<double> logf(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) logf[x] = std::log(f[x]);
    ratio[i] = dirichlet_form(q, m.probs(), f, logf) / ent;
  });
  return summarize_ratios(ratio);
}

KacRun simulate_particles(const CollisionContext& ctx, const ParticleState& init,
                          const DensityProfile& rho, double t_end, Rng& rng,
                          const KacOptions& opts) {
  const int n = ctx.sites();
  const int np = rho.particles();
  const SitePartition& a = rho.partition();
  if (init.sites != n || a.sites() != n) throw DomainError("site count mismatch");
  if (!satisfies(init, rho)) {
    throw PreconditionError("initial state violates the density profile");
  }
  check_kernel_respects(ctx, a);
  if (!(t_end >= 0.0)) throw DomainError("t_end must be nonnegative");
  if (!(opts.record_interval > 0.0)) throw DomainError("record interval must be positive");
  const CanonicalMeasure* eq = opts.equilibrium;
  if (eq) {
    if (eq->sites() * eq->particles() > kMaxDenseSites) {
      throw CapacityError("occupation tracking needs N n <= " + std::to_string(kMaxDenseSites));
    }
    if (!(eq->profile() == rho)) throw DomainError("equilibrium has a different profile");
  }

  // Cumulative kernel rows for k ~ K(l, .).
  std::vector<std::vector<std::pair<int, double>>> rows(n);
  for (int l = 0; l < n; ++l) {
    double c = 0.0;
    for (int e : ctx.row_entries(l)) {
      c += ctx.entries()[e].weight * n;
      rows[l].emplace_back(ctx.entries()[e].k, c);
    }
  }

  KacRun run;
  ParticleState st = init;
  std::vector<int> counts = stripe_plus_counts(st, a);
  Mask key = eq ? pack(st) : 0;
  std::vector<double> occ(eq ? eq->size() : 0, 0.0);
  double last = 0.0;  // occupation accumulated up to this time

  auto sums = [&]() {
    std::vector<int> s(a.size());
    for (int b = 0; b < a.size(); ++b) s[b] = 2 * counts[b] - rho.stripe_size(b);
    return s;
  };
  auto record = [&](double t) {
    run.times.push_back(t);
    run.events.push_back(run.total_events);
    run.block_sums.push_back(sums());
    if (eq) {
      const std::size_t cur = eq->index_of(key);
      occ[cur] += t - last;
      last = t;
      double tv = 0.0;
      for (std::size_t x = 0; x < occ.size(); ++x) {
        const double emp = t > 0.0 ? occ[x] / t : (x == cur ? 1.0 : 0.0);
        tv += std::abs(emp - eq->prob(x));
      }
      run.occupation_tv.push_back(0.5 * tv);
    }
  };

  long next_record = 0;
  auto record_time = [&](long k) {
    return std::min(t_end, static_cast<double>(k) * opts.record_interval);
  };
  double t = 0.0;
  bool done = false;
  while (!done) {
    const double t_next = t + exponential1(rng) / np;
    while (!done && record_time(next_record) <= std::min(t_next, t_end)) {
      const double rt = record_time(next_record);
      record(rt);
      ++next_record;
      if (rt >= t_end) done = true;
    }
    if (done) break;
    t = t_next;

    const int i = uniform_int(rng, np);
    const int j = uniform_int(rng, np);
    const int l = uniform_int(rng, n);
    const auto& row = rows[l];
    const double u = uniform01(rng) * row.back().second;
    int k = row.back().first;
    for (const auto& [site, c] : row) {
      if (u < c) {
        k = site;
        break;
      }
    }
    ++run.total_events;
    const Mask si = st.configs[i], sj = st.configs[j];
    double acc;
    Mask ni, nj;
    if (i == j) {
      if (l == k) continue;
      acc = diagonal_acceptance(ctx, l, k, si);
      ni = nj = swap_bits(si, l, k);
    } else {
      acc = acceptance_prob(ctx, l, k, si, sj);
      std::tie(ni, nj) = exchange_bits(si, sj, l, k);
    }
    if (uniform01(rng) >= acc) continue;
    if (ni == si && nj == sj) continue;
    ++run.accepted;
    if (eq) {
      const std::size_t cur = eq->index_of(key);
      occ[cur] += t - last;
      last = t;
      key = exchange_key(key, n, i, l, j, k);
    }
    for (int b = 0; b < a.size(); ++b) {
      counts[b] += std::popcount(ni & a.mask(b)) - std::popcount(si & a.mask(b));
      if (i != j) counts[b] += std::popcount(nj & a.mask(b)) - std::popcount(sj & a.mask(b));
    }
    st.configs[i] = ni;
    st.configs[j] = nj;
    if (counts != rho.plus_counts()) {
      throw Error("internal: stripe counts left the density profile at event " +
                  std::to_string(run.total_events));
    }
  }
  run.final_state = std::move(st);
  return run;
}

}  // namespace spinkac
