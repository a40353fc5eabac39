// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/down_up.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>

#include "spinkac/error.hpp"
#include "spinkac/instances.hpp"
#include "spinkac/kac.hpp"
#include "spinkac/linalg.hpp"
#include "spinkac/rng.hpp"

namespace spinkac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRegularization = 1e-9;
constexpr double kJacobiTolerance = 1e-12;

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int t = 1; t <= k; ++t) r = r * static_cast<std::size_t>(n - k + t) / t;
  return r;
}

int spin(Mask eta, int i) { return ((eta >> i) & 1u) ? 1 : -1; }

struct GroupStats {
  double z = 0.0;
  double cov = 0.0;  // Cov_g(F, G)
  double ent = 0.0;  // Ent_g(F)
};

// Weight, covariance of f and g, and entropy of f under the group's
// normalized restriction of pi.
GroupStats group_stats(const std::vector<double>& pi, const std::uint32_t* begin,
                       const std::uint32_t* end, const std::vector<double>& f,
                       const std::vector<double>& g) {
  GroupStats s;
  for (auto it = begin; it != end; ++it) s.z += pi[*it];
  if (s.z <= 0.0) return s;
  double ef = 0.0, eg = 0.0, efg = 0.0;
  for (auto it = begin; it != end; ++it) {
    const double p = pi[*it] / s.z;
    ef += p * f[*it];
    eg += p * g[*it];
    efg += p * f[*it] * g[*it];
  }
  s.cov = efg - ef * eg;
  if (ef > 0.0) {
    for (auto it = begin; it != end; ++it) {
      const double v = f[*it];
      const double d = (v - ef) / ef;
      s.ent += pi[*it] / s.z * ef * (v > 0.0 ? (1.0 + d) * std::log1p(d) - d : 1.0);
    }
  }
  return s;
}

BallGroups flatten(std::vector<std::vector<std::uint32_t>>&& lists) {
  BallGroups g;
  g.start.push_back(0);
  for (auto& l : lists) {
    g.members.insert(g.members.end(), l.begin(), l.end());
    g.start.push_back(g.members.size());
  }
  return g;
}

// Positive test function on the states of `m`.
std::vector<double> sample_du_function(int kind, const DuMeasure& m, Rng& rng) {
  const int l = m.instance().sites();
  const std::size_t s = m.size();
  std::vector<double> logf(s, 0.0);
  if (kind < 4) {
    static constexpr double kScales[] = {0.5, 2.0, 1.5, 3.0};
    const int terms = kind < 2 ? 1 : kind;
    std::vector<std::vector<double>> g(terms, std::vector<double>(l));
    std::vector<double> logc(terms);
    for (int t = 0; t < terms; ++t) {
      for (double& x : g[t]) x = kScales[kind] * standard_normal(rng);
      logc[t] = std::log(0.1 + 0.9 * uniform01(rng));
    }
    for (std::size_t x = 0; x < s; ++x) {
      double hi = -std::numeric_limits<double>::infinity();
      std::vector<double> e(terms);
      for (int t = 0; t < terms; ++t) {
        double v = logc[t];
        for (int i = 0; i < l; ++i) v += g[t][i] * spin(m.state(x), i);
        e[t] = v;
        hi = std::max(hi, v);
      }
      double sum = 0.0;
      for (double v : e) sum += std::exp(v - hi);
      logf[x] = hi + std::log(sum);
    }
  } else if (kind == 4) {
    const Mask center = m.state(uniform_int(rng, static_cast<int>(s)));
    const int radius = uniform_int(rng, l / 2 + 1);
    const double eps = std::pow(10.0, -1.0 - 3.0 * uniform01(rng));
    for (std::size_t x = 0; x < s; ++x) {
      const int dist = std::popcount(m.state(x) ^ center) / 2;
      logf[x] = std::log(eps + (dist <= radius ? 1.0 : 0.0));
    }
  } else if (kind == 5) {
    const std::size_t center = uniform_int(rng, static_cast<int>(s));
    const double eps = std::pow(10.0, -1.0 - 5.0 * uniform01(rng));
    for (std::size_t x = 0; x < s; ++x) logf[x] = std::log(eps + (x == center ? 1.0 : 0.0));
  } else {
    for (double& x : logf) x = 1e-3 * standard_normal(rng);
  }
  const double hi = *std::max_element(logf.begin(), logf.end());
  std::vector<double> f(s);
  for (std::size_t x = 0; x < s; ++x) f[x] = std::exp(logf[x] - hi);
  return f;
}

std::vector<double> log_of(const std::vector<double>& f) {
  std::vector<double> out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = std::log(f[x]);
  return out;
}

double mean_of(const std::vector<double>& pi, const std::vector<double>& f) {
  double m = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x) m += pi[x] * f[x];
  return m;
}

}  // namespace

DuInstance::DuInstance(int sites, std::vector<double> lambda, std::vector<double> field,
                       SitePartition blocks, std::vector<int> magnetization)
    : l_(sites),
      lambda_(std::move(lambda)),
      w_(std::move(field)),
      blocks_(std::move(blocks)),
      m_(std::move(magnetization)) {
  if (sites < 1 || sites > kMaxDownUpSites) {
    throw CapacityError("L must lie in [1, " + std::to_string(kMaxDownUpSites) + "]");
  }
  if (lambda_.size() != static_cast<std::size_t>(sites) * sites) {
    throw DomainError("Lambda must be L x L");
  }
  if (w_.size() != static_cast<std::size_t>(sites)) throw DomainError("w must have L entries");
  for (int i = 0; i < sites; ++i) {
    for (int j = i + 1; j < sites; ++j) {
      if (lambda_[i * sites + j] != lambda_[j * sites + i]) {
        throw DomainError("Lambda is not symmetric at (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ")");
      }
    }
  }
  if (blocks_.sites() != sites) throw DomainError("block partition does not cover L sites");
  if (static_cast<int>(m_.size()) != blocks_.size()) {
    throw DomainError("need one magnetization per block");
  }
  for (int b = 0; b < blocks_.size(); ++b) {
    const int size = static_cast<int>(blocks_.block(b).size());
    if (std::abs(m_[b]) > size || (size + m_[b]) % 2 != 0) {
      throw DomainError("block " + std::to_string(b + 1) + ": |B| + M must be even and |M| <= |B|");
    }
  }
}

DuInstance DuInstance::single_block(int sites, std::vector<double> lambda,
                                    std::vector<double> field, int magnetization) {
  if (sites < 1) throw DomainError("L must be positive");
  return DuInstance(sites, std::move(lambda), std::move(field), SitePartition::whole(sites),
                    {magnetization});
}

int DuInstance::balls(int b) const {
  return (static_cast<int>(blocks_.block(b).size()) + m_[b]) / 2;
}

double DuInstance::log_weight(Mask eta) const {
  double quad = 0.0, lin = 0.0;
  for (int i = 0; i < l_; ++i) {
    const int si = spin(eta, i);
    lin += w_[i] * si;
    double row = 0.0;
    for (int j = 0; j < l_; ++j) row += lambda_[i * l_ + j] * spin(eta, j);
    quad += si * row;
  }
  return 0.5 * quad + lin;
}

double DuInstance::largest_eigenvalue() const { return spinkac::largest_eigenvalue(lambda_, l_); }

DuSpace::DuSpace(const DuInstance& inst) {
  const SitePartition& bl = inst.blocks();
  size_ = 1;
  for (int b = 0; b < bl.size(); ++b) {
    sites_.push_back(bl.block(b));
    balls_.push_back(inst.balls(b));
    block_mask_.push_back(bl.mask(b));
    stride_.push_back(size_);
    count_.push_back(binomial(static_cast<int>(bl.block(b).size()), inst.balls(b)));
    size_ *= count_.back();
  }
}

Mask DuSpace::state(std::size_t index) const {
  if (index >= size_) throw DomainError("state index out of range");
  Mask eta = 0;
  for (std::size_t b = 0; b < sites_.size(); ++b) {
    std::size_t r = (index / stride_[b]) % count_[b];
    int p = static_cast<int>(sites_[b].size());
    for (int t = balls_[b]; t >= 1; --t) {
      // Largest p with C(p, t) <= r.
      --p;
      while (binomial(p, t) > r) --p;
      r -= binomial(p, t);
      eta |= Mask{1} << sites_[b][p];
    }
  }
  return eta;
}

bool DuSpace::contains(Mask eta) const {
  Mask all = 0;
  for (std::size_t b = 0; b < sites_.size(); ++b) {
    if (std::popcount(eta & block_mask_[b]) != balls_[b]) return false;
    all |= block_mask_[b];
  }
  return (eta & ~all) == 0;
}

std::size_t DuSpace::rank(Mask eta) const {
  if (!contains(eta)) throw DomainError("configuration outside the constrained space");
  std::size_t index = 0;
  for (std::size_t b = 0; b < sites_.size(); ++b) {
    std::size_t r = 0;
    int t = 0;
    for (std::size_t p = 0; p < sites_[b].size(); ++p) {
      if ((eta >> sites_[b][p]) & 1u) r += binomial(static_cast<int>(p), ++t);
    }
    index += r * stride_[b];
  }
  return index;
}

DuMeasure::DuMeasure(const DuInstance& inst) : inst_(inst), space_(inst) {
  states_.resize(space_.size());
  std::vector<double> lw(space_.size());
  for (std::size_t x = 0; x < space_.size(); ++x) {
    states_[x] = space_.state(x);
    lw[x] = inst_.log_weight(states_[x]);
  }
  const double hi = *std::max_element(lw.begin(), lw.end());
  double z = 0.0;
  prob_.resize(lw.size());
  for (std::size_t x = 0; x < lw.size(); ++x) z += prob_[x] = std::exp(lw[x] - hi);
  for (double& p : prob_) p /= z;
}

DuMeasure::DuMeasure(const DuMeasure& base, const std::vector<double>& logp)
    : inst_(base.inst_), space_(base.space_), states_(base.states_) {
  const double hi = *std::max_element(logp.begin(), logp.end());
  double z = 0.0;
  prob_.resize(logp.size());
  for (std::size_t x = 0; x < logp.size(); ++x) z += prob_[x] = std::exp(logp[x] - hi);
  for (double& p : prob_) p /= z;
}

DuMeasure DuMeasure::tilt(const std::vector<double>& v) const {
  const int l = inst_.sites();
  if (static_cast<int>(v.size()) != l) throw DomainError("tilt needs L entries");
  std::vector<double> logp(size());
  for (std::size_t x = 0; x < size(); ++x) {
    double t = 0.0;
    for (int i = 0; i < l; ++i) t += v[i] * spin(states_[x], i);
    logp[x] = (prob_[x] > 0.0 ? std::log(prob_[x]) : -std::numeric_limits<double>::infinity()) + t;
  }
  return DuMeasure(*this, logp);
}

std::vector<double> DuMeasure::covariance() const {
  const int l = inst_.sites();
  std::vector<double> mean(l, 0.0), c(static_cast<std::size_t>(l) * l, 0.0);
  for (std::size_t x = 0; x < size(); ++x) {
    const double p = prob_[x];
    for (int i = 0; i < l; ++i) {
      const int si = spin(states_[x], i);
      mean[i] += p * si;
      for (int j = 0; j < l; ++j) c[i * l + j] += p * si * spin(states_[x], j);
    }
  }
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) c[i * l + j] -= mean[i] * mean[j];
  }
  return c;
}

double du_rates(const DuInstance& inst, Mask eta, int i, int j) {
  const int l = inst.sites();
  if (i < 0 || i >= l || j < 0 || j >= l) throw DomainError("site out of range");
  const SitePartition& bl = inst.blocks();
  if (spin(eta, i) != 1) return 0.0;
  if (j != i && (bl.block_of(j) != bl.block_of(i) || spin(eta, j) == 1)) return 0.0;
  const double base = inst.log_weight(eta);
  const Mask without = eta & ~(Mask{1} << i);
  double z = 0.0, target = 0.0;
  for (int k : bl.block(bl.block_of(i))) {
    if (k != i && spin(eta, k) == 1) continue;
    const double w = std::exp(inst.log_weight(without | (Mask{1} << k)) - base);
    z += w;
    if (k == j) target = w;
  }
  return target / z;
}

BallGroups ball_groups(const DuMeasure& m) {
  const SitePartition& bl = m.instance().blocks();
  std::vector<std::vector<std::uint32_t>> lists;
  for (int b = 0; b < bl.size(); ++b) {
    std::unordered_map<Mask, std::size_t> id;
    for (std::size_t x = 0; x < m.size(); ++x) {
      const Mask eta = m.state(x);
      for (int u : bl.block(b)) {
        if (!((eta >> u) & 1u)) continue;
        const Mask xi = eta & ~(Mask{1} << u);
        auto [it, fresh] = id.try_emplace(xi, lists.size());
        if (fresh) lists.emplace_back();
        lists[it->second].push_back(static_cast<std::uint32_t>(x));
      }
    }
  }
  return flatten(std::move(lists));
}

BallGroups block_groups(const DuMeasure& m) {
  const SitePartition& bl = m.instance().blocks();
  std::vector<std::vector<std::uint32_t>> lists;
  for (int b = 0; b < bl.size(); ++b) {
    std::unordered_map<Mask, std::size_t> id;
    for (std::size_t x = 0; x < m.size(); ++x) {
      const Mask outside = m.state(x) & ~bl.mask(b);
      auto [it, fresh] = id.try_emplace(outside, lists.size());
      if (fresh) lists.emplace_back();
      lists[it->second].push_back(static_cast<std::uint32_t>(x));
    }
  }
  return flatten(std::move(lists));
}

SparseGenerator du_generator(const DuMeasure& m) {
  const BallGroups g = ball_groups(m);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(m.size());
  for (std::size_t t = 0; t < g.size(); ++t) {
    double z = 0.0;
    for (std::size_t e = g.start[t]; e < g.start[t + 1]; ++e) z += m.prob(g.members[e]);
    for (std::size_t a = g.start[t]; a < g.start[t + 1]; ++a) {
      for (std::size_t b = g.start[t]; b < g.start[t + 1]; ++b) {
        if (a == b) continue;
        rows[g.members[a]].emplace_back(g.members[b], m.prob(g.members[b]) / z);
      }
    }
  }
  SparseGenerator q;
  q.states = m.size();
  q.row_start.assign(m.size() + 1, 0);
  for (std::size_t x = 0; x < m.size(); ++x) {
    auto& r = rows[x];
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t t = 0; t < r.size();) {
      std::size_t u = t;
      double sum = 0.0;
      while (u < r.size() && r[u].first == r[t].first) sum += r[u++].second;
      q.column.push_back(r[t].first);
      q.rate.push_back(sum);
      t = u;
    }
    q.row_start[x + 1] = q.column.size();
  }
  return q;
}

double du_dirichlet_form(const DuMeasure& m, const BallGroups& g, const std::vector<double>& f,
                         const std::vector<double>& h) {
  if (f.size() != m.size() || h.size() != m.size()) {
    throw DomainError("function length does not match the state space");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < g.size(); ++t) {
    const auto s = group_stats(m.probs(), g.members.data() + g.start[t],
                               g.members.data() + g.start[t + 1], f, h);
    sum += s.z * s.cov;
  }
  return sum;
}

double du_mlsi_constant(const DuInstance& inst) {
  const double c = 1.0 - 2.0 * inst.largest_eigenvalue();
  return inst.blocks().size() == 1 ? c : c * c;
}

DuScanResult du_mlsi_scan(const DuMeasure& m, int trials, std::uint64_t seed,
                          const Execution& ex) {
  const BallGroups g = ball_groups(m);
  std::vector<double> ratio(trials, kNaN);
  if (m.size() > 1) {
    parallel_for(ex, trials, [&](int i) {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
      const auto f = sample_du_function(i % 7, m, rng);
      const double ent = entropy(m.probs(), f);
      if (ent < 1e-14 * mean_of(m.probs(), f)) return;
      ratio[i] = du_dirichlet_form(m, g, f, log_of(f)) / ent;
    });
  }
  DuScanResult res;
  res.constant = du_mlsi_constant(m.instance());
  res.gap = kNaN;
  res.linearized_ratio = kNaN;
  if (m.size() > 1 && m.size() <= 5000) {
    const auto sg = spectral_gap(du_generator(m), m.probs());
    res.gap = sg.gap;
    double top = 0.0;
    for (double v : sg.eigenfunction) top = std::max(top, std::abs(v));
    const double eps = 1e-4 / top;
    std::vector<double> f(m.size());
    for (std::size_t x = 0; x < m.size(); ++x) f[x] = 1.0 + eps * sg.eigenfunction[x];
    res.linearized_ratio = du_dirichlet_form(m, g, f, log_of(f)) / entropy(m.probs(), f);
    ratio.push_back(res.linearized_ratio);
  }
  res.scan = summarize_ratios(ratio);
  return res;
}

FactorizationResult factorization_check(const DuMeasure& m, int trials, std::uint64_t seed,
                                        const Execution& ex) {
  const BallGroups balls = ball_groups(m);
  const BallGroups blocks = block_groups(m);
  std::vector<double> block_ratio(trials, kNaN), ball_ratio(trials, kNaN),
      excess(trials, -std::numeric_limits<double>::infinity());
  if (m.size() > 1) {
    parallel_for(ex, trials, [&](int i) {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
      const auto f = sample_du_function(i % 7, m, rng);
      const auto logf = log_of(f);
      const double ent = entropy(m.probs(), f);
      double worst = -std::numeric_limits<double>::infinity();
      double ball_sum = 0.0;
      for (std::size_t t = 0; t < balls.size(); ++t) {
        const auto s = group_stats(m.probs(), balls.members.data() + balls.start[t],
                                   balls.members.data() + balls.start[t + 1], f, logf);
        ball_sum += s.z * s.ent;
        worst = std::max(worst, s.ent - s.cov);
      }
      excess[i] = worst;
      if (ent < 1e-14 * mean_of(m.probs(), f)) return;
      double block_sum = 0.0;
      for (std::size_t t = 0; t < blocks.size(); ++t) {
        const auto s = group_stats(m.probs(), blocks.members.data() + blocks.start[t],
                                   blocks.members.data() + blocks.start[t + 1], f, logf);
        block_sum += s.z * s.ent;
      }
      block_ratio[i] = block_sum / ent;
      ball_ratio[i] = ball_sum / ent;
    });
  }
  FactorizationResult res;
  res.constant = 1.0 - 2.0 * m.instance().largest_eigenvalue();
  const auto bl = summarize_ratios(block_ratio);
  const auto ba = summarize_ratios(ball_ratio);
  res.block_min_ratio = bl.min_ratio;
  res.ball_min_ratio = ba.min_ratio;
  res.accepted = bl.accepted;
  res.discarded = bl.discarded;
  res.jensen_max_excess = *std::max_element(excess.begin(), excess.end());
  return res;
}

CovBoundResult cov_bound_check(const DuInstance& inst, int tilts, std::uint64_t seed,
                               const Execution& ex) {
  const int l = inst.sites();
  const auto eig = jacobi_eigen(inst.lambda(), l, kJacobiTolerance);
  const double smallest = eig.values.front();
  if (smallest < -1e-12) throw PreconditionError("Lambda is not nonnegative definite");
  CovBoundResult res;
  res.lambda = eig.values.back();
  if (smallest <= 0.0 || smallest < 1e-12) {
    res.regularized = true;
    res.lambda += kRegularization;
  }
  if (res.lambda >= 0.5) throw PreconditionError("largest eigenvalue of Lambda is not below 1/2");
  res.bound = 2.0 / (1.0 - 2.0 * res.lambda);
  res.tilts = tilts;

  const DuMeasure base(inst);
  std::vector<double> top(tilts, 0.0);
  parallel_for(ex, tilts, [&](int t) {
    std::vector<double> v(l, 0.0);
    if (t < 2 * l) {
      v[t / 2] = t % 2 == 0 ? 30.0 : -30.0;
    } else if (t > 2 * l) {
      static constexpr double kScales[] = {0.1, 0.5, 1.0, 2.0, 5.0};
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
      for (double& x : v) x = kScales[t % 5] * standard_normal(rng);
    }
    const auto c = base.tilt(v).covariance();
    top[t] = jacobi_eigen(c, l, kJacobiTolerance).values.back();
  });
  res.max_eigenvalue = tilts > 0 ? *std::max_element(top.begin(), top.end()) : 0.0;
  return res;
}

double strong_rayleigh_negcorr_check(const DuMeasure& m) {
  for (double x : m.instance().lambda()) {
    if (x != 0.0) throw PreconditionError("negative correlation check needs Lambda = 0");
  }
  const int l = m.instance().sites();
  const auto c = m.covariance();
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      if (i != j) worst = std::max(worst, c[i * l + j]);
    }
  }
  return l > 1 ? worst : 0.0;
}

RelaxedCondition relaxed_condition(const DuInstance& inst) {
  const int l = inst.sites();
  const auto eig = jacobi_eigen(inst.lambda(), l, kJacobiTolerance);
  RelaxedCondition rc;
  rc.largest = eig.values.back();
  rc.second = l > 1 ? eig.values[l - 2] : -std::numeric_limits<double>::infinity();
  const double tol = 1e-12 * std::max(1.0, std::abs(rc.largest));
  rc.constant_top = true;
  for (int i = 0; i < l; ++i) {
    double row = 0.0;
    for (int j = 0; j < l; ++j) row += inst.lambda(i, j);
    if (std::abs(row - rc.largest) > tol) rc.constant_top = false;
  }
  rc.differs = rc.constant_top && rc.largest >= 0.5 && rc.second < 0.5;
  return rc;
}

BridgeResult bridge_check(const InteractionMatrix& j, const std::vector<FieldVector>& fields,
                          int plus_count, int trials, std::uint64_t seed, const Execution& ex) {
  const int n = j.size();
  const int np = static_cast<int>(fields.size());
  if (np < 2) throw DomainError("bridge check needs at least two particles");
  const DensityProfile rho(SitePartition::whole(n), np, {plus_count});
  const CanonicalMeasure cm(j, fields, rho);
  const SparseGenerator q = field_aware_generator(cm);

  const int l = n * np;
  std::vector<double> lambda(static_cast<std::size_t>(l) * l, 0.0), w(l);
  for (int i = 0; i < np; ++i) {
    for (int a = 0; a < n; ++a) {
      w[i * n + a] = fields[i][a];
      for (int b = 0; b < n; ++b) lambda[(i * n + a) * l + i * n + b] = j(a, b);
    }
  }
  const int mag = 2 * plus_count - l;
  BridgeResult res;
  res.hole_walk = mag > 0;
  if (res.hole_walk) {
    for (double& x : w) x = -x;
  }
  const DuMeasure dm(DuInstance::single_block(l, lambda, w, res.hole_walk ? -mag : mag));
  const BallGroups g = ball_groups(dm);
  const Mask full = l >= 32 ? ~Mask{0} : (Mask{1} << l) - 1u;
  std::vector<std::size_t> to_particle(dm.size());
  for (std::size_t x = 0; x < dm.size(); ++x) {
    const Mask key = res.hole_walk ? (~dm.state(x) & full) : dm.state(x);
    to_particle[x] = cm.index_of(key);
    if (to_particle[x] == CanonicalMeasure::npos ||
        std::abs(cm.prob(to_particle[x]) - dm.prob(x)) > 1e-12) {
      throw Error("internal: particle and Down-Up measures disagree");
    }
  }
  double hbar = 0.0;
  for (const auto& h : fields) hbar = std::max(hbar, h.max_abs());
  res.constant = 0.25 * std::exp(-8.0 * (j.max_abs_row_sum() + hbar));

  std::vector<double> ratio(trials, kNaN);
  if (cm.size() > 1) {
    parallel_for(ex, trials, [&](int i) {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
      const auto fd = sample_du_function(i % 7, dm, rng);
      std::vector<double> fp(cm.size());
      for (std::size_t x = 0; x < dm.size(); ++x) fp[to_particle[x]] = fd[x];
      if (entropy(dm.probs(), fd) < 1e-14 * mean_of(dm.probs(), fd)) return;
      const double ebar = dirichlet_form(q, cm.probs(), fp, log_of(fp));
      const double edu = du_dirichlet_form(dm, g, fd, log_of(fd));
      ratio[i] = ebar / edu;
    });
  }
  const auto s = summarize_ratios(ratio);
  res.min_ratio = s.min_ratio;
  res.accepted = s.accepted;
  return res;
}

}  // namespace spinkac
