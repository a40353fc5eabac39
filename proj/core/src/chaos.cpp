// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/chaos.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <string>

#include "spinkac/dynamics.hpp"
#include "spinkac/error.hpp"
#include "spinkac/gibbs.hpp"

namespace spinkac {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kFloorAllowance = 1e-9;
constexpr double kProfileTolerance = 1e-9;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

std::string block_sites(const SitePartition& a, int b) {
  std::string s = "{";
  for (std::size_t t = 0; t < a.block(b).size(); ++t) {
    if (t) s += ",";
    s += std::to_string(a.block(b)[t] + 1);
  }
  return s + "}";
}

}  // namespace

std::vector<int> plus_counts(Mask s, const SitePartition& a) {
  std::vector<int> c(a.size());
  for (int b = 0; b < a.size(); ++b) c[b] = std::popcount(s & a.mask(b));
  return c;
}

bool is_irreducible(const ProbVec& nu, const SitePartition& a, int* failing_block) {
  if (nu.sites() != a.sites()) throw DomainError("measure and partition disagree on n");
  std::set<std::vector<int>> support;
  for (std::size_t s = 0; s < nu.size(); ++s) {
    if (nu[static_cast<Mask>(s)] > 0.0) support.insert(plus_counts(static_cast<Mask>(s), a));
  }
  for (int b = 0; b < a.size(); ++b) {
    bool found = false;
    for (const auto& c : support) {
      auto up = c;
      ++up[b];  // M_A + 2 is one more + spin in A
      if (support.count(up)) {
        found = true;
        break;
      }
    }
    if (!found) {
      if (failing_block) *failing_block = b;
      return false;
    }
  }
  return true;
}

void require_irreducible(const ProbVec& nu, const SitePartition& a) {
  int b = -1;
  if (!is_irreducible(nu, a, &b)) {
    throw PreconditionError("measure is not irreducible: block " + std::to_string(b + 1) + " " +
                            block_sites(a, b));
  }
}

DensityProfile canonical_density(const ProbVec& nu, int particles, const SitePartition& a) {
  const auto m = magnetization_profile(nu, a);
  std::vector<int> counts(a.size());
  for (int b = 0; b < a.size(); ++b) {
    const double size = static_cast<double>(particles) * static_cast<double>(a.block(b).size());
    counts[b] = static_cast<int>(std::floor(size * (1.0 + m[b]) / 2.0 + kFloorAllowance));
    counts[b] = std::clamp(counts[b], 0, static_cast<int>(size));
  }
  return DensityProfile(a, particles, std::move(counts));
}

ProfileLattice::ProfileLattice(const ProbVec& nu, const SitePartition& a, int max_particles,
                               const std::vector<int>& keep)
    : a_(a) {
  if (nu.sites() != a.sites()) throw DomainError("measure and partition disagree on n");
  if (max_particles < 0) throw DomainError("particle count must be nonnegative");
  std::map<std::vector<int>, double> atoms;
  for (std::size_t s = 0; s < nu.size(); ++s) {
    const double p = nu[static_cast<Mask>(s)];
    if (p > 0.0) atoms[plus_counts(static_cast<Mask>(s), a)] += p;
  }
  for (const auto& [c, p] : atoms) {
    atoms_.push_back(c);
    atom_logp_.push_back(std::log(p));
  }
  const std::set<int> wanted(keep.begin(), keep.end());
  for (int m : wanted) {
    if (m < 0 || m > max_particles) throw DomainError("kept particle count out of range");
  }

  const int nb = a.size();
  std::vector<int> dims(nb, 1);
  std::vector<double> cur(1, 0.0);
  if (wanted.count(0)) layers_.push_back({0, dims, cur});
  std::vector<int> c(nb);
  for (int m = 1; m <= max_particles; ++m) {
    std::vector<int> nd(nb);
    for (int b = 0; b < nb; ++b) nd[b] = m * static_cast<int>(a.block(b).size()) + 1;
    std::vector<int> nstride(nb, 1);
    for (int b = 1; b < nb; ++b) nstride[b] = nstride[b - 1] * nd[b - 1];
    std::vector<double> next(static_cast<std::size_t>(nstride[nb - 1]) * nd[nb - 1], kNegInf);
    std::fill(c.begin(), c.end(), 0);
    for (std::size_t idx = 0; idx < cur.size(); ++idx) {
      if (cur[idx] != kNegInf) {
        std::size_t base = 0;
        for (int b = 0; b < nb; ++b) base += static_cast<std::size_t>(c[b]) * nstride[b];
        for (std::size_t t = 0; t < atoms_.size(); ++t) {
          std::size_t off = 0;
          for (int b = 0; b < nb; ++b) off += static_cast<std::size_t>(atoms_[t][b]) * nstride[b];
          double& slot = next[base + off];
          slot = log_add(slot, cur[idx] + atom_logp_[t]);
        }
      }
      for (int b = 0; b < nb && ++c[b] == dims[b]; ++b) c[b] = 0;
    }
    cur = std::move(next);
    dims = std::move(nd);
    if (wanted.count(m)) layers_.push_back({m, dims, cur});
  }
}

const ProfileLattice::Layer& ProfileLattice::layer(int m) const {
  for (const auto& l : layers_) {
    if (l.m == m) return l;
  }
  throw DomainError("particle count " + std::to_string(m) + " was not kept");
}

double ProfileLattice::log_prob(int m, const std::vector<int>& c) const {
  const Layer& l = layer(m);
  if (static_cast<int>(c.size()) != a_.size()) throw DomainError("count vector length");
  std::size_t idx = 0, stride = 1;
  for (int b = 0; b < a_.size(); ++b) {
    if (c[b] < 0 || c[b] >= l.dims[b]) return kNegInf;
    idx += static_cast<std::size_t>(c[b]) * stride;
    stride *= static_cast<std::size_t>(l.dims[b]);
  }
  return l.logp[idx];
}

std::vector<std::pair<std::vector<int>, double>> ProfileLattice::support(int m) const {
  const Layer& l = layer(m);
  std::vector<std::pair<std::vector<int>, double>> out;
  std::vector<int> c(a_.size(), 0);
  for (std::size_t idx = 0; idx < l.logp.size(); ++idx) {
    if (l.logp[idx] != kNegInf) out.emplace_back(c, l.logp[idx]);
    for (int b = 0; b < a_.size() && ++c[b] == l.dims[b]; ++b) c[b] = 0;
  }
  return out;
}

double log_restricted_mass(const ProbVec& nu, const DensityProfile& rho) {
  ProfileLattice lat(nu, rho.partition(), rho.particles(), {rho.particles()});
  return lat.log_prob(rho.particles(), rho.plus_counts());
}

namespace {

// Fills everything except the mass and ratio.
LocalCltComparison clt_gaussian(const ProbVec& nu, const DensityProfile& rho) {
  const SitePartition& a = rho.partition();
  const int nb = a.size();
  const int np = rho.particles();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(nb);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(nb, nb);
  for (std::size_t s = 0; s < nu.size(); ++s) {
    const double p = nu[static_cast<Mask>(s)];
    if (p == 0.0) continue;
    Eigen::VectorXd m(nb);
    const auto c = plus_counts(static_cast<Mask>(s), a);
    for (int b = 0; b < nb; ++b) m[b] = 2.0 * c[b] - static_cast<double>(a.block(b).size());
    mean += p * m;
    second += p * m * m.transpose();
  }
  const Eigen::MatrixXd cov = second - mean * mean.transpose();
  Eigen::VectorXd d(nb);
  for (int b = 0; b < nb; ++b) d[b] = rho.block_sum(b) - np * mean[b];
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);

  LocalCltComparison out;
  out.det_cov = cov.determinant();
  out.z_squared = d.dot(ldlt.solve(d)) / np;
  out.gaussian = std::pow(2.0, nb) * std::exp(-0.5 * out.z_squared) /
                 (std::pow(2.0 * std::numbers::pi * np, 0.5 * nb) * std::sqrt(out.det_cov));
  return out;
}

}  // namespace

LocalCltComparison local_clt(const ProbVec& nu, const DensityProfile& rho) {
  require_irreducible(nu, rho.partition());
  LocalCltComparison out = clt_gaussian(nu, rho);
  out.mass = std::exp(log_restricted_mass(nu, rho));
  out.ratio = out.mass / out.gaussian;
  return out;
}

ChaosReport chaos_scan(const ProbVec& nu, const SitePartition& a, int k,
                       const std::vector<int>& n_grid, const ProbVec* reference) {
  require_irreducible(nu, a);
  if (k < 1) throw DomainError("marginal order k must be positive");
  if (n_grid.empty()) throw DomainError("empty particle grid");
  for (int np : n_grid) {
    if (np < k) throw DomainError("every N in the grid must be at least k");
  }
  ChaosReport rep;
  rep.k = k;
  rep.relative_entropy = std::numeric_limits<double>::quiet_NaN();
  if (reference) {
    require_irreducible(*reference, a);
    const auto m1 = magnetization_profile(nu, a);
    const auto m2 = magnetization_profile(*reference, a);
    for (int b = 0; b < a.size(); ++b) {
      if (std::abs(m1[b] - m2[b]) > kProfileTolerance) {
        throw PreconditionError("reference has different block magnetizations");
      }
    }
    const auto h = relative_entropy(nu, *reference);
    if (!h.is_finite()) throw PreconditionError("nu is not absolutely continuous w.r.t. ref");
    rep.relative_entropy = h.value();
  }

  const int top = *std::max_element(n_grid.begin(), n_grid.end());
  std::vector<int> keep{k};
  std::vector<int> keep_ref;
  for (int np : n_grid) {
    keep.push_back(np);
    keep.push_back(np - k);
    keep.push_back(np - 1);
    keep_ref.push_back(np);
  }
  const ProfileLattice lat(nu, a, top, keep);
  std::unique_ptr<ProfileLattice> ref_lat;
  if (reference) ref_lat = std::make_unique<ProfileLattice>(*reference, a, top, keep_ref);
  const auto marginal = lat.support(k);

  for (int np : n_grid) {
    const DensityProfile rho = canonical_density(nu, np, a);
    const auto& x = rho.plus_counts();
    ChaosRow row;
    row.particles = np;
    row.plus_counts = x;
    row.log_mass = lat.log_prob(np, x);
    if (row.log_mass == kNegInf) throw Error("internal: canonical profile has zero mass");

    double tv = 0.0;
    for (const auto& [c, lp] : marginal) {
      std::vector<int> rest(x.size());
      for (std::size_t b = 0; b < x.size(); ++b) rest[b] = x[b] - c[b];
      const double lr = lat.log_prob(np - k, rest);
      const double ratio = lr == kNegInf ? 0.0 : std::exp(lr - row.log_mass);
      tv += std::exp(lp) * std::abs(ratio - 1.0);
    }
    row.tv = 0.5 * tv;
    row.clt_ratio = std::exp(row.log_mass) / clt_gaussian(nu, rho).gaussian;

    if (reference) {
      double first = 0.0;
      for (std::size_t s = 0; s < nu.size(); ++s) {
        const Mask sm = static_cast<Mask>(s);
        if (nu[sm] == 0.0) continue;
        const auto c = plus_counts(sm, a);
        std::vector<int> rest(x.size());
        for (std::size_t b = 0; b < x.size(); ++b) rest[b] = x[b] - c[b];
        const double lr = lat.log_prob(np - 1, rest);
        if (lr == kNegInf) continue;
        first += nu[sm] * std::exp(lr - row.log_mass) * std::log(nu[sm] / (*reference)[sm]);
      }
      const double ref_mass = ref_lat->log_prob(np, x);
      row.entropy_per_particle = first - (row.log_mass - ref_mass) / np;
      row.entropy_gap = std::abs(row.entropy_per_particle - rep.relative_entropy);
    }
    rep.rows.push_back(std::move(row));
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& r : rep.rows) {
    if (!(r.tv > 0.0)) continue;
    const double lx = std::log(static_cast<double>(r.particles)), ly = std::log(r.tv);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  const double den = cnt * sxx - sx * sx;
  rep.tv_slope = cnt >= 2 && den > 0.0 ? (cnt * sxy - sx * sy) / den
                                       : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

std::vector<FisherRow> fisher_chaos_check(const CollisionContext& ctx, const FieldVector& h,
                                          const std::vector<double>& f,
                                          const std::vector<int>& n_grid) {
  const int n = ctx.sites();
  const SitePartition& a = ctx.partition();
  if (!h.constant_on(a)) {
    throw PreconditionError("field is not constant on the irreducible components of K");
  }
  if (f.size() != state_count(n)) throw DomainError("density has the wrong length");
  const ProbVec mu = gibbs_measure(ctx.interaction(), h);
  std::vector<double> nu_w(f.size());
  double mass = 0.0;
  for (std::size_t s = 0; s < f.size(); ++s) {
    if (!(f[s] > 0.0)) throw PreconditionError("density must be positive");
    nu_w[s] = f[s] * mu[static_cast<Mask>(s)];
    mass += nu_w[s];
  }
  if (std::abs(mass - 1.0) > kProfileTolerance) {
    throw PreconditionError("density does not integrate to one under mu");
  }
  const ProbVec nu = ProbVec::normalized(n, nu_w);
  const auto m_nu = magnetization_profile(nu, a);
  const auto m_mu = magnetization_profile(mu, a);
  for (int b = 0; b < a.size(); ++b) {
    if (std::abs(m_nu[b] - m_mu[b]) > kProfileTolerance) {
      throw PreconditionError("f mu does not have the magnetizations of mu");
    }
  }
  require_irreducible(nu, a);
  const auto d = dissipation(ctx, f, mu);
  if (!d.is_finite()) throw PreconditionError("dissipation of f is infinite");
  const double target = 2.0 * d.value();

  std::vector<FisherRow> rows;
  for (int np : n_grid) {
    if (np < 2) throw DomainError("Fisher chaos needs N >= 2");
    const DensityProfile rho = canonical_density(mu, np, a);
    if (!(canonical_density(nu, np, a) == rho)) {
      throw Error("internal: nu and mu have different canonical densities");
    }
    const CanonicalMeasure m(ctx.interaction(), std::vector<FieldVector>(np, h), rho);
    std::vector<double> lg(m.size());
    for (std::size_t x = 0; x < m.size(); ++x) {
      double v = 0.0;
      for (int i = 0; i < np; ++i) {
        const Mask s = (m.key(x) >> (i * n)) & static_cast<Mask>(state_count(n) - 1);
        v += nu[s] > 0.0 ? std::log(nu[s]) : kNegInf;
      }
      lg[x] = v;
    }
    const double hi = *std::max_element(lg.begin(), lg.end());
    double z = 0.0;
    for (double v : lg) z += std::exp(v - hi);
    std::vector<double> fn(m.size()), logfn(m.size());
    for (std::size_t x = 0; x < m.size(); ++x) {
      const double gamma = std::exp(lg[x] - hi) / z;
      fn[x] = gamma / m.prob(x);
      logfn[x] = std::log(fn[x]);
    }
    FisherRow row;
    row.particles = np;
    row.states = m.size();
    row.value = dirichlet_form(ctx, m, fn, logfn) / np;
    row.target = target;
    row.gap = std::abs(row.value - target);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spinkac
