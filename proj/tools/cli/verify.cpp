// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "spinkac/chaos.hpp"
#include "spinkac/collision.hpp"
#include "spinkac/down_up.hpp"
#include "spinkac/dynamics.hpp"
#include "spinkac/error.hpp"
#include "spinkac/gibbs.hpp"
#include "spinkac/instances.hpp"
#include "spinkac/kac.hpp"
#include "spinkac/markov.hpp"
#include "spinkac/wild_tree.hpp"

namespace spinkac::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Collects elementary checks into the criterion table.
class Checks {
 public:
  explicit Checks(CriterionResult& r) : r_(r) {}

  bool add(const std::string& check, const std::string& instance, double measured,
           double limit, bool ok) {
    r_.table.add_row({check, instance, measured, limit, std::int64_t{ok ? 1 : 0}});
    if (!ok) {
      r_.passed = false;
      if (first_failure_.empty()) first_failure_ = check + " on " + instance + " = " + fmt(measured);
    }
    return ok;
  }
  bool at_most(const std::string& check, const std::string& instance, double v, double limit) {
    return add(check, instance, v, limit, v <= limit);
  }
  bool at_least(const std::string& check, const std::string& instance, double v, double limit) {
    return add(check, instance, v, limit, v >= limit);
  }
  const std::string& first_failure() const { return first_failure_; }

 private:
  CriterionResult& r_;
  std::string first_failure_;
};

std::string describe(int n, const std::string& kernel, int index) {
  return "#" + std::to_string(index) + " n=" + std::to_string(n) + " " + kernel;
}

struct ModelInstance {
  CollisionContext ctx;
  std::string kernel;
};

const char* kFamilies[] = {"single-site", "mean-field", "blocks", "random-kernel"};

TransportKernel kernel_of_family(int family, int n, Rng& rng) {
  switch (family % 4) {
    case 0: return TransportKernel::single_site(n);
    case 1: return TransportKernel::mean_field(n);
    case 2: return TransportKernel::blocks(random_partition(n, 2, rng));
    default: return random_kernel_with_components(random_partition(n, 2, rng), rng);
  }
}

ModelInstance random_model(int n, int family, const InteractionMatrix& j, Rng& rng) {
  return {CollisionContext(j, kernel_of_family(family, n, rng)), kFamilies[family % 4]};
}

// Seeds handed to library routines; make_rng streams below 2^20 are used
// for instance generation.
std::uint64_t sub_seed(const VerifyOptions& o, int k) {
  return seed_split(o.seed, (std::uint64_t{1} << 20) + static_cast<std::uint64_t>(k));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

// Admissible interaction for the rate theorem: J nonnegative definite with
// small row sums so that the bound, and hence 1/alpha, stays moderate.
InteractionMatrix admissible_interaction(int n, double lambda, Rng& rng) {
  return random_psd_interaction(n, lambda, rng);
}

// ---------------------------------------------------------------------------

void stationarity(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  const int models = o.quick ? 20 : 100;
  double worst = 0.0;
  for (int i = 0; i < models; ++i) {
    Rng rng = make_rng(o.seed, 100 + i);
    const int n = 1 + i % 4;
    auto m = random_model(n, i % 4, random_symmetric_interaction(n, 1.0, rng), rng);
    const auto h = random_block_field(m.ctx.partition(), 1.0, rng);
    const double res = stationarity_residual(m.ctx, gibbs_measure(m.ctx.interaction(), h));
    worst = std::max(worst, res);
    c.at_most("residual", describe(n, m.kernel, i), res, 1e-12);
  }
  r.summary = "max |mu o mu - mu| = " + fmt(worst) + " over " + std::to_string(models) + " models";
}

// Trajectories shared by the conservation and H-theorem criteria.
struct TrajectoryCase {
  ModelInstance model;
  ProbVec p0;
  std::string name;
};

std::vector<TrajectoryCase> trajectory_cases(const VerifyOptions& o, int count) {
  std::vector<TrajectoryCase> out;
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(o.seed, 200 + i);
    const int n = 2 + i % 3;
    auto m = random_model(n, i % 4, random_symmetric_interaction(n, 0.8, rng), rng);
    auto p0 = random_positive_measure(n, 1.5, rng);
    const std::string name = describe(n, m.kernel, i);
    out.push_back({std::move(m), std::move(p0), name});
  }
  return out;
}

void conservation(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  const auto cases = trajectory_cases(o, o.quick ? 10 : 30);
  double worst = 0.0;
  for (const auto& tc : cases) {
    const auto traj = evolve(tc.model.ctx, tc.p0, 20.0, 0.01, {.execution = o.execution});
    double drift = traj.max_profile_drift;
    for (const auto& p : traj.states) {
      drift = std::max(drift, max_abs_diff(magnetization_profile(p, traj.partition),
                                            traj.initial_profile));
    }
    worst = std::max(worst, drift);
    c.at_most("profile_drift", tc.name, drift, 1e-10);
  }
  r.summary = "max |m(p_t,A) - m(p_0,A)| = " + fmt(worst) + " over " +
              std::to_string(cases.size()) + " trajectories";
}

void h_theorem(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  const auto cases = trajectory_cases(o, o.quick ? 5 : 15);
  const int samples = 50;
  const double h = 1e-3;
  double worst = 0.0;
  for (const auto& tc : cases) {
    const auto& ctx = tc.model.ctx;
    const auto traj = evolve(ctx, tc.p0, 20.0, 0.01, {.execution = o.execution});
    const ProbVec& mu = traj.equilibrium;
    double case_worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      // Stored states sit on the 0.01 grid; sample 50 of them across (0, 20).
      const std::size_t idx = 1 + static_cast<std::size_t>(s) * (traj.states.size() - 3) /
                                      (samples - 1);
      const auto local = evolve(ctx, traj.states[idx], 2 * h, h);
      const double slope = (relative_entropy(local.states[2], mu).value() -
                            relative_entropy(local.states[0], mu).value()) /
                           (local.times[2] - local.times[0]);
      const double d = dissipation(ctx, density(local.states[1], mu), mu).value();
      case_worst = std::max(case_worst, std::abs(slope + d));
    }
    worst = std::max(worst, case_worst);
    c.at_most("max_abs(dH/dt + D)", tc.name, case_worst, 1e-5);
  }
  r.summary = "max |dH/dt + D| = " + fmt(worst) + " at " + std::to_string(samples) +
              " times on each of " + std::to_string(cases.size()) + " trajectories";
}

void convergence(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  const int count = o.quick ? 10 : 30;
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(o.seed, 400 + i);
    const int n = 2 + i % 3;
    const auto j = admissible_interaction(n, 0.02 * (1 + i % 3), rng);
    auto m = random_model(n, i % 4, j, rng);
    const auto bound = alpha_bound(j);
    if (!c.add("bound_applicable", describe(n, m.kernel, i), bound.value, kNaN,
               bound.applicable)) {
      continue;
    }
    const double t_end = 200.0 / bound.value;
    const auto p0 = random_positive_measure(n, 1.5, rng);
    const auto traj = evolve(m.ctx, p0, t_end, 0.1,
                             {.store_stride = 1 << 30, .execution = o.execution});
    const double tv = tv_distance(traj.states.back(), traj.equilibrium);
    worst = std::max(worst, tv);
    c.at_most("tv(p_T, mu)", describe(n, m.kernel, i) + " T=" + fmt(t_end), tv, 1e-6);
  }
  r.summary = "max tv(p_T, mu_{J,h}) = " + fmt(worst) + " at T = 200/alpha over " +
              std::to_string(count) + " instances";
}

void decay_rate(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  const int count = o.quick ? 10 : 30;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(o.seed, 500 + i);
    const int n = 2 + i % 3;
    const auto j = admissible_interaction(n, 0.1 * (1 + i % 4), rng);
    auto m = random_model(n, i % 4, j, rng);
    const auto bound = alpha_bound(j);
    const std::string name = describe(n, m.kernel, i) + " lambda=" + fmt(bound.lambda);
    if (!c.add("bound_applicable", name, bound.value, kNaN, bound.applicable)) continue;
    const auto traj = evolve(m.ctx, random_positive_measure(n, 1.5, rng), 60.0, 0.05,
                             {.store_stride = 10, .execution = o.execution});
    const auto rep = decay_report(m.ctx, traj, false);
    const double limit = 0.95 * bound.value;
    c.at_least("alpha_fit", name, rep.alpha_fit, limit);
    worst_margin = std::min(worst_margin, rep.alpha_fit / bound.value);
  }

  // One spin without interaction: the claimed rate is 1/4 within 1%.
  CollisionContext one(InteractionMatrix(1), TransportKernel::single_site(1));
  const double target = 0.99 * 0.25;
  try {
    const auto traj = evolve(one, ProbVec(1, {1.0, 0.0}), 20.0, 0.05);
    const auto rep = decay_report(one, traj, false);
    c.at_least("alpha_fit", "n=1 J=0 p0=(1,0)", rep.alpha_fit, target);
  } catch (const Error& e) {
    c.add("alpha_fit", std::string("n=1 J=0 p0=(1,0): ") + e.what(), kNaN, target, false);
  }
  const auto traj = evolve(one, ProbVec(1, {0.75, 0.25}), 20.0, 0.05);
  const auto rep = decay_report(one, traj, false);
  if (rep.entropy_vanishes) {
    c.add("alpha_fit", "n=1 J=0 p0=(3/4,1/4): H(p_t|mu) = 0 for all t, no rate to fit", kNaN,
          target, false);
  } else {
    c.at_least("alpha_fit", "n=1 J=0 p0=(3/4,1/4)", rep.alpha_fit, target);
  }
  r.summary = "min alpha_fit / alpha_bound = " + fmt(worst_margin) + " over " +
              std::to_string(count) + " instances";
}

void nonlinear_mlsi(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  const int count = o.quick ? 5 : 15;
  // Some draws are discarded (entropy below the noise floor); draw enough
  // that at least 1000 are kept.
  const int trials = o.quick ? 1200 : 5000;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(o.seed, 600 + i);
    const int n = 2 + i % 3;
    const auto j = admissible_interaction(n, 0.1 + 0.08 * (i % 5), rng);
    // Single-site kernels leave nothing to scan at fixed site magnetizations
    // when n is small, so use the block and random families.
    auto m = random_model(n, 1 + i % 3, j, rng);
    const auto h = random_block_field(m.ctx.partition(), 0.5, rng);
    const auto res = nonlinear_mlsi_scan(m.ctx, h, trials, sub_seed(o, i), o.execution);
    const double bound = alpha_bound(j).value;
    const std::string name = describe(n, m.kernel, i) + " accepted=" + std::to_string(res.accepted);
    c.at_least("accepted samples", name, res.accepted, 1000);
    c.at_least("min D/Ent", name, res.min_ratio, bound);
    worst = std::min(worst, res.min_ratio / bound);
  }
  r.summary = "no counterexample found; min ratio / alpha_bound = " + fmt(worst) + " over " +
              std::to_string(count) + " instances";
}

void wild_tree(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  const long samples = o.quick ? 100000 : 400000;
  double worst_z = 0.0;
  const int count = 3;
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(o.seed, 700 + i);
    const int n = 1 + i;
    auto m = random_model(n, 1 + i % 3, random_symmetric_interaction(n, 0.7, rng), rng);
    const auto p0 = random_positive_measure(n, 1.0, rng);
    const double t = 1.0;
    const auto exact = evolve(m.ctx, p0, t, 1e-3, {.store_stride = 1 << 30, .execution = o.execution}).states.back();
    const auto est = mc_solution(m.ctx, p0, t, samples, sub_seed(o, i), o.execution);
    double z = 0.0;
    for (std::size_t s = 0; s < est.mean.size(); ++s) {
      const double dev = std::abs(est.mean[s] - exact[static_cast<Mask>(s)]);
      z = std::max(z, est.std_error[s] > 0.0 ? dev / est.std_error[s] : (dev > 1e-12 ? 1e9 : 0.0));
    }
    worst_z = std::max(worst_z, z);
    c.at_most("max |mc - evolve| / stderr", describe(n, m.kernel, i), z, 3.0);
  }
  r.summary = "max deviation " + fmt(worst_z) + " sigma over " + std::to_string(count) +
              " instances with " + std::to_string(samples) + " trees each";
}

void marked_partitions(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  const long runs = o.quick ? 100000 : 400000;
  double worst_z = 0.0;
  for (int u = 1; u <= 4; ++u) {
    Rng rng = make_rng(o.seed, 800 + u);
    const int n = 3;
    auto m = random_model(n, 1 + u % 3, InteractionMatrix(n), rng);
    std::vector<ProbVec> p;
    for (int i = 0; i < (1 << u); ++i) p.push_back(random_positive_measure(n, 1.0, rng));
    const auto chk = mpp_representation_check(m.ctx, p, u, runs, sub_seed(o, u));
    worst_z = std::max(worst_z, chk.max_z);
    c.at_most("representation max z", describe(n, m.kernel, u) + " u=" + std::to_string(u),
              chk.max_z, 3.0);
  }
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (int n : {2, 4, 8}) {
    const auto tail = fragmentation_tail(n, o.quick ? 20000 : 100000, sub_seed(o, n), 12 * n);
    // Largest P(H >= u) - bound(u) - 3 sigma(u); must stay <= 0.
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < tail.u.size(); ++k) {
      worst_gap = std::max(worst_gap, tail.empirical[k] - tail.bound[k] - 3.0 * tail.std_error[k]);
    }
    worst_excess = std::max(worst_excess, worst_gap);
    c.at_most("max P(H>=u) - n exp(-u/2n) - 3 sigma", "n=" + std::to_string(n), worst_gap, 0.0);
  }
  r.summary = "representation within " + fmt(worst_z) + " sigma for u <= 4; tail excess " +
              fmt(worst_excess) + " <= 0 for n in {2,4,8}";
}

void kac_system(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  struct Case {
    int n, np;
    bool singletons;
  };
  const std::vector<Case> decay_cases = {{1, 6, false}, {2, 3, false}, {2, 4, true},
                                         {2, 5, false}, {3, 3, true}, {1, 10, false}};
  double worst_decay = -std::numeric_limits<double>::infinity();
  int index = 0;
  for (const auto& dc : decay_cases) {
    Rng rng = make_rng(o.seed, 900 + index);
    const auto j = dc.n == 1 ? InteractionMatrix(1) : admissible_interaction(dc.n, 0.2, rng);
    const auto a = dc.singletons ? SitePartition::singletons(dc.n) : SitePartition::whole(dc.n);
    CollisionContext ctx(j, TransportKernel::blocks(a));
    std::vector<int> counts;
    for (int b = 0; b < a.size(); ++b) {
      counts.push_back(static_cast<int>(a.block(b).size()) * dc.np / 2);
    }
    CanonicalMeasure mu(j, {}, DensityProfile(a, dc.np, counts));
    const auto q = particle_generator(ctx, mu);
    std::vector<double> nu0(mu.size(), 0.0);
    nu0[static_cast<std::size_t>(uniform_int(rng, static_cast<int>(mu.size())))] = 1.0;
    std::vector<double> times;
    for (int t = 0; t <= 40; ++t) times.push_back(0.25 * t);
    const auto d = particle_entropy_decay(q, mu, nu0, times);
    const double alpha = alpha_bound(j).value;
    double excess = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < times.size(); ++t) {
      excess = std::max(excess,
                        d.entropy[t] - d.entropy[0] * std::exp(-alpha * times[t]) * (1.0 + 1e-9));
    }
    worst_decay = std::max(worst_decay, excess);
    c.at_most("max H(nu_t) - H(nu_0) exp(-alpha t)(1+1e-9)",
              "N=" + std::to_string(dc.np) + " n=" + std::to_string(dc.n) +
                  (dc.singletons ? " singletons" : " one block"),
              excess, 0.0);
    ++index;
  }

  const int trials = o.quick ? 1000 : 4000;
  double worst_ratio = std::numeric_limits<double>::infinity();
  int scans = 0;
  for (int variant = 0; variant < 2; ++variant) {
    Rng rng = make_rng(o.seed, 950 + variant);
    const int n = 2;
    const auto j = admissible_interaction(n, 0.25, rng);
    const auto a = variant == 0 ? SitePartition::whole(n) : SitePartition::singletons(n);
    CollisionContext ctx(j, TransportKernel::blocks(a));
    const double alpha = alpha_bound(j).value;
    for (int np = 2; np <= 4; ++np) {
      for (const auto& rho : DensityProfile::all(a, np)) {
        CanonicalMeasure mu(j, {}, rho);
        if (mu.size() < 2) continue;
        const auto q = particle_generator(ctx, mu);
        const auto res = particle_mlsi_scan(q, mu, trials, sub_seed(o, scans), o.execution);
        std::string counts;
        for (int b = 0; b < a.size(); ++b) counts += (b ? "/" : "") + std::to_string(rho.plus_count(b));
        c.at_least("min E(F,logF)/Ent F", "N=" + std::to_string(np) + " plus=" + counts +
                                              (variant ? " singletons" : " one block"),
                   res.min_ratio, alpha);
        worst_ratio = std::min(worst_ratio, res.min_ratio / alpha);
        ++scans;
      }
    }
  }
  r.summary = "decay excess " + fmt(worst_decay) + " <= 0 on " +
              std::to_string(decay_cases.size()) + " instances; MLSI min / alpha = " +
              fmt(worst_ratio) + " over " + std::to_string(scans) + " (N, rho) pairs";
}

void chaos(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  // Local CLT at N = 200.
  std::vector<std::pair<std::string, std::pair<ProbVec, SitePartition>>> clt_cases;
  clt_cases.push_back({"n=1 nu(+)=0.35", {ProbVec(1, {0.65, 0.35}), SitePartition::whole(1)}});
  {
    Rng rng = make_rng(o.seed, 1000);
    clt_cases.push_back(
        {"n=2 one block", {random_positive_measure(2, 1.0, rng), SitePartition::whole(2)}});
    clt_cases.push_back(
        {"n=2 singletons", {random_positive_measure(2, 1.0, rng), SitePartition::singletons(2)}});
  }
  double worst_clt = 0.0;
  for (const auto& [name, data] : clt_cases) {
    const auto& [nu, a] = data;
    const auto cmp = local_clt(nu, canonical_density(nu, 200, a));
    worst_clt = std::max(worst_clt, std::abs(cmp.ratio - 1.0));
    c.at_most("|mass/gaussian - 1| at N=200", name, std::abs(cmp.ratio - 1.0), 0.05);
  }

  // Marginal chaos slope.
  const std::vector<int> grid = {8, 16, 32, 64, 128, 256};
  std::vector<std::pair<std::string, double>> slopes;
  {
    const auto rep = chaos_scan(ProbVec(1, {5.0 / 8.0, 3.0 / 8.0}), SitePartition::whole(1), 2, grid);
    slopes.push_back({"n=1 nu(+)=3/8 k=2", rep.tv_slope});
  }
  {
    // Mixture of two product measures on two sites, one block.
    const auto p1 = product_bernoulli({0.8, 0.3});
    const auto p2 = product_bernoulli({0.25, 0.6});
    std::vector<double> w(4);
    for (unsigned s = 0; s < 4; ++s) w[s] = 0.6 * p1[s] + 0.4 * p2[s];
    const auto rep = chaos_scan(ProbVec::normalized(2, w), SitePartition::whole(2), 1, grid);
    slopes.push_back({"n=2 mixture k=1", rep.tv_slope});
  }
  for (const auto& [name, slope] : slopes) {
    c.add("tv slope (target -1 +- 0.1)", name, slope, -1.0, std::abs(slope + 1.0) <= 0.1);
  }

  // Entropic chaos at N = 128 on two sites.
  Rng rng = make_rng(o.seed, 1001);
  const auto a = SitePartition::whole(2);
  const auto nu = random_positive_measure(2, 1.0, rng);
  const auto j = random_symmetric_interaction(2, 0.5, rng);
  const auto h = solve_field(j, a, magnetization_profile(nu, a));
  const auto ref = gibbs_measure(j, h);
  const auto rep = chaos_scan(nu, a, 1, {128}, &ref);
  const double gap = rep.rows.front().entropy_gap;
  c.at_most("|H_N/N - H(nu|mu)| at N=128", "n=2 one block vs Gibbs reference", gap, 0.05);

  r.summary = "CLT ratio within " + fmt(worst_clt) + "; TV slopes " + fmt(slopes[0].second) +
              ", " + fmt(slopes[1].second) + "; entropic gap " + fmt(gap) + " at N=128";
}

void fisher(CriterionResult& r, const VerifyOptions&, Checks& c) {
  const std::vector<int> grid = {2, 4, 6, 8};
  std::string detail;
  for (int variant = 0; variant < 2; ++variant) {
    const int n = 2;
    const auto a = SitePartition::whole(n);
    InteractionMatrix j(n);
    FieldVector h(n);
    std::vector<double> f;
    std::string name;
    if (variant == 0) {
      // Zero magnetization on both sites, correlated spins.
      const double cpl = 0.35;
      f = {4.0 * cpl, 4.0 * (0.5 - cpl), 4.0 * (0.5 - cpl), 4.0 * cpl};
      name = "J=0 mean-field, nu(++)=0.35";
    } else {
      j = InteractionMatrix(n, {0.0, 0.3, 0.3, 0.0});
      // At block magnetization 0 the plus count N of the canonical profile
      // is exact and of one parity across the grid.
      h = solve_field(j, a, {0.0});
      const auto mu = gibbs_measure(j, h);
      // nu = mu tilted along s_1 s_2, then pulled back to magnetization 0.
      std::vector<double> logw(state_count(n));
      for (std::size_t s = 0; s < logw.size(); ++s) {
        const auto x = static_cast<Mask>(s);
        logw[s] = std::log(mu[x]) + 0.8 * spin_of(x, 0) * spin_of(x, 1);
      }
      const auto tilt = solve_block_tilt(n, logw, a, {0.0});
      for (std::size_t s = 0; s < logw.size(); ++s) {
        const auto x = static_cast<Mask>(s);
        logw[s] += tilt[0] * (spin_of(x, 0) + spin_of(x, 1)) / 2.0;
      }
      const auto nu = normalize_log_weights(n, logw);
      f.resize(logw.size());
      for (std::size_t s = 0; s < logw.size(); ++s) {
        f[s] = nu[static_cast<Mask>(s)] / mu[static_cast<Mask>(s)];
      }
      name = "J_12=0.3, m=0, nu tilted along s_1 s_2";
    }
    CollisionContext ctx(j, TransportKernel::blocks(a));
    const auto rows = fisher_chaos_check(ctx, h, f, grid);
    bool monotone = true;
    std::string gaps;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      gaps += (k ? " " : "") + fmt(rows[k].gap);
      if (k > 0 && !(rows[k].gap < rows[k - 1].gap)) monotone = false;
      const std::string at = name + " N=" + std::to_string(rows[k].particles);
      c.add("(1/N) E(F_N, log F_N) vs 2 D(f)", at, rows[k].value, rows[k].target, true);
      c.add("gap", at, rows[k].gap, kNaN, true);
    }
    c.add("gap strictly decreasing", name, rows.back().gap, rows.front().gap, monotone);
    detail += (variant ? "; " : "") + gaps;
  }
  r.summary = "gaps over N=2,4,6,8: " + detail;
}

void down_up(CriterionResult& r, const VerifyOptions& o, Checks& c) {
  const int trials = o.quick ? 1000 : 4000;
  const double lambda = 0.3;
  auto random_w = [](int l, Rng& rng) {
    std::vector<double> w(l);
    for (double& x : w) x = 0.5 * standard_normal(rng);
    return w;
  };
  double worst_single = std::numeric_limits<double>::infinity();
  double worst_multi = std::numeric_limits<double>::infinity();
  double worst_fact = std::numeric_limits<double>::infinity();

  // Single block scans, with the spectral gap cross-check.
  const std::vector<std::pair<int, int>> single = {{8, 0}, {10, 2}, {12, 0}};
  for (std::size_t i = 0; i < single.size(); ++i) {
    const auto [l, mag] = single[i];
    Rng rng = make_rng(o.seed, 1200 + i);
    const auto lam = random_psd_interaction(l, lambda, rng);
    DuInstance inst = DuInstance::single_block(l, lam.entries(), random_w(l, rng), mag);
    DuMeasure m(inst);
    const std::string name = "L=" + std::to_string(l) + " M=" + std::to_string(mag);
    const auto res = du_mlsi_scan(m, trials, sub_seed(o, 40 + i), o.execution);
    c.at_least("scan min (single block)", name, res.scan.min_ratio, res.constant);
    worst_single = std::min(worst_single, res.scan.min_ratio / res.constant);
    if (!std::isnan(res.gap)) {
      c.add("linearized ratio vs 2 gap", name, res.linearized_ratio, 2.0 * res.gap,
            std::abs(res.linearized_ratio - 2.0 * res.gap) <= 1e-3 * 2.0 * res.gap);
      c.at_most("scan min <= 2 gap (1 + 1e-3)", name, res.scan.min_ratio,
                2.0 * res.gap * (1.0 + 1e-3));
    }
    const auto fact = factorization_check(m, trials / 4, sub_seed(o, 50 + i), o.execution);
    c.add("block factorization (single block)", name, fact.block_min_ratio, 1.0,
          std::abs(fact.block_min_ratio - 1.0) <= 1e-9);
    c.at_most("Jensen Ent_g <= Cov_g", name, fact.jensen_max_excess, 1e-12);
  }
  {
    DuMeasure free(DuInstance::single_block(10, std::vector<double>(100, 0.0),
                                            std::vector<double>(10, 0.0), 0));
    const auto res = du_mlsi_scan(free, trials, sub_seed(o, 45), o.execution);
    c.at_least("scan min (Lambda=0)", "L=10 M=0 w=0", res.scan.min_ratio, 1.0);
  }

  // Multicomponent scans and factorization.
  struct Multi {
    int l;
    std::vector<std::vector<int>> blocks;
    std::vector<int> mags;
  };
  const std::vector<Multi> multi = {{8, {{0, 1, 2, 3}, {4, 5, 6, 7}}, {0, 0}},
                                    {12, {{0, 2, 4, 6, 8, 10}, {1, 3, 5, 7, 9, 11}}, {0, 2}},
                                    {9, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}, {1, -1, 1}}};
  for (std::size_t i = 0; i < multi.size(); ++i) {
    const auto& mc = multi[i];
    Rng rng = make_rng(o.seed, 1250 + i);
    const auto lam = random_psd_interaction(mc.l, lambda, rng);
    DuInstance inst(mc.l, lam.entries(), random_w(mc.l, rng), SitePartition(mc.l, mc.blocks),
                    mc.mags);
    DuMeasure m(inst);
    const std::string name = "L=" + std::to_string(mc.l) + " blocks=" +
                             std::to_string(mc.blocks.size());
    const auto res = du_mlsi_scan(m, trials, sub_seed(o, 60 + i), o.execution);
    c.at_least("scan min (multicomponent)", name, res.scan.min_ratio, res.constant);
    worst_multi = std::min(worst_multi, res.scan.min_ratio / res.constant);
    const auto fact = factorization_check(m, trials, sub_seed(o, 70 + i), o.execution);
    c.at_least("entropy factorization", name, fact.block_min_ratio, fact.constant - 1e-9);
    c.at_most("Jensen Ent_g <= Cov_g", name, fact.jensen_max_excess, 1e-12);
    worst_fact = std::min(worst_fact, fact.block_min_ratio / fact.constant);
  }

  // Covariance bound over tilts.
  double worst_cov = 0.0;
  const int tilts = o.quick ? 1000 : 4000;
  for (int i = 0; i < 3; ++i) {
    Rng rng = make_rng(o.seed, 1300 + i);
    const int l = 14 - 2 * i;
    const double lam_top = i == 2 ? 0.0 : (i == 0 ? 0.4 : lambda);
    const auto lam = i == 2 ? std::vector<double>(l * l, 0.0)
                            : random_psd_interaction(l, lam_top, rng).entries();
    DuInstance inst = DuInstance::single_block(l, lam, random_w(l, rng), 0);
    const auto res = cov_bound_check(inst, tilts, sub_seed(o, 80 + i), o.execution);
    const std::string name = "L=" + std::to_string(l) + " lambda=" + fmt(lam_top) +
                             (res.regularized ? " (regularized)" : "");
    c.at_most("max eig Cov[T_v nu]", name, res.max_eigenvalue, res.bound + 1e-9);
    worst_cov = std::max(worst_cov, res.max_eigenvalue / res.bound);
  }

  // Negative correlation at Lambda = 0, untilted and tilted.
  double worst_corr = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    Rng rng = make_rng(o.seed, 1350 + i);
    const int l = 6 + 2 * i;
    DuMeasure m(DuInstance::single_block(l, std::vector<double>(l * l, 0.0),
                                         i == 0 ? std::vector<double>(l, 0.0) : random_w(l, rng),
                                         i % 2 == 0 ? 0 : 2));
    const double v = strong_rayleigh_negcorr_check(m);
    worst_corr = std::max(worst_corr, v);
    c.at_most("max off-diagonal covariance", "L=" + std::to_string(l), v, 1e-12);
  }

  // Relaxed eigenvalue condition, logged only.
  {
    const int l = 6;
    std::vector<double> lam(l * l, 0.7 / l);
    const auto rc = relaxed_condition(DuInstance::single_block(l, lam, std::vector<double>(l, 0.0), 0));
    c.add("relaxed condition differs (logged)", "L=6 Lambda=0.7/L 11^T", rc.differs ? 1.0 : 0.0,
          kNaN, true);
  }

  // Particle walk against the Down-Up walk.
  double worst_bridge = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    Rng rng = make_rng(o.seed, 1400 + i);
    const int n = 2, np = 3 + i % 2;
    const auto j = admissible_interaction(n, 0.2, rng);
    std::vector<FieldVector> fields;
    for (int p = 0; p < np; ++p) {
      fields.emplace_back(std::vector<double>{0.3 * standard_normal(rng), 0.3 * standard_normal(rng)});
    }
    const int plus = 2 + i;
    const auto res = bridge_check(j, fields, plus, trials / 4, sub_seed(o, 90 + i), o.execution);
    c.at_least("Ebar / E^du", "N=" + std::to_string(np) + " plus=" + std::to_string(plus) +
                                  (res.hole_walk ? " (holes)" : ""),
               res.min_ratio, res.constant);
    worst_bridge = std::min(worst_bridge, res.min_ratio / res.constant);
  }

  r.summary = "scan min / constant: single " + fmt(worst_single) + ", multi " + fmt(worst_multi) +
              "; factorization / constant " + fmt(worst_fact) + "; cov eig / bound " +
              fmt(worst_cov) + "; max corr " + fmt(worst_corr) + "; bridge / constant " +
              fmt(worst_bridge);
}

struct Entry {
  int id;
  const char* title;
  void (*fn)(CriterionResult&, const VerifyOptions&, Checks&);
  double time_limit;  // seconds, or 0 for none
};

const Entry kEntries[] = {
    {1, "stationarity of Gibbs measures", stationarity, 10.0},
    {2, "conservation of magnetization profiles", conservation, 0.0},
    {3, "H-theorem: dH/dt = -D", h_theorem, 0.0},
    {4, "convergence to the solved equilibrium", convergence, 0.0},
    {5, "entropy decay rate", decay_rate, 0.0},
    {6, "nonlinear MLSI scan", nonlinear_mlsi, 0.0},
    {7, "wild-tree representation", wild_tree, 120.0},
    {8, "marked partition process", marked_partitions, 0.0},
    {9, "Kac system decay and MLSI", kac_system, 0.0},
    {10, "chaos program", chaos, 300.0},
    {11, "Fisher information chaos", fisher, 0.0},
    {12, "Down-Up MLSI, factorization and covariance", down_up, 300.0},
};

const Entry& entry(int id) {
  for (const auto& e : kEntries) {
    if (e.id == id) return e;
  }
  throw DomainError("unknown criterion " + std::to_string(id));
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& e : kEntries) ids.push_back(e.id);
  return ids;
}

std::string criterion_title(int id) {
  if (id == 13) return "reproducibility of verify-all";
  return entry(id).title;
}

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
  const Entry& e = entry(id);
  CriterionResult r;
  r.id = id;
  r.title = e.title;
  r.passed = true;
  r.table.set_meta("claim", e.title);
  r.table.set_meta("criterion", std::to_string(id));
  r.table.set_meta("seed", std::to_string(opts.seed));
  r.table.set_meta("mode", opts.quick ? "quick" : "full");
  r.table.set_meta("build", build_id());
  Checks checks(r);
  VerifyOptions o = opts;
  o.seed = seed_split(opts.seed, static_cast<std::uint64_t>(id));
  const auto t0 = std::chrono::steady_clock::now();
  try {
    e.fn(r, o, checks);
  } catch (const Error& err) {
    checks.add("completed", std::string("error: ") + err.what(), kNaN, kNaN, false);
    r.summary = std::string("error: ") + err.what();
  }
  r.seconds = seconds_since(t0);
  if (e.time_limit > 0.0 && r.seconds > e.time_limit) {
    r.passed = false;
    r.summary += "; runtime " + fmt(r.seconds) + " s exceeds " + fmt(e.time_limit) + " s";
  }
  if (!r.passed && !checks.first_failure().empty()) {
    r.summary += "; first failure: " + checks.first_failure();
  }
  return r;
}

}  // namespace spinkac::cli
