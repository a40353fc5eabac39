// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "model.hpp"
#include "spinkac/chaos.hpp"
#include "spinkac/down_up.hpp"
#include "spinkac/dynamics.hpp"
#include "spinkac/error.hpp"
#include "spinkac/gibbs.hpp"
#include "spinkac/instances.hpp"
#include "spinkac/kac.hpp"
#include "spinkac/wild_tree.hpp"
#include "table.hpp"
#include "verify.hpp"

namespace spinkac::cli {

namespace {

struct Global {
  int threads = 0;
  std::string reduction = "deterministic";
  bool timing = false;
  std::unique_ptr<WorkerPool> pool;

  Execution execution() {
    if (!pool) pool = std::make_unique<WorkerPool>(threads);
    return {pool.get(), reduction == "fast" ? Reduction::kFast : Reduction::kDeterministic};
  }
};

using Clock = std::chrono::steady_clock;

void finish(ResultTable& t, const Global& g, Clock::time_point t0, const std::string& out) {
  if (g.timing) {
    t.set_meta("wall_seconds",
               format_cell(std::chrono::duration<double>(Clock::now() - t0).count()));
  }
  t.save(out);
}

void stamp(ResultTable& t, const std::string& command, const std::string& claim,
           std::uint64_t seed, const Global& g) {
  t.set_meta("command", command);
  t.set_meta("claim", claim);
  t.set_meta("seed", std::to_string(seed));
  t.set_meta("reduction", g.reduction);
  t.set_meta("build", build_id());
}

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::getline(in, tok);
      continue;
    }
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError(path + ": not a number: '" + tok + "'");
    }
  }
  return out;
}

// uniform | delta:MASK | FILE. MASK is either a string of '+'/'-' for sites
// 1..n or an integer with bit l-1 set for a plus spin at site l.
ProbVec initial_measure(const std::string& spec, int n) {
  if (spec == "uniform") return ProbVec::uniform(n);
  if (spec.rfind("delta:", 0) == 0) {
    const std::string m = spec.substr(6);
    Mask mask = 0;
    if (!m.empty() && m.find_first_not_of("+-") == std::string::npos) {
      if (static_cast<int>(m.size()) != n) {
        throw ParseError("delta configuration '" + m + "' needs " + std::to_string(n) + " spins");
      }
      for (int l = 0; l < n; ++l) {
        if (m[l] == '+') mask |= Mask{1} << l;
      }
    } else {
      try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(m, &used);
        if (used != m.size() || v >= state_count(n)) throw std::out_of_range(m);
        mask = static_cast<Mask>(v);
      } catch (const std::exception&) {
        throw ParseError("invalid delta mask '" + m + "'");
      }
    }
    return ProbVec::point_mass(n, mask);
  }
  const auto w = read_numbers(spec);
  if (w.size() != state_count(n)) {
    throw ParseError(spec + ": expected " + std::to_string(state_count(n)) + " weights, found " +
                     std::to_string(w.size()));
  }
  return ProbVec::normalized(n, w);
}

std::string block_columns_name(int b) { return "m_block_" + std::to_string(b + 1); }

std::string join_counts(const std::vector<int>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "/" : "") + std::to_string(c[i]);
  return s;
}

// ---------------------------------------------------------------------------

struct EvolveArgs {
  std::string model, p0 = "uniform", out = "-";
  double t_end = 10.0, dt = 0.01;
  int stride = 10;
  std::uint64_t seed = 0;
};

void cmd_evolve(const EvolveArgs& a, Global& g) {
  const auto t0 = Clock::now();
  const Model m = load_model(a.model);
  CollisionContext ctx(m.j, m.kernel);
  const auto p0 = initial_measure(a.p0, m.n);
  EvolveOptions opts;
  opts.store_stride = a.stride;
  opts.execution = g.execution();
  const auto traj = evolve(ctx, p0, a.t_end, a.dt, opts);
  const int k = traj.partition.size();
  std::vector<std::string> cols = {"t", "H_rel", "dissipation", "tv_to_eq"};
  for (int b = 0; b < k; ++b) cols.push_back(block_columns_name(b));
  cols.push_back("mass_err");
  ResultTable t(cols);
  stamp(t, "evolve", "relative entropy decay of the nonlinear equation", a.seed, g);
  t.set_meta("model", a.model);
  t.set_meta("p0", a.p0);
  t.set_meta("dt", format_cell(a.dt));
  const auto bound = alpha_bound(m.j);
  t.set_meta("alpha_bound", format_cell(bound.applicable ? bound.value : NAN));
  const ProbVec& mu = traj.equilibrium;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const ProbVec& p = traj.states[i];
    const auto d = dissipation(ctx, density(p, mu), mu);
    std::vector<Cell> row = {traj.times[i], relative_entropy(p, mu).value(),
                             d.is_finite() ? d.value() : HUGE_VAL, tv_distance(p, mu)};
    for (double x : magnetization_profile(p, traj.partition)) row.push_back(x);
    double mass = 0.0;
    for (double w : p.weights()) mass += w;
    row.push_back(std::abs(mass - 1.0));
    t.add_row(std::move(row));
  }
  finish(t, g, t0, a.out);
}

struct MlsiArgs {
  std::string model, out = "-";
  int trials = 1000;
  std::uint64_t seed = 1;
};

void cmd_mlsi_nl(const MlsiArgs& a, Global& g) {
  const auto t0 = Clock::now();
  const Model m = load_model(a.model);
  CollisionContext ctx(m.j, m.kernel);
  const auto res = nonlinear_mlsi_scan(ctx, m.h, a.trials, a.seed, g.execution());
  const auto bound = alpha_bound(m.j);
  ResultTable t({"quantity", "value"});
  stamp(t, "mlsi-nl", "nonlinear modified log-Sobolev inequality", a.seed, g);
  t.set_meta("model", a.model);
  t.add_row({"min_ratio", res.min_ratio});
  t.add_row({"median_ratio", res.median_ratio});
  t.add_row({"alpha_bound", bound.applicable ? bound.value : NAN});
  t.add_row({"accepted", std::int64_t{res.accepted}});
  t.add_row({"discarded", std::int64_t{res.discarded}});
  finish(t, g, t0, a.out);
}

struct TreeArgs {
  std::string model, p0 = "uniform", out = "-";
  double t = 1.0;
  long samples = 100000;
  std::uint64_t seed = 1;
  bool exact = false;
};

void cmd_tree(const TreeArgs& a, Global& g) {
  const auto t0 = Clock::now();
  const Model m = load_model(a.model);
  CollisionContext ctx(m.j, m.kernel);
  const auto p0 = initial_measure(a.p0, m.n);
  const auto est = mc_solution(ctx, p0, a.t, a.samples, a.seed, g.execution());
  std::vector<std::string> cols = {"state", "estimate", "std_error", "ci_low", "ci_high"};
  std::optional<ProbVec> exact;
  if (a.exact) {
    cols.push_back("exact");
    EvolveOptions opts;
    opts.store_stride = 1 << 30;
    exact = evolve(ctx, p0, a.t, 1e-3, opts).states.back();
  }
  ResultTable t(cols);
  stamp(t, "tree", "Wild sum representation of the solution", a.seed, g);
  t.set_meta("model", a.model);
  t.set_meta("t", format_cell(a.t));
  t.set_meta("samples", std::to_string(est.samples));
  for (std::size_t s = 0; s < est.mean.size(); ++s) {
    const double half = 1.959963984540054 * est.std_error[s];
    std::vector<Cell> row = {SpinConfig(static_cast<Mask>(s), m.n).to_string(), est.mean[s],
                             est.std_error[s], est.mean[s] - half, est.mean[s] + half};
    if (exact) row.push_back((*exact)[static_cast<Mask>(s)]);
    t.add_row(std::move(row));
  }
  finish(t, g, t0, a.out);
}

struct MppArgs {
  std::string model, out = "-";
  int u = 3, n = 4;
  long runs = 100000;
  std::uint64_t seed = 1;
};

void cmd_mpp(const MppArgs& a, Global& g) {
  const auto t0 = Clock::now();
  TransportKernel kernel = TransportKernel::mean_field(a.n);
  int n = a.n;
  if (!a.model.empty()) {
    const Model m = load_model(a.model);
    kernel = m.kernel;
    n = m.n;
  }
  ResultTable t({"section", "u", "estimate", "std_error", "reference", "z"});
  stamp(t, "mpp", "marked partition process representation and fragmentation tail", a.seed, g);
  const auto tail = fragmentation_tail(n, a.runs, seed_split(a.seed, 0), 12 * n);
  for (std::size_t k = 0; k < tail.u.size(); ++k) {
    const double se = tail.std_error[k];
    t.add_row({"tail", std::int64_t{tail.u[k]}, tail.empirical[k], se, tail.bound[k],
               se > 0.0 ? (tail.empirical[k] - tail.bound[k]) / se : NAN});
  }
  // Representation at J = 0 with random inputs.
  CollisionContext ctx(InteractionMatrix(n), kernel);
  Rng rng = make_rng(a.seed, 1);
  for (int u = 1; u <= a.u; ++u) {
    std::vector<ProbVec> p;
    for (int i = 0; i < (1 << u); ++i) p.push_back(random_positive_measure(n, 1.0, rng));
    const auto chk = mpp_representation_check(ctx, p, u, a.runs, seed_split(a.seed, 1 + u));
    t.add_row({"representation", std::int64_t{u}, chk.max_deviation, NAN, 0.0, chk.max_z});
  }
  finish(t, g, t0, a.out);
}

struct KacArgs {
  std::string model, rho = "auto", out = "-";
  int particles = 10;
  double t_end = 10.0, record = 0.5;
  std::uint64_t seed = 1;
  bool exact = false;
};

DensityProfile parse_rho(const std::string& spec, const Model& m, int particles) {
  if (spec == "auto") {
    return canonical_density(gibbs_measure(m.j, m.h), particles, m.partition);
  }
  std::vector<double> rho;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      rho.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ParseError("invalid density '" + tok + "' in --rho");
    }
  }
  if (static_cast<int>(rho.size()) != m.partition.size()) {
    throw ParseError("--rho needs one density per block (" + std::to_string(m.partition.size()) +
                     ")");
  }
  return DensityProfile::from_densities(m.partition, particles, rho);
}

void cmd_kac(const KacArgs& a, Global& g) {
  const auto t0 = Clock::now();
  const Model m = load_model(a.model);
  CollisionContext ctx(m.j, m.kernel);
  const auto rho = parse_rho(a.rho, m, a.particles);
  Rng rng = make_rng(a.seed, 0);
  const auto init = random_state(m.n, rho, rng);
  std::optional<CanonicalMeasure> eq;
  KacOptions opts;
  opts.record_interval = a.record;
  if (a.exact) {
    eq.emplace(m.j, std::vector<FieldVector>{}, rho);
    opts.equilibrium = &*eq;
  }
  const auto run = simulate_particles(ctx, init, rho, a.t_end, rng, opts);
  std::vector<std::string> cols = {"t", "event_count"};
  const int k = m.partition.size();
  for (int b = 0; b < k; ++b) cols.push_back(block_columns_name(b));
  if (a.exact) cols.push_back("tv_to_eq");
  ResultTable t(cols);
  stamp(t, "kac", "Kac particle system with conserved density profile", a.seed, g);
  t.set_meta("model", a.model);
  t.set_meta("N", std::to_string(a.particles));
  t.set_meta("plus_counts", join_counts(rho.plus_counts()));
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    std::vector<Cell> row = {run.times[i], static_cast<std::int64_t>(run.events[i])};
    for (int b = 0; b < k; ++b) {
      row.push_back(static_cast<double>(run.block_sums[i][b]) / rho.stripe_size(b));
    }
    if (a.exact) row.push_back(run.occupation_tv[i]);
    t.add_row(std::move(row));
  }
  finish(t, g, t0, a.out);
}

struct ChaosArgs {
  std::string model, out = "-";
  int k = 1;
  std::vector<int> grid = {8, 16, 32, 64, 128, 256};
};

void cmd_chaos(const ChaosArgs& a, Global& g) {
  const auto t0 = Clock::now();
  const Model m = load_model(a.model);
  const auto nu = gibbs_measure(m.j, m.h);
  // Reference with the same block magnetizations and no interaction.
  const InteractionMatrix zero(m.n);
  const auto ref =
      gibbs_measure(zero, solve_field(zero, m.partition, magnetization_profile(nu, m.partition)));
  const auto rep = chaos_scan(nu, m.partition, a.k, a.grid, &ref);
  ResultTable t({"N", "plus_counts", "tv", "log_mass", "clt_ratio", "entropy_per_particle",
                 "entropy_gap"});
  stamp(t, "chaos", "chaos of conditioned product measures", 0, g);
  t.set_meta("model", a.model);
  t.set_meta("k", std::to_string(a.k));
  t.set_meta("tv_slope", format_cell(rep.tv_slope));
  t.set_meta("relative_entropy", format_cell(rep.relative_entropy));
  for (const auto& r : rep.rows) {
    t.add_row({std::int64_t{r.particles}, join_counts(r.plus_counts), r.tv, r.log_mass,
               r.clt_ratio, r.entropy_per_particle, r.entropy_gap});
  }
  finish(t, g, t0, a.out);
}

struct KacMlsiArgs {
  std::string model, rho_grid = "all", out = "-";
  int particles = 3, trials = 1000;
  std::uint64_t seed = 1;
};

void cmd_kac_mlsi(const KacMlsiArgs& a, Global& g) {
  const auto t0 = Clock::now();
  const Model m = load_model(a.model);
  CollisionContext ctx(m.j, m.kernel);
  std::vector<DensityProfile> profiles;
  if (a.rho_grid == "all") {
    profiles = DensityProfile::all(m.partition, a.particles);
  } else {
    profiles.push_back(parse_rho(a.rho_grid, m, a.particles));
  }
  const auto bound = alpha_bound(m.j);
  ResultTable t({"plus_counts", "states", "min_ratio", "median_ratio", "alpha_bound", "accepted"});
  stamp(t, "kac-mlsi", "modified log-Sobolev inequality of the particle system", a.seed, g);
  t.set_meta("model", a.model);
  t.set_meta("N", std::to_string(a.particles));
  std::uint64_t stream = 0;
  for (const auto& rho : profiles) {
    CanonicalMeasure mu(m.j, {}, rho);
    if (mu.size() < 2) continue;
    const auto q = particle_generator(ctx, mu);
    const auto res = particle_mlsi_scan(q, mu, a.trials, seed_split(a.seed, stream++),
                                        g.execution());
    t.add_row({join_counts(rho.plus_counts()), static_cast<std::int64_t>(mu.size()),
               res.min_ratio, res.median_ratio, bound.applicable ? bound.value : NAN,
               std::int64_t{res.accepted}});
  }
  finish(t, g, t0, a.out);
}

struct DownUpArgs {
  int sites = 8;
  std::optional<int> magnetization;
  std::string blocks_spec, lambda_file, w_file, mode = "mlsi", out = "-";
  int trials = 1000;
  std::uint64_t seed = 1;
};

// "1,2,3:1;4,5,6:-1": blocks of 1-based sites, each with its magnetization.
std::pair<SitePartition, std::vector<int>> parse_blocks(const std::string& spec, int l) {
  std::vector<std::vector<int>> blocks;
  std::vector<int> mags;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ';')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw ParseError("block '" + part + "' in --blocks-spec lacks ':magnetization'");
    }
    std::vector<int> sites;
    std::stringstream bs(part.substr(0, colon));
    std::string tok;
    try {
      while (std::getline(bs, tok, ',')) sites.push_back(std::stoi(tok) - 1);
      mags.push_back(std::stoi(part.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ParseError("invalid block '" + part + "' in --blocks-spec");
    }
    blocks.push_back(std::move(sites));
  }
  return {SitePartition(l, std::move(blocks)), std::move(mags)};
}

void cmd_downup(const DownUpArgs& a, Global& g) {
  const auto t0 = Clock::now();
  const int l = a.sites;
  std::vector<double> lambda(static_cast<std::size_t>(l) * l, 0.0);
  std::vector<double> w(l, 0.0);
  if (!a.lambda_file.empty()) {
    lambda = read_numbers(a.lambda_file);
    if (lambda.size() != static_cast<std::size_t>(l) * l) {
      throw ParseError(a.lambda_file + ": expected " + std::to_string(l * l) + " entries");
    }
  }
  if (!a.w_file.empty()) {
    w = read_numbers(a.w_file);
    if (w.size() != static_cast<std::size_t>(l)) {
      throw ParseError(a.w_file + ": expected " + std::to_string(l) + " entries");
    }
  }
  std::optional<DuInstance> inst;
  if (!a.blocks_spec.empty()) {
    auto [blocks, mags] = parse_blocks(a.blocks_spec, l);
    inst.emplace(l, lambda, w, std::move(blocks), std::move(mags));
  } else {
    inst.emplace(DuInstance::single_block(l, lambda, w, a.magnetization.value_or(l % 2)));
  }
  ResultTable t({"quantity", "value"});
  stamp(t, "downup", "Down-Up walk " + a.mode, a.seed, g);
  t.set_meta("L", std::to_string(l));
  if (a.mode == "mlsi") {
    const auto res = du_mlsi_scan(DuMeasure(*inst), a.trials, a.seed, g.execution());
    t.add_row({"min_ratio", res.scan.min_ratio});
    t.add_row({"median_ratio", res.scan.median_ratio});
    t.add_row({"constant", res.constant});
    t.add_row({"spectral_gap", res.gap});
    t.add_row({"linearized_ratio", res.linearized_ratio});
    t.add_row({"accepted", std::int64_t{res.scan.accepted}});
    t.add_row({"discarded", std::int64_t{res.scan.discarded}});
  } else if (a.mode == "factorize") {
    const auto res = factorization_check(DuMeasure(*inst), a.trials, a.seed, g.execution());
    t.add_row({"block_min_ratio", res.block_min_ratio});
    t.add_row({"ball_min_ratio", res.ball_min_ratio});
    t.add_row({"jensen_max_excess", res.jensen_max_excess});
    t.add_row({"constant", res.constant});
    t.add_row({"accepted", std::int64_t{res.accepted}});
  } else {
    const auto res = cov_bound_check(*inst, a.trials, a.seed, g.execution());
    t.add_row({"max_eigenvalue", res.max_eigenvalue});
    t.add_row({"bound", res.bound});
    t.add_row({"lambda", res.lambda});
    t.add_row({"regularized", std::int64_t{res.regularized ? 1 : 0}});
    t.add_row({"tilts", std::int64_t{res.tilts}});
  }
  finish(t, g, t0, a.out);
}

struct VerifyArgs {
  bool quick = false;
  std::vector<int> only;
  std::string out = "verify-out";
  std::uint64_t seed = 20260502;
};

int cmd_verify_all(const VerifyArgs& a, Global& g) {
  VerifyOptions opts;
  opts.quick = a.quick;
  opts.seed = a.seed;
  opts.execution = g.execution();
  std::vector<int> ids = a.only.empty() ? criterion_ids() : a.only;
  std::filesystem::create_directories(a.out);
  std::vector<std::string> cols = {"criterion", "title", "passed", "summary"};
  if (g.timing) cols.push_back("seconds");
  ResultTable summary(cols);
  summary.set_meta("command", "verify-all");
  summary.set_meta("seed", std::to_string(a.seed));
  summary.set_meta("mode", a.quick ? "quick" : "full");
  summary.set_meta("build", build_id());
  bool all = true;
  for (int id : ids) {
    auto r = run_criterion(id, opts);
    if (g.timing) r.table.set_meta("wall_seconds", format_cell(r.seconds));
    char name[32];
    std::snprintf(name, sizeof name, "criterion_%02d.csv", id);
    r.table.save((std::filesystem::path(a.out) / name).string());
    std::vector<Cell> row = {std::int64_t{id}, r.title, std::int64_t{r.passed ? 1 : 0},
                             r.summary};
    if (g.timing) row.push_back(r.seconds);
    summary.add_row(std::move(row));
    all = all && r.passed;
    std::cout << "criterion " << id << ": " << (r.passed ? "PASS" : "FAIL") << "  " << r.title
              << "  (" << r.summary << ")";
    if (g.timing) {
      char secs[32];
      std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
      std::cout << "  [" << secs << " s]";
    }
    std::cout << std::endl;
  }
  summary.save((std::filesystem::path(a.out) / "summary.csv").string());
  return all ? kExitOk : kExitAcceptance;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Kinetic Ising collision dynamics, Kac particle systems and Down-Up walks"};
  app.require_subcommand(1);
  Global g;
  g.threads = default_thread_count();
  app.add_option("--threads", g.threads, "Worker threads (default: hardware, capped by SPINKAC_THREADS)")
      ->check(CLI::PositiveNumber);
  app.add_option("--reduction", g.reduction, "Parallel reduction mode")
      ->check(CLI::IsMember({"deterministic", "fast"}));
  app.add_flag("--timing", g.timing, "Record wall time in the outputs");

  std::function<int()> action;

  EvolveArgs ev;
  auto* evolve_cmd = app.add_subcommand("evolve", "Integrate the nonlinear equation");
  evolve_cmd->add_option("--model", ev.model, "Model file")->required();
  evolve_cmd->add_option("--p0", ev.p0, "uniform | delta:MASK | FILE of 2^n weights");
  evolve_cmd->add_option("--t-end", ev.t_end, "End time");
  evolve_cmd->add_option("--dt", ev.dt, "RK4 step");
  evolve_cmd->add_option("--stride", ev.stride, "Write every k-th step");
  evolve_cmd->add_option("--seed", ev.seed, "Seed recorded in the output");
  evolve_cmd->add_option("--out", ev.out, "Output CSV, - for stdout");
  evolve_cmd->callback([&] { action = [&] { cmd_evolve(ev, g); return kExitOk; }; });

  MlsiArgs ml;
  auto* mlsi_cmd = app.add_subcommand("mlsi-nl", "Scan the nonlinear MLSI ratio");
  mlsi_cmd->add_option("--model", ml.model, "Model file")->required();
  mlsi_cmd->add_option("--trials", ml.trials, "Sampled densities");
  mlsi_cmd->add_option("--seed", ml.seed, "Seed");
  mlsi_cmd->add_option("--out", ml.out, "Output CSV, - for stdout");
  mlsi_cmd->callback([&] { action = [&] { cmd_mlsi_nl(ml, g); return kExitOk; }; });

  TreeArgs tr;
  auto* tree_cmd = app.add_subcommand("tree", "Monte Carlo over random collision trees");
  tree_cmd->add_option("--model", tr.model, "Model file")->required();
  tree_cmd->add_option("--p0", tr.p0, "uniform | delta:MASK | FILE of 2^n weights");
  tree_cmd->add_option("--t", tr.t, "Time");
  tree_cmd->add_option("--samples", tr.samples, "Sampled trees");
  tree_cmd->add_option("--seed", tr.seed, "Seed");
  tree_cmd->add_flag("--exact", tr.exact, "Add the integrated solution as a column");
  tree_cmd->add_option("--out", tr.out, "Output CSV, - for stdout");
  tree_cmd->callback([&] { action = [&] { cmd_tree(tr, g); return kExitOk; }; });

  MppArgs mp;
  auto* mpp_cmd = app.add_subcommand("mpp", "Marked partition process checks");
  mpp_cmd->add_option("--model", mp.model, "Model file (kernel only)");
  mpp_cmd->add_option("--n", mp.n, "Sites when no model is given");
  mpp_cmd->add_option("--u", mp.u, "Largest representation depth")->check(CLI::Range(1, 12));
  mpp_cmd->add_option("--runs", mp.runs, "Simulated runs");
  mpp_cmd->add_option("--seed", mp.seed, "Seed");
  mpp_cmd->add_option("--out", mp.out, "Output CSV, - for stdout");
  mpp_cmd->callback([&] { action = [&] { cmd_mpp(mp, g); return kExitOk; }; });

  KacArgs kc;
  auto* kac_cmd = app.add_subcommand("kac", "Simulate the Kac particle system");
  kac_cmd->add_option("--model", kc.model, "Model file")->required();
  kac_cmd->add_option("--N", kc.particles, "Particles")->check(CLI::PositiveNumber);
  kac_cmd->add_option("--rho", kc.rho, "auto or comma-separated block densities");
  kac_cmd->add_option("--t-end", kc.t_end, "End time");
  kac_cmd->add_option("--record", kc.record, "Recording interval");
  kac_cmd->add_option("--seed", kc.seed, "Seed");
  kac_cmd->add_flag("--exact", kc.exact, "Track the occupation TV to the canonical measure");
  kac_cmd->add_option("--out", kc.out, "Output CSV, - for stdout");
  kac_cmd->callback([&] { action = [&] { cmd_kac(kc, g); return kExitOk; }; });

  ChaosArgs ch;
  auto* chaos_cmd = app.add_subcommand("chaos", "Chaos of conditioned product measures");
  chaos_cmd->add_option("--model", ch.model, "Model file defining nu = mu_{J,h}")->required();
  chaos_cmd->add_option("--k", ch.k, "Marginal order")->check(CLI::Range(1, 4));
  chaos_cmd->add_option("--N-grid", ch.grid, "Particle counts")->delimiter(',');
  chaos_cmd->add_option("--out", ch.out, "Output CSV, - for stdout");
  chaos_cmd->callback([&] { action = [&] { cmd_chaos(ch, g); return kExitOk; }; });

  KacMlsiArgs km;
  auto* kmlsi_cmd = app.add_subcommand("kac-mlsi", "Scan the particle MLSI ratio");
  kmlsi_cmd->add_option("--model", km.model, "Model file")->required();
  kmlsi_cmd->add_option("--N", km.particles, "Particles")->check(CLI::PositiveNumber);
  kmlsi_cmd->add_option("--rho-grid", km.rho_grid, "all, auto or block densities");
  kmlsi_cmd->add_option("--trials", km.trials, "Sampled functions per profile");
  kmlsi_cmd->add_option("--seed", km.seed, "Seed");
  kmlsi_cmd->add_option("--out", km.out, "Output CSV, - for stdout");
  kmlsi_cmd->callback([&] { action = [&] { cmd_kac_mlsi(km, g); return kExitOk; }; });

  DownUpArgs du;
  auto* du_cmd = app.add_subcommand("downup", "Down-Up walk checks");
  du_cmd->add_option("--L", du.sites, "Sites")->check(CLI::Range(1, kMaxDownUpSites));
  auto* m_opt = du_cmd->add_option("--M", du.magnetization, "Total magnetization (one block)");
  du_cmd->add_option("--blocks-spec", du.blocks_spec, "Blocks as 1,2,3:M1;4,5:M2")
      ->excludes(m_opt);
  du_cmd->add_option("--lambda-matrix", du.lambda_file, "File with the L x L matrix Lambda");
  du_cmd->add_option("--w", du.w_file, "File with the L external fields");
  du_cmd->add_option("--mode", du.mode, "Check to run")
      ->check(CLI::IsMember({"mlsi", "factorize", "cov"}));
  du_cmd->add_option("--trials", du.trials, "Sampled functions or tilts");
  du_cmd->add_option("--seed", du.seed, "Seed");
  du_cmd->add_option("--out", du.out, "Output CSV, - for stdout");
  du_cmd->callback([&] { action = [&] { cmd_downup(du, g); return kExitOk; }; });

  VerifyArgs va;
  auto* va_cmd = app.add_subcommand("verify-all", "Run the acceptance criteria");
  va_cmd->add_flag("--quick", va.quick, "Minimum sizes");
  va_cmd->add_option("--only", va.only, "Criteria to run")->delimiter(',')->check(CLI::Range(1, 12));
  va_cmd->add_option("--out", va.out, "Output directory");
  va_cmd->add_option("--seed", va.seed, "Master seed");
  va_cmd->callback([&] { action = [&] { return cmd_verify_all(va, g); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "spinkac: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "spinkac: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace spinkac::cli
