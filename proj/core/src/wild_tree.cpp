// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/wild_tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <utility>

#include "spinkac/error.hpp"
#include "spinkac/gibbs.hpp"

namespace spinkac {

namespace {

constexpr int kReplicas = 16;

bool has(const std::vector<std::string>& sorted, const std::string& path) {
  return std::binary_search(sorted.begin(), sorted.end(), path);
}

std::string shape_of(const std::vector<std::string>& nodes, const std::string& x) {
  if (!has(nodes, x + "0")) return ".";
  std::string a = shape_of(nodes, x + "0"), b = shape_of(nodes, x + "1");
  if (b < a) std::swap(a, b);
  return "(" + a + b + ")";
}

std::vector<double> finish(int n, std::vector<double> v) {
  for (double& x : v) x = std::max(x, 0.0);
  return ProbVec::normalized(n, std::move(v)).weights();
}

}  // namespace

CollisionTree::CollisionTree() : nodes_{std::string()} {}

CollisionTree::CollisionTree(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  if (nodes_.empty() || !nodes_.front().empty()) throw DomainError("tree has no root");
  for (const auto& x : nodes_) {
    if (x.find_first_not_of("01") != std::string::npos) {
      throw DomainError("node path '" + x + "' contains characters other than 0 and 1");
    }
    if (!x.empty() && !has(nodes_, x.substr(0, x.size() - 1))) {
      throw DomainError("node '" + x + "' has no parent in the tree");
    }
    if (has(nodes_, x + "0") != has(nodes_, x + "1")) {
      throw DomainError("node '" + x + "' has exactly one child");
    }
  }
}

CollisionTree CollisionTree::regular(int depth) {
  if (depth < 0 || depth > 20) throw DomainError("regular tree depth must lie in 0..20");
  std::vector<std::string> nodes{std::string()};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (static_cast<int>(nodes[i].size()) < depth) {
      nodes.push_back(nodes[i] + "0");
      nodes.push_back(nodes[i] + "1");
    }
  }
  return CollisionTree(std::move(nodes));
}

std::vector<std::string> CollisionTree::leaves() const {
  std::vector<std::string> out;
  for (const auto& x : nodes_) {
    if (!has(nodes_, x + "0")) out.push_back(x);
  }
  return out;
}

bool CollisionTree::contains(const std::string& path) const { return has(nodes_, path); }

std::string CollisionTree::shape() const { return shape_of(nodes_, std::string()); }

CollisionTree sample_tree(double t, Rng& rng) {
  if (!(t >= 0.0)) throw DomainError("tree time must be nonnegative");
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, double>> stack{{std::string(), 0.0}};
  while (!stack.empty()) {
    auto [x, tau] = std::move(stack.back());
    stack.pop_back();
    const double split = tau + exponential1(rng);
    if (split <= t) {
      stack.emplace_back(x + "1", split);
      stack.emplace_back(x + "0", split);
    }
    nodes.push_back(std::move(x));
  }
  return CollisionTree(std::move(nodes));
}

ProbVec eval_tree(const CollisionContext& ctx, const CollisionTree& tree,
                  const std::vector<ProbVec>& leaves) {
  const auto names = tree.leaves();
  if (leaves.size() != 1 && leaves.size() != names.size()) {
    throw DomainError("tree has " + std::to_string(names.size()) + " leaves but " +
                      std::to_string(leaves.size()) + " measures were given");
  }
  const int n = ctx.sites();
  for (const auto& p : leaves) {
    if (p.sites() != n) throw DomainError("leaf measure does not match the model size");
  }
  std::unordered_map<std::string, std::vector<double>> value;
  for (std::size_t i = 0; i < names.size(); ++i) {
    value[names[i]] = leaves[leaves.size() == 1 ? 0 : i].weights();
  }
  // Deepest nodes first, so both children are ready.
  auto order = tree.nodes();
  std::stable_sort(order.begin(), order.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  for (const auto& x : order) {
    if (value.count(x)) continue;
    std::vector<double> out;
    collision_product_into(ctx, value.at(x + "0"), value.at(x + "1"), out);
    value.erase(x + "0");
    value.erase(x + "1");
    value[x] = std::move(out);
  }
  return ProbVec(n, finish(n, std::move(value.at(std::string()))));
}

namespace {

class ShapeCache {
 public:
  ShapeCache(const CollisionContext& ctx, const ProbVec& p) : ctx_(ctx) {
    cache_["."] = p.weights();
  }

  const std::vector<double>& eval(const CollisionTree& tree) {
    return cache_.at(visit(tree, std::string()));
  }

 private:
  std::string visit(const CollisionTree& tree, const std::string& x) {
    if (!tree.contains(x + "0")) return ".";
    std::string a = visit(tree, x + "0"), b = visit(tree, x + "1");
    if (b < a) std::swap(a, b);
    std::string s = "(" + a + b + ")";
    if (!cache_.count(s)) {
      std::vector<double> out;
      collision_product_into(ctx_, cache_.at(a), cache_.at(b), out);
      cache_.emplace(s, std::move(out));
    }
    return s;
  }

  const CollisionContext& ctx_;
  std::unordered_map<std::string, std::vector<double>> cache_;
};

}  // namespace

MonteCarloEstimate mc_solution(const CollisionContext& ctx, const ProbVec& p0, double t,
                               long samples, std::uint64_t seed, const Execution& ex) {
  if (samples < 2) throw DomainError("at least two samples are needed");
  if (p0.sites() != ctx.sites()) throw DomainError("initial measure does not match the model");
  const std::size_t m = p0.size();
  std::vector<std::vector<double>> sum(kReplicas, std::vector<double>(m, 0.0));
  std::vector<std::vector<double>> sumsq(kReplicas, std::vector<double>(m, 0.0));
  parallel_for(ex, kReplicas, [&](int r) {
    const long count = samples / kReplicas + (r < samples % kReplicas ? 1 : 0);
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    ShapeCache cache(ctx, p0);
    for (long i = 0; i < count; ++i) {
      const auto& v = cache.eval(sample_tree(t, rng));
      for (std::size_t s = 0; s < m; ++s) {
        sum[r][s] += v[s];
        sumsq[r][s] += v[s] * v[s];
      }
    }
  });
  MonteCarloEstimate est;
  est.samples = samples;
  est.mean.assign(m, 0.0);
  est.std_error.assign(m, 0.0);
  std::vector<double> sq(m, 0.0);
  for (int r = 0; r < kReplicas; ++r) {
    for (std::size_t s = 0; s < m; ++s) {
      est.mean[s] += sum[r][s];
      sq[s] += sumsq[r][s];
    }
  }
  const double count = static_cast<double>(samples);
  for (std::size_t s = 0; s < m; ++s) {
    est.mean[s] /= count;
    const double var = std::max(0.0, (sq[s] / count - est.mean[s] * est.mean[s]) * count / (count - 1));
    est.std_error[s] = std::sqrt(var / count);
  }
  return est;
}

ProbVec discrete_iterate(const CollisionContext& ctx, const ProbVec& p, int k) {
  if (k < 0) throw DomainError("iteration count must be nonnegative");
  std::vector<double> cur = p.weights(), next;
  for (int i = 0; i < k; ++i) {
    collision_product_into(ctx, cur, cur, next);
    cur.swap(next);
  }
  return ProbVec(ctx.sites(), finish(ctx.sites(), std::move(cur)));
}

ProbVec discrete_iterate(const CollisionContext& ctx, const std::vector<ProbVec>& leaves) {
  if (leaves.empty() || !std::has_single_bit(leaves.size())) {
    throw DomainError("the number of leaf measures must be a power of two");
  }
  std::vector<std::vector<double>> level;
  for (const auto& p : leaves) level.push_back(p.weights());
  while (level.size() > 1) {
    std::vector<std::vector<double>> up(level.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) {
      collision_product_into(ctx, level[2 * i], level[2 * i + 1], up[i]);
    }
    level.swap(up);
  }
  return ProbVec(ctx.sites(), finish(ctx.sites(), std::move(level[0])));
}

MarkedPartition MarkedPartition::initial(int n) {
  check_sites(n);
  return MarkedPartition{n, {Fragment{static_cast<Mask>(state_count(n) - 1), -1}}};
}

void MarkedPartition::validate(const TransportKernel& k) const {
  if (k.size() != n) throw DomainError("kernel size does not match the partition");
  if (fragments.empty() || !std::has_single_bit(fragments.size())) {
    throw DomainError("number of fragments is not a power of two");
  }
  Mask seen = 0;
  int unmarked = 0;
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    const auto& f = fragments[i];
    const std::string where = "fragment " + std::to_string(i + 1);
    if (f.sites >> n) throw DomainError(where + " contains sites beyond n");
    if (seen & f.sites) throw DomainError(where + " overlaps an earlier fragment");
    seen |= f.sites;
    if (f.mark >= 0) {
      if (f.mark >= n) throw DomainError(where + " has an out-of-range mark");
      if (std::popcount(f.sites) != 1) throw DomainError(where + " is marked but not a singleton");
      const int site = std::countr_zero(f.sites);
      const auto& comp = k.components();
      if (comp.block_of(site) != comp.block_of(f.mark)) {
        throw DomainError(where + " carries a mark from another component");
      }
    } else if (f.sites) {
      ++unmarked;
    }
  }
  if (seen != static_cast<Mask>(state_count(n) - 1)) throw DomainError("fragments do not cover every site");
  if (unmarked > 1) throw DomainError("more than one nonempty unmarked fragment");
}

namespace {

int sample_row(const TransportKernel& k, int row, double lazy, Rng& rng) {
  // Row of (1 - lazy) K + lazy I.
  const int n = k.size();
  double u = uniform01(rng);
  int last = row;
  for (int c = 0; c < n; ++c) {
    const double w = (1.0 - lazy) * k(row, c) + (c == row ? lazy : 0.0);
    if (w <= 0.0) continue;
    last = c;
    if (u < w) return c;
    u -= w;
  }
  return last;
}

}  // namespace

MarkedPartition mpp_step(const MarkedPartition& state, const TransportKernel& k, Rng& rng) {
  const int n = state.n;
  if (k.size() != n) throw DomainError("kernel size does not match the partition");
  MarkedPartition next{n, {}};
  next.fragments.reserve(2 * state.fragments.size());
  const Fragment empty{};
  for (const auto& c : state.fragments) {
    const int u = uniform_int(rng, n);
    const int b = 1 + uniform_int(rng, 4);
    Fragment left, right;
    if (b == 1) {
      left = c;
      right = empty;
    } else if (b == 2) {
      left = empty;
      right = c;
    } else {
      const Mask bit = Mask{1} << u;
      if (c.mark < 0 && (c.sites & bit)) {
        left = Fragment{c.sites & ~bit, -1};
        right = Fragment{bit, sample_row(k, u, 0.0, rng)};
      } else if (c.mark < 0) {
        left = c;
        right = empty;
      } else {
        if (std::popcount(c.sites) != 1) throw DomainError("marked fragment is not a singleton");
        left = Fragment{c.sites, sample_row(k, c.mark, (n - 1.0) / n, rng)};
        right = empty;
      }
      if (b == 4) std::swap(left, right);
    }
    next.fragments.push_back(left);
    next.fragments.push_back(right);
  }
  return next;
}

std::vector<double> psi(const ProbVec& p, const Fragment& c) {
  const std::size_t states = p.size();
  std::vector<double> out(states, 1.0);
  if (c.sites == 0) return out;
  if (c.mark < 0) {
    const auto table = marginal_table(p.weights(), c.sites);
    for (std::size_t s = 0; s < states; ++s) out[s] = table[static_cast<Mask>(s) & c.sites];
    return out;
  }
  const int j = std::countr_zero(c.sites);
  double plus = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    if ((s >> c.mark) & 1u) plus += p[static_cast<Mask>(s)];
  }
  for (std::size_t s = 0; s < states; ++s) out[s] = ((s >> j) & 1u) ? plus : 1.0 - plus;
  return out;
}

std::vector<double> psi_product(const std::vector<ProbVec>& p, const MarkedPartition& c) {
  if (p.size() != 1 && p.size() != c.fragments.size()) {
    throw DomainError("need one measure per fragment");
  }
  std::vector<double> out(state_count(c.n), 1.0);
  for (std::size_t i = 0; i < c.fragments.size(); ++i) {
    if (c.fragments[i].sites == 0) continue;
    const auto f = psi(p[p.size() == 1 ? 0 : i], c.fragments[i]);
    for (std::size_t s = 0; s < out.size(); ++s) out[s] *= f[s];
  }
  return out;
}

int fragmentation_time(int n, Rng& rng) {
  check_sites(n);
  Mask a = static_cast<Mask>(state_count(n) - 1);
  int u = 0;
  while (a) {
    ++u;
    const int site = uniform_int(rng, n);
    const int b = 1 + uniform_int(rng, 4);
    if (b >= 3) a &= ~(Mask{1} << site);
  }
  return u;
}

FragmentationTail fragmentation_tail(int n, long runs, std::uint64_t seed, int max_u) {
  if (runs < 1 || max_u < 0) throw DomainError("need positive runs and nonnegative max_u");
  Rng rng = make_rng(seed, 0);
  std::vector<long> at_least(max_u + 1, 0);
  double total = 0.0;
  for (long r = 0; r < runs; ++r) {
    const int h = fragmentation_time(n, rng);
    total += h;
    for (int u = 0; u <= std::min(h, max_u); ++u) ++at_least[u];
  }
  FragmentationTail tail;
  tail.mean = total / static_cast<double>(runs);
  for (int u = 0; u <= max_u; ++u) {
    const double p = static_cast<double>(at_least[u]) / static_cast<double>(runs);
    tail.u.push_back(u);
    tail.empirical.push_back(p);
    tail.std_error.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(runs)));
    tail.bound.push_back(n * std::exp(-u / (2.0 * n)));
  }
  return tail;
}

RepresentationCheck mpp_representation_check(const CollisionContext& ctx,
                                             const std::vector<ProbVec>& p, int u, long runs,
                                             std::uint64_t seed) {
  if (!ctx.interaction().is_zero()) {
    throw PreconditionError("the marked partition representation needs J = 0");
  }
  if (u < 0 || u > 12) throw DomainError("generation count must lie in 0..12");
  if (runs < 2) throw DomainError("at least two runs are needed");
  const std::size_t leaves = std::size_t{1} << u;
  if (p.size() != 1 && p.size() != leaves) {
    throw DomainError("need 1 or 2^u leaf measures");
  }
  std::vector<ProbVec> all(leaves, p[0]);
  if (p.size() == leaves) all = p;

  RepresentationCheck rc;
  rc.runs = runs;
  rc.exact = discrete_iterate(ctx, all).weights();
  const std::size_t m = rc.exact.size();
  std::vector<double> sum(m, 0.0), sumsq(m, 0.0);
  Rng rng = make_rng(seed, 0);
  for (long r = 0; r < runs; ++r) {
    auto c = MarkedPartition::initial(ctx.sites());
    for (int g = 0; g < u; ++g) c = mpp_step(c, ctx.kernel(), rng);
    const auto v = psi_product(all, c);
    for (std::size_t s = 0; s < m; ++s) {
      sum[s] += v[s];
      sumsq[s] += v[s] * v[s];
    }
  }
  const double count = static_cast<double>(runs);
  rc.estimate.resize(m);
  rc.std_error.resize(m);
  for (std::size_t s = 0; s < m; ++s) {
    const double mean = sum[s] / count;
    const double var = std::max(0.0, (sumsq[s] / count - mean * mean) * count / (count - 1));
    rc.estimate[s] = mean;
    rc.std_error[s] = std::sqrt(var / count);
    const double dev = std::abs(mean - rc.exact[s]);
    rc.max_deviation = std::max(rc.max_deviation, dev);
    if (rc.std_error[s] > 0.0) {
      rc.max_z = std::max(rc.max_z, dev / rc.std_error[s]);
    } else if (dev > 1e-12) {
      rc.max_z = std::numeric_limits<double>::infinity();
    }
  }
  return rc;
}

}  // namespace spinkac
