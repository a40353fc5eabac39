// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/spin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinkac/error.hpp"
#include "spinkac/linalg.hpp"

namespace spinkac {

void check_sites(int n) {
  if (n < 1) throw DomainError("site count must be at least 1");
  if (n > kMaxSites) {
    throw CapacityError("n = " + std::to_string(n) +
                        " exceeds the dense enumeration limit of " +
                        std::to_string(kMaxSites));
  }
}

SpinConfig::SpinConfig(Mask bits, int n) : bits_(bits), n_(n) {
  check_sites(n);
  if (n < 32 && (bits >> n) != 0) {
    throw DomainError("configuration has bits beyond site " + std::to_string(n));
  }
}

int SpinConfig::spin(int site) const {
  if (site < 0 || site >= n_) throw DomainError("site out of range");
  return spin_of(bits_, site);
}

SpinConfig SpinConfig::flipped(int site) const {
  if (site < 0 || site >= n_) throw DomainError("site out of range");
  return SpinConfig(bits_ ^ (Mask{1} << site), n_);
}

SpinConfig SpinConfig::with_spin(int site, int value) const {
  if (site < 0 || site >= n_) throw DomainError("site out of range");
  if (value != 1 && value != -1) throw DomainError("spin value must be +1 or -1");
  Mask b = value > 0 ? (bits_ | (Mask{1} << site)) : (bits_ & ~(Mask{1} << site));
  return SpinConfig(b, n_);
}

std::string SpinConfig::to_string() const {
  std::string s;
  for (int i = 0; i < n_; ++i) s += spin_of(bits_, i) > 0 ? '+' : '-';
  return s;
}

SitePartition::SitePartition(int n, std::vector<std::vector<int>> blocks) : n_(n) {
  check_sites(n);
  owner_.assign(n, -1);
  for (auto& b : blocks) {
    if (b.empty()) throw DomainError("partition blocks must be nonempty");
    std::sort(b.begin(), b.end());
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  for (int bi = 0; bi < static_cast<int>(blocks.size()); ++bi) {
    Mask m = 0;
    for (int s : blocks[bi]) {
      if (s < 0 || s >= n) {
        throw DomainError("partition site " + std::to_string(s + 1) + " out of range");
      }
      if (owner_[s] != -1) {
        throw DomainError("site " + std::to_string(s + 1) + " appears in two blocks");
      }
      owner_[s] = bi;
      m |= Mask{1} << s;
    }
    masks_.push_back(m);
  }
  for (int s = 0; s < n; ++s) {
    if (owner_[s] == -1) {
      throw DomainError("site " + std::to_string(s + 1) + " is not covered by the partition");
    }
  }
  blocks_ = std::move(blocks);
}

SitePartition SitePartition::singletons(int n) {
  std::vector<std::vector<int>> b;
  for (int i = 0; i < n; ++i) b.push_back({i});
  return SitePartition(n, std::move(b));
}

SitePartition SitePartition::whole(int n) {
  std::vector<int> all;
  for (int i = 0; i < n; ++i) all.push_back(i);
  return SitePartition(n, {all});
}

InteractionMatrix::InteractionMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {
  check_sites(n);
}

InteractionMatrix::InteractionMatrix(int n, std::vector<double> entries)
    : n_(n), a_(std::move(entries)) {
  check_sites(n);
  if (a_.size() != static_cast<size_t>(n) * n) {
    throw DomainError("interaction matrix needs " + std::to_string(n * n) +
                      " entries, got " + std::to_string(a_.size()));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (a_[i * n + j] != a_[j * n + i]) {
        std::ostringstream os;
        os << "interaction matrix is not symmetric: J(" << i + 1 << "," << j + 1
           << ") = " << a_[i * n + j] << " but J(" << j + 1 << "," << i + 1
           << ") = " << a_[j * n + i];
        throw DomainError(os.str());
      }
    }
  }
  for (double x : a_) {
    if (!std::isfinite(x)) throw DomainError("interaction matrix has a non-finite entry");
  }
}

double InteractionMatrix::largest_eigenvalue() const {
  return spinkac::largest_eigenvalue(a_, n_);
}

double InteractionMatrix::smallest_eigenvalue() const {
  return spinkac::smallest_eigenvalue(a_, n_);
}

double InteractionMatrix::max_abs_row_sum() const {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += std::abs(a_[i * n_ + j]);
    best = std::max(best, s);
  }
  return best;
}

bool InteractionMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](double x) { return x == 0.0; });
}

bool FieldVector::constant_on(const SitePartition& a) const {
  if (a.sites() != size()) return false;
  for (const auto& b : a.blocks()) {
    for (int s : b) {
      if (h_[s] != h_[b.front()]) return false;
    }
  }
  return true;
}

double FieldVector::max_abs() const {
  double m = 0.0;
  for (double x : h_) m = std::max(m, std::abs(x));
  return m;
}

ProbVec::ProbVec(int n, std::vector<double> weights) : n_(n), w_(std::move(weights)) {
  check_sites(n);
  if (w_.size() != state_count(n)) {
    throw DomainError("probability vector for n = " + std::to_string(n) + " needs " +
                      std::to_string(state_count(n)) + " entries, got " +
                      std::to_string(w_.size()));
  }
  double total = 0.0;
  for (double x : w_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError("probability vector has a negative or non-finite entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "probability vector sums to " << total << ", not 1";
    throw DomainError(os.str());
  }
}

ProbVec ProbVec::uniform(int n) {
  check_sites(n);
  return ProbVec(n, std::vector<double>(state_count(n), 1.0 / static_cast<double>(state_count(n))));
}

ProbVec ProbVec::point_mass(int n, Mask state) {
  check_sites(n);
  std::vector<double> w(state_count(n), 0.0);
  if (state >= w.size()) throw DomainError("point mass outside the cube");
  w[state] = 1.0;
  return ProbVec(n, std::move(w));
}

ProbVec ProbVec::normalized(int n, std::vector<double> weights) {
  double total = 0.0;
  for (double x : weights) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError("weights must be nonnegative and finite");
    }
    total += x;
  }
  if (!(total > 0.0)) throw DomainError("weights have zero total mass");
  for (double& x : weights) x /= total;
  return ProbVec(n, std::move(weights));
}

bool ProbVec::strictly_positive() const {
  return std::all_of(w_.begin(), w_.end(), [](double x) { return x > 0.0; });
}

}  // namespace spinkac
