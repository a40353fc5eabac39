// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinkac/execution.hpp"
#include "table.hpp"

namespace spinkac::cli {

struct VerifyOptions {
  // Quick runs use the minimum sizes of every criterion; full runs scale
  // instance counts and sample sizes up.
  bool quick = true;
  std::uint64_t seed = 20260502;
  Execution execution;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string summary;
  double seconds = 0.0;
  // One row per elementary check: check, instance, measured, limit, passed.
  ResultTable table{{"check", "instance", "measured", "limit", "passed"}};
};

// Ids of the criteria evaluated in-process (1..12). The reproducibility
// criterion runs the command-line tool and lives in the acceptance driver.
std::vector<int> criterion_ids();
std::string criterion_title(int id);

// Throws DomainError for an unknown id.
CriterionResult run_criterion(int id, const VerifyOptions& opts);

}  // namespace spinkac::cli
