// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace spinkac::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitAcceptance = 2;
inline constexpr int kExitUsage = 64;

// Parses and runs one command line; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace spinkac::cli
