// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv) {
  return spinkac::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
