// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <string>

#include "spinkac/collision.hpp"
#include "spinkac/spin.hpp"

namespace spinkac::cli {

// Contents of a model file. The partition is the component partition of
// the kernel.
struct Model {
  int n = 0;
  InteractionMatrix j{1};
  FieldVector h{1};
  SitePartition partition = SitePartition::whole(1);
  TransportKernel kernel = TransportKernel::single_site(1);
};

// Model file format (blank lines and text after '#' ignored):
//
//   [model]
//   n = 3
//   kernel = blocks        # single-site | mean-field | blocks | matrix
//   [J]                    # n x n, row-major, whitespace separated
//   0    0.1  0
//   0.1  0    0
//   0    0    0
//   [h]                    # n values
//   0.2 0.2 -0.1
//   [partition]            # one block per line, 1-based sites
//   1 2
//   3
//   [K]                    # n x n, only with kernel = matrix
//
// J and h default to zero. kernel = blocks needs [partition]; with any
// other kernel a given partition must equal the kernel's components.
// Throws ParseError with `source` and the offending line.
Model parse_model(std::istream& in, const std::string& source);

// Throws ParseError naming the path when the file cannot be read.
Model load_model(const std::string& path);

}  // namespace spinkac::cli
