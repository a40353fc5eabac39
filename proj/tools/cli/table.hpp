// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace spinkac::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

// Formats doubles with %.17g so that values round-trip exactly.
std::string format_cell(const Cell& c);

// A CSV table with a block of "# key: value" metadata lines on top.
class ResultTable {
 public:
  explicit ResultTable(std::vector<std::string> columns);

  // Metadata lines keep insertion order; setting a key again replaces it.
  void set_meta(const std::string& key, const std::string& value);
  // Throws DomainError unless the row has one cell per column.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<Cell>& row(std::size_t i) const { return rows_[i]; }

  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
  // Writes to `path`, or to stdout for "-". Throws Error when the file
  // cannot be written.
  void save(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<Cell>> rows_;
};

// git describe of the build.
const char* build_id();

}  // namespace spinkac::cli
