// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spinkac/error.hpp"

#ifndef SPINKAC_GIT_DESCRIBE
#define SPINKAC_GIT_DESCRIBE "unknown"
#endif

namespace spinkac::cli {

const char* build_id() { return SPINKAC_GIT_DESCRIBE; }

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw DomainError("row has " + std::to_string(row.size()) + " cells, table has " +
                      std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

void ResultTable::write_csv(std::ostream& out) const {
  for (const auto& [k, v] : meta_) out << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(row[c]);
    out << '\n';
  }
}

std::string ResultTable::to_csv() const {
  std::ostringstream ss;
  write_csv(ss);
  return ss.str();
}

void ResultTable::save(const std::string& path) const {
  if (path == "-") {
    write_csv(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_csv(out);
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace spinkac::cli
