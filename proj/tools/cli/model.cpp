// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "model.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "spinkac/error.hpp"

namespace spinkac::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Section {
  int line = 0;
  std::vector<std::pair<int, std::string>> rows;  // (line number, text)
};

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ParseError(source_ + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source_ + ": " + msg); }

  double number(const std::string& tok, int line) const {
    double v = 0.0;
    const auto* end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || p != end) fail(line, "not a number: '" + tok + "'");
    return v;
  }

  std::vector<double> numbers(const Section& s) const {
    std::vector<double> out;
    for (const auto& [line, text] : s.rows) {
      std::istringstream ss(text);
      std::string tok;
      while (ss >> tok) out.push_back(number(tok, line));
    }
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

}  // namespace

Model parse_model(std::istream& in, const std::string& source) {
  Parser p(source);
  std::map<std::string, Section> sections;
  std::string current;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.fail(line_no, "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"model", "J", "h", "partition", "K"};
      bool ok = false;
      for (const char* k : known) ok = ok || current == k;
      if (!ok) p.fail(line_no, "unknown section [" + current + "]");
      if (sections.count(current)) p.fail(line_no, "duplicate section [" + current + "]");
      sections[current].line = line_no;
      continue;
    }
    if (current.empty()) p.fail(line_no, "content before the first section");
    sections[current].rows.emplace_back(line_no, line);
  }

  if (!sections.count("model")) p.fail("missing [model] section");
  std::map<std::string, std::pair<int, std::string>> keys;
  for (const auto& [line, text] : sections["model"].rows) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) p.fail(line, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    if (key != "n" && key != "kernel") p.fail(line, "unknown key '" + key + "'");
    keys[key] = {line, trim(text.substr(eq + 1))};
  }
  if (!keys.count("n")) p.fail(sections["model"].line, "missing n");
  const double nv = p.number(keys["n"].second, keys["n"].first);
  const int n = static_cast<int>(nv);
  if (nv != n || n < 1 || n > kMaxSites) {
    p.fail(keys["n"].first, "n must be an integer in [1, " + std::to_string(kMaxSites) + "]");
  }
  const std::string kernel = keys.count("kernel") ? keys["kernel"].second : "mean-field";

  Model m;
  m.n = n;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  try {
    if (sections.count("J")) {
      auto v = p.numbers(sections["J"]);
      if (v.size() != nn) p.fail(sections["J"].line, "[J] needs " + std::to_string(nn) + " values");
      m.j = InteractionMatrix(n, std::move(v));
    } else {
      m.j = InteractionMatrix(n);
    }
  } catch (const DomainError& e) {
    p.fail(sections["J"].line, e.what());
  }
  if (sections.count("h")) {
    auto v = p.numbers(sections["h"]);
    if (v.size() != static_cast<std::size_t>(n)) {
      p.fail(sections["h"].line, "[h] needs " + std::to_string(n) + " values");
    }
    m.h = FieldVector(std::move(v));
  } else {
    m.h = FieldVector(n);
  }

  std::optional<SitePartition> part;
  if (sections.count("partition")) {
    std::vector<std::vector<int>> blocks;
    for (const auto& [line, text] : sections["partition"].rows) {
      std::istringstream ss(text);
      std::string tok;
      std::vector<int> block;
      while (ss >> tok) {
        const double s = p.number(tok, line);
        if (s != static_cast<int>(s) || s < 1 || s > n) {
          p.fail(line, "site '" + tok + "' is not in 1.." + std::to_string(n));
        }
        block.push_back(static_cast<int>(s) - 1);
      }
      blocks.push_back(std::move(block));
    }
    try {
      part = SitePartition(n, std::move(blocks));
    } catch (const DomainError& e) {
      p.fail(sections["partition"].line, e.what());
    }
  }

  KernelSpec spec;
  const int kernel_line = keys.count("kernel") ? keys["kernel"].first : sections["model"].line;
  if (kernel == "single-site") {
    spec.kind = KernelSpec::Kind::kSingleSite;
  } else if (kernel == "mean-field") {
    spec.kind = KernelSpec::Kind::kMeanField;
  } else if (kernel == "blocks") {
    if (!part) p.fail(kernel_line, "kernel = blocks needs a [partition] section");
    spec.kind = KernelSpec::Kind::kBlocks;
    spec.blocks = part->blocks();
  } else if (kernel == "matrix") {
    if (!sections.count("K")) p.fail(kernel_line, "kernel = matrix needs a [K] section");
    spec.kind = KernelSpec::Kind::kMatrix;
    spec.matrix = p.numbers(sections["K"]);
    if (spec.matrix.size() != nn) {
      p.fail(sections["K"].line, "[K] needs " + std::to_string(nn) + " values");
    }
  } else {
    p.fail(kernel_line, "unknown kernel '" + kernel + "'");
  }
  if (sections.count("K") && kernel != "matrix") {
    p.fail(sections["K"].line, "[K] is only used with kernel = matrix");
  }
  try {
    m.kernel = build_transport_kernel(n, spec);
  } catch (const DomainError& e) {
    p.fail(kernel_line, e.what());
  }
  m.partition = m.kernel.components();
  if (part && !(*part == m.partition)) {
    p.fail(sections["partition"].line, "partition differs from the components of the kernel");
  }
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  return parse_model(in, path);
}

}  // namespace spinkac::cli
