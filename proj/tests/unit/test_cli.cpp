// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "commands.hpp"
#include "doctest.h"
#include "model.hpp"
#include "spinkac/error.hpp"
#include "spinkac/rng.hpp"
#include "table.hpp"

using namespace spinkac;
using namespace spinkac::cli;
namespace fs = std::filesystem;

namespace {

Model parse(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in, "test.model");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

// Runs the tool in-process with stderr captured.
int run_captured(const std::vector<std::string>& args, std::string* err = nullptr) {
  std::ostringstream buf;
  auto* old = std::cerr.rdbuf(buf.rdbuf());
  const int code = run(args);
  std::cerr.rdbuf(old);
  if (err) *err = buf.str();
  return code;
}

std::string without_build_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("# build:", 0) == 0) continue;
    out += line + "\n";
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "spinkac_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("model file: full example") {
  const auto m = parse(R"(
[model]
n = 3
kernel = blocks   # block kernel
[J]
0    0.1  0
0.1  0    0
0    0    0
[h]
0.2 0.2 -0.1
[partition]
1 2
3
)");
  CHECK(m.n == 3);
  CHECK(m.j(0, 1) == 0.1);
  CHECK(m.h[2] == -0.1);
  CHECK(m.partition == SitePartition(3, {{0, 1}, {2}}));
}

TEST_CASE("model file: defaults") {
  const auto m = parse("[model]\nn = 2\n");
  CHECK(m.j(0, 1) == 0.0);
  CHECK(m.h[0] == 0.0);
  CHECK(m.partition == SitePartition::whole(2));  // mean-field kernel
}

TEST_CASE("model file: asymmetric J names the pair") {
  const auto msg = parse_error("[model]\nn = 3\n[J]\n0 1 0\n1 0 2\n0 0 0\n");
  CHECK(msg.find("test.model:3") != std::string::npos);
  CHECK(msg.find("(2,3)") != std::string::npos);
}

TEST_CASE("model file: diagnostics") {
  CHECK(parse_error("n = 2\n").find("before the first section") != std::string::npos);
  CHECK(parse_error("[model]\nn = 2\n[Q]\n").find("unknown section [Q]") != std::string::npos);
  CHECK(parse_error("[model]\nn = 2\n[h]\n1\n").find("[h] needs 2 values") != std::string::npos);
  CHECK(parse_error("[model]\nn = 2\nkernel = blocks\n").find("needs a [partition]") !=
        std::string::npos);
  CHECK(parse_error("[model]\nn = 2\n[partition]\n1\n2\n").find("components") !=
        std::string::npos);
  CHECK(parse_error("[model]\nn = 2\nkernel = fancy\n").find("unknown kernel") !=
        std::string::npos);
  CHECK(parse_error("[model]\nn = x\n").find("test.model:2: not a number") != std::string::npos);
  CHECK_THROWS_AS(load_model("/nonexistent/file.model"), ParseError);
}

TEST_CASE("result table") {
  ResultTable t({"a", "b", "c"});
  t.set_meta("seed", "1");
  t.set_meta("claim", "x");
  t.set_meta("seed", "2");
  t.add_row({0.1, std::int64_t{3}, "p,q"});
  t.add_row({HUGE_VAL, std::int64_t{-1}, "say \"hi\""});
  CHECK_THROWS_AS(t.add_row({1.0}), DomainError);
  CHECK(t.to_csv() ==
        "# seed: 2\n# claim: x\na,b,c\n0.10000000000000001,3,\"p,q\"\ninf,-1,\"say \"\"hi\"\"\"\n");
  CHECK(format_cell(std::nan("")) == "nan");
  CHECK(format_cell(-HUGE_VAL) == "-inf");
}

TEST_CASE("seed streams") {
  CHECK(seed_split(42, 7) == seed_split(42, 7));
  CHECK(seed_split(42, 0) != seed_split(42, 1));
  CHECK(seed_split(42, 0) != seed_split(43, 0));
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 10000; ++s) seen.insert(seed_split(20260502, s));
  CHECK(seen.size() == 10000);
}

TEST_CASE("exit codes") {
  std::string err;
  CHECK(run_captured({"evolve", "--model", "/no/such/demo.model"}, &err) == kExitValidation);
  CHECK(err.find("/no/such/demo.model") != std::string::npos);
  CHECK(run_captured({"evolve", "--bogus"}, &err) == kExitUsage);
  CHECK(run_captured({"frobnicate"}, &err) == kExitUsage);
  CHECK(run_captured({}, &err) == kExitUsage);
  CHECK(run_captured({"--reduction", "sloppy", "evolve", "--model", "x"}, &err) == kExitUsage);
  const std::string data = SPINKAC_TEST_DATA_DIR;
  // A point mass is fully magnetized and has no equilibrium to converge to.
  CHECK(run_captured({"evolve", "--model", data + "/demo_n2.model", "--p0", "delta:++", "--out",
                      scratch("delta.csv").string()},
                     &err) == kExitValidation);
  CHECK(err.find("fully magnetized") != std::string::npos);
}

TEST_CASE("evolve reproduces the golden file") {
  const fs::path data = SPINKAC_TEST_DATA_DIR;
  const auto out = scratch("demo_n2_evolve.csv");
  const auto cwd = fs::current_path();
  fs::current_path(data);
  const int code = run_captured({"evolve", "--model", "demo_n2.model", "--p0", "demo_n2_p0.txt",
                                 "--t-end", "5", "--dt", "0.01", "--stride", "10", "--seed", "7",
                                 "--out", out.string()});
  fs::current_path(cwd);
  REQUIRE(code == kExitOk);
  CHECK(without_build_line(out) == without_build_line(data / "demo_n2_evolve.csv"));
}

TEST_CASE("evolve output is independent of the thread count") {
  const std::string data = SPINKAC_TEST_DATA_DIR;
  const auto a = scratch("t1.csv"), b = scratch("t3.csv");
  const std::vector<std::string> common = {"evolve", "--model", data + "/demo_n2.model",
                                           "--p0", data + "/demo_n2_p0.txt", "--t-end", "1"};
  auto with = [&](const std::string& threads, const fs::path& out) {
    std::vector<std::string> args = {"--threads", threads};
    args.insert(args.end(), common.begin(), common.end());
    args.insert(args.end(), {"--out", out.string()});
    return run_captured(args);
  };
  REQUIRE(with("1", a) == kExitOk);
  REQUIRE(with("3", b) == kExitOk);
  CHECK(without_build_line(a) == without_build_line(b));
}

TEST_CASE("subcommands run on small inputs") {
  const std::string data = SPINKAC_TEST_DATA_DIR;
  const std::string model = data + "/demo_n2.model";
  const auto out = scratch("out.csv").string();
  CHECK(run_captured({"mlsi-nl", "--model", model, "--trials", "50", "--out", out}) == kExitOk);
  CHECK(run_captured({"tree", "--model", model, "--samples", "2000", "--exact", "--out", out}) ==
        kExitOk);
  CHECK(run_captured({"mpp", "--n", "3", "--u", "2", "--runs", "500", "--out", out}) == kExitOk);
  CHECK(run_captured({"kac", "--model", model, "--N", "4", "--t-end", "2", "--exact", "--out",
                      out}) == kExitOk);
  CHECK(run_captured({"chaos", "--model", model, "--N-grid", "8,16", "--out", out}) == kExitOk);
  CHECK(run_captured({"kac-mlsi", "--model", model, "--N", "2", "--trials", "50", "--out", out}) ==
        kExitOk);
  CHECK(run_captured({"downup", "--L", "6", "--M", "0", "--mode", "cov", "--trials", "20", "--out",
                      out}) == kExitOk);
  CHECK(run_captured({"downup", "--L", "6", "--blocks-spec", "1,2,3:1;4,5,6:-1", "--mode",
                      "factorize", "--trials", "20", "--out", out}) == kExitOk);
  std::string err;
  CHECK(run_captured({"downup", "--L", "5", "--M", "0", "--out", out}, &err) == kExitValidation);
}
