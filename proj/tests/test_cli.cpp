// Copyright 2026 The lmax Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lmax/cli/config.hpp"
#include "lmax/cli/run.hpp"

namespace lmax::cli {
namespace {

namespace fs = std::filesystem;

const char* kMinimal = R"(
domain: {dimension: 1, L: 1, n: 64}
u: {kind: power, alpha: 0}
w: {kind: power, alpha: 0}
p: 2
)";

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("lmax_cli_test_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] fs::path file(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LMAX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(ParseConfigTest, MinimalAccepted) {
  const ExperimentConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.n, 64);
  EXPECT_EQ(c.p, 2.0);
  EXPECT_EQ(c.w, WeightW::power(0.0));
  EXPECT_EQ(c.u.alpha, 0.0);
  EXPECT_EQ(parse_config(""), ExperimentConfig{});
}

TEST(ParseConfigTest, UnknownKeysAreNamed) {
  try {
    parse_config("p: 2\nalpha_u: 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "alpha_u");
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("alpha_u"), std::string::npos);
  }
  try {
    parse_config("domain: {dimension: 1, size: 3}\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "domain.size");
  }
  EXPECT_THROW(parse_config("set: [{lower: [0], upper: [1], value: 2}]\n"), ParseError);
  EXPECT_THROW(parse_config("p: [1, 2\n"), ParseError);
  EXPECT_THROW(parse_config("p: two\n"), ParseError);
}

TEST(ParseConfigTest, ValidationNamesTheKey) {
  const auto key_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ValidationError& e) {
      return e.key();
    }
    return std::string("accepted");
  };
  EXPECT_EQ(key_of("p: 0\n"), "p");
  EXPECT_EQ(key_of("p: -1\n"), "p");
  EXPECT_EQ(key_of("lambda: [0.5, 1.0]\n"), "lambda");
  EXPECT_EQ(key_of("lambda: 0\n"), "lambda");
  EXPECT_EQ(key_of("w: {kind: power, alpha: -1}\n"), "w.alpha");
  EXPECT_EQ(key_of("w: {kind: piecewise, breakpoints: [1, 0.5], values: [1, 1]}\n"), "w");
  EXPECT_EQ(key_of("w: {kind: exotic}\n"), "w.kind");
  EXPECT_EQ(key_of("domain: {dimension: 3}\n"), "domain.dimension");
  EXPECT_EQ(key_of("domain: {n: 0}\n"), "domain.n");
  EXPECT_EQ(key_of("r: 0\n"), "r");
  EXPECT_EQ(key_of("set: [{lower: [1], upper: [0]}]\n"), "set");
  EXPECT_EQ(key_of("kind: sideways\n"), "kind");
  EXPECT_EQ(key_of("trials: 0\n"), "trials");
  EXPECT_EQ(key_of("p: 1.5\n"), "accepted");
}

TEST(ParseConfigTest, RoundTrip) {
  ExperimentConfig c;
  c.dimension = 2;
  c.half_width = 2.75;
  c.n = 48;
  c.levels = {16, 32, 64};
  c.u.alpha = -0.3;
  c.w = WeightW(PiecewiseTailWeight{{0.5, 2.0}, {3.0, 0.1}, 1.25});
  c.p = 1.0 / 3.0;
  c.function = {{{0.1, -0.2}, {0.7, 0.3}, 0.625}};
  c.set = {{{-1.0, -1.0}, {0.0, 1.0 / 7.0}, 1.0}};
  c.lambdas = {0.1, 1.0 / 3.0};
  c.r = 4.5;
  c.c = 0.0123;
  c.q_grid = {0.1, 0.2};
  c.trials = 5;
  c.budget = 7;
  c.max_family = 3;
  c.seed = 18446744073709551557ULL;
  c.kind = "weak";
  c.kernel = "naive";
  c.growth = GrowthCriterion::calibrated();
  c.expect = {{"value", 0.9, 1e-3, std::nullopt, 2.0, std::nullopt}, {"verdict", {}, 1e-9, {}, {}, "BOTH-STABLE"}};
  c.out = "report.jsonl";
  EXPECT_EQ(parse_config(print_config(c)), c);
  EXPECT_EQ(parse_config(print_config(ExperimentConfig{})), ExperimentConfig{});
  const ExperimentConfig m = parse_config(kMinimal);
  EXPECT_EQ(parse_config(print_config(m)), m);
}

TEST(RunTest, WeightsCheckBoundaryIsDivergent) {
  ExperimentConfig c = parse_config(kMinimal);
  c.w = WeightW::power(1.0);
  const RunResult r = run(c, "weights check");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0]["outputs"]["bp"], "divergent");
  EXPECT_DOUBLE_EQ(r.records[0]["outputs"]["delta2"].get<double>(), 4.0);
  c.w = WeightW::power(0.5);
  EXPECT_NEAR(run(c, "weights check").records[0]["outputs"]["bp"].get<double>(), 3.0, 1e-9);
}

TEST(RunTest, SearchIsDeterministic) {
  ExperimentConfig c = parse_config(kMinimal);
  c.n = 32;
  c.u.alpha = 1.5;
  c.budget = 4;
  c.seed = 9;
  const RunResult a = run(c, "search raposo"), b = run(c, "search raposo");
  EXPECT_EQ(json_lines(a), json_lines(b));
  EXPECT_EQ(csv_text(a), csv_text(b));
  EXPECT_TRUE(a.failures.empty());
  c.seed = 10;
  EXPECT_NE(run(c, "search raposo").records[0]["config_digest"], a.records[0]["config_digest"]);
}

TEST(RunTest, RecordsAreRerunnableFromInputs) {
  ExperimentConfig c = parse_config(kMinimal);
  c.set = {{{0.0}, {1.0}, 1.0}};
  c.levels = {64, 128};
  const RunResult r = run(c, "verify lemma21");
  ASSERT_EQ(r.records.size(), 2u);
  for (const auto& rec : r.records) {
    const ExperimentConfig again = parse_config(rec["inputs"].dump());
    EXPECT_EQ(again.n, rec["level"].get<Index>());
    const RunResult r2 = run(again, "verify lemma21");
    EXPECT_EQ(r2.records[0].dump(), rec.dump());
  }
}

TEST(RunTest, Prop24Record) {
  ExperimentConfig c = parse_config(kMinimal);
  c.half_width = 12.0;
  c.n = 4096;
  c.set = {{{0.0}, {1.0}, 1.0}};
  c.expect = {{"value", 11.0 / 12.0, 1e-3, {}, {}, {}}};
  const RunResult r = run(c, "verify prop24");
  ASSERT_EQ(r.records.size(), 1u);
  const double v = r.records[0]["outputs"]["value"].get<double>();
  // The grid value sits about 0.8% below the exact 11/12, outside 1e-3.
  EXPECT_NEAR(v, 11.0 / 12.0, 1e-2);
  EXPECT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.csv.size(), 1u);
  EXPECT_EQ(r.csv[0].metric, "value");
}

TEST(RunTest, EveryLevelOpRuns) {
  ExperimentConfig c = parse_config(kMinimal);
  c.n = 32;
  c.set = {{{0.0}, {0.5}, 1.0}};
  c.function = {{{-0.5}, {0.25}, 0.5}, {{0.0}, {0.5}, 1.0}};
  c.trials = 4;
  c.budget = 2;
  c.lambdas = {0.25, 0.75};
  for (const auto& op : subcommands()) {
    const RunResult r = run(c, op);
    ASSERT_EQ(r.records.size(), 1u) << op;
    EXPECT_TRUE(r.failures.empty()) << op << ": " << r.failures.front();
    EXPECT_EQ(r.records[0]["op"], op);
    EXPECT_FALSE(r.records[0].contains("wall_time_s"));
  }
  EXPECT_TRUE(run(c, "maximal", {true}).records[0].contains("wall_time_s"));
  EXPECT_THROW(run(c, "verify everything"), ValidationError);
}

TEST(RunTest, ExpectationKinds) {
  ExperimentConfig c = parse_config(kMinimal);
  c.function = {{{0.0}, {0.5}, 1.0}};
  c.expect = {{"mf_max", {}, 1e-9, 0.5, 1.5, {}}, {"kernel", {}, 1e-9, {}, {}, "fast"}};
  EXPECT_TRUE(run(c, "maximal").failures.empty());
  c.expect = {{"mf_max", {}, 1e-9, 2.0, {}, {}}, {"no_such_metric", 1.0, 1e-9, {}, {}, {}}};
  EXPECT_EQ(run(c, "maximal").failures.size(), 2u);
}

TEST(BinaryTest, ExitCodesAndFiles) {
  TempDir dir;
  write(dir.file("ok.yaml"), std::string(kMinimal) + "set: [{lower: [0], upper: [1]}]\n");
  write(dir.file("bad_p.yaml"), "p: 0\n");
  write(dir.file("unknown.yaml"), "alpha_u: 1\n");
  write(dir.file("strict.yaml"), std::string(kMinimal) +
                                     "set: [{lower: [0], upper: [1]}]\n"
                                     "expect: [{metric: value, value: 10, rel_tol: 1.0e-3}]\n");
  const std::string ok = "--config " + dir.file("ok.yaml").string();
  EXPECT_EQ(run_cli("verify prop24 " + ok), 0);
  EXPECT_EQ(run_cli("verify prop24 --config " + dir.file("bad_p.yaml").string()), 2);
  EXPECT_EQ(run_cli("verify prop24 --config " + dir.file("unknown.yaml").string()), 2);
  EXPECT_EQ(run_cli("verify prop24 --config " + dir.file("missing.yaml").string()), 2);
  EXPECT_EQ(run_cli("verify prop24 --config " + dir.file("strict.yaml").string()), 0);
  EXPECT_EQ(run_cli("verify prop24 --assert --config " + dir.file("strict.yaml").string()), 3);
  EXPECT_EQ(run_cli("frobnicate " + ok), 2);

  const std::string out = dir.file("r.jsonl").string();
  ASSERT_EQ(run_cli("verify prop24 " + ok + " --levels 64,128 --out " + out), 0);
  const std::string lines = slurp(out);
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2);
  const std::string csv = slurp(dir.file("r.csv"));
  EXPECT_EQ(csv.rfind("level,metric,value\n64,value,", 0), 0u);
}

TEST(BinaryTest, ByteIdenticalReports) {
  TempDir dir;
  write(dir.file("s.yaml"), "domain: {n: 32}\nu: {alpha: 1.5}\nbudget: 4\nseed: 3\n");
  const std::string base = "search raposo --config " + dir.file("s.yaml").string() + " --out ";
  ASSERT_EQ(run_cli(base + dir.file("a.jsonl").string()), 0);
  ASSERT_EQ(run_cli(base + dir.file("b.jsonl").string()), 0);
  EXPECT_FALSE(slurp(dir.file("a.jsonl")).empty());
  EXPECT_EQ(slurp(dir.file("a.jsonl")), slurp(dir.file("b.jsonl")));
  EXPECT_EQ(slurp(dir.file("a.csv")), slurp(dir.file("b.csv")));
  ASSERT_EQ(run_cli(base + dir.file("c.jsonl").string() + " --seed 4"), 0);
  EXPECT_NE(slurp(dir.file("a.jsonl")), slurp(dir.file("c.jsonl")));
}

TEST(Fnv1aTest, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

}  // namespace
}  // namespace lmax::cli
