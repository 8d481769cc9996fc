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

// lmax_cli: run one experiment from a config file.
//
//   lmax_cli verify prop24 --config configs/prop24.yaml --out report.jsonl
//
// Exit codes: 0 ok, 2 config or input error, 3 failed assertion (--assert).

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lmax/cli/config.hpp"
#include "lmax/cli/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAssert = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lmax::cli::ParseError("config", 0, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lmax::cli::ValidationError("out", "cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid experiments for the maximal operator on weighted Lorentz spaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::vector<lmax::Index> levels;
  bool assert_mode = false;
  bool timing = false;
  app.add_option("--config", config_path, "experiment config (YAML)")->required();
  app.add_option("--out", out_path, "JSON-lines report; the CSV summary goes next to it");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--levels", levels, "refinement levels, e.g. 256,512,1024")->delimiter(',');
  app.add_flag("--assert", assert_mode, "exit 3 when an invariant or expectation fails");
  app.add_flag("--timing", timing, "add wall_time_s to every record");
  app.fallthrough();

  // Nested commands map onto "group name" strings understood by run().
  std::string chosen;
  const auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& full, const std::string& help) {
    parent->add_subcommand(name, help)->callback([&chosen, full] { chosen = full; });
  };
  leaf(&app, "maximal", "maximal", "Mf on the configured function");
  leaf(&app, "rearrange", "rearrange", "f* and its Hardy average");
  leaf(&app, "norms", "norms", "Lorentz norms of f and Mf");
  leaf(&app, "opnorm", "opnorm", "witness lower bounds for the operator norm");
  leaf(&app, "equivalence", "equivalence", "weak and strong estimates across levels");
  auto* weights = app.add_subcommand("weights", "weight-class constants")->require_subcommand(1);
  leaf(weights, "check", "weights check", "B_p, Delta_2, A_p and A_1 constants");
  auto* search = app.add_subcommand("search", "counterexample searches")->require_subcommand(1);
  leaf(search, "raposo", "search raposo", "largest cube-family ratio per exponent");
  auto* verify = app.add_subcommand("verify", "inequality checks")->require_subcommand(1);
  for (const char* name : {"riesz", "lemma21", "lemma22", "inclusion", "prop24"}) {
    leaf(verify, name, std::string("verify ") + name, "");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  lmax::cli::RunResult result;
  std::string out;
  try {
    lmax::cli::ExperimentConfig cfg = lmax::cli::parse_config(read_file(config_path));
    if (seed) cfg.seed = *seed;
    if (!levels.empty()) cfg.levels = levels;
    out = out_path.empty() ? cfg.out : out_path;
    result = lmax::cli::run(cfg, chosen, {timing});
  } catch (const lmax::cli::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lmax::cli::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lmax::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  }

  const std::string lines = lmax::cli::json_lines(result);
  try {
    if (out.empty()) {
      std::cout << lines;
    } else {
      std::filesystem::path report(out);
      write_file(report, lines);
      write_file(std::filesystem::path(report).replace_extension(".csv"), lmax::cli::csv_text(result));
    }
  } catch (const lmax::cli::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  if (assert_mode && !result.failures.empty()) {
    for (const auto& f : result.failures) std::cerr << "assertion failed: " << f << "\n";
    return kExitAssert;
  }
  return kExitOk;
}
