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

#pragma once

// Experiment configuration: a YAML mapping with a closed set of keys. The
// canonical printed form is JSON, which is itself a valid config.

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmax/grid.hpp"
#include "lmax/verify.hpp"
#include "lmax/weight_classes.hpp"
#include "lmax/weights.hpp"

namespace lmax::cli {

/// Malformed text or an unknown key. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string key, int line, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}
  [[nodiscard]] const std::string& key() const { return key_; }
  [[nodiscard]] int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Well-formed config whose value for `key` is out of range.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string key, const std::string& why)
      : std::runtime_error(key + ": " + why), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Axis-aligned physical box [lower, upper); `value` is used by functions only.
struct BoxSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  double value = 1.0;
  friend bool operator==(const BoxSpec&, const BoxSpec&) = default;
};

/// Check on one output metric, applied in --assert mode.
struct Expectation {
  std::string metric;
  std::optional<double> value;
  double rel_tol = 1e-9;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<std::string> equals;
  friend bool operator==(const Expectation&, const Expectation&) = default;
};

struct ExperimentConfig {
  int dimension = 1;
  double half_width = 1.0;
  Index n = 64;
  std::vector<Index> levels;
  UWeightSpec u;
  WeightW w = WeightW::power(0.0);
  double p = 2.0;
  std::vector<BoxSpec> function;
  std::vector<BoxSpec> set;
  std::vector<double> lambdas{0.5};
  double r = 4.0;
  std::optional<double> c;
  std::vector<double> q_grid;
  std::size_t trials = 32;
  std::size_t budget = 32;
  std::size_t max_family = 8;
  std::uint64_t seed = 0;
  std::string kind = "both";
  std::string kernel = "fast";
  GrowthCriterion growth;
  std::vector<Expectation> expect;
  std::string out;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  [[nodiscard]] GridDomain domain() const { return {dimension, half_width, n}; }
  /// Copy with the grid set to one refinement level.
  [[nodiscard]] ExperimentConfig at_level(Index level) const {
    ExperimentConfig c = *this;
    c.n = level;
    c.levels.clear();
    return c;
  }
};

namespace detail {

inline int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

[[noreturn]] inline void fail_parse(const std::string& key, const YAML::Node& node, const std::string& why) {
  const int line = line_of(node);
  throw ParseError(key, line, "line " + std::to_string(line) + ": " + key + ": " + why);
}

inline void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail_parse(where.empty() ? "config" : where, node, "expected a mapping");
  for (const auto& kv : node) {
    const std::string k = kv.first.as<std::string>();
    const std::string path = where.empty() ? k : where + "." + k;
    if (!allowed.contains(k)) fail_parse(path, kv.first, "unknown key '" + path + "'");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail_parse(key, node, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    fail_parse(key, node, "cannot read '" + node.Scalar() + "'");
  }
}

template <typename T>
std::vector<T> sequence(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail_parse(key, node, "expected a list");
  std::vector<T> out;
  for (const auto& item : node) out.push_back(scalar<T>(item, key));
  return out;
}

inline std::size_t count(const YAML::Node& node, const std::string& key) {
  const auto v = scalar<long long>(node, key);
  if (v < 0) throw ValidationError(key, "must be nonnegative");
  return static_cast<std::size_t>(v);
}

inline std::vector<BoxSpec> boxes(const YAML::Node& node, const std::string& key, bool with_value) {
  if (!node.IsSequence()) fail_parse(key, node, "expected a list of boxes");
  std::vector<BoxSpec> out;
  for (const auto& item : node) {
    check_keys(item, key, with_value ? std::set<std::string>{"lower", "upper", "value"}
                                     : std::set<std::string>{"lower", "upper"});
    BoxSpec b;
    if (!item["lower"] || !item["upper"]) fail_parse(key, item, "box needs lower and upper");
    b.lower = sequence<double>(item["lower"], key + ".lower");
    b.upper = sequence<double>(item["upper"], key + ".upper");
    if (with_value && item["value"]) b.value = scalar<double>(item["value"], key + ".value");
    out.push_back(std::move(b));
  }
  return out;
}

inline WeightW parse_w(const YAML::Node& node) {
  check_keys(node, "w", {"kind", "alpha", "breakpoints", "values", "tail_alpha"});
  const std::string kind = node["kind"] ? scalar<std::string>(node["kind"], "w.kind") : "power";
  if (kind == "power") {
    for (const char* k : {"breakpoints", "values", "tail_alpha"}) {
      if (node[k]) fail_parse(std::string("w.") + k, node[k], "not used by a power weight");
    }
    const double alpha = node["alpha"] ? scalar<double>(node["alpha"], "w.alpha") : 0.0;
    if (!(alpha > -1.0) || !std::isfinite(alpha)) throw ValidationError("w.alpha", "must exceed -1");
    return WeightW::power(alpha);
  }
  if (kind == "piecewise") {
    if (node["alpha"]) fail_parse("w.alpha", node["alpha"], "piecewise weights use tail_alpha");
    PiecewiseTailWeight pw;
    if (node["breakpoints"]) pw.breakpoints = sequence<double>(node["breakpoints"], "w.breakpoints");
    if (node["values"]) pw.values = sequence<double>(node["values"], "w.values");
    if (node["tail_alpha"]) pw.tail_alpha = scalar<double>(node["tail_alpha"], "w.tail_alpha");
    if (!(pw.tail_alpha > -1.0)) throw ValidationError("w.tail_alpha", "must exceed -1");
    try {
      return WeightW(pw);
    } catch (const InvalidArgument& e) {
      throw ValidationError("w", e.what());
    }
  }
  throw ValidationError("w.kind", "expected power or piecewise");
}

inline void validate_boxes(const std::vector<BoxSpec>& bs, const std::string& key, int dimension) {
  for (const auto& b : bs) {
    if (b.lower.size() != static_cast<std::size_t>(dimension) || b.upper.size() != b.lower.size()) {
      throw ValidationError(key, "box corners need one coordinate per axis");
    }
    for (std::size_t a = 0; a < b.lower.size(); ++a) {
      if (!(b.lower[a] < b.upper[a])) throw ValidationError(key, "box lower must be below upper");
    }
    if (!(b.value > 0.0) || !std::isfinite(b.value)) throw ValidationError(key + ".value", "must be positive");
  }
}

}  // namespace detail

/// Range checks shared by parsing and programmatic construction.
inline void validate(const ExperimentConfig& c) {
  if (c.dimension != 1 && c.dimension != 2) throw ValidationError("domain.dimension", "must be 1 or 2");
  if (!(c.half_width > 0.0) || !std::isfinite(c.half_width)) throw ValidationError("domain.L", "must be positive");
  if (c.n < 1) throw ValidationError("domain.n", "must be at least 1");
  for (Index l : c.levels) {
    if (l < 1) throw ValidationError("domain.levels", "levels must be at least 1");
  }
  if (!(c.p > 0.0) || !std::isfinite(c.p)) throw ValidationError("p", "must be positive");
  if (!std::isfinite(c.u.alpha)) throw ValidationError("u.alpha", "must be finite");
  if (!std::isfinite(delta2_constant(c.w))) throw ValidationError("w", "must satisfy the doubling condition");
  for (double l : c.lambdas) {
    if (!(l > 0.0 && l < 1.0)) throw ValidationError("lambda", "levels must lie in (0, 1)");
  }
  if (!(c.r > 0.0) || !std::isfinite(c.r)) throw ValidationError("r", "must be positive");
  if (c.c && !(*c.c > 0.0)) throw ValidationError("c", "must be positive");
  for (double q : c.q_grid) {
    if (!(q > 0.0)) throw ValidationError("q_grid", "exponents must be positive");
  }
  if (c.trials < 1) throw ValidationError("trials", "must be at least 1");
  if (c.budget < 1) throw ValidationError("budget", "must be at least 1");
  if (c.max_family < 1) throw ValidationError("max_family", "must be at least 1");
  if (c.kind != "weak" && c.kind != "strong" && c.kind != "both") {
    throw ValidationError("kind", "expected weak, strong or both");
  }
  if (c.kernel != "fast" && c.kernel != "naive") throw ValidationError("kernel", "expected fast or naive");
  if (!(c.growth.stable_spread > 1.0)) throw ValidationError("growth.stable_spread", "must exceed 1");
  if (!(c.growth.min_step_factor > 0.0)) throw ValidationError("growth.min_step_factor", "must be positive");
  if (c.growth.min_doublings < 1) throw ValidationError("growth.min_doublings", "must be at least 1");
  if (!(c.growth.min_total_factor > 0.0)) throw ValidationError("growth.min_total_factor", "must be positive");
  detail::validate_boxes(c.function, "function", c.dimension);
  detail::validate_boxes(c.set, "set", c.dimension);
  for (const auto& e : c.expect) {
    if (e.metric.empty()) throw ValidationError("expect.metric", "must name an output");
    if (!(e.rel_tol >= 0.0)) throw ValidationError("expect.rel_tol", "must be nonnegative");
  }
}

inline ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError("config", e.mark.line + 1, e.what());
  }
  ExperimentConfig c;
  if (root.IsNull()) {
    validate(c);
    return c;
  }
  using detail::scalar;
  detail::check_keys(root, "", {"domain", "u", "w", "p", "function", "set", "lambda", "r", "c", "q_grid",
                                "trials", "budget", "max_family", "seed", "kind", "kernel", "growth",
                                "expect", "out"});
  if (const auto d = root["domain"]) {
    detail::check_keys(d, "domain", {"dimension", "L", "n", "levels"});
    if (d["dimension"]) c.dimension = scalar<int>(d["dimension"], "domain.dimension");
    if (d["L"]) c.half_width = scalar<double>(d["L"], "domain.L");
    if (d["n"]) c.n = scalar<Index>(d["n"], "domain.n");
    if (d["levels"]) c.levels = detail::sequence<Index>(d["levels"], "domain.levels");
  }
  if (const auto u = root["u"]) {
    detail::check_keys(u, "u", {"kind", "alpha"});
    if (u["kind"] && scalar<std::string>(u["kind"], "u.kind") != "power") {
      throw ValidationError("u.kind", "expected power");
    }
    if (u["alpha"]) c.u.alpha = scalar<double>(u["alpha"], "u.alpha");
  }
  if (const auto w = root["w"]) c.w = detail::parse_w(w);
  if (root["p"]) c.p = scalar<double>(root["p"], "p");
  if (root["function"]) c.function = detail::boxes(root["function"], "function", true);
  if (root["set"]) c.set = detail::boxes(root["set"], "set", false);
  if (const auto l = root["lambda"]) {
    c.lambdas = l.IsSequence() ? detail::sequence<double>(l, "lambda") : std::vector{scalar<double>(l, "lambda")};
  }
  if (root["r"]) c.r = scalar<double>(root["r"], "r");
  if (root["c"]) c.c = scalar<double>(root["c"], "c");
  if (root["q_grid"]) c.q_grid = detail::sequence<double>(root["q_grid"], "q_grid");
  if (root["trials"]) c.trials = detail::count(root["trials"], "trials");
  if (root["budget"]) c.budget = detail::count(root["budget"], "budget");
  if (root["max_family"]) c.max_family = detail::count(root["max_family"], "max_family");
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["kind"]) c.kind = scalar<std::string>(root["kind"], "kind");
  if (root["kernel"]) c.kernel = scalar<std::string>(root["kernel"], "kernel");
  if (const auto g = root["growth"]) {
    detail::check_keys(g, "growth", {"stable_spread", "min_step_factor", "min_doublings", "min_total_factor"});
    if (g["stable_spread"]) c.growth.stable_spread = scalar<double>(g["stable_spread"], "growth.stable_spread");
    if (g["min_step_factor"]) {
      c.growth.min_step_factor = scalar<double>(g["min_step_factor"], "growth.min_step_factor");
    }
    if (g["min_doublings"]) c.growth.min_doublings = detail::count(g["min_doublings"], "growth.min_doublings");
    if (g["min_total_factor"]) {
      c.growth.min_total_factor = scalar<double>(g["min_total_factor"], "growth.min_total_factor");
    }
  }
  if (const auto ex = root["expect"]) {
    if (!ex.IsSequence()) detail::fail_parse("expect", ex, "expected a list");
    for (const auto& item : ex) {
      detail::check_keys(item, "expect", {"metric", "value", "rel_tol", "min", "max", "equals"});
      Expectation e;
      if (item["metric"]) e.metric = scalar<std::string>(item["metric"], "expect.metric");
      if (item["value"]) e.value = scalar<double>(item["value"], "expect.value");
      if (item["rel_tol"]) e.rel_tol = scalar<double>(item["rel_tol"], "expect.rel_tol");
      if (item["min"]) e.min = scalar<double>(item["min"], "expect.min");
      if (item["max"]) e.max = scalar<double>(item["max"], "expect.max");
      if (item["equals"]) e.equals = scalar<std::string>(item["equals"], "expect.equals");
      c.expect.push_back(std::move(e));
    }
  }
  if (root["out"]) c.out = scalar<std::string>(root["out"], "out");
  validate(c);
  return c;
}

/// Every field, in a fixed order.
inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["domain"] = {{"dimension", c.dimension}, {"L", c.half_width}, {"n", c.n}, {"levels", c.levels}};
  j["u"] = {{"kind", "power"}, {"alpha", c.u.alpha}};
  if (const auto* pw = std::get_if<PowerWeight>(&c.w.form())) {
    j["w"] = {{"kind", "power"}, {"alpha", pw->alpha}};
  } else {
    const auto& pt = std::get<PiecewiseTailWeight>(c.w.form());
    j["w"] = {{"kind", "piecewise"},
              {"breakpoints", pt.breakpoints},
              {"values", pt.values},
              {"tail_alpha", pt.tail_alpha}};
  }
  j["p"] = c.p;
  const auto box_list = [](const std::vector<BoxSpec>& bs, bool with_value) {
    ordered_json arr = ordered_json::array();
    for (const auto& b : bs) {
      ordered_json e = {{"lower", b.lower}, {"upper", b.upper}};
      if (with_value) e["value"] = b.value;
      arr.push_back(e);
    }
    return arr;
  };
  j["function"] = box_list(c.function, true);
  j["set"] = box_list(c.set, false);
  j["lambda"] = c.lambdas;
  j["r"] = c.r;
  if (c.c) j["c"] = *c.c;
  j["q_grid"] = c.q_grid;
  j["trials"] = c.trials;
  j["budget"] = c.budget;
  j["max_family"] = c.max_family;
  j["seed"] = c.seed;
  j["kind"] = c.kind;
  j["kernel"] = c.kernel;
  j["growth"] = {{"stable_spread", c.growth.stable_spread},
                 {"min_step_factor", c.growth.min_step_factor},
                 {"min_doublings", c.growth.min_doublings},
                 {"min_total_factor", c.growth.min_total_factor}};
  ordered_json ex = ordered_json::array();
  for (const auto& e : c.expect) {
    ordered_json item = {{"metric", e.metric}};
    if (e.value) item["value"] = *e.value;
    item["rel_tol"] = e.rel_tol;
    if (e.min) item["min"] = *e.min;
    if (e.max) item["max"] = *e.max;
    if (e.equals) item["equals"] = *e.equals;
    ex.push_back(item);
  }
  j["expect"] = ex;
  j["out"] = c.out;
  return j;
}

/// Canonical text; parse_config(print_config(c)) == c.
inline std::string print_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace lmax::cli
