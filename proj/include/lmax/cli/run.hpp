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

// Dispatch from a subcommand name to the library, producing one JSON record
// per refinement level and a (level, metric, value) CSV summary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmax/cli/config.hpp"
#include "lmax/lmax.hpp"

namespace lmax::cli {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

struct CsvRow {
  Index level;
  std::string metric;
  double value;
};

struct RunOptions {
  /// Adds wall_time_s to each record; timed records are not reproducible.
  bool timing = false;
};

struct RunResult {
  std::vector<Json> records;
  std::vector<CsvRow> csv;
  /// Failed built-in invariants and expectations, one message each.
  std::vector<std::string> failures;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{
      "maximal",        "rearrange",      "norms",        "weights check",   "search raposo",
      "verify riesz",   "verify lemma21", "verify lemma22", "verify inclusion", "verify prop24",
      "opnorm",         "equivalence"};
  return names;
}

namespace detail {

/// One run at one level: outputs, constants, CSV metrics and invariant failures.
struct LevelResult {
  Json outputs = Json::object();
  Json constants = Json::object();
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> failures;
};

inline std::string number_tag(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

inline GridFunction build_function(const ExperimentConfig& c, const GridDomain& d) {
  if (c.function.empty()) {
    if (c.set.empty()) throw ValidationError("function", "this subcommand needs a function or a set");
    GridSet e(d);
    for (const auto& b : c.set) e |= box_set(d, b.lower, b.upper);
    return e.indicator();
  }
  std::vector<double> v(static_cast<std::size_t>(d.cell_count()), 0.0);
  for (const auto& b : c.function) {
    const GridSet s = box_set(d, b.lower, b.upper);
    for (Index i = 0; i < d.cell_count(); ++i) {
      if (s.contains(i)) v[static_cast<std::size_t>(i)] = std::max(v[static_cast<std::size_t>(i)], b.value);
    }
  }
  return {d, std::move(v)};
}

inline GridSet build_set(const ExperimentConfig& c, const GridDomain& d) {
  GridSet e(d);
  for (const auto& b : c.set) e |= box_set(d, b.lower, b.upper);
  return e;
}

inline LorentzParams params(const ExperimentConfig& c, const GridDomain& d) {
  return {c.p, c.u.materialize(d), c.w};
}

inline void add_weight_constants(LevelResult& r, const ExperimentConfig& c, const LorentzParams& P) {
  r.constants["u_clamped_cells"] = P.u().clamped_cells();
  r.constants["w"] = c.w.describe();
  r.constants["delta2"] = P.delta2();
}

inline LevelResult op_maximal(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const GridFunction f = build_function(c, d);
  const GridFunction m = c.kernel == "naive" ? maximal_naive(f) : maximal_fast(f);
  const double f_max = f.max(), m_max = m.max();
  r.outputs = {{"kernel", c.kernel},
               {"f_max", f_max},
               {"mf_max", m_max},
               {"f_integral", f.integral()},
               {"mf_integral", m.integral()},
               {"mf_support", level_set(m, std::numeric_limits<double>::min()).measure()}};
  bool dominates = true;
  for (Index i = 0; i < d.cell_count(); ++i) dominates = dominates && m[i] >= f[i] && m[i] <= f_max;
  r.outputs["bounds_hold"] = dominates;
  r.metrics = {{"mf_max", m_max}, {"mf_integral", m.integral()}};
  if (!dominates) r.failures.push_back("maximal: f <= Mf <= max f violated");
  return r;
}

inline LevelResult op_rearrange(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const GridFunction f = build_function(c, d);
  const DecreasingStep fs = rearrangement(f);
  std::vector<double> hardy_values;
  const auto tgrid = default_tgrid(d, 16);
  for (double t : tgrid) hardy_values.push_back(fs.empty() ? 0.0 : hardy(fs, t));
  r.outputs = {{"breakpoints", fs.breakpoints()},
               {"values", fs.values()},
               {"support", fs.support()},
               {"tgrid", tgrid},
               {"hardy", hardy_values}};
  r.metrics = {{"support", fs.support()}, {"steps", static_cast<double>(fs.values().size())}};
  return r;
}

inline LevelResult op_norms(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const LorentzParams P = params(c, d);
  const GridFunction f = build_function(c, d);
  const LorentzNorms nf = lorentz_norms(f, P);
  const LorentzNorms nm = lorentz_norms(maximal_fast(f), P);
  r.outputs = {{"strong", nf.strong}, {"weak", nf.weak}, {"mf_strong", nm.strong}, {"mf_weak", nm.weak}};
  add_weight_constants(r, c, P);
  r.metrics = {{"strong", nf.strong}, {"weak", nf.weak}, {"mf_strong", nm.strong}, {"mf_weak", nm.weak}};
  if (!(nf.weak <= nf.strong) || !(nm.weak <= nm.strong)) r.failures.push_back("norms: weak > strong");
  return r;
}

inline LevelResult op_weights(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const WeightU u = c.u.materialize(d);
  const auto bp = bp_constant(c.w, c.p);
  r.outputs["bp"] = bp ? Json(*bp) : Json("divergent");
  r.outputs["bpinf"] = c.p <= 1.0 ? Json(bpinf_constant(c.w, c.p)) : Json(nullptr);
  r.outputs["delta2"] = delta2_constant(c.w);
  r.outputs["ap"] = c.p > 1.0 ? Json(ap_constant(u, c.p)) : Json(nullptr);
  r.outputs["a1"] = a1_constant(u);
  r.constants["u_clamped_cells"] = u.clamped_cells();
  r.constants["w"] = c.w.describe();
  if (bp) r.metrics.emplace_back("bp", *bp);
  r.metrics.emplace_back("delta2", r.outputs["delta2"].get<double>());
  if (c.p > 1.0) r.metrics.emplace_back("ap", r.outputs["ap"].get<double>());
  r.metrics.emplace_back("a1", r.outputs["a1"].get<double>());
  return r;
}

inline Json family_json(const CubeFamily& fam) {
  Json arr = Json::array();
  for (const auto& pr : fam.pairs()) {
    std::vector<Index> cells;
    for (Index i = 0; i < fam.domain().cell_count(); ++i) {
      if (pr.subset.contains(i)) cells.push_back(i);
    }
    const int dim = fam.domain().dimension();
    std::vector<Index> lower(pr.cube.lower.begin(), pr.cube.lower.begin() + dim);
    arr.push_back(Json{{"lower", lower}, {"side", pr.cube.side}, {"subset", cells}});
  }
  return arr;
}

inline LevelResult op_search(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const WeightU u = c.u.materialize(d);
  RaposoSearchOptions opt;
  opt.q_grid = c.q_grid;
  opt.budget = c.budget;
  opt.seed = c.seed;
  opt.max_family = c.max_family;
  const auto certs = raposo_search(u, c.w, c.p, opt);
  Json arr = Json::array();
  double best = 0.0;
  for (const auto& cert : certs) {
    const bool ok = cert.verify(u, c.w);
    arr.push_back(Json{{"q", cert.q}, {"ratio", cert.ratio}, {"trial", cert.trial}, {"verified", ok},
                       {"family", family_json(cert.family)}});
    r.metrics.emplace_back("ratio[q=" + number_tag(cert.q) + "]", cert.ratio);
    best = std::max(best, cert.ratio);
    if (!ok) r.failures.push_back("search raposo: certificate at q=" + number_tag(cert.q) + " does not verify");
  }
  r.outputs = {{"certificates", arr}, {"best_ratio", best}};
  r.constants["u_clamped_cells"] = u.clamped_cells();
  return r;
}

inline LevelResult op_riesz(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const auto tgrid = default_tgrid(d);
  const RieszSandwich s = riesz_sandwich(build_function(c, d), tgrid);
  r.outputs = {{"c_est", s.c_est}, {"C_est", s.C_est}, {"dominates", s.dominates}, {"tgrid", tgrid},
               {"ratios", s.ratios}};
  r.metrics = {{"c_est", s.c_est}, {"C_est", s.C_est}};
  if (!s.dominates || !(s.c_est > 0.0) || !std::isfinite(s.C_est)) {
    r.failures.push_back("verify riesz: sandwich invariants violated");
  }
  return r;
}

inline LevelResult op_lemma21(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const LorentzParams P = params(c, d);
  const GridSet e = build_set(c, d);
  Json rows = Json::array();
  double worst = 0.0;
  for (double lambda : c.lambdas) {
    const auto k = lemma21_check(e, lambda, P);
    rows.push_back(Json{{"lambda", lambda}, {"lhs", k.lhs}, {"base", k.base}, {"ratio", k.ratio}});
    r.metrics.emplace_back("ratio[lambda=" + number_tag(lambda) + "]", k.ratio);
    worst = std::max(worst, k.ratio);
  }
  r.outputs = {{"rows", rows}, {"max_ratio", worst}};
  if (c.lambdas.size() == 1) {
    r.outputs["lhs"] = rows[0]["lhs"];
    r.outputs["base"] = rows[0]["base"];
  }
  add_weight_constants(r, c, P);
  return r;
}

inline LevelResult op_lemma22(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const GridSet e = build_set(c, d);
  Json rows = Json::array();
  double lowest = std::numeric_limits<double>::infinity();
  for (double lambda : c.lambdas) {
    const double k = lemma22_check(e, lambda);
    const double bound = 1.0 / (1.0 - std::log(lambda));
    rows.push_back(Json{{"lambda", lambda}, {"c_est", k}, {"trivial_bound", bound}});
    r.metrics.emplace_back("c_est[lambda=" + number_tag(lambda) + "]", k);
    lowest = std::min(lowest, k);
    if (!(k >= bound)) r.failures.push_back("verify lemma22: c_est below 1/(1 - log lambda)");
  }
  r.outputs = {{"rows", rows}, {"min_c_est", lowest}};
  return r;
}

inline LevelResult op_inclusion(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const GridSet e = build_set(c, d);
  double cval = 0.0;
  if (c.c) {
    cval = *c.c;
  } else {
    double lowest = std::numeric_limits<double>::infinity();
    for (double lambda : c.lambdas) lowest = std::min(lowest, lemma22_check(e, lambda));
    cval = lowest / 2.0;
  }
  Json rows = Json::array();
  bool all = true;
  for (double lambda : c.lambdas) {
    const bool ok = corollary_inclusion_check(e, lambda, cval);
    rows.push_back(Json{{"lambda", lambda}, {"holds", ok}});
    r.metrics.emplace_back("holds[lambda=" + number_tag(lambda) + "]", ok ? 1.0 : 0.0);
    all = all && ok;
  }
  r.outputs = {{"c", cval}, {"rows", rows}, {"all_hold", all}};
  if (!c.c && !all) r.failures.push_back("verify inclusion: fails at half the observed constant");
  return r;
}

inline LevelResult op_prop24(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const LorentzParams P = params(c, d);
  const double v = prop24_integral(build_set(c, d), c.r, P);
  r.outputs = {{"value", v}, {"r", c.r}};
  add_weight_constants(r, c, P);
  r.metrics = {{"value", v}};
  if (!std::isfinite(v)) r.failures.push_back("verify prop24: integral is not finite");
  return r;
}

inline LevelResult op_opnorm(const ExperimentConfig& c, const GridDomain& d) {
  LevelResult r;
  const LorentzParams P = params(c, d);
  const auto ratios = witness_sweep(P, c.trials, c.seed);
  const auto weak = best_witness(ratios, NormKind::Weak);
  const auto strong = best_witness(ratios, NormKind::Strong);
  if (c.kind != "strong") {
    r.outputs["weak"] = {{"estimate", weak.estimate}, {"witness", weak.witness}};
    r.metrics.emplace_back("weak", weak.estimate);
  }
  if (c.kind != "weak") {
    r.outputs["strong"] = {{"estimate", strong.estimate}, {"witness", strong.witness}};
    r.metrics.emplace_back("strong", strong.estimate);
  }
  r.outputs["trials"] = c.trials;
  add_weight_constants(r, c, P);
  if (!(weak.estimate <= strong.estimate)) r.failures.push_back("opnorm: weak estimate above strong");
  return r;
}

inline const std::map<std::string, std::function<LevelResult(const ExperimentConfig&, const GridDomain&)>>&
level_ops() {
  static const std::map<std::string, std::function<LevelResult(const ExperimentConfig&, const GridDomain&)>> ops{
      {"maximal", op_maximal},
      {"rearrange", op_rearrange},
      {"norms", op_norms},
      {"weights check", op_weights},
      {"search raposo", op_search},
      {"verify riesz", op_riesz},
      {"verify lemma21", op_lemma21},
      {"verify lemma22", op_lemma22},
      {"verify inclusion", op_inclusion},
      {"verify prop24", op_prop24},
      {"opnorm", op_opnorm}};
  return ops;
}

/// Looks up a dotted path such as "rows.0.ratio" in a record's outputs.
inline const Json* find_metric(const Json& outputs, const std::string& metric) {
  const Json* cur = &outputs;
  std::stringstream ss(metric);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (cur->is_object() && cur->contains(part)) {
      cur = &(*cur)[part];
    } else if (cur->is_array() && !part.empty() && std::all_of(part.begin(), part.end(), ::isdigit)) {
      const std::size_t i = std::stoul(part);
      if (i >= cur->size()) return nullptr;
      cur = &(*cur)[i];
    } else {
      return nullptr;
    }
  }
  return cur;
}

inline std::vector<std::string> check_expectations(const Json& record, const std::vector<Expectation>& expect) {
  std::vector<std::string> failures;
  const std::string where = std::string(record["op"]) + " at n=" + std::to_string(record["level"].get<Index>());
  for (const auto& e : expect) {
    const Json* v = find_metric(record["outputs"], e.metric);
    if (v == nullptr) {
      failures.push_back(where + ": no output named " + e.metric);
      continue;
    }
    if (e.equals) {
      const std::string got = v->is_string() ? v->get<std::string>() : v->dump();
      if (got != *e.equals) failures.push_back(where + ": " + e.metric + " = " + got + ", expected " + *e.equals);
    }
    if (!e.value && !e.min && !e.max) continue;
    if (!v->is_number() && !v->is_boolean()) {
      failures.push_back(where + ": " + e.metric + " is not numeric");
      continue;
    }
    const double x = v->is_boolean() ? (v->get<bool>() ? 1.0 : 0.0) : v->get<double>();
    if (e.value && !(std::abs(x - *e.value) <= e.rel_tol * std::abs(*e.value))) {
      failures.push_back(where + ": " + e.metric + " = " + number_tag(x) + ", expected " + number_tag(*e.value) +
                         " within relative " + number_tag(e.rel_tol));
    }
    if (e.min && !(x >= *e.min)) failures.push_back(where + ": " + e.metric + " below " + number_tag(*e.min));
    if (e.max && !(x <= *e.max)) failures.push_back(where + ": " + e.metric + " above " + number_tag(*e.max));
  }
  return failures;
}

inline Json make_record(const std::string& op, const ExperimentConfig& level_cfg, Index level) {
  Json rec;
  rec["op"] = op;
  rec["version"] = kVersion;
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(fnv1a64(op + "\n" + to_json(level_cfg).dump())));
  rec["config_digest"] = digest;
  rec["level"] = level;
  rec["inputs"] = to_json(level_cfg);
  return rec;
}

}  // namespace detail

/// Runs `subcommand` on every level (config levels, or n alone). Library and
/// validation errors propagate; invariant and expectation failures are
/// collected in the result.
inline RunResult run(const ExperimentConfig& cfg, const std::string& subcommand, const RunOptions& opts = {}) {
  validate(cfg);
  RunResult out;
  const std::vector<Index> levels = cfg.levels.empty() ? std::vector<Index>{cfg.n} : cfg.levels;
  const auto started = std::chrono::steady_clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };

  if (subcommand == "equivalence") {
    EquivalenceSetup s;
    s.dimension = cfg.dimension;
    s.half_width = cfg.half_width;
    s.p = cfg.p;
    s.u = cfg.u;
    s.w = cfg.w;
    const auto rep = equivalence_report(s, levels, cfg.trials, cfg.seed, cfg.growth);
    Json rec = detail::make_record(subcommand, cfg, levels.back());
    Json rows = Json::array();
    for (const auto& row : rep.rows) {
      rows.push_back(Json{{"level", row.level},
                          {"weak", row.weak},
                          {"strong", row.strong},
                          {"weak_witness", row.weak_witness},
                          {"strong_witness", row.strong_witness}});
      out.csv.push_back({row.level, "weak", row.weak});
      out.csv.push_back({row.level, "strong", row.strong});
      if (!(row.weak <= row.strong)) out.failures.push_back("equivalence: weak above strong in a row");
    }
    rec["outputs"] = {{"rows", rows},
                      {"weights", rep.weights},
                      {"p", rep.p},
                      {"weak_growth", to_string(rep.weak_growth)},
                      {"strong_growth", to_string(rep.strong_growth)},
                      {"verdict", to_string(rep.verdict)}};
    rec["constants"] = {{"levels", levels}, {"trials", cfg.trials}};
    if (opts.timing) rec["wall_time_s"] = elapsed();
    for (auto& f : detail::check_expectations(rec, cfg.expect)) out.failures.push_back(std::move(f));
    out.records.push_back(std::move(rec));
    return out;
  }

  const auto& ops = detail::level_ops();
  const auto it = ops.find(subcommand);
  if (it == ops.end()) throw ValidationError("subcommand", "unknown subcommand '" + subcommand + "'");
  for (Index level : levels) {
    const auto level_started = std::chrono::steady_clock::now();
    const ExperimentConfig lc = cfg.at_level(level);
    detail::LevelResult r = it->second(lc, lc.domain());
    Json rec = detail::make_record(subcommand, lc, level);
    rec["outputs"] = std::move(r.outputs);
    rec["constants"] = std::move(r.constants);
    if (opts.timing) {
      rec["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - level_started).count();
    }
    for (auto& [metric, value] : r.metrics) out.csv.push_back({level, metric, value});
    for (auto& f : r.failures) out.failures.push_back(std::move(f));
    for (auto& f : detail::check_expectations(rec, cfg.expect)) out.failures.push_back(std::move(f));
    out.records.push_back(std::move(rec));
  }
  return out;
}

inline std::string json_lines(const RunResult& r) {
  std::string s;
  for (const auto& rec : r.records) s += rec.dump() + "\n";
  return s;
}

inline std::string csv_text(const RunResult& r) {
  std::string s = "level,metric,value\n";
  char buf[64];
  for (const auto& row : r.csv) {
    std::snprintf(buf, sizeof buf, "%.17g", row.value);
    s += std::to_string(row.level) + "," + row.metric + "," + buf + "\n";
  }
  return s;
}

}  // namespace lmax::cli
