#pragma once

// Config-driven experiment runner behind the `slowfast` executable.
//
// Output files (each carries config_hash and seed):
//   paths.csv     one row per jump (see engine/path_io.hpp)
//   summary.json  config, termination counts, jump-count histogram, mode results
//   reports.json  {"config_hash", "seed", "reports": [TestReport...]}
//   reports.csv   tidy report table, only with --format csv

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slowfast/core/error.hpp"
#include "slowfast/engine/ensemble.hpp"
#include "slowfast/engine/path_io.hpp"
#include "slowfast/models/registry.hpp"
#include "slowfast/stats/harness.hpp"

namespace slowfast::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFault = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitReportsFailed = 3;

inline const std::vector<std::string>& modes() {
  static const std::vector<std::string> m = {"simulate", "limit", "converge-sweep", "verify", "explosion-gap",
                                             "extinction"};
  return m;
}

struct ExperimentConfig {
  std::string model;
  json params = json::object();
  std::string mode;
  std::uint64_t n = 1;
  std::vector<std::uint64_t> n_grid = {1, 4, 16, 64};
  std::uint64_t replicas = 10'000;
  double horizon = 10.0;
  std::uint64_t max_jumps = 10'000;
  std::uint64_t seed = 42;
  std::string out;
  unsigned workers = default_workers();

  /// Everything that determines the results; `out` and `workers` do not.
  json canonical() const {
    return {{"model", model},       {"params", params},       {"mode", mode},
            {"n", n},               {"n_grid", n_grid},       {"replicas", replicas},
            {"horizon", horizon},   {"max_jumps", max_jumps}, {"seed", seed}};
  }
  std::string hash() const { return hex64(fnv1a64(canonical().dump())); }
};

/// JSON schema of the experiment config (draft 2020-12).
inline json config_schema() {
  json mode_enum = json::array();
  for (const auto& m : modes()) mode_enum.push_back(m);
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"title", "slowfast experiment config"},
          {"type", "object"},
          {"required", {"model", "mode"}},
          {"additionalProperties", false},
          {"properties",
           {{"model", {{"type", "string"}, {"enum", model_names()}}},
            {"params", {{"type", "object"}, {"description", "model parameter block; see `slowfast list-models --json`"}}},
            {"mode", {{"type", "string"}, {"enum", mode_enum}}},
            {"n", {{"type", "integer"}, {"minimum", 1}, {"default", 1}, {"description", "acceleration"}}},
            {"n_grid",
             {{"type", "array"},
              {"items", {{"type", "integer"}, {"minimum", 1}}},
              {"minItems", 1},
              {"default", {1, 4, 16, 64}},
              {"description", "accelerations for converge-sweep"}}},
            {"replicas", {{"type", "integer"}, {"minimum", 1}, {"default", 10000}}},
            {"horizon", {{"type", "number"}, {"exclusiveMinimum", 0}, {"default", 10.0}}},
            {"max_jumps", {{"type", "integer"}, {"minimum", 1}, {"default", 10000}}},
            {"seed", {{"type", "integer"}, {"minimum", 0}, {"default", 42}}},
            {"out", {{"type", "string"}, {"description", "output directory (default $SLOWFAST_OUT or ./slowfast-out)"}}},
            {"workers", {{"type", "integer"}, {"minimum", 1}, {"description", "default: hardware threads"}}}}}};
}

namespace detail {

inline std::uint64_t positive_u64(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
  if (v.is_number_unsigned()) {
    const auto x = v.get<std::uint64_t>();
    if (x < 1) throw ConfigError(key + " must be ≥ 1");
    return x;
  }
  if (v.get<std::int64_t>() < 1) throw ConfigError(key + " must be ≥ 1");
  return static_cast<std::uint64_t>(v.get<std::int64_t>());
}

}  // namespace detail

/// Validates a config document; throws ConfigError with a diagnostic.
inline ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  const json props = config_schema().at("properties");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!props.contains(it.key())) throw ConfigError("unknown config field '" + it.key() + "'");

  ExperimentConfig c;
  if (!doc.contains("model") || !doc.at("model").is_string()) throw ConfigError("model (string) is required");
  c.model = doc.at("model").get<std::string>();
  find_model(c.model);  // unknown names list the valid ones
  if (!doc.contains("mode") || !doc.at("mode").is_string()) throw ConfigError("mode (string) is required");
  c.mode = doc.at("mode").get<std::string>();
  bool known = false;
  for (const auto& m : modes()) known = known || m == c.mode;
  if (!known) {
    std::string list;
    for (const auto& m : modes()) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("unknown mode '" + c.mode + "'; valid modes: " + list);
  }
  if (doc.contains("params")) {
    if (!doc.at("params").is_object()) throw ConfigError("params must be an object");
    c.params = doc.at("params");
  }
  if (doc.contains("n")) c.n = detail::positive_u64(doc.at("n"), "n");
  if (doc.contains("n_grid")) {
    const json& g = doc.at("n_grid");
    if (!g.is_array() || g.empty()) throw ConfigError("n_grid must be a non-empty array");
    c.n_grid.clear();
    for (const auto& v : g) c.n_grid.push_back(detail::positive_u64(v, "n_grid entries"));
  }
  if (doc.contains("replicas")) c.replicas = detail::positive_u64(doc.at("replicas"), "replicas");
  if (doc.contains("horizon")) {
    const json& h = doc.at("horizon");
    if (!h.is_number() || !(h.get<double>() > 0.0) || !std::isfinite(h.get<double>()))
      throw ConfigError("horizon must be a finite number > 0");
    c.horizon = h.get<double>();
  }
  if (doc.contains("max_jumps")) c.max_jumps = detail::positive_u64(doc.at("max_jumps"), "max_jumps");
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
      throw ConfigError("seed must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("out")) {
    if (!doc.at("out").is_string()) throw ConfigError("out must be a string");
    c.out = doc.at("out").get<std::string>();
  }
  if (doc.contains("workers"))
    c.workers = static_cast<unsigned>(detail::positive_u64(doc.at("workers"), "workers"));
  return c;
}

struct RunResult {
  int status = kExitOk;
  json summary;
  std::vector<TestReport> reports;
  std::vector<PathRecord> paths;
  Provenance provenance;
  std::string text;  // one-page summary
};

namespace detail {

inline std::vector<PathRecord> simulate_ensemble(const ModelInstance& m, const ExperimentConfig& c, std::uint64_t n,
                                                 bool limit) {
  EngineConfig cfg;
  cfg.horizon = c.horizon;
  cfg.max_jumps = c.max_jumps;
  cfg.index_ceiling = m.ceiling_hint;
  return map_replicas(c.replicas, c.workers, [&](std::uint64_t r) {
    const State x0 = m.start_for(c.seed, r);
    ReplicaStreams st(limit ? slowfast::detail::limit_root(c.seed) : c.seed, r);
    PathRecord rec = limit ? simulate_limit_path(m.limit, x0.index, cfg, st) : simulate_path(m.spec, n, x0, cfg, st);
    rec.replica = r;
    rec.seed = c.seed;
    return rec;
  });
}

inline std::string pct(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

inline json interval_json(const BinomialInterval& b) {
  return {{"estimate", b.estimate}, {"lower", b.lower}, {"upper", b.upper}, {"successes", b.successes}, {"trials", b.trials}};
}

}  // namespace detail

/// Executes the experiment in memory. Statistical failures set status 3;
/// exceptions propagate to the caller.
inline RunResult run_experiment(const ExperimentConfig& c) {
  const ModelInstance m = build_model(c.model, c.params);
  RunResult res;
  HarnessOptions opt;
  opt.seed = c.seed;
  opt.workers = c.workers;
  opt.model = c.model;

  std::uint64_t n_paths = c.n;
  if (c.mode == "converge-sweep") n_paths = *std::max_element(c.n_grid.begin(), c.n_grid.end());
  const bool limit_paths = c.mode == "limit";
  res.provenance = Provenance{c.hash(), c.seed, limit_paths ? "limit" : "prelimit", limit_paths ? 0 : n_paths};
  res.paths = detail::simulate_ensemble(m, c, n_paths, limit_paths);

  std::ostringstream text;
  text << "slowfast " << c.mode << " | model " << c.model << " | seed " << c.seed << " | config " << res.provenance.config_hash
       << "\n";
  text << "replicas " << c.replicas << ", horizon " << c.horizon << ", max_jumps " << c.max_jumps;
  if (!limit_paths) text << ", n " << n_paths;
  text << "\n";

  json results = json::object();
  bool verdict_mode = false;

  if (c.mode == "converge-sweep") {
    const auto rows = jump_time_convergence(m.spec, m.limit, m.start, c.n_grid, c.replicas, c.horizon, opt);
    json table = json::array();
    for (const auto& row : rows) {
      res.reports.push_back(row.report);
      table.push_back({{"n", row.n}, {"ks", row.ks}});
    }
    results["jump_time_ks"] = table;
    text << "jump-time KS to G(t mu(b)), mu(b) = " << m.limit.mean_rate(m.start.index) << ":\n";
    for (const auto& row : rows) text << "  n=" << row.n << "  KS=" << detail::pct(row.ks) << "\n";
  } else if (c.mode == "verify") {
    verdict_mode = true;
    // budgets as in the acceptance suite: 0.02 for KS and TV distances
    const auto ks = jump_time_convergence(m.spec, m.limit, m.start, {c.n}, c.replicas, c.horizon, opt, 0.02);
    res.reports.push_back(ks[0].report);
    const auto chain = jump_chain_convergence(m.spec, m.limit, m.start, c.n, 3, {}, c.replicas, c.horizon, opt, 0.02,
                                              0.02, m.analytic_row);
    for (const auto& r : chain.rows) res.reports.push_back(r);
    res.reports.push_back(chain.joint);
    const auto fixed = fixed_time_marginal_test(m.spec, m.limit, m.start,
                                                {c.horizon / 4.0, c.horizon / 2.0, c.horizon}, c.n, c.max_jumps,
                                                c.replicas, opt, 0.02, m.limit_index_oracle);
    for (const auto& r : fixed.per_time) res.reports.push_back(r);
    results["guard_probability"] = {{"prelimit", fixed.guard_prelimit}, {"limit", fixed.guard_limit}};
  } else if (c.mode == "explosion-gap") {
    verdict_mode = true;
    const auto g = explosion_gap(m.spec, m.limit, m.start, c.horizon, c.n, c.max_jumps, c.replicas, opt);
    results["explosion_fraction"] = {{"prelimit", detail::interval_json(g.prelimit)},
                                     {"limit", detail::interval_json(g.limit)}};
    // strict separation of the 99% intervals: prelimit upper below limit lower
    auto r = TestReport::make("explosion gap (prelimit upper - limit lower)", "wilson-ci",
                              g.prelimit.upper - g.limit.lower, 0.0);
    r.pass = g.prelimit.upper < g.limit.lower;
    r.sample_sizes = {g.prelimit.trials, g.limit.trials};
    r.model = c.model;
    r.n = c.n;
    r.seed = c.seed;
    r.extra = results["explosion_fraction"];
    res.reports.push_back(r);
    text << "explosion fraction by T=" << c.horizon << ": prelimit " << detail::pct(g.prelimit.estimate) << " ["
         << detail::pct(g.prelimit.lower) << ", " << detail::pct(g.prelimit.upper) << "], limit "
         << detail::pct(g.limit.estimate) << " [" << detail::pct(g.limit.lower) << ", " << detail::pct(g.limit.upper)
         << "]\n";
  } else if (c.mode == "extinction") {
    verdict_mode = true;
    const auto e = extinction_probability(res.paths);
    json est = detail::interval_json(e.interval);
    est["confidence"] = 0.99;
    est["ceiling_stops"] = e.ceiling_hits;
    est["guard_stops"] = e.guard_hits;
    est["warnings"] = e.warnings;
    text << "extinction probability " << detail::pct(e.interval.estimate) << " CI99 [" << detail::pct(e.interval.lower)
         << ", " << detail::pct(e.interval.upper) << "]";
    if (m.analytic.contains("extinction_probability")) {
      const double q = m.analytic.at("extinction_probability").get<double>();
      est["limit_value"] = q;
      auto r = TestReport::make("extinction CI contains the limit value", "wilson-ci", e.interval.distance_to(q), 0.0);
      r.sample_sizes = {e.interval.trials};
      r.model = c.model;
      r.n = c.n;
      r.seed = c.seed;
      r.notes = e.warnings;
      r.extra = {{"limit_value", q}};
      res.reports.push_back(r);
      text << " vs limit value " << q;
    }
    text << "\n";
    results["extinction"] = est;
  }

  res.summary = summarize_paths(res.paths, res.provenance);
  res.summary["mode"] = c.mode;
  res.summary["model"] = c.model;
  res.summary["config"] = c.canonical();
  res.summary["analytic"] = m.analytic;
  res.summary["limit_mean_rate_at_start"] = m.limit.mean_rate(m.start.index);
  res.summary["results"] = results;

  const auto& term = res.summary.at("termination_counts");
  text << "termination:";
  for (auto it = term.begin(); it != term.end(); ++it) text << " " << it.key() << "=" << it.value();
  text << "\n";
  bool all_pass = true;
  for (const auto& r : res.reports) {
    all_pass = all_pass && r.pass;
    text << (r.pass ? "  PASS " : "  FAIL ") << r.name << ": " << r.statistic << " " << r.value
         << " (threshold " << r.threshold << ")\n";
  }
  if (verdict_mode && !all_pass) res.status = kExitReportsFailed;
  res.summary["all_reports_pass"] = all_pass;
  res.text = text.str();
  return res;
}

inline void write_outputs(const RunResult& res, const std::filesystem::path& dir, bool csv_reports) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
  };
  {
    auto os = open("paths.csv");
    write_paths_csv(os, res.paths, res.provenance);
  }
  {
    auto os = open("summary.json");
    os << res.summary.dump(2) << '\n';
  }
  {
    auto os = open("reports.json");
    const json doc = {{"config_hash", res.provenance.config_hash},
                      {"seed", res.provenance.seed},
                      {"reports", to_json(res.reports)}};
    os << doc.dump(2) << '\n';
  }
  if (csv_reports) {
    auto os = open("reports.csv");
    os << "# config_hash=" << res.provenance.config_hash << " seed=" << res.provenance.seed << '\n';
    write_csv(os, res.reports);
  }
}

}  // namespace slowfast::cli
