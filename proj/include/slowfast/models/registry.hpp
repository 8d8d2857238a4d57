#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "slowfast/core/error.hpp"
#include "slowfast/core/spec.hpp"
#include "slowfast/limit/limit_spec.hpp"
#include "slowfast/models/contact.hpp"
#include "slowfast/models/explosion_ladder.hpp"
#include "slowfast/models/oscillator.hpp"
#include "slowfast/models/trait.hpp"
#include "slowfast/models/two_state_toy.hpp"
#include "slowfast/models/typed_branching.hpp"

namespace slowfast {

using json = nlohmann::json;

/// A built model ready for the harness: prelimit spec, limit (for the
/// oscillator only the index limit), the start state and closed-form facts.
struct ModelInstance {
  std::string name;
  SemiMarkovSpec spec;
  LimitSpec limit;
  State start;
  /// Suggested index ceiling for population models (supercritical growth).
  std::optional<std::int64_t> ceiling_hint;
  /// Closed-form quantities reported next to the statistics.
  json analytic = json::object();
  /// Analytic jump-chain row P(i, .) keyed by index value, when available.
  std::function<std::optional<std::vector<std::pair<std::int64_t, double>>>(std::int64_t)> analytic_row;
  /// Oracle for the index law at a fixed time, when the limit has one outside
  /// the generic sampler (classical contact process).
  std::function<std::int64_t(std::int64_t, double, Rng&)> limit_index_oracle;
  /// Random start, drawn per replica from the aux stream; `start` then holds a
  /// representative (used for limit rates and probes).
  std::function<State(Rng&)> start_sampler;

  State start_for(std::uint64_t seed, std::uint64_t replica) const {
    if (!start_sampler) return start;
    Rng rng = make_stream(seed, replica, Stream::aux);
    return start_sampler(rng);
  }
};

struct ModelEntry {
  std::string name;
  std::string description;
  json schema;  // {"parameters": {name: {"type", "default", "description"}}}
  std::function<ModelInstance(const json&)> build;
};

namespace detail {

inline json param(std::string type, json def, std::string description) {
  return json{{"type", std::move(type)}, {"default", std::move(def)}, {"description", std::move(description)}};
}

/// Parameter block merged over the schema defaults; unknown keys are rejected.
inline json resolve_params(const ModelEntry& entry, const json& given) {
  if (!given.is_null() && !given.is_object()) throw ConfigError("model parameters for '" + entry.name + "' must be an object");
  json out = json::object();
  const json& params = entry.schema.at("parameters");
  for (auto it = params.begin(); it != params.end(); ++it) out[it.key()] = it.value().at("default");
  if (given.is_object()) {
    for (auto it = given.begin(); it != given.end(); ++it) {
      if (!params.contains(it.key()))
        throw ConfigError("unknown parameter '" + it.key() + "' for model '" + entry.name + "'");
      out[it.key()] = it.value();
    }
  }
  return out;
}

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown field '" + it.key() + "' in " + where);
}

template <class T>
T get_as(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for " + what);
  }
}

/// number -> constant; {"table": [...]}; {"affine": {"intercept", "slope"}}; null -> absent.
inline TraitFunction parse_function(const json& j, const std::string& what) {
  if (j.is_null()) return {};
  if (j.is_number()) return constant_function(j.get<double>());
  if (j.is_object() && j.contains("table")) {
    reject_unknown(j, {"table"}, what);
    return table_function(get_as<std::vector<double>>(j.at("table"), what + ".table"));
  }
  if (j.is_object() && j.contains("affine")) {
    reject_unknown(j, {"affine"}, what);
    const json& a = j.at("affine");
    reject_unknown(a, {"intercept", "slope"}, what + ".affine");
    return affine_function(a.value("intercept", 0.0), a.value("slope", 0.0));
  }
  throw ConfigError(what + " must be a number, {\"table\": [...]} or {\"affine\": {...}}");
}

inline std::shared_ptr<const TraitModel> parse_trait(const json& j, const std::string& what) {
  const std::string kind = j.value("kind", "finite");
  if (kind == "finite") {
    reject_unknown(j, {"kind", "rates"}, what);
    const auto rows = get_as<std::vector<std::vector<double>>>(j.at("rates"), what + ".rates");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (rows[a].size() != rows.size()) throw ConfigError(what + ".rates must be square");
      for (std::size_t b = 0; b < rows.size(); ++b)
        m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = rows[a][b];
    }
    return std::make_shared<const TraitModel>(TraitModel::finite(m));
  }
  if (kind == "diffusion") {
    reject_unknown(j, {"kind", "reversion", "mean", "sigma", "grid_dt"}, what);
    return std::make_shared<const TraitModel>(TraitModel::diffusion(
        j.value("reversion", 1.0), j.value("mean", 0.0), j.value("sigma", 1.0), j.value("grid_dt", 0.01)));
  }
  throw ConfigError(what + ".kind must be \"finite\" or \"diffusion\"");
}

/// Smallest root in [0,1] of sum_j L_j s^j = s (Galton-Watson extinction from one line).
inline double gw_extinction(const std::vector<double>& law) {
  double s = 0.0;
  for (int it = 0; it < 100000; ++it) {
    double f = 0.0;
    double p = 1.0;
    for (double l : law) {
      f += l * p;
      p *= s;
    }
    if (std::abs(f - s) < 1e-15) break;
    s = f;
  }
  return s;
}

inline ModelEntry two_state_toy_entry() {
  ModelEntry e;
  e.name = "two-state-toy";
  e.description = "Two-state fast chain a<->b per index, b = (b_a, b_b), point-dependent index matrices";
  e.schema = {{"parameters",
               {{"q_ab", param("number", 1.0, "fast rate a -> b")},
                {"q_ba", param("number", 2.0, "fast rate b -> a")},
                {"b_a", param("number", 3.0, "jump rate at a")},
                {"b_b", param("number", 6.0, "jump rate at b")},
                {"matrix_a", param("matrix", json::array({{0.2, 0.8}, {0.7, 0.3}}), "next-index matrix from a")},
                {"matrix_b", param("matrix", json::array({{0.9, 0.1}, {0.3, 0.7}}), "next-index matrix from b")},
                {"restart", param("string", "a", "fast state after a jump: a | b | keep | stationary")},
                {"start", param("object", json{{"index", 0}, {"point", "a"}}, "start index and point (a | b)")}}}};
  e.build = [e](const json& given) {
    const json p = resolve_params(e, given);
    TwoStateToyParams tp;
    tp.q_ab = get_as<double>(p.at("q_ab"), "q_ab");
    tp.q_ba = get_as<double>(p.at("q_ba"), "q_ba");
    tp.b_a = get_as<double>(p.at("b_a"), "b_a");
    tp.b_b = get_as<double>(p.at("b_b"), "b_b");
    tp.matrix_a = get_as<std::vector<std::vector<double>>>(p.at("matrix_a"), "matrix_a");
    tp.matrix_b = get_as<std::vector<std::vector<double>>>(p.at("matrix_b"), "matrix_b");
    const std::string restart = get_as<std::string>(p.at("restart"), "restart");
    if (restart == "a") tp.restart = TwoStateToyParams::Restart::at_a;
    else if (restart == "b") tp.restart = TwoStateToyParams::Restart::at_b;
    else if (restart == "keep") tp.restart = TwoStateToyParams::Restart::keep;
    else if (restart == "stationary") tp.restart = TwoStateToyParams::Restart::stationary;
    else throw ConfigError("restart must be a | b | keep | stationary");
    const TwoStateToy toy = build_two_state_toy(tp);

    const json& s = p.at("start");
    reject_unknown(s, {"index", "point"}, "start");
    const auto i0 = get_as<std::int64_t>(s.value("index", json(0)), "start.index");
    const std::string x0 = s.value("point", "a");
    if (i0 < 0 || static_cast<std::size_t>(i0) >= toy.num_indices()) throw ConfigError("start.index out of range");
    if (x0 != "a" && x0 != "b") throw ConfigError("start.point must be a or b");

    ModelInstance m;
    m.name = e.name;
    m.spec = toy.spec;
    m.limit = toy.limit;
    m.start = toy.start(i0, x0 == "b" ? 1 : 0);
    const auto P = toy.analytic_jump_matrix();
    m.analytic = {{"mean_rate", toy.mean_rate()},
                  {"stationary", toy.stationary()},
                  {"biased_weights", toy.biased_weights()},
                  {"jump_matrix", P}};
    m.analytic_row = [P](std::int64_t i) -> std::optional<std::vector<std::pair<std::int64_t, double>>> {
      if (i < 0 || static_cast<std::size_t>(i) >= P.size()) return std::nullopt;
      std::vector<std::pair<std::int64_t, double>> row;
      for (std::size_t j = 0; j < P[i].size(); ++j) row.emplace_back(static_cast<std::int64_t>(j), P[i][j]);
      return row;
    };
    return m;
  };
  return e;
}

inline ModelEntry ladder_entry() {
  ModelEntry e;
  e.name = "explosion-ladder";
  e.description = "Ladder (i,0) -> (i,1) at rate 1, b(i,1) = i^p, jumps to (i+1,0); explosive limit for p > 1";
  e.schema = {{"parameters",
               {{"exponent", param("number", 2.0, "p in b(i,1) = i^p")},
                {"start", param("object", json{{"index", 1}, {"point", 0}}, "start level and point (0 | 1)")}}}};
  e.build = [e](const json& given) {
    const json p = resolve_params(e, given);
    const ExplosionLadder ladder = build_explosion_ladder(get_as<double>(p.at("exponent"), "exponent"));
    const json& s = p.at("start");
    reject_unknown(s, {"index", "point"}, "start");
    const auto i0 = get_as<std::int64_t>(s.value("index", json(1)), "start.index");
    const auto x0 = get_as<int>(s.value("point", json(0)), "start.point");
    if (i0 < 0) throw ConfigError("start.index must be >= 0");
    if (x0 != 0 && x0 != 1) throw ConfigError("start.point must be 0 or 1");
    ModelInstance m;
    m.name = e.name;
    m.spec = ladder.spec;
    m.limit = ladder.limit;
    m.start = ladder.start(i0, x0);
    m.analytic = {{"mean_rate_at_start", ladder.level_rate(i0)},
                  {"analytically_explosive", *ladder.limit.analytically_explosive}};
    const double et = ladder.expected_explosion_time(std::max<std::int64_t>(i0, 1));
    if (std::isfinite(et)) m.analytic["expected_explosion_time"] = et;
    m.analytic_row = [](std::int64_t i) -> std::optional<std::vector<std::pair<std::int64_t, double>>> {
      return std::vector<std::pair<std::int64_t, double>>{{i + 1, 1.0}};
    };
    return m;
  };
  return e;
}

inline ModelEntry branching_entry() {
  ModelEntry e;
  e.name = "typed-branching";
  e.description = "Branching population with independent trait processes; Galton-Watson limit";
  e.schema = {
      {"parameters",
       {{"trait", param("object", json{{"kind", "finite"}, {"rates", json::array({{0, 1}, {1, 0}})}},
                        "trait dynamics: {kind: finite, rates} or {kind: diffusion, reversion, mean, sigma, grid_dt}")},
        {"offspring_rates",
         param("array", json::array({1.0, nullptr, json{{"table", {4.0, 0.0}}}}),
               "r_j for j = 0, 1, ...: number, {table}, {affine} or null")},
        {"offspring_trait", param("string", "inherit", "inherit | stationary")},
        {"ceiling", param("integer", 32, "population size at which a path is stopped (survival)")},
        {"start", param("object", json{{"size", 1}, {"trait", 0}},
                        "initial population size and common trait, or trait \"stationary\" for i.i.d. draws from the "
                        "trait's stationary law")}}}};
  e.build = [e](const json& given) {
    const json p = resolve_params(e, given);
    TypedBranchingParams bp;
    bp.trait = parse_trait(p.at("trait"), "trait");
    if (!p.at("offspring_rates").is_array()) throw ConfigError("offspring_rates must be an array");
    for (std::size_t j = 0; j < p.at("offspring_rates").size(); ++j)
      bp.offspring_rates.push_back(parse_function(p.at("offspring_rates")[j], "offspring_rates[" + std::to_string(j) + "]"));
    const std::string mode = get_as<std::string>(p.at("offspring_trait"), "offspring_trait");
    if (mode == "inherit") bp.offspring_trait = TypedBranchingParams::OffspringTrait::inherit;
    else if (mode == "stationary") bp.offspring_trait = TypedBranchingParams::OffspringTrait::stationary;
    else throw ConfigError("offspring_trait must be inherit | stationary");
    const TypedBranching br = build_typed_branching(bp);

    const json& s = p.at("start");
    reject_unknown(s, {"size", "trait"}, "start");
    const auto i0 = get_as<std::int64_t>(s.value("size", json(1)), "start.size");
    if (i0 < 0) throw ConfigError("start.size must be >= 0");
    const auto ceiling = get_as<std::int64_t>(p.at("ceiling"), "ceiling");
    if (ceiling < 1) throw ConfigError("ceiling must be >= 1");

    ModelInstance m;
    m.name = e.name;
    m.spec = br.spec;
    m.limit = br.limit;
    const json trait0 = s.value("trait", json(0.0));
    if (trait0.is_string()) {
      if (trait0.get<std::string>() != "stationary") throw ConfigError("start.trait must be a number or \"stationary\"");
      m.start = br.start(i0, bp.trait->is_finite() ? 0.0 : bp.trait->stationary_mean(affine_function(0.0, 1.0)));
      m.start_sampler = [br, i0](Rng& rng) {
        State x = br.start(i0);
        for (auto& v : x.point) v = br.params.trait->sample_stationary(rng);
        return x;
      };
    } else {
      m.start = br.start(i0, get_as<double>(trait0, "start.trait"));
    }
    m.ceiling_hint = ceiling;
    const auto law = br.offspring_law();
    const double q1 = gw_extinction(law);
    m.analytic = {{"branching_rate", br.limit_branching_rate()},
                  {"offspring_law", law},
                  {"extinction_probability_one_line", q1},
                  {"extinction_probability", std::pow(q1, static_cast<double>(i0))}};
    if (law.size() == 3 && law[1] == 0.0) {
      m.analytic["r_bar"] = law[2] * br.limit_branching_rate();
      m.analytic["q_bar"] = law[0] * br.limit_branching_rate();
    }
    m.analytic_row = [law](std::int64_t i) -> std::optional<std::vector<std::pair<std::int64_t, double>>> {
      if (i <= 0) return std::nullopt;
      std::vector<std::pair<std::int64_t, double>> row;
      for (std::size_t j = 0; j < law.size(); ++j)
        if (law[j] > 0.0) row.emplace_back(i - 1 + static_cast<std::int64_t>(j), law[j]);
      return row;
    };
    return m;
  };
  return e;
}

inline ModelEntry contact_entry() {
  ModelEntry e;
  e.name = "contact-process";
  e.description = "Contact process with viral loads on a finite graph; classical contact process limit";
  e.schema = {
      {"parameters",
       {{"graph", param("object", json{{"path", 3}}, "{path: n} or {adjacency: [[...], ...]} (at most 63 vertices)")},
        {"viral", param("object", json{{"kind", "finite"}, {"rates", json::array({{0, 1}, {1, 0}})}},
                        "viral-load dynamics (same encoding as a branching trait)")},
        {"infection", param("function", json{{"table", {1.0, 3.0}}}, "kappa_01(load), per infected neighbour")},
        {"healing", param("function", json{{"table", {2.0, 2.0}}}, "kappa_10(load)")},
        {"new_load", param("string", "copy", "load of a new infection: copy | stationary | matrix")},
        {"new_load_matrix", param("matrix", json::array(), "p(load, .) when new_load = matrix")},
        {"start", param("object", json{{"infected", {1}}, {"load", 0}}, "initially infected vertices and their load")}}}};
  e.build = [e](const json& given) {
    const json p = resolve_params(e, given);
    ViralContactParams cp;
    const json& g = p.at("graph");
    if (g.contains("path")) {
      reject_unknown(g, {"path"}, "graph");
      const auto n = get_as<std::int64_t>(g.at("path"), "graph.path");
      if (n < 1 || n > 63) throw ConfigError("graph.path must be in 1..63");
      cp.graph = Graph::path(static_cast<std::size_t>(n));
    } else if (g.contains("adjacency")) {
      reject_unknown(g, {"adjacency"}, "graph");
      cp.graph.adjacency = get_as<std::vector<std::vector<std::size_t>>>(g.at("adjacency"), "graph.adjacency");
    } else {
      throw ConfigError("graph must give path or adjacency");
    }
    cp.viral = parse_trait(p.at("viral"), "viral");
    cp.infection = parse_function(p.at("infection"), "infection");
    cp.healing = parse_function(p.at("healing"), "healing");
    const std::string mode = get_as<std::string>(p.at("new_load"), "new_load");
    if (mode == "copy") cp.new_load = ViralContactParams::NewLoad::copy;
    else if (mode == "stationary") cp.new_load = ViralContactParams::NewLoad::stationary;
    else if (mode == "matrix") cp.new_load = ViralContactParams::NewLoad::matrix;
    else throw ConfigError("new_load must be copy | stationary | matrix");
    cp.new_load_matrix = get_as<std::vector<std::vector<double>>>(p.at("new_load_matrix"), "new_load_matrix");
    const ViralContact vc = build_contact_process(cp);

    const json& s = p.at("start");
    reject_unknown(s, {"infected", "load"}, "start");
    if (!s.value("infected", json::array()).is_array()) throw ConfigError("start.infected must be a finite list");
    ModelInstance m;
    m.name = e.name;
    m.spec = vc.spec;
    m.limit = vc.limit;
    m.start = vc.start(get_as<std::vector<std::size_t>>(s.value("infected", json::array()), "start.infected"),
                       get_as<double>(s.value("load", json(0.0)), "start.load"));
    const double lambda = vc.limit_infection_rate();
    const double mu = vc.limit_healing_rate();
    m.analytic = {{"infection_rate", lambda}, {"healing_rate", mu}};
    const Graph graph = cp.graph;
    m.limit_index_oracle = [graph, lambda, mu](std::int64_t config, double t, Rng& rng) {
      return simulate_classical_contact(graph, lambda, mu, config, t, rng);
    };
    return m;
  };
  return e;
}

inline ModelEntry oscillator_entry() {
  ModelEntry e;
  e.name = "oscillator";
  e.description = "Deterministic rotation on [-1,1] and [2,4] with b = 1; index converges, position oscillates";
  e.schema = {{"parameters",
               {{"start", param("object", json{{"index", 1}, {"phase", 0.0}}, "start index (1 | 2) and phase")}}}};
  e.build = [e](const json& given) {
    const json p = resolve_params(e, given);
    const Oscillator osc = build_oscillator_counterexample();
    const json& s = p.at("start");
    reject_unknown(s, {"index", "phase"}, "start");
    const auto i0 = get_as<std::int64_t>(s.value("index", json(1)), "start.index");
    if (i0 != 1 && i0 != 2) throw ConfigError("start.index must be 1 or 2");
    ModelInstance m;
    m.name = e.name;
    m.spec = osc.spec;
    m.limit = osc.index_limit;
    m.start = osc.start(i0, get_as<double>(s.value("phase", json(0.0)), "start.phase"));
    m.analytic = {{"mean_rate", 1.0}, {"point_limit", nullptr}};
    m.analytic_row = [](std::int64_t i) -> std::optional<std::vector<std::pair<std::int64_t, double>>> {
      return std::vector<std::pair<std::int64_t, double>>{{i == 1 ? 2 : 1, 1.0}};
    };
    return m;
  };
  return e;
}

}  // namespace detail

inline const std::vector<ModelEntry>& model_registry() {
  static const std::vector<ModelEntry> entries = {detail::two_state_toy_entry(), detail::ladder_entry(),
                                                  detail::branching_entry(), detail::contact_entry(),
                                                  detail::oscillator_entry()};
  return entries;
}

inline std::vector<std::string> model_names() {
  std::vector<std::string> names;
  for (const auto& e : model_registry()) names.push_back(e.name);
  return names;
}

inline const ModelEntry& find_model(const std::string& name) {
  for (const auto& e : model_registry())
    if (e.name == name) return e;
  std::string valid;
  for (const auto& n : model_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown model '" + name + "'; valid models: " + valid);
}

inline ModelInstance build_model(const std::string& name, const json& params = json::object()) {
  return find_model(name).build(params);
}

}  // namespace slowfast
