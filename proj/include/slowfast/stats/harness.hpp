#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slowfast/core/rng.hpp"
#include "slowfast/core/spec.hpp"
#include "slowfast/engine/brute_force.hpp"
#include "slowfast/engine/engine.hpp"
#include "slowfast/engine/ensemble.hpp"
#include "slowfast/limit/ergodic.hpp"
#include "slowfast/limit/limit_spec.hpp"
#include "slowfast/stats/empirical.hpp"
#include "slowfast/stats/report.hpp"
#include "slowfast/stats/tests.hpp"

namespace slowfast {

struct HarnessOptions {
  std::uint64_t seed = 42;
  unsigned workers = default_workers();
  double alpha = 0.01;
  std::string model;
};

namespace detail {

// independent roots for the two sides of a two-sample comparison
inline std::uint64_t limit_root(std::uint64_t seed) { return splitmix64(seed ^ 0x4c494d4954ULL); }
inline std::uint64_t oracle_root(std::uint64_t seed) { return splitmix64(seed ^ 0x4f5241434cULL); }

inline std::string index_key(Index i) {
  if (i == kCemeteryIndex) return "cemetery";
  return std::to_string(i.value);
}

}  // namespace detail

/// Index-level summary of one path; what the harness keeps per replica.
struct PathSummary {
  std::vector<double> times;
  std::vector<Index> pre;
  std::vector<Index> post;
  Termination termination = Termination::horizon_reached;
  double end_time = 0.0;
  Index start;

  static PathSummary of(const PathRecord& rec) {
    PathSummary s;
    s.start = rec.start.index;
    s.termination = rec.termination;
    s.end_time = rec.end_time;
    for (const auto& e : rec.jumps) {
      s.times.push_back(e.time);
      s.pre.push_back(e.pre.index);
      s.post.push_back(e.post.index);
    }
    return s;
  }

  Index final_index() const { return post.empty() ? start : post.back(); }

  Index index_at(double t) const {
    if ((termination == Termination::absorbed || termination == Termination::max_jumps) && t >= end_time)
      return kCemeteryIndex;
    const auto k = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
    return k == 0 ? start : post[k - 1];
  }
};

// ---------------------------------------------------------------------------
// Jump-time law against G(t mu_i(b)).

struct SweepRow {
  std::uint64_t n = 1;
  double ks = 0.0;
  TestReport report;
};

/// For each n, `replicas` draws of tau_1^n (censored at the horizon) and their
/// KS distance to t -> G(t mu_{i0}(b)). `tolerance` replaces the sampling
/// critical value when given.
inline std::vector<SweepRow> jump_time_convergence(const SemiMarkovSpec& spec, const LimitSpec& limit,
                                                   const State& start, const std::vector<std::uint64_t>& n_grid,
                                                   std::uint64_t replicas, double horizon, const HarnessOptions& opt,
                                                   std::optional<double> tolerance = std::nullopt) {
  const double rate = limit.mean_rate(start.index);
  const JumpClock clock = limit.clock;
  const auto cdf = [&](double t) { return clock.cdf(t * rate); };
  std::vector<SweepRow> rows;
  for (const std::uint64_t n : n_grid) {
    const auto taus = map_replicas(replicas, opt.workers, [&](std::uint64_t r) {
      ReplicaStreams st(opt.seed, r);
      return simulate_first_jump(spec, n, start, horizon, st).tau;
    });
    SweepRow row;
    row.n = n;
    row.report = ks_against_cdf(taus, cdf, opt.alpha, horizon);
    row.ks = row.report.value;
    row.report.name = "jump-time KS n=" + std::to_string(n);
    row.report.model = opt.model;
    row.report.n = n;
    row.report.seed = opt.seed;
    if (tolerance) {
      row.report.threshold = *tolerance;
      row.report.pass = row.ks <= *tolerance;
      row.report.budgeted = true;
    }
    row.report.extra = {{"limit_mean_rate", rate}, {"horizon", horizon}};
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Jump-chain law.

struct JumpChainResult {
  TestReport joint;
  std::vector<TestReport> rows;
  std::map<std::int64_t, EmpiricalLaw> prelimit_rows;
};

/// Joint law of the first N post-jump indices with window indicators
/// 1{tau_k - tau_{k-1} <= T_k}, prelimit at n against limit Monte Carlo (TV),
/// plus per-index empirical rows of P against `analytic_row` when given
/// (else against the limit's empirical rows).
inline JumpChainResult jump_chain_convergence(
    const SemiMarkovSpec& spec, const LimitSpec& limit, const State& start, std::uint64_t n, std::size_t n_jumps,
    const std::vector<double>& windows, std::uint64_t replicas, double horizon, const HarnessOptions& opt,
    double row_tolerance = 0.02, double joint_tolerance = 0.02,
    const std::function<std::optional<std::vector<std::pair<std::int64_t, double>>>(std::int64_t)>& analytic_row = {}) {
  if (n_jumps < 1 || n_jumps > 5) throw PreconditionError("jump_chain_convergence needs 1 <= N_jumps <= 5");
  if (!windows.empty() && windows.size() != n_jumps) throw PreconditionError("one window per jump is required");
  EngineConfig cfg;
  cfg.horizon = horizon;
  cfg.max_jumps = n_jumps;

  const auto key_of = [&](const PathSummary& s) {
    std::string key;
    double prev = 0.0;
    for (std::size_t k = 0; k < n_jumps; ++k) {
      if (k) key += ',';
      if (k < s.post.size()) {
        key += detail::index_key(s.post[k]);
        if (!windows.empty()) key += s.times[k] - prev <= windows[k] ? "|in" : "|out";
        prev = s.times[k];
      } else {
        key += "-";
      }
    }
    return key;
  };

  const auto pre = map_replicas(replicas, opt.workers, [&](std::uint64_t r) {
    ReplicaStreams st(opt.seed, r);
    return PathSummary::of(simulate_path(spec, n, start, cfg, st));
  });
  const auto lim = map_replicas(replicas, opt.workers, [&](std::uint64_t r) {
    ReplicaStreams st(detail::limit_root(opt.seed), r);
    return PathSummary::of(simulate_limit_path(limit, start.index, cfg, st));
  });

  JumpChainResult out;
  EmpiricalLaw joint_pre, joint_lim;
  std::map<std::int64_t, EmpiricalLaw> rows_lim;
  for (const auto& s : pre) {
    joint_pre.add(key_of(s));
    for (std::size_t k = 0; k < s.post.size(); ++k) out.prelimit_rows[s.pre[k].value].add(detail::index_key(s.post[k]));
  }
  for (const auto& s : lim) {
    joint_lim.add(key_of(s));
    for (std::size_t k = 0; k < s.post.size(); ++k) rows_lim[s.pre[k].value].add(detail::index_key(s.post[k]));
  }

  out.joint = TestReport::make("jump-chain joint law", "TV", tv_distance(joint_pre, joint_lim, true), joint_tolerance);
  out.joint.sample_sizes = {joint_pre.size, joint_lim.size};
  out.joint.budgeted = true;
  out.joint.model = opt.model;
  out.joint.n = n;
  out.joint.seed = opt.seed;

  for (const auto& [i, law] : out.prelimit_rows) {
    TestReport r;
    std::optional<std::vector<std::pair<std::int64_t, double>>> exact;
    if (analytic_row) exact = analytic_row(i);
    if (exact) {
      std::map<std::string, double> p;
      for (const auto& [j, w] : *exact) p[std::to_string(j)] += w;
      r = TestReport::make("jump-chain row " + std::to_string(i) + " vs analytic", "TV", tv_distance(law, p),
                           row_tolerance);
      r.sample_sizes = {law.size};
      nlohmann::json emp = nlohmann::json::object();
      for (const auto& [k, c] : law.counts) emp[k] = law.probability(k);
      r.extra = {{"empirical", emp}, {"analytic", p}};
    } else {
      const auto it = rows_lim.find(i);
      if (it == rows_lim.end()) continue;
      r = TestReport::make("jump-chain row " + std::to_string(i) + " vs limit", "TV", tv_distance(law, it->second, true),
                           row_tolerance);
      r.sample_sizes = {law.size, it->second.size};
    }
    r.budgeted = true;
    r.model = opt.model;
    r.n = n;
    r.seed = opt.seed;
    out.rows.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixed-time marginals on the guard event {T_N <= tau_{k_guard}}.

struct FixedTimeResult {
  std::vector<TestReport> per_time;
  TestReport joint;
  double guard_prelimit = 0.0;
  double guard_limit = 0.0;
  std::vector<std::string> warnings;
};

/// `limit_oracle(i, dt, rng)`, when given, replaces simulate_limit_path by a
/// direct Markov simulation of the limit index over time steps.
inline FixedTimeResult fixed_time_marginal_test(
    const SemiMarkovSpec& spec, const LimitSpec& limit, const State& start, const std::vector<double>& times,
    std::uint64_t n, std::uint64_t k_guard, std::uint64_t replicas, const HarnessOptions& opt, double tolerance = 0.02,
    const std::function<std::int64_t(std::int64_t, double, Rng&)>& limit_oracle = {}) {
  if (times.empty()) throw PreconditionError("fixed_time_marginal_test needs at least one time");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (!(times[k] > 0.0) || (k && !(times[k] > times[k - 1])))
      throw PreconditionError("observation times must be positive and increasing");
  if (k_guard < 1) throw PreconditionError("k_guard must be >= 1");
  EngineConfig cfg;
  cfg.horizon = times.back();
  cfg.max_jumps = k_guard;

  struct Obs {
    bool guard = true;
    std::vector<std::string> keys;
  };
  const auto observe = [&](const PathSummary& s) {
    Obs o;
    o.guard = s.times.size() < k_guard;
    for (double t : times) o.keys.push_back(detail::index_key(s.index_at(t)));
    return o;
  };

  const auto pre = map_replicas(replicas, opt.workers, [&](std::uint64_t r) {
    ReplicaStreams st(opt.seed, r);
    return observe(PathSummary::of(simulate_path(spec, n, start, cfg, st)));
  });
  const auto lim = map_replicas(replicas, opt.workers, [&](std::uint64_t r) {
    ReplicaStreams st(detail::limit_root(opt.seed), r);
    if (limit_oracle) {
      Obs o;
      std::int64_t i = start.index.value;
      double t = 0.0;
      for (double tk : times) {
        i = limit_oracle(i, tk - t, st.clock);
        t = tk;
        o.keys.push_back(std::to_string(i));
      }
      return o;
    }
    return observe(PathSummary::of(simulate_limit_path(limit, start.index, cfg, st)));
  });

  FixedTimeResult out;
  std::vector<EmpiricalLaw> mp(times.size()), ml(times.size());
  EmpiricalLaw jp, jl;
  std::uint64_t gp = 0, gl = 0;
  const auto fold = [&](const std::vector<Obs>& obs, std::vector<EmpiricalLaw>& marg, EmpiricalLaw& joint,
                        std::uint64_t& guarded) {
    for (const auto& o : obs) {
      if (!o.guard) continue;
      ++guarded;
      std::string key;
      for (std::size_t k = 0; k < times.size(); ++k) {
        marg[k].add(o.keys[k]);
        key += (k ? "," : "") + o.keys[k];
      }
      joint.add(key);
    }
  };
  fold(pre, mp, jp, gp);
  fold(lim, ml, jl, gl);
  out.guard_prelimit = static_cast<double>(gp) / static_cast<double>(replicas);
  out.guard_limit = static_cast<double>(gl) / static_cast<double>(replicas);
  if (out.guard_prelimit < 0.5 || out.guard_limit < 0.5)
    out.warnings.emplace_back("guard event has empirical probability < 0.5; test power degraded");
  if (gp == 0 || gl == 0) throw PreconditionError("guard event never observed");

  const auto finish = [&](TestReport r, std::uint64_t a, std::uint64_t b) {
    r.sample_sizes = {a, b};
    r.budgeted = true;
    r.model = opt.model;
    r.n = n;
    r.seed = opt.seed;
    r.extra = {{"guard_prelimit", out.guard_prelimit}, {"guard_limit", out.guard_limit}, {"k_guard", k_guard}};
    r.notes = out.warnings;
    if (limit_oracle) r.notes.emplace_back("limit side from a direct simulation of the limit index process");
    return r;
  };
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::ostringstream name;
    name << "fixed-time marginal T=" << times[k];
    out.per_time.push_back(finish(TestReport::make(name.str(), "TV", tv_distance(mp[k], ml[k]), tolerance), gp, gl));
  }
  out.joint = finish(TestReport::make("fixed-time joint marginal", "TV", tv_distance(jp, jl), tolerance), gp, gl);
  return out;
}

// ---------------------------------------------------------------------------
// Explosion and extinction.

struct ExplosionGap {
  BinomialInterval prelimit;
  BinomialInterval limit;
};

/// Fraction of replicas stopped by the max-jumps guard before T, prelimit at
/// n versus the limit, each with a Wilson 99% interval.
inline ExplosionGap explosion_gap(const SemiMarkovSpec& spec, const LimitSpec& limit, const State& start, double T,
                                  std::uint64_t n, std::uint64_t max_jumps, std::uint64_t replicas,
                                  const HarnessOptions& opt, std::optional<std::uint64_t> limit_replicas = std::nullopt) {
  EngineConfig cfg;
  cfg.horizon = T;
  cfg.max_jumps = max_jumps;
  const auto pre = map_replicas(replicas, opt.workers, [&](std::uint64_t r) {
    ReplicaStreams st(opt.seed, r);
    return simulate_path(spec, n, start, cfg, st).termination == Termination::max_jumps;
  });
  const auto lim = map_replicas(limit_replicas.value_or(replicas), opt.workers, [&](std::uint64_t r) {
    ReplicaStreams st(detail::limit_root(opt.seed), r);
    return simulate_limit_path(limit, start.index, cfg, st).termination == Termination::max_jumps;
  });
  ExplosionGap g;
  g.prelimit = wilson_interval(static_cast<std::uint64_t>(std::count(pre.begin(), pre.end(), true)), pre.size());
  g.limit = wilson_interval(static_cast<std::uint64_t>(std::count(lim.begin(), lim.end(), true)), lim.size());
  return g;
}

struct ExtinctionEstimate {
  BinomialInterval interval;
  std::uint64_t guard_hits = 0;
  std::uint64_t ceiling_hits = 0;
  std::vector<std::string> warnings;
};

/// Fraction of paths whose final index is 0 (Wilson 99% interval). Paths
/// stopped at the horizon, ceiling or guard with a non-zero index count as
/// survival.
inline ExtinctionEstimate extinction_probability(const std::vector<PathSummary>& paths) {
  if (paths.empty()) throw PreconditionError("extinction estimate from no paths");
  ExtinctionEstimate e;
  std::uint64_t extinct = 0;
  for (const auto& p : paths) {
    if (p.final_index().value == 0) ++extinct;
    if (p.termination == Termination::max_jumps) ++e.guard_hits;
    if (p.termination == Termination::index_ceiling) ++e.ceiling_hits;
  }
  e.interval = wilson_interval(extinct, paths.size());
  if (static_cast<double>(e.guard_hits) > 0.05 * static_cast<double>(paths.size()))
    e.warnings.emplace_back("more than 5% of paths ended at the max-jumps guard");
  return e;
}

inline ExtinctionEstimate extinction_probability(const std::vector<PathRecord>& paths) {
  std::vector<PathSummary> s;
  s.reserve(paths.size());
  for (const auto& p : paths) s.push_back(PathSummary::of(p));
  return extinction_probability(s);
}

// ---------------------------------------------------------------------------
// Ergodic diagnostic.

struct ErgodicDiagnostic {
  std::vector<ErgodicEstimate> estimates;
  bool stabilized = true;
};

/// Time averages of h at increasing run lengths; flagged as not stabilized
/// when the last two differ by more than 5 pooled standard errors.
inline ErgodicDiagnostic ergodic_diagnostic(const FastModel& fast, const std::function<double(const State&)>& h,
                                            const std::vector<double>& run_lengths, std::uint64_t seed = 42) {
  ErgodicDiagnostic d;
  for (std::size_t k = 0; k < run_lengths.size(); ++k) {
    ErgodicOptions o;
    o.run_length = run_lengths[k];
    Rng rng = make_stream(seed, k, Stream::aux);
    d.estimates.push_back(time_average(fast, h, o, rng));
  }
  if (d.estimates.size() >= 2) {
    const auto& a = d.estimates[d.estimates.size() - 2];
    const auto& b = d.estimates.back();
    const double pooled = std::sqrt(a.standard_error * a.standard_error + b.standard_error * b.standard_error);
    d.stabilized = std::abs(a.value - b.value) <= 5.0 * pooled;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Event-driven engine against the fixed-grid oracle.

/// TV between the laws of (tau_1 in `bins` pooled quantile bins, first
/// post-jump index) from simulate_path and from brute_force_path(dt).
/// tau_1 beyond the horizon forms its own category.
inline TestReport oracle_equivalence(const SemiMarkovSpec& spec, const State& start, std::uint64_t n, double dt,
                                     std::uint64_t replicas, double horizon, const HarnessOptions& opt,
                                     std::size_t bins = 20, double tolerance = 0.01) {
  struct First {
    double tau;
    Index post;
  };
  const auto engine = map_replicas(replicas, opt.workers, [&](std::uint64_t r) {
    ReplicaStreams st(opt.seed, r);
    const FirstJump fj = simulate_first_jump(spec, n, start, horizon, st);
    return First{fj.tau, std::isfinite(fj.tau) ? fj.post.index : start.index};
  });
  const auto grid = map_replicas(replicas, opt.workers, [&](std::uint64_t r) {
    ReplicaStreams st(detail::oracle_root(opt.seed), r);
    const PathRecord rec = brute_force_path(spec, n, start, dt, horizon, st, 1);
    if (rec.jumps.empty()) return First{std::numeric_limits<double>::infinity(), start.index};
    return First{rec.jumps[0].time, rec.jumps[0].post.index};
  });
  std::vector<double> pooled;
  pooled.reserve(2 * replicas);
  for (const auto& f : engine) pooled.push_back(f.tau);
  for (const auto& f : grid) pooled.push_back(f.tau);
  const auto edges = quantile_edges(std::move(pooled), bins);
  EmpiricalLaw le, lg;
  for (const auto& f : engine) le.add(bin_label(f.tau, edges) + "/" + detail::index_key(f.post));
  for (const auto& f : grid) lg.add(bin_label(f.tau, edges) + "/" + detail::index_key(f.post));
  TestReport r = TestReport::make("engine vs fixed-grid oracle", "TV", tv_distance(le, lg), tolerance);
  r.sample_sizes = {le.size, lg.size};
  r.model = opt.model;
  r.n = n;
  r.seed = opt.seed;
  r.budgeted = true;
  r.extra = {{"dt", dt}, {"bins", bins}, {"horizon", horizon}, {"categories", le.counts.size()}};
  return r;
}

}  // namespace slowfast
