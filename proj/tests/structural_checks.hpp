#pragma once

// Seeded structural properties shared by the unit suite and the acceptance
// binary: strictly increasing jump times, index constancy between jumps,
// threshold consistency at every jump, exact P/Q coupling and determinism
// under a fixed seed (including across worker counts).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "slowfast/engine/engine.hpp"
#include "slowfast/engine/ensemble.hpp"
#include "slowfast/limit/limit_spec.hpp"
#include "slowfast/models/registry.hpp"

namespace structural {

using namespace slowfast;

struct Outcome {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct Case {
  ModelInstance model;
  EngineConfig config;
  std::uint64_t n = 1;
  // relative; exact up to rounding for segment-constant rates, O(dt) when the
  // crossing inside a linear-rate grid step is located by interpolation
  double hazard_tol = 1e-9;
};

inline std::vector<Case> cases() {
  std::vector<Case> out;
  const std::vector<std::uint64_t> ns = {1, 16};
  for (const auto& name : model_names()) {
    for (auto n : ns) {
      Case c;
      c.model = build_model(name);
      c.config.horizon = name == "explosion-ladder" ? 3.0 : 2.0;
      c.config.max_jumps = 2000;
      c.config.index_ceiling = c.model.ceiling_hint;
      c.n = n;
      out.push_back(std::move(c));
    }
  }
  // continuous rate along the fast path: diffusion traits
  Case d;
  d.model = build_model("typed-branching", json::parse(R"({
    "trait": {"kind": "diffusion", "reversion": 1.0, "mean": 1.0, "sigma": 0.5, "grid_dt": 0.01},
    "offspring_rates": [{"affine": {"intercept": 0.5, "slope": 0.5}}, null,
                        {"affine": {"intercept": 0.5, "slope": 1.0}}],
    "start": {"size": 2, "trait": 1.0}})"));
  d.config.horizon = 2.0;
  d.config.max_jumps = 2000;
  d.config.index_ceiling = 32;
  d.n = 8;
  d.hazard_tol = 1e-3;  // grid step 0.01 / n with b of order 1
  out.push_back(std::move(d));
  return out;
}

inline std::vector<double> grid_times(double horizon, int k) {
  std::vector<double> t;
  for (int j = 1; j <= k; ++j) t.push_back(horizon * j / (k + 1));
  return t;
}

inline Outcome increasing_jump_times(std::uint64_t replicas) {
  Outcome o{"strictly increasing jump times", true, {}};
  for (const auto& c : cases()) {
    for (std::uint64_t r = 0; r < replicas && o.ok; ++r) {
      ReplicaStreams st(11, r);
      const auto rec = simulate_path(c.model.spec, c.n, c.model.start, c.config, st);
      double prev = 0.0;
      for (const auto& e : rec.jumps) {
        if (!(e.time > prev)) {
          o.ok = false;
          o.detail = c.model.name + ": tau_k not increasing";
          break;
        }
        prev = e.time;
      }
    }
  }
  return o;
}

inline Outcome index_constancy(std::uint64_t replicas) {
  Outcome o{"index constant between jumps", true, {}};
  for (auto c : cases()) {
    c.config.observe_times = grid_times(c.config.horizon, 97);
    for (std::uint64_t r = 0; r < replicas && o.ok; ++r) {
      ReplicaStreams st(12, r);
      const auto rec = simulate_path(c.model.spec, c.n, c.model.start, c.config, st);
      for (std::size_t k = 0; k + 1 < rec.jumps.size(); ++k) {
        if (rec.jumps[k + 1].pre.index != rec.jumps[k].post.index) {
          o.ok = false;
          o.detail = c.model.name + ": pre-jump index differs from previous post-jump index";
        }
      }
      if (!rec.jumps.empty() && rec.jumps[0].pre.index != rec.start.index) {
        o.ok = false;
        o.detail = c.model.name + ": first pre-jump index differs from the start index";
      }
      for (const auto& [t, s] : rec.snapshots) {
        if (rec.termination == Termination::max_jumps || rec.termination == Termination::index_ceiling) break;
        if (s.index != rec.index_at(t)) {
          o.ok = false;
          o.detail = c.model.name + ": observed index differs from the recorded index path";
          break;
        }
      }
    }
  }
  return o;
}

inline Outcome threshold_consistency(std::uint64_t replicas) {
  Outcome o{"accumulated hazard equals the clock threshold", true, {}};
  for (const auto& c : cases()) {
    for (std::uint64_t r = 0; r < replicas && o.ok; ++r) {
      ReplicaStreams st(13, r);
      const auto rec = simulate_path(c.model.spec, c.n, c.model.start, c.config, st);
      for (const auto& e : rec.jumps) {
        if (std::abs(e.hazard - e.threshold) > c.hazard_tol * std::max(1.0, e.threshold)) {
          o.ok = false;
          o.detail = c.model.name + ": hazard " + std::to_string(e.hazard) + " vs threshold " + std::to_string(e.threshold);
          break;
        }
      }
    }
  }
  return o;
}

inline Outcome pq_coupling(std::uint64_t draws) {
  Outcome o{"P/Q coupling identity", true, {}};
  for (const auto& name : model_names()) {
    const auto m = build_model(name);
    const Index i = m.start.index;
    if (!(m.limit.mean_rate(i) > 0.0)) continue;
    Rng a = make_stream(14, 0, Stream::kernel);
    Rng b = a;
    const State x = m.start;
    for (std::uint64_t d = 0; d < draws; ++d) {
      const Index viaP = step_jump_chain(m.limit, i, a);
      const Index viaQ = project_index(step_chain_Y(m.limit, x, b));
      if (viaP != viaQ) {
        o.ok = false;
        o.detail = name + ": P and index of Q differ on a coupled draw";
        return o;
      }
    }
  }
  return o;
}

inline Outcome determinism(std::uint64_t replicas) {
  Outcome o{"determinism under seed", true, {}};
  for (const auto& c : cases()) {
    auto run = [&](unsigned workers) {
      return map_replicas(replicas, workers, [&](std::uint64_t r) {
        ReplicaStreams st(15, r);
        const auto rec = simulate_path(c.model.spec, c.n, c.model.start, c.config, st);
        std::vector<double> sig;
        for (const auto& e : rec.jumps) {
          sig.push_back(e.time);
          sig.push_back(static_cast<double>(e.post.index.value));
        }
        return sig;
      });
    };
    if (run(1) != run(1) || run(1) != run(3)) {
      o.ok = false;
      o.detail = c.model.name + ": repeated runs differ";
      return o;
    }
  }
  return o;
}

inline std::vector<Outcome> run_all() {
  return {increasing_jump_times(200), index_constancy(200), threshold_consistency(200), pq_coupling(100000),
          determinism(100)};
}

}  // namespace structural
