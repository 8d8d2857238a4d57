#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "slowfast/engine/engine.hpp"

namespace slowfast {

namespace detail {

struct GridEpoch {
  bool jumped = false;
  std::uint64_t steps = 0;
  double hazard = 0.0;
  State pre;
};

/// One inter-jump epoch on a fixed grid: A += b(X_t) dt with b read pointwise
/// from the state at the start of each step; the jump fires at the end of the
/// first step with G(A) >= U, i.e. A >= G^{-1}(U). Paths whose rate is constant
/// between segment boundaries are advanced lazily, only at boundaries, and
/// runs of grid steps inside one segment are counted in closed form.
inline GridEpoch grid_epoch(FastPath& path, const RateFunction& rate, const JumpClock& clock, double u, double dt,
                            std::uint64_t max_steps, bool lazy) {
  GridEpoch out;
  const Index home = path.state().index;
  const double theta = clock.threshold(u);
  Segment seg = path.peek();
  double seg_left = seg.duration;
  double b = rate(path.state());
  double A = 0.0;

  auto check_home = [&] {
    if (path.state().index != home) throw InvariantError("fast path left its component space (index leak)");
  };

  for (std::uint64_t k = 0; k < max_steps; ++k) {
    if (lazy) {
      if (b == 0.0 && std::isinf(seg_left)) break;  // frozen with zero rate
      // whole steps that stay inside the segment and do not reach theta
      double skip = std::floor(seg_left / dt) - 1.0;
      if (b > 0.0) skip = std::min(skip, std::ceil((theta - A) / (b * dt)) - 2.0);
      skip = std::min(skip, static_cast<double>(max_steps - k - 1));
      if (skip >= 1.0) {
        const auto K = static_cast<std::uint64_t>(skip);
        if (b > 0.0) A += static_cast<double>(K) * b * dt;
        seg_left -= static_cast<double>(K) * dt;
        k += K;
      }
    }
    if (b > 0.0) A += b * dt;
    // move the fast path forward by one grid step
    double rem = dt;
    while (rem >= seg_left) {
      rem -= seg_left;
      path.finish_segment();
      check_home();
      seg = path.peek();
      seg_left = seg.duration;
      if (lazy) b = rate(path.state());
    }
    seg_left -= rem;
    if (!lazy) {
      if (rem > 0.0) {
        path.advance(rem);
        seg = path.peek();
        seg_left = seg.duration;
      }
      b = rate(path.state());
    }
    if (A > 0.0 && A >= theta) {
      if (lazy) {
        const double into = seg.duration - seg_left;
        if (into > 0.0) path.advance(into);
      }
      out.jumped = true;
      out.steps = k + 1;
      out.hazard = A;
      out.pre = path.state();
      return out;
    }
  }
  out.steps = max_steps;
  out.hazard = A;
  out.pre = path.state();
  return out;
}

}  // namespace detail

/// Fixed-step oracle for simulate_path: a first-order discretization of the
/// jump-time definition with U drawn once per epoch. Callers keep
/// dt * max b <= 0.01. Returns the same record shape as the event-driven engine.
inline PathRecord brute_force_path(const SemiMarkovSpec& spec, std::uint64_t n, const State& start, double dt,
                                   double horizon, ReplicaStreams& streams,
                                   std::uint64_t max_jumps = 1'000'000) {
  if (start.is_absorbed()) throw PreconditionError("brute_force_path from the absorbed state");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  const auto fast = accelerate(spec.fast, n);
  const auto total_steps = static_cast<std::uint64_t>(std::floor(horizon / dt + 1e-9));

  PathRecord rec;
  rec.n = n;
  rec.start = start;
  State state = start;
  std::uint64_t step = 0;  // absolute grid position, t = step * dt
  for (;;) {
    if (rec.jumps.size() >= max_jumps) {
      rec.termination = Termination::max_jumps;
      rec.end_time = static_cast<double>(step) * dt;
      break;
    }
    auto path = fast->start(state, streams.fast);
    const double u = uniform_open(streams.clock);
    const bool lazy = spec.rate.segment_constant(state.index);
    detail::GridEpoch ep = detail::grid_epoch(*path, spec.rate, spec.clock, u, dt, total_steps - step, lazy);
    if (!ep.jumped) {
      rec.termination = Termination::horizon_reached;
      rec.end_time = horizon;
      break;
    }
    step += ep.steps;
    State post = spec.kernel(ep.pre, streams.kernel);
    const bool absorbed = post.is_absorbed();
    rec.jumps.push_back({static_cast<double>(step) * dt, std::move(ep.pre), post, spec.clock.threshold(u), ep.hazard});
    if (absorbed) {
      rec.termination = Termination::absorbed;
      rec.end_time = rec.jumps.back().time;
      break;
    }
    state = std::move(post);
  }
  return rec;
}

}  // namespace slowfast
