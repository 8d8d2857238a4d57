#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "slowfast/core/error.hpp"
#include "slowfast/core/rng.hpp"
#include "slowfast/core/spec.hpp"
#include "slowfast/engine/path_record.hpp"

namespace slowfast {

struct EngineConfig {
  double horizon = 1.0;
  std::uint64_t max_jumps = 1'000'000;
  /// Step of the fixed-grid oracle; also the documented bound on grid steps of
  /// continuous-rate fast paths.
  double dt = 1e-4;
  /// Tolerance on the accumulated hazard at a jump relative to the local rate bound.
  double crossing_tolerance = 1e-9;
  /// Stop once the index value reaches this level (population models).
  std::optional<std::int64_t> index_ceiling;
  /// Sorted slow times at which the full state is recorded.
  std::vector<double> observe_times;

  void validate() const {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
    if (max_jumps < 1) throw ConfigError("max_jumps must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(crossing_tolerance > 0.0)) throw ConfigError("crossing tolerance must be > 0");
    for (std::size_t k = 1; k < observe_times.size(); ++k)
      if (observe_times[k] < observe_times[k - 1]) throw ConfigError("observe_times must be sorted");
  }
};

// ---------------------------------------------------------------------------
// Time acceleration: X^{o,n}_t = X^o_{nt}.

class AcceleratedPath final : public FastPath {
 public:
  AcceleratedPath(std::unique_ptr<FastPath> base, double n) : base_(std::move(base)), n_(n) {}

  const State& state() const override { return base_->state(); }
  Segment peek() override {
    Segment s = base_->peek();
    s.duration /= n_;
    return s;
  }
  void advance(double dt) override { base_->advance(dt * n_); }
  void finish_segment() override { base_->finish_segment(); }

 private:
  std::unique_ptr<FastPath> base_;
  double n_;
};

class AcceleratedDynamics final : public FastDynamics {
 public:
  AcceleratedDynamics(std::shared_ptr<const FastDynamics> base, std::uint64_t n)
      : base_(std::move(base)), n_(n) {}

  std::unique_ptr<FastPath> start(const State& x, Rng& rng) const override {
    auto path = base_->start(x, rng);
    if (n_ == 1) return path;
    return std::make_unique<AcceleratedPath>(std::move(path), static_cast<double>(n_));
  }

  std::uint64_t factor() const { return n_; }

 private:
  std::shared_ptr<const FastDynamics> base_;
  std::uint64_t n_;
};

/// Divides every segment duration by n; rates are unchanged.
inline std::shared_ptr<const FastDynamics> accelerate(std::shared_ptr<const FastDynamics> fast, std::uint64_t n) {
  if (n == 0) throw ConfigError("acceleration factor n must be >= 1");
  if (n == 1) return fast;
  return std::make_shared<AcceleratedDynamics>(std::move(fast), n);
}

// ---------------------------------------------------------------------------
// Threshold crossing along a fast path.

struct JumpTimeSample {
  double zeta = std::numeric_limits<double>::infinity();  // +inf: no crossing within the budget
  double threshold = 0.0;
  double hazard = 0.0;  // integral of b up to zeta (or up to the budget)
  State pre_jump;
};

namespace detail {

inline double partial_hazard(const Segment& seg, double s) {
  if (seg.constant_rate) return seg.rate_begin == 0.0 ? 0.0 : seg.rate_begin * s;
  const double slope = (seg.rate_end - seg.rate_begin) / seg.duration;
  return seg.rate_begin * s + 0.5 * slope * s * s;
}

/// Offset inside seg where the accumulated hazard first reaches `need`.
/// Exact for constant rates; linear interpolation of the accumulator otherwise.
inline double crossing_offset(const Segment& seg, double need, double seg_hazard) {
  if (need <= 0.0) return 0.0;
  if (seg.constant_rate) return need / seg.rate_begin;
  return seg.duration * (need / seg_hazard);
}

struct Observer {
  const std::vector<double>* times = nullptr;
  std::size_t next = 0;
  std::vector<std::pair<double, State>>* out = nullptr;

  bool pending(double abs_limit) const { return times && next < times->size() && (*times)[next] <= abs_limit; }
  double next_time() const { return (*times)[next]; }
};

/// Runs the path until the accumulated hazard reaches theta or `budget` slow
/// time has elapsed. t0 is the absolute time of the path start (for observations).
inline JumpTimeSample run_to_threshold(FastPath& path, Index home, double theta, double budget, double t0,
                                       Observer* obs) {
  JumpTimeSample out;
  out.threshold = theta;
  double A = 0.0;
  double t = 0.0;
  for (;;) {
    const Segment seg = path.peek();
    const double H = seg.hazard();
    const double need = theta - A;
    double tc = std::numeric_limits<double>::infinity();
    if (H >= need && H > 0.0) tc = crossing_offset(seg, need, H);
    const double stop = std::min(t + tc, budget);

    if (obs && obs->pending(t0 + std::min(stop, t + seg.duration))) {
      const double to = obs->next_time() - t0;
      if (to <= stop && to < t + seg.duration) {
        if (to > t) {
          const double s = to - t;
          A += partial_hazard(seg, s);
          path.advance(s);
          t = to;
        }
        obs->out->emplace_back(obs->next_time(), path.state());
        ++obs->next;
        continue;
      }
    }

    if (t + tc <= budget) {
      if (tc >= seg.duration) {
        path.finish_segment();
      } else if (tc > 0.0) {
        path.advance(tc);
      }
      out.zeta = t + tc;
      out.hazard = A + (tc >= seg.duration ? H : partial_hazard(seg, tc));
      out.pre_jump = path.state();
      return out;
    }
    if (t + seg.duration >= budget) {
      out.hazard = A + partial_hazard(seg, budget - t);
      if (obs && obs->pending(t0 + budget)) {
        // observations falling exactly on the horizon
        if (budget > t) path.advance(budget - t);
        while (obs->pending(t0 + budget)) obs->out->emplace_back(obs->times->at(obs->next++), path.state());
      }
      out.pre_jump = path.state();
      return out;
    }
    path.finish_segment();
    A += H;
    t += seg.duration;
    if (path.state().index != home) throw InvariantError("fast path left its component space (index leak)");
  }
}

}  // namespace detail

/// Draws U, sets theta = G^{-1}(U) and follows the (already accelerated) path
/// until the accumulated rate reaches theta or the time budget runs out.
inline JumpTimeSample sample_jump_time(FastPath& path, const JumpClock& clock, double time_budget, Rng& clock_rng) {
  const Index home = path.state().index;
  if (home == kCemeteryIndex) throw PreconditionError("sample_jump_time from the absorbed state");
  const double theta = clock.threshold(uniform_open(clock_rng));
  return detail::run_to_threshold(path, home, theta, time_budget, 0.0, nullptr);
}

// ---------------------------------------------------------------------------
// Piecing-out simulation of X^n.

/// Simulates X^n from `start` until the horizon, absorption, the jump guard or
/// the index ceiling. Each epoch starts a fresh fast path from the post-jump
/// state, draws a new threshold, and applies the kernel at the crossing.
inline PathRecord simulate_path(const SemiMarkovSpec& spec, std::uint64_t n, const State& start,
                                const EngineConfig& config, ReplicaStreams& streams) {
  if (start.is_absorbed()) throw PreconditionError("simulate_path from the absorbed state");
  if (!spec.fast) throw ConfigError("spec has no fast dynamics");
  const auto fast = accelerate(spec.fast, n);

  PathRecord rec;
  rec.n = n;
  rec.start = start;
  detail::Observer obs{&config.observe_times, 0, &rec.snapshots};
  detail::Observer* obs_ptr = config.observe_times.empty() ? nullptr : &obs;

  State state = start;
  double t = 0.0;
  for (;;) {
    if (rec.jumps.size() >= config.max_jumps) {
      rec.termination = Termination::max_jumps;
      rec.end_time = t;
      break;
    }
    if (config.index_ceiling && state.index.value >= *config.index_ceiling) {
      rec.termination = Termination::index_ceiling;
      rec.end_time = t;
      break;
    }
    auto path = fast->start(state, streams.fast);
    const double theta = spec.clock.threshold(uniform_open(streams.clock));
    JumpTimeSample js = detail::run_to_threshold(*path, state.index, theta, config.horizon - t, t, obs_ptr);
    if (!std::isfinite(js.zeta)) {
      rec.termination = Termination::horizon_reached;
      rec.end_time = config.horizon;
      break;
    }
    if (js.pre_jump.index != state.index) throw InvariantError("fast path left its component space (index leak)");

    double t_next = t + js.zeta;
    if (!(t_next > t)) t_next = std::nextafter(t, std::numeric_limits<double>::infinity());
    State post = spec.kernel(js.pre_jump, streams.kernel);
    const bool absorbed = post.is_absorbed();
    rec.jumps.push_back({t_next, std::move(js.pre_jump), post, js.threshold, js.hazard});
    t = t_next;
    if (absorbed) {
      rec.termination = Termination::absorbed;
      rec.end_time = t;
      if (obs_ptr)
        while (obs.pending(config.horizon)) rec.snapshots.emplace_back(obs.times->at(obs.next++), State::absorbed());
      break;
    }
    state = std::move(post);
  }
  return rec;
}

struct FirstJump {
  double tau = std::numeric_limits<double>::infinity();
  State pre;
  State post;
};

/// First epoch only: (tau_1, X_{tau_1-}, X_{tau_1}) with tau_1 = +inf past the horizon.
inline FirstJump simulate_first_jump(const SemiMarkovSpec& spec, std::uint64_t n, const State& start, double horizon,
                                     ReplicaStreams& streams) {
  if (start.is_absorbed()) throw PreconditionError("simulate_first_jump from the absorbed state");
  const auto fast = accelerate(spec.fast, n);
  auto path = fast->start(start, streams.fast);
  JumpTimeSample js = sample_jump_time(*path, spec.clock, horizon, streams.clock);
  FirstJump fj;
  fj.pre = std::move(js.pre_jump);
  if (!std::isfinite(js.zeta)) return fj;
  fj.tau = js.zeta;
  fj.post = spec.kernel(fj.pre, streams.kernel);
  return fj;
}

}  // namespace slowfast
