#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slowfast/core/clock.hpp"
#include "slowfast/core/error.hpp"
#include "slowfast/core/rng.hpp"
#include "slowfast/core/state.hpp"

namespace slowfast {

/// One piece of a fast trajectory. The rate b is either constant along the
/// piece or varies linearly from rate_begin to rate_end (grid-sampled paths).
/// Durations are strictly positive and may be +inf for a frozen path.
struct Segment {
  double duration = 0.0;
  double rate_begin = 0.0;
  double rate_end = 0.0;
  bool constant_rate = true;

  static Segment constant(double duration, double rate) { return {duration, rate, rate, true}; }
  static Segment linear(double duration, double r0, double r1) { return {duration, r0, r1, false}; }

  /// Integral of b over the whole segment.
  double hazard() const {
    if (constant_rate) return rate_begin == 0.0 ? 0.0 : rate_begin * duration;
    return 0.5 * (rate_begin + rate_end) * duration;
  }
};

/// Stateful, single-owner generator of a fast trajectory started in some E_i.
///
/// peek() returns the pending segment (or what remains of it); advance(dt)
/// moves partway into it, finish_segment() consumes it entirely. state() is the
/// current position, which never leaves the component space it started in.
class FastPath {
 public:
  virtual ~FastPath() = default;
  virtual const State& state() const = 0;
  virtual Segment peek() = 0;
  virtual void advance(double dt) = 0;
  virtual void finish_segment() = 0;
};

/// Family of fast dynamics X^o: one generator per start point.
class FastDynamics {
 public:
  virtual ~FastDynamics() = default;
  virtual std::unique_ptr<FastPath> start(const State& x, Rng& rng) const = 0;
};

/// Pointwise rate function b together with the per-index segment-constant flag.
struct RateFunction {
  std::function<double(const State&)> eval;
  std::function<bool(Index)> segment_constant = [](Index) { return true; };

  double operator()(const State& s) const { return s.is_absorbed() ? 0.0 : eval(s); }
};

/// Post-jump kernel pi. mass(i) is the declared total mass pi(x, E) on E_i, 0 or 1;
/// mass 0 means the jump sends the process to the absorbed state.
struct TransitionKernel {
  std::function<State(const State&, Rng&)> sample;
  std::function<double(Index)> mass = [](Index) { return 1.0; };

  State operator()(const State& pre, Rng& rng) const {
    if (pre.is_absorbed() || mass(pre.index) == 0.0) return State::absorbed();
    return sample(pre, rng);
  }
};

/// The triple (fast dynamics, clock, kernel) plus the rate; acceleration is
/// applied by the engine.
struct SemiMarkovSpec {
  std::string name;
  std::shared_ptr<const FastDynamics> fast;
  RateFunction rate;
  JumpClock clock = JumpClock::exponential();
  TransitionKernel kernel;
  /// States used by validate_spec for spot checks.
  std::vector<State> probes;
};

struct ErgodicEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  double run_length = 0.0;
  double burn_in_fraction = 0.1;
  int batches = 20;
};

/// mu_i(b) for one index plus a sampler of mu_i(dx) b(x) / mu_i(b).
struct StationarySummary {
  enum class Provenance { analytic, ergodic };

  double mean_rate = 0.0;
  std::function<State(Rng&)> biased_sampler;  // empty when mean_rate == 0
  Provenance provenance = Provenance::analytic;
  std::optional<ErgodicEstimate> estimate;
};

/// Fast dynamics restricted to one E_i, with the rate and (when known) a
/// closed-form stationary summary.
struct FastModel {
  std::shared_ptr<const FastDynamics> dynamics;
  RateFunction rate;
  State start;
  std::optional<StationarySummary> analytic;
};

}  // namespace slowfast
