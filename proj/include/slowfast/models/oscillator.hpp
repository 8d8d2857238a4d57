#pragma once

#include <cmath>
#include <memory>
#include <numbers>

#include "slowfast/core/spec.hpp"
#include "slowfast/limit/limit_spec.hpp"

namespace slowfast {

/// Deterministic fast dynamics on E_1 = [-1, 1] and E_2 = [2, 4]:
/// position offset_i + cos(phase + t), offset_1 = 0, offset_2 = 3, with b = 1.
/// The point is stored as (position, phase). A jump from E_1 lands on the
/// position 3 in E_2 and one from E_2 on the position 0 in E_1.
///
/// Under acceleration the index process converges (it is an alternating
/// Exp(1) renewal process at every n) while the position X^n_t = cos(nt)
/// keeps oscillating.
struct Oscillator {
  SemiMarkovSpec spec;
  LimitSpec index_limit;

  static double offset(std::int64_t i) { return i == 2 ? 3.0 : 0.0; }
  static State at_phase(std::int64_t i, double phase) {
    return State{Index{i}, {offset(i) + std::cos(phase), phase}};
  }
  State start(std::int64_t i = 1, double phase = 0.0) const { return at_phase(i, phase); }
};

namespace detail {

class OscillatorPath final : public FastPath {
 public:
  static constexpr double kChunk = 0.5;

  explicit OscillatorPath(const State& x) : state_(x), phase0_(x.point.at(1)) {}

  const State& state() const override { return state_; }
  Segment peek() override { return Segment::constant(kChunk - into_, 1.0); }
  void advance(double dt) override {
    into_ += dt;
    if (into_ >= kChunk) into_ = std::nextafter(kChunk, 0.0);
    place();
  }
  void finish_segment() override {
    ++chunks_;
    into_ = 0.0;
    place();
  }

 private:
  void place() {
    const double phase = phase0_ + static_cast<double>(chunks_) * kChunk + into_;
    state_.point[0] = Oscillator::offset(state_.index.value) + std::cos(phase);
    state_.point[1] = phase;
  }

  State state_;
  double phase0_;
  std::uint64_t chunks_ = 0;
  double into_ = 0.0;
};

class OscillatorDynamics final : public FastDynamics {
 public:
  std::unique_ptr<FastPath> start(const State& x, Rng&) const override { return std::make_unique<OscillatorPath>(x); }
};

}  // namespace detail

inline Oscillator build_oscillator_counterexample() {
  Oscillator m;
  m.spec.name = "oscillator";
  m.spec.fast = std::make_shared<detail::OscillatorDynamics>();
  m.spec.rate.eval = [](const State&) { return 1.0; };
  m.spec.kernel.sample = [](const State& pre, Rng&) {
    constexpr double half_pi = std::numbers::pi / 2;
    return pre.index.value == 1 ? Oscillator::at_phase(2, half_pi) : Oscillator::at_phase(1, half_pi);
  };
  m.spec.clock = JumpClock::exponential();
  m.spec.probes = {m.start(1, 0.0), m.start(2, 1.0)};

  // Only the index process has a limit: alternating with unit rate.
  m.index_limit.name = "oscillator-index-limit";
  m.index_limit.clock = m.spec.clock;
  m.index_limit.kernel = m.spec.kernel;
  m.index_limit.mean_rate = [](Index i) { return i.value == 1 || i.value == 2 ? 1.0 : 0.0; };
  m.index_limit.biased_sample = [](Index i, Rng& rng) {
    return Oscillator::at_phase(i.value, 2.0 * std::numbers::pi * uniform_open(rng));
  };
  m.index_limit.analytically_explosive = false;
  return m;
}

}  // namespace slowfast
