#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

#include <json.hpp>

#include "slowfast/core/spec.hpp"

namespace testsupport {

using namespace slowfast;

inline const nlohmann::json& oracle() {
  static const nlohmann::json j = [] {
    std::ifstream is(SLOWFAST_ORACLE_FILE);
    return nlohmann::json::parse(is);
  }();
  return j;
}

// Frozen path with constant rate c (c = 0: never jumps).
class ConstantPath final : public FastPath {
 public:
  ConstantPath(State x, double c) : x_(std::move(x)), c_(c) {}
  const State& state() const override { return x_; }
  Segment peek() override { return Segment::constant(std::numeric_limits<double>::infinity(), c_); }
  void advance(double) override {}
  void finish_segment() override {}

 private:
  State x_;
  double c_;
};

class ConstantDynamics final : public FastDynamics {
 public:
  explicit ConstantDynamics(double c) : c_(c) {}
  std::unique_ptr<FastPath> start(const State& x, Rng&) const override { return std::make_unique<ConstantPath>(x, c_); }

 private:
  double c_;
};

// Unit-length segments alternating rates r0, r1 forever.
class AlternatingPath final : public FastPath {
 public:
  AlternatingPath(State x, double r0, double r1) : x_(std::move(x)), r_{r0, r1} {}
  const State& state() const override { return x_; }
  Segment peek() override { return Segment::constant(1.0 - into_, r_[k_ % 2]); }
  void advance(double dt) override { into_ += dt; }
  void finish_segment() override {
    ++k_;
    into_ = 0.0;
  }

 private:
  State x_;
  double r_[2];
  std::uint64_t k_ = 0;
  double into_ = 0.0;
};

class AlternatingDynamics final : public FastDynamics {
 public:
  AlternatingDynamics(double r0, double r1) : r0_(r0), r1_(r1) {}
  std::unique_ptr<FastPath> start(const State& x, Rng&) const override {
    return std::make_unique<AlternatingPath>(x, r0_, r1_);
  }

 private:
  double r0_, r1_;
};

// Path that wanders into index + 1 after its first segment.
class LeakyPath final : public FastPath {
 public:
  explicit LeakyPath(State x) : x_(std::move(x)) {}
  const State& state() const override { return x_; }
  Segment peek() override { return Segment::constant(1.0, 0.0); }
  void advance(double) override {}
  void finish_segment() override { x_.index.value += 1; }

 private:
  State x_;
};

class LeakyDynamics final : public FastDynamics {
 public:
  std::unique_ptr<FastPath> start(const State& x, Rng&) const override { return std::make_unique<LeakyPath>(x); }
};

/// Spec with a constant-rate frozen path and a kernel i -> i + 1.
inline SemiMarkovSpec constant_rate_spec(double c) {
  SemiMarkovSpec s;
  s.name = "constant";
  s.fast = std::make_shared<ConstantDynamics>(c);
  s.rate.eval = [c](const State&) { return c; };
  s.kernel.sample = [](const State& pre, Rng&) { return State{Index{pre.index.value + 1}, pre.point}; };
  s.probes = {State{Index{0}, {0.0}}};
  return s;
}

}  // namespace testsupport
