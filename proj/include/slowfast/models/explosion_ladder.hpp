#pragma once

#include <cmath>
#include <limits>
#include <memory>

#include "slowfast/core/spec.hpp"
#include "slowfast/limit/limit_spec.hpp"
#include "slowfast/models/product_path.hpp"
#include "slowfast/models/trait.hpp"

namespace slowfast {

/// Ladder over I = N with E_i = {(i,0), (i,1)}: the fast chain moves
/// (i,0) -> (i,1) at rate 1 and never back, b(i,0) = 0, b(i,1) = i^p, and
/// every jump lands on (i+1, 0). With p = 2 the limit explodes while each
/// prelimit process does not; with p = 1 neither does.
struct ExplosionLadder {
  double exponent = 2.0;
  SemiMarkovSpec spec;
  LimitSpec limit;

  double level_rate(std::int64_t i) const { return std::pow(static_cast<double>(i), exponent); }
  State start(std::int64_t i, int point = 0) const { return State{Index{i}, {static_cast<double>(point)}}; }

  /// Expected explosion time of the limit from i0 >= 1, sum_{i >= i0} i^{-p}
  /// (partial sum plus the integral tail); +inf when the series diverges.
  double expected_explosion_time(std::int64_t i0, std::int64_t terms = 1'000'000) const {
    if (exponent <= 1.0 || i0 < 1) return std::numeric_limits<double>::infinity();
    const std::int64_t last = i0 + terms;
    double s = 1.0 / ((exponent - 1.0) * std::pow(static_cast<double>(last) + 0.5, exponent - 1.0));
    for (std::int64_t i = last; i >= i0; --i) s += 1.0 / level_rate(i);
    return s;
  }
};

namespace detail {

class LadderDynamics final : public FastDynamics {
 public:
  explicit LadderDynamics(double exponent) : exponent_(exponent) {
    Eigen::MatrixXd rates(2, 2);
    rates << 0.0, 1.0, 0.0, 0.0;
    trait_ = TraitModel::finite(rates);
  }

  std::unique_ptr<FastPath> start(const State& x, Rng& rng) const override {
    ProductLayout layout;
    layout.coords = {0};
    layout.tables = {{0.0, std::pow(static_cast<double>(x.index.value), exponent_)}};
    layout.table_of = {0};
    return std::make_unique<FiniteProductPath>(x, std::move(layout), trait_, rng);
  }

 private:
  double exponent_;
  TraitModel trait_;
};

}  // namespace detail

inline ExplosionLadder build_explosion_ladder(double exponent = 2.0) {
  if (!(exponent > 0.0)) throw ConfigError("ladder exponent must be > 0");
  ExplosionLadder m;
  m.exponent = exponent;
  m.spec.name = "explosion-ladder";
  m.spec.fast = std::make_shared<detail::LadderDynamics>(exponent);
  m.spec.rate.eval = [exponent](const State& s) {
    return s.point.at(0) == 0.0 ? 0.0 : std::pow(static_cast<double>(s.index.value), exponent);
  };
  m.spec.kernel.sample = [](const State& pre, Rng&) { return State{Index{pre.index.value + 1}, {0.0}}; };
  m.spec.clock = JumpClock::exponential();
  for (std::int64_t i = 0; i < 4; ++i)
    for (int x = 0; x < 2; ++x) m.spec.probes.push_back(State{Index{i}, {double(x)}});

  m.limit.name = "explosion-ladder-limit";
  m.limit.clock = m.spec.clock;
  m.limit.kernel = m.spec.kernel;
  m.limit.mean_rate = [exponent](Index i) { return std::pow(static_cast<double>(i.value), exponent); };
  m.limit.biased_sample = [](Index i, Rng&) { return State{i, {1.0}}; };
  m.limit.analytically_explosive = exponent > 1.0;
  return m;
}

inline FastModel ladder_fast_model(const ExplosionLadder& m, std::int64_t i) {
  FastModel f;
  f.dynamics = m.spec.fast;
  f.rate = m.spec.rate;
  f.start = m.start(i, 0);
  StationarySummary s;
  s.mean_rate = m.level_rate(i);
  if (s.mean_rate > 0.0) s.biased_sampler = [i](Rng&) { return State{Index{i}, {1.0}}; };
  f.analytic = s;
  return f;
}

}  // namespace slowfast
