#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "slowfast/core/spec.hpp"
#include "slowfast/limit/limit_spec.hpp"
#include "slowfast/models/product_path.hpp"
#include "slowfast/models/trait.hpp"

namespace slowfast {

/// Minimal slow-fast model with closed forms. Every E_i = {a, b} (point 0 or
/// 1) carries the same fast chain a <-> b; at a jump the next index is drawn
/// from a row of a stochastic matrix that may depend on the pre-jump point,
/// and the fast chain restarts according to `restart`.
struct TwoStateToyParams {
  double q_ab = 1.0;
  double q_ba = 2.0;
  double b_a = 3.0;
  double b_b = 6.0;
  /// Post-jump index matrix used from point a and from point b.
  std::vector<std::vector<double>> matrix_a = {{1.0}};
  std::vector<std::vector<double>> matrix_b = {{1.0}};
  enum class Restart { at_a, at_b, keep, stationary } restart = Restart::at_a;
};

struct TwoStateToy {
  TwoStateToyParams params;
  SemiMarkovSpec spec;
  LimitSpec limit;

  std::size_t num_indices() const { return params.matrix_a.size(); }

  /// Stationary law (mu(a), mu(b)) of the fast chain.
  std::array<double, 2> stationary() const {
    const double z = params.q_ab + params.q_ba;
    return {params.q_ba / z, params.q_ab / z};
  }

  double mean_rate() const {
    const auto mu = stationary();
    return mu[0] * params.b_a + mu[1] * params.b_b;
  }

  /// Weights of a and b under mu(dx) b(x) / mu(b).
  std::array<double, 2> biased_weights() const {
    const auto mu = stationary();
    const double m = mean_rate();
    return {mu[0] * params.b_a / m, mu[1] * params.b_b / m};
  }

  /// Limit jump chain P(i, j) in closed form.
  std::vector<std::vector<double>> analytic_jump_matrix() const {
    const auto w = biased_weights();
    std::vector<std::vector<double>> p = params.matrix_a;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p[i].size(); ++j) p[i][j] = w[0] * params.matrix_a[i][j] + w[1] * params.matrix_b[i][j];
    return p;
  }

  State start(std::int64_t index, int point = 0) const {
    return State{Index{index}, {static_cast<double>(point)}};
  }
};

namespace detail {

inline void check_stochastic(const std::vector<std::vector<double>>& m, const char* what) {
  if (m.empty()) throw ConfigError(std::string(what) + " must be non-empty");
  for (const auto& row : m) {
    if (row.size() != m.size()) throw ConfigError(std::string(what) + " must be square");
    double s = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) throw ConfigError(std::string(what) + " has a negative entry");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ConfigError(std::string(what) + " is not stochastic (row sum != 1)");
  }
}

inline std::size_t sample_row(const std::vector<double>& row, Rng& rng) {
  return TraitModel::sample_discrete(row, rng);
}

class ToyDynamics final : public FastDynamics {
 public:
  ToyDynamics(TraitModel trait, std::vector<double> b_table) : trait_(std::move(trait)), b_(std::move(b_table)) {}

  std::unique_ptr<FastPath> start(const State& x, Rng& rng) const override {
    ProductLayout layout;
    layout.coords = {0};
    layout.tables = {b_};
    layout.table_of = {0};
    return std::make_unique<FiniteProductPath>(x, std::move(layout), trait_, rng);
  }

 private:
  TraitModel trait_;
  std::vector<double> b_;
};

}  // namespace detail

inline TwoStateToy build_two_state_toy(TwoStateToyParams p) {
  if (!(p.q_ab > 0.0) || !(p.q_ba > 0.0)) throw ConfigError("two-state toy needs positive switching rates");
  if (!(p.b_a >= 0.0) || !(p.b_b >= 0.0)) throw ConfigError("two-state toy needs non-negative rate values");
  detail::check_stochastic(p.matrix_a, "index matrix (point a)");
  detail::check_stochastic(p.matrix_b, "index matrix (point b)");
  if (p.matrix_a.size() != p.matrix_b.size()) throw ConfigError("index matrices must have the same size");

  TwoStateToy toy;
  toy.params = p;
  Eigen::MatrixXd rates(2, 2);
  rates << 0.0, p.q_ab, p.q_ba, 0.0;
  const TraitModel trait = TraitModel::finite(rates);
  const std::vector<double> b_table = {p.b_a, p.b_b};
  const auto mu = toy.stationary();

  auto kernel_sample = [p, mu](const State& pre, Rng& rng) {
    const auto i = static_cast<std::size_t>(pre.index.value);
    const bool at_b = pre.point.at(0) != 0.0;
    const auto& row = at_b ? p.matrix_b.at(i) : p.matrix_a.at(i);
    const auto j = static_cast<std::int64_t>(detail::sample_row(row, rng));
    double point = 0.0;
    switch (p.restart) {
      case TwoStateToyParams::Restart::at_a: point = 0.0; break;
      case TwoStateToyParams::Restart::at_b: point = 1.0; break;
      case TwoStateToyParams::Restart::keep: point = pre.point[0]; break;
      case TwoStateToyParams::Restart::stationary: point = uniform_open(rng) < mu[0] ? 0.0 : 1.0; break;
    }
    return State{Index{j}, {point}};
  };

  toy.spec.name = "two-state-toy";
  toy.spec.fast = std::make_shared<detail::ToyDynamics>(trait, b_table);
  toy.spec.rate.eval = [b_table](const State& s) { return b_table[static_cast<std::size_t>(s.point.at(0))]; };
  toy.spec.kernel.sample = kernel_sample;
  toy.spec.clock = JumpClock::exponential();
  for (std::size_t i = 0; i < p.matrix_a.size(); ++i)
    for (int x = 0; x < 2; ++x) toy.spec.probes.push_back(State{Index{static_cast<std::int64_t>(i)}, {double(x)}});

  const double mean = toy.mean_rate();
  const auto weights = mean > 0.0 ? toy.biased_weights() : std::array<double, 2>{0.0, 0.0};
  toy.limit.name = "two-state-toy-limit";
  toy.limit.clock = toy.spec.clock;
  toy.limit.kernel = toy.spec.kernel;
  toy.limit.mean_rate = [mean](Index) { return mean; };
  toy.limit.biased_sample = [weights](Index i, Rng& rng) {
    if (!(weights[0] + weights[1] > 0.0)) throw PreconditionError("biased sampling with zero mean rate");
    return State{i, {uniform_open(rng) < weights[0] ? 0.0 : 1.0}};
  };
  toy.limit.analytically_explosive = false;
  return toy;
}

inline TwoStateToy build_two_state_toy(double q_ab, double q_ba, double b_a, double b_b,
                                       std::vector<std::vector<double>> index_matrix) {
  TwoStateToyParams p;
  p.q_ab = q_ab;
  p.q_ba = q_ba;
  p.b_a = b_a;
  p.b_b = b_b;
  p.matrix_a = index_matrix;
  p.matrix_b = std::move(index_matrix);
  return build_two_state_toy(std::move(p));
}

/// Fast model on one index of the toy (for ergodic estimation).
inline FastModel toy_fast_model(const TwoStateToy& toy, std::int64_t index, int point = 0) {
  FastModel m;
  m.dynamics = toy.spec.fast;
  m.rate = toy.spec.rate;
  m.start = toy.start(index, point);
  StationarySummary s;
  s.mean_rate = toy.mean_rate();
  if (s.mean_rate > 0.0) {
    const auto limit = toy.limit;
    s.biased_sampler = [limit, index](Rng& rng) { return limit.biased_sample(Index{index}, rng); };
  }
  m.analytic = s;
  return m;
}

}  // namespace slowfast
