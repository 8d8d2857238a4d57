#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "slowfast/core/error.hpp"
#include "slowfast/core/rng.hpp"

namespace slowfast {

/// A real function on the trait space D. Finite traits are encoded as the
/// state label 0..m-1 stored in a double.
using TraitFunction = std::function<double(double)>;

inline TraitFunction table_function(std::vector<double> values) {
  for (double v : values)
    if (!(v >= 0.0)) throw ConfigError("trait function values must be >= 0");
  return [values = std::move(values)](double x) {
    const auto s = static_cast<std::size_t>(x);
    return s < values.size() ? values[s] : 0.0;
  };
}

/// max(0, intercept + slope * x)
inline TraitFunction affine_function(double intercept, double slope) {
  return [intercept, slope](double x) { return std::max(0.0, intercept + slope * x); };
}

inline TraitFunction constant_function(double c) {
  if (!(c >= 0.0)) throw ConfigError("trait function values must be >= 0");
  return [c](double) { return c; };
}

/// Dynamics Y of one individual trait: a finite continuous-time Markov chain or
/// an Ornstein-Uhlenbeck diffusion dY = -k (Y - m) dt + s dW on a time grid.
class TraitModel {
 public:
  enum class Kind { finite, diffusion };

  /// rates(a, b) is the jump rate a -> b; the diagonal is ignored.
  static TraitModel finite(Eigen::MatrixXd rates) {
    const auto m = rates.rows();
    if (m < 1 || rates.cols() != m) throw ConfigError("trait rate matrix must be square and non-empty");
    TraitModel t;
    t.kind_ = Kind::finite;
    for (Eigen::Index a = 0; a < m; ++a) {
      rates(a, a) = 0.0;
      for (Eigen::Index b = 0; b < m; ++b)
        if (!(rates(a, b) >= 0.0)) throw ConfigError("trait rates must be >= 0");
    }
    t.rates_ = rates;
    t.out_.resize(static_cast<std::size_t>(m));
    for (Eigen::Index a = 0; a < m; ++a) {
      t.out_[static_cast<std::size_t>(a)] = rates.row(a).sum();
      t.max_out_ = std::max(t.max_out_, t.out_[static_cast<std::size_t>(a)]);
    }
    t.stationary_ = solve_stationary(rates);
    return t;
  }

  static TraitModel diffusion(double reversion, double mean, double sigma, double grid_dt) {
    if (!(reversion > 0.0) || !(sigma >= 0.0) || !(grid_dt > 0.0))
      throw ConfigError("diffusion trait needs reversion > 0, sigma >= 0, grid_dt > 0");
    TraitModel t;
    t.kind_ = Kind::diffusion;
    t.reversion_ = reversion;
    t.mean_ = mean;
    t.sigma_ = sigma;
    t.grid_dt_ = grid_dt;
    return t;
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite; }
  std::size_t num_states() const { return out_.size(); }
  double out_rate(std::size_t s) const { return out_[s]; }
  double max_out_rate() const { return max_out_; }
  double rate(std::size_t a, std::size_t b) const {
    return rates_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  const std::vector<double>& stationary() const { return stationary_; }
  double grid_dt() const { return grid_dt_; }

  /// Target of a jump out of s (requires out_rate(s) > 0).
  std::size_t sample_jump_target(std::size_t s, Rng& rng) const {
    double u = uniform_open(rng) * out_[s];
    const std::size_t m = num_states();
    std::size_t last = s;
    for (std::size_t b = 0; b < m; ++b) {
      if (b == s) continue;
      const double r = rate(s, b);
      if (r <= 0.0) continue;
      last = b;
      if (u < r) return b;
      u -= r;
    }
    return last;
  }

  /// One Euler-Maruyama step of length h (fast time).
  double euler_step(double x, double h, Rng& rng) const {
    return x - reversion_ * (x - mean_) * h + sigma_ * std::sqrt(h) * standard_normal(rng);
  }

  double stationary_sd() const { return sigma_ / std::sqrt(2.0 * reversion_); }

  /// chi(g): integral of g against the stationary law. For diffusions the
  /// Gaussian integral is computed on a fine grid.
  double stationary_mean(const TraitFunction& g) const {
    if (is_finite()) {
      double acc = 0.0;
      for (std::size_t s = 0; s < stationary_.size(); ++s) acc += stationary_[s] * g(static_cast<double>(s));
      return acc;
    }
    const auto grid = gaussian_grid();
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) acc += grid.weights[k] * g(grid.nodes[k]);
    return acc;
  }

  double sample_stationary(Rng& rng) const {
    if (is_finite()) return static_cast<double>(sample_discrete(stationary_, rng));
    return mean_ + stationary_sd() * standard_normal(rng);
  }

  /// Sampler of chi(dy) g(y) / chi(g). For diffusions the grid measure is
  /// sampled with uniform jitter inside the chosen cell.
  std::function<double(Rng&)> biased_sampler(const TraitFunction& g) const {
    if (is_finite()) {
      std::vector<double> w(stationary_.size());
      for (std::size_t s = 0; s < w.size(); ++s) w[s] = stationary_[s] * g(static_cast<double>(s));
      if (!(sum(w) > 0.0)) throw PreconditionError("biased trait law requires chi(g) > 0");
      return [w = std::move(w)](Rng& rng) { return static_cast<double>(sample_discrete(w, rng)); };
    }
    const auto grid = gaussian_grid();
    std::vector<double> w(grid.nodes.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = grid.weights[k] * g(grid.nodes[k]);
    if (!(sum(w) > 0.0)) throw PreconditionError("biased trait law requires chi(g) > 0");
    const double h = grid.nodes[1] - grid.nodes[0];
    return [w = std::move(w), nodes = grid.nodes, h](Rng& rng) {
      const std::size_t k = sample_discrete(w, rng);
      return nodes[k] + (uniform_open(rng) - 0.5) * h;
    };
  }

  static std::size_t sample_discrete(const std::vector<double>& w, Rng& rng) {
    double u = uniform_open(rng) * sum(w);
    std::size_t last = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] <= 0.0) continue;
      last = k;
      if (u < w[k]) return k;
      u -= w[k];
    }
    return last;
  }

 private:
  struct Grid {
    std::vector<double> nodes;
    std::vector<double> weights;
  };

  static double sum(const std::vector<double>& w) {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
  }

  Grid gaussian_grid() const {
    constexpr int kHalf = 2000;
    constexpr double kSpan = 8.0;
    Grid g;
    const double sd = stationary_sd();
    double total = 0.0;
    for (int k = -kHalf; k <= kHalf; ++k) {
      const double z = kSpan * k / kHalf;
      g.nodes.push_back(mean_ + sd * z);
      g.weights.push_back(std::exp(-0.5 * z * z));
      total += g.weights.back();
    }
    for (double& w : g.weights) w /= total;
    return g;
  }

  static std::vector<double> solve_stationary(const Eigen::MatrixXd& rates) {
    const auto m = rates.rows();
    Eigen::MatrixXd gen = rates;
    for (Eigen::Index a = 0; a < m; ++a) gen(a, a) = -rates.row(a).sum();
    // pi^T Q = 0 with sum(pi) = 1: replace one balance equation by normalization
    Eigen::MatrixXd lhs = gen.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    lhs.row(m - 1).setOnes();
    rhs(m - 1) = 1.0;
    Eigen::VectorXd pi = lhs.fullPivLu().solve(rhs);
    std::vector<double> out(static_cast<std::size_t>(m));
    for (Eigen::Index a = 0; a < m; ++a) out[static_cast<std::size_t>(a)] = std::max(0.0, pi(a));
    return out;
  }

  Kind kind_ = Kind::finite;
  Eigen::MatrixXd rates_;
  std::vector<double> out_;
  double max_out_ = 0.0;
  std::vector<double> stationary_;
  double reversion_ = 1.0;
  double mean_ = 0.0;
  double sigma_ = 0.0;
  double grid_dt_ = 0.01;
};

}  // namespace slowfast
