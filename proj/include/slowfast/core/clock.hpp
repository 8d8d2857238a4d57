#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "slowfast/core/error.hpp"

namespace slowfast {

/// Jump clock G: the jump fires once the accumulated hazard reaches G^{-1}(U).
///
/// The clock is stored through its CDF and generalized inverse
/// G^{-1}(u) = inf{x >= 0 : G(x) >= u}, which is +inf when u exceeds sup G.
/// Three families are supported: the exponential clock 1 - e^{-x}, the
/// uniform clock min(x, 1), and a piecewise-linear CDF through user knots.
class JumpClock {
 public:
  enum class Kind { exponential, uniform, table };

  static JumpClock exponential() { return JumpClock{Kind::exponential, {}, {}}; }
  static JumpClock uniform() { return JumpClock{Kind::uniform, {}, {}}; }

  /// Piecewise-linear CDF through (x_k, G_k). Knots must start at (0, 0), have
  /// strictly increasing x, non-decreasing G within [0, 1]. G stays at its last
  /// value beyond the final knot (a defective clock if that value is < 1).
  static JumpClock table(std::vector<double> xs, std::vector<double> gs) {
    if (xs.size() != gs.size() || xs.size() < 2)
      throw ConfigError("clock table needs at least two (x, G) knots of equal length");
    if (xs.front() != 0.0 || gs.front() != 0.0)
      throw ConfigError("clock table must start at (0, 0)");
    for (std::size_t k = 1; k < xs.size(); ++k) {
      if (!(xs[k] > xs[k - 1])) throw ConfigError("clock table x values must be strictly increasing");
      if (gs[k] < gs[k - 1]) throw ConfigError("clock table is not monotone (G decreases)");
      if (gs[k] > 1.0) throw ConfigError("clock table G values must lie in [0, 1]");
    }
    return JumpClock{Kind::table, std::move(xs), std::move(gs)};
  }

  Kind kind() const { return kind_; }
  const std::vector<double>& knots_x() const { return xs_; }
  const std::vector<double>& knots_g() const { return gs_; }

  std::string name() const {
    switch (kind_) {
      case Kind::exponential: return "exponential";
      case Kind::uniform: return "uniform";
      case Kind::table: return "table";
    }
    return "unknown";
  }

  double cdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    switch (kind_) {
      case Kind::exponential: return -std::expm1(-x);
      case Kind::uniform: return std::min(x, 1.0);
      case Kind::table: {
        if (x >= xs_.back()) return gs_.back();
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - xs_.begin());
        const double w = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
        return gs_[k - 1] + w * (gs_[k] - gs_[k - 1]);
      }
    }
    return 0.0;
  }

  /// Threshold G^{-1}(u) for u in (0, 1).
  double threshold(double u) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!(u > 0.0)) return 0.0;
    switch (kind_) {
      case Kind::exponential: return u >= 1.0 ? inf : -std::log1p(-u);
      case Kind::uniform: return u > 1.0 ? inf : u;
      case Kind::table: {
        if (u > gs_.back()) return inf;
        // first knot with G_k >= u; flat stretches resolve to their left end
        const auto it = std::lower_bound(gs_.begin(), gs_.end(), u);
        const std::size_t k = static_cast<std::size_t>(it - gs_.begin());
        if (k == 0) return 0.0;
        const double dg = gs_[k] - gs_[k - 1];
        const double w = (u - gs_[k - 1]) / dg;
        return xs_[k - 1] + w * (xs_[k] - xs_[k - 1]);
      }
    }
    return inf;
  }

 private:
  JumpClock(Kind kind, std::vector<double> xs, std::vector<double> gs)
      : kind_(kind), xs_(std::move(xs)), gs_(std::move(gs)) {}

  Kind kind_;
  std::vector<double> xs_;
  std::vector<double> gs_;
};

/// clock_threshold: maps a uniform draw to the hazard level at which the jump fires.
inline double clock_threshold(const JumpClock& clock, double u) {
  if (!(u > 0.0 && u < 1.0)) throw PreconditionError("clock threshold requires u in (0, 1)");
  return clock.threshold(u);
}

}  // namespace slowfast
