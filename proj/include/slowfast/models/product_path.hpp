#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "slowfast/core/spec.hpp"
#include "slowfast/models/trait.hpp"

namespace slowfast {

/// Independent copies of one trait process, stored at selected coordinates of
/// the point. The rate along the path is b = sum_k g_k(x_k) over the evolving
/// coordinates; other coordinates are frozen.
struct ProductLayout {
  std::vector<std::size_t> coords;           // point coordinates that evolve
  std::vector<std::vector<double>> tables;   // finite traits: g tables by state
  std::vector<std::uint32_t> table_of;       // per evolving coordinate
  std::vector<TraitFunction> functions;      // diffusion traits: g by function id
};

/// Finite traits. One coordinate: exact holding times. Several coordinates:
/// uniformization at rate m * q_max, a uniformly chosen coordinate proposes a
/// move that is accepted with probability q_out / q_max (otherwise a self-loop).
class FiniteProductPath final : public FastPath {
 public:
  FiniteProductPath(State start, ProductLayout layout, const TraitModel& trait, Rng& rng)
      : state_(std::move(start)), layout_(std::move(layout)), trait_(trait), rng_(rng) {
    recompute_rate();
  }

  const State& state() const override { return state_; }

  Segment peek() override {
    if (!pending_) draw();
    return Segment::constant(left_, rate_);
  }

  void advance(double dt) override {
    if (!pending_) draw();
    left_ -= dt;
    if (left_ <= 0.0) left_ = std::numeric_limits<double>::min();
  }

  void finish_segment() override {
    if (!pending_) draw();
    pending_ = false;
    if (target_coord_ == kNone) return;
    double& x = state_.point[layout_.coords[target_coord_]];
    const auto& table = layout_.tables[layout_.table_of[target_coord_]];
    rate_ += table[target_state_] - table[static_cast<std::size_t>(x)];
    x = static_cast<double>(target_state_);
    if (++updates_ % 64 == 0 || rate_ < 0.0) recompute_rate();
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  void recompute_rate() {
    double b = 0.0;
    for (std::size_t k = 0; k < layout_.coords.size(); ++k)
      b += layout_.tables[layout_.table_of[k]][static_cast<std::size_t>(state_.point[layout_.coords[k]])];
    rate_ = b;
  }

  void draw() {
    pending_ = true;
    target_coord_ = kNone;
    const std::size_t m = layout_.coords.size();
    if (m == 0) {
      left_ = std::numeric_limits<double>::infinity();
      return;
    }
    if (m == 1) {
      const auto s = static_cast<std::size_t>(state_.point[layout_.coords[0]]);
      const double q = trait_.out_rate(s);
      left_ = exponential(rng_, q);
      if (q > 0.0) {
        target_coord_ = 0;
        target_state_ = trait_.sample_jump_target(s, rng_);
      }
      return;
    }
    const double qmax = trait_.max_out_rate();
    left_ = exponential(rng_, qmax * static_cast<double>(m));
    if (!(qmax > 0.0)) return;
    const std::size_t k = uniform_index(rng_, m);
    const auto s = static_cast<std::size_t>(state_.point[layout_.coords[k]]);
    const double q = trait_.out_rate(s);
    if (q < qmax && uniform_open(rng_) * qmax >= q) return;  // self-loop
    target_coord_ = k;
    target_state_ = trait_.sample_jump_target(s, rng_);
  }

  State state_;
  ProductLayout layout_;
  const TraitModel& trait_;
  Rng& rng_;
  double rate_ = 0.0;
  bool pending_ = false;
  double left_ = 0.0;
  std::size_t target_coord_ = kNone;
  std::size_t target_state_ = 0;
  std::uint64_t updates_ = 0;
};

/// Diffusion traits on a grid of step trait.grid_dt(): each segment is one
/// Euler-Maruyama step of all evolving coordinates, with b interpolated
/// linearly between the grid points.
class DiffusionProductPath final : public FastPath {
 public:
  DiffusionProductPath(State start, ProductLayout layout, const TraitModel& trait, Rng& rng)
      : state_(std::move(start)), layout_(std::move(layout)), trait_(trait), rng_(rng) {
    rate_ = rate_of(state_.point);
  }

  const State& state() const override { return state_; }

  Segment peek() override {
    if (layout_.coords.empty()) return Segment::constant(std::numeric_limits<double>::infinity(), rate_);
    if (!pending_) draw();
    return Segment::linear(left_, rate_, next_rate_);
  }

  void advance(double dt) override {
    if (layout_.coords.empty()) return;
    if (!pending_) draw();
    const double f = std::min(1.0, dt / left_);
    for (std::size_t k = 0; k < layout_.coords.size(); ++k) {
      double& x = state_.point[layout_.coords[k]];
      x += f * (next_[k] - x);
    }
    left_ -= dt;
    if (left_ <= 0.0) left_ = std::numeric_limits<double>::min();
    rate_ = rate_of(state_.point);
  }

  void finish_segment() override {
    if (layout_.coords.empty()) return;
    if (!pending_) draw();
    for (std::size_t k = 0; k < layout_.coords.size(); ++k) state_.point[layout_.coords[k]] = next_[k];
    rate_ = next_rate_;
    pending_ = false;
  }

 private:
  double rate_of(const std::vector<double>& point) const {
    double b = 0.0;
    for (std::size_t k = 0; k < layout_.coords.size(); ++k)
      b += layout_.functions[layout_.table_of[k]](point[layout_.coords[k]]);
    return b;
  }

  void draw() {
    pending_ = true;
    left_ = trait_.grid_dt();
    next_.resize(layout_.coords.size());
    std::vector<double> probe = state_.point;
    for (std::size_t k = 0; k < layout_.coords.size(); ++k) {
      next_[k] = trait_.euler_step(state_.point[layout_.coords[k]], left_, rng_);
      probe[layout_.coords[k]] = next_[k];
    }
    next_rate_ = rate_of(probe);
  }

  State state_;
  ProductLayout layout_;
  const TraitModel& trait_;
  Rng& rng_;
  double rate_ = 0.0;
  double next_rate_ = 0.0;
  bool pending_ = false;
  double left_ = 0.0;
  std::vector<double> next_;
};

inline std::unique_ptr<FastPath> make_product_path(State start, ProductLayout layout, const TraitModel& trait,
                                                   Rng& rng) {
  if (trait.is_finite()) return std::make_unique<FiniteProductPath>(std::move(start), std::move(layout), trait, rng);
  return std::make_unique<DiffusionProductPath>(std::move(start), std::move(layout), trait, rng);
}

}  // namespace slowfast
