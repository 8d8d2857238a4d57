#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "slowfast/core/state.hpp"

namespace slowfast {

enum class Termination { horizon_reached, absorbed, max_jumps, index_ceiling };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::horizon_reached: return "horizon-reached";
    case Termination::absorbed: return "absorbed";
    case Termination::max_jumps: return "max-jumps-guard";
    case Termination::index_ceiling: return "index-ceiling";
  }
  return "unknown";
}

struct JumpEvent {
  double time = 0.0;       // tau_k on the slow clock
  State pre;               // X_{tau_k -}
  State post;              // X_{tau_k}, possibly absorbed
  double threshold = 0.0;  // G^{-1}(U_k)
  double hazard = 0.0;     // accumulated integral of b over (tau_{k-1}, tau_k]
};

/// One simulated trajectory: jump times, pre/post states and how it ended.
struct PathRecord {
  std::uint64_t n = 1;
  std::uint64_t replica = 0;
  std::uint64_t seed = 0;
  State start;
  std::vector<JumpEvent> jumps;
  Termination termination = Termination::horizon_reached;
  double end_time = 0.0;
  /// Full states recorded at requested observation times.
  std::vector<std::pair<double, State>> snapshots;

  Index final_index() const { return jumps.empty() ? start.index : jumps.back().post.index; }

  /// Index process at slow time t (right-continuous). Past an absorption or
  /// a max-jumps stop the cemetery index is returned.
  Index index_at(double t) const {
    if ((termination == Termination::absorbed || termination == Termination::max_jumps) && t >= end_time)
      return kCemeteryIndex;
    const auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                                     [](double v, const JumpEvent& e) { return v < e.time; });
    if (it == jumps.begin()) return start.index;
    return std::prev(it)->post.index;
  }

  /// Number of jumps with tau_k <= t.
  std::size_t jumps_before(double t) const {
    return static_cast<std::size_t>(
        std::upper_bound(jumps.begin(), jumps.end(), t,
                         [](double v, const JumpEvent& e) { return v < e.time; }) -
        jumps.begin());
  }

  double first_jump_time() const;
};

inline double PathRecord::first_jump_time() const {
  return jumps.empty() ? std::numeric_limits<double>::infinity() : jumps.front().time;
}

}  // namespace slowfast
