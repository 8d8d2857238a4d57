#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "slowfast/core/spec.hpp"

namespace slowfast {

struct Violation {
  std::string code;  // "clock-not-monotone" | "negative-rate" | "kernel-mass" | "index-leak" | "bad-segment"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

struct ValidationOptions {
  int clock_grid = 1000;
  double clock_grid_max = 50.0;
  int kernel_draws = 20;
  int probe_segments = 200;
  std::uint64_t seed = 0x5EEDULL;
};

/// Spot checks on a spec: clock monotonicity, b >= 0 at probe points,
/// consistency of the declared kernel masses, and index stability of the fast
/// generator on short probe runs. An empty report means every check passed.
inline ValidationReport validate_spec(const SemiMarkovSpec& spec, const ValidationOptions& opt = {}) {
  ValidationReport report;
  auto add = [&report](std::string code, std::string msg) {
    report.violations.push_back({std::move(code), std::move(msg)});
  };

  double prev = 0.0;
  for (int k = 0; k <= opt.clock_grid; ++k) {
    const double x = opt.clock_grid_max * k / opt.clock_grid;
    const double g = spec.clock.cdf(x);
    if (g < prev || g < 0.0 || g > 1.0) {
      add("clock-not-monotone", "clock CDF not monotone in [0,1] near x=" + std::to_string(x));
      break;
    }
    prev = g;
  }

  Rng rng{opt.seed};
  for (const State& probe : spec.probes) {
    std::ostringstream where;
    where << "probe index " << probe.index;

    const double b = spec.rate(probe);
    if (!(b >= 0.0) || !std::isfinite(b)) add("negative-rate", "negative rate at " + where.str());

    const double mass = spec.kernel.mass(probe.index);
    if (mass != 0.0 && mass != 1.0) {
      add("kernel-mass", "declared kernel mass not in {0,1} at " + where.str());
    } else if (mass == 1.0) {
      for (int d = 0; d < opt.kernel_draws; ++d) {
        if (spec.kernel.sample(probe, rng).is_absorbed()) {
          add("kernel-mass", "kernel with declared mass 1 returned the absorbed state at " + where.str());
          break;
        }
      }
    }

    if (!spec.fast) continue;
    auto path = spec.fast->start(probe, rng);
    for (int s = 0; s < opt.probe_segments; ++s) {
      const Segment seg = path->peek();
      if (!(seg.duration > 0.0) || seg.rate_begin < 0.0 || seg.rate_end < 0.0) {
        add("bad-segment", "non-positive duration or negative segment rate at " + where.str());
        break;
      }
      if (!std::isfinite(seg.duration)) break;
      path->finish_segment();
      if (path->state().index != probe.index) {
        add("index-leak", "index leak: fast path left its component space from " + where.str());
        break;
      }
    }
  }
  return report;
}

}  // namespace slowfast
