#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "slowfast/core/error.hpp"
#include "slowfast/core/spec.hpp"

namespace slowfast {

struct ErgodicOptions {
  double run_length = 1e4;  // fast-clock time
  double burn_in = 0.1;     // fraction discarded at the start
  int batches = 20;
};

namespace detail {

/// Walks a fast path for opt.run_length and feeds each post-burn-in piece to
/// visit(state_at_start, h_start, h_end, t_begin, t_end, constant).
template <class Visit>
void walk_fast_path(const FastModel& model, const ErgodicOptions& opt, Rng& rng, Visit&& visit) {
  if (!(opt.run_length > 0.0)) throw ConfigError("ergodic run length must be > 0");
  if (opt.batches < 2) throw ConfigError("ergodic estimation needs at least 2 batches");
  if (opt.burn_in < 0.0 || opt.burn_in >= 1.0) throw ConfigError("burn-in fraction must be in [0, 1)");
  auto path = model.dynamics->start(model.start, rng);
  const bool constant = model.rate.segment_constant(model.start.index);
  const double burn = opt.burn_in * opt.run_length;
  double t = 0.0;
  while (t < opt.run_length) {
    const Segment seg = path->peek();
    const double end = std::min(t + seg.duration, opt.run_length);
    State before = path->state();
    if (end < t + seg.duration) {
      path->advance(end - t);
    } else {
      path->finish_segment();
    }
    const double lo = std::max(t, burn);
    if (end > lo) visit(before, path->state(), lo, end, constant);
    t = end;
  }
}

}  // namespace detail

/// Batch-means estimate of the time average of h along one long fast run.
inline ErgodicEstimate time_average(const FastModel& model, const std::function<double(const State&)>& h,
                                    const ErgodicOptions& opt, Rng& rng) {
  const double burn = opt.burn_in * opt.run_length;
  const double width = (opt.run_length - burn) / opt.batches;
  std::vector<double> batch(static_cast<std::size_t>(opt.batches), 0.0);

  detail::walk_fast_path(model, opt, rng, [&](const State& a, const State& b, double lo, double hi, bool constant) {
    const double value = constant ? h(a) : 0.5 * (h(a) + h(b));
    const std::size_t last = batch.size() - 1;
    double s = lo;
    auto k = std::min(static_cast<std::size_t>((s - burn) / width), last);
    while (s < hi) {
      const double edge = (k == last) ? hi : std::min(hi, burn + width * static_cast<double>(k + 1));
      if (edge > s) {
        batch[k] += value * (edge - s);
        s = edge;
      }
      if (k < last) ++k;
    }
  });

  double mean = 0.0;
  for (double& v : batch) {
    v /= width;
    mean += v;
  }
  mean /= static_cast<double>(batch.size());
  double ss = 0.0;
  for (double v : batch) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(batch.size() - 1));

  ErgodicEstimate est;
  est.value = mean;
  est.standard_error = sd / std::sqrt(static_cast<double>(batch.size()));
  est.run_length = opt.run_length;
  est.burn_in_fraction = opt.burn_in;
  est.batches = opt.batches;
  return est;
}

/// Occupation trace of a long fast run: visited states with weight b * dt.
struct OccupationTrace {
  std::vector<State> states;
  std::vector<double> cumulative;  // running sum of b * dt

  double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }

  /// Multinomial resample proportional to b * dt.
  const State& sample(Rng& rng) const {
    const double u = uniform_open(rng) * total();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return states[static_cast<std::size_t>(it - cumulative.begin())];
  }
};

inline OccupationTrace occupation_trace(const FastModel& model, const ErgodicOptions& opt, Rng& rng) {
  OccupationTrace trace;
  double acc = 0.0;
  detail::walk_fast_path(model, opt, rng, [&](const State& a, const State& b, double lo, double hi, bool constant) {
    const double rate = constant ? model.rate(a) : 0.5 * (model.rate(a) + model.rate(b));
    const double w = rate * (hi - lo);
    if (w <= 0.0) return;
    acc += w;
    trace.states.push_back(a);
    trace.cumulative.push_back(acc);
  });
  return trace;
}

enum class StationaryMethod { analytic, ergodic };

/// mu_i(b) and the b-biased stationary sampler for one index, either from the
/// model's closed form or from a long fast run (time average with batch-means
/// standard error, biased sampler by resampling the occupation trace).
inline StationarySummary stationary_rate(const FastModel& model, StationaryMethod method,
                                         const ErgodicOptions& opt, Rng& rng) {
  if (method == StationaryMethod::analytic) {
    if (!model.analytic) throw PreconditionError("model declares no closed-form stationary summary");
    return *model.analytic;
  }
  StationarySummary s;
  s.provenance = StationarySummary::Provenance::ergodic;
  ErgodicEstimate est = time_average(model, [&](const State& x) { return model.rate(x); }, opt, rng);
  auto trace = std::make_shared<OccupationTrace>(occupation_trace(model, opt, rng));
  s.mean_rate = est.value;
  s.estimate = est;
  if (s.mean_rate > 0.0 && trace->total() > 0.0) {
    s.biased_sampler = [trace](Rng& r) { return trace->sample(r); };
  } else {
    s.mean_rate = 0.0;
  }
  return s;
}

/// Non-fatal diagnostics for an ergodic summary.
inline std::vector<std::string> stationary_warnings(const StationarySummary& s, double expected_rate) {
  std::vector<std::string> w;
  if (s.provenance == StationarySummary::Provenance::ergodic && s.mean_rate == 0.0 && expected_rate > 0.0)
    w.emplace_back("ergodic run observed no rate mass although a positive mean rate was expected");
  return w;
}

inline State biased_stationary_sample(const StationarySummary& summary, Rng& rng) {
  if (!(summary.mean_rate > 0.0) || !summary.biased_sampler)
    throw PreconditionError("biased stationary sampling requires a positive mean rate");
  return summary.biased_sampler(rng);
}

}  // namespace slowfast
