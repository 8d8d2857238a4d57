#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "slowfast/core/error.hpp"
#include "slowfast/stats/empirical.hpp"
#include "slowfast/stats/report.hpp"

namespace slowfast {

/// Asymptotic Kolmogorov critical constant c(alpha) = sqrt(-ln(alpha/2) / 2).
inline double ks_constant(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }
inline double ks_critical(double alpha, std::uint64_t n) { return ks_constant(alpha) / std::sqrt(static_cast<double>(n)); }
inline double ks_critical(double alpha, std::uint64_t n, std::uint64_t m) {
  const double N = static_cast<double>(n);
  const double M = static_cast<double>(m);
  return ks_constant(alpha) * std::sqrt((N + M) / (N * M));
}

/// sup_t |F_N(t) - F(t)| over [0, horizon], where samples beyond the horizon
/// (or +inf) form a censored atom compared against 1 - F(horizon).
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                          double horizon = std::numeric_limits<double>::infinity()) {
  if (samples.empty()) throw PreconditionError("KS test on an empty sample");
  std::sort(samples.begin(), samples.end());
  const double N = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t k = 0;
  for (; k < samples.size() && samples[k] <= horizon && std::isfinite(samples[k]); ++k) {
    const double f = cdf(samples[k]);
    d = std::max({d, (static_cast<double>(k) + 1.0) / N - f, f - static_cast<double>(k) / N});
  }
  const double f_h = cdf(horizon);  // F(+inf) < 1 for a defective law (zero rate)
  d = std::max(d, std::abs(static_cast<double>(k) / N - f_h));
  return d;
}

inline TestReport ks_against_cdf(const std::vector<double>& samples, const std::function<double(double)>& cdf,
                                 double alpha = 0.01, double horizon = std::numeric_limits<double>::infinity()) {
  const double d = ks_distance(samples, cdf, horizon);
  TestReport r = TestReport::make("ks-against-cdf", "KS", d, ks_critical(alpha, samples.size()));
  r.sample_sizes = {samples.size()};
  if (samples.size() < 100) r.notes.emplace_back("fewer than 100 samples: asymptotic critical value unreliable");
  return r;
}

/// Two-sample KS distance; +inf values are compared as a common top atom.
inline double ks_two_sample_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("two-sample KS test on an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline TestReport ks_two_sample(const std::vector<double>& a, const std::vector<double>& b, double alpha = 0.01) {
  TestReport r = TestReport::make("ks-two-sample", "two-sample KS", ks_two_sample_distance(a, b),
                                  ks_critical(alpha, a.size(), b.size()));
  r.sample_sizes = {a.size(), b.size()};
  return r;
}

/// 1/2 sum |p - q| over the union of categories. With merge_unseen,
/// categories observed in only one of the laws are pooled into one "other"
/// bucket first.
inline double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b, bool merge_unseen = false) {
  if (a.size == 0 || b.size == 0) throw PreconditionError("TV distance with an empty law");
  std::set<std::string> keys;
  for (const auto& [k, c] : a.counts) keys.insert(k);
  for (const auto& [k, c] : b.counts) keys.insert(k);
  double sum = 0.0, other_a = 0.0, other_b = 0.0;
  for (const auto& k : keys) {
    const double p = a.probability(k);
    const double q = b.probability(k);
    if (merge_unseen && (p == 0.0 || q == 0.0)) {
      other_a += p;
      other_b += q;
      continue;
    }
    sum += std::abs(p - q);
  }
  return 0.5 * (sum + std::abs(other_a - other_b));
}

/// TV against an exact law given as category probabilities.
inline double tv_distance(const EmpiricalLaw& a, const std::map<std::string, double>& exact) {
  if (a.size == 0) throw PreconditionError("TV distance with an empty law");
  std::set<std::string> keys;
  for (const auto& [k, c] : a.counts) keys.insert(k);
  for (const auto& [k, p] : exact) keys.insert(k);
  double sum = 0.0;
  for (const auto& k : keys) {
    const auto it = exact.find(k);
    sum += std::abs(a.probability(k) - (it == exact.end() ? 0.0 : it->second));
  }
  return 0.5 * sum;
}

inline constexpr double kZ99 = 2.5758293035489004;

struct BinomialInterval {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 1.0;

  bool contains(double p) const { return lower <= p && p <= upper; }
  double distance_to(double p) const { return p < lower ? lower - p : (p > upper ? p - upper : 0.0); }
};

/// Wilson score interval (99% by default).
inline BinomialInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ99) {
  if (trials == 0) throw PreconditionError("binomial interval with zero trials");
  if (successes > trials) throw PreconditionError("more successes than trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {successes, trials, p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// Edges of `bins` equal-mass bins of the finite values in `pooled`.
inline std::vector<double> quantile_edges(std::vector<double> pooled, std::size_t bins) {
  pooled.erase(std::remove_if(pooled.begin(), pooled.end(), [](double x) { return !std::isfinite(x); }), pooled.end());
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> edges;
  if (pooled.empty() || bins < 2) return edges;
  for (std::size_t k = 1; k < bins; ++k) edges.push_back(pooled[k * pooled.size() / bins]);
  return edges;
}

/// Bin label of x given interior edges; +inf gets its own label.
inline std::string bin_label(double x, const std::vector<double>& edges) {
  if (!std::isfinite(x)) return "inf";
  return std::to_string(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

}  // namespace slowfast
