#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace slowfast {

/// Empirical law of a real-valued statistic (sorted samples, +inf allowed
/// for censored values) or of a categorical one (count table).
struct EmpiricalLaw {
  std::vector<double> samples;
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t size = 0;
  // provenance
  std::string model;
  std::uint64_t n = 0;
  std::string functional;

  static EmpiricalLaw real(std::vector<double> xs) {
    EmpiricalLaw law;
    std::sort(xs.begin(), xs.end());
    law.size = xs.size();
    law.samples = std::move(xs);
    return law;
  }

  static EmpiricalLaw categorical(const std::vector<std::string>& keys) {
    EmpiricalLaw law;
    for (const auto& k : keys) law.add(k);
    return law;
  }

  void add(const std::string& key, std::uint64_t count = 1) {
    counts[key] += count;
    size += count;
  }

  /// Associative, commutative merge of two laws of the same kind.
  void merge(const EmpiricalLaw& other) {
    for (const auto& [k, c] : other.counts) counts[k] += c;
    if (!other.samples.empty()) {
      std::vector<double> merged;
      merged.reserve(samples.size() + other.samples.size());
      std::merge(samples.begin(), samples.end(), other.samples.begin(), other.samples.end(), std::back_inserter(merged));
      samples = std::move(merged);
    }
    size += other.size;
  }

  double probability(const std::string& key) const {
    const auto it = counts.find(key);
    return it == counts.end() || size == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(size);
  }
};

}  // namespace slowfast
