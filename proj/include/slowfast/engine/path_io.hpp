#pragma once

// Flat CSV of jump events and a JSON summary of an ensemble of paths. Both
// carry a version, the config hash and the root seed in their header.
//
// paths.csv (version 1):
//   # slowfast-paths v1 config_hash=<16 hex> seed=<u64> source=<prelimit|limit> n=<n>
//   replica_id,k,tau,pre_index,post_index
// one row per jump, k = 1, 2, ...; the absorbed state's index prints as "cemetery".

#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slowfast/engine/path_record.hpp"

namespace slowfast {

inline constexpr int kPathCsvVersion = 1;

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string index_label(Index i) { return i == kCemeteryIndex ? "cemetery" : std::to_string(i.value); }

struct Provenance {
  std::string config_hash;  // hex
  std::uint64_t seed = 0;
  std::string source = "prelimit";
  std::uint64_t n = 1;
};

inline void write_paths_csv(std::ostream& os, const std::vector<PathRecord>& paths, const Provenance& prov) {
  os << "# slowfast-paths v" << kPathCsvVersion << " config_hash=" << prov.config_hash << " seed=" << prov.seed
     << " source=" << prov.source << " n=" << prov.n << '\n';
  os << "replica_id,k,tau,pre_index,post_index\n";
  char tau[32];
  for (std::size_t r = 0; r < paths.size(); ++r) {
    const auto& jumps = paths[r].jumps;
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      std::snprintf(tau, sizeof tau, "%.17g", jumps[k].time);
      os << r << ',' << k + 1 << ',' << tau << ',' << index_label(jumps[k].pre.index) << ','
         << index_label(jumps[k].post.index) << '\n';
    }
  }
}

/// Termination counts and the histogram of jump counts; both are plain sums,
/// so the result does not depend on replica order.
inline nlohmann::json summarize_paths(const std::vector<PathRecord>& paths, const Provenance& prov) {
  std::map<std::string, std::uint64_t> term = {{to_string(Termination::horizon_reached), 0},
                                               {to_string(Termination::absorbed), 0},
                                               {to_string(Termination::max_jumps), 0},
                                               {to_string(Termination::index_ceiling), 0}};
  std::map<std::size_t, std::uint64_t> hist;
  std::map<std::string, std::uint64_t> final_index;
  for (const auto& p : paths) {
    ++term[to_string(p.termination)];
    ++hist[p.jumps.size()];
    ++final_index[index_label(p.final_index())];
  }
  nlohmann::json h = nlohmann::json::object();
  for (const auto& [k, c] : hist) h[std::to_string(k)] = c;
  return {{"version", kPathCsvVersion}, {"config_hash", prov.config_hash}, {"seed", prov.seed},
          {"source", prov.source},      {"n", prov.n},                     {"replicas", paths.size()},
          {"termination_counts", term}, {"jump_count_histogram", h},       {"final_index_counts", final_index}};
}

}  // namespace slowfast
