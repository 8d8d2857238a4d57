#pragma once

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace slowfast {

/// Outcome of one statistical check. pass <=> value <= threshold. Interval
/// checks ("CI contains p") report the distance from p to the interval, with
/// threshold 0.
struct TestReport {
  std::string name;
  std::string statistic;  // KS | two-sample KS | TV | wilson-ci | ...
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::vector<std::uint64_t> sample_sizes;
  std::uint64_t seed = 0;
  std::string model;
  std::uint64_t n = 0;
  /// Tolerance is an engineering budget rather than a sampling critical value.
  bool budgeted = false;
  std::vector<std::string> notes;
  nlohmann::json extra = nlohmann::json::object();

  static TestReport make(std::string name, std::string statistic, double value, double threshold) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = std::move(statistic);
    r.value = value;
    r.threshold = threshold;
    r.pass = value <= threshold;
    return r;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"name", name},         {"statistic", statistic}, {"value", value},
                        {"threshold", threshold}, {"pass", pass},          {"sample_sizes", sample_sizes},
                        {"seed", seed},         {"model", model},         {"n", n},
                        {"budgeted_tolerance", budgeted}, {"notes", notes}};
    if (!extra.empty()) j["extra"] = extra;
    return j;
  }
};

inline const char* kReportCsvHeader = "model,n,name,statistic,value,threshold,pass,sample_sizes,seed";

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

/// One tidy CSV row per report.
inline std::string to_csv_row(const TestReport& r) {
  std::ostringstream os;
  os.precision(10);
  std::string sizes;
  for (auto s : r.sample_sizes) sizes += (sizes.empty() ? "" : ";") + std::to_string(s);
  os << csv_escape(r.model) << ',' << r.n << ',' << csv_escape(r.name) << ',' << csv_escape(r.statistic) << ','
     << r.value << ',' << r.threshold << ',' << (r.pass ? "true" : "false") << ',' << sizes << ',' << r.seed;
  return os.str();
}

inline void write_csv(std::ostream& os, const std::vector<TestReport>& reports) {
  os << kReportCsvHeader << '\n';
  for (const auto& r : reports) os << to_csv_row(r) << '\n';
}

inline nlohmann::json to_json(const std::vector<TestReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  return arr;
}

}  // namespace slowfast
