#pragma once

// Shared test helpers: event builders, partition scoring, scratch directories.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "alarmgraph/ingest.hpp"

namespace testsupport {

inline alarmgraph::AlarmEvent ev(const std::string& tag, std::int64_t t) {
  alarmgraph::AlarmEvent e;
  e.tag = tag;
  e.triggered_at = t;
  return e;
}

inline alarmgraph::AlarmLog log_of(std::vector<std::pair<std::string, std::int64_t>> items) {
  alarmgraph::AlarmLog log;
  for (auto& [tag, t] : items) log.events.push_back(ev(tag, t));
  return log;
}

/// Chance-corrected agreement between two partitions of the same items.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, long long> joint;
  std::map<int, long long> ca, cb;
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[{a[i], b[i]}];
    ++ca[a[i]];
    ++cb[b[i]];
  }
  auto choose2 = [](long long x) { return x * (x - 1) / 2; };
  double sum_joint = 0, sum_a = 0, sum_b = 0;
  for (const auto& [k, v] : joint) sum_joint += static_cast<double>(choose2(v));
  for (const auto& [k, v] : ca) sum_a += static_cast<double>(choose2(v));
  for (const auto& [k, v] : cb) sum_b += static_cast<double>(choose2(v));
  const double total = static_cast<double>(choose2(static_cast<long long>(n)));
  const double expected = sum_a * sum_b / total;
  const double max_index = (sum_a + sum_b) / 2.0;
  if (max_index == expected) return 1.0;
  return (sum_joint - expected) / (max_index - expected);
}

/// Fresh scratch directory under the system temp dir.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() /
            ("alarmgraph_test_" + name + "_" + std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

}  // namespace testsupport
