#pragma once

#include "p1pairs/io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace p1pairs {

struct SuiteConfig {
  std::uint64_t seed = 0;
  /// Reduced sample counts.
  bool quick = false;
  std::int64_t coeff_bound = 9;
  int threads = 1;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  Report report;
  double seconds = 0;

  bool pass() const { return report.ok(); }
};

inline constexpr int kCriteria = 8;

std::string criterion_title(int id);
CriterionResult run_criterion(int id, const SuiteConfig& cfg);
std::vector<CriterionResult> run_suites(const SuiteConfig& cfg, const std::vector<int>& ids);

/// Deterministic: timings are left out.
Json suites_to_json(const SuiteConfig& cfg, const std::vector<CriterionResult>& results);

/// Criteria run by `selftest --level quick|full`.
std::vector<int> selftest_ids(bool quick);

/// Thread cap from P1PAIRS_THREADS, defaulting to 1.
int threads_from_env();

}  // namespace p1pairs
