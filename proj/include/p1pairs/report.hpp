#pragma once

#include <string>
#include <vector>

namespace p1pairs {

/// Pass/fail verdicts of named checks.
struct Report {
  struct Clause {
    std::string name;
    bool pass = false;
    std::string detail;
  };
  std::vector<Clause> clauses;

  void add(std::string name, bool pass, std::string detail = {}) {
    clauses.push_back({std::move(name), pass, std::move(detail)});
  }
  bool ok() const {
    for (const auto& c : clauses)
      if (!c.pass) return false;
    return true;
  }
  /// Verdict of the first clause with this name; false when absent.
  bool passed(const std::string& name) const {
    for (const auto& c : clauses)
      if (c.name == name) return c.pass;
    return false;
  }
  void merge(const Report& other, const std::string& prefix = {}) {
    for (const auto& c : other.clauses) clauses.push_back({prefix + c.name, c.pass, c.detail});
  }
};

}  // namespace p1pairs
