// Runs the acceptance criteria at full scale and prints one line per criterion.

#include "p1pairs/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>

using namespace p1pairs;

int main(int argc, char** argv) {
  SuiteConfig cfg;
  cfg.threads = threads_from_env();
  std::vector<int> ids;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-v") verbose = true;
    else ids.push_back(std::atoi(argv[i]));
  }
  if (ids.empty())
    for (int id = 1; id <= kCriteria; ++id) ids.push_back(id);

  const std::map<int, double> budget = {{1, 60}, {2, 120}, {3, 300}, {6, 300}};
  bool all = true;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, cfg);
    const auto b = budget.find(id);
    const bool in_time = b == budget.end() || r.seconds <= b->second;
    const bool pass = r.pass() && in_time;
    all = all && pass;
    std::printf("criterion %d: %s  %s (%.1f s)\n", id, pass ? "PASS" : "FAIL", r.title.c_str(), r.seconds);
    for (const auto& c : r.report.clauses)
      if (!c.pass || verbose)
        std::printf("    %s: %s  %s\n", c.pass ? "ok" : "failed", c.name.c_str(), c.detail.c_str());
    if (!in_time) std::printf("    over the %.0f s budget\n", b->second);
    std::fflush(stdout);
  }
  const long chi = chi_failures().load();
  if (chi != 0) {
    std::printf("Euler characteristic additivity failed %ld times during the run\n", chi);
    all = false;
  }
  return all ? 0 : 1;
}
