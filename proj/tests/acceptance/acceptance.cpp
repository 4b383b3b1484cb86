// Acceptance suite: one line per criterion, exit status 1 when any criterion fails.
// Criteria run one after another so that wall-time budgets are measured without contention.

#include "checks.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--verbose") verbose = true;
    else if (arg.rfind("--seed=", 0) == 0) seed = std::strtoull(arg.c_str() + 7, nullptr, 10);
  }
  int failures = 0;
  for (int id = 1; id <= 9; ++id) {
    auto r = beamsym::checks::run_criterion(id, seed);
    const double budget = beamsym::checks::time_budget(id);
    std::string timing;
    char buf[64];
    if (budget > 0) {
      const bool in_time = r.seconds < budget;
      std::snprintf(buf, sizeof buf, " [%.2f s, budget %.0f s%s]", r.seconds, budget, in_time ? "" : " EXCEEDED");
      if (!in_time) r.pass = false;
    } else {
      std::snprintf(buf, sizeof buf, " [%.2f s]", r.seconds);
    }
    timing = buf;
    std::printf("criterion %d: %s  %s: %s%s\n", id, r.pass ? "PASS" : "FAIL", r.title.c_str(), r.summary.c_str(),
                timing.c_str());
    if (verbose || !r.pass) std::printf("%s\n", r.details.dump(2).c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
