// Acceptance suite: one PASS/FAIL line per criterion, with wall-clock budgets.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "rrc/reproduction.hpp"

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--only P<n>]\n", argv[0]);
      return 2;
    }
  }

  rrc::SuiteSettings settings;
  int failed = 0;
  int ran = 0;
  for (const auto& c : rrc::acceptance_criteria()) {
    if (!only.empty() && c.id != only) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    rrc::CriterionResult r;
    std::string error;
    try {
      r = rrc::check_criterion(c.id, settings);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = seconds <= c.budget;
    const bool pass = error.empty() && r.passed && in_budget;
    if (!pass) ++failed;
    std::printf("%-4s %s  %s [%.3f s, budget %g s%s] %s\n", c.id.c_str(), pass ? "PASS" : "FAIL",
                c.title.c_str(), seconds, c.budget, in_budget ? "" : ", OVER BUDGET",
                error.empty() ? r.detail.c_str() : ("error: " + error).c_str());
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion named '%s'\n", only.c_str());
    return 2;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
