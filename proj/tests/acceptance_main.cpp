// One PASS/FAIL line per end-to-end criterion; nonzero exit if any fails.

#include <cstdio>

#include "henon/acceptance.hpp"

int main() {
  const henon::AcceptanceRun run = henon::run_acceptance({}, [](const henon::CheckResult& r) {
    std::printf("%s %-28s %7.1f s  %s\n", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
  });
  std::printf("%s: %zu checks\n", run.all_passed() ? "ALL PASSED" : "FAILURES", run.checks.size());
  return run.all_passed() ? 0 : 1;
}
