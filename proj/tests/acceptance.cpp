// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <dnls/verify.hpp>

#include <cstdio>

int main() {
  dnls::RunConfig cfg;
  int failed = 0;
  for (int k = 1; k <= 10; ++k) {
    const auto checks = dnls::run_criterion(k, cfg);
    bool pass = !checks.empty();
    for (const auto& c : checks) pass = pass && c.pass;
    std::printf("criterion %d [%s]: %s (%.2f s)\n", k, checks.empty() ? "?" : checks.front().tag.c_str(),
                pass ? "PASS" : "FAIL", checks.empty() ? 0.0 : checks.front().seconds);
    for (const auto& c : checks) {
      std::printf("    %-4s %-32s %s\n", c.pass ? "ok" : "FAIL", c.id.c_str(), c.detail.c_str());
    }
    if (!pass) ++failed;
  }
  std::printf("%d of 10 criteria pass\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
