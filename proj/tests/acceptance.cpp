// Runs the ten numbered criteria and prints one line per criterion.
// Exit status is 0 only when every criterion passes.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "dyadlab/suite.hpp"

int main(int argc, char** argv) {
  dyadlab::SuiteOptions opts;
  if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);
  int failed = 0;
  int index = 0;
  for (const auto& check : dyadlab::criteria_checks()) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = dyadlab::run_checks({check}, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& r = rows.front();
    if (!r.pass) ++failed;
    std::printf("[%2d] %-4s %-26s measured=%-14.8g bound=%-12.8g %7.2fs  %s | witness: %s\n", index,
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.measured, r.bound, secs, r.detail.c_str(),
                r.witness.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
