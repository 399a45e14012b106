// One line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "supbridge/verify.hpp"

using namespace supbridge;

namespace {

struct Criterion {
  int id;
  const char* title;
  const char* suite;
  std::size_t grid;
  double budget;  // seconds
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "eta baselines", "eta", 20000, 1},
      {2, "boundary of N", "lemma5", 20000, 5},
      {3, "eta_+ classifier", "lemma6", 20000, 10},
      {4, "braided subarcs and flat band", "prop7", 20000, 60},
      {5, "linear invariance", "invariance", 20000, 30},
      {6, "straightening", "straighten", 20000, 30},
      {7, "torus polygons", "torus", 20000, 60},
      {8, "polygonal sum bound", "thm2-case2", 100000, 120},
      {9, "braided sum bound", "thm1", 100000, 120},
      {10, "nine-gon", "nine-gon", 100000, 30},
      {11, "w+- sign bound", "w-bound", 20000, 5},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    VerifyOptions o;
    o.grid = c.grid;
    SuiteResult r;
    std::string error;
    try {
      r = run_suite(c.suite, o);
    } catch (const std::exception& e) {
      r.passed = false;
      error = e.what();
    }
    const bool ok = r.passed && error.empty();
    // Budgets are laptop wall-clock figures; an overrun is reported, not failed.
    std::printf("%s criterion %d: %s (%s, M=%zu) %.2fs [budget %.0fs%s, %u thread%s]\n", ok ? "PASS" : "FAIL",
                c.id, c.title, c.suite, c.grid, r.seconds, c.budget, r.seconds > c.budget ? " EXCEEDED" : "",
                thread_count(), thread_count() == 1 ? "" : "s");
    if (!ok) {
      ++failed;
      if (!error.empty()) std::printf("    error: %s\n", error.c_str());
      for (const auto& ch : r.checks) {
        if (!ch.passed) std::printf("    failed check: %s %s\n", ch.name.c_str(), ch.detail.c_str());
      }
    }
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
