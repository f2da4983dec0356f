// Acceptance suite: one line per criterion, backed by the library's
// invariant checks.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "linkeng/validate.hpp"

using namespace linkeng;

namespace {

void report(int n, const CheckResult& r) {
  std::printf("CRITERION %d: %s  (%s, %.1f s: %s)\n", n,
              r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
              r.detail.c_str());
  std::fflush(stdout);
  CAPTURE(r.name);
  CAPTURE(r.detail);
  CHECK(r.pass);
}

}  // namespace

TEST_CASE("acceptance criteria 1-7") {
  report(1, check_borromean_reproduction());
  report(2, check_lk_three_way_agreement());
  report(3, check_lift_independence());
  report(4, check_solver_brute_force());
  report(5, check_ad_finite_differences());
  report(6, check_invariance_suite());
  report(7, check_degenerate_handling());
}
