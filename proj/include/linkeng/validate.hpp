#pragma once

#include <string>
#include <vector>

namespace linkeng {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// The full invariant suite. Each check is self-contained, deterministic for
// a fixed seed, and reports a one-line detail string.
CheckResult check_borromean_reproduction();   // demo geometry + timing
CheckResult check_lk_three_way_agreement();   // ray / regular value / gauss
CheckResult check_lift_independence();        // two separation homotopies
CheckResult check_solver_brute_force();       // dense-grid oracle
CheckResult check_ad_finite_differences();    // jacobian vs central FD
CheckResult check_invariance_suite();         // reparam / reversal / relabel
CheckResult check_degenerate_handling();      // empty pieces, tangent pair

std::vector<CheckResult> run_all_checks();

}  // namespace linkeng
