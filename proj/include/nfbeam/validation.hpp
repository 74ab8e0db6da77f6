#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nfbeam::validation {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

CheckResult check_element_counts();
CheckResult check_beamdepth_normalization();
CheckResult check_far_field_transition();
CheckResult check_beamdepth_asymptote();
CheckResult check_beamdepth_agreement();
CheckResult check_field_scaling();
CheckResult check_gain_scaling();
CheckResult check_analytic_gain();
CheckResult check_cross_polarization();
CheckResult check_onaxis_equivalence();
CheckResult check_property_suites();

/// All checks in order. A check that throws is reported as failed with the
/// exception message; exceeding the runtime budget also fails it.
std::vector<CheckResult> run_acceptance_suite();

/// "[PASS] 3 far-field transition: ... (0.01 s)"
std::string format_result(const CheckResult& result);

}  // namespace nfbeam::validation
