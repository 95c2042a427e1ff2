#pragma once

#include <string>
#include <vector>

namespace auctk {

// Entry point shared by the binary and the tests; argv-style arguments
// without the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args);

// The verify report: oracle checks over the swap-cost algebra, ranking-cost
// closed forms, gradient finite differences, and AUC estimator agreement.
// Lines are PASS, FAIL, or REPORT (measured value recorded, not gated).
struct VerifyOutcome {
  int failures = 0;
  std::string table;
  std::string json;
};

VerifyOutcome run_verify();

}  // namespace auctk
