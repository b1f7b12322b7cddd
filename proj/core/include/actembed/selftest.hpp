#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace actembed {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestOptions {
  bool full = false;          ///< larger sample counts and grids
  bool inject_fault = false;  ///< test fixture: plants a sign error so the
                              ///< reporting path can be exercised
  int threads = 1;
  std::uint64_t seed = 0x5eed;
};

/// Runs the kernel identity suite, oracle cross-checks on the catalog
/// instances and the ordering/endpoint properties. Failures are report
/// content, not exceptions.
std::vector<CheckResult> run_selftest(const SelftestOptions& options);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace actembed
