#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nalb {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const CheckResult& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

// Exact-identity and dominance checks: regret-decomposition residual,
// elliptical potential chain and count, secondary-estimator closed form,
// posterior-norm cap, radius dominance. Fast (seconds).
VerifyReport verify_identities(std::uint64_t seed);

// Monte Carlo coverage of both confidence-set families.
struct CoverageResult {
  long traces = 0;
  long semi_hits = 0;
  long full_hits = 0;
  double semi_rate() const { return traces ? double(semi_hits) / traces : 0; }
  double full_rate() const { return traces ? double(full_hits) / traces : 0; }
};

CoverageResult verify_coverage(std::uint64_t seed, long traces = 500);

// Everything, coverage included; prints one line per check to stdout when
// verbose. The CLI maps a failed report to exit code 2.
VerifyReport verify_suite(std::uint64_t seed, bool verbose);

}  // namespace nalb
