#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qcorr::selftest {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Dense-matrix micro-oracle suite: every statevector operation on small
// layouts is checked against an explicitly constructed unitary (or, for the
// non-unitary readouts, against brute-force summation), plus kernel
// backend equivalence and determinism checks. Independent of the engine's
// own update paths; shares only the documented basis-index convention.
std::vector<CheckResult> run_all(std::uint64_t seed = 0);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace qcorr::selftest
