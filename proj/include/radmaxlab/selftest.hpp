#pragma once

#include <string>
#include <vector>

#include "radmaxlab/report.hpp"

namespace radmaxlab::harness {

struct IdentityCheck {
  std::string name;
  double value = 0.0;      // measured defect
  double tolerance = 0.0;
  bool pass = false;
};

/// Every exact identity of the library, each on a small fuzzed instance.
std::vector<IdentityCheck> identity_checks(std::uint64_t seed);

/// Table "identities"; the report fails when any check fails.
Report run_selftest(const ExperimentConfig& cfg);

}  // namespace radmaxlab::harness
