#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lab {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

// The ten gate checks, in order. Results are deterministic in `seed`;
// `workers` only changes the parallel layout, never the outcome.
std::vector<CriterionResult> run_acceptance(uint64_t seed, uint32_t workers);

// One aligned "criterion NN <name> PASS/FAIL <seconds> <detail>" line.
std::string format_criterion(const CriterionResult& r);

}  // namespace lab
