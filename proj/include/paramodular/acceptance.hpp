#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paramodular/json_io.hpp"

namespace paramodular {

struct AcceptanceConfig {
  bool quick = false;  // smaller sample counts, same tolerances
  std::uint64_t seed = 20241016;
  std::vector<int> only;  // empty: all criteria
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  double seconds = 0;
  Json detail;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& config);
Json to_json(const AcceptanceConfig& config);
Json to_json(const CriterionResult& result);

}  // namespace paramodular
