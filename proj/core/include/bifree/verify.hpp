#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bifree/opalgebra.hpp"

namespace bifree {

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  int trials = 200;  // randomized cases per property
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 12;

// Criteria 1..11; 12 is the wall-clock budget over the others and only makes sense in run_acceptance.
CriterionResult run_criterion(int id, const VerifyOptions& opts = {});
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts = {},
                                            const std::function<void(const CriterionResult&)>& on_result = nullptr);

// Random inputs shared with tests.
BElement random_belement(std::mt19937_64& rng, int d);
CPMap random_cp_map(std::mt19937_64& rng, int d, int kraus = 2);

}  // namespace bifree
