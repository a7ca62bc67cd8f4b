#pragma once

#include <string>
#include <vector>

namespace saddlekit::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kNumCriteria = 10;

std::string criterion_name(int id);

// Runs one acceptance criterion (1..10) with its pinned thresholds.
CriterionResult run_criterion(int id);

// "PASS <id> <name> (<seconds> s): <detail>", or FAIL.
std::string format(const CriterionResult& r);

}  // namespace saddlekit::acceptance
