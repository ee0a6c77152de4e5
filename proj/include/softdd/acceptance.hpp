#pragma once

#include "softdd/pulse_shapes.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace softdd {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string tolerance;
  std::string error;  // set when the check threw
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int jobs = 0;
  std::uint64_t seed = 0;  // 0: the fig3 preset seed
  double dt = 0.0;         // 0: auto step; otherwise forced on every ODE check
  std::vector<int> only;   // empty: all criteria
  ShapeRegistry registry = ShapeRegistry::builtin();
  std::function<void(const CriterionResult&)> on_result;
};

/// Runs the acceptance criteria in order. Exceptions inside a check become a
/// failed result carrying the error text.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// "PASS  3 cumulant-traces  measured=... tolerance=... (0.42 s)".
std::string format_result(const CriterionResult& r);

/// Machine-readable report.
std::string results_json(const std::vector<CriterionResult>& results);

inline constexpr int kCriterionCount = 11;

}  // namespace softdd
