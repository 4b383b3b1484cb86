#pragma once

// Acceptance criteria 1-9 as reusable checks for the acceptance binary and report-all.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace beamsym::checks {

using Json = nlohmann::ordered_json;

// Pinned tolerances and budgets.
inline constexpr double kResidualTolerance = 1e-9;    // criterion 4, numeric residual
inline constexpr int kResidualPoints = 1000;          // criterion 4
inline constexpr double kDivergenceTolerance = 1e-8;  // criterion 8
inline constexpr int kDivergenceGrid = 64;            // criterion 8
inline constexpr double kOrderTarget = 2.0;           // criterion 9
inline constexpr double kOrderTolerance = 0.3;        // criterion 9
inline constexpr double kPhaseTolerance = 0.01;       // criterion 9, relative
inline constexpr int kSeriesOrder = 8;                // criterion 6
inline constexpr double kBudgetSymmetries = 30;       // seconds, criterion 1
inline constexpr double kBudgetPainleve = 60;         // seconds, criterion 6
inline constexpr double kBudgetLadder = 120;          // seconds, criterion 9

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;
  Json details = Json::object();
  double seconds = 0;  // wall time; not part of to_json()

  Json to_json() const;
};

/// Runs one criterion. Exceptions are reported as failures.
CriterionResult run_criterion(int id, std::uint64_t seed = 1);

/// Criteria 1-9, run concurrently and returned in order.
std::vector<CriterionResult> run_all(std::uint64_t seed = 1);

/// Wall-time budget of a criterion in seconds, 0 when none applies.
double time_budget(int id);

}  // namespace beamsym::checks
