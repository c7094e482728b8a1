#pragma once

// Solve and compare reports. The JSON document holds the numbers; the text
// rendering only formats what is already in it.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dqhelmert/problem.hpp"
#include "dqhelmert/solve_result.hpp"

namespace dqhelmert::cli {

using nlohmann::json;

inline constexpr double kClosureTolerance = 1e-8;  // [m]
inline constexpr double kCompareTolerance = 1e-6;

json SolveReport(const SolveResult& result, const Problem& problem,
                 bool full_covariance);
std::string SolveText(const json& report);

// Failed solve: error code, message and the iterations that ran.
json FailureReport(const Error& error);
std::string FailureText(const json& failure);

struct CompareEntry {
  std::string label;  // e.g. "dqa-constrained/unit"
  json report;        // SolveReport or FailureReport
  bool ok = false;
};

// Largest absolute difference over λ, the angles [deg] and t [m] between any
// two successful entries.
double MaxPairwiseDeviation(const std::vector<SolveResult>& results);

json CompareReport(const std::vector<CompareEntry>& entries, double max_deviation,
                   int successes);
std::string CompareText(const json& report);

}  // namespace dqhelmert::cli
