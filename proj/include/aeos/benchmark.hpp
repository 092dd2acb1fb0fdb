#pragma once

// Comparison harness: runs the exact solver, the pruning heuristic at one or
// more retention bounds, and the chronological greedy baseline over a set of
// instances, and reports objective / assigned-task / timing columns relative
// to the exact solve of the same scenario.

#include <string>
#include <utility>
#include <vector>

#include "aeos/domain.hpp"
#include "aeos/solver.hpp"

namespace aeos {

struct BenchmarkRow {
  std::string scenario;
  std::string algorithm;       // "Direct MILP", "MILP-heuristic(N)", "FIFO"
  double j = 0.0;              // objective reached
  double gap = 0.0;            // relative optimality gap (0 when proven)
  int assigned_tasks = 0;      // distinct tasks in the schedule
  double rel_performance = 0;  // J as % of the scenario's Direct MILP J
  double time_s = 0.0;
  double rel_time = 0.0;       // time as % of the scenario's Direct MILP time
  int lambda_lb = 0;           // computed retention lower bound (context)
  bool failed = false;         // solver raised; row kept, run continues
  std::string note;
};

struct BenchmarkSpec {
  std::vector<int> lambdas;  // heuristic variants; empty -> lower bound only
  bool run_exact = true;
  bool run_fifo = true;
  BnbLimits limits;
  bool mask_times = false;  // deterministic output: print "-" for time columns
};

std::vector<BenchmarkRow> run_benchmark(
    const std::vector<std::pair<std::string, Instance>>& instances,
    const BenchmarkSpec& spec);

// Aligned, human-readable table.
std::string format_benchmark_text(const std::vector<BenchmarkRow>& rows,
                                  bool mask_times = false);
// Machine-readable CSV with the raw and derived columns.
std::string format_benchmark_csv(const std::vector<BenchmarkRow>& rows,
                                 bool mask_times = false);

}  // namespace aeos
