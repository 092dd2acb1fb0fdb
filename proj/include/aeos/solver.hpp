#pragma once

#include <vector>

#include "aeos/domain.hpp"
#include "aeos/milp.hpp"
#include "aeos/simplex.hpp"

namespace aeos {

struct BnbLimits {
  double time_limit_s = 10800.0;
  long max_nodes = 0;  // 0 = unlimited
};

struct MilpSolution {
  SolveStatus status = SolveStatus::Optimal;
  double objective = 0.0;   // best integral objective found (integer-valued)
  double dual_bound = 0.0;  // proven upper bound on the objective
  std::vector<double> x;    // incumbent assignment; empty when none was needed
  bool has_x = false;
  long nodes = 0;           // LP relaxations solved
};

// Deterministic best-bound branch-and-bound over the model's binaries.
// Candidate incumbents are re-solved with their binaries hard-fixed so the
// reported assignment sits on a clean vertex. When the objective has integer
// coefficients, node bounds are tightened to the nearest integer below.
MilpSolution solve_milp(const MilpModel& model, const BnbLimits& limits = {});

// Build the model for the instance, run branch-and-bound, and package the
// result (schedule, objective, bound, node count, wall time, status).
SolveReport solve_exact(const Instance& inst, const BnbLimits& limits = {});

struct EnumLimits {
  long max_leaves = 2000000;  // feasibility subproblems before giving up
};

struct EnumResult {
  double objective = 0.0;
  Schedule schedule;
  long leaves = 0;  // feasibility subproblems solved
};

// Exhaustive reference search: enumerates task subsets in decreasing total
// priority, and for each subset every window assignment, execution order of
// same-satellite observations, download activation set, session order, event
// order, and stereo side; each leaf is a small linear feasibility problem.
// The first feasible subset is optimal. Throws std::runtime_error when the
// instance needs more than limits.max_leaves subproblems.
EnumResult enumerate_schedules(const Instance& inst, const EnumLimits& limits = {});

}  // namespace aeos
