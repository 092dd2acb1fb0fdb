#pragma once

#include <vector>

#include "aeos/milp.hpp"

// Deterministic bounded-variable primal simplex over a MilpModel's rows
// (integrality is ignored here; branch-and-bound supplies tightened bounds).

namespace aeos {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;  // structural values, filled when status == Optimal
  int iterations = 0;
};

struct LpOptions {
  int max_iterations = 500000;
  double feas_tol = 1e-6;        // absolute feasibility tolerance on bounds
  int degenerate_switch = 5000;  // degenerate pivots before Bland's rule kicks in
  double time_limit_s = 0.0;     // wall-clock budget; 0 disables; returns IterLimit
};

// Maximize model.objective subject to model.rows and the variable bounds
// lb/ub (both sized to model.vars; they override the bounds stored in the
// model, which lets a search tree tighten binaries without copying models).
LpResult solve_lp(const MilpModel& model, const std::vector<double>& lb,
                  const std::vector<double>& ub, const LpOptions& opt = {});

}  // namespace aeos
