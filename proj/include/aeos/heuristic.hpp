#pragma once

#include <string>
#include <vector>

#include "aeos/domain.hpp"
#include "aeos/solver.hpp"

// Window-pruning heuristic and a chronological-greedy baseline.
//
// The heuristic reduces the model size before the exact solve: windows that
// crowd together on one satellite (gaps smaller than the worst-case slew
// time) form clusters; each cluster keeps at most lambda members, preferring
// high task priority, then tasks with few remaining opportunities, then roll
// angles close to the cluster's already-retained average. A task is never
// stripped of its last window. The pruned model is then solved exactly.

namespace aeos {

// Worst-case time to slew between any two admissible attitudes and be ready
// to image again: (2*roll_limit + 2*pitch_limit) / slew_rate.
double max_slew_time(const Satellite& s);

struct Cluster {
  std::string sat;
  std::vector<int> members;  // indices into inst.otws, sorted by t_open
};

// Chains same-satellite windows (sorted by open time) whenever the gap from
// the group's latest close to the next open is below max_slew_time; groups
// of a single window are dropped. Deterministic.
std::vector<Cluster> cluster_windows(const Instance& inst);

// Smallest retention bound worth trying: average window length divided by
// (average processing time + average stabilization time), rounded up.
// Throws std::invalid_argument when a count or the denominator is zero.
int lambda_lower_bound(const Instance& inst);

struct PruneResult {
  std::vector<char> otw_retained;  // parallel to inst.otws
  PruneSummary summary;
};

// Trims every cluster to at most `lambda` windows. Members are ranked by
// (priority desc, remaining opportunities asc, |roll - running mean of the
// already-ranked members' rolls| asc, window identity); the worst-ranked
// removable member leaves first, opportunity counts are refreshed after
// every removal, and a member whose task has no other retained window is
// not removable. At most one removal per window overall (budget guard).
PruneResult prune_clusters(const Instance& inst, int lambda);

// prune_clusters + exact solve of the reduced model. The report carries the
// pruning statistics; objective/bound/gap refer to the reduced model.
SolveReport solve_heuristic(const Instance& inst, int lambda,
                            const BnbLimits& limits = {});

// Chronological greedy baseline: walks windows by open time, commits each
// task at the earliest start satisfying the same (conservatively padded)
// rules the model enforces, fills download windows in order, and drains
// whatever data is on board at each session start. Stereo tasks commit only
// when both components fit. Deterministic; never beats the exact solve.
SolveReport solve_fifo(const Instance& inst);

}  // namespace aeos
