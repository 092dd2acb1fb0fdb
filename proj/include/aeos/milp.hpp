#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "aeos/domain.hpp"

// Mixed-integer linear model of the scheduling problem.
//
// Formulation summary (maximize total priority of scheduled tasks):
//   - selection chain per task component: window picks sum to a satellite
//     assignment, assignments sum to the task selection binary; stereo tasks
//     carry two component chains forced equal.
//   - observation start times live inside their windows (hard bounds plus
//     indicator rows), with an explicit pitch variable tied to the window's
//     linear pitch model.
//   - same-satellite observation pairs respect the transition time
//     (process + stabilization + |roll delta|/rate + |pitch delta|/rate)
//     in one of the two orders, via an ordering binary and big-M rows; the
//     |pitch delta| is bounded from below by two linear rows per direction.
//     Pairs whose windows cannot conflict are pre-filtered; pairs with a
//     forced window order get order-fixed rows without a binary.
//   - download sessions get start/end variables inside their windows, pinned
//     to the window open with zero length when inactive; same-station and
//     same-satellite session pairs respect the respective prep times.
//   - on-board buffer feasibility is enforced at discrete events: capacity at
//     every selected observation end, non-negativity (downloaded <= initial +
//     acquired) at every active session end. Completion credits that depend
//     on event order use one sequencing binary per ambiguous same-satellite
//     (observation, download) pair; downloads straddling an observation end
//     count as zero drained, observations straddling a session end count as
//     not yet acquired (both conservative).
//   - stereo pitch separation uses per-component task pitch variables linked
//     to the selected window's pitch and a side-selection binary.
//
// All solver-side separations carry the kTimePadS/kUnitsPad safety margins
// (see domain.hpp); the validator checks the unpadded constraints.

namespace aeos {

// Extra margin applied to the stereo pitch-separation requirement so that
// schedules surviving the time rounding of the canonical output format still
// meet the exact requirement.
inline constexpr double kStereoPadRad = 1e-5;

enum class VarKind { Binary, Continuous };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lb = 0.0;
  double ub = 0.0;
};

enum class RowSense { LE, GE, EQ };

struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
};

struct MilpModel {
  std::vector<Variable> vars;
  std::vector<std::pair<int, double>> objective;  // maximize
  std::vector<Constraint> rows;

  // Semantic blocks mapping variables back to instance entities. `obs` holds
  // one entry per (task, component, satellite, window) with a copy of the
  // window's timing/pitch model so schedules can be reconstructed from an
  // assignment alone.
  struct ObsVar {
    std::string task;
    int component = 1;
    std::string sat;
    int k = 0;
    double t_open = 0, t_close = 0, roll = 0, pitch_at_open = 0, pitch_slope = 0;
    double process_time = 0;
    int x = -1, t = -1, th = -1;  // variable indices
    double pitch_at(double ts) const {
      return pitch_at_open + pitch_slope * (ts - t_open);
    }
  };
  struct DlVar {
    std::string d;
    std::string sat;
    std::string station;
    int l = 0;
    double t_open = 0, t_close = 0;
    int z = -1, ta = -1, tb = -1;
  };
  struct TaskVar {
    std::string task;
    bool stereo = false;
    double weight = 0;
    int xv = -1, xvs = -1, pp1 = -1, pp2 = -1, sb = -1;
  };
  std::vector<ObsVar> obs;
  std::vector<DlVar> dls;
  std::vector<TaskVar> tasks;

  // Semantic map: variable name <-> index, plus a human-readable description
  // of what each variable encodes.
  std::unordered_map<std::string, int> var_by_name;
  std::vector<std::string> var_desc;

  int binary_count() const {
    int n = 0;
    for (const auto& v : vars) n += v.kind == VarKind::Binary;
    return n;
  }
};

// Build the model for a well-formed instance (throws std::invalid_argument
// listing defects otherwise). The masked overload keeps only observation
// windows whose position in the canonical otw array is marked true; it is
// the entry point used after window pruning.
MilpModel build_model(const Instance& inst);
MilpModel build_model(const Instance& inst, const std::vector<char>& otw_retained);

// Deterministic LP-text export/import. Variable names follow
// <kind>_<task>_<component>_<sat>_<k> (64 chars max); sections are
// MAXIMIZE / SUBJECT TO / BOUNDS / BINARY / END with 12-significant-digit
// coefficients. import_lp reconstructs the structural model (no semantic
// blocks); export_lp(import_lp(text)) == text for exported files.
std::string export_lp(const MilpModel& model);
MilpModel import_lp(const std::string& text);

// Turn a (near-)integral, row-feasible assignment into a schedule. Throws
// std::invalid_argument naming the offending variable/row when the
// assignment is fractional beyond 1e-6 or violates a row. Emitted times are
// serialization-normalized; observation pitch comes from the window model.
Schedule extract_schedule(const MilpModel& model, const std::vector<double>& assignment);

}  // namespace aeos
