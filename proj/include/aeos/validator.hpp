#pragma once

#include <string>
#include <vector>

#include "aeos/domain.hpp"

// Independent checker of a Schedule against an Instance. Every rule is
// re-derived from the domain data here; this module must not depend on the
// model builder, so a bug in constraint emission cannot hide in validation.
//
// The buffer rules are checked on the exact piecewise-linear trajectory
// (impulse gains at observation ends, constant drain during sessions). The
// solver side discretizes the same rules conservatively at events, so every
// solver-produced schedule passes here; the reverse direction is not claimed.

namespace aeos {

enum class CheckFamily {
  Assignment,    // selection multiplicity: mono at most once, stereo both-or-neither
  ObsWindow,     // observation start inside its window
  DlWindow,      // session interval inside its window, start <= end
  ObsOverlap,    // same-satellite observation transition time respected
  GsOverlap,     // same-station session preparation time respected
  SatDlOverlap,  // same-satellite session preparation time respected
  Capacity,      // buffer never exceeds capacity
  BufferNonneg,  // buffer never goes negative
  Stereo,        // stereo pitch separation >= beta
  PitchLink,     // recorded pitch equals the window model at the start time
};

std::string to_string(CheckFamily f);

struct Finding {
  CheckFamily family = CheckFamily::Assignment;
  std::string entities;   // involved schedule/instance entities
  double measured = 0.0;  // the checked quantity
  double bound = 0.0;     // the limit it is compared against
  double margin = 0.0;    // slack; negative means violated
};

struct Verdict {
  bool pass = false;
  std::vector<Finding> findings;           // constraint violations (negative margin)
  std::vector<std::string> structural;     // unresolved references and malformed entries
};

// Checks all constraint families; tol_s is the slack below which a deficit
// counts as a violation (time seconds and buffer units share it). The pitch
// link uses its own 1e-9 rad bound.
Verdict validate_schedule(const Instance& inst, const Schedule& sch, double tol_s = 1e-6);

// Rendering helpers used by the command-line tool and the tests.
std::string report_text(const Verdict& v);
std::string report_json(const Verdict& v);

struct BufferPoint {
  double t = 0.0;
  double units = 0.0;
};

// Exact on-board buffer level over time for one satellite. Instantaneous
// gains appear as two points with the same t (before/after); the series
// starts at (0, initial units) and ends at the horizon with the carry-over.
struct BufferTrajectory {
  std::string sat;
  std::vector<BufferPoint> points;
  double carry_over = 0.0;  // level at the end of the horizon
};

BufferTrajectory buffer_trajectory(const Instance& inst, const Schedule& sch,
                                   const std::string& sat);

}  // namespace aeos
