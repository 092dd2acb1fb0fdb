#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core problem types shared by every other module: the scheduling instance
// (satellites, ground stations, imaging tasks, time windows), schedules, and
// solver reports, plus canonical text serialization for all of them.
//
// Conventions: time is continuous seconds from the horizon start, angles are
// radians, data volume is in abstract "units". Serialized numbers carry nine
// significant digits and arrays are sorted by (id, index), so every writer
// emits canonical bytes.

namespace aeos {

// --- canonical number handling -------------------------------------------

// Format with 9 significant digits, shortest form ("86400", "0.5236").
std::string fmt9(double v);
// Snap v to the value fmt9(v) parses back to, making values serialization-
// stable. Generators apply this once at creation time.
double round9(double v);

// Soft padding added on the required-separation side of every solver-side
// feasibility check (MILP rows, FIFO incremental checks, enumeration
// oracle). Canonical 9-digit serialization perturbs times by up to ~5e-5 s
// near the end of a 24 h horizon; without the pad, solutions sitting exactly
// on a separation or capacity boundary would fail re-validation after a
// write/parse round trip. The validator itself checks the unpadded
// constraints.
inline constexpr double kTimePadS = 1e-3;
inline constexpr double kUnitsPad = 1e-3;

// --- errors ----------------------------------------------------------------

// Thrown by the file parsers. line/col are 1-based and refer to the JSON
// syntax error position; semantic errors keep line = col = 0 and describe
// the offending entity in the message.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line_ = 0, int col_ = 0)
      : std::runtime_error(msg), line(line_), col(col_) {}
  int line = 0;
  int col = 0;
};

// --- instance ---------------------------------------------------------------

struct GlobalParams {
  double horizon_s = 0.0;  // T_H
  bool operator==(const GlobalParams&) const = default;
};

struct OrbitElements {
  double semi_major_axis_km = 0.0;
  double eccentricity = 0.0;
  double inclination_rad = 0.0;
  double arg_perigee_rad = 0.0;
  double raan_rad = 0.0;
  double true_anomaly_at_epoch_rad = 0.0;
  double epoch_s = 0.0;
  bool operator==(const OrbitElements&) const = default;
};

struct Satellite {
  std::string id;
  double roll_limit_rad = 0.0;        // phi^M
  double pitch_limit_rad = 0.0;       // theta^M
  double slew_rate_rad_per_s = 0.0;   // r
  double stab_time_s = 0.0;           // attitude stabilization after a slew
  double sat_prep_time_s = 0.0;       // setup between two downloads of this sat
  double capacity_units = 1000.0;     // on-board buffer size u
  double initial_data_units = 0.0;    // buffer content at t = 0
  double acq_rate_units_per_s = 1.0;  // zeta: units gained per process second
  double down_rate_units_per_s = 0.0; // gamma: units drained per download second
  std::optional<OrbitElements> orbit; // present when windows are generated
  bool operator==(const Satellite&) const = default;
};

struct GroundStation {
  std::string id;
  double lat_rad = 0.0;
  double lon_rad = 0.0;
  double alt_km = 0.0;
  double gs_prep_time_s = 0.0;    // setup between two downloads at this station
  double min_elevation_rad = 0.0; // visibility mask
  bool operator==(const GroundStation&) const = default;
};

struct ObsTask {
  std::string id;
  int priority_w = 1;  // integer profit weight
  // Engaged for stereoscopic tasks: required pitch separation between the two
  // component observations. Mono tasks leave it empty.
  std::optional<double> stereo_beta_rad;
  double lat_rad = 0.0;
  double lon_rad = 0.0;
  // T^p per satellite id. Every satellite owning a window for this task must
  // have an entry.
  std::map<std::string, double> process_time_s;
  // Optional per-task pointing restriction alpha_v; absent means the
  // satellite limits apply unchanged.
  std::optional<double> user_angle_limit_rad;

  bool stereo() const { return stereo_beta_rad.has_value(); }
  bool operator==(const ObsTask&) const = default;
};

// Observation time window: satellite `sat` can start imaging task `task`
// anywhere in [t_open_s, t_close_s]. Roll is constant over the window; pitch
// follows the fitted linear model below.
struct Otw {
  std::string task;
  std::string sat;
  int k = 0;  // index within (task, sat), contiguous from 0
  double t_open_s = 0.0;
  double t_close_s = 0.0;
  double roll_rad = 0.0;
  double pitch_at_open_rad = 0.0;
  double pitch_slope_rad_per_s = 0.0;

  double pitch_at(double t) const {
    return pitch_at_open_rad + pitch_slope_rad_per_s * (t - t_open_s);
  }
  bool operator==(const Otw&) const = default;
};

// Download (contact) time window between satellite `sat` and station
// `station`. `d` is the download-opportunity id; `l` indexes windows within
// (d, sat).
struct Dtw {
  std::string d;
  std::string sat;
  std::string station;
  int l = 0;
  double t_open_s = 0.0;
  double t_close_s = 0.0;
  bool operator==(const Dtw&) const = default;
};

struct Instance {
  GlobalParams params;
  std::vector<Satellite> satellites;
  std::vector<GroundStation> stations;
  std::vector<ObsTask> tasks;
  std::vector<Otw> otws;
  std::vector<Dtw> dtws;

  const Satellite* find_satellite(const std::string& id) const;
  const GroundStation* find_station(const std::string& id) const;
  const ObsTask* find_task(const std::string& id) const;
  // Effective pointing limits for (task, sat): satellite limits clamped by
  // the task's user_angle_limit when present.
  double roll_limit(const ObsTask& v, const Satellite& s) const;
  double pitch_limit(const ObsTask& v, const Satellite& s) const;

  bool operator==(const Instance&) const = default;
};

// Sort all arrays into canonical order (satellites/stations/tasks by id,
// otws by (task, sat, k), dtws by (d, sat, l)). Parsers and generators call
// this so equality and serialization are order-independent.
void canonicalize(Instance& inst);

// --- schedule ----------------------------------------------------------------

struct ObsAssignment {
  std::string task;
  int component = 1;  // 1 for mono; stereo tasks use 1 and 2
  std::string sat;
  int k = 0;          // window index within (task, sat)
  double t_start_s = 0.0;
  double pitch_rad = 0.0;  // pitch of the window's linear model at t_start_s
  bool operator==(const ObsAssignment&) const = default;
};

struct DownloadSession {
  std::string d;
  std::string sat;
  int l = 0;
  double t_start_s = 0.0;
  double t_end_s = 0.0;
  bool operator==(const DownloadSession&) const = default;
};

struct Schedule {
  std::vector<ObsAssignment> observations;
  std::vector<DownloadSession> downloads;
  bool operator==(const Schedule&) const = default;
};

void canonicalize(Schedule& sch);

// --- solver report ------------------------------------------------------------

enum class SolveStatus { Optimal, TimeLimit, Infeasible };

std::string to_string(SolveStatus s);

struct PruneSummary {
  int lambda = 0;            // retention bound applied
  int lambda_lower_bound = 0;
  int cluster_count = 0;     // clusters with >= 2 windows
  int window_count = 0;      // windows in the instance before pruning
  int removed_windows = 0;
  bool operator==(const PruneSummary&) const = default;
};

struct SolveReport {
  Schedule schedule;
  double objective_j = 0.0;  // sum of priorities over scheduled task primaries
  double dual_bound = 0.0;   // valid upper bound on the optimum; >= objective_j
  long nodes_explored = 0;
  double wall_time_s = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  // Present when produced by the pruning heuristic.
  std::optional<PruneSummary> pruning;

  double gap() const {
    double g = (dual_bound - objective_j) / std::max(objective_j, 1.0);
    return g < 0.0 ? 0.0 : g;
  }
};

// --- instance checking ---------------------------------------------------------

// One violated structural rule or type invariant.
struct Defect {
  std::string entity;  // e.g. "otw t003/sat1[2]"
  std::string rule;    // e.g. "window inverted: t_open_s >= t_close_s"
};

// Validates every Instance invariant (positive rates and limits, window
// ordering within the horizon, id references, index contiguity, pointing
// limits respected by window models, ...). Empty result means the instance
// is well-formed.
std::vector<Defect> check_instance(const Instance& inst);

// --- serialization ---------------------------------------------------------------

// Parse canonical instance text. Runs check_instance and throws ParseError
// listing the defects if any. The returned instance is canonicalized.
Instance parse_instance(const std::string& text);
std::string write_instance(const Instance& inst);

Schedule parse_schedule(const std::string& text);
std::string write_schedule(const Schedule& sch);

// Report serialization (schedule embedded) for `solve --report`.
std::string write_report(const SolveReport& rep);

}  // namespace aeos
