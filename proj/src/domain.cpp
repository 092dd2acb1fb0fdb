#include "aeos/domain.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "json.hpp"

namespace aeos {

std::string fmt9(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double round9(double v) { return std::strtod(fmt9(v).c_str(), nullptr); }

const Satellite* Instance::find_satellite(const std::string& id) const {
  for (const auto& s : satellites)
    if (s.id == id) return &s;
  return nullptr;
}

const GroundStation* Instance::find_station(const std::string& id) const {
  for (const auto& g : stations)
    if (g.id == id) return &g;
  return nullptr;
}

const ObsTask* Instance::find_task(const std::string& id) const {
  for (const auto& t : tasks)
    if (t.id == id) return &t;
  return nullptr;
}

double Instance::roll_limit(const ObsTask& v, const Satellite& s) const {
  double lim = s.roll_limit_rad;
  if (v.user_angle_limit_rad) lim = std::min(lim, *v.user_angle_limit_rad);
  return lim;
}

double Instance::pitch_limit(const ObsTask& v, const Satellite& s) const {
  double lim = s.pitch_limit_rad;
  if (v.user_angle_limit_rad) lim = std::min(lim, *v.user_angle_limit_rad);
  return lim;
}

void canonicalize(Instance& inst) {
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(inst.satellites.begin(), inst.satellites.end(), by_id);
  std::sort(inst.stations.begin(), inst.stations.end(), by_id);
  std::sort(inst.tasks.begin(), inst.tasks.end(), by_id);
  std::sort(inst.otws.begin(), inst.otws.end(), [](const Otw& a, const Otw& b) {
    return std::tie(a.task, a.sat, a.k) < std::tie(b.task, b.sat, b.k);
  });
  std::sort(inst.dtws.begin(), inst.dtws.end(), [](const Dtw& a, const Dtw& b) {
    return std::tie(a.d, a.sat, a.l) < std::tie(b.d, b.sat, b.l);
  });
}

void canonicalize(Schedule& sch) {
  std::sort(sch.observations.begin(), sch.observations.end(),
            [](const ObsAssignment& a, const ObsAssignment& b) {
              return std::tie(a.task, a.component, a.sat, a.k) <
                     std::tie(b.task, b.component, b.sat, b.k);
            });
  std::sort(sch.downloads.begin(), sch.downloads.end(),
            [](const DownloadSession& a, const DownloadSession& b) {
              return std::tie(a.d, a.sat, a.l) < std::tie(b.d, b.sat, b.l);
            });
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::TimeLimit: return "TimeLimit";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

// --- check_instance ----------------------------------------------------------

namespace {

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 20) return false;
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  return true;
}

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kHalfPi = 1.57079632679489662;

}  // namespace

std::vector<Defect> check_instance(const Instance& inst) {
  std::vector<Defect> out;
  auto flag = [&out](std::string entity, std::string rule) {
    out.push_back({std::move(entity), std::move(rule)});
  };

  const double th = inst.params.horizon_s;
  if (!(th > 0)) flag("params", "horizon_s must be > 0");

  std::set<std::string> sat_ids, station_ids, task_ids;
  for (const auto& s : inst.satellites) {
    std::string e = "satellite " + s.id;
    if (!valid_id(s.id)) flag(e, "id must be 1-20 alphanumeric characters");
    if (!sat_ids.insert(s.id).second) flag(e, "duplicate id");
    if (!(s.roll_limit_rad > 0)) flag(e, "roll_limit_rad must be > 0");
    if (!(s.pitch_limit_rad > 0)) flag(e, "pitch_limit_rad must be > 0");
    if (!(s.slew_rate_rad_per_s > 0)) flag(e, "slew_rate_rad_per_s must be > 0");
    if (s.stab_time_s < 0) flag(e, "stab_time_s must be >= 0");
    if (s.sat_prep_time_s < 0) flag(e, "sat_prep_time_s must be >= 0");
    if (!(s.capacity_units > 0)) flag(e, "capacity_units must be > 0");
    if (s.initial_data_units < 0 || s.initial_data_units > s.capacity_units)
      flag(e, "initial_data_units must lie in [0, capacity_units]");
    if (!(s.acq_rate_units_per_s > 0)) flag(e, "acq_rate_units_per_s must be > 0");
    if (!(s.down_rate_units_per_s > 0)) flag(e, "down_rate_units_per_s must be > 0");
    if (s.orbit) {
      if (!(s.orbit->semi_major_axis_km > kEarthRadiusKm))
        flag(e, "orbit semi_major_axis_km must exceed the Earth radius");
      if (s.orbit->eccentricity < 0 || s.orbit->eccentricity >= 1)
        flag(e, "orbit eccentricity must lie in [0, 1)");
    }
  }

  for (const auto& g : inst.stations) {
    std::string e = "station " + g.id;
    if (!valid_id(g.id)) flag(e, "id must be 1-20 alphanumeric characters");
    if (!station_ids.insert(g.id).second) flag(e, "duplicate id");
    if (g.gs_prep_time_s < 0) flag(e, "gs_prep_time_s must be >= 0");
    if (g.min_elevation_rad < 0 || g.min_elevation_rad >= kHalfPi)
      flag(e, "min_elevation_rad must lie in [0, pi/2)");
    if (std::abs(g.lat_rad) > kHalfPi) flag(e, "lat_rad must lie in [-pi/2, pi/2]");
  }

  for (const auto& v : inst.tasks) {
    std::string e = "task " + v.id;
    if (!valid_id(v.id)) flag(e, "id must be 1-20 alphanumeric characters");
    if (!task_ids.insert(v.id).second) flag(e, "duplicate id");
    if (v.priority_w < 1) flag(e, "priority_w must be >= 1");
    if (v.stereo_beta_rad && !(*v.stereo_beta_rad > 0))
      flag(e, "stereo beta_rad must be > 0");
    if (v.user_angle_limit_rad && !(*v.user_angle_limit_rad > 0))
      flag(e, "user_angle_limit_rad must be > 0");
    if (std::abs(v.lat_rad) > kHalfPi) flag(e, "lat_rad must lie in [-pi/2, pi/2]");
    for (const auto& [sid, tp] : v.process_time_s) {
      if (!sat_ids.count(sid))
        flag(e, "process_time_s references unknown satellite " + sid);
      if (!(tp > 0)) flag(e, "process_time_s for " + sid + " must be > 0");
    }
  }

  // Window index contiguity bookkeeping.
  std::map<std::pair<std::string, std::string>, std::set<int>> otw_keys;
  const double tol = 1e-9;
  for (const auto& w : inst.otws) {
    std::string e = "otw " + w.task + "/" + w.sat + "[" + std::to_string(w.k) + "]";
    const ObsTask* v = inst.find_task(w.task);
    const Satellite* s = inst.find_satellite(w.sat);
    if (!v) flag(e, "references unknown task " + w.task);
    if (!s) flag(e, "references unknown satellite " + w.sat);
    if (w.t_open_s >= w.t_close_s) flag(e, "window inverted: t_open_s >= t_close_s");
    if (w.t_open_s < 0) flag(e, "window starts before the horizon");
    if (th > 0 && w.t_close_s > th) flag(e, "window ends after the horizon");
    if (!otw_keys[{w.task, w.sat}].insert(w.k).second) flag(e, "duplicate window index");
    if (v && s) {
      if (!v->process_time_s.count(w.sat))
        flag(e, "task has no process_time_s entry for " + w.sat);
      if (std::abs(w.roll_rad) > inst.roll_limit(*v, *s) + tol)
        flag(e, "roll exceeds limit");
      double plim = inst.pitch_limit(*v, *s) + tol;
      if (std::abs(w.pitch_at(w.t_open_s)) > plim ||
          std::abs(w.pitch_at(w.t_close_s)) > plim)
        flag(e, "pitch model exceeds limit inside the window");
    }
  }
  for (const auto& [key, ks] : otw_keys) {
    int expect = 0;
    for (int k : ks) {
      if (k != expect) {
        flag("otw " + key.first + "/" + key.second,
             "window indices must be contiguous from 0");
        break;
      }
      ++expect;
    }
  }

  std::map<std::pair<std::string, std::string>, std::set<int>> dtw_keys;
  for (const auto& w : inst.dtws) {
    std::string e = "dtw " + w.d + "/" + w.sat + "[" + std::to_string(w.l) + "]";
    if (!valid_id(w.d)) flag(e, "id must be 1-20 alphanumeric characters");
    if (!sat_ids.count(w.sat)) flag(e, "references unknown satellite " + w.sat);
    if (!station_ids.count(w.station)) flag(e, "references unknown station " + w.station);
    if (w.t_open_s >= w.t_close_s) flag(e, "window inverted: t_open_s >= t_close_s");
    if (w.t_open_s < 0) flag(e, "window starts before the horizon");
    if (th > 0 && w.t_close_s > th) flag(e, "window ends after the horizon");
    if (!dtw_keys[{w.d, w.sat}].insert(w.l).second) flag(e, "duplicate window index");
  }
  for (const auto& [key, ls] : dtw_keys) {
    int expect = 0;
    for (int l : ls) {
      if (l != expect) {
        flag("dtw " + key.first + "/" + key.second,
             "window indices must be contiguous from 0");
        break;
      }
      ++expect;
    }
  }

  return out;
}

// --- writers ------------------------------------------------------------------

namespace {

class JsonWriter {
 public:
  std::string take() { return std::move(out_); }

  void raw(const std::string& s) { out_ += s; }
  void line(const std::string& s) {
    indent();
    out_ += s;
    out_ += '\n';
  }
  void open(const std::string& prefix, char bracket) {
    indent();
    out_ += prefix;
    out_ += bracket;
    out_ += '\n';
    ++depth_;
  }
  void close(char bracket, bool comma) {
    --depth_;
    indent();
    out_ += bracket;
    if (comma) out_ += ',';
    out_ += '\n';
  }

 private:
  void indent() { out_.append(static_cast<size_t>(depth_) * 2, ' '); }
  std::string out_;
  int depth_ = 0;
};

std::string q(const std::string& s) { return "\"" + s + "\""; }

std::string field_num(const std::string& name, double v, bool comma = true) {
  return q(name) + ": " + fmt9(v) + (comma ? "," : "");
}

std::string field_int(const std::string& name, long v, bool comma = true) {
  return q(name) + ": " + std::to_string(v) + (comma ? "," : "");
}

std::string field_str(const std::string& name, const std::string& v,
                      bool comma = true) {
  return q(name) + ": " + q(v) + (comma ? "," : "");
}

void write_orbit(JsonWriter& w, const OrbitElements& o, bool comma) {
  w.open(q("orbit") + ": ", '{');
  w.line(field_num("semi_major_axis_km", o.semi_major_axis_km));
  w.line(field_num("eccentricity", o.eccentricity));
  w.line(field_num("inclination_rad", o.inclination_rad));
  w.line(field_num("arg_perigee_rad", o.arg_perigee_rad));
  w.line(field_num("raan_rad", o.raan_rad));
  w.line(field_num("true_anomaly_at_epoch_rad", o.true_anomaly_at_epoch_rad));
  w.line(field_num("epoch_s", o.epoch_s, false));
  w.close('}', comma);
}

void write_schedule_body(JsonWriter& w, const Schedule& canon, bool trailing_comma);

}  // namespace

std::string write_instance(const Instance& inst) {
  Instance canon = inst;
  canonicalize(canon);

  JsonWriter w;
  w.open("", '{');
  w.line(field_str("format", "aeos-instance"));
  w.line(field_int("version", 1));
  w.open(q("params") + ": ", '{');
  w.line(field_num("horizon_s", canon.params.horizon_s, false));
  w.close('}', true);

  w.open(q("satellites") + ": ", '[');
  for (size_t i = 0; i < canon.satellites.size(); ++i) {
    const Satellite& s = canon.satellites[i];
    w.open("", '{');
    w.line(field_str("id", s.id));
    w.line(field_num("roll_limit_rad", s.roll_limit_rad));
    w.line(field_num("pitch_limit_rad", s.pitch_limit_rad));
    w.line(field_num("slew_rate_rad_per_s", s.slew_rate_rad_per_s));
    w.line(field_num("stab_time_s", s.stab_time_s));
    w.line(field_num("sat_prep_time_s", s.sat_prep_time_s));
    w.line(field_num("capacity_units", s.capacity_units));
    w.line(field_num("initial_data_units", s.initial_data_units));
    w.line(field_num("acq_rate_units_per_s", s.acq_rate_units_per_s));
    w.line(field_num("down_rate_units_per_s", s.down_rate_units_per_s, s.orbit.has_value()));
    if (s.orbit) write_orbit(w, *s.orbit, false);
    w.close('}', i + 1 < canon.satellites.size());
  }
  w.close(']', true);

  w.open(q("stations") + ": ", '[');
  for (size_t i = 0; i < canon.stations.size(); ++i) {
    const GroundStation& g = canon.stations[i];
    w.open("", '{');
    w.line(field_str("id", g.id));
    w.line(field_num("lat_rad", g.lat_rad));
    w.line(field_num("lon_rad", g.lon_rad));
    w.line(field_num("alt_km", g.alt_km));
    w.line(field_num("gs_prep_time_s", g.gs_prep_time_s));
    w.line(field_num("min_elevation_rad", g.min_elevation_rad, false));
    w.close('}', i + 1 < canon.stations.size());
  }
  w.close(']', true);

  w.open(q("tasks") + ": ", '[');
  for (size_t i = 0; i < canon.tasks.size(); ++i) {
    const ObsTask& v = canon.tasks[i];
    w.open("", '{');
    w.line(field_str("id", v.id));
    w.line(field_int("priority_w", v.priority_w));
    if (v.stereo_beta_rad) {
      w.open(q("imaging") + ": ", '{');
      w.line(field_str("type", "stereo"));
      w.line(field_num("beta_rad", *v.stereo_beta_rad, false));
      w.close('}', true);
    } else {
      w.open(q("imaging") + ": ", '{');
      w.line(field_str("type", "mono", false));
      w.close('}', true);
    }
    w.line(field_num("lat_rad", v.lat_rad));
    w.line(field_num("lon_rad", v.lon_rad));
    w.open(q("process_time_s") + ": ", '{');
    size_t j = 0;
    for (const auto& [sid, tp] : v.process_time_s)
      w.line(field_num(sid, tp, ++j < v.process_time_s.size()));
    w.close('}', v.user_angle_limit_rad.has_value());
    if (v.user_angle_limit_rad)
      w.line(field_num("user_angle_limit_rad", *v.user_angle_limit_rad, false));
    w.close('}', i + 1 < canon.tasks.size());
  }
  w.close(']', true);

  w.open(q("otws") + ": ", '[');
  for (size_t i = 0; i < canon.otws.size(); ++i) {
    const Otw& o = canon.otws[i];
    w.open("", '{');
    w.line(field_str("task", o.task));
    w.line(field_str("sat", o.sat));
    w.line(field_int("k", o.k));
    w.line(field_num("t_open_s", o.t_open_s));
    w.line(field_num("t_close_s", o.t_close_s));
    w.line(field_num("roll_rad", o.roll_rad));
    w.line(field_num("pitch_at_open_rad", o.pitch_at_open_rad));
    w.line(field_num("pitch_slope_rad_per_s", o.pitch_slope_rad_per_s, false));
    w.close('}', i + 1 < canon.otws.size());
  }
  w.close(']', true);

  w.open(q("dtws") + ": ", '[');
  for (size_t i = 0; i < canon.dtws.size(); ++i) {
    const Dtw& d = canon.dtws[i];
    w.open("", '{');
    w.line(field_str("d", d.d));
    w.line(field_str("sat", d.sat));
    w.line(field_str("station", d.station));
    w.line(field_int("l", d.l));
    w.line(field_num("t_open_s", d.t_open_s));
    w.line(field_num("t_close_s", d.t_close_s, false));
    w.close('}', i + 1 < canon.dtws.size());
  }
  w.close(']', false);
  w.close('}', false);
  return w.take();
}

namespace {

void write_schedule_body(JsonWriter& w, const Schedule& canon, bool trailing_comma) {
  w.open(q("observations") + ": ", '[');
  for (size_t i = 0; i < canon.observations.size(); ++i) {
    const ObsAssignment& o = canon.observations[i];
    w.open("", '{');
    w.line(field_str("task", o.task));
    w.line(field_int("component", o.component));
    w.line(field_str("sat", o.sat));
    w.line(field_int("k", o.k));
    w.line(field_num("t_start_s", o.t_start_s));
    w.line(field_num("pitch_rad", o.pitch_rad, false));
    w.close('}', i + 1 < canon.observations.size());
  }
  w.close(']', true);

  w.open(q("downloads") + ": ", '[');
  for (size_t i = 0; i < canon.downloads.size(); ++i) {
    const DownloadSession& d = canon.downloads[i];
    w.open("", '{');
    w.line(field_str("d", d.d));
    w.line(field_str("sat", d.sat));
    w.line(field_int("l", d.l));
    w.line(field_num("t_start_s", d.t_start_s));
    w.line(field_num("t_end_s", d.t_end_s, false));
    w.close('}', i + 1 < canon.downloads.size());
  }
  w.close(']', trailing_comma);
}

}  // namespace

std::string write_schedule(const Schedule& sch) {
  Schedule canon = sch;
  canonicalize(canon);
  JsonWriter w;
  w.open("", '{');
  w.line(field_str("format", "aeos-schedule"));
  w.line(field_int("version", 1));
  write_schedule_body(w, canon, false);
  w.close('}', false);
  return w.take();
}

std::string write_report(const SolveReport& rep) {
  Schedule canon = rep.schedule;
  canonicalize(canon);
  JsonWriter w;
  w.open("", '{');
  w.line(field_str("format", "aeos-report"));
  w.line(field_int("version", 1));
  w.line(field_str("status", to_string(rep.status)));
  w.line(field_num("objective_j", rep.objective_j));
  w.line(field_num("dual_bound", rep.dual_bound));
  w.line(field_num("gap", rep.gap()));
  w.line(field_int("nodes_explored", rep.nodes_explored));
  w.line(field_num("wall_time_s", rep.wall_time_s));
  if (rep.pruning) {
    w.open(q("pruning") + ": ", '{');
    w.line(field_int("lambda", rep.pruning->lambda));
    w.line(field_int("lambda_lower_bound", rep.pruning->lambda_lower_bound));
    w.line(field_int("cluster_count", rep.pruning->cluster_count));
    w.line(field_int("window_count", rep.pruning->window_count));
    w.line(field_int("removed_windows", rep.pruning->removed_windows, false));
    w.close('}', true);
  }
  write_schedule_body(w, canon, false);
  w.close('}', false);
  return w.take();
}

// --- parsers -------------------------------------------------------------------

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ParseError(msg); }

const json& member(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.is_object()) fail(ctx + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(ctx + ": missing field '" + key + "'");
  return *it;
}

double num(const json& obj, const char* key, const std::string& ctx) {
  const json& v = member(obj, key, ctx);
  if (!v.is_number()) fail(ctx + "." + key + ": expected a number");
  return v.get<double>();
}

double num_or(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) fail(std::string(key) + ": expected a number");
  return it->get<double>();
}

int integer(const json& obj, const char* key, const std::string& ctx) {
  const json& v = member(obj, key, ctx);
  if (!v.is_number_integer()) fail(ctx + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string str(const json& obj, const char* key, const std::string& ctx) {
  const json& v = member(obj, key, ctx);
  if (!v.is_string()) fail(ctx + "." + key + ": expected a string");
  return v.get<std::string>();
}

const json& array(const json& obj, const char* key, const std::string& ctx) {
  const json& v = member(obj, key, ctx);
  if (!v.is_array()) fail(ctx + "." + key + ": expected an array");
  return v;
}

json parse_json(const std::string& text, const char* expected_format) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Map the byte offset to 1-based line/column for the error report.
    size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    if (byte > text.size()) byte = text.size();
    int line = 1, col = 1;
    for (size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(col),
                     line, col);
  }
  if (!root.is_object()) fail("top level: expected an object");
  std::string fmt = str(root, "format", "top level");
  if (fmt != expected_format)
    fail("unexpected format '" + fmt + "' (want '" + expected_format + "')");
  int version = integer(root, "version", "top level");
  if (version != 1) fail("unsupported version " + std::to_string(version));
  return root;
}

}  // namespace

Instance parse_instance(const std::string& text) {
  json root = parse_json(text, "aeos-instance");
  Instance inst;
  inst.params.horizon_s = num(member(root, "params", "top level"), "horizon_s", "params");

  size_t idx = 0;
  for (const json& j : array(root, "satellites", "top level")) {
    std::string ctx = "satellites[" + std::to_string(idx++) + "]";
    Satellite s;
    s.id = str(j, "id", ctx);
    s.roll_limit_rad = num(j, "roll_limit_rad", ctx);
    s.pitch_limit_rad = num(j, "pitch_limit_rad", ctx);
    s.slew_rate_rad_per_s = num(j, "slew_rate_rad_per_s", ctx);
    s.stab_time_s = num(j, "stab_time_s", ctx);
    s.sat_prep_time_s = num(j, "sat_prep_time_s", ctx);
    s.capacity_units = num_or(j, "capacity_units", 1000.0);
    s.initial_data_units = num_or(j, "initial_data_units", 0.0);
    s.acq_rate_units_per_s = num_or(j, "acq_rate_units_per_s", 1.0);
    s.down_rate_units_per_s = num(j, "down_rate_units_per_s", ctx);
    if (j.contains("orbit")) {
      const json& o = j["orbit"];
      OrbitElements el;
      el.semi_major_axis_km = num(o, "semi_major_axis_km", ctx + ".orbit");
      el.eccentricity = num(o, "eccentricity", ctx + ".orbit");
      el.inclination_rad = num(o, "inclination_rad", ctx + ".orbit");
      el.arg_perigee_rad = num(o, "arg_perigee_rad", ctx + ".orbit");
      el.raan_rad = num(o, "raan_rad", ctx + ".orbit");
      el.true_anomaly_at_epoch_rad = num(o, "true_anomaly_at_epoch_rad", ctx + ".orbit");
      el.epoch_s = num_or(o, "epoch_s", 0.0);
      s.orbit = el;
    }
    inst.satellites.push_back(std::move(s));
  }

  idx = 0;
  for (const json& j : array(root, "stations", "top level")) {
    std::string ctx = "stations[" + std::to_string(idx++) + "]";
    GroundStation g;
    g.id = str(j, "id", ctx);
    g.lat_rad = num(j, "lat_rad", ctx);
    g.lon_rad = num(j, "lon_rad", ctx);
    g.alt_km = num_or(j, "alt_km", 0.0);
    g.gs_prep_time_s = num(j, "gs_prep_time_s", ctx);
    g.min_elevation_rad = num(j, "min_elevation_rad", ctx);
    inst.stations.push_back(std::move(g));
  }

  idx = 0;
  for (const json& j : array(root, "tasks", "top level")) {
    std::string ctx = "tasks[" + std::to_string(idx++) + "]";
    ObsTask v;
    v.id = str(j, "id", ctx);
    v.priority_w = integer(j, "priority_w", ctx);
    const json& im = member(j, "imaging", ctx);
    std::string kind = str(im, "type", ctx + ".imaging");
    if (kind == "stereo") {
      v.stereo_beta_rad = num(im, "beta_rad", ctx + ".imaging");
    } else if (kind != "mono") {
      fail(ctx + ".imaging.type: expected 'mono' or 'stereo'");
    }
    v.lat_rad = num(j, "lat_rad", ctx);
    v.lon_rad = num(j, "lon_rad", ctx);
    const json& pt = member(j, "process_time_s", ctx);
    if (!pt.is_object()) fail(ctx + ".process_time_s: expected an object");
    for (auto it = pt.begin(); it != pt.end(); ++it) {
      if (!it.value().is_number())
        fail(ctx + ".process_time_s." + it.key() + ": expected a number");
      v.process_time_s[it.key()] = it.value().get<double>();
    }
    if (j.contains("user_angle_limit_rad"))
      v.user_angle_limit_rad = num(j, "user_angle_limit_rad", ctx);
    inst.tasks.push_back(std::move(v));
  }

  idx = 0;
  for (const json& j : array(root, "otws", "top level")) {
    std::string ctx = "otws[" + std::to_string(idx++) + "]";
    Otw o;
    o.task = str(j, "task", ctx);
    o.sat = str(j, "sat", ctx);
    o.k = integer(j, "k", ctx);
    o.t_open_s = num(j, "t_open_s", ctx);
    o.t_close_s = num(j, "t_close_s", ctx);
    o.roll_rad = num(j, "roll_rad", ctx);
    o.pitch_at_open_rad = num(j, "pitch_at_open_rad", ctx);
    o.pitch_slope_rad_per_s = num(j, "pitch_slope_rad_per_s", ctx);
    inst.otws.push_back(std::move(o));
  }

  idx = 0;
  for (const json& j : array(root, "dtws", "top level")) {
    std::string ctx = "dtws[" + std::to_string(idx++) + "]";
    Dtw d;
    d.d = str(j, "d", ctx);
    d.sat = str(j, "sat", ctx);
    d.station = str(j, "station", ctx);
    d.l = integer(j, "l", ctx);
    d.t_open_s = num(j, "t_open_s", ctx);
    d.t_close_s = num(j, "t_close_s", ctx);
    inst.dtws.push_back(std::move(d));
  }

  canonicalize(inst);
  std::vector<Defect> defects = check_instance(inst);
  if (!defects.empty()) {
    std::ostringstream msg;
    msg << "invalid instance:";
    for (const Defect& d : defects) msg << " [" << d.entity << ": " << d.rule << "]";
    fail(msg.str());
  }
  return inst;
}

Schedule parse_schedule(const std::string& text) {
  json root = parse_json(text, "aeos-schedule");
  Schedule sch;
  size_t idx = 0;
  for (const json& j : array(root, "observations", "top level")) {
    std::string ctx = "observations[" + std::to_string(idx++) + "]";
    ObsAssignment o;
    o.task = str(j, "task", ctx);
    o.component = integer(j, "component", ctx);
    o.sat = str(j, "sat", ctx);
    o.k = integer(j, "k", ctx);
    o.t_start_s = num(j, "t_start_s", ctx);
    o.pitch_rad = num(j, "pitch_rad", ctx);
    if (o.component != 1 && o.component != 2)
      fail(ctx + ".component: must be 1 or 2");
    sch.observations.push_back(std::move(o));
  }
  idx = 0;
  for (const json& j : array(root, "downloads", "top level")) {
    std::string ctx = "downloads[" + std::to_string(idx++) + "]";
    DownloadSession d;
    d.d = str(j, "d", ctx);
    d.sat = str(j, "sat", ctx);
    d.l = integer(j, "l", ctx);
    d.t_start_s = num(j, "t_start_s", ctx);
    d.t_end_s = num(j, "t_end_s", ctx);
    sch.downloads.push_back(std::move(d));
  }
  canonicalize(sch);
  return sch;
}

}  // namespace aeos
