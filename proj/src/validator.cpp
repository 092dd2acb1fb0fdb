#include "aeos/validator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"

namespace aeos {

std::string to_string(CheckFamily f) {
  switch (f) {
    case CheckFamily::Assignment: return "Assignment";
    case CheckFamily::ObsWindow: return "ObsWindow";
    case CheckFamily::DlWindow: return "DlWindow";
    case CheckFamily::ObsOverlap: return "ObsOverlap";
    case CheckFamily::GsOverlap: return "GsOverlap";
    case CheckFamily::SatDlOverlap: return "SatDlOverlap";
    case CheckFamily::Capacity: return "Capacity";
    case CheckFamily::BufferNonneg: return "BufferNonneg";
    case CheckFamily::Stereo: return "Stereo";
    case CheckFamily::PitchLink: return "PitchLink";
  }
  return "?";
}

namespace {

constexpr double kPitchLinkTolRad = 1e-9;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// One scheduled observation with its references resolved.
struct RObs {
  const ObsAssignment* a = nullptr;
  const ObsTask* task = nullptr;
  const Satellite* sat = nullptr;
  const Otw* win = nullptr;
  double tp = 0.0;          // processing duration on this satellite
  double theta = 0.0;       // window-model pitch at the scheduled start
  std::string tag;
};

struct RDl {
  const DownloadSession* d = nullptr;
  const Dtw* win = nullptr;
  const Satellite* sat = nullptr;
  const GroundStation* station = nullptr;
  std::string tag;
};

}  // namespace

Verdict validate_schedule(const Instance& inst, const Schedule& sch, double tol_s) {
  Verdict v;

  // ---- reference resolution (structural) ----
  std::vector<RObs> obs;
  for (const auto& a : sch.observations) {
    RObs r;
    r.a = &a;
    r.task = inst.find_task(a.task);
    r.sat = inst.find_satellite(a.sat);
    r.tag = a.task + "[" + std::to_string(a.component) + "]@" + a.sat + " k=" +
            std::to_string(a.k);
    if (!r.task) {
      v.structural.push_back("observation " + r.tag + ": unknown task '" + a.task + "'");
      continue;
    }
    if (!r.sat) {
      v.structural.push_back("observation " + r.tag + ": unknown satellite '" + a.sat + "'");
      continue;
    }
    int max_comp = r.task->stereo() ? 2 : 1;
    if (a.component < 1 || a.component > max_comp) {
      v.structural.push_back("observation " + r.tag + ": component out of range");
      continue;
    }
    for (const auto& w : inst.otws)
      if (w.task == a.task && w.sat == a.sat && w.k == a.k) r.win = &w;
    if (!r.win) {
      v.structural.push_back("observation " + r.tag + ": no such window");
      continue;
    }
    auto it = r.task->process_time_s.find(a.sat);
    if (it == r.task->process_time_s.end()) {
      v.structural.push_back("observation " + r.tag + ": no processing time for satellite");
      continue;
    }
    r.tp = it->second;
    r.theta = r.win->pitch_at(a.t_start_s);
    obs.push_back(r);
  }
  std::vector<RDl> dls;
  for (const auto& d : sch.downloads) {
    RDl r;
    r.d = &d;
    r.tag = d.d + "@" + d.sat + " l=" + std::to_string(d.l);
    for (const auto& w : inst.dtws)
      if (w.d == d.d && w.sat == d.sat && w.l == d.l) r.win = &w;
    if (!r.win) {
      v.structural.push_back("session " + r.tag + ": no such contact window");
      continue;
    }
    r.sat = inst.find_satellite(d.sat);
    r.station = inst.find_station(r.win->station);
    if (!r.sat || !r.station) {
      v.structural.push_back("session " + r.tag + ": unresolved satellite or station");
      continue;
    }
    dls.push_back(r);
  }
  if (!v.structural.empty()) {
    v.pass = false;
    return v;
  }

  auto add = [&](CheckFamily fam, const std::string& entities, double measured,
                 double bound, double margin) {
    v.findings.push_back(Finding{fam, entities, measured, bound, margin});
  };

  // ---- selection multiplicity ----
  std::map<std::pair<std::string, int>, int> comp_count;
  for (const auto& r : obs) ++comp_count[{r.a->task, r.a->component}];
  for (const auto& [key, n] : comp_count)
    if (n > 1)
      add(CheckFamily::Assignment,
          key.first + "[" + std::to_string(key.second) + "] scheduled " + std::to_string(n) + " times",
          n, 1, 1.0 - n);
  for (const auto& t : inst.tasks) {
    if (!t.stereo()) continue;
    bool c1 = comp_count.count({t.id, 1}), c2 = comp_count.count({t.id, 2});
    if (c1 != c2)
      add(CheckFamily::Assignment, t.id + ": stereo components must both be scheduled",
          c1 + c2 ? 1 : 0, 2, -1);
  }
  std::map<std::tuple<std::string, std::string, int>, int> dl_count;
  for (const auto& r : dls) ++dl_count[{r.d->d, r.d->sat, r.d->l}];
  for (const auto& [key, n] : dl_count)
    if (n > 1)
      add(CheckFamily::Assignment,
          std::get<0>(key) + "@" + std::get<1>(key) + " l=" + std::to_string(std::get<2>(key)) +
              " scheduled " + std::to_string(n) + " times",
          n, 1, 1.0 - n);

  // ---- window containment ----
  for (const auto& r : obs) {
    double t = r.a->t_start_s;
    double m = std::min(t - r.win->t_open_s, r.win->t_close_s - t);
    if (m < -tol_s)
      add(CheckFamily::ObsWindow, r.tag, t,
          t < r.win->t_open_s ? r.win->t_open_s : r.win->t_close_s, m);
    double dpitch = std::fabs(r.a->pitch_rad - r.theta);
    if (dpitch > kPitchLinkTolRad)
      add(CheckFamily::PitchLink, r.tag, dpitch, kPitchLinkTolRad,
          kPitchLinkTolRad - dpitch);
  }
  for (const auto& r : dls) {
    double m = std::min({r.d->t_start_s - r.win->t_open_s,
                         r.win->t_close_s - r.d->t_end_s,
                         r.d->t_end_s - r.d->t_start_s});
    if (m < -tol_s)
      add(CheckFamily::DlWindow, r.tag, m < 0 ? m : 0, 0, m);
  }

  // ---- same-satellite observation transitions ----
  for (size_t i = 0; i < obs.size(); ++i) {
    for (size_t j = i + 1; j < obs.size(); ++j) {
      const RObs& A = obs[i];
      const RObs& B = obs[j];
      if (A.a->sat != B.a->sat) continue;
      const Satellite& s = *A.sat;
      double droll = std::fabs(A.win->roll_rad - B.win->roll_rad);
      double dpitch = std::fabs(A.theta - B.theta);
      double slew = (droll + dpitch) / s.slew_rate_rad_per_s;
      double fwd = B.a->t_start_s - A.a->t_start_s - (A.tp + s.stab_time_s + slew);
      double bwd = A.a->t_start_s - B.a->t_start_s - (B.tp + s.stab_time_s + slew);
      double m = std::max(fwd, bwd);
      if (m < -tol_s) {
        bool forward = fwd >= bwd;
        double need = (forward ? A.tp : B.tp) + s.stab_time_s + slew;
        add(CheckFamily::ObsOverlap, A.tag + " / " + B.tag,
            std::fabs(B.a->t_start_s - A.a->t_start_s), need, m);
      }
    }
  }

  // ---- session separations ----
  for (size_t i = 0; i < dls.size(); ++i) {
    for (size_t j = i + 1; j < dls.size(); ++j) {
      const RDl& A = dls[i];
      const RDl& B = dls[j];
      double gap = std::max(B.d->t_start_s - A.d->t_end_s, A.d->t_start_s - B.d->t_end_s);
      if (A.win->station == B.win->station) {
        double prep = A.station->gs_prep_time_s;
        if (gap - prep < -tol_s)
          add(CheckFamily::GsOverlap, A.tag + " / " + B.tag, gap, prep, gap - prep);
      }
      if (A.d->sat == B.d->sat) {
        double prep = A.sat->sat_prep_time_s;
        if (gap - prep < -tol_s)
          add(CheckFamily::SatDlOverlap, A.tag + " / " + B.tag, gap, prep, gap - prep);
      }
    }
  }

  // ---- buffer trajectory bounds ----
  std::set<std::string> active_sats;
  for (const auto& r : obs) active_sats.insert(r.a->sat);
  for (const auto& r : dls) active_sats.insert(r.d->sat);
  for (const auto& sid : active_sats) {
    const Satellite& s = *inst.find_satellite(sid);
    BufferTrajectory tr = buffer_trajectory(inst, sch, sid);
    double hi = -1e300, hi_t = 0, lo = 1e300, lo_t = 0;
    for (const auto& p : tr.points) {
      if (p.units > hi) { hi = p.units; hi_t = p.t; }
      if (p.units < lo) { lo = p.units; lo_t = p.t; }
    }
    if (hi - s.capacity_units > tol_s)
      add(CheckFamily::Capacity, sid + " at t=" + num(hi_t), hi, s.capacity_units,
          s.capacity_units - hi);
    if (lo < -tol_s)
      add(CheckFamily::BufferNonneg, sid + " at t=" + num(lo_t), lo, 0, lo);
  }

  // ---- stereo pitch separation ----
  for (const auto& t : inst.tasks) {
    if (!t.stereo()) continue;
    const RObs* c1 = nullptr;
    const RObs* c2 = nullptr;
    for (const auto& r : obs) {
      if (r.a->task != t.id) continue;
      (r.a->component == 1 ? c1 : c2) = &r;
    }
    if (!c1 || !c2) continue;  // both-or-neither handled above
    double sep = std::fabs(c1->theta - c2->theta);
    double beta = *t.stereo_beta_rad;
    if (sep - beta < -tol_s)
      add(CheckFamily::Stereo, t.id, sep, beta, sep - beta);
  }

  v.pass = v.findings.empty();
  return v;
}

std::string report_text(const Verdict& v) {
  std::string out = v.pass ? "PASS\n" : "FAIL\n";
  for (const auto& s : v.structural) out += "structural: " + s + "\n";
  for (const auto& f : v.findings)
    out += "[" + to_string(f.family) + "] " + f.entities + ": measured=" + num(f.measured) +
           " bound=" + num(f.bound) + " margin=" + num(f.margin) + "\n";
  return out;
}

std::string report_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["pass"] = v.pass;
  j["structural"] = v.structural;
  j["findings"] = nlohmann::ordered_json::array();
  for (const auto& f : v.findings) {
    nlohmann::ordered_json e;
    e["family"] = to_string(f.family);
    e["entities"] = f.entities;
    e["measured"] = f.measured;
    e["bound"] = f.bound;
    e["margin"] = f.margin;
    j["findings"].push_back(e);
  }
  return j.dump(2) + "\n";
}

BufferTrajectory buffer_trajectory(const Instance& inst, const Schedule& sch,
                                   const std::string& sat) {
  const Satellite* s = inst.find_satellite(sat);
  BufferTrajectory tr;
  tr.sat = sat;
  if (!s) return tr;

  std::vector<std::pair<double, double>> impulses;  // (time, gained units)
  for (const auto& a : sch.observations) {
    if (a.sat != sat) continue;
    const ObsTask* t = inst.find_task(a.task);
    if (!t) continue;
    auto it = t->process_time_s.find(sat);
    if (it == t->process_time_s.end()) continue;
    impulses.push_back({a.t_start_s + it->second, s->acq_rate_units_per_s * it->second});
  }
  std::vector<std::pair<double, double>> drains;  // (start, end)
  for (const auto& d : sch.downloads)
    if (d.sat == sat) drains.push_back({d.t_start_s, d.t_end_s});

  std::set<double> bps{0.0, inst.params.horizon_s};
  for (const auto& [t, u] : impulses) bps.insert(t);
  for (const auto& [a, b] : drains) {
    bps.insert(a);
    bps.insert(b);
  }

  auto drained = [&](double t) {
    double d = 0;
    for (const auto& [a, b] : drains) d += std::max(0.0, std::min(b, t) - a);
    return d * s->down_rate_units_per_s;
  };
  for (double t : bps) {
    double before = s->initial_data_units - drained(t);
    double after = before;
    for (const auto& [te, u] : impulses) {
      if (te < t) before += u;
      if (te <= t) after += u;
    }
    tr.points.push_back({t, before});
    if (after != before) tr.points.push_back({t, after});
  }
  tr.carry_over = tr.points.empty() ? s->initial_data_units : tr.points.back().units;
  return tr;
}

}  // namespace aeos
