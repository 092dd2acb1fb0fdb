#include "aeos/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace aeos {

namespace {

std::string num12(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Relative order of two entities whose time windows may or may not overlap.
enum class Ord {
  FirstBeforeSecond,  // order certain, no binary needed
  SecondBeforeFirst,
  Ambiguous,  // decided by an ordering binary
};

struct ObsPairRel {
  Ord ord = Ord::Ambiguous;
  bool needs_rows = false;  // false when the window gap already covers the transition
  int oo = -1;              // ordering binary (1 = first ordinal before second)
};

struct DlPairRel {
  Ord ord = Ord::Ambiguous;
  bool needs_rows = false;
  int od = -1;
  bool same_sat = false;
  bool same_station = false;
};

// Relation between an observation's completion and a download session, from
// the window geometry alone.
enum class EndRel {
  Always,     // the relation holds for every placement inside the windows
  Never,      // the relation can never hold
  Ambiguous,  // depends on the chosen times; decided by a binary
};

struct ObsDlRel {
  // Can the session complete no later than the observation end? Grants the
  // session's drained volume as credit at the observation's capacity event.
  EndRel dl_done_by_obs_end = EndRel::Ambiguous;
  int oy = -1;  // 1 = session completes before the observation end
  // Can the observation complete no later than the session start? Grants the
  // acquired volume as credit at the session's non-negativity event. Start
  // (not end) gating keeps the buffer non-negative at every instant inside
  // the session, not only at its end.
  EndRel obs_done_by_dl_start = EndRel::Ambiguous;
  int oz = -1;  // 1 = observation completes before the session start
};

struct Builder {
  const Instance& inst;
  MilpModel m;
  double TH;

  explicit Builder(const Instance& in) : inst(in), TH(in.params.horizon_s) {}

  int add_var(std::string name, VarKind kind, double lb, double ub, std::string desc) {
    if (name.size() > 64) throw std::logic_error("variable name too long: " + name);
    int idx = static_cast<int>(m.vars.size());
    auto [it, fresh] = m.var_by_name.emplace(name, idx);
    if (!fresh) throw std::logic_error("duplicate variable name: " + name);
    m.vars.push_back(Variable{std::move(name), kind, lb, ub});
    m.var_desc.push_back(std::move(desc));
    return idx;
  }

  Constraint& add_row(std::string name, RowSense sense, double rhs) {
    if (name.size() > 64) throw std::logic_error("row name too long: " + name);
    m.rows.push_back(Constraint{std::move(name), {}, sense, rhs});
    return m.rows.back();
  }
};

std::string obs_tag(const MilpModel::ObsVar& b) {
  return b.task + "_" + std::to_string(b.component) + "_" + b.sat + "_" +
         std::to_string(b.k);
}

std::string dl_tag(const MilpModel::DlVar& b) {
  return b.d + "_" + b.sat + "_" + std::to_string(b.l);
}

}  // namespace

MilpModel build_model(const Instance& inst) {
  return build_model(inst, std::vector<char>(inst.otws.size(), 1));
}

MilpModel build_model(const Instance& inst, const std::vector<char>& otw_retained) {
  {
    auto defects = check_instance(inst);
    if (!defects.empty()) {
      std::string msg = "build_model: instance has defects:";
      for (const auto& d : defects) msg += " [" + d.entity + ": " + d.rule + "]";
      throw std::invalid_argument(msg);
    }
  }
  if (otw_retained.size() != inst.otws.size())
    throw std::invalid_argument("build_model: retention mask size mismatch");

  Builder bld(inst);
  MilpModel& m = bld.m;
  const double TH = bld.TH;

  // ---- entity blocks and their variables (canonical construction order) ----
  std::map<std::pair<std::string, std::string>, std::vector<int>> otw_by_task_sat;
  for (size_t i = 0; i < inst.otws.size(); ++i) {
    if (!otw_retained[i]) continue;
    const Otw& w = inst.otws[i];
    otw_by_task_sat[{w.task, w.sat}].push_back(static_cast<int>(i));
  }

  std::map<std::string, int> task_block;  // task id -> index into m.tasks
  for (const ObsTask& tk : inst.tasks) {
    MilpModel::TaskVar tv;
    tv.task = tk.id;
    tv.stereo = tk.stereo();
    tv.weight = tk.priority_w;
    tv.xv = bld.add_var("xv_" + tk.id, VarKind::Binary, 0, 1, "select task " + tk.id);
    if (tv.stereo) {
      tv.xvs = bld.add_var("xs_" + tk.id, VarKind::Binary, 0, 1,
                           "select second stereo component of task " + tk.id);
      // pitch aggregate bounds are tightened after window blocks exist
      tv.pp1 = bld.add_var("pp_" + tk.id + "_1", VarKind::Continuous, 0, 0,
                           "pitch of the window chosen for component 1 of " + tk.id);
      tv.pp2 = bld.add_var("pp_" + tk.id + "_2", VarKind::Continuous, 0, 0,
                           "pitch of the window chosen for component 2 of " + tk.id);
      tv.sb = bld.add_var("sb_" + tk.id, VarKind::Binary, 0, 1,
                          "stereo side order for task " + tk.id);
    }
    task_block[tk.id] = static_cast<int>(m.tasks.size());
    m.tasks.push_back(tv);
  }

  for (const ObsTask& tk : inst.tasks) {
    int comps = tk.stereo() ? 2 : 1;
    for (int c = 1; c <= comps; ++c) {
      for (const Satellite& s : inst.satellites) {
        auto it = otw_by_task_sat.find({tk.id, s.id});
        if (it == otw_by_task_sat.end()) continue;
        for (int oi : it->second) {
          const Otw& w = inst.otws[oi];
          MilpModel::ObsVar b;
          b.task = tk.id;
          b.component = c;
          b.sat = s.id;
          b.k = w.k;
          b.t_open = w.t_open_s;
          b.t_close = w.t_close_s;
          b.roll = w.roll_rad;
          b.pitch_at_open = w.pitch_at_open_rad;
          b.pitch_slope = w.pitch_slope_rad_per_s;
          b.process_time = tk.process_time_s.at(s.id);
          std::string tag = obs_tag(b);
          double pa = b.pitch_at(b.t_open), pb = b.pitch_at(b.t_close);
          double lo = std::min(pa, pb), hi = std::max(pa, pb);
          b.x = bld.add_var("xw_" + tag, VarKind::Binary, 0, 1,
                            "use window " + tag + " for the observation");
          b.t = bld.add_var("t_" + tag, VarKind::Continuous, b.t_open, b.t_close,
                            "observation start time in window " + tag + " (s)");
          b.th = bld.add_var("th_" + tag, VarKind::Continuous, lo, hi,
                             "pitch at observation start in window " + tag + " (rad)");
          m.obs.push_back(b);
        }
      }
    }
  }

  for (const Dtw& d : inst.dtws) {
    MilpModel::DlVar b;
    b.d = d.d;
    b.sat = d.sat;
    b.station = d.station;
    b.l = d.l;
    b.t_open = d.t_open_s;
    b.t_close = d.t_close_s;
    std::string tag = dl_tag(b);
    double span = b.t_close - b.t_open;
    b.z = bld.add_var("z_" + tag, VarKind::Binary, 0, 1,
                      "activate download session in window " + tag);
    b.ta = bld.add_var("ta_" + tag, VarKind::Continuous, b.t_open, b.t_close,
                       "download start time in window " + tag + " (s)");
    b.tb = bld.add_var("tb_" + tag, VarKind::Continuous, b.t_open, b.t_close,
                       "download end time in window " + tag + " (s)");
    (void)span;
    m.dls.push_back(b);
  }

  // tighten stereo pitch aggregate bounds to the task's reachable pitch range
  std::vector<double> task_pmax(m.tasks.size(), 0.0);
  for (const auto& b : m.obs) {
    double pa = b.pitch_at(b.t_open), pb = b.pitch_at(b.t_close);
    double ext = std::max(std::fabs(pa), std::fabs(pb));
    int ti = task_block.at(b.task);
    task_pmax[ti] = std::max(task_pmax[ti], ext);
  }
  for (size_t ti = 0; ti < m.tasks.size(); ++ti) {
    const auto& tv = m.tasks[ti];
    if (!tv.stereo) continue;
    m.vars[tv.pp1].lb = -task_pmax[ti];
    m.vars[tv.pp1].ub = task_pmax[ti];
    m.vars[tv.pp2].lb = -task_pmax[ti];
    m.vars[tv.pp2].ub = task_pmax[ti];
  }

  // per-satellite ordinal lists (ordinals are indices into m.obs / m.dls)
  std::map<std::string, int> sat_index;
  for (size_t i = 0; i < inst.satellites.size(); ++i) sat_index[inst.satellites[i].id] = static_cast<int>(i);
  std::vector<std::vector<int>> obs_on(inst.satellites.size()), dls_on(inst.satellites.size());
  for (size_t i = 0; i < m.obs.size(); ++i) obs_on[sat_index.at(m.obs[i].sat)].push_back(static_cast<int>(i));
  for (size_t i = 0; i < m.dls.size(); ++i) dls_on[sat_index.at(m.dls[i].sat)].push_back(static_cast<int>(i));

  // ---- pair classification (observation/observation, per satellite) ----
  // Returns the worst-case pitch difference between two window models.
  auto max_pitch_delta = [&](const MilpModel::ObsVar& a, const MilpModel::ObsVar& b) {
    double a1 = a.pitch_at(a.t_open), a2 = a.pitch_at(a.t_close);
    double b1 = b.pitch_at(b.t_open), b2 = b.pitch_at(b.t_close);
    double alo = std::min(a1, a2), ahi = std::max(a1, a2);
    double blo = std::min(b1, b2), bhi = std::max(b1, b2);
    return std::max({ahi - blo, bhi - alo, 0.0});
  };
  // Minimum start-to-start transition when `a` is observed before `b`,
  // excluding the pitch-difference part handled by explicit rows.
  auto trans_base = [&](const MilpModel::ObsVar& a, const MilpModel::ObsVar& b,
                        const Satellite& s) {
    double droll = std::fabs(a.roll - b.roll);
    return a.process_time + s.stab_time_s + droll / s.slew_rate_rad_per_s + kTimePadS;
  };

  std::map<std::pair<int, int>, ObsPairRel> obs_rel;  // key: (lower ordinal, higher ordinal)
  for (size_t si = 0; si < inst.satellites.size(); ++si) {
    const Satellite& s = inst.satellites[si];
    const auto& list = obs_on[si];
    for (size_t ii = 0; ii < list.size(); ++ii) {
      for (size_t jj = ii + 1; jj < list.size(); ++jj) {
        int i = list[ii], j = list[jj];
        const auto& A = m.obs[i];
        const auto& B = m.obs[j];
        if (A.task == B.task && A.component == B.component) continue;  // mutually exclusive
        double dpeak = max_pitch_delta(A, B) / s.slew_rate_rad_per_s;
        ObsPairRel rel;
        if (A.t_close <= B.t_open) {
          rel.ord = Ord::FirstBeforeSecond;
          rel.needs_rows = A.t_close + trans_base(A, B, s) + dpeak > B.t_open;
        } else if (B.t_close <= A.t_open) {
          rel.ord = Ord::SecondBeforeFirst;
          rel.needs_rows = B.t_close + trans_base(B, A, s) + dpeak > A.t_open;
        } else {
          rel.ord = Ord::Ambiguous;
          rel.needs_rows = true;
          rel.oo = bld.add_var("oo_" + std::to_string(i) + "_" + std::to_string(j),
                               VarKind::Binary, 0, 1,
                               "order: observation " + obs_tag(A) + " before " + obs_tag(B));
        }
        obs_rel[{i, j}] = rel;
      }
    }
  }

  // ---- pair classification (download/download) ----
  std::map<std::pair<int, int>, DlPairRel> dl_rel;
  for (size_t i = 0; i < m.dls.size(); ++i) {
    for (size_t j = i + 1; j < m.dls.size(); ++j) {
      const auto& A = m.dls[i];
      const auto& B = m.dls[j];
      DlPairRel rel;
      rel.same_sat = A.sat == B.sat;
      rel.same_station = A.station == B.station;
      if (!rel.same_sat && !rel.same_station) continue;
      double prep = 0;
      if (rel.same_station) prep = std::max(prep, inst.find_station(A.station)->gs_prep_time_s);
      if (rel.same_sat) prep = std::max(prep, inst.find_satellite(A.sat)->sat_prep_time_s);
      if (A.t_close <= B.t_open) {
        rel.ord = Ord::FirstBeforeSecond;
        rel.needs_rows = A.t_close + prep + kTimePadS > B.t_open;
      } else if (B.t_close <= A.t_open) {
        rel.ord = Ord::SecondBeforeFirst;
        rel.needs_rows = B.t_close + prep + kTimePadS > A.t_open;
      } else {
        rel.ord = Ord::Ambiguous;
        rel.needs_rows = true;
        rel.od = bld.add_var("od_" + std::to_string(i) + "_" + std::to_string(j),
                             VarKind::Binary, 0, 1,
                             "order: session " + dl_tag(A) + " before " + dl_tag(B));
      }
      dl_rel[{static_cast<int>(i), static_cast<int>(j)}] = rel;
    }
  }

  // ---- end-order classification (observation end vs session end, same sat) ----
  std::map<std::pair<int, int>, ObsDlRel> obsdl_rel;  // key: (obs ordinal, dl ordinal)
  for (size_t si = 0; si < inst.satellites.size(); ++si) {
    for (int w : obs_on[si]) {
      for (int q : dls_on[si]) {
        const auto& W = m.obs[w];
        const auto& Q = m.dls[q];
        ObsDlRel rel;
        double w_earliest_end = W.t_open + W.process_time;
        double w_latest_end = W.t_close + W.process_time;
        if (Q.t_close <= w_earliest_end) {
          rel.dl_done_by_obs_end = EndRel::Always;
        } else if (w_latest_end <= Q.t_open) {
          rel.dl_done_by_obs_end = EndRel::Never;
        } else {
          rel.dl_done_by_obs_end = EndRel::Ambiguous;
          rel.oy = bld.add_var("oy_" + std::to_string(w) + "_" + std::to_string(q),
                               VarKind::Binary, 0, 1,
                               "session " + dl_tag(Q) + " completes before the end of observation " +
                                   obs_tag(W));
        }
        if (w_latest_end <= Q.t_open) {
          rel.obs_done_by_dl_start = EndRel::Always;
        } else if (w_earliest_end > Q.t_close) {
          rel.obs_done_by_dl_start = EndRel::Never;
        } else {
          rel.obs_done_by_dl_start = EndRel::Ambiguous;
          rel.oz = bld.add_var("oz_" + std::to_string(w) + "_" + std::to_string(q),
                               VarKind::Binary, 0, 1,
                               "observation " + obs_tag(W) + " completes before the start of session " +
                                   dl_tag(Q));
        }
        obsdl_rel[{w, q}] = rel;
      }
    }
  }

  // ---- objective ----
  for (const auto& tv : m.tasks) m.objective.push_back({tv.xv, tv.weight});

  // ---- selection linking ----
  for (const auto& tv : m.tasks) {
    if (!tv.stereo) continue;
    auto& r = bld.add_row("st4_" + tv.task, RowSense::EQ, 0);
    r.terms.push_back({tv.xv, 1});
    r.terms.push_back({tv.xvs, -1});
  }
  for (const auto& tv : m.tasks) {
    int comps = tv.stereo ? 2 : 1;
    for (int c = 1; c <= comps; ++c) {
      auto& r = bld.add_row("lnkV_" + tv.task + "_" + std::to_string(c), RowSense::EQ, 0);
      for (const Satellite& s : inst.satellites) {
        // one satellite-assignment variable per (task, component, satellite)
        // with at least one window
        bool any = false;
        for (const auto& b : m.obs)
          if (b.task == tv.task && b.component == c && b.sat == s.id) { any = true; break; }
        if (!any) continue;
        std::string name = "xa_" + tv.task + "_" + std::to_string(c) + "_" + s.id;
        int xa;
        auto it = m.var_by_name.find(name);
        if (it == m.var_by_name.end())
          xa = bld.add_var(name, VarKind::Binary, 0, 1,
                           "assign component " + std::to_string(c) + " of task " + tv.task +
                               " to satellite " + s.id);
        else
          xa = it->second;
        r.terms.push_back({xa, 1});
      }
      r.terms.push_back({c == 1 ? tv.xv : tv.xvs, -1});
    }
  }
  for (const auto& tv : m.tasks) {
    int comps = tv.stereo ? 2 : 1;
    for (int c = 1; c <= comps; ++c) {
      for (const Satellite& s : inst.satellites) {
        std::string name = "xa_" + tv.task + "_" + std::to_string(c) + "_" + s.id;
        auto it = m.var_by_name.find(name);
        if (it == m.var_by_name.end()) continue;
        auto& r = bld.add_row("lnkS_" + tv.task + "_" + std::to_string(c) + "_" + s.id,
                              RowSense::EQ, 0);
        for (const auto& b : m.obs)
          if (b.task == tv.task && b.component == c && b.sat == s.id)
            r.terms.push_back({b.x, 1});
        r.terms.push_back({it->second, -1});
      }
    }
  }

  // ---- window containment and pitch linking ----
  for (const auto& b : m.obs) {
    std::string tag = obs_tag(b);
    {
      auto& r = bld.add_row("w5a_" + tag, RowSense::LE, 0);
      r.terms.push_back({b.x, b.t_open});
      r.terms.push_back({b.t, -1});
    }
    {
      auto& r = bld.add_row("w5b_" + tag, RowSense::LE, TH);
      r.terms.push_back({b.t, 1});
      r.terms.push_back({b.x, TH - b.t_close});
    }
    {
      // th = pitch_at_open + slope * (t - t_open)
      auto& r = bld.add_row("thl_" + tag, RowSense::EQ,
                            b.pitch_at_open - b.pitch_slope * b.t_open);
      r.terms.push_back({b.th, 1});
      r.terms.push_back({b.t, -b.pitch_slope});
    }
  }

  // ---- stereo pitch aggregates and separation ----
  for (size_t ti = 0; ti < m.tasks.size(); ++ti) {
    const auto& tv = m.tasks[ti];
    if (!tv.stereo) continue;
    double pmax = task_pmax[ti];
    double Mp = 2 * pmax + 1e-9;
    for (size_t oi = 0; oi < m.obs.size(); ++oi) {
      const auto& b = m.obs[oi];
      if (b.task != tv.task) continue;
      int pp = b.component == 1 ? tv.pp1 : tv.pp2;
      std::string tag = obs_tag(b);
      {
        auto& r = bld.add_row("ppl1_" + tag, RowSense::LE, Mp);
        r.terms.push_back({pp, 1});
        r.terms.push_back({b.th, -1});
        r.terms.push_back({b.x, Mp});
      }
      {
        auto& r = bld.add_row("ppl2_" + tag, RowSense::LE, Mp);
        r.terms.push_back({b.th, 1});
        r.terms.push_back({pp, -1});
        r.terms.push_back({b.x, Mp});
      }
    }
    const ObsTask* tk = inst.find_task(tv.task);
    double beta = *tk->stereo_beta_rad + kStereoPadRad;
    double M11 = beta + 2 * pmax;
    {
      auto& r = bld.add_row("st11a_" + tv.task, RowSense::GE, beta - 2 * M11);
      r.terms.push_back({tv.pp1, 1});
      r.terms.push_back({tv.pp2, -1});
      r.terms.push_back({tv.sb, -M11});
      r.terms.push_back({tv.xv, -M11});
    }
    {
      auto& r = bld.add_row("st11b_" + tv.task, RowSense::GE, beta - M11);
      r.terms.push_back({tv.pp2, 1});
      r.terms.push_back({tv.pp1, -1});
      r.terms.push_back({tv.sb, M11});
      r.terms.push_back({tv.xv, -M11});
    }
  }

  // ---- same-satellite observation separation ----
  for (size_t si = 0; si < inst.satellites.size(); ++si) {
    const Satellite& s = inst.satellites[si];
    double max_tp = 0;
    for (int o : obs_on[si]) max_tp = std::max(max_tp, m.obs[o].process_time);
    const double r_rate = s.slew_rate_rad_per_s;
    const double M7 = TH + s.stab_time_s + max_tp +
                      (2 * s.roll_limit_rad + 2 * s.pitch_limit_rad) / r_rate + 1.0;
    const auto& list = obs_on[si];
    for (size_t ii = 0; ii < list.size(); ++ii) {
      for (size_t jj = ii + 1; jj < list.size(); ++jj) {
        int i = list[ii], j = list[jj];
        auto it = obs_rel.find({i, j});
        if (it == obs_rel.end() || !it->second.needs_rows) continue;
        const auto& rel = it->second;
        const auto& A = m.obs[i];
        const auto& B = m.obs[j];
        std::string sfx = "_" + std::to_string(i) + "_" + std::to_string(j);
        auto sep_rows = [&](const MilpModel::ObsVar& P, const MilpModel::ObsVar& Q,
                            const char* n1, const char* n2, double gate_coef_oo,
                            double gate_count) {
          // start(Q) >= start(P) + base + |pitch(P)-pitch(Q)|/rate, gated on
          // the listed binaries being 1
          double base = trans_base(P, Q, s);
          for (int sgn : {+1, -1}) {
            auto& r = bld.add_row((sgn > 0 ? n1 : n2) + sfx, RowSense::LE,
                                  gate_count * M7 - base);
            r.terms.push_back({P.t, 1});
            r.terms.push_back({Q.t, -1});
            r.terms.push_back({P.th, sgn / r_rate});
            r.terms.push_back({Q.th, -sgn / r_rate});
            r.terms.push_back({P.x, M7});
            r.terms.push_back({Q.x, M7});
            if (gate_coef_oo != 0) r.terms.push_back({rel.oo, gate_coef_oo * M7});
          }
        };
        if (rel.ord == Ord::FirstBeforeSecond) {
          sep_rows(A, B, "e7f1", "e7f2", 0, 2);
        } else if (rel.ord == Ord::SecondBeforeFirst) {
          sep_rows(B, A, "e7f1", "e7f2", 0, 2);
        } else {
          sep_rows(A, B, "e7a1", "e7a2", +1, 3);  // active when oo = 1
          sep_rows(B, A, "e7b1", "e7b2", -1, 2);  // active when oo = 0
        }
      }
    }
  }

  // ---- download session windows ----
  for (const auto& b : m.dls) {
    std::string tag = dl_tag(b);
    {
      auto& r = bld.add_row("d6a_" + tag, RowSense::LE, 0);
      r.terms.push_back({b.ta, 1});
      r.terms.push_back({b.tb, -1});
    }
    {
      // inactive sessions collapse to (t_open, t_open)
      auto& r = bld.add_row("d6p_" + tag, RowSense::LE, b.t_open);
      r.terms.push_back({b.tb, 1});
      r.terms.push_back({b.z, -(b.t_close - b.t_open)});
    }
  }

  // ---- station and same-satellite download separation ----
  for (const auto& [key, rel] : dl_rel) {
    if (!rel.needs_rows) continue;
    const auto& A = m.dls[key.first];
    const auto& B = m.dls[key.second];
    std::string sfx = "_" + std::to_string(key.first) + "_" + std::to_string(key.second);
    auto prep_rows = [&](const char* fam_f, const char* fam_a, const char* fam_b,
                         double prep) {
      double M = TH + prep + 1.0;
      if (rel.ord == Ord::FirstBeforeSecond || rel.ord == Ord::SecondBeforeFirst) {
        const auto& P = rel.ord == Ord::FirstBeforeSecond ? A : B;
        const auto& Q = rel.ord == Ord::FirstBeforeSecond ? B : A;
        auto& r = bld.add_row(fam_f + sfx, RowSense::LE, 2 * M - prep - kTimePadS);
        r.terms.push_back({P.tb, 1});
        r.terms.push_back({Q.ta, -1});
        r.terms.push_back({P.z, M});
        r.terms.push_back({Q.z, M});
      } else {
        {
          auto& r = bld.add_row(fam_a + sfx, RowSense::LE, 3 * M - prep - kTimePadS);
          r.terms.push_back({A.tb, 1});
          r.terms.push_back({B.ta, -1});
          r.terms.push_back({A.z, M});
          r.terms.push_back({B.z, M});
          r.terms.push_back({rel.od, M});
        }
        {
          auto& r = bld.add_row(fam_b + sfx, RowSense::LE, 2 * M - prep - kTimePadS);
          r.terms.push_back({B.tb, 1});
          r.terms.push_back({A.ta, -1});
          r.terms.push_back({A.z, M});
          r.terms.push_back({B.z, M});
          r.terms.push_back({rel.od, -M});
        }
      }
    };
    if (rel.same_station)
      prep_rows("e8f", "e8a", "e8b", inst.find_station(A.station)->gs_prep_time_s);
    if (rel.same_sat)
      prep_rows("e9f", "e9a", "e9b", inst.find_satellite(A.sat)->sat_prep_time_s);
  }

  // ---- sequencing rows tying the credit binaries to the actual times ----
  // Claiming a credit forces the corresponding time order; leaving the binary
  // at 0 costs nothing, so no reverse implication is needed.
  for (const auto& [key, rel] : obsdl_rel) {
    const auto& W = m.obs[key.first];
    const auto& Q = m.dls[key.second];
    std::string sfx = "_" + std::to_string(key.first) + "_" + std::to_string(key.second);
    if (rel.dl_done_by_obs_end == EndRel::Ambiguous) {
      // oy = 1 -> tb <= t + process
      double M = TH + 1.0;
      auto& r = bld.add_row("sq1" + sfx, RowSense::LE, M + W.process_time);
      r.terms.push_back({Q.tb, 1});
      r.terms.push_back({W.t, -1});
      r.terms.push_back({rel.oy, M});
    }
    if (rel.obs_done_by_dl_start == EndRel::Ambiguous) {
      // oz = 1 -> t + process <= ta
      double M = TH + W.process_time + 1.0;
      auto& r = bld.add_row("sq2" + sfx, RowSense::LE, M - W.process_time);
      r.terms.push_back({W.t, 1});
      r.terms.push_back({Q.ta, -1});
      r.terms.push_back({rel.oz, M});
    }
  }

  // ---- buffer feasibility at events ----
  for (size_t si = 0; si < inst.satellites.size(); ++si) {
    const Satellite& s = inst.satellites[si];
    const double zeta = s.acq_rate_units_per_s;
    const double gamma = s.down_rate_units_per_s;
    double sum_tp = 0;
    for (int o : obs_on[si]) sum_tp += m.obs[o].process_time;
    double sum_span = 0;
    for (int q : dls_on[si]) sum_span += m.dls[q].t_close - m.dls[q].t_open;
    const bool capacity_can_bind =
        s.initial_data_units + zeta * sum_tp > s.capacity_units - kUnitsPad;
    const double Mcap = s.initial_data_units + zeta * sum_tp + 1.0;
    const double Mdl = gamma * sum_span + 1.0;

    auto rel_of_obs_pair = [&](int a, int b) {  // relation of ordinals a vs b
      return obs_rel.at({std::min(a, b), std::max(a, b)});
    };

    if (capacity_can_bind) {
      for (int w : obs_on[si]) {
        const auto& W = m.obs[w];
        // assembled locally: credit-definition rows are emitted while the
        // event row is still being built
        Constraint r{"cap_" + obs_tag(W),
                     {},
                     RowSense::LE,
                     Mcap + s.capacity_units - kUnitsPad - s.initial_data_units -
                         zeta * W.process_time};
        r.terms.push_back({W.x, Mcap});
        for (int w2 : obs_on[si]) {
          if (w2 == w) continue;
          const auto& W2 = m.obs[w2];
          if (W2.task == W.task && W2.component == W.component) continue;
          const auto& rel = rel_of_obs_pair(w2, w);
          bool w2_first_known =
              (w2 < w && rel.ord == Ord::FirstBeforeSecond) ||
              (w2 > w && rel.ord == Ord::SecondBeforeFirst);
          bool w_first_known =
              (w < w2 && rel.ord == Ord::FirstBeforeSecond) ||
              (w > w2 && rel.ord == Ord::SecondBeforeFirst);
          if (w_first_known) continue;  // w2 acquired after this event
          if (w2_first_known) {
            r.terms.push_back({W2.x, zeta * W2.process_time});
            continue;
          }
          // ambiguous: credit = 1 iff w2 selected and ordered before w
          std::string nm = "ca_" + std::to_string(w2) + "_" + std::to_string(w);
          int a = bld.add_var(nm, VarKind::Continuous, 0, 1,
                              "1 if observation " + obs_tag(W2) +
                                  " is acquired before the end of " + obs_tag(W));
          auto& dr = bld.add_row("ca1_" + std::to_string(w2) + "_" + std::to_string(w),
                                 RowSense::LE, w2 < w ? 1.0 : 0.0);
          dr.terms.push_back({W2.x, 1});
          dr.terms.push_back({rel.oo, w2 < w ? 1.0 : -1.0});
          dr.terms.push_back({a, -1});
          r.terms.push_back({a, zeta * W2.process_time});
        }
        for (int q : dls_on[si]) {
          const auto& Q = m.dls[q];
          const auto& rel = obsdl_rel.at({w, q});
          if (rel.dl_done_by_obs_end == EndRel::Never) continue;
          if (rel.dl_done_by_obs_end == EndRel::Always) {
            r.terms.push_back({Q.tb, -gamma});
            r.terms.push_back({Q.ta, gamma});
            continue;
          }
          // ambiguous: credited seconds <= session duration, 0 unless oy = 1
          double span = Q.t_close - Q.t_open;
          std::string sfx = std::to_string(w) + "_" + std::to_string(q);
          int c = bld.add_var("cd_" + sfx, VarKind::Continuous, 0, span,
                              "seconds of session " + dl_tag(Q) +
                                  " credited as drained before the end of observation " +
                                  obs_tag(W));
          {
            auto& dr = bld.add_row("cda_" + sfx, RowSense::LE, 0);
            dr.terms.push_back({c, 1});
            dr.terms.push_back({Q.tb, -1});
            dr.terms.push_back({Q.ta, 1});
          }
          {
            auto& dr = bld.add_row("cdb_" + sfx, RowSense::LE, 0);
            dr.terms.push_back({c, 1});
            dr.terms.push_back({rel.oy, -span});
          }
          r.terms.push_back({c, -gamma});
        }
        m.rows.push_back(std::move(r));
      }
    }

    auto rel_of_dl_pair = [&](int a, int b) {
      return dl_rel.at({std::min(a, b), std::max(a, b)});
    };

    for (int q : dls_on[si]) {
      const auto& Q = m.dls[q];
      Constraint r{"non_" + dl_tag(Q),
                   {},
                   RowSense::LE,
                   Mdl + s.initial_data_units - kUnitsPad};
      r.terms.push_back({Q.tb, gamma});
      r.terms.push_back({Q.ta, -gamma});
      r.terms.push_back({Q.z, Mdl});
      for (int q2 : dls_on[si]) {
        if (q2 == q) continue;
        const auto& Q2 = m.dls[q2];
        const auto& rel = rel_of_dl_pair(q2, q);
        bool q2_first_known =
            (q2 < q && rel.ord == Ord::FirstBeforeSecond) ||
            (q2 > q && rel.ord == Ord::SecondBeforeFirst);
        bool q_first_known =
            (q < q2 && rel.ord == Ord::FirstBeforeSecond) ||
            (q > q2 && rel.ord == Ord::SecondBeforeFirst);
        if (q_first_known) continue;
        if (q2_first_known) {
          r.terms.push_back({Q2.tb, gamma});
          r.terms.push_back({Q2.ta, -gamma});
          continue;
        }
        // ambiguous: drained amount of q2 counted at q, >= actual when ordered first
        double cap2 = gamma * (Q2.t_close - Q2.t_open);
        std::string sfx = std::to_string(q2) + "_" + std::to_string(q);
        int dd = bld.add_var("dd_" + sfx, VarKind::Continuous, 0, cap2,
                             "units drained by session " + dl_tag(Q2) +
                                 " before the end of session " + dl_tag(Q));
        auto& dr = bld.add_row("dda_" + sfx, RowSense::LE, q2 < q ? cap2 : 0.0);
        dr.terms.push_back({Q2.tb, gamma});
        dr.terms.push_back({Q2.ta, -gamma});
        dr.terms.push_back({rel.od, q2 < q ? cap2 : -cap2});
        dr.terms.push_back({dd, -1});
        r.terms.push_back({dd, 1});
      }
      for (int w : obs_on[si]) {
        const auto& W = m.obs[w];
        const auto& rel = obsdl_rel.at({w, q});
        if (rel.obs_done_by_dl_start == EndRel::Never) continue;
        if (rel.obs_done_by_dl_start == EndRel::Always) {
          r.terms.push_back({W.x, -zeta * W.process_time});
          continue;
        }
        std::string sfx = std::to_string(w) + "_" + std::to_string(q);
        int aq = bld.add_var("aq_" + sfx, VarKind::Continuous, 0, 1,
                             "1 if observation " + obs_tag(W) +
                                 " is acquired before the start of session " + dl_tag(Q));
        {
          auto& dr = bld.add_row("aqa_" + sfx, RowSense::LE, 0);
          dr.terms.push_back({aq, 1});
          dr.terms.push_back({W.x, -1});
        }
        {
          auto& dr = bld.add_row("aqb_" + sfx, RowSense::LE, 0);
          dr.terms.push_back({aq, 1});
          dr.terms.push_back({rel.oz, -1});
        }
        r.terms.push_back({aq, -zeta * W.process_time});
      }
      m.rows.push_back(std::move(r));
    }
  }

  return m;
}

std::string export_lp(const MilpModel& model) {
  std::string out;
  out += "MAXIMIZE\n obj:";
  for (const auto& [v, c] : model.objective) {
    out += ' ';
    if (c >= 0) out += '+';
    out += num12(c) + " " + model.vars[v].name;
  }
  out += "\nSUBJECT TO\n";
  for (const auto& r : model.rows) {
    out += " " + r.name + ":";
    for (const auto& [v, c] : r.terms) {
      out += ' ';
      if (c >= 0) out += '+';
      out += num12(c) + " " + model.vars[v].name;
    }
    switch (r.sense) {
      case RowSense::LE: out += " <= "; break;
      case RowSense::GE: out += " >= "; break;
      case RowSense::EQ: out += " = "; break;
    }
    out += num12(r.rhs) + "\n";
  }
  out += "BOUNDS\n";
  for (const auto& v : model.vars)
    if (v.kind == VarKind::Continuous)
      out += " " + num12(v.lb) + " <= " + v.name + " <= " + num12(v.ub) + "\n";
  out += "BINARY\n";
  for (const auto& v : model.vars)
    if (v.kind == VarKind::Binary) out += " " + v.name + "\n";
  out += "END\n";
  return out;
}

namespace {

double parse_num(const std::string& tok, int line_no) {
  const char* b = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(b, &end);
  if (end != b + tok.size() || tok.empty())
    throw ParseError("expected a number, got '" + tok + "'", line_no, 1);
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

}  // namespace

MilpModel import_lp(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') { lines.push_back(cur); cur.clear(); }
      else if (ch != '\r') cur += ch;
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  enum Section { None, Obj, Rows, Bounds, Binary, Done };
  Section sec = None;
  struct RawRow { std::string line; int line_no; };
  std::vector<RawRow> obj_lines, row_lines, bound_lines, binary_lines;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& ln = lines[i];
    int no = static_cast<int>(i) + 1;
    if (ln.empty()) continue;
    if (ln == "MAXIMIZE") { sec = Obj; continue; }
    if (ln == "SUBJECT TO") { sec = Rows; continue; }
    if (ln == "BOUNDS") { sec = Bounds; continue; }
    if (ln == "BINARY") { sec = Binary; continue; }
    if (ln == "END") { sec = Done; continue; }
    switch (sec) {
      case Obj: obj_lines.push_back({ln, no}); break;
      case Rows: row_lines.push_back({ln, no}); break;
      case Bounds: bound_lines.push_back({ln, no}); break;
      case Binary: binary_lines.push_back({ln, no}); break;
      case None: throw ParseError("content before MAXIMIZE section", no, 1);
      case Done: throw ParseError("content after END", no, 1);
    }
  }
  if (sec != Done) throw ParseError("missing END line", static_cast<int>(lines.size()), 1);

  MilpModel m;
  auto add_var = [&](const std::string& name, VarKind kind, double lb, double ub,
                     int line_no) {
    if (m.var_by_name.count(name))
      throw ParseError("duplicate variable '" + name + "'", line_no, 1);
    m.var_by_name[name] = static_cast<int>(m.vars.size());
    m.vars.push_back(Variable{name, kind, lb, ub});
    m.var_desc.push_back("imported");
  };
  for (const auto& [ln, no] : bound_lines) {
    auto toks = split_ws(ln);
    if (toks.size() != 5 || toks[1] != "<=" || toks[3] != "<=")
      throw ParseError("malformed bounds line", no, 1);
    add_var(toks[2], VarKind::Continuous, parse_num(toks[0], no), parse_num(toks[4], no), no);
  }
  for (const auto& [ln, no] : binary_lines) {
    auto toks = split_ws(ln);
    if (toks.size() != 1) throw ParseError("malformed binary line", no, 1);
    add_var(toks[0], VarKind::Binary, 0, 1, no);
  }
  auto var_of = [&](const std::string& name, int line_no) {
    auto it = m.var_by_name.find(name);
    if (it == m.var_by_name.end())
      throw ParseError("unknown variable '" + name + "'", line_no, 1);
    return it->second;
  };
  auto parse_terms = [&](const std::vector<std::string>& toks, size_t from, size_t to,
                         int no, std::vector<std::pair<int, double>>& out) {
    if ((to - from) % 2 != 0) throw ParseError("dangling term", no, 1);
    for (size_t i = from; i < to; i += 2)
      out.push_back({var_of(toks[i + 1], no), parse_num(toks[i], no)});
  };
  {
    std::string joined;
    int first_no = obj_lines.empty() ? 1 : obj_lines[0].line_no;
    for (const auto& [ln, no] : obj_lines) joined += ln + " ";
    auto toks = split_ws(joined);
    if (toks.empty() || toks[0] != "obj:")
      throw ParseError("objective must start with 'obj:'", first_no, 1);
    parse_terms(toks, 1, toks.size(), first_no, m.objective);
  }
  for (const auto& [ln, no] : row_lines) {
    auto toks = split_ws(ln);
    if (toks.size() < 3 || toks[0].back() != ':')
      throw ParseError("malformed constraint line", no, 1);
    Constraint r;
    r.name = toks[0].substr(0, toks[0].size() - 1);
    const std::string& sense = toks[toks.size() - 2];
    if (sense == "<=") r.sense = RowSense::LE;
    else if (sense == ">=") r.sense = RowSense::GE;
    else if (sense == "=") r.sense = RowSense::EQ;
    else throw ParseError("unknown sense '" + sense + "'", no, 1);
    r.rhs = parse_num(toks.back(), no);
    parse_terms(toks, 1, toks.size() - 2, no, r.terms);
    m.rows.push_back(std::move(r));
  }
  return m;
}

Schedule extract_schedule(const MilpModel& model, const std::vector<double>& x) {
  if (x.size() != model.vars.size())
    throw std::invalid_argument("extract_schedule: assignment has " +
                                std::to_string(x.size()) + " values for " +
                                std::to_string(model.vars.size()) + " variables");
  constexpr double kTol = 1e-6;
  for (size_t i = 0; i < model.vars.size(); ++i) {
    const Variable& v = model.vars[i];
    if (v.kind == VarKind::Binary && std::fabs(x[i] - std::round(x[i])) > kTol)
      throw std::invalid_argument("extract_schedule: variable " + v.name +
                                  " is fractional (" + num12(x[i]) + ")");
    double pad = kTol * (1 + std::max(std::fabs(v.lb), std::fabs(v.ub)));
    if (x[i] < v.lb - pad || x[i] > v.ub + pad)
      throw std::invalid_argument("extract_schedule: variable " + v.name +
                                  " = " + num12(x[i]) + " is out of bounds");
  }
  for (const auto& r : model.rows) {
    double act = 0, scale = 1 + std::fabs(r.rhs);
    for (const auto& [v, c] : r.terms) {
      act += c * x[v];
      scale += std::fabs(c * x[v]);
    }
    double viol = 0;
    switch (r.sense) {
      case RowSense::LE: viol = act - r.rhs; break;
      case RowSense::GE: viol = r.rhs - act; break;
      case RowSense::EQ: viol = std::fabs(act - r.rhs); break;
    }
    if (viol > kTol * scale)
      throw std::invalid_argument("extract_schedule: assignment violates row " + r.name +
                                  " by " + num12(viol));
  }

  Schedule sch;
  for (const auto& b : model.obs) {
    if (x[b.x] < 0.5) continue;
    double t = round9(x[b.t]);
    ObsAssignment oa;
    oa.task = b.task;
    oa.component = b.component;
    oa.sat = b.sat;
    oa.k = b.k;
    oa.t_start_s = t;
    oa.pitch_rad = round9(b.pitch_at(t));
    sch.observations.push_back(oa);
  }
  for (const auto& b : model.dls) {
    if (x[b.z] < 0.5) continue;
    double ta = round9(x[b.ta]);
    double tb = round9(x[b.tb]);
    if (tb - ta <= 0) continue;  // zero-length sessions carry no data
    DownloadSession ds;
    ds.d = b.d;
    ds.sat = b.sat;
    ds.l = b.l;
    ds.t_start_s = ta;
    ds.t_end_s = tb;
    sch.downloads.push_back(ds);
  }
  canonicalize(sch);
  return sch;
}

}  // namespace aeos
