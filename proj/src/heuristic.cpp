#include "aeos/heuristic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "aeos/milp.hpp"

namespace aeos {

double max_slew_time(const Satellite& s) {
  // Canonical quantization, like every serialized quantity: desk values
  // specified in whole seconds (e.g. 120 s for 30/30 deg limits at 1 deg/s)
  // come out bit-exact instead of carrying degree-conversion round-off.
  return round9((2.0 * s.roll_limit_rad + 2.0 * s.pitch_limit_rad) /
                s.slew_rate_rad_per_s);
}

std::vector<Cluster> cluster_windows(const Instance& inst) {
  std::vector<Cluster> out;
  for (const auto& s : inst.satellites) {
    std::vector<int> idx;
    for (size_t i = 0; i < inst.otws.size(); ++i)
      if (inst.otws[i].sat == s.id) idx.push_back(static_cast<int>(i));
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      const Otw& A = inst.otws[a];
      const Otw& B = inst.otws[b];
      if (A.t_open_s != B.t_open_s) return A.t_open_s < B.t_open_s;
      if (A.task != B.task) return A.task < B.task;
      return A.k < B.k;
    });
    const double slew = max_slew_time(s);
    Cluster cur{s.id, {}};
    double latest_close = 0;
    auto flush = [&] {
      if (cur.members.size() >= 2) out.push_back(cur);
      cur.members.clear();
    };
    for (int i : idx) {
      const Otw& w = inst.otws[i];
      if (!cur.members.empty() && w.t_open_s - latest_close >= slew) flush();
      cur.members.push_back(i);
      latest_close = cur.members.size() == 1 ? w.t_close_s : std::max(latest_close, w.t_close_s);
    }
    flush();
  }
  return out;
}

int lambda_lower_bound(const Instance& inst) {
  if (inst.otws.empty() || inst.tasks.empty() || inst.satellites.empty())
    throw std::invalid_argument("lambda_lower_bound: needs windows, tasks and satellites");
  double sum_len = 0;
  for (const auto& w : inst.otws) sum_len += w.t_close_s - w.t_open_s;
  double avg_len = sum_len / static_cast<double>(inst.otws.size());
  double sum_tp = 0;
  long n_tp = 0;
  for (const auto& t : inst.tasks)
    for (const auto& [sid, tp] : t.process_time_s) {
      sum_tp += tp;
      ++n_tp;
    }
  if (n_tp == 0) throw std::invalid_argument("lambda_lower_bound: no processing times");
  double sum_stab = 0;
  for (const auto& s : inst.satellites) sum_stab += s.stab_time_s;
  double denom = sum_tp / static_cast<double>(n_tp) +
                 sum_stab / static_cast<double>(inst.satellites.size());
  if (denom <= 0) throw std::invalid_argument("lambda_lower_bound: zero denominator");
  // snap values a hair above an integer back down before rounding up
  return static_cast<int>(std::ceil(avg_len / denom - 1e-9));
}

PruneResult prune_clusters(const Instance& inst, int lambda) {
  if (lambda < 1) throw std::invalid_argument("prune_clusters: lambda must be >= 1");
  PruneResult pr;
  pr.otw_retained.assign(inst.otws.size(), 1);
  pr.summary.lambda = lambda;
  pr.summary.window_count = static_cast<int>(inst.otws.size());

  auto clusters = cluster_windows(inst);
  pr.summary.cluster_count = static_cast<int>(clusters.size());

  std::map<std::string, int> op;  // retained windows per task
  for (const auto& w : inst.otws) ++op[w.task];
  std::map<std::string, int> prio;
  for (const auto& t : inst.tasks) prio[t.id] = t.priority_w;

  // Rank a cluster's still-retained members best-to-worst: highest priority
  // first, then fewest remaining opportunities, then roll closest to the
  // running mean of the members ranked so far, then window identity.
  auto rank = [&](const Cluster& c) {
    std::vector<int> cand;
    for (int i : c.members)
      if (pr.otw_retained[i]) cand.push_back(i);
    std::vector<int> sel;
    double roll_sum = 0;
    while (!cand.empty()) {
      double mean = sel.empty() ? 0.0 : roll_sum / static_cast<double>(sel.size());
      size_t best = 0;
      auto key = [&](size_t pos) {
        const Otw& w = inst.otws[cand[pos]];
        double delta = sel.empty() ? 0.0 : std::fabs(w.roll_rad - mean);
        return std::tuple<int, int, double, int>(-prio[w.task], op[w.task], delta,
                                                 cand[pos]);
      };
      for (size_t j = 1; j < cand.size(); ++j)
        if (key(j) < key(best)) best = j;
      sel.push_back(cand[best]);
      roll_sum += inst.otws[cand[best]].roll_rad;
      cand.erase(cand.begin() + static_cast<long>(best));
    }
    return sel;
  };

  long budget = static_cast<long>(inst.otws.size());
  bool progress = true;
  while (progress && budget > 0) {
    progress = false;
    for (const auto& c : clusters) {
      while (budget > 0) {
        std::vector<int> sel = rank(c);
        if (static_cast<int>(sel.size()) <= lambda) break;
        bool removed = false;
        for (int pos = static_cast<int>(sel.size()) - 1; pos >= lambda; --pos) {
          int i = sel[pos];
          if (op[inst.otws[i].task] < 2) continue;  // never orphan a task
          pr.otw_retained[i] = 0;
          --op[inst.otws[i].task];
          --budget;
          ++pr.summary.removed_windows;
          progress = true;
          removed = true;
          break;
        }
        if (!removed) break;
      }
    }
  }
  return pr;
}

SolveReport solve_heuristic(const Instance& inst, int lambda, const BnbLimits& limits) {
  const auto t_start = std::chrono::steady_clock::now();
  PruneResult pr = prune_clusters(inst, lambda);
  try {
    pr.summary.lambda_lower_bound = lambda_lower_bound(inst);
  } catch (const std::invalid_argument&) {
    pr.summary.lambda_lower_bound = 0;
  }
  MilpModel model = build_model(inst, pr.otw_retained);
  MilpSolution sol = solve_milp(model, limits);
  SolveReport rep;
  rep.status = sol.status;
  rep.objective_j = sol.objective;
  rep.dual_bound = sol.dual_bound;
  rep.nodes_explored = sol.nodes;
  if (sol.has_x) rep.schedule = extract_schedule(model, sol.x);
  rep.pruning = pr.summary;
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// chronological greedy baseline
// ---------------------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CObs {  // committed observation
  const Otw* w = nullptr;
  std::string task;
  int comp = 1;
  double t = 0, tp = 0, theta = 0;
};

struct CDl {  // committed session
  const Dtw* w = nullptr;
  double ta = 0, tb = 0;
};

class Fifo {
 public:
  explicit Fifo(const Instance& inst) : inst_(inst) {}

  SolveReport run() {
    const auto t_start = std::chrono::steady_clock::now();
    struct Ev {
      double t;
      int kind;  // observations before sessions on open-time ties
      int idx;
    };
    std::vector<Ev> events;
    for (size_t i = 0; i < inst_.otws.size(); ++i)
      events.push_back({inst_.otws[i].t_open_s, 0, static_cast<int>(i)});
    for (size_t i = 0; i < inst_.dtws.size(); ++i)
      events.push_back({inst_.dtws[i].t_open_s, 1, static_cast<int>(i)});
    std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) {
      if (a.t != b.t) return a.t < b.t;
      if (a.kind != b.kind) return a.kind < b.kind;
      return a.idx < b.idx;
    });

    std::set<std::string> done;
    for (const Ev& e : events) {
      if (e.kind == 1) {
        commit_session(inst_.dtws[e.idx]);
        continue;
      }
      const Otw& w = inst_.otws[e.idx];
      const ObsTask& tk = *inst_.find_task(w.task);
      if (done.count(tk.id)) continue;
      if (!tk.stereo()) {
        if (try_observation(w, tk, 1, w.t_open_s, w.t_close_s, nullptr)) done.insert(tk.id);
      } else if (try_stereo(w, tk)) {
        done.insert(tk.id);
      }
    }

    SolveReport rep;
    double J = 0;
    for (const auto& t : inst_.tasks)
      if (done.count(t.id)) J += t.priority_w;
    rep.objective_j = J;
    rep.dual_bound = J;  // the greedy result is reported as-is, with no gap
    rep.status = SolveStatus::Optimal;
    for (const CObs& o : obs_) {
      ObsAssignment a;
      a.task = o.task;
      a.component = o.comp;
      a.sat = o.w->sat;
      a.k = o.w->k;
      a.t_start_s = round9(o.t);
      a.pitch_rad = round9(o.w->pitch_at(a.t_start_s));
      rep.schedule.observations.push_back(a);
    }
    for (const CDl& d : dls_) {
      double ta = round9(d.ta), tb = round9(d.tb);
      if (tb - ta <= 0) continue;
      rep.schedule.downloads.push_back({d.w->d, d.w->sat, d.w->l, ta, tb});
    }
    canonicalize(rep.schedule);
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
  }

 private:
  const Instance& inst_;
  std::vector<CObs> obs_;
  std::vector<CDl> dls_;

  // Earliest start in [lo, hi] keeping the candidate separated from every
  // committed same-satellite observation in one of the two orders, with the
  // same padded transition the optimization model uses. The bound depends on
  // the candidate's model pitch, so the sweep repeats until stable; the start
  // only ever moves later.
  double earliest_start(const Otw& w, double tp, double lo, double hi) const {
    const Satellite& s = *inst_.find_satellite(w.sat);
    const double r = s.slew_rate_rad_per_s;
    double t = lo;
    if (t > hi) return kInf;
    for (int pass = 0; pass < 256; ++pass) {
      bool moved = false;
      for (const CObs& o : obs_) {
        if (o.w->sat != w.sat) continue;
        double slew = (std::fabs(o.w->roll_rad - w.roll_rad) +
                       std::fabs(o.theta - w.pitch_at(t))) / r;
        double after_o = o.t + o.tp + s.stab_time_s + slew + kTimePadS;
        bool before_o = o.t >= t + tp + s.stab_time_s + slew + kTimePadS;
        if (t >= after_o || before_o) continue;
        t = after_o;
        moved = true;
        if (t > hi) return kInf;
      }
      if (!moved) return t;
    }
    return kInf;
  }

  // Conservative buffer-capacity check at every committed observation end on
  // one satellite: initial data plus everything acquired up to the event,
  // minus sessions fully completed by then, must fit under the capacity.
  bool capacity_ok(const std::string& sat) const {
    const Satellite& s = *inst_.find_satellite(sat);
    for (const CObs& o : obs_) {
      if (o.w->sat != sat) continue;
      double e = o.t + o.tp;
      double level = s.initial_data_units;
      for (const CObs& o2 : obs_)
        if (o2.w->sat == sat && o2.t <= o.t) level += s.acq_rate_units_per_s * o2.tp;
      for (const CDl& d : dls_)
        if (d.w->sat == sat && d.tb <= e) level -= s.down_rate_units_per_s * (d.tb - d.ta);
      if (level > s.capacity_units - kUnitsPad) return false;
    }
    return true;
  }

  bool try_observation(const Otw& w, const ObsTask& tk, int comp, double lo, double hi,
                       const double* stereo_theta) {
    double tp = tk.process_time_s.at(w.sat);
    double t;
    if (!stereo_theta) {
      t = earliest_start(w, tp, lo, hi);
    } else {
      // need |model pitch - *stereo_theta| >= beta (padded); intersect the
      // window with each side's half-line and take the earlier feasible start
      double beta = *tk.stereo_beta_rad + kStereoPadRad;
      double slope = w.pitch_slope_rad_per_s;
      double c0 = w.pitch_at_open_rad - slope * w.t_open_s;  // pitch = c0 + slope*t
      t = kInf;
      for (int side : {+1, -1}) {
        double bound = *stereo_theta + side * beta;
        double slo = lo, shi = hi;
        if (slope == 0) {
          if (side > 0 ? c0 < bound : c0 > bound) continue;
        } else {
          double tstar = (bound - c0) / slope;
          if ((side > 0) == (slope > 0)) slo = std::max(slo, tstar);
          else shi = std::min(shi, tstar);
        }
        if (slo > shi) continue;
        t = std::min(t, earliest_start(w, tp, slo, shi));
      }
    }
    if (t == kInf) return false;
    obs_.push_back({&w, tk.id, comp, t, tp, w.pitch_at(t)});
    if (capacity_ok(w.sat)) return true;
    obs_.pop_back();
    return false;
  }

  bool try_stereo(const Otw& w1, const ObsTask& tk) {
    if (!try_observation(w1, tk, 1, w1.t_open_s, w1.t_close_s, nullptr)) return false;
    double theta1 = obs_.back().theta;
    for (const Otw& w2 : inst_.otws) {
      if (w2.task != tk.id || w2.t_open_s < w1.t_open_s) continue;
      if (try_observation(w2, tk, 2, w2.t_open_s, w2.t_close_s, &theta1)) return true;
    }
    obs_.pop_back();  // second component fits nowhere: roll back the first
    return false;
  }

  void commit_session(const Dtw& q) {
    const Satellite& s = *inst_.find_satellite(q.sat);
    const GroundStation& g = *inst_.find_station(q.station);
    if (s.down_rate_units_per_s <= 0) return;
    double ta = q.t_open_s;
    for (const CDl& p : dls_) {
      if (p.w->sat == q.sat) ta = std::max(ta, p.tb + s.sat_prep_time_s + kTimePadS);
      if (p.w->station == q.station)
        ta = std::max(ta, p.tb + g.gs_prep_time_s + kTimePadS);
    }
    if (ta >= q.t_close_s) return;
    double avail = s.initial_data_units;
    for (const CObs& o : obs_)
      if (o.w->sat == q.sat && o.t + o.tp <= ta) avail += s.acq_rate_units_per_s * o.tp;
    for (const CDl& p : dls_)
      if (p.w->sat == q.sat) avail -= s.down_rate_units_per_s * (p.tb - p.ta);
    avail -= kUnitsPad;
    if (avail <= 0) return;
    double dur = std::min(q.t_close_s - ta, avail / s.down_rate_units_per_s);
    dls_.push_back({&q, ta, ta + dur});
  }
};

}  // namespace

SolveReport solve_fifo(const Instance& inst) { return Fifo(inst).run(); }

}  // namespace aeos
