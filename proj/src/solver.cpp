#include "aeos/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <queue>
#include <stdexcept>
#include <string>

namespace aeos {

namespace {

struct Node {
  std::shared_ptr<const Node> parent;
  int var = -1;       // branched variable (-1 at the root)
  double fixed = 0;   // value the variable was fixed to
  double bound = 0;   // inherited objective bound
  int depth = 0;
  long seq = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct NodeWorse {
  bool operator()(const NodePtr& a, const NodePtr& b) const {
    if (a->bound != b->bound) return a->bound < b->bound;  // higher bound first
    if (a->depth != b->depth) return a->depth < b->depth;  // then deeper (dives)
    return a->seq > b->seq;                                // then older
  }
};

double box_bound(const MilpModel& model) {
  double b = 0;
  for (const auto& [v, c] : model.objective)
    b += c * (c > 0 ? model.vars[v].ub : model.vars[v].lb);
  return b;
}

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const BnbLimits& limits) {
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
        .count();
  };
  // Every relaxation gets the remaining wall budget so a single stalled,
  // heavily degenerate LP cannot overrun the solver's time limit.
  auto lp_opt = [&] {
    LpOptions o;
    if (limits.time_limit_s > 0)
      o.time_limit_s = std::max(0.05, limits.time_limit_s - elapsed());
    return o;
  };

  bool integral_obj = true;
  for (const auto& [v, c] : model.objective)
    if (std::fabs(c - std::round(c)) > 1e-9) integral_obj = false;
  auto strengthen = [&](double b) {
    return integral_obj ? std::floor(b + 1e-6) : b;
  };

  std::vector<double> base_lb(model.vars.size()), base_ub(model.vars.size());
  for (size_t i = 0; i < model.vars.size(); ++i) {
    base_lb[i] = model.vars[i].lb;
    base_ub[i] = model.vars[i].ub;
  }

  const double kNegInf = -std::numeric_limits<double>::infinity();
  double incumbent = kNegInf;
  std::vector<double> inc_x;
  bool has_inc = false;
  auto can_improve = [&](double bound) {
    if (!has_inc) return true;
    return integral_obj ? bound > incumbent + 0.5 : bound > incumbent + 1e-9;
  };

  auto record_incumbent = [&](const LpResult& use) {
    double J = integral_obj ? std::round(use.objective) : use.objective;
    if (!has_inc || (integral_obj ? J > incumbent + 0.5 : J > incumbent + 1e-9)) {
      incumbent = J;
      inc_x = use.x;
      has_inc = true;
    }
  };

  // Rounding dive: from the given bounds, repeatedly freeze near-integral
  // binaries and fix the most fractional one. Lands on an integer-feasible
  // vertex far sooner than best-bound search alone, giving the tree an
  // incumbent to prune against.
  auto dive = [&](std::vector<double> dlb, std::vector<double> dub) {
    int pending = -1;  // last pivot, in case its first side is infeasible
    double pending_val = 0;
    for (int step = 0; step < 200; ++step) {
      if (limits.time_limit_s > 0 && elapsed() > limits.time_limit_s) return;
      LpResult r = solve_lp(model, dlb, dub, lp_opt());
      if (r.status != LpStatus::Optimal) {
        if (pending < 0) return;
        dlb[pending] = dub[pending] = 1.0 - pending_val;  // try the other side
        pending = -1;
        continue;
      }
      pending = -1;
      if (!can_improve(strengthen(r.objective))) return;
      int fv = -1;
      double fs = 1e-6;
      for (size_t j = 0; j < model.vars.size(); ++j) {
        if (model.vars[j].kind != VarKind::Binary || dlb[j] == dub[j]) continue;
        double f = r.x[j];
        double dist = std::min(f - std::floor(f), std::ceil(f) - f);
        if (dist > fs) {
          fs = dist;
          fv = static_cast<int>(j);
        } else if (dist <= 1e-9) {
          // freezing an exactly integral binary keeps the current point feasible
          dlb[j] = dub[j] = std::round(f);
        }
      }
      if (fv == -1) {
        for (size_t j = 0; j < model.vars.size(); ++j)
          if (model.vars[j].kind == VarKind::Binary)
            dlb[j] = dub[j] = std::round(r.x[j]);
        LpResult fixed = solve_lp(model, dlb, dub, lp_opt());
        record_incumbent(fixed.status == LpStatus::Optimal ? fixed : r);
        return;
      }
      pending = fv;
      pending_val = r.x[fv] >= 0.5 ? 1.0 : 0.0;
      dlb[fv] = dub[fv] = pending_val;
    }
  };

  std::priority_queue<NodePtr, std::vector<NodePtr>, NodeWorse> open;
  long seq = 0;
  {
    auto root = std::make_shared<Node>();
    root->bound = strengthen(box_bound(model));
    root->seq = seq++;
    open.push(root);
  }

  MilpSolution out;
  long nodes = 0;
  bool out_of_time = false;
  std::vector<double> lb, ub;
  while (!open.empty()) {
    if (limits.time_limit_s > 0 && elapsed() > limits.time_limit_s) {
      out_of_time = true;
      break;
    }
    if (limits.max_nodes > 0 && nodes >= limits.max_nodes) {
      out_of_time = true;
      break;
    }
    NodePtr node = open.top();
    open.pop();
    if (!can_improve(node->bound)) continue;
    lb = base_lb;
    ub = base_ub;
    for (const Node* p = node.get(); p; p = p->parent.get())
      if (p->var >= 0) lb[p->var] = ub[p->var] = p->fixed;
    LpResult lp = solve_lp(model, lb, ub, lp_opt());
    ++nodes;
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::IterLimit && limits.time_limit_s > 0 &&
        elapsed() > limits.time_limit_s) {
      open.push(node);  // unprocessed: keep its bound in the dual sweep below
      out_of_time = true;
      break;
    }
    if (lp.status != LpStatus::Optimal)
      throw std::runtime_error("branch and bound: relaxation did not converge");
    double bound = strengthen(lp.objective);
    if (!can_improve(bound)) continue;

    int frac_var = -1;
    double frac_score = 1e-6;
    for (size_t j = 0; j < model.vars.size(); ++j) {
      if (model.vars[j].kind != VarKind::Binary) continue;
      double f = lp.x[j];
      double dist = std::min(f - std::floor(f), std::ceil(f) - f);
      if (dist > frac_score) {
        frac_score = dist;
        frac_var = static_cast<int>(j);
      }
    }
    if (frac_var == -1) {
      // integral leaf: re-solve with binaries pinned for a clean vertex
      std::vector<double> flb = lb, fub = ub;
      for (size_t j = 0; j < model.vars.size(); ++j)
        if (model.vars[j].kind == VarKind::Binary)
          flb[j] = fub[j] = std::round(lp.x[j]);
      LpResult fixed = solve_lp(model, flb, fub, lp_opt());
      record_incumbent(fixed.status == LpStatus::Optimal ? fixed : lp);
      continue;
    }
    if (node->depth == 0 || nodes % 64 == 0) dive(lb, ub);
    if (!can_improve(bound)) continue;
    for (double v : {1.0, 0.0}) {
      auto child = std::make_shared<Node>();
      child->parent = node;
      child->var = frac_var;
      child->fixed = v;
      child->bound = bound;
      child->depth = node->depth + 1;
      child->seq = seq++;
      open.push(child);
    }
  }

  out.nodes = nodes;
  if (out_of_time) {
    out.status = SolveStatus::TimeLimit;
    double dual = has_inc ? incumbent : kNegInf;
    // remaining open nodes cap the proven bound
    while (!open.empty()) {
      dual = std::max(dual, open.top()->bound);
      open.pop();
    }
    out.dual_bound = dual == kNegInf ? box_bound(model) : dual;
  } else if (!has_inc) {
    out.status = SolveStatus::Infeasible;
    out.dual_bound = 0;
    return out;
  } else {
    out.status = SolveStatus::Optimal;
    out.dual_bound = incumbent;
  }
  if (has_inc) {
    out.objective = incumbent;
    out.x = std::move(inc_x);
    out.has_x = true;
  }
  return out;
}

SolveReport solve_exact(const Instance& inst, const BnbLimits& limits) {
  const auto t_start = std::chrono::steady_clock::now();
  MilpModel model = build_model(inst);
  MilpSolution sol = solve_milp(model, limits);
  SolveReport rep;
  rep.status = sol.status;
  rep.objective_j = sol.objective;
  rep.dual_bound = sol.dual_bound;
  rep.nodes_explored = sol.nodes;
  if (sol.has_x) rep.schedule = extract_schedule(model, sol.x);
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// exhaustive reference search
// ---------------------------------------------------------------------------

namespace {

struct Item {  // one observation to place: (task, component) -> window
  int task = 0;
  int comp = 1;
  int otw = 0;  // index into inst.otws
};

struct LeafVarMap {
  // variable indices in the leaf LP
  std::vector<int> t_of_item;
  std::vector<int> ta_of_dl, tb_of_dl;  // -1 when inactive
};

}  // namespace

EnumResult enumerate_schedules(const Instance& inst, const EnumLimits& limits) {
  {
    auto defects = check_instance(inst);
    if (!defects.empty()) {
      std::string msg = "enumerate_schedules: instance has defects:";
      for (const auto& d : defects) msg += " [" + d.entity + ": " + d.rule + "]";
      throw std::invalid_argument(msg);
    }
  }
  const int T = static_cast<int>(inst.tasks.size());
  if (T > 20)
    throw std::runtime_error("enumerate_schedules: more than 20 tasks");

  std::map<std::string, int> sat_idx, task_idx;
  for (size_t i = 0; i < inst.satellites.size(); ++i) sat_idx[inst.satellites[i].id] = static_cast<int>(i);
  for (size_t i = 0; i < inst.tasks.size(); ++i) task_idx[inst.tasks[i].id] = static_cast<int>(i);

  std::vector<std::vector<int>> task_windows(T);  // otw indices per task
  for (size_t i = 0; i < inst.otws.size(); ++i)
    task_windows[task_idx.at(inst.otws[i].task)].push_back(static_cast<int>(i));

  // capacity relevance per satellite, mirroring the model builder's condition
  std::vector<char> cap_rows(inst.satellites.size(), 0);
  for (size_t si = 0; si < inst.satellites.size(); ++si) {
    const Satellite& s = inst.satellites[si];
    double sum_tp = 0;
    for (size_t i = 0; i < inst.otws.size(); ++i) {
      const Otw& w = inst.otws[i];
      if (w.sat != s.id) continue;
      const ObsTask* tk = inst.find_task(w.task);
      sum_tp += (tk->stereo() ? 2 : 1) * tk->process_time_s.at(s.id);
    }
    cap_rows[si] =
        s.initial_data_units + s.acq_rate_units_per_s * sum_tp > s.capacity_units - kUnitsPad;
  }

  // sessions worth activating: only on satellites whose capacity can bind
  std::vector<int> usable_dls;
  for (size_t i = 0; i < inst.dtws.size(); ++i)
    if (cap_rows[sat_idx.at(inst.dtws[i].sat)]) usable_dls.push_back(static_cast<int>(i));
  if (usable_dls.size() > 16)
    throw std::runtime_error("enumerate_schedules: too many download windows");

  // subsets of tasks by decreasing total priority
  std::vector<std::pair<double, uint32_t>> subsets;
  for (uint32_t mask = 0; mask < (1u << T); ++mask) {
    double w = 0;
    for (int i = 0; i < T; ++i)
      if (mask & (1u << i)) w += inst.tasks[i].priority_w;
    subsets.push_back({w, mask});
  }
  std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  long leaves = 0;
  EnumResult result;

  auto pitch_of = [&](const Otw& w, double t) {
    return w.pitch_at_open_rad + w.pitch_slope_rad_per_s * (t - w.t_open_s);
  };
  auto item_tp = [&](const Item& it) {
    const Otw& w = inst.otws[it.otw];
    return inst.tasks[it.task].process_time_s.at(w.sat);
  };
  auto trans_base = [&](const Item& a, const Item& b) {
    const Otw& wa = inst.otws[a.otw];
    const Otw& wb = inst.otws[b.otw];
    const Satellite& s = *inst.find_satellite(wa.sat);
    return item_tp(a) + s.stab_time_s +
           std::fabs(wa.roll_rad - wb.roll_rad) / s.slew_rate_rad_per_s + kTimePadS;
  };
  auto max_pitch_delta = [&](const Otw& a, const Otw& b) {
    double a1 = a.pitch_at_open_rad, a2 = pitch_of(a, a.t_close_s);
    double b1 = b.pitch_at_open_rad, b2 = pitch_of(b, b.t_close_s);
    double alo = std::min(a1, a2), ahi = std::max(a1, a2);
    double blo = std::min(b1, b2), bhi = std::max(b1, b2);
    return std::max({ahi - blo, bhi - alo, 0.0});
  };

  for (const auto& [subset_w, mask] : subsets) {
    std::vector<int> chosen;  // task indices in the subset
    for (int i = 0; i < T; ++i)
      if (mask & (1u << i)) chosen.push_back(i);
    // per-task choice counts: windows for mono, ordered window pairs for stereo
    bool possible = true;
    std::vector<long> n_choices(chosen.size());
    for (size_t ci = 0; ci < chosen.size(); ++ci) {
      long n = static_cast<long>(task_windows[chosen[ci]].size());
      if (inst.tasks[chosen[ci]].stereo()) n *= n;
      if (n == 0) { possible = false; break; }
      n_choices[ci] = n;
    }
    if (!possible) continue;

    std::vector<long> odo(chosen.size(), 0);
    bool more_assignments = true;
    bool found = false;
    while (more_assignments && !found) {
      // materialize the items of this assignment
      std::vector<Item> items;
      for (size_t ci = 0; ci < chosen.size(); ++ci) {
        int ti = chosen[ci];
        const auto& wins = task_windows[ti];
        if (inst.tasks[ti].stereo()) {
          long n = static_cast<long>(wins.size());
          items.push_back({ti, 1, wins[odo[ci] / n]});
          items.push_back({ti, 2, wins[odo[ci] % n]});
        } else {
          items.push_back({ti, 1, wins[odo[ci]]});
        }
      }
      const int NI = static_cast<int>(items.size());

      // classify same-satellite item pairs
      // rel: 0 = i first (no rows), 1 = i first (rows), 2 = j first (no rows),
      //      3 = j first (rows), 4 = ambiguous
      std::vector<std::vector<int>> rel(NI, std::vector<int>(NI, -1));
      std::vector<std::pair<int, int>> amb_obs;
      for (int i = 0; i < NI; ++i) {
        for (int j = i + 1; j < NI; ++j) {
          const Otw& wi = inst.otws[items[i].otw];
          const Otw& wj = inst.otws[items[j].otw];
          if (wi.sat != wj.sat) continue;
          const Satellite& s = *inst.find_satellite(wi.sat);
          double dpeak = max_pitch_delta(wi, wj) / s.slew_rate_rad_per_s;
          if (wi.t_close_s <= wj.t_open_s) {
            bool rows = wi.t_close_s + trans_base(items[i], items[j]) + dpeak > wj.t_open_s;
            rel[i][j] = rows ? 1 : 0;
          } else if (wj.t_close_s <= wi.t_open_s) {
            bool rows = wj.t_close_s + trans_base(items[j], items[i]) + dpeak > wi.t_open_s;
            rel[i][j] = rows ? 3 : 2;
          } else {
            rel[i][j] = 4;
            amb_obs.push_back({i, j});
          }
        }
      }
      std::vector<int> stereo_tasks;  // indices into `chosen` domain: task ids
      for (int ti : chosen)
        if (inst.tasks[ti].stereo()) stereo_tasks.push_back(ti);

      // download activation masks (no-download first)
      const int D = static_cast<int>(usable_dls.size());
      for (uint32_t dmask = 0; dmask < (1u << D) && !found; ++dmask) {
        std::vector<int> active;  // dtw indices
        for (int qi = 0; qi < D; ++qi)
          if (dmask & (1u << qi)) active.push_back(usable_dls[qi]);

        // ambiguous orderings among active sessions
        // drel: 0 = a first no rows, 1 = a first rows, 2/3 symmetric, 4 = amb
        const int NA = static_cast<int>(active.size());
        std::vector<std::vector<int>> drel(NA, std::vector<int>(NA, -1));
        std::vector<std::pair<int, int>> amb_dl;
        for (int a = 0; a < NA; ++a) {
          for (int b = a + 1; b < NA; ++b) {
            const Dtw& da = inst.dtws[active[a]];
            const Dtw& db = inst.dtws[active[b]];
            bool ss = da.sat == db.sat, st = da.station == db.station;
            if (!ss && !st) continue;
            double prep = 0;
            if (st) prep = std::max(prep, inst.find_station(da.station)->gs_prep_time_s);
            if (ss) prep = std::max(prep, inst.find_satellite(da.sat)->sat_prep_time_s);
            if (da.t_close_s <= db.t_open_s) {
              drel[a][b] = da.t_close_s + prep + kTimePadS > db.t_open_s ? 1 : 0;
            } else if (db.t_close_s <= da.t_open_s) {
              drel[a][b] = db.t_close_s + prep + kTimePadS > da.t_open_s ? 3 : 2;
            } else {
              drel[a][b] = 4;
              amb_dl.push_back({a, b});
            }
          }
        }

        // credit relations between observation completions and sessions on the
        // same satellite; 0 = always, 1 = never, 2 = depends on the times
        std::vector<std::vector<int>> crel(NI, std::vector<int>(NA, -1));  // session done by obs end
        std::vector<std::vector<int>> arel(NI, std::vector<int>(NA, -1));  // obs done by session start
        std::vector<std::pair<int, int>> amb_cap, amb_acq;
        for (int i = 0; i < NI; ++i) {
          const Otw& w = inst.otws[items[i].otw];
          double tp = item_tp(items[i]);
          for (int a = 0; a < NA; ++a) {
            const Dtw& dq = inst.dtws[active[a]];
            if (dq.sat != w.sat) continue;
            if (dq.t_close_s <= w.t_open_s + tp) crel[i][a] = 0;
            else if (w.t_close_s + tp <= dq.t_open_s) crel[i][a] = 1;
            else {
              crel[i][a] = 2;
              amb_cap.push_back({i, a});
            }
            if (w.t_close_s + tp <= dq.t_open_s) arel[i][a] = 0;
            else if (w.t_open_s + tp > dq.t_close_s) arel[i][a] = 1;
            else {
              arel[i][a] = 2;
              amb_acq.push_back({i, a});
            }
          }
        }

        const int B = static_cast<int>(amb_obs.size() + amb_dl.size() + amb_cap.size() +
                                       amb_acq.size() + stereo_tasks.size());
        if (B > 24)
          throw std::runtime_error("enumerate_schedules: too many ambiguous pairs");
        for (uint64_t bits = 0; bits < (1ull << B) && !found; ++bits) {
          if (++leaves > limits.max_leaves)
            throw std::runtime_error(
                "enumerate_schedules: subproblem limit exceeded; the instance is too "
                "large for the reference search");
          int bit_at = 0;
          auto bit = [&](int k) { return (bits >> k) & 1ull; };
          const int obs_bit0 = bit_at;
          bit_at += static_cast<int>(amb_obs.size());
          const int dl_bit0 = bit_at;
          bit_at += static_cast<int>(amb_dl.size());
          const int cap_bit0 = bit_at;
          bit_at += static_cast<int>(amb_cap.size());
          const int acq_bit0 = bit_at;
          bit_at += static_cast<int>(amb_acq.size());
          const int side_bit0 = bit_at;

          // order predicates under this bit choice
          auto obs_before = [&](int i, int j) {  // does item i end before item j starts
            if (i < j) {
              int rl = rel[i][j];
              if (rl == 0 || rl == 1) return true;
              if (rl == 2 || rl == 3) return false;
              for (size_t k = 0; k < amb_obs.size(); ++k)
                if (amb_obs[k] == std::make_pair(i, j)) return bit(obs_bit0 + static_cast<int>(k)) == 1;
              return false;
            }
            int rl = rel[j][i];
            if (rl == 0 || rl == 1) return false;
            if (rl == 2 || rl == 3) return true;
            for (size_t k = 0; k < amb_obs.size(); ++k)
              if (amb_obs[k] == std::make_pair(j, i)) return bit(obs_bit0 + static_cast<int>(k)) == 0;
            return false;
          };
          auto dl_before = [&](int a, int b) {
            if (a < b) {
              int rl = drel[a][b];
              if (rl == 0 || rl == 1) return true;
              if (rl == 2 || rl == 3) return false;
              if (rl == 4)
                for (size_t k = 0; k < amb_dl.size(); ++k)
                  if (amb_dl[k] == std::make_pair(a, b)) return bit(dl_bit0 + static_cast<int>(k)) == 1;
              return false;  // unrelated sessions: no credit assumed
            }
            int rl = drel[b][a];
            if (rl == 0 || rl == 1) return false;
            if (rl == 2 || rl == 3) return true;
            if (rl == 4)
              for (size_t k = 0; k < amb_dl.size(); ++k)
                if (amb_dl[k] == std::make_pair(b, a)) return bit(dl_bit0 + static_cast<int>(k)) == 0;
            return false;
          };
          auto session_done_by_obs_end = [&](int i, int a) {
            if (crel[i][a] == 0) return true;
            if (crel[i][a] == 2)
              for (size_t k = 0; k < amb_cap.size(); ++k)
                if (amb_cap[k] == std::make_pair(i, a)) return bit(cap_bit0 + static_cast<int>(k)) == 1;
            return false;
          };
          auto obs_done_by_session_start = [&](int i, int a) {
            if (arel[i][a] == 0) return true;
            if (arel[i][a] == 2)
              for (size_t k = 0; k < amb_acq.size(); ++k)
                if (amb_acq[k] == std::make_pair(i, a)) return bit(acq_bit0 + static_cast<int>(k)) == 1;
            return false;
          };

          // ---- build the leaf feasibility LP ----
          MilpModel L;
          LeafVarMap vm;
          vm.t_of_item.resize(NI);
          vm.ta_of_dl.assign(NA, -1);
          vm.tb_of_dl.assign(NA, -1);
          auto add_var = [&](const std::string& name, double lo, double hi) {
            L.var_by_name[name] = static_cast<int>(L.vars.size());
            L.vars.push_back(Variable{name, VarKind::Continuous, lo, hi});
            L.var_desc.push_back("");
            return static_cast<int>(L.vars.size()) - 1;
          };
          for (int i = 0; i < NI; ++i) {
            const Otw& w = inst.otws[items[i].otw];
            vm.t_of_item[i] = add_var("t" + std::to_string(i), w.t_open_s, w.t_close_s);
          }
          for (int a = 0; a < NA; ++a) {
            const Dtw& dq = inst.dtws[active[a]];
            vm.ta_of_dl[a] = add_var("a" + std::to_string(a), dq.t_open_s, dq.t_close_s);
            vm.tb_of_dl[a] = add_var("b" + std::to_string(a), dq.t_open_s, dq.t_close_s);
          }
          auto add_row = [&](RowSense sense, double rhs) -> Constraint& {
            L.rows.push_back(Constraint{"r" + std::to_string(L.rows.size()), {}, sense, rhs});
            return L.rows.back();
          };
          auto theta_coef = [&](int i) {  // pitch(t_i) = slope * t + const
            const Otw& w = inst.otws[items[i].otw];
            return std::make_pair(w.pitch_slope_rad_per_s,
                                  w.pitch_at_open_rad -
                                      w.pitch_slope_rad_per_s * w.t_open_s);
          };
          // observation separation rows for every decided pair needing rows
          for (int i = 0; i < NI; ++i) {
            for (int j = i + 1; j < NI; ++j) {
              int rl = rel[i][j];
              if (rl == -1 || rl == 0 || rl == 2) continue;
              int p = i, q = j;
              if (rl == 3) std::swap(p, q);
              if (rl == 4) {
                if (!obs_before(i, j)) std::swap(p, q);
              }
              const Satellite& s = *inst.find_satellite(inst.otws[items[p].otw].sat);
              double rr = s.slew_rate_rad_per_s;
              auto [sp, cp] = theta_coef(p);
              auto [sq, cq] = theta_coef(q);
              double base = trans_base(items[p], items[q]);
              for (int sgn : {+1, -1}) {
                auto& row = add_row(RowSense::LE, -base - sgn * (cp - cq) / rr);
                row.terms.push_back({vm.t_of_item[p], 1 + sgn * sp / rr});
                row.terms.push_back({vm.t_of_item[q], -1 - sgn * sq / rr});
              }
            }
          }
          // session windows and separations
          for (int a = 0; a < NA; ++a) {
            auto& row = add_row(RowSense::LE, 0);
            row.terms.push_back({vm.ta_of_dl[a], 1});
            row.terms.push_back({vm.tb_of_dl[a], -1});
          }
          for (int a = 0; a < NA; ++a) {
            for (int b = a + 1; b < NA; ++b) {
              int rl = drel[a][b];
              if (rl == -1 || rl == 0 || rl == 2) continue;
              int p = a, q = b;
              if (rl == 3) std::swap(p, q);
              if (rl == 4 && !dl_before(a, b)) std::swap(p, q);
              const Dtw& dp = inst.dtws[active[p]];
              const Dtw& dq = inst.dtws[active[q]];
              double prep = 0;
              if (dp.station == dq.station)
                prep = std::max(prep, inst.find_station(dp.station)->gs_prep_time_s);
              if (dp.sat == dq.sat)
                prep = std::max(prep, inst.find_satellite(dp.sat)->sat_prep_time_s);
              auto& row = add_row(RowSense::LE, -prep - kTimePadS);
              row.terms.push_back({vm.tb_of_dl[p], 1});
              row.terms.push_back({vm.ta_of_dl[q], -1});
            }
          }
          // order rows backing any claimed completion credits
          for (size_t k = 0; k < amb_cap.size(); ++k) {
            if (!bit(cap_bit0 + static_cast<int>(k))) continue;
            auto [i, a] = amb_cap[k];
            double tp = item_tp(items[i]);
            auto& row = add_row(RowSense::LE, tp);  // tb <= t + tp
            row.terms.push_back({vm.tb_of_dl[a], 1});
            row.terms.push_back({vm.t_of_item[i], -1});
          }
          for (size_t k = 0; k < amb_acq.size(); ++k) {
            if (!bit(acq_bit0 + static_cast<int>(k))) continue;
            auto [i, a] = amb_acq[k];
            double tp = item_tp(items[i]);
            auto& row = add_row(RowSense::LE, -tp);  // t + tp <= ta
            row.terms.push_back({vm.t_of_item[i], 1});
            row.terms.push_back({vm.ta_of_dl[a], -1});
          }
          // buffer capacity at each observation end
          for (int i = 0; i < NI; ++i) {
            const Otw& w = inst.otws[items[i].otw];
            int si = sat_idx.at(w.sat);
            if (!cap_rows[si]) continue;
            const Satellite& s = inst.satellites[si];
            double zeta = s.acq_rate_units_per_s, gamma = s.down_rate_units_per_s;
            double acquired = s.initial_data_units + zeta * item_tp(items[i]);
            for (int j = 0; j < NI; ++j) {
              if (j == i) continue;
              if (inst.otws[items[j].otw].sat != w.sat) continue;
              if (obs_before(j, i)) acquired += zeta * item_tp(items[j]);
            }
            Constraint row{"", {}, RowSense::LE, s.capacity_units - kUnitsPad - acquired};
            for (int a = 0; a < NA; ++a) {
              if (inst.dtws[active[a]].sat != w.sat) continue;
              if (!session_done_by_obs_end(i, a)) continue;
              row.terms.push_back({vm.tb_of_dl[a], -gamma});
              row.terms.push_back({vm.ta_of_dl[a], gamma});
            }
            row.name = "c" + std::to_string(L.rows.size());
            L.rows.push_back(std::move(row));
          }
          // buffer non-negativity at each active session end
          for (int a = 0; a < NA; ++a) {
            const Dtw& dq = inst.dtws[active[a]];
            int si = sat_idx.at(dq.sat);
            const Satellite& s = inst.satellites[si];
            double zeta = s.acq_rate_units_per_s, gamma = s.down_rate_units_per_s;
            double available = s.initial_data_units;
            for (int i = 0; i < NI; ++i) {
              if (inst.otws[items[i].otw].sat != dq.sat) continue;
              if (obs_done_by_session_start(i, a)) available += zeta * item_tp(items[i]);
            }
            Constraint row{"", {}, RowSense::LE, available - kUnitsPad};
            row.terms.push_back({vm.tb_of_dl[a], gamma});
            row.terms.push_back({vm.ta_of_dl[a], -gamma});
            for (int b = 0; b < NA; ++b) {
              if (b == a || inst.dtws[active[b]].sat != dq.sat) continue;
              if (dl_before(b, a)) {
                row.terms.push_back({vm.tb_of_dl[b], gamma});
                row.terms.push_back({vm.ta_of_dl[b], -gamma});
              }
            }
            row.name = "n" + std::to_string(L.rows.size());
            L.rows.push_back(std::move(row));
          }
          // stereo pitch separation with the chosen side
          {
            int sk = 0;
            for (int ti : stereo_tasks) {
              int i1 = -1, i2 = -1;
              for (int i = 0; i < NI; ++i)
                if (items[i].task == ti) (items[i].comp == 1 ? i1 : i2) = i;
              double beta = *inst.tasks[ti].stereo_beta_rad + kStereoPadRad;
              auto [s1, c1] = theta_coef(i1);
              auto [s2, c2] = theta_coef(i2);
              double sgn = bit(side_bit0 + sk) ? 1.0 : -1.0;
              ++sk;
              // sgn*(pitch1 - pitch2) >= beta
              auto& row = add_row(RowSense::GE, beta - sgn * (c1 - c2));
              row.terms.push_back({vm.t_of_item[i1], sgn * s1});
              row.terms.push_back({vm.t_of_item[i2], -sgn * s2});
            }
          }

          std::vector<double> llb, lub;
          for (const auto& v : L.vars) {
            llb.push_back(v.lb);
            lub.push_back(v.ub);
          }
          LpResult lp = solve_lp(L, llb, lub);
          if (lp.status != LpStatus::Optimal) continue;

          // feasible: build the schedule
          Schedule sch;
          for (int i = 0; i < NI; ++i) {
            const Otw& w = inst.otws[items[i].otw];
            double t = round9(lp.x[vm.t_of_item[i]]);
            ObsAssignment oa;
            oa.task = inst.tasks[items[i].task].id;
            oa.component = items[i].comp;
            oa.sat = w.sat;
            oa.k = w.k;
            oa.t_start_s = t;
            oa.pitch_rad = round9(pitch_of(w, t));
            sch.observations.push_back(oa);
          }
          for (int a = 0; a < NA; ++a) {
            const Dtw& dq = inst.dtws[active[a]];
            double ta = round9(lp.x[vm.ta_of_dl[a]]);
            double tb = round9(lp.x[vm.tb_of_dl[a]]);
            if (tb - ta <= 0) continue;
            DownloadSession ds{dq.d, dq.sat, dq.l, ta, tb};
            sch.downloads.push_back(ds);
          }
          canonicalize(sch);
          result.objective = subset_w;
          result.schedule = sch;
          found = true;
        }
      }

      // advance the odometer
      int pos = static_cast<int>(odo.size()) - 1;
      for (; pos >= 0; --pos) {
        if (++odo[pos] < n_choices[pos]) break;
        odo[pos] = 0;
      }
      if (pos < 0) more_assignments = false;
    }
    if (found) {
      result.leaves = leaves;
      return result;
    }
  }
  result.leaves = leaves;
  return result;  // empty subset is always reachable, so this is J = 0
}

}  // namespace aeos
