#include <cmath>
#include <string>
#include <vector>

#include "aeos/domain.hpp"
#include "aeos/heuristic.hpp"
#include "aeos/scengen.hpp"
#include "aeos/solver.hpp"
#include "aeos/validator.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aeos;

namespace {

constexpr double kDeg = kPi / 180.0;

Satellite plain_sat() {
  Satellite s;
  s.id = "sat0";
  s.roll_limit_rad = 30.0 * kDeg;
  s.pitch_limit_rad = 30.0 * kDeg;
  s.slew_rate_rad_per_s = 1.0 * kDeg;
  s.stab_time_s = 5.0;
  s.sat_prep_time_s = 20.0;
  s.capacity_units = 40.0;
  s.initial_data_units = 0.0;
  s.acq_rate_units_per_s = 1.0;
  s.down_rate_units_per_s = 5.0;
  return s;
}

Instance base_instance() {
  Instance in;
  in.params.horizon_s = 20000.0;
  in.satellites.push_back(plain_sat());
  return in;
}

void add_task(Instance& in, const std::string& id, int w) {
  ObsTask t;
  t.id = id;
  t.priority_w = w;
  t.lat_rad = 0.3;
  t.lon_rad = 0.8;
  t.process_time_s = {{"sat0", 3.0}};
  in.tasks.push_back(t);
}

void add_window(Instance& in, const std::string& task, double t_open,
                double t_close, double roll_rad) {
  Otw o;
  o.task = task;
  o.sat = "sat0";
  o.k = 0;
  for (const auto& w : in.otws)
    if (w.task == task && w.sat == "sat0") ++o.k;
  o.t_open_s = t_open;
  o.t_close_s = t_close;
  o.roll_rad = roll_rad;
  o.pitch_at_open_rad = 0.01;
  o.pitch_slope_rad_per_s = -0.001;
  in.otws.push_back(o);
}

int window_index(const Instance& in, const std::string& task, double t_open) {
  for (size_t i = 0; i < in.otws.size(); ++i)
    if (in.otws[i].task == task && in.otws[i].t_open_s == t_open)
      return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("worst-case slew time substitutions") {
  Satellite s = plain_sat();
  CHECK(max_slew_time(s) == doctest::Approx(120.0));
  s.roll_limit_rad = 45.0 * kDeg;
  s.pitch_limit_rad = 30.0 * kDeg;
  s.slew_rate_rad_per_s = 0.5 * kDeg;
  CHECK(max_slew_time(s) == doctest::Approx(300.0));
  s.roll_limit_rad = 0.0;
  s.pitch_limit_rad = 0.0;
  CHECK(max_slew_time(s) == doctest::Approx(0.0));
}

TEST_CASE("window clustering follows the chain rule") {
  SUBCASE("a 200 s gap with 120 s max slew separates the windows") {
    Instance in = base_instance();
    add_task(in, "t0", 3);
    add_task(in, "t1", 3);
    add_window(in, "t0", 1000.0, 1010.0, 0.1);
    add_window(in, "t1", 1210.0, 1220.0, 0.1);
    canonicalize(in);
    CHECK(cluster_windows(in).empty());
  }
  SUBCASE("two 50 s gaps chain three windows into one cluster") {
    Instance in = base_instance();
    add_task(in, "t0", 3);
    add_task(in, "t1", 3);
    add_task(in, "t2", 3);
    add_window(in, "t0", 1000.0, 1010.0, 0.1);
    add_window(in, "t1", 1060.0, 1070.0, 0.1);
    add_window(in, "t2", 1120.0, 1130.0, 0.1);
    canonicalize(in);
    auto clusters = cluster_windows(in);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].sat == "sat0");
    CHECK(clusters[0].members.size() == 3);
  }
  SUBCASE("seeded case-study scale matches the pairwise-closure reference") {
    SynthSpec spec;
    spec.n_tasks = 50;
    spec.seed = 1;
    Instance inst = synth_instance(spec);
    auto fast = cluster_windows(inst);
    auto ref = oracle::cluster_closure(inst);
    REQUIRE(fast.size() == ref.size());
    for (size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].sat == ref[i].sat);
      CHECK(fast[i].members == ref[i].members);
    }
    CHECK(!fast.empty());
  }
}

TEST_CASE("retention lower bound substitutions") {
  SUBCASE("600 s windows over 3 s processing and 5 s stabilization give 75") {
    Instance in = base_instance();
    add_task(in, "t0", 3);
    add_window(in, "t0", 1000.0, 1600.0, 0.1);
    canonicalize(in);
    CHECK(lambda_lower_bound(in) == 75);
  }
  SUBCASE("90 s windows over 10 s processing and 5 s stabilization give 6") {
    Instance in = base_instance();
    add_task(in, "t0", 3);
    in.tasks[0].process_time_s["sat0"] = 10.0;
    add_window(in, "t0", 1000.0, 1090.0, 0.1);
    canonicalize(in);
    CHECK(lambda_lower_bound(in) == 6);
  }
  SUBCASE("an instance without windows has no bound") {
    Instance in = base_instance();
    add_task(in, "t0", 3);
    canonicalize(in);
    CHECK_THROWS_AS((void)lambda_lower_bound(in), std::invalid_argument);
  }
  SUBCASE("a zero denominator is an error") {
    Instance in = base_instance();
    in.satellites[0].stab_time_s = 0.0;
    add_task(in, "t0", 3);
    in.tasks[0].process_time_s["sat0"] = 0.0;
    add_window(in, "t0", 1000.0, 1600.0, 0.1);
    canonicalize(in);
    CHECK_THROWS_AS((void)lambda_lower_bound(in), std::invalid_argument);
  }
}

TEST_CASE("pruning keeps the best-ranked cluster members") {
  SUBCASE("priorities pick the survivors") {
    Instance in = base_instance();
    int prio[6] = {5, 5, 4, 3, 2, 1};
    for (int i = 0; i < 6; ++i) {
      std::string id = "t" + std::to_string(i);
      add_task(in, id, prio[i]);
      add_window(in, id, 1000.0 + 60.0 * i, 1010.0 + 60.0 * i, 0.1);
      // a far-away singleton window keeps every task removable
      add_window(in, id, 15000.0 + 300.0 * i, 15010.0 + 300.0 * i, 0.1);
    }
    canonicalize(in);
    REQUIRE(cluster_windows(in).size() == 1);
    PruneResult pr = prune_clusters(in, 4);
    CHECK(pr.summary.removed_windows == 2);
    for (int i = 0; i < 6; ++i) {
      std::string id = "t" + std::to_string(i);
      bool in_cluster = pr.otw_retained[window_index(in, id, 1000.0 + 60.0 * i)];
      CHECK(in_cluster == (prio[i] >= 3));
      CHECK(pr.otw_retained[window_index(in, id, 15000.0 + 300.0 * i)]);
    }
  }
  SUBCASE("ties go to the roll closest to the retained average") {
    Instance in = base_instance();
    add_task(in, "ta", 5);
    add_task(in, "tb", 5);
    add_task(in, "tc", 3);
    add_task(in, "td", 3);
    add_window(in, "ta", 1000.0, 1010.0, 10.0 * kDeg);
    add_window(in, "tb", 1060.0, 1070.0, 20.0 * kDeg);
    add_window(in, "tc", 1120.0, 1130.0, 14.0 * kDeg);
    add_window(in, "td", 1180.0, 1190.0, 30.0 * kDeg);
    // equalize remaining opportunities of the tied pair
    add_window(in, "tc", 15000.0, 15010.0, 0.1);
    add_window(in, "td", 15300.0, 15310.0, 0.1);
    canonicalize(in);
    REQUIRE(cluster_windows(in).size() == 1);
    PruneResult pr = prune_clusters(in, 3);
    CHECK(pr.summary.removed_windows == 1);
    CHECK(pr.otw_retained[window_index(in, "tc", 1120.0)]);          // 14 vs mean 15
    CHECK_FALSE(pr.otw_retained[window_index(in, "td", 1180.0)]);    // 30 vs mean 15
  }
  SUBCASE("a task is never stripped of its last window") {
    Instance in = base_instance();
    for (int i = 0; i < 3; ++i) {
      std::string id = "t" + std::to_string(i);
      add_task(in, id, 3);
      add_window(in, id, 1000.0 + 60.0 * i, 1010.0 + 60.0 * i, 0.1);
    }
    canonicalize(in);
    PruneResult pr = prune_clusters(in, 1);
    CHECK(pr.summary.removed_windows == 0);
    for (char kept : pr.otw_retained) CHECK(kept == 1);
  }
  SUBCASE("removals stay within the window budget at case-study scale") {
    SynthSpec spec;
    spec.n_tasks = 50;
    spec.seed = 1;
    Instance inst = synth_instance(spec);
    PruneResult pr = prune_clusters(inst, 1);
    CHECK(pr.summary.removed_windows <= pr.summary.window_count);
    CHECK(pr.summary.window_count == static_cast<long>(inst.otws.size()));
    for (const auto& t : inst.tasks) {
      int left = 0;
      for (size_t i = 0; i < inst.otws.size(); ++i)
        if (inst.otws[i].task == t.id && pr.otw_retained[i]) ++left;
      bool had = false;
      for (const auto& w : inst.otws) had = had || w.task == t.id;
      if (had) CHECK(left >= 1);
    }
  }
}

TEST_CASE("tighter retention keeps a subset of looser retention") {
  SynthSpec spec;
  spec.n_tasks = 30;
  spec.seed = 1;
  Instance inst = synth_instance(spec);
  int lb = lambda_lower_bound(inst);
  for (int lambda = lb; lambda <= lb + 2; ++lambda) {
    CAPTURE(lambda);
    PruneResult small = prune_clusters(inst, lambda);
    PruneResult big = prune_clusters(inst, lambda + 1);
    for (size_t i = 0; i < inst.otws.size(); ++i)
      if (small.otw_retained[i]) CHECK(big.otw_retained[i]);
  }
}

TEST_CASE("pruned solve matches the exact solve when nothing clusters") {
  Instance in = base_instance();
  add_task(in, "t0", 3);
  add_task(in, "t1", 5);
  add_window(in, "t0", 1000.0, 1010.0, 0.1);
  add_window(in, "t1", 1500.0, 1510.0, 0.1);
  canonicalize(in);
  REQUIRE(cluster_windows(in).empty());
  SolveReport exact = solve_exact(in);
  SolveReport pruned = solve_heuristic(in, 1);
  CHECK(pruned.objective_j == doctest::Approx(exact.objective_j));
  CHECK(write_schedule(pruned.schedule) == write_schedule(exact.schedule));
  REQUIRE(pruned.pruning.has_value());
  CHECK(pruned.pruning->lambda == 1);
  CHECK(pruned.pruning->cluster_count == 0);
  CHECK(pruned.pruning->removed_windows == 0);
}

TEST_CASE("both heuristics stay below the exact optimum and validate") {
  for (int seed : {21, 22, 23}) {
    CAPTURE(seed);
    SynthSpec spec;
    spec.n_tasks = 4;
    spec.seed = seed;
    Instance inst = oracle::shrink_instance(synth_instance(spec), 4, 2, 1);
    SolveReport exact = solve_exact(inst);
    REQUIRE(exact.status == SolveStatus::Optimal);
    int lb = 1;
    try {
      lb = std::max(1, lambda_lower_bound(inst));
    } catch (const std::invalid_argument&) {
    }
    SolveReport heur = solve_heuristic(inst, lb);
    SolveReport fifo = solve_fifo(inst);
    CHECK(heur.objective_j <= exact.objective_j + 1e-9);
    CHECK(fifo.objective_j <= exact.objective_j + 1e-9);
    CHECK(validate_schedule(inst, exact.schedule).pass);
    CHECK(validate_schedule(inst, heur.schedule).pass);
    CHECK(validate_schedule(inst, fifo.schedule).pass);
    REQUIRE(heur.pruning.has_value());
    CHECK(heur.pruning->lambda == lb);
    CHECK(heur.pruning->lambda_lower_bound == lb);
  }
}

TEST_CASE("chronological greedy baseline") {
  SUBCASE("a single window is taken at its open") {
    Instance in = base_instance();
    add_task(in, "t0", 4);
    add_window(in, "t0", 100.0, 200.0, 0.1);
    canonicalize(in);
    SolveReport rep = solve_fifo(in);
    CHECK(rep.objective_j == doctest::Approx(4.0));
    REQUIRE(rep.schedule.observations.size() == 1);
    CHECK(rep.schedule.observations[0].t_start_s == doctest::Approx(100.0));
    CHECK(validate_schedule(in, rep.schedule).pass);
  }
  SUBCASE("greedy keeps the earlier window when the transition forbids both") {
    Instance in = base_instance();
    add_task(in, "t0", 2);
    add_task(in, "t1", 9);
    add_window(in, "t0", 100.0, 104.0, 0.1);
    add_window(in, "t1", 103.0, 107.0, 0.1);
    canonicalize(in);
    SolveReport rep = solve_fifo(in);
    CHECK(rep.objective_j == doctest::Approx(2.0));  // priority 9 arrived too late
    REQUIRE(rep.schedule.observations.size() == 1);
    CHECK(rep.schedule.observations[0].task == "t0");
  }
  SUBCASE("runs are deterministic") {
    SynthSpec spec;
    spec.n_tasks = 20;
    spec.seed = 9;
    Instance inst = synth_instance(spec);
    SolveReport a = solve_fifo(inst);
    SolveReport b = solve_fifo(inst);
    CHECK(write_schedule(a.schedule) == write_schedule(b.schedule));
    CHECK(a.objective_j == b.objective_j);
  }
}
