#include <algorithm>
#include <cmath>
#include <vector>

#include "aeos/domain.hpp"
#include "aeos/scengen.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aeos;

namespace {

OrbitElements reference_orbit() {
  OrbitElements el;
  el.semi_major_axis_km = 6871.0;
  el.eccentricity = 0.0;
  el.inclination_rad = 97.3 * kPi / 180.0;
  el.arg_perigee_rad = 0.0;
  el.raan_rad = 0.0;
  el.true_anomaly_at_epoch_rad = 0.0;
  el.epoch_s = 0.0;
  return el;
}

double orbital_period(const OrbitElements& el) {
  double a = el.semi_major_axis_km;
  return 2.0 * kPi * std::sqrt(a * a * a / kMuEarthKm3PerS2);
}

double dist_km(const Vec3& a, const Vec3& b) { return norm(a - b); }

Satellite reference_satellite() {
  Satellite s;
  s.id = "sat0";
  s.roll_limit_rad = 30.0 * kPi / 180.0;
  s.pitch_limit_rad = 30.0 * kPi / 180.0;
  s.slew_rate_rad_per_s = 1.0 * kPi / 180.0;
  s.stab_time_s = 5.0;
  s.sat_prep_time_s = 20.0;
  s.capacity_units = 1000.0;
  s.initial_data_units = 0.0;
  s.acq_rate_units_per_s = 1.0;
  s.down_rate_units_per_s = 5.0;
  s.orbit = reference_orbit();
  return s;
}

}  // namespace

TEST_CASE("circular orbit period follows from the gravitational parameter") {
  double T = orbital_period(reference_orbit());
  CHECK(T == doctest::Approx(5668.0).epsilon(0.001));

  EciState s0 = kepler_propagate(reference_orbit(), 0.0);
  CHECK(norm(s0.position_km) == doctest::Approx(6871.0).epsilon(1e-9));
  double v_circ = std::sqrt(kMuEarthKm3PerS2 / 6871.0);
  CHECK(norm(s0.velocity_km_per_s) == doctest::Approx(v_circ).epsilon(1e-9));
  CHECK(std::fabs(dot(s0.position_km, s0.velocity_km_per_s)) < 1e-6);

  EciState s1 = kepler_propagate(reference_orbit(), T);
  CHECK(dist_km(s0.position_km, s1.position_km) < 1e-3);
}

TEST_CASE("propagation at the epoch returns the epoch state") {
  OrbitElements el = reference_orbit();
  el.true_anomaly_at_epoch_rad = 0.7;
  el.epoch_s = 250.0;
  EciState at_epoch = kepler_propagate(el, 250.0);
  OrbitElements el0 = el;
  el0.epoch_s = 0.0;
  EciState same = kepler_propagate(el0, 0.0);
  CHECK(dist_km(at_epoch.position_km, same.position_km) < 1e-9);
  CHECK(dist_km(at_epoch.velocity_km_per_s, same.velocity_km_per_s) < 1e-12);
}

TEST_CASE("closed-form propagation agrees with a numerical integrator") {
  OrbitElements el = reference_orbit();
  double T = orbital_period(el);
  EciState s0 = kepler_propagate(el, 0.0);

  // frozen reference behavior: quarter-period and full-period agreement
  EciState quarter_ref = oracle::rk4_twobody(s0, T / 4.0, 0.25);
  EciState quarter = kepler_propagate(el, T / 4.0);
  CHECK(dist_km(quarter.position_km, quarter_ref.position_km) < 1.0);

  EciState full_ref = oracle::rk4_twobody(s0, T, 0.25);
  EciState full = kepler_propagate(el, T);
  CHECK(dist_km(full.position_km, full_ref.position_km) < 1.0);
}

TEST_CASE("nadir target needs no roll or pitch") {
  EciState s;
  s.t_s = 0.0;
  s.position_km = {6871.0, 0.0, 0.0};
  s.velocity_km_per_s = {0.0, std::sqrt(kMuEarthKm3PerS2 / 6871.0), 0.0};
  auto p = pointing_angles(s, 0.0, 0.0);
  REQUIRE(p.has_value());
  CHECK(std::fabs(p->roll_rad) < 1e-9);
  CHECK(std::fabs(p->pitch_rad) < 1e-9);
}

TEST_CASE("target ahead along the ground track needs positive pitch only") {
  EciState s;
  s.t_s = 0.0;
  s.position_km = {6871.0, 0.0, 0.0};
  s.velocity_km_per_s = {0.0, std::sqrt(kMuEarthKm3PerS2 / 6871.0), 0.0};
  auto p = pointing_angles(s, 0.0, 5.0 * kPi / 180.0);
  REQUIRE(p.has_value());
  CHECK(std::fabs(p->roll_rad) < 1e-9);
  CHECK(p->pitch_rad > 0.01);
}

TEST_CASE("pitch sweeps from positive to negative across a pass; roll stays flat") {
  // 700-km-altitude pass over an on-track mid-latitude target
  OrbitElements el = reference_orbit();
  el.semi_major_axis_km = 7071.0;
  Satellite s = reference_satellite();
  s.orbit = el;
  double tstar = 1000.0;  // satellite crosses latitude ~60 deg
  EciState st = kepler_propagate(el, tstar);
  Vec3 u = normalized(st.position_km);
  ObsTask task;
  task.id = "t0";
  task.priority_w = 1;
  task.lat_rad = std::asin(u.z);
  task.lon_rad = std::atan2(u.y, u.x) - kEarthRotationRadPerS * tstar;
  task.process_time_s = {{"sat0", 3.0}};
  auto otws = extract_otws(s, task, 10000.0);
  bool found = false;
  for (const auto& w : otws) {
    if (w.t_open_s > tstar || w.t_close_s < tstar) continue;
    found = true;
    std::vector<double> pitches, rolls;
    for (double t = w.t_open_s; t <= w.t_close_s; t += 1.0) {
      auto p = pointing_angles(kepler_propagate(el, t), task.lat_rad, task.lon_rad);
      REQUIRE(p.has_value());
      pitches.push_back(p->pitch_rad);
      rolls.push_back(p->roll_rad);
    }
    REQUIRE(pitches.size() >= 30);
    CHECK(pitches.front() > 0.4);
    CHECK(pitches.back() < -0.4);
    for (size_t i = 1; i < pitches.size(); ++i)
      CHECK(pitches[i] <= pitches[i - 1] + 1e-9);
    double rmin = *std::min_element(rolls.begin(), rolls.end());
    double rmax = *std::max_element(rolls.begin(), rolls.end());
    CHECK(rmax - rmin < 2.0 * kPi / 180.0);
  }
  CHECK(found);
}

TEST_CASE("a target the pointing cone never reaches yields no windows") {
  Satellite s = reference_satellite();
  OrbitElements el = reference_orbit();
  el.inclination_rad = 0.0;  // equatorial orbit
  s.orbit = el;
  ObsTask t;
  t.id = "t0";
  t.priority_w = 1;
  t.lat_rad = 60.0 * kPi / 180.0;  // far outside the reachable band
  t.lon_rad = 0.0;
  t.process_time_s = {{"sat0", 3.0}};
  CHECK(extract_otws(s, t, 86400.0).empty());
}

TEST_CASE("window endpoints sit at the pitch limits") {
  SynthSpec spec;
  spec.n_tasks = 6;
  spec.seed = 1;
  Instance inst = synth_instance(spec);
  double lim = 30.0 * kPi / 180.0;
  double tol = 0.5 * kPi / 180.0;
  int checked = 0;
  for (const auto& w : inst.otws) {
    if (w.t_open_s < 1.0 || w.t_close_s > inst.params.horizon_s - 1.0) continue;
    // a pass grazing the roll limit is clipped by roll, not pitch
    if (std::fabs(w.roll_rad) > lim - 0.01) continue;
    CHECK(w.pitch_at(w.t_open_s) == doctest::Approx(lim).epsilon(tol / lim));
    CHECK(w.pitch_at(w.t_close_s) == doctest::Approx(-lim).epsilon(tol / lim));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("a day of opportunities per task stays within the sanity bound") {
  SynthSpec spec;
  spec.n_tasks = 10;
  spec.seed = 2;
  Instance inst = synth_instance(spec);
  std::map<std::string, int> per_task;
  for (const auto& w : inst.otws) ++per_task[w.task];
  for (const auto& [task, n] : per_task) CHECK(n <= 16);
}

TEST_CASE("near-polar orbit sees a polar station many times a day") {
  Satellite s = reference_satellite();
  GroundStation g;
  g.id = "gs0";
  g.lat_rad = 89.0 * kPi / 180.0;
  g.lon_rad = 0.0;
  g.alt_km = 0.0;
  g.gs_prep_time_s = 60.0;
  g.min_elevation_rad = 5.0 * kPi / 180.0;
  auto dtws = extract_dtws(s, g, 86400.0, "d0");
  CHECK(dtws.size() >= 10);
}

TEST_CASE("impossible elevation mask yields no contacts") {
  Satellite s = reference_satellite();
  GroundStation g;
  g.id = "gs0";
  g.lat_rad = 89.0 * kPi / 180.0;
  g.lon_rad = 0.0;
  g.alt_km = 0.0;
  g.gs_prep_time_s = 60.0;
  g.min_elevation_rad = kPi / 2.0;
  CHECK(extract_dtws(s, g, 86400.0, "d0").empty());
}

TEST_CASE("contact edges bracket the elevation crossing") {
  Satellite s = reference_satellite();
  GroundStation g;
  g.id = "gs0";
  g.lat_rad = 89.0 * kPi / 180.0;
  g.lon_rad = 0.0;
  g.alt_km = 0.0;
  g.gs_prep_time_s = 60.0;
  g.min_elevation_rad = 5.0 * kPi / 180.0;
  auto dtws = extract_dtws(s, g, 86400.0, "d0");
  REQUIRE(dtws.size() >= 3);
  int checked = 0;
  for (const auto& w : dtws) {
    if (checked >= 3) break;
    if (w.t_open_s < 1.0 || w.t_close_s > 86399.0) continue;
    auto elev = [&](double t) {
      return elevation_angle(kepler_propagate(*s.orbit, t), g);
    };
    CHECK(elev(w.t_open_s - 0.02) < g.min_elevation_rad);
    CHECK(elev(w.t_open_s + 0.02) > g.min_elevation_rad);
    CHECK(elev(w.t_close_s - 0.02) > g.min_elevation_rad);
    CHECK(elev(w.t_close_s + 0.02) < g.min_elevation_rad);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("synthesis follows the reference constellation and parameter table") {
  SynthSpec spec;
  spec.n_tasks = 50;
  spec.seed = 1;
  Instance a = synth_instance(spec);
  REQUIRE(a.satellites.size() == 4);
  for (size_t j = 0; j < 4; ++j) {
    const auto& orbit = a.satellites[j].orbit;
    REQUIRE(orbit.has_value());
    CHECK(orbit->semi_major_axis_km == doctest::Approx(6871.0));
    CHECK(orbit->eccentricity == doctest::Approx(0.0));
    CHECK(orbit->inclination_rad == doctest::Approx(97.3 * kPi / 180.0).epsilon(1e-8));
    CHECK(orbit->arg_perigee_rad ==
          doctest::Approx(90.0 * j * kPi / 180.0).epsilon(1e-8));
    CHECK(orbit->raan_rad == doctest::Approx(90.0 * j * kPi / 180.0).epsilon(1e-8));
  }

  SUBCASE("identical seed reproduces identical bytes") {
    Instance b = synth_instance(spec);
    CHECK(write_instance(a) == write_instance(b));
  }
  SUBCASE("strip tasks take the longer process time") {
    SynthSpec st = spec;
    st.n_tasks = 5;
    st.kind = TaskKind::Strip;
    Instance b = synth_instance(st);
    for (const auto& t : b.tasks)
      for (const auto& [sid, tp] : t.process_time_s)
        CHECK(tp == doctest::Approx(15.0));
  }
}

TEST_CASE("linear pitch model stays close to the sampled geometry") {
  SynthSpec spec;
  spec.n_tasks = 6;
  spec.seed = 4;
  Instance inst = synth_instance(spec);
  REQUIRE(!inst.otws.empty());
  for (const auto& w : inst.otws) {
    const Satellite* sat = inst.find_satellite(w.sat);
    const ObsTask* task = inst.find_task(w.task);
    double sum_sq = 0;
    int n = 0;
    for (double t = w.t_open_s; t <= w.t_close_s; t += 1.0) {
      auto p = pointing_angles(kepler_propagate(*sat->orbit, t), task->lat_rad,
                               task->lon_rad);
      REQUIRE(p.has_value());
      double res = w.pitch_at(t) - p->pitch_rad;
      sum_sq += res * res;
      ++n;
    }
    REQUIRE(n > 0);
    CHECK(std::sqrt(sum_sq / n) < 1.0 * kPi / 180.0);
  }
}

TEST_CASE("wider pointing limits never shrink windows") {
  SynthSpec spec;
  spec.n_tasks = 4;
  spec.seed = 5;
  Instance inst = synth_instance(spec);
  const Satellite& base = inst.satellites[0];
  const ObsTask& task = inst.tasks[0];
  auto small = extract_otws(base, task, inst.params.horizon_s);
  Satellite wide = base;
  wide.roll_limit_rad *= 1.2;
  wide.pitch_limit_rad *= 1.2;
  auto big = extract_otws(wide, task, inst.params.horizon_s);
  CHECK(big.size() >= small.size());
  for (const auto& w : small) {
    bool contained = false;
    for (const auto& W : big)
      if (W.t_open_s <= w.t_open_s + 1.1 && W.t_close_s >= w.t_close_s - 1.1)
        contained = true;
    CHECK(contained);
  }
}
