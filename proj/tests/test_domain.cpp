#include <algorithm>
#include <cmath>

#include "aeos/domain.hpp"
#include "aeos/scengen.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aeos;

namespace {

Instance minimal_instance() {
  Instance in;
  in.params.horizon_s = 1000.0;
  Satellite s;
  s.id = "sat0";
  s.roll_limit_rad = 0.523598776;
  s.pitch_limit_rad = 0.523598776;
  s.slew_rate_rad_per_s = 0.0174532925;
  s.stab_time_s = 5.0;
  s.sat_prep_time_s = 20.0;
  s.capacity_units = 40.0;
  s.initial_data_units = 0.0;
  s.acq_rate_units_per_s = 1.0;
  s.down_rate_units_per_s = 5.0;
  in.satellites.push_back(s);
  ObsTask t;
  t.id = "t0";
  t.priority_w = 3;
  t.lat_rad = 0.5;
  t.lon_rad = 2.0;
  t.process_time_s = {{"sat0", 3.0}};
  in.tasks.push_back(t);
  Otw w;
  w.task = "t0";
  w.sat = "sat0";
  w.k = 0;
  w.t_open_s = 100.0;
  w.t_close_s = 200.0;
  w.roll_rad = 0.1;
  w.pitch_at_open_rad = 0.4;
  w.pitch_slope_rad_per_s = -0.008;
  in.otws.push_back(w);
  canonicalize(in);
  return in;
}

bool has_rule(const std::vector<Defect>& defects, const std::string& rule) {
  return std::any_of(defects.begin(), defects.end(), [&](const Defect& d) {
    return d.rule.find(rule) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("minimal instance parses and round-trips") {
  Instance in = minimal_instance();
  CHECK(in.tasks.size() == 1);
  CHECK(in.satellites.size() == 1);
  std::string text = write_instance(in);
  Instance back = parse_instance(text);
  CHECK(back == in);
  CHECK(write_instance(back) == text);
}

TEST_CASE("valid instance yields no defects") {
  CHECK(check_instance(minimal_instance()).empty());
}

TEST_CASE("inverted window is rejected") {
  Instance in = minimal_instance();
  std::swap(in.otws[0].t_open_s, in.otws[0].t_close_s);
  CHECK(has_rule(check_instance(in), "window inverted"));
  CHECK_THROWS_AS(parse_instance(write_instance(in)), ParseError);
}

TEST_CASE("roll beyond the satellite limit is flagged") {
  Instance in = minimal_instance();
  in.otws[0].roll_rad = 40.0 * kPi / 180.0;  // limit is 30 deg
  CHECK(has_rule(check_instance(in), "roll exceeds limit"));
}

TEST_CASE("stored data above the buffer capacity is flagged") {
  Instance in = minimal_instance();
  in.satellites[0].initial_data_units = in.satellites[0].capacity_units + 1.0;
  CHECK(has_rule(check_instance(in), "initial_data_units"));
}

TEST_CASE("window indices must be contiguous") {
  Instance in = minimal_instance();
  in.otws[0].k = 1;  // only window, so the set {1} misses 0
  CHECK(has_rule(check_instance(in), "contiguous"));
}

TEST_CASE("stereo imaging block survives a round-trip") {
  Instance in = minimal_instance();
  in.tasks[0].stereo_beta_rad = 0.261799388;
  canonicalize(in);
  Instance back = parse_instance(write_instance(in));
  CHECK(back == in);
  REQUIRE(back.tasks[0].stereo_beta_rad.has_value());
  CHECK(*back.tasks[0].stereo_beta_rad == doctest::Approx(0.261799388).epsilon(1e-12));
}

TEST_CASE("schedule files round-trip") {
  Schedule sch;
  sch.observations.push_back({"t0", 1, "sat0", 0, round9(123.456789123), 0.25});
  sch.downloads.push_back({"d0", "sat0", 0, 300.0, 321.5});
  canonicalize(sch);
  std::string text = write_schedule(sch);
  Schedule back = parse_schedule(text);
  CHECK(back == sch);
  CHECK(write_schedule(back) == text);
}

TEST_CASE("synthesized case-study-scale instance matches the reference parameters") {
  SynthSpec spec;
  spec.n_tasks = 50;
  spec.seed = 1;
  Instance in = synth_instance(spec);
  CHECK(in.params.horizon_s == doctest::Approx(86400.0));
  CHECK(in.tasks.size() == 50);
  REQUIRE(in.satellites.size() == 4);
  for (const auto& s : in.satellites) {
    CHECK(s.slew_rate_rad_per_s == doctest::Approx(1.0 * kPi / 180.0).epsilon(1e-9));
    CHECK(s.roll_limit_rad == doctest::Approx(30.0 * kPi / 180.0).epsilon(1e-9));
    CHECK(s.pitch_limit_rad == doctest::Approx(30.0 * kPi / 180.0).epsilon(1e-9));
    CHECK(s.stab_time_s == doctest::Approx(5.0));
    CHECK(s.sat_prep_time_s == doctest::Approx(20.0));
    CHECK(s.down_rate_units_per_s == doctest::Approx(5.0));
  }
  for (const auto& g : in.stations) CHECK(g.gs_prep_time_s == doctest::Approx(60.0));
  for (const auto& t : in.tasks) {
    CHECK(t.priority_w >= 1);
    CHECK(t.priority_w <= 5);
    for (const auto& [sid, tp] : t.process_time_s) CHECK(tp == doctest::Approx(3.0));
    if (t.stereo())
      CHECK(*t.stereo_beta_rad == doctest::Approx(15.0 * kPi / 180.0).epsilon(1e-9));
  }
  CHECK(check_instance(in).empty());
}

TEST_CASE("hundred-task generated instance round-trips byte-identically") {
  SynthSpec spec;
  spec.n_tasks = 100;
  spec.seed = 7;
  Instance in = synth_instance(spec);
  std::string text = write_instance(in);
  Instance back = parse_instance(text);
  CHECK(back == in);
  CHECK(write_instance(back) == text);
}
