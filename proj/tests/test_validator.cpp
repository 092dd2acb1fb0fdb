#include <cmath>
#include <string>
#include <vector>

#include "aeos/domain.hpp"
#include "aeos/heuristic.hpp"
#include "aeos/scengen.hpp"
#include "aeos/validator.hpp"
#include "corruption_suite.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

using namespace aeos;

namespace {

const Finding* find_family(const Verdict& v, CheckFamily f) {
  for (const auto& x : v.findings)
    if (x.family == f && x.margin < 0) return &x;
  return nullptr;
}

bool only_family(const Verdict& v, CheckFamily f) {
  if (v.pass || !v.structural.empty()) return false;
  bool seen = false;
  for (const auto& x : v.findings) {
    if (x.margin >= 0) continue;
    if (x.family != f) return false;
    seen = true;
  }
  return seen;
}

}  // namespace

TEST_CASE("empty schedule against a valid instance passes") {
  auto [inst, sch] = fixture::valid_baseline();
  Verdict v = validate_schedule(inst, Schedule{});
  CHECK(v.pass);
  CHECK(v.findings.empty());
  CHECK(v.structural.empty());
}

TEST_CASE("hand-built feasible schedule passes every family") {
  auto [inst, sch] = fixture::valid_baseline();
  REQUIRE(check_instance(inst).empty());
  Verdict v = validate_schedule(inst, sch);
  CHECK(v.pass);
  CHECK(v.structural.empty());
  for (const auto& f : v.findings) CHECK(f.margin >= 0);
}

TEST_CASE("transition time is checked at the exact boundary") {
  Instance in;
  in.params.horizon_s = 2000.0;
  in.satellites.push_back(fixture::make_sat("sat0"));
  for (int i = 0; i < 2; ++i) {
    ObsTask t;
    t.id = "t" + std::to_string(i);
    t.priority_w = 3;
    t.lat_rad = 0.3;
    t.lon_rad = 0.8;
    t.process_time_s = {{"sat0", 3.0}};
    in.tasks.push_back(t);
    Otw o;
    o.task = t.id;
    o.sat = "sat0";
    o.k = 0;
    o.t_open_s = 100.0;
    o.t_close_s = 300.0;
    o.roll_rad = i == 0 ? 0.1 : 0.3;
    o.pitch_at_open_rad = i == 0 ? 0.05 : 0.12;
    o.pitch_slope_rad_per_s = 0.0;
    in.otws.push_back(o);
  }
  canonicalize(in);
  REQUIRE(check_instance(in).empty());
  const double rate = 0.017453293;
  const double sep = 3.0 + 5.0 + (0.2 + 0.07) / rate;

  Schedule sch;
  sch.observations.push_back({"t0", 1, "sat0", 0, 100.0, 0.05});
  sch.observations.push_back({"t1", 1, "sat0", 0, 100.0 + sep, 0.12});
  canonicalize(sch);
  CHECK(validate_schedule(in, sch).pass);

  sch.observations[1].t_start_s = 100.0 + sep - 0.01;
  Verdict bad = validate_schedule(in, sch);
  CHECK_FALSE(bad.pass);
  const Finding* f = find_family(bad, CheckFamily::ObsOverlap);
  REQUIRE(f != nullptr);
  CHECK(f->margin == doctest::Approx(-0.01).epsilon(1e-4));
}

TEST_CASE("stereo pair one degree short of the requirement") {
  Instance in;
  in.params.horizon_s = 2000.0;
  in.satellites.push_back(fixture::make_sat("sat0"));
  ObsTask t;
  t.id = "ts";
  t.priority_w = 5;
  t.lat_rad = 0.3;
  t.lon_rad = 0.8;
  t.process_time_s = {{"sat0", 3.0}};
  t.stereo_beta_rad = 0.261799388;  // 15 deg
  in.tasks.push_back(t);
  for (int k = 0; k < 2; ++k) {
    Otw o;
    o.task = "ts";
    o.sat = "sat0";
    o.k = k;
    o.t_open_s = 100.0 + 400.0 * k;
    o.t_close_s = 150.0 + 400.0 * k;
    o.roll_rad = 0.1;
    o.pitch_at_open_rad = k == 0 ? 0.0 : 0.244346095;  // 14 deg apart
    o.pitch_slope_rad_per_s = 0.0;
    in.otws.push_back(o);
  }
  canonicalize(in);
  REQUIRE(check_instance(in).empty());
  Schedule sch;
  sch.observations.push_back({"ts", 1, "sat0", 0, 100.0, 0.0});
  sch.observations.push_back({"ts", 2, "sat0", 1, 500.0, 0.244346095});
  canonicalize(sch);
  Verdict v = validate_schedule(in, sch);
  CHECK_FALSE(v.pass);
  const Finding* f = find_family(v, CheckFamily::Stereo);
  REQUIRE(f != nullptr);
  CHECK(f->margin == doctest::Approx(-0.017453293).epsilon(1e-4));
}

TEST_CASE("buffer trajectory arithmetic") {
  auto [inst, baseline] = fixture::valid_baseline();
  SUBCASE("no activity keeps the level at the initial units") {
    for (auto& s : inst.satellites) s.initial_data_units = 7.0;
    BufferTrajectory tr = buffer_trajectory(inst, Schedule{}, "sat0");
    REQUIRE(!tr.points.empty());
    CHECK(tr.points.front().t == doctest::Approx(0.0));
    for (const auto& p : tr.points) CHECK(p.units == doctest::Approx(7.0));
    CHECK(tr.carry_over == doctest::Approx(7.0));
  }
  SUBCASE("one observation then an over-long download goes negative unclamped") {
    Schedule sch;
    sch.observations.push_back({"t0", 1, "sat0", 0, 100.0, 0.05});
    sch.downloads.push_back({"d0", "sat0", 0, 1000.0, 1010.0});
    canonicalize(sch);
    BufferTrajectory tr = buffer_trajectory(inst, sch, "sat0");
    double peak = -1e9, last = 0;
    for (const auto& p : tr.points) {
      peak = std::max(peak, p.units);
      last = p.units;
    }
    CHECK(peak == doctest::Approx(3.0));
    CHECK(last == doctest::Approx(3.0 - 50.0));
    CHECK(tr.carry_over == doctest::Approx(-47.0));
    Verdict v = validate_schedule(inst, sch);
    CHECK(find_family(v, CheckFamily::BufferNonneg) != nullptr);
  }
  SUBCASE("breakpoints match a brute-force stepped simulation") {
    for (const auto& s : inst.satellites) {
      BufferTrajectory tr = buffer_trajectory(inst, baseline, s.id);
      REQUIRE(!tr.points.empty());
      CHECK(tr.points.front().t == doctest::Approx(0.0));
      CHECK(tr.points.front().units == doctest::Approx(s.initial_data_units));
      for (size_t i = 0; i + 1 < tr.points.size(); ++i)
        CHECK(tr.points[i].t <= tr.points[i + 1].t);
      for (size_t i = 0; i < tr.points.size(); ++i) {
        if (i + 1 < tr.points.size() && tr.points[i + 1].t == tr.points[i].t)
          continue;  // impulse: compare the post-jump value
        if (tr.points[i].t == 0.0) continue;
        double ref = oracle::buffer_level_stepped(inst, baseline, s.id,
                                                  tr.points[i].t, 0.01);
        CHECK(tr.points[i].units == doctest::Approx(ref).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("every corruption in the suite trips exactly its own family") {
  auto suite = fixture::corruption_suite();
  REQUIRE(suite.size() == 10);
  for (const auto& c : suite) {
    CAPTURE(c.name);
    CHECK(only_family(validate_schedule(c.inst, c.sch), c.family));
  }
}

TEST_CASE("unresolved references are structural failures, not findings") {
  auto [inst, sch] = fixture::valid_baseline();
  SUBCASE("unknown task") {
    sch.observations.push_back({"zz", 1, "sat0", 0, 100.0, 0.0});
    Verdict v = validate_schedule(inst, sch);
    CHECK_FALSE(v.pass);
    CHECK(!v.structural.empty());
  }
  SUBCASE("unknown window index") {
    sch.observations[0].k = 7;
    Verdict v = validate_schedule(inst, sch);
    CHECK_FALSE(v.pass);
    CHECK(!v.structural.empty());
  }
  SUBCASE("unknown download window") {
    sch.downloads[0].l = 9;
    Verdict v = validate_schedule(inst, sch);
    CHECK_FALSE(v.pass);
    CHECK(!v.structural.empty());
  }
}

TEST_CASE("verdict reports render for humans and machines") {
  auto suite = fixture::corruption_suite();
  const auto& c = suite.back();  // pitch-link corruption
  Verdict v = validate_schedule(c.inst, c.sch);
  std::string text = report_text(v);
  CHECK(text.find("PitchLink") != std::string::npos);
  CHECK(text.find("FAIL") != std::string::npos);

  nlohmann::json j = nlohmann::json::parse(report_json(v));
  CHECK(j.at("pass").get<bool>() == false);
  REQUIRE(j.at("findings").is_array());
  bool has_pitch = false;
  for (const auto& f : j.at("findings"))
    if (f.at("family").get<std::string>() == "PitchLink") has_pitch = true;
  CHECK(has_pitch);

  Verdict ok = validate_schedule(c.inst, Schedule{});
  CHECK(report_text(ok).find("PASS") != std::string::npos);
  CHECK(nlohmann::json::parse(report_json(ok)).at("pass").get<bool>());
}

TEST_CASE("algorithm outputs on a generated instance pass and match the oracle") {
  SynthSpec spec;
  spec.n_tasks = 10;
  spec.seed = 8;
  Instance inst = oracle::shrink_instance(synth_instance(spec), 10, 2, 1);
  SolveReport rep = solve_fifo(inst);
  REQUIRE(!rep.schedule.observations.empty());
  Verdict v = validate_schedule(inst, rep.schedule);
  CHECK(v.pass);
  const Satellite& s = inst.satellites[0];
  BufferTrajectory tr = buffer_trajectory(inst, rep.schedule, s.id);
  int checked = 0;
  for (size_t i = 0; i < tr.points.size() && checked < 12; ++i) {
    if (i + 1 < tr.points.size() && tr.points[i + 1].t == tr.points[i].t) continue;
    if (tr.points[i].t == 0.0) continue;
    double ref =
        oracle::buffer_level_stepped(inst, rep.schedule, s.id, tr.points[i].t, 0.01);
    CHECK(tr.points[i].units == doctest::Approx(ref).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked > 0);
}
