// End-to-end tests for the command-line tool: each case drives the built
// binary through a scratch directory and checks exit codes, emitted files,
// and byte-level determinism of outputs.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aeos/domain.hpp"
#include "aeos/milp.hpp"
#include "aeos/validator.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& scratch_root() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("aeos-cli-test-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path case_dir(const std::string& name) {
  fs::path d = scratch_root() / name;
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::string& args, const fs::path& dir) {
  static int seq = 0;
  fs::path so = dir / ("stdout_" + std::to_string(seq) + ".log");
  fs::path se = dir / ("stderr_" + std::to_string(seq) + ".log");
  ++seq;
  std::string cmd = std::string("\"") + AEOS_CLI_PATH + "\" " + args + " > \"" +
                    so.string() + "\" 2> \"" + se.string() + "\"";
  int rc = std::system(cmd.c_str());
  CliRun r;
  if (WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

// Generates a small instance file and returns its path.
fs::path gen_instance(const fs::path& dir, const std::string& name, int tasks,
                      int seed) {
  fs::path p = dir / name;
  auto r = run_cli("generate -o \"" + p.string() + "\" --tasks " +
                       std::to_string(tasks) +
                       " --satellites 2 --stations 1 --seed " +
                       std::to_string(seed),
                   dir);
  REQUIRE(r.code == 0);
  return p;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string ln;
  while (std::getline(in, ln)) out.push_back(ln);
  return out;
}

std::vector<std::string> split_csv_row(const std::string& ln) {
  // No quoted fields appear in the rows these tests generate.
  std::vector<std::string> out;
  std::string cur;
  for (char c : ln) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("generate writes a checkable instance and is seed-deterministic") {
  fs::path d = case_dir("generate");
  auto a = run_cli("generate -o \"" + (d / "a.json").string() +
                       "\" --tasks 3 --satellites 2 --stations 1 --seed 7",
                   d);
  REQUIRE(a.code == 0);
  CHECK(a.out.find("wrote") != std::string::npos);
  CHECK(a.out.find("3 tasks") != std::string::npos);

  aeos::Instance inst = aeos::parse_instance(slurp(d / "a.json"));
  CHECK(inst.tasks.size() == 3);
  CHECK(inst.satellites.size() == 2);
  CHECK(inst.stations.size() == 1);
  CHECK(aeos::check_instance(inst).empty());

  auto b = run_cli("generate -o \"" + (d / "b.json").string() +
                       "\" --tasks 3 --satellites 2 --stations 1 --seed 7",
                   d);
  REQUIRE(b.code == 0);
  CHECK(slurp(d / "a.json") == slurp(d / "b.json"));

  auto c = run_cli("generate -o \"" + (d / "c.json").string() +
                       "\" --tasks 3 --satellites 2 --stations 1 --seed 8",
                   d);
  REQUIRE(c.code == 0);
  CHECK(slurp(d / "a.json") != slurp(d / "c.json"));
}

TEST_CASE("solve round-trips through validate for every algorithm") {
  fs::path d = case_dir("solve_validate");
  fs::path inst_path = gen_instance(d, "inst.json", 3, 7);
  aeos::Instance inst = aeos::parse_instance(slurp(inst_path));

  for (const std::string algo : {"exact", "heuristic", "fifo"}) {
    CAPTURE(algo);
    fs::path sched = d / ("sched_" + algo + ".json");
    fs::path rep = d / ("report_" + algo + ".json");
    auto s = run_cli("solve -i \"" + inst_path.string() + "\" -o \"" +
                         sched.string() + "\" --report \"" + rep.string() +
                         "\" --algo " + algo + " --time-limit 300",
                     d);
    REQUIRE(s.code == 0);
    CHECK(s.out.find("status=") != std::string::npos);

    aeos::Schedule sch = aeos::parse_schedule(slurp(sched));
    CHECK(!sch.observations.empty());
    CHECK(aeos::validate_schedule(inst, sch).pass);

    json j = json::parse(slurp(rep));
    CHECK(j.at("format") == "aeos-report");
    CHECK(j.at("objective_j").get<double>() > 0.0);
    CHECK(j.at("dual_bound").get<double>() >=
          j.at("objective_j").get<double>() - 1e-9);
    CHECK(j.contains("observations"));
    if (algo == "heuristic") {
      REQUIRE(j.contains("pruning"));
      CHECK(j["pruning"].at("lambda") == j["pruning"].at("lambda_lower_bound"));
    }

    auto v = run_cli(
        "validate -i \"" + inst_path.string() + "\" -s \"" + sched.string() + "\"",
        d);
    CHECK(v.code == 0);
    CHECK(v.out.find("PASS") != std::string::npos);
  }
}

TEST_CASE("validate rejects a corrupted schedule with exit code 4") {
  fs::path d = case_dir("validate_fail");
  fs::path inst_path = gen_instance(d, "inst.json", 3, 7);
  fs::path sched = d / "sched.json";
  auto s = run_cli("solve -i \"" + inst_path.string() + "\" -o \"" +
                       sched.string() + "\" --algo fifo",
                   d);
  REQUIRE(s.code == 0);

  aeos::Schedule sch = aeos::parse_schedule(slurp(sched));
  REQUIRE(!sch.observations.empty());
  sch.observations[0].t_start_s -= 1e6;  // push far outside any window
  spit(d / "bad.json", aeos::write_schedule(sch));

  fs::path verdict = d / "verdict.json";
  auto v = run_cli("validate -i \"" + inst_path.string() + "\" -s \"" +
                       (d / "bad.json").string() + "\" -o \"" +
                       verdict.string() + "\"",
                   d);
  CHECK(v.code == 4);
  CHECK(v.out.find("FAIL") != std::string::npos);

  json j = json::parse(slurp(verdict));
  CHECK(j.at("pass") == false);
  CHECK(!j.at("findings").empty());
}

TEST_CASE("missing files, malformed input, and bad usage exit with code 2") {
  fs::path d = case_dir("bad_input");
  auto missing = run_cli(
      "solve -i \"" + (d / "nope.json").string() + "\" -o \"" +
          (d / "x.json").string() + "\"",
      d);
  CHECK(missing.code == 2);
  CHECK(!missing.err.empty());

  spit(d / "garbage.json", "this is { not json");
  auto garbage = run_cli("solve -i \"" + (d / "garbage.json").string() +
                             "\" -o \"" + (d / "x.json").string() + "\"",
                         d);
  CHECK(garbage.code == 2);

  CHECK(run_cli("frobnicate", d).code == 2);
  CHECK(run_cli("generate --tasks 3", d).code == 2);  // missing required -o
  CHECK(run_cli("", d).code == 2);                    // subcommand required
}

TEST_CASE("export-lp emits a model that parses back to the same text") {
  fs::path d = case_dir("export_lp");
  fs::path inst_path = gen_instance(d, "inst.json", 3, 7);

  auto to_stdout = run_cli("export-lp -i \"" + inst_path.string() + "\"", d);
  REQUIRE(to_stdout.code == 0);
  for (const std::string section :
       {"MAXIMIZE", "SUBJECT TO", "BOUNDS", "BINARY", "END"})
    CHECK(to_stdout.out.find(section) != std::string::npos);

  fs::path lp = d / "model.lp";
  auto to_file = run_cli(
      "export-lp -i \"" + inst_path.string() + "\" -o \"" + lp.string() + "\"",
      d);
  REQUIRE(to_file.code == 0);
  std::string text = slurp(lp);
  CHECK(text == to_stdout.out);

  aeos::MilpModel model = aeos::import_lp(text);
  CHECK(aeos::export_lp(model) == text);
}

TEST_CASE("solve --deterministic produces byte-identical files across runs") {
  fs::path d = case_dir("deterministic_solve");
  fs::path inst_path = gen_instance(d, "inst.json", 3, 7);

  std::vector<std::string> outs;
  for (int run = 0; run < 2; ++run) {
    fs::path sched = d / ("sched_" + std::to_string(run) + ".json");
    fs::path rep = d / ("report_" + std::to_string(run) + ".json");
    auto s = run_cli("solve -i \"" + inst_path.string() + "\" -o \"" +
                         sched.string() + "\" --report \"" + rep.string() +
                         "\" --algo heuristic --deterministic",
                     d);
    REQUIRE(s.code == 0);
    CHECK(s.out.find("time_s=") == std::string::npos);
    outs.push_back(s.out);
  }
  CHECK(slurp(d / "sched_0.json") == slurp(d / "sched_1.json"));
  CHECK(slurp(d / "report_0.json") == slurp(d / "report_1.json"));
  CHECK(outs[0] == outs[1]);

  json j = json::parse(slurp(d / "report_0.json"));
  CHECK(j.at("wall_time_s").get<double>() == 0.0);
}

TEST_CASE("solve exits 3 when no schedule is found within the limits") {
  fs::path d = case_dir("time_limit");
  fs::path inst_path = gen_instance(d, "inst.json", 3, 7);
  auto s = run_cli("solve -i \"" + inst_path.string() + "\" -o \"" +
                       (d / "sched.json").string() +
                       "\" --algo exact --time-limit 1e-9",
                   d);
  CHECK(s.code == 3);
}

TEST_CASE("benchmark emits a stable table and CSV with relative columns") {
  fs::path d = case_dir("benchmark");
  fs::path ia = gen_instance(d, "alpha.json", 3, 11);
  fs::path ib = gen_instance(d, "bravo.json", 3, 12);

  std::string base = "benchmark -i \"" + ia.string() + "\" \"" + ib.string() +
                     "\" --deterministic --time-limit 300";
  auto r1 = run_cli(base + " -o \"" + (d / "t1.txt").string() + "\" --csv \"" +
                        (d / "c1.csv").string() + "\"",
                    d);
  REQUIRE(r1.code == 0);
  auto r2 = run_cli(base + " -o \"" + (d / "t2.txt").string() + "\" --csv \"" +
                        (d / "c2.csv").string() + "\"",
                    d);
  REQUIRE(r2.code == 0);
  CHECK(slurp(d / "t1.txt") == slurp(d / "t2.txt"));
  CHECK(slurp(d / "c1.csv") == slurp(d / "c2.csv"));

  std::string text = slurp(d / "t1.txt");
  for (const std::string needle :
       {"Scenario", "Direct MILP", "MILP-heuristic(", "FIFO", "alpha", "bravo",
        "lambda_LB="})
    CHECK(text.find(needle) != std::string::npos);

  auto lines = split_lines(slurp(d / "c1.csv"));
  REQUIRE(lines.size() == 7);  // header + (exact, heuristic, fifo) x 2
  CHECK(lines[0] ==
        "scenario,algorithm,J,gap,assigned_tasks,rel_performance_pct,time_s,"
        "rel_time_pct,lambda_lb,failed,note");
  int exact_rows = 0;
  for (size_t i = 1; i < lines.size(); ++i) {
    auto cells = split_csv_row(lines[i]);
    REQUIRE(cells.size() == 11);
    CHECK((cells[0] == "alpha" || cells[0] == "bravo"));
    CHECK(cells[6].empty());  // time masked
    CHECK(cells[7].empty());
    CHECK(cells[9] == "0");  // no row failed
    CHECK(std::stod(cells[2]) > 0.0);
    CHECK(std::stoi(cells[8]) >= 1);  // recorded retention lower bound
    if (cells[1] == "Direct MILP") {
      ++exact_rows;
      CHECK(cells[5] == "100");
      double best = std::stod(cells[2]);
      // Heuristic and FIFO rows of the same scenario never beat the exact J.
      for (size_t k = 1; k < lines.size(); ++k) {
        auto other = split_csv_row(lines[k]);
        if (other[0] == cells[0])
          CHECK(std::stod(other[2]) <= best + 1e-9);
      }
    }
  }
  CHECK(exact_rows == 2);

  // Restricting the run to chosen heuristic variants drops the other rows.
  auto r3 = run_cli("benchmark -i \"" + ia.string() +
                        "\" --lambda 2 --lambda 3 --no-exact --no-fifo "
                        "--deterministic --csv \"" +
                        (d / "c3.csv").string() + "\"",
                    d);
  REQUIRE(r3.code == 0);
  auto l3 = split_lines(slurp(d / "c3.csv"));
  REQUIRE(l3.size() == 3);
  CHECK(split_csv_row(l3[1])[1] == "MILP-heuristic(2)");
  CHECK(split_csv_row(l3[2])[1] == "MILP-heuristic(3)");
}

TEST_CASE("gantt renders committed activity and refuses invalid schedules") {
  fs::path d = case_dir("gantt");
  fs::path inst_path = gen_instance(d, "inst.json", 3, 7);
  fs::path sched = d / "sched.json";
  auto s = run_cli("solve -i \"" + inst_path.string() + "\" -o \"" +
                       sched.string() + "\" --algo heuristic",
                   d);
  REQUIRE(s.code == 0);
  aeos::Schedule sch = aeos::parse_schedule(slurp(sched));
  REQUIRE(!sch.observations.empty());

  fs::path svg = d / "plot.svg";
  auto g = run_cli("gantt -i \"" + inst_path.string() + "\" -s \"" +
                       sched.string() + "\" -o \"" + svg.string() + "\"",
                   d);
  REQUIRE(g.code == 0);
  std::string body = slurp(svg);
  CHECK(body.rfind("<svg", 0) == 0);
  CHECK(body.find("</svg>") != std::string::npos);
  CHECK(body.find("#d64545") != std::string::npos);  // observation boxes
  CHECK(body.find("#58c470") != std::string::npos);  // buffer trace
  for (const auto& sat : aeos::parse_instance(slurp(inst_path)).satellites)
    CHECK(body.find(sat.id) != std::string::npos);

  sch.observations[0].t_start_s -= 1e6;
  spit(d / "bad.json", aeos::write_schedule(sch));
  auto bad = run_cli("gantt -i \"" + inst_path.string() + "\" -s \"" +
                         (d / "bad.json").string() + "\" -o \"" +
                         (d / "bad.svg").string() + "\"",
                     d);
  CHECK(bad.code == 4);
  CHECK(bad.err.find("error:") != std::string::npos);
}
