// Command-line front end: instance generation, solving, validation, LP export,
// benchmarking across algorithms, and SVG timeline rendering.
//
// Exit codes: 0 success, 2 invalid input, 3 infeasible or failed solve,
// 4 validation failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aeos/benchmark.hpp"
#include "aeos/domain.hpp"
#include "aeos/gantt.hpp"
#include "aeos/heuristic.hpp"
#include "aeos/milp.hpp"
#include "aeos/scengen.hpp"
#include "aeos/solver.hpp"
#include "aeos/validator.hpp"

namespace {

constexpr int kOk = 0, kBadInput = 2, kFailedSolve = 3, kValidationFail = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw aeos::ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw aeos::ParseError("cannot write file: " + path);
  out << text;
}

aeos::Instance load_instance(const std::string& path) {
  return aeos::parse_instance(slurp(path));
}

aeos::Schedule load_schedule(const std::string& path) {
  return aeos::parse_schedule(slurp(path));
}

double deg2rad(double d) { return d * M_PI / 180.0; }

void print_solve_summary(const aeos::SolveReport& rep, bool deterministic) {
  std::cout << "status=" << aeos::to_string(rep.status)
            << " J=" << aeos::fmt9(rep.objective_j)
            << " dual=" << aeos::fmt9(rep.dual_bound)
            << " gap=" << aeos::fmt9(rep.gap()) << " nodes=" << rep.nodes_explored;
  if (!deterministic) std::cout << " time_s=" << aeos::fmt9(rep.wall_time_s);
  if (rep.pruning)
    std::cout << " lambda=" << rep.pruning->lambda
              << " removed_windows=" << rep.pruning->removed_windows;
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agile Earth-observation constellation scheduler"};
  app.require_subcommand(1);
  std::function<int()> action;

  // ----- generate ---------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Synthesize a seeded instance file");
  {
    auto spec = std::make_shared<aeos::SynthSpec>();
    auto out = std::make_shared<std::string>();
    auto kind = std::make_shared<std::string>("spot");
    auto box = std::make_shared<std::vector<double>>(
        std::vector<double>{20.0, 45.0, 100.0, 145.0});
    gen->add_option("-o,--output", *out, "Instance file to write")->required();
    gen->add_option("--tasks", spec->n_tasks, "Observation task count");
    gen->add_option("--satellites", spec->n_satellites, "Constellation size");
    gen->add_option("--stations", spec->n_stations, "Ground station count");
    gen->add_option("--seed", spec->seed, "Random seed");
    gen->add_option("--kind", *kind, "Target kind: spot or strip")
        ->check(CLI::IsMember({"spot", "strip"}));
    gen->add_option("--priority-min", spec->priority_min, "Lowest priority weight");
    gen->add_option("--priority-max", spec->priority_max, "Highest priority weight");
    gen->add_option("--stereo-fraction", spec->stereo_fraction,
                    "Fraction of two-view tasks");
    gen->add_option("--region", *box,
                    "Target box: lat-min lat-max lon-min lon-max, degrees")
        ->expected(4);
    gen->callback([=, &action] {
      action = [=] {
        aeos::SynthSpec s = *spec;
        s.kind = *kind == "strip" ? aeos::TaskKind::Strip : aeos::TaskKind::Spot;
        s.lat_min_rad = deg2rad((*box)[0]);
        s.lat_max_rad = deg2rad((*box)[1]);
        s.lon_min_rad = deg2rad((*box)[2]);
        s.lon_max_rad = deg2rad((*box)[3]);
        aeos::Instance inst = aeos::synth_instance(s);
        spit(*out, aeos::write_instance(inst));
        std::cout << "wrote " << *out << ": " << inst.tasks.size() << " tasks, "
                  << inst.satellites.size() << " satellites, "
                  << inst.stations.size() << " stations, " << inst.otws.size()
                  << " observation windows, " << inst.dtws.size()
                  << " contact windows\n";
        return kOk;
      };
    });
  }

  // ----- solve --------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "Schedule an instance");
  {
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto report_path = std::make_shared<std::string>();
    auto algo = std::make_shared<std::string>("exact");
    auto lambda = std::make_shared<int>(0);
    auto limits = std::make_shared<aeos::BnbLimits>();
    auto deterministic = std::make_shared<bool>(false);
    limits->time_limit_s = 600.0;
    solve->add_option("-i,--instance", *in, "Instance file")->required();
    solve->add_option("-o,--schedule", *out, "Schedule file to write");
    solve->add_option("--report", *report_path, "Solve report file to write");
    solve->add_option("--algo", *algo, "exact, heuristic, or fifo")
        ->check(CLI::IsMember({"exact", "heuristic", "fifo"}));
    solve->add_option("--lambda", *lambda,
                      "Retained windows per cluster (heuristic; defaults to the "
                      "computed lower bound)");
    solve->add_option("--time-limit", limits->time_limit_s, "Solver budget, seconds");
    solve->add_option("--max-nodes", limits->max_nodes, "Node budget (0 = none)");
    solve->add_flag("--deterministic", *deterministic,
                    "Mask wall-clock fields so reruns are byte-identical");
    solve->callback([=, &action] {
      action = [=] {
        aeos::Instance inst = load_instance(*in);
        aeos::SolveReport rep;
        if (*algo == "exact") {
          rep = aeos::solve_exact(inst, *limits);
        } else if (*algo == "heuristic") {
          int lam = *lambda > 0 ? *lambda : aeos::lambda_lower_bound(inst);
          rep = aeos::solve_heuristic(inst, lam, *limits);
        } else {
          rep = aeos::solve_fifo(inst);
        }
        if (*deterministic) rep.wall_time_s = 0.0;
        if (!out->empty()) spit(*out, aeos::write_schedule(rep.schedule));
        if (!report_path->empty()) spit(*report_path, aeos::write_report(rep));
        print_solve_summary(rep, *deterministic);
        if (rep.status == aeos::SolveStatus::Infeasible) return kFailedSolve;
        if (rep.status == aeos::SolveStatus::TimeLimit &&
            rep.schedule.observations.empty() && rep.objective_j == 0.0)
          return kFailedSolve;  // budget exhausted with nothing usable
        return kOk;
      };
    });
  }

  // ----- validate -----------------------------------------------------------
  auto* val = app.add_subcommand("validate", "Check a schedule against an instance");
  {
    auto in = std::make_shared<std::string>();
    auto sched = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto tol = std::make_shared<double>(1e-6);
    val->add_option("-i,--instance", *in, "Instance file")->required();
    val->add_option("-s,--schedule", *sched, "Schedule file")->required();
    val->add_option("-o,--verdict", *out, "Verdict file to write (JSON)");
    val->add_option("--tol", *tol, "Timing tolerance, seconds");
    val->callback([=, &action] {
      action = [=] {
        aeos::Instance inst = load_instance(*in);
        aeos::Schedule sch = load_schedule(*sched);
        aeos::Verdict v = aeos::validate_schedule(inst, sch, *tol);
        std::cout << aeos::report_text(v);
        if (!out->empty()) spit(*out, aeos::report_json(v));
        return v.pass ? kOk : kValidationFail;
      };
    });
  }

  // ----- export-lp ----------------------------------------------------------
  auto* exp = app.add_subcommand("export-lp", "Write the optimization model in LP format");
  {
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    exp->add_option("-i,--instance", *in, "Instance file")->required();
    exp->add_option("-o,--output", *out, "LP file to write (stdout when omitted)");
    exp->callback([=, &action] {
      action = [=] {
        aeos::Instance inst = load_instance(*in);
        aeos::MilpModel model = aeos::build_model(inst);
        std::string lp = aeos::export_lp(model);
        if (out->empty()) std::cout << lp;
        else spit(*out, lp);
        return kOk;
      };
    });
  }

  // ----- benchmark ------------------------------------------------------------
  auto* bench = app.add_subcommand(
      "benchmark", "Compare exact, heuristic, and FIFO across instance files");
  {
    auto ins = std::make_shared<std::vector<std::string>>();
    auto lambdas = std::make_shared<std::vector<int>>();
    auto csv = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto limits = std::make_shared<aeos::BnbLimits>();
    auto deterministic = std::make_shared<bool>(false);
    auto no_exact = std::make_shared<bool>(false);
    auto no_fifo = std::make_shared<bool>(false);
    limits->time_limit_s = 600.0;
    bench->add_option("-i,--instance", *ins, "Instance file (repeatable)")
        ->required()
        ->take_all();
    bench->add_option("--lambda", *lambdas,
                      "Heuristic retention bound (repeatable; defaults to each "
                      "instance's lower bound)");
    bench->add_option("--csv", *csv, "CSV file to write");
    bench->add_option("-o,--output", *out, "Text table file (stdout when omitted)");
    bench->add_option("--time-limit", limits->time_limit_s, "Per-solve budget, seconds");
    bench->add_option("--max-nodes", limits->max_nodes, "Per-solve node budget");
    bench->add_flag("--deterministic", *deterministic,
                    "Mask wall-clock columns so reruns are byte-identical");
    bench->add_flag("--no-exact", *no_exact, "Skip the Direct MILP rows");
    bench->add_flag("--no-fifo", *no_fifo, "Skip the FIFO rows");
    bench->callback([=, &action] {
      action = [=] {
        std::vector<std::pair<std::string, aeos::Instance>> instances;
        for (const auto& path : *ins)
          instances.emplace_back(std::filesystem::path(path).stem().string(),
                                 load_instance(path));
        aeos::BenchmarkSpec spec;
        spec.lambdas = *lambdas;
        spec.limits = *limits;
        spec.run_exact = !*no_exact;
        spec.run_fifo = !*no_fifo;
        spec.mask_times = *deterministic;
        auto rows = aeos::run_benchmark(instances, spec);
        std::string text = aeos::format_benchmark_text(rows, spec.mask_times);
        if (out->empty()) std::cout << text;
        else spit(*out, text);
        if (!csv->empty()) spit(*csv, aeos::format_benchmark_csv(rows, spec.mask_times));
        return kOk;
      };
    });
  }

  // ----- gantt ---------------------------------------------------------------
  auto* gantt = app.add_subcommand("gantt", "Render a schedule as an SVG timeline");
  {
    auto in = std::make_shared<std::string>();
    auto sched = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    gantt->add_option("-i,--instance", *in, "Instance file")->required();
    gantt->add_option("-s,--schedule", *sched, "Schedule file")->required();
    gantt->add_option("-o,--output", *out, "SVG file to write")->required();
    gantt->callback([=, &action] {
      action = [=] {
        aeos::Instance inst = load_instance(*in);
        aeos::Schedule sch = load_schedule(*sched);
        std::string svg;
        try {
          svg = aeos::render_gantt(inst, sch);
        } catch (const std::invalid_argument& e) {
          std::cerr << "error: " << e.what() << "\n";
          return kValidationFail;
        }
        spit(*out, svg);
        return kOk;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    return action ? action() : kBadInput;
  } catch (const aeos::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailedSolve;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
}
