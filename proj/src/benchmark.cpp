#include "aeos/benchmark.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "aeos/heuristic.hpp"

namespace aeos {

namespace {

int distinct_tasks(const Schedule& sch) {
  std::set<std::string> ids;
  for (const auto& o : sch.observations) ids.insert(o.task);
  return static_cast<int>(ids.size());
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// J column: the reached objective, with the unresolved gap appended in
// parentheses when the solve stopped before proving optimality.
std::string j_cell(const BenchmarkRow& r) {
  if (r.failed) return "-";
  std::string s = fmt("%g", r.j);
  if (r.gap > 0) s += " (" + fmt("%g", r.gap * 100.0) + "%)";
  return s;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(
    const std::vector<std::pair<std::string, Instance>>& instances,
    const BenchmarkSpec& spec) {
  std::vector<BenchmarkRow> rows;
  for (const auto& [name, inst] : instances) {
    int lam_lb = 0;
    std::string lam_note;
    try {
      lam_lb = lambda_lower_bound(inst);
    } catch (const std::exception& e) {
      lam_note = e.what();
    }

    auto make_row = [&](const std::string& algo) {
      BenchmarkRow r;
      r.scenario = name;
      r.algorithm = algo;
      r.lambda_lb = lam_lb;
      return r;
    };
    auto fill = [&](BenchmarkRow& r, const SolveReport& rep) {
      r.j = rep.objective_j;
      r.gap = rep.gap();
      r.assigned_tasks = distinct_tasks(rep.schedule);
      r.time_s = rep.wall_time_s;
    };

    BenchmarkRow exact = make_row("Direct MILP");
    if (spec.run_exact) {
      try {
        fill(exact, solve_exact(inst, spec.limits));
        exact.rel_performance = 100.0;
        exact.rel_time = 100.0;
      } catch (const std::exception& e) {
        exact.failed = true;
        exact.note = e.what();
      }
      rows.push_back(exact);
    } else {
      exact.failed = true;
      exact.note = "skipped";
    }
    const bool have_base = !exact.failed && exact.j > 0;
    auto relate = [&](BenchmarkRow& r) {
      if (r.failed) return;
      if (have_base) {
        r.rel_performance = 100.0 * r.j / exact.j;
        if (exact.time_s > 0) r.rel_time = 100.0 * r.time_s / exact.time_s;
      } else if (r.note.empty()) {
        r.note = "no exact baseline";
      }
    };

    std::vector<int> lambdas = spec.lambdas;
    if (lambdas.empty() && lam_lb > 0) lambdas.push_back(lam_lb);
    for (int lam : lambdas) {
      BenchmarkRow r = make_row("MILP-heuristic(" + std::to_string(lam) + ")");
      try {
        fill(r, solve_heuristic(inst, lam, spec.limits));
      } catch (const std::exception& e) {
        r.failed = true;
        r.note = e.what();
      }
      relate(r);
      rows.push_back(r);
    }
    if (lambdas.empty() && !lam_note.empty()) {
      BenchmarkRow r = make_row("MILP-heuristic(-)");
      r.failed = true;
      r.note = lam_note;
      rows.push_back(r);
    }

    if (spec.run_fifo) {
      BenchmarkRow r = make_row("FIFO");
      try {
        fill(r, solve_fifo(inst));
      } catch (const std::exception& e) {
        r.failed = true;
        r.note = e.what();
      }
      relate(r);
      rows.push_back(r);
    }
  }
  return rows;
}

std::string format_benchmark_text(const std::vector<BenchmarkRow>& rows,
                                  bool mask_times) {
  std::vector<std::array<std::string, 8>> cells;
  cells.push_back({"Scenario", "Algorithm", "J", "Tasks", "Rel.Perf%", "Time(s)",
                   "Rel.Time%", "Note"});
  for (const auto& r : rows) {
    std::array<std::string, 8> c;
    c[0] = r.scenario;
    c[1] = r.algorithm;
    c[2] = j_cell(r);
    c[3] = r.failed ? "-" : std::to_string(r.assigned_tasks);
    c[4] = r.failed ? "-" : fmt("%.0f", r.rel_performance);
    c[5] = r.failed || mask_times ? "-" : fmt("%.2f", r.time_s);
    c[6] = r.failed || mask_times ? "-" : fmt("%.2f", r.rel_time);
    std::string note = r.note;
    if (r.algorithm.rfind("MILP-heuristic", 0) == 0 && !r.failed)
      note = "lambda_LB=" + std::to_string(r.lambda_lb) +
             (note.empty() ? "" : "; " + note);
    if (r.failed) note = "FAILED: " + note;
    c[7] = note;
    cells.push_back(c);
  }
  std::array<size_t, 8> w{};
  for (const auto& c : cells)
    for (size_t i = 0; i < c.size(); ++i) w[i] = std::max(w[i], c[i].size());
  std::string out;
  for (const auto& c : cells) {
    for (size_t i = 0; i < c.size(); ++i) {
      out += c[i];
      if (i + 1 < c.size()) out += std::string(w[i] - c[i].size() + 2, ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

std::string format_benchmark_csv(const std::vector<BenchmarkRow>& rows,
                                 bool mask_times) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  std::string out =
      "scenario,algorithm,J,gap,assigned_tasks,rel_performance_pct,time_s,"
      "rel_time_pct,lambda_lb,failed,note\n";
  for (const auto& r : rows) {
    out += quote(r.scenario) + ',' + quote(r.algorithm) + ',';
    out += r.failed ? "" : fmt("%.9g", r.j);
    out += ',';
    out += r.failed ? "" : fmt("%.9g", r.gap);
    out += ',';
    out += r.failed ? "" : std::to_string(r.assigned_tasks);
    out += ',';
    out += r.failed ? "" : fmt("%.9g", r.rel_performance);
    out += ',';
    out += r.failed || mask_times ? "" : fmt("%.9g", r.time_s);
    out += ',';
    out += r.failed || mask_times ? "" : fmt("%.9g", r.rel_time);
    out += ',';
    out += std::to_string(r.lambda_lb);
    out += ',';
    out += r.failed ? "1" : "0";
    out += ',' + quote(r.note) + '\n';
  }
  return out;
}

}  // namespace aeos
