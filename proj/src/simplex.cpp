#include "aeos/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aeos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSkipTol = 1e-11;  // tableau entries below this are treated as zero
constexpr double kCostTol = 1e-9;

struct Reduced {
  // problem after presolve, in compressed indices
  int ns = 0;
  std::vector<std::vector<double>> A;  // rows over structural columns
  std::vector<double> rhs;
  std::vector<RowSense> sense;
  std::vector<double> lo, up, cost;
  // recovery back to original indices
  std::vector<int> orig_of;  // compressed structural -> original index
};

struct Elim {
  int e;  // original index of the substituted variable: x[e] = alpha*x[base] + beta
  int base;
  double alpha, beta;
};

}  // namespace

LpResult solve_lp(const MilpModel& model, const std::vector<double>& lb,
                  const std::vector<double>& ub, const LpOptions& opt) {
  const auto t_start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (opt.time_limit_s <= 0) return false;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
               .count() > opt.time_limit_s;
  };
  const int n0 = static_cast<int>(model.vars.size());
  const int m0 = static_cast<int>(model.rows.size());
  if (static_cast<int>(lb.size()) != n0 || static_cast<int>(ub.size()) != n0)
    throw std::invalid_argument("solve_lp: bound vectors do not match variable count");
  const double ftol = opt.feas_tol;

  LpResult res;
  for (int i = 0; i < n0; ++i)
    if (lb[i] > ub[i] + ftol) return res;  // empty box: Infeasible

  // ---- densify rows (merging duplicate terms) and objective ----
  std::vector<std::vector<double>> A(m0, std::vector<double>(n0, 0.0));
  std::vector<double> rhs(m0);
  std::vector<RowSense> sense(m0);
  for (int r = 0; r < m0; ++r) {
    for (const auto& [v, c] : model.rows[r].terms) A[r][v] += c;
    rhs[r] = model.rows[r].rhs;
    sense[r] = model.rows[r].sense;
  }
  std::vector<double> lo0(lb), up0(ub), c0(n0, 0.0);
  for (const auto& [v, c] : model.objective) c0[v] += c;

  // ---- presolve ----
  // (a) constant and singleton equality rows are folded away;
  // (b) a two-term equality a*e + b*t = d eliminates e by substitution when e
  //     is continuous, appears in no other equality, and its bounds are
  //     implied by t's range (true for auxiliary variables defined as an
  //     affine image of another bounded variable).
  std::vector<char> removed(m0, 0), gone(n0, 0);
  std::vector<int> eq_cnt(n0, 0);
  std::vector<std::vector<int>> rows_of(n0);
  for (int r = 0; r < m0; ++r)
    for (int j = 0; j < n0; ++j)
      if (A[r][j] != 0.0) {
        rows_of[j].push_back(r);
        if (sense[r] == RowSense::EQ) ++eq_cnt[j];
      }
  std::vector<Elim> elims;
  for (int r = 0; r < m0; ++r) {
    int nz = 0, j1 = -1, j2 = -1;
    for (int j = 0; j < n0 && nz <= 2; ++j)
      if (!gone[j] && A[r][j] != 0.0) {
        if (nz == 0) j1 = j;
        else j2 = j;
        ++nz;
      }
    double rscale = 1.0 + std::fabs(rhs[r]);
    if (nz == 0) {
      bool ok = (sense[r] == RowSense::LE && rhs[r] >= -1e-7 * rscale) ||
                (sense[r] == RowSense::GE && rhs[r] <= 1e-7 * rscale) ||
                (sense[r] == RowSense::EQ && std::fabs(rhs[r]) <= 1e-7 * rscale);
      if (!ok) return res;  // Infeasible
      removed[r] = 1;
      continue;
    }
    if (sense[r] != RowSense::EQ) continue;
    if (nz == 1) {
      double v = rhs[r] / A[r][j1];
      double bscale = 1.0 + std::fabs(lo0[j1]) + std::fabs(up0[j1]);
      if (v < lo0[j1] - 1e-7 * bscale || v > up0[j1] + 1e-7 * bscale) return res;
      lo0[j1] = up0[j1] = v;
      removed[r] = 1;
      --eq_cnt[j1];
      continue;
    }
    if (nz != 2) continue;
    for (int attempt = 0; attempt < 2; ++attempt) {
      int e = attempt == 0 ? std::max(j1, j2) : std::min(j1, j2);
      int base = e == j1 ? j2 : j1;
      if (model.vars[e].kind != VarKind::Continuous) continue;
      if (eq_cnt[e] != 1 || std::fabs(A[r][e]) < 1e-9) continue;
      if (!std::isfinite(lo0[base]) || !std::isfinite(up0[base])) continue;
      double alpha = -A[r][base] / A[r][e];
      double beta = rhs[r] / A[r][e];
      double v1 = alpha * lo0[base] + beta, v2 = alpha * up0[base] + beta;
      double rmin = std::min(v1, v2), rmax = std::max(v1, v2);
      double bscale = 1.0 + std::fabs(lo0[e]) + std::fabs(up0[e]);
      if (rmin < lo0[e] - 1e-7 * bscale || rmax > up0[e] + 1e-7 * bscale) continue;
      for (int r2 : rows_of[e]) {
        if (r2 == r || removed[r2]) continue;
        double ae = A[r2][e];
        if (ae == 0.0) continue;
        if (A[r2][base] == 0.0) rows_of[base].push_back(r2);
        A[r2][base] += ae * alpha;
        rhs[r2] -= ae * beta;
        A[r2][e] = 0.0;
      }
      if (c0[e] != 0.0) {
        c0[base] += c0[e] * alpha;
        // constant part of the objective is recovered after the solve
        c0[e] = 0.0;
      }
      gone[e] = 1;
      removed[r] = 1;
      --eq_cnt[e];
      --eq_cnt[base];
      elims.push_back({e, base, alpha, beta});
      break;
    }
  }

  // ---- compress ----
  Reduced P;
  std::vector<int> comp_of(n0, -1);
  for (int j = 0; j < n0; ++j)
    if (!gone[j]) {
      comp_of[j] = P.ns++;
      P.orig_of.push_back(j);
      P.lo.push_back(lo0[j]);
      P.up.push_back(up0[j]);
      P.cost.push_back(c0[j]);
    }
  for (int r = 0; r < m0; ++r) {
    if (removed[r]) continue;
    std::vector<double> row(P.ns, 0.0);
    for (int j = 0; j < n0; ++j)
      if (!gone[j] && A[r][j] != 0.0) row[comp_of[j]] = A[r][j];
    P.A.push_back(std::move(row));
    P.rhs.push_back(rhs[r]);
    P.sense.push_back(sense[r]);
  }
  A.clear();
  A.shrink_to_fit();

  // ---- dense bounded-variable primal simplex ----
  const int m = static_cast<int>(P.A.size());
  const int ns = P.ns;
  const int n = ns + m;
  std::vector<double> T(static_cast<size_t>(m) * n, 0.0);
  std::vector<double> tlo(n), tup(n), tc(n, 0.0);
  for (int j = 0; j < ns; ++j) {
    tlo[j] = P.lo[j];
    tup[j] = P.up[j];
    tc[j] = P.cost[j];
    if (!std::isfinite(tlo[j]) && !std::isfinite(tup[j]))
      throw std::logic_error("solve_lp: free variables are not supported");
  }
  for (int r = 0; r < m; ++r) {
    double* row = &T[static_cast<size_t>(r) * n];
    for (int j = 0; j < ns; ++j) row[j] = P.A[r][j];
    row[ns + r] = 1.0;
    switch (P.sense[r]) {
      case RowSense::LE: tlo[ns + r] = 0; tup[ns + r] = kInf; break;
      case RowSense::GE: tlo[ns + r] = -kInf; tup[ns + r] = 0; break;
      case RowSense::EQ: tlo[ns + r] = 0; tup[ns + r] = 0; break;
    }
  }
  std::vector<int> basis(m), where(n, -1), stat(n);  // 0 at lo, 1 at up, 2 basic
  std::vector<double> xB(m);
  for (int j = 0; j < ns; ++j) stat[j] = std::isfinite(tlo[j]) ? 0 : 1;
  for (int r = 0; r < m; ++r) {
    basis[r] = ns + r;
    where[ns + r] = r;
    stat[ns + r] = 2;
  }
  auto nb_val = [&](int j) { return stat[j] == 0 ? tlo[j] : tup[j]; };
  for (int r = 0; r < m; ++r) {
    double v = P.rhs[r];
    const double* row = &T[static_cast<size_t>(r) * n];
    for (int j = 0; j < ns; ++j)
      if (row[j] != 0.0) v -= row[j] * nb_val(j);
    xB[r] = v;
  }

  std::vector<double> rc(n), cB(m);
  int degen = 0;
  bool bland = false;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    if ((iter & 0xFF) == 0 && out_of_time()) {
      res.status = LpStatus::IterLimit;
      res.iterations = iter;
      return res;
    }
    // composite pricing: infeasibility costs while any basic is out of bounds
    bool infeas = false;
    for (int r = 0; r < m; ++r) {
      int bj = basis[r];
      if (xB[r] < tlo[bj] - ftol) { cB[r] = 1.0; infeas = true; }
      else if (xB[r] > tup[bj] + ftol) { cB[r] = -1.0; infeas = true; }
      else cB[r] = 0.0;
    }
    if (infeas) {
      std::fill(rc.begin(), rc.end(), 0.0);
    } else {
      rc = tc;
      for (int r = 0; r < m; ++r) cB[r] = tc[basis[r]];
    }
    for (int r = 0; r < m; ++r) {
      if (cB[r] == 0.0) continue;
      const double* row = &T[static_cast<size_t>(r) * n];
      double f = cB[r];
      for (int j = 0; j < n; ++j) rc[j] -= f * row[j];
    }
    int q = -1;
    double best = kCostTol;
    for (int j = 0; j < n; ++j) {
      if (stat[j] == 2 || tlo[j] == tup[j]) continue;
      double g = stat[j] == 0 ? rc[j] : -rc[j];
      if (g > best) {
        best = g;
        q = j;
        if (bland) break;
      }
    }
    if (q == -1) {
      if (infeas) return res;  // Infeasible
      break;                   // optimal
    }
    const double dir = stat[q] == 0 ? 1.0 : -1.0;
    double best_step = tup[q] - tlo[q];  // bound-to-bound flip
    int leave_row = -1;
    bool leave_lower = false;
    double best_y = 0.0;
    for (int r = 0; r < m; ++r) {
      double y = T[static_cast<size_t>(r) * n + q];
      if (std::fabs(y) <= kSkipTol) continue;
      double rate = -y * dir;
      int bj = basis[r];
      double v = xB[r], l = tlo[bj], u = tup[bj];
      double step;
      bool at_lower;
      if (v < l - ftol) {
        if (rate <= 0) continue;
        step = (l - v) / rate;
        at_lower = true;
      } else if (v > u + ftol) {
        if (rate >= 0) continue;
        step = (u - v) / rate;
        at_lower = false;
      } else if (rate > 0) {
        if (u == kInf) continue;
        step = (u - v) / rate;
        at_lower = false;
      } else {
        if (l == -kInf) continue;
        step = (l - v) / rate;
        at_lower = true;
      }
      if (step < 0) step = 0;
      double tie = 1e-9 * (1.0 + best_step);
      bool take = false;
      if (step < best_step - tie) take = true;
      else if (step <= best_step + tie && leave_row != -1) {
        double ay = std::fabs(y), aby = std::fabs(best_y);
        if (ay > aby * (1 + 1e-12)) take = true;
        else if (ay >= aby * (1 - 1e-12) && basis[r] < basis[leave_row]) take = true;
      } else if (step <= best_step + tie && leave_row == -1 && step < best_step) {
        take = true;  // prefer an actual pivot only on a strictly smaller step
      }
      if (take) {
        best_step = step;
        leave_row = r;
        leave_lower = at_lower;
        best_y = y;
      }
    }
    if (!std::isfinite(best_step)) {
      res.status = LpStatus::Unbounded;
      res.iterations = iter;
      return res;
    }
    double enter_from = nb_val(q);
    double delta = dir * best_step;
    if (delta != 0.0) {
      for (int r = 0; r < m; ++r) {
        double y = T[static_cast<size_t>(r) * n + q];
        if (y != 0.0) xB[r] -= y * delta;
      }
    }
    if (leave_row == -1) {
      stat[q] ^= 1;
    } else {
      int lv = basis[leave_row];
      stat[lv] = leave_lower ? 0 : 1;
      where[lv] = -1;
      basis[leave_row] = q;
      where[q] = leave_row;
      stat[q] = 2;
      xB[leave_row] = enter_from + delta;
      double* prow = &T[static_cast<size_t>(leave_row) * n];
      double piv = prow[q];
      double inv = 1.0 / piv;
      for (int j = 0; j < n; ++j) prow[j] *= inv;
      prow[q] = 1.0;
      for (int r = 0; r < m; ++r) {
        if (r == leave_row) continue;
        double* row = &T[static_cast<size_t>(r) * n];
        double f = row[q];
        if (std::fabs(f) <= kSkipTol) { row[q] = 0.0; continue; }
        for (int j = 0; j < n; ++j) row[j] -= f * prow[j];
        row[q] = 0.0;
      }
    }
    if (best_step < 1e-9) {
      if (++degen > opt.degenerate_switch) bland = true;
    } else {
      degen = 0;
    }
  }
  if (iter >= opt.max_iterations) {
    res.status = LpStatus::IterLimit;
    res.iterations = iter;
    return res;
  }

  // ---- recover original-space solution ----
  std::vector<double> x(n0, 0.0);
  for (int j = 0; j < ns; ++j) {
    double v = stat[j] == 2 ? xB[where[j]] : nb_val(j);
    x[P.orig_of[j]] = v;
  }
  for (int j = 0; j < n0; ++j)
    if (gone[j] == 0 && comp_of[j] == -1) x[j] = lo0[j];  // defensive; unreachable
  for (auto it = elims.rbegin(); it != elims.rend(); ++it)
    x[it->e] = it->alpha * x[it->base] + it->beta;
  double obj = 0.0;
  for (const auto& [v, c] : model.objective) obj += c * x[v];
  res.status = LpStatus::Optimal;
  res.objective = obj;
  res.x = std::move(x);
  res.iterations = iter;
  return res;
}

}  // namespace aeos
