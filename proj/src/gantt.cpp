#include "aeos/gantt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "aeos/validator.hpp"

namespace aeos {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '&') o += "&amp;";
    else if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else o += c;
  }
  return o;
}

// tick spacing: largest of {1,2,5}*10^k giving at least 6 intervals
double tick_step(double span) {
  double raw = span / 6.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {5.0, 2.0, 1.0})
    if (m * mag <= raw) return m * mag;
  return mag;
}

}  // namespace

std::string render_gantt(const Instance& inst, const Schedule& sch) {
  Verdict v = validate_schedule(inst, sch);
  if (!v.pass)
    throw std::invalid_argument("render_gantt: schedule fails validation");

  const double TH = std::max(inst.params.horizon_s, 1.0);
  const double kW = 1200, kMarL = 110, kMarR = 30, kMarT = 42, kMarB = 18;
  const double kLaneH = 34, kLaneGap = 10;
  const double plot_w = kW - kMarL - kMarR;
  const size_t lanes = inst.satellites.size() + inst.stations.size();
  const double kH = kMarT + lanes * (kLaneH + kLaneGap) + kMarB;
  auto X = [&](double t) { return kMarL + t / TH * plot_w; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) +
       "\" height=\"" + num(kH) + "\" viewBox=\"0 0 " + num(kW) + " " + num(kH) +
       "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
       "\" fill=\"#1c1c24\"/>\n";

  // time axis
  s += "<line x1=\"" + num(kMarL) + "\" y1=\"" + num(kMarT - 8) + "\" x2=\"" +
       num(kW - kMarR) + "\" y2=\"" + num(kMarT - 8) +
       "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
  double step = tick_step(TH);
  for (double t = 0; t <= TH + 1e-9; t += step) {
    s += "<line x1=\"" + num(X(t)) + "\" y1=\"" + num(kMarT - 12) + "\" x2=\"" +
         num(X(t)) + "\" y2=\"" + num(kMarT - 4) +
         "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    char lab[32];
    std::snprintf(lab, sizeof lab, "%g", t);
    s += "<text x=\"" + num(X(t)) + "\" y=\"" + num(kMarT - 16) +
         "\" fill=\"#dddddd\" font-family=\"monospace\" font-size=\"10\" "
         "text-anchor=\"middle\">" +
         lab + "</text>\n";
  }

  size_t lane = 0;
  auto lane_y = [&](size_t i) { return kMarT + i * (kLaneH + kLaneGap); };
  auto lane_header = [&](const std::string& id, double y) {
    s += "<rect x=\"" + num(kMarL) + "\" y=\"" + num(y) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(kLaneH) + "\" fill=\"#2a2a33\"/>\n";
    s += "<text x=\"" + num(kMarL - 8) + "\" y=\"" + num(y + kLaneH / 2 + 4) +
         "\" fill=\"#ffffff\" font-family=\"monospace\" font-size=\"12\" "
         "text-anchor=\"end\">" +
         esc(id) + "</text>\n";
  };
  auto box = [&](double t0, double t1, double y, double inset,
                 const std::string& style) {
    double x0 = X(t0), x1 = X(t1);
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y + inset) + "\" width=\"" +
         num(std::max(x1 - x0, 0.5)) + "\" height=\"" + num(kLaneH - 2 * inset) +
         "\" " + style + "/>\n";
  };

  for (const auto& sat : inst.satellites) {
    double y = lane_y(lane++);
    lane_header(sat.id, y);
    for (const auto& w : inst.otws)
      if (w.sat == sat.id)
        box(w.t_open_s, w.t_close_s, y, 4,
            "fill=\"none\" stroke=\"#ffffff\" stroke-width=\"1\"");

    // committed observations, ordered in time for the transition segments
    struct Ob {
      double t, tp, roll, pitch;
    };
    std::vector<Ob> obs;
    for (const auto& o : sch.observations) {
      if (o.sat != sat.id) continue;
      const ObsTask* tk = inst.find_task(o.task);
      double tp = tk->process_time_s.at(o.sat);
      double roll = 0;
      for (const auto& w : inst.otws)
        if (w.task == o.task && w.sat == o.sat && w.k == o.k) roll = w.roll_rad;
      obs.push_back({o.t_start_s, tp, roll, o.pitch_rad});
    }
    std::sort(obs.begin(), obs.end(), [](const Ob& a, const Ob& b) { return a.t < b.t; });
    for (size_t i = 0; i + 1 < obs.size(); ++i) {
      double trans = sat.stab_time_s +
                     (std::fabs(obs[i + 1].roll - obs[i].roll) +
                      std::fabs(obs[i + 1].pitch - obs[i].pitch)) /
                         sat.slew_rate_rad_per_s;
      double t0 = obs[i].t + obs[i].tp;
      box(t0, t0 + trans, y, (kLaneH - 6) / 2, "fill=\"#9a9aa2\"");
    }
    for (const auto& o : obs) box(o.t, o.t + o.tp, y, 8, "fill=\"#d64545\"");
    for (const auto& d : sch.downloads)
      if (d.sat == sat.id) box(d.t_start_s, d.t_end_s, y, 8, "fill=\"#4a7bd6\"");

    // onboard-buffer trajectory across the lane, scaled by capacity
    BufferTrajectory bt = buffer_trajectory(inst, sch, sat.id);
    if (!bt.points.empty() && sat.capacity_units > 0) {
      std::string pts;
      for (const auto& p : bt.points) {
        double fy = y + kLaneH - 3 -
                    std::clamp(p.units / sat.capacity_units, 0.0, 1.0) * (kLaneH - 6);
        pts += num(X(p.t)) + "," + num(fy) + " ";
      }
      if (!pts.empty()) pts.pop_back();
      s += "<polyline points=\"" + pts +
           "\" fill=\"none\" stroke=\"#58c470\" stroke-width=\"1\"/>\n";
    }
  }

  for (const auto& gs : inst.stations) {
    double y = lane_y(lane++);
    lane_header(gs.id, y);
    for (const auto& w : inst.dtws)
      if (w.station == gs.id)
        box(w.t_open_s, w.t_close_s, y, 4,
            "fill=\"none\" stroke=\"#ffffff\" stroke-width=\"1\"");
    for (const auto& d : sch.downloads)
      for (const auto& w : inst.dtws)
        if (w.d == d.d && w.sat == d.sat && w.l == d.l && w.station == gs.id)
          box(d.t_start_s, d.t_end_s, y, 8, "fill=\"#4a7bd6\"");
  }

  s += "</svg>\n";
  return s;
}

}  // namespace aeos
