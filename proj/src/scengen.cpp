#include "aeos/scengen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace aeos {

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}

EciState kepler_propagate(const OrbitElements& el, double t_s) {
  const double a = el.semi_major_axis_km;
  const double e = el.eccentricity;
  const double n = std::sqrt(kMuEarthKm3PerS2 / (a * a * a));  // mean motion

  // Eccentric anomaly at epoch from the stored true anomaly.
  const double nu0 = el.true_anomaly_at_epoch_rad;
  const double e0 = 2.0 * std::atan2(std::sqrt(1.0 - e) * std::sin(nu0 / 2.0),
                                     std::sqrt(1.0 + e) * std::cos(nu0 / 2.0));
  const double m0 = e0 - e * std::sin(e0);
  double m = m0 + n * (t_s - el.epoch_s);

  // Kepler's equation by Newton iteration (fast for the small e used here).
  double ea = m;
  for (int it = 0; it < 32; ++it) {
    double f = ea - e * std::sin(ea) - m;
    double fp = 1.0 - e * std::cos(ea);
    double step = f / fp;
    ea -= step;
    if (std::abs(step) < 1e-14) break;
  }

  const double cos_ea = std::cos(ea), sin_ea = std::sin(ea);
  const double rc = a * (1.0 - e * cos_ea);
  // Perifocal position/velocity.
  const double sq1me2 = std::sqrt(1.0 - e * e);
  Vec3 r_pf{a * (cos_ea - e), a * sq1me2 * sin_ea, 0.0};
  const double vscale = std::sqrt(kMuEarthKm3PerS2 * a) / rc;
  Vec3 v_pf{-vscale * sin_ea, vscale * sq1me2 * cos_ea, 0.0};

  // Perifocal -> inertial: Rz(raan) * Rx(incl) * Rz(argp).
  const double co = std::cos(el.raan_rad), so = std::sin(el.raan_rad);
  const double ci = std::cos(el.inclination_rad), si = std::sin(el.inclination_rad);
  const double cw = std::cos(el.arg_perigee_rad), sw = std::sin(el.arg_perigee_rad);
  auto rotate = [&](const Vec3& p) -> Vec3 {
    // Rz(argp)
    Vec3 q1{cw * p.x - sw * p.y, sw * p.x + cw * p.y, p.z};
    // Rx(incl)
    Vec3 q2{q1.x, ci * q1.y - si * q1.z, si * q1.y + ci * q1.z};
    // Rz(raan)
    return {co * q2.x - so * q2.y, so * q2.x + co * q2.y, q2.z};
  };
  return EciState{t_s, rotate(r_pf), rotate(v_pf)};
}

Vec3 ground_point_eci(double lat_rad, double lon_rad, double alt_km, double t_s) {
  const double r = kEarthRadiusKm + alt_km;
  const double lon = lon_rad + kEarthRotationRadPerS * t_s;
  const double cl = std::cos(lat_rad);
  return {r * cl * std::cos(lon), r * cl * std::sin(lon), r * std::sin(lat_rad)};
}

std::optional<PointingSample> pointing_angles(const EciState& sat, double lat_rad,
                                              double lon_rad) {
  const Vec3 target = ground_point_eci(lat_rad, lon_rad, 0.0, sat.t_s);
  const Vec3 los = sat.position_km - target;
  // Below the target's local horizon: the satellite direction has a negative
  // component along the local vertical.
  if (dot(normalized(target), los) <= 0.0) return std::nullopt;

  // Local orbital frame.
  const Vec3 r_hat = normalized(sat.position_km);
  const Vec3 z_hat = -1.0 * r_hat;  // nadir
  const Vec3 v_rej = sat.velocity_km_per_s - dot(sat.velocity_km_per_s, r_hat) * r_hat;
  const Vec3 x_hat = normalized(v_rej);  // along-track
  const Vec3 y_hat = cross(z_hat, x_hat);

  const Vec3 b = normalized(target - sat.position_km);  // boresight
  const double bx = dot(b, x_hat), by = dot(b, y_hat), bz = dot(b, z_hat);
  PointingSample p;
  p.t_s = sat.t_s;
  p.pitch_rad = std::atan2(bx, bz);
  p.roll_rad = std::asin(std::clamp(by, -1.0, 1.0));
  return p;
}

double elevation_angle(const EciState& sat, const GroundStation& gs) {
  const Vec3 site = ground_point_eci(gs.lat_rad, gs.lon_rad, gs.alt_km, sat.t_s);
  const Vec3 los = sat.position_km - site;
  const double s = dot(normalized(site), normalized(los));
  return std::asin(std::clamp(s, -1.0, 1.0));
}

namespace {

constexpr double kCoarseStepS = 1.0;
constexpr double kRefineTolS = 0.01;

// Find the feasibility boundary between t_out (infeasible) and t_in
// (feasible) to within kRefineTolS; returns a feasible time.
template <typename Feasible>
double bisect_edge(Feasible&& feasible, double t_out, double t_in) {
  for (int it = 0; it < 64 && std::abs(t_in - t_out) > kRefineTolS; ++it) {
    double mid = 0.5 * (t_out + t_in);
    if (feasible(mid))
      t_in = mid;
    else
      t_out = mid;
  }
  return t_in;
}

// Maximal feasible runs of `feasible` over [0, horizon], edges refined.
template <typename Feasible>
std::vector<std::pair<double, double>> scan_windows(Feasible&& feasible,
                                                    double horizon_s) {
  std::vector<std::pair<double, double>> runs;
  bool inside = false;
  double run_start = 0.0;
  double prev_t = 0.0;
  for (double t = 0.0;; t += kCoarseStepS) {
    if (t > horizon_s) t = horizon_s;
    bool ok = feasible(t);
    if (ok && !inside) {
      run_start = (t == 0.0) ? 0.0 : bisect_edge(feasible, prev_t, t);
      inside = true;
    } else if (!ok && inside) {
      runs.emplace_back(run_start, bisect_edge(feasible, t, prev_t));
      inside = false;
    }
    prev_t = t;
    if (t >= horizon_s) break;
  }
  if (inside) runs.emplace_back(run_start, horizon_s);
  return runs;
}

struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  // [0, 1) with 53 bits; avoids distribution objects so streams are
  // reproducible across standard library implementations.
  double uniform01() { return (gen() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  int uniform_int(int lo, int hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % span;
    std::uint64_t x;
    do {
      x = gen();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }
  std::mt19937_64 gen;
};

}  // namespace

std::vector<Otw> extract_otws(const Satellite& sat, const ObsTask& task,
                              double horizon_s) {
  if (!sat.orbit) throw std::invalid_argument("extract_otws: satellite has no orbit");
  double roll_lim = sat.roll_limit_rad;
  double pitch_lim = sat.pitch_limit_rad;
  if (task.user_angle_limit_rad) {
    roll_lim = std::min(roll_lim, *task.user_angle_limit_rad);
    pitch_lim = std::min(pitch_lim, *task.user_angle_limit_rad);
  }

  auto sample = [&](double t) {
    return pointing_angles(kepler_propagate(*sat.orbit, t), task.lat_rad, task.lon_rad);
  };
  auto feasible = [&](double t) {
    auto p = sample(t);
    return p && std::abs(p->roll_rad) <= roll_lim && std::abs(p->pitch_rad) <= pitch_lim;
  };

  std::vector<Otw> out;
  for (auto [t0, t1] : scan_windows(feasible, horizon_s)) {
    if (t1 - t0 < 1.0) continue;

    // Dense pitch/roll profile across the window.
    std::vector<PointingSample> prof;
    for (double t = t0;; t += kCoarseStepS) {
      if (t > t1) t = t1;
      if (auto p = sample(t)) prof.push_back(*p);
      if (t >= t1) break;
    }
    if (prof.size() < 2) continue;

    // Roll at the zero-pitch instant (closest approach); if pitch does not
    // cross zero inside the window, use the sample of least |pitch|.
    double roll = prof.front().roll_rad;
    bool crossed = false;
    for (size_t i = 1; i < prof.size() && !crossed; ++i) {
      if ((prof[i - 1].pitch_rad >= 0.0) != (prof[i].pitch_rad >= 0.0)) {
        double lo = prof[i - 1].t_s, hi = prof[i].t_s;
        for (int it = 0; it < 64 && hi - lo > kRefineTolS; ++it) {
          double mid = 0.5 * (lo + hi);
          auto p = sample(mid);
          if (!p) break;
          if ((p->pitch_rad >= 0.0) == (prof[i - 1].pitch_rad >= 0.0))
            lo = mid;
          else
            hi = mid;
        }
        if (auto p = sample(0.5 * (lo + hi))) {
          roll = p->roll_rad;
          crossed = true;
        }
      }
    }
    if (!crossed) {
      double best = std::abs(prof.front().pitch_rad);
      for (const auto& p : prof) {
        if (std::abs(p.pitch_rad) <= best) {
          best = std::abs(p.pitch_rad);
          roll = p.roll_rad;
        }
      }
    }

    // Least-squares line pitch(t) = p_open + slope * (t - t0).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : prof) {
      double x = p.t_s - t0;
      sx += x;
      sy += p.pitch_rad;
      sxx += x * x;
      sxy += x * p.pitch_rad;
    }
    const double np = static_cast<double>(prof.size());
    const double denom = np * sxx - sx * sx;
    double slope = denom != 0.0 ? (np * sxy - sx * sy) / denom : 0.0;
    double p_open = (sy - slope * sx) / np;

    // Clip endpoints so the linear model itself respects the pitch limit.
    double lo = t0, hi = t1;
    if (slope != 0.0) {
      double ta = t0 + (pitch_lim - p_open) / slope;
      double tb = t0 + (-pitch_lim - p_open) / slope;
      if (ta > tb) std::swap(ta, tb);
      lo = std::max(lo, ta);
      hi = std::min(hi, tb);
    } else if (std::abs(p_open) > pitch_lim) {
      continue;
    }
    if (hi - lo < 1.0) continue;

    Otw w;
    w.task = task.id;
    w.sat = sat.id;
    w.t_open_s = round9(lo);
    w.t_close_s = round9(hi);
    w.roll_rad = round9(roll);
    w.pitch_slope_rad_per_s = round9(slope);
    w.pitch_at_open_rad = round9(p_open + slope * (lo - t0));
    // Normalization may nudge the model a hair past the limit at an endpoint;
    // shave the window inward onto the canonical grid if so.
    for (int guard = 0; guard < 4; ++guard) {
      double margin = pitch_lim + 1e-9;
      bool open_bad = std::abs(w.pitch_at(w.t_open_s)) > margin;
      bool close_bad = std::abs(w.pitch_at(w.t_close_s)) > margin;
      if (!open_bad && !close_bad) break;
      if (open_bad) {
        double t = round9(w.t_open_s + kRefineTolS);
        w.pitch_at_open_rad = round9(w.pitch_at(t));
        w.t_open_s = t;
      }
      if (close_bad) w.t_close_s = round9(w.t_close_s - kRefineTolS);
    }
    if (w.t_close_s - w.t_open_s < 1.0) continue;
    w.k = static_cast<int>(out.size());
    out.push_back(w);
  }
  return out;
}

std::vector<Dtw> extract_dtws(const Satellite& sat, const GroundStation& gs,
                              double horizon_s, const std::string& d_id) {
  if (!sat.orbit) throw std::invalid_argument("extract_dtws: satellite has no orbit");
  auto feasible = [&](double t) {
    return elevation_angle(kepler_propagate(*sat.orbit, t), gs) >= gs.min_elevation_rad;
  };
  std::vector<Dtw> out;
  for (auto [t0, t1] : scan_windows(feasible, horizon_s)) {
    if (t1 - t0 < 1.0) continue;
    Dtw d;
    d.d = d_id;
    d.sat = sat.id;
    d.station = gs.id;
    d.l = static_cast<int>(out.size());
    d.t_open_s = round9(t0);
    d.t_close_s = round9(t1);
    out.push_back(d);
  }
  return out;
}

Instance synth_instance(const SynthSpec& spec) {
  if (spec.n_tasks < 0 || spec.n_satellites < 1 || spec.n_stations < 1)
    throw std::invalid_argument("synth_instance: invalid spec counts");
  Rng rng(spec.seed);
  Instance inst;
  inst.params.horizon_s = 86400.0;

  const double deg = kPi / 180.0;
  for (int i = 0; i < spec.n_satellites; ++i) {
    Satellite s;
    s.id = "sat" + std::to_string(i);
    s.roll_limit_rad = round9(30.0 * deg);
    s.pitch_limit_rad = round9(30.0 * deg);
    s.slew_rate_rad_per_s = round9(1.0 * deg);
    s.stab_time_s = 5.0;
    s.sat_prep_time_s = 20.0;
    s.capacity_units = 40.0;
    s.initial_data_units = 0.0;
    s.acq_rate_units_per_s = 1.0;
    s.down_rate_units_per_s = 5.0;
    OrbitElements el;
    el.semi_major_axis_km = 6871.0;
    el.eccentricity = 0.0;
    el.inclination_rad = round9(97.3 * deg);
    // Four-plane pattern: omega = raan = 0, 90, 180, 270 deg, then offset.
    double ang = (i % 4) * 90.0 + (i / 4) * 45.0;
    el.arg_perigee_rad = round9(ang * deg);
    el.raan_rad = round9(ang * deg);
    el.true_anomaly_at_epoch_rad = 0.0;
    el.epoch_s = 0.0;
    s.orbit = el;
    inst.satellites.push_back(std::move(s));
  }

  for (int i = 0; i < spec.n_stations; ++i) {
    GroundStation g;
    g.id = "gs" + std::to_string(i);
    g.lat_rad = round9(rng.uniform(spec.lat_min_rad, spec.lat_max_rad));
    g.lon_rad = round9(rng.uniform(spec.lon_min_rad, spec.lon_max_rad));
    g.alt_km = 0.0;
    g.gs_prep_time_s = 60.0;
    g.min_elevation_rad = round9(5.0 * deg);
    inst.stations.push_back(std::move(g));
  }

  const double proc = spec.kind == TaskKind::Spot ? 3.0 : 15.0;
  int width = spec.n_tasks > 100 ? 3 : 2;
  for (int i = 0; i < spec.n_tasks; ++i) {
    ObsTask v;
    std::string n = std::to_string(i);
    v.id = "t" + std::string(static_cast<size_t>(std::max(0, width - static_cast<int>(n.size()))), '0') + n;
    v.priority_w = rng.uniform_int(spec.priority_min, spec.priority_max);
    v.lat_rad = round9(rng.uniform(spec.lat_min_rad, spec.lat_max_rad));
    v.lon_rad = round9(rng.uniform(spec.lon_min_rad, spec.lon_max_rad));
    if (rng.uniform01() < spec.stereo_fraction) v.stereo_beta_rad = round9(15.0 * deg);
    for (const auto& s : inst.satellites) v.process_time_s[s.id] = proc;
    inst.tasks.push_back(std::move(v));
  }

  for (const auto& v : inst.tasks) {
    for (const auto& s : inst.satellites) {
      auto ws = extract_otws(s, v, inst.params.horizon_s);
      inst.otws.insert(inst.otws.end(), ws.begin(), ws.end());
    }
  }
  for (const auto& s : inst.satellites) {
    for (const auto& g : inst.stations) {
      auto ds = extract_dtws(s, g, inst.params.horizon_s, "dl" + s.id + g.id);
      inst.dtws.insert(inst.dtws.end(), ds.begin(), ds.end());
    }
  }

  canonicalize(inst);
  return inst;
}

}  // namespace aeos
