#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aeos/domain.hpp"

// Scenario generation: two-body orbit propagation over a rotating spherical
// Earth, extraction of observation/download time windows from the geometry,
// and seeded random instance synthesis.

namespace aeos {

inline constexpr double kMuEarthKm3PerS2 = 398600.4418;
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;
inline constexpr double kPi = 3.14159265358979324;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& a);
double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
Vec3 normalized(const Vec3& a);

struct EciState {
  double t_s = 0.0;
  Vec3 position_km;
  Vec3 velocity_km_per_s;
};

// Pointing of the satellite boresight needed to image a ground point, in the
// local orbital frame (x along-track toward velocity, z toward nadir,
// y completing the right-handed set). Pitch is the rotation about y (positive
// when looking ahead along the velocity), roll the remaining rotation toward
// the orbit normal side: boresight = (sin(pitch)cos(roll), sin(roll),
// cos(pitch)cos(roll)).
struct PointingSample {
  double t_s = 0.0;
  double roll_rad = 0.0;
  double pitch_rad = 0.0;
};

// Closed-form two-body propagation of the orbit to time t_s (seconds from
// horizon start; el.epoch_s is the epoch of the stored anomaly).
EciState kepler_propagate(const OrbitElements& el, double t_s);

// Ground point position in the inertial frame at time t_s (spherical Earth
// rotating at the sidereal rate; frames coincide at t = 0).
Vec3 ground_point_eci(double lat_rad, double lon_rad, double alt_km, double t_s);

// Pointing angles toward a ground target; empty when the target is below its
// local horizon (not visible).
std::optional<PointingSample> pointing_angles(const EciState& sat, double lat_rad,
                                              double lon_rad);

// Elevation of the satellite above the station's horizon plane, radians.
double elevation_angle(const EciState& sat, const GroundStation& gs);

// Scan the horizon at 1 s and refine window edges by bisection to 0.01 s.
// Windows shorter than 1 s are dropped. Roll is evaluated at the zero-pitch
// instant (closest approach); pitch over the window is replaced by a
// least-squares linear model whose endpoints are clipped so the model stays
// within the pointing limits. Emitted values are serialization-normalized.
// Requires sat.orbit.
std::vector<Otw> extract_otws(const Satellite& sat, const ObsTask& task,
                              double horizon_s);

// Contact windows where the satellite stands above the station's minimum
// elevation; same scan/refine scheme. Windows are labeled with download
// opportunity id `d_id` and indexed chronologically.
std::vector<Dtw> extract_dtws(const Satellite& sat, const GroundStation& gs,
                              double horizon_s, const std::string& d_id);

enum class TaskKind { Spot, Strip };

// Seeded instance synthesis. Satellites follow the four-plane reference
// constellation (a = 6871 km circular, i = 97.3 deg, omega = raan = 90k deg);
// tasks and stations are uniform in the region box; priorities are uniform
// integers in [priority_min, priority_max]; a stereo_fraction of tasks
// require two observations separated by 15 deg of pitch.
struct SynthSpec {
  int n_tasks = 20;
  TaskKind kind = TaskKind::Spot;
  double lat_min_rad = 0.349065850;  // 20 deg
  double lat_max_rad = 0.785398163;  // 45 deg
  double lon_min_rad = 1.74532925;   // 100 deg
  double lon_max_rad = 2.53072742;   // 145 deg
  int n_satellites = 4;
  int n_stations = 2;
  std::uint64_t seed = 1;
  int priority_min = 1;
  int priority_max = 5;
  double stereo_fraction = 0.1;
};

Instance synth_instance(const SynthSpec& spec);

}  // namespace aeos
