#pragma once

// Timeline rendering: one SVG lane per satellite and per ground station.
// Window outlines are drawn in white on a dark canvas, observations as red
// boxes, download sessions as blue boxes, and the post-observation
// stabilization-plus-slew activity as gray segments. Each satellite lane also
// carries its onboard-buffer trajectory as a thin polyline. Output bytes are
// deterministic for a given instance and schedule.

#include <string>

#include "aeos/domain.hpp"

namespace aeos {

// Renders the schedule. The schedule must pass validate_schedule first;
// an invalid schedule raises std::invalid_argument.
std::string render_gantt(const Instance& inst, const Schedule& sch);

}  // namespace aeos
