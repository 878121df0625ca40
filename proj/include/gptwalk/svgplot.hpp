#ifndef GPTWALK_SVGPLOT_HPP
#define GPTWALK_SVGPLOT_HPP

#include <string>

#include "gptwalk/path.hpp"
#include "gptwalk/sim.hpp"
#include "gptwalk/types.hpp"

namespace gptwalk {

// Static SVG exports of recorded trace channels. Rendering is
// deterministic: fixed canvas sizes, fixed tick counts, fixed-precision
// coordinates. No interactivity, no external assets.

// Base x/y position versus time in two stacked panels; when path is
// non-null the desired global position is overlaid dashed.
void plot_gp(const SimTrace& trace, const GlobalPathSpec* path,
             const std::string& file);

// Lyapunov function values on a log10 axis; the background is shaded by
// the active domain. Series are drawn only where the value is positive.
void plot_lyapunov(const SimTrace& trace, const std::string& file);

// Per-actuator torque traces. A positive limit below 1e3 adds dashed
// bound lines at +/-limit and widens the axis range to include them.
void plot_torque(const SimTrace& trace, Scalar limit, const std::string& file);

}  // namespace gptwalk

#endif
