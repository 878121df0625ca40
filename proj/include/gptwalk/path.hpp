#ifndef GPTWALK_PATH_HPP
#define GPTWALK_PATH_HPP

#include <string>
#include <vector>

#include "gptwalk/textio.hpp"
#include "gptwalk/types.hpp"

namespace gptwalk {

// One time segment of a desired global-position trajectory. Units are
// meters/seconds internally; files may declare "units cm".
struct PathSegment {
  enum class Type { Line, Arc };
  Type type = Type::Line;
  Scalar t_begin = 0, t_end = 0;
  // line: x = ax*(t - tref) + bx, y = ay*(t - tref) + by
  Scalar tref = 0, ax = 0, bx = 0, ay = 0, by = 0;
  // arc: x = amp*sin((t - t0)/omega) + cx, y = amp*cos((t - t0)/omega) + cy
  Scalar amp = 0, t0 = 0, omega = 1, cx = 0, cy = 0;
};

struct GlobalPathSpec {
  std::string name;
  std::vector<PathSegment> segments;  // contiguous, increasing
  enum class Heading { Velocity, PositionRatio } heading = Heading::Velocity;
};

struct GpPoint {
  Scalar x = 0, y = 0;
  Scalar xdot = 0, ydot = 0;
  Scalar xddot = 0, yddot = 0;
  Scalar psi = 0, psidot = 0, psiddot = 0;
};

// Evaluates the active segment; beyond the last segment's end the last
// segment's formula is extended. Throws on t before the path start.
GpPoint desired_gp(const GlobalPathSpec& path, Scalar t);

// Horizontal speed |v_d(t)| and its arc length over [t0, t1] (adaptive
// Simpson quadrature), plus the inverse map used for planned step timing.
Scalar path_speed(const GlobalPathSpec& path, Scalar t);
Scalar path_arc_length(const GlobalPathSpec& path, Scalar t0, Scalar t1,
                       Scalar tol = 1e-10);
Scalar path_time_at_arc_length(const GlobalPathSpec& path, Scalar t0,
                               Scalar length, Scalar tol = 1e-10);

GlobalPathSpec parse_path(const TextNode& root);
GlobalPathSpec load_path(const std::string& file);
TextNode path_to_text(const GlobalPathSpec& path);

// Bundled desired paths (Table of straight/arc segments, cm-scale test
// courses): gp1 slow straight line, gp2 diagonal line, gp3
// line-arc-line course.
GlobalPathSpec path_preset(const std::string& name);

}  // namespace gptwalk

#endif
