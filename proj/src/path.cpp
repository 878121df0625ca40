#include "gptwalk/path.hpp"

#include <algorithm>
#include <cmath>

namespace gptwalk {

namespace {

struct SegEval {
  Scalar x, y, xd, yd, xdd, ydd;
  // heading of the velocity direction, exact per segment type
  Scalar psi_v, psid_v, psidd_v;
};

SegEval eval_segment(const PathSegment& s, Scalar t) {
  SegEval e{};
  if (s.type == PathSegment::Type::Line) {
    const Scalar tt = t - s.tref;
    e.x = s.ax * tt + s.bx;
    e.y = s.ay * tt + s.by;
    e.xd = s.ax;
    e.yd = s.ay;
    e.xdd = e.ydd = 0;
    e.psi_v = (s.ax == 0 && s.ay == 0) ? 0 : std::atan2(s.ay, s.ax);
    e.psid_v = e.psidd_v = 0;
  } else {
    const Scalar tau = (t - s.t0) / s.omega;
    const Scalar c = std::cos(tau), sn = std::sin(tau);
    const Scalar r = s.amp / s.omega;
    e.x = s.amp * sn + s.cx;
    e.y = s.amp * c + s.cy;
    e.xd = r * c;
    e.yd = -r * sn;
    e.xdd = -r / s.omega * sn;
    e.ydd = -r / s.omega * c;
    // atan2(yd, xd) = -tau for r > 0, pi - tau for r < 0, kept continuous
    e.psi_v = (r >= 0 ? -tau : M_PI - tau);
    e.psid_v = -1.0 / s.omega;
    e.psidd_v = 0;
  }
  return e;
}

const PathSegment& active_segment(const GlobalPathSpec& path, Scalar t) {
  if (path.segments.empty()) throw Error("path '" + path.name + "' is empty");
  if (t < path.segments.front().t_begin - 1e-12)
    throw Error("path '" + path.name + "': t before path start");
  for (const auto& s : path.segments)
    if (t < s.t_end) return s;
  return path.segments.back();
}

}  // namespace

GpPoint desired_gp(const GlobalPathSpec& path, Scalar t) {
  const SegEval e = eval_segment(active_segment(path, t), t);
  GpPoint p;
  p.x = e.x;
  p.y = e.y;
  p.xdot = e.xd;
  p.ydot = e.yd;
  p.xddot = e.xdd;
  p.yddot = e.ydd;
  if (path.heading == GlobalPathSpec::Heading::Velocity) {
    p.psi = e.psi_v;
    p.psidot = e.psid_v;
    p.psiddot = e.psidd_v;
  } else {
    const Scalar r2 = e.x * e.x + e.y * e.y;
    if (r2 < 1e-12) {
      p.psi = p.psidot = p.psiddot = 0;
    } else {
      p.psi = std::atan2(e.y, e.x);
      const Scalar num = e.x * e.yd - e.y * e.xd;
      p.psidot = num / r2;
      const Scalar numd = e.x * e.ydd - e.y * e.xdd;
      const Scalar r2d = 2 * (e.x * e.xd + e.y * e.yd);
      p.psiddot = (numd * r2 - num * r2d) / (r2 * r2);
    }
  }
  return p;
}

Scalar path_speed(const GlobalPathSpec& path, Scalar t) {
  const GpPoint p = desired_gp(path, t);
  return std::hypot(p.xdot, p.ydot);
}

namespace {

Scalar simpson(const GlobalPathSpec& path, Scalar a, Scalar m, Scalar b,
               Scalar fa, Scalar fm, Scalar fb, Scalar whole, Scalar tol,
               int depth) {
  const Scalar lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Scalar flm = path_speed(path, lm), frm = path_speed(path, rm);
  const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
  const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson(path, a, lm, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(path, m, rm, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

Scalar path_arc_length(const GlobalPathSpec& path, Scalar t0, Scalar t1,
                       Scalar tol) {
  if (t1 <= t0) return 0;
  // Integrate per segment so formula joins stay exact.
  Scalar total = 0;
  Scalar a = t0;
  for (const auto& seg : path.segments) {
    if (a >= t1) break;
    if (seg.t_end <= a && &seg != &path.segments.back()) continue;
    const Scalar b = (&seg == &path.segments.back())
                         ? t1
                         : std::min(t1, seg.t_end);
    if (b <= a) continue;
    const Scalar m = 0.5 * (a + b);
    const Scalar fa = path_speed(path, a), fm = path_speed(path, m),
                 fb = path_speed(path, b);
    const Scalar whole = (b - a) / 6 * (fa + 4 * fm + fb);
    total += simpson(path, a, m, b, fa, fm, fb, whole, tol, 40);
    a = b;
  }
  return total;
}

Scalar path_time_at_arc_length(const GlobalPathSpec& path, Scalar t0,
                               Scalar length, Scalar tol) {
  if (length <= 0) return t0;
  Scalar lo = t0, hi = t0 + 1e-3;
  while (path_arc_length(path, t0, hi, tol) < length) {
    lo = hi;
    hi = t0 + 2 * (hi - t0);
    if (hi - t0 > 1e6) throw Error("path: arc length never reached");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    const Scalar mid = 0.5 * (lo + hi);
    if (path_arc_length(path, t0, mid, tol) < length)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

GlobalPathSpec parse_path(const TextNode& root) {
  GlobalPathSpec p;
  p.name = root.get_str("name", "path");
  const Scalar scale = root.get_str("units", "m") == "cm" ? 0.01 : 1.0;
  const std::string h = root.get_str("heading", "velocity");
  if (h == "velocity")
    p.heading = GlobalPathSpec::Heading::Velocity;
  else if (h == "position-ratio")
    p.heading = GlobalPathSpec::Heading::PositionRatio;
  else
    throw ParseError("path: unknown heading mode '" + h + "'");

  for (const TextNode* sn : root.all("segment")) {
    PathSegment s;
    const std::string kind = sn->str();
    const TextNode& trange = sn->child("t");
    s.t_begin = trange.num(0);
    s.t_end = trange.num(1);
    if (kind == "line") {
      s.type = PathSegment::Type::Line;
      s.tref = sn->get_num("tref", 0.0);
      const TextNode& xr = sn->child("x");
      const TextNode& yr = sn->child("y");
      s.ax = xr.num(0) * scale;
      s.bx = xr.num(1) * scale;
      s.ay = yr.num(0) * scale;
      s.by = yr.num(1) * scale;
    } else if (kind == "arc") {
      s.type = PathSegment::Type::Arc;
      s.amp = sn->get_num("amplitude") * scale;
      s.t0 = sn->get_num("t0");
      s.omega = sn->get_num("omega");
      s.cx = sn->get_num("cx") * scale;
      s.cy = sn->get_num("cy") * scale;
    } else {
      throw ParseError("path: unknown segment kind '" + kind + "'");
    }
    if (!(s.t_end > s.t_begin))
      throw ParseError("path: segment needs t_end > t_begin");
    p.segments.push_back(s);
  }
  if (p.segments.empty()) throw ParseError("path: no segments");
  for (size_t i = 1; i < p.segments.size(); ++i)
    if (std::abs(p.segments[i].t_begin - p.segments[i - 1].t_end) > 1e-9)
      throw ParseError("path: segment intervals must be contiguous");
  return p;
}

GlobalPathSpec load_path(const std::string& file) {
  return parse_path(load_text_file(file));
}

TextNode path_to_text(const GlobalPathSpec& path) {
  TextNode root;
  root.key = "path";
  TextNode nm;
  nm.key = "name";
  nm.args = {path.name};
  root.children.push_back(nm);
  TextNode hd;
  hd.key = "heading";
  hd.args = {path.heading == GlobalPathSpec::Heading::Velocity
                 ? "velocity"
                 : "position-ratio"};
  root.children.push_back(hd);
  for (const auto& s : path.segments) {
    TextNode sn;
    sn.key = "segment";
    sn.args = {s.type == PathSegment::Type::Line ? "line" : "arc"};
    auto add = [&sn](const std::string& k, std::initializer_list<Scalar> v) {
      TextNode c;
      c.key = k;
      for (Scalar x : v) c.args.push_back(fmt_num(x));
      sn.children.push_back(c);
    };
    add("t", {s.t_begin, s.t_end});
    if (s.type == PathSegment::Type::Line) {
      add("tref", {s.tref});
      add("x", {s.ax, s.bx});
      add("y", {s.ay, s.by});
    } else {
      add("amplitude", {s.amp});
      add("t0", {s.t0});
      add("omega", {s.omega});
      add("cx", {s.cx});
      add("cy", {s.cy});
    }
    root.children.push_back(sn);
  }
  return root;
}

GlobalPathSpec path_preset(const std::string& name) {
  // Constants from the walking-course table, centimeter units.
  const Scalar cm = 0.01;
  GlobalPathSpec p;
  p.name = name;
  if (name == "gp1") {
    PathSegment s;
    s.type = PathSegment::Type::Line;
    s.t_begin = 0;
    s.t_end = 1e9;
    s.ax = 8 * cm;
    p.segments.push_back(s);
  } else if (name == "gp2") {
    PathSegment s;
    s.type = PathSegment::Type::Line;
    s.t_begin = 0;
    s.t_end = 1e9;
    s.ax = 19.1 * cm;
    s.ay = 5.9 * cm;
    p.segments.push_back(s);
  } else if (name == "gp3") {
    PathSegment s1;
    s1.type = PathSegment::Type::Line;
    s1.t_begin = 0;
    s1.t_end = 3.13;
    s1.ax = 25 * cm;
    p.segments.push_back(s1);
    PathSegment s2;
    s2.type = PathSegment::Type::Arc;
    s2.t_begin = 3.13;
    s2.t_end = 4.25;
    s2.amp = 3000 * cm;
    s2.t0 = 3.13;
    s2.omega = 80;
    s2.cx = 78.2 * cm;
    s2.cy = -3000 * cm;
    p.segments.push_back(s2);
    PathSegment s3;
    s3.type = PathSegment::Type::Line;
    s3.t_begin = 4.25;
    s3.t_end = 1e9;
    s3.tref = 4.25;
    s3.ax = 24 * cm;
    s3.bx = 120 * cm;
    s3.ay = -7 * cm;
    s3.by = -0.3 * cm;
    p.segments.push_back(s3);
  } else {
    throw ParseError("unknown path preset '" + name + "'");
  }
  return p;
}

}  // namespace gptwalk
