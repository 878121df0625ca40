#include "gptwalk/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

namespace gptwalk {

namespace {

std::string fpx(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string flabel(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Axis {
  double lo = 0, hi = 1;
};

Axis padded(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

struct Panel {
  double x0 = 0, y0 = 0, w = 1, h = 1;
  Axis ax, ay;
  double px(double t) const { return x0 + (t - ax.lo) / (ax.hi - ax.lo) * w; }
  double py(double v) const {
    return y0 + h - (v - ay.lo) / (ay.hi - ay.lo) * h;
  }
};

void svg_begin(std::ofstream& f, int wpx, int hpx) {
  f << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << wpx
    << "\" height=\"" << hpx << "\" viewBox=\"0 0 " << wpx << ' ' << hpx
    << "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
    << "<rect width=\"" << wpx << "\" height=\"" << hpx
    << "\" fill=\"white\"/>\n";
}

void text_at(std::ofstream& f, double x, double y, const std::string& s,
             const std::string& anchor, int size,
             const std::string& color = "#202020") {
  f << "<text x=\"" << fpx(x) << "\" y=\"" << fpx(y) << "\" font-size=\""
    << size << "\" text-anchor=\"" << anchor << "\" fill=\"" << color
    << "\">" << s << "</text>\n";
}

void draw_frame(std::ofstream& f, const Panel& p, const std::string& title,
                const std::string& xlabel, const std::string& ylabel) {
  for (int i = 0; i < 5; ++i) {
    const double tv = p.ax.lo + (p.ax.hi - p.ax.lo) * i / 4.0;
    const double x = p.px(tv);
    f << "<line x1=\"" << fpx(x) << "\" y1=\"" << fpx(p.y0) << "\" x2=\""
      << fpx(x) << "\" y2=\"" << fpx(p.y0 + p.h)
      << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    text_at(f, x, p.y0 + p.h + 15, flabel(tv), "middle", 11);
    const double vv = p.ay.lo + (p.ay.hi - p.ay.lo) * i / 4.0;
    const double y = p.py(vv);
    f << "<line x1=\"" << fpx(p.x0) << "\" y1=\"" << fpx(y) << "\" x2=\""
      << fpx(p.x0 + p.w) << "\" y2=\"" << fpx(y)
      << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    text_at(f, p.x0 - 6, y + 4, flabel(vv), "end", 11);
  }
  f << "<rect x=\"" << fpx(p.x0) << "\" y=\"" << fpx(p.y0) << "\" width=\""
    << fpx(p.w) << "\" height=\"" << fpx(p.h)
    << "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
  if (!title.empty())
    text_at(f, p.x0 + p.w / 2, p.y0 - 8, title, "middle", 13);
  if (!xlabel.empty())
    text_at(f, p.x0 + p.w / 2, p.y0 + p.h + 32, xlabel, "middle", 12);
  if (!ylabel.empty())
    f << "<text transform=\"translate(" << fpx(p.x0 - 48) << ","
      << fpx(p.y0 + p.h / 2) << ") rotate(-90)\" font-size=\"12\" "
         "text-anchor=\"middle\" fill=\"#202020\">"
      << ylabel << "</text>\n";
}

void draw_polyline(std::ofstream& f, const Panel& p,
                   const std::vector<double>& ts,
                   const std::vector<double>& vs, const std::string& color,
                   double width, bool dashed) {
  if (ts.size() < 2) return;
  f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
    << fpx(width) << "\"";
  if (dashed) f << " stroke-dasharray=\"6,4\"";
  f << " points=\"";
  for (size_t i = 0; i < ts.size(); ++i) {
    if (i) f << ' ';
    f << fpx(p.px(ts[i])) << ',' << fpx(p.py(vs[i]));
  }
  f << "\"/>\n";
}

void draw_hline(std::ofstream& f, const Panel& p, double v,
                const std::string& color, bool dashed) {
  f << "<line x1=\"" << fpx(p.x0) << "\" y1=\"" << fpx(p.py(v)) << "\" x2=\""
    << fpx(p.x0 + p.w) << "\" y2=\"" << fpx(p.py(v)) << "\" stroke=\""
    << color << "\" stroke-width=\"1.2\"";
  if (dashed) f << " stroke-dasharray=\"5,4\"";
  f << "/>\n";
}

void legend_entry(std::ofstream& f, double x, double y,
                  const std::string& color, bool dashed,
                  const std::string& label) {
  f << "<line x1=\"" << fpx(x) << "\" y1=\"" << fpx(y) << "\" x2=\""
    << fpx(x + 22) << "\" y2=\"" << fpx(y) << "\" stroke=\"" << color
    << "\" stroke-width=\"1.8\"";
  if (dashed) f << " stroke-dasharray=\"6,4\"";
  f << "/>\n";
  text_at(f, x + 27, y + 4, label, "start", 11);
}

const char* series_color(int i) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#8c564b", "#e377c2",
                                   "#7f7f7f", "#bcbd22", "#17becf",
                                   "#ff7f0e", "#4c4c9d", "#7a4f2e"};
  return kPalette[i % 12];
}

const char* shade_color(int i) {
  static const char* kShades[] = {"#e3edf8", "#fdeede", "#e6f4e2",
                                  "#f2e5f2"};
  return kShades[i % 4];
}

std::ofstream open_out(const std::string& file) {
  std::ofstream f(file);
  if (!f) throw Error("cannot write " + file);
  return f;
}

Axis value_axis(const std::vector<const std::vector<double>*>& series) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* s : series)
    for (double v : *s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) return {0, 1};
  return padded(lo, hi);
}

}  // namespace

void plot_gp(const SimTrace& trace, const GlobalPathSpec* path,
             const std::string& file) {
  if (trace.samples.size() < 2) throw Error("plot_gp: trace too short");
  if (trace.nq < 2) throw Error("plot_gp: trace lacks base coordinates");
  std::vector<double> ts, xs, ys, xd, yd;
  for (const auto& s : trace.samples) {
    ts.push_back(s.t);
    xs.push_back(s.q[0]);
    ys.push_back(s.q[1]);
    if (path) {
      const GpPoint g = desired_gp(*path, s.t);
      xd.push_back(g.x);
      yd.push_back(g.y);
    }
  }
  const Axis tax = padded(ts.front(), ts.back());

  std::ofstream f = open_out(file);
  svg_begin(f, 860, 630);
  Panel top{70, 40, 765, 230, tax,
            value_axis(path ? std::vector<const std::vector<double>*>{&xs, &xd}
                            : std::vector<const std::vector<double>*>{&xs})};
  Panel bot{70, 340, 765, 230, tax,
            value_axis(path ? std::vector<const std::vector<double>*>{&ys, &yd}
                            : std::vector<const std::vector<double>*>{&ys})};
  draw_frame(f, top, "global position x", "t [s]", "x [m]");
  draw_polyline(f, top, ts, xs, series_color(0), 1.8, false);
  if (path) draw_polyline(f, top, ts, xd, "#404040", 1.5, true);
  draw_frame(f, bot, "global position y", "t [s]", "y [m]");
  draw_polyline(f, bot, ts, ys, series_color(0), 1.8, false);
  if (path) draw_polyline(f, bot, ts, yd, "#404040", 1.5, true);
  legend_entry(f, top.x0 + 10, top.y0 + 16, series_color(0), false, "actual");
  if (path)
    legend_entry(f, top.x0 + 110, top.y0 + 16, "#404040", true, "desired");
  f << "</svg>\n";
}

void plot_lyapunov(const SimTrace& trace, const std::string& file) {
  if (trace.samples.size() < 2) throw Error("plot_lyapunov: trace too short");
  std::vector<double> ts;
  std::vector<std::vector<double>> vals(3);
  for (const auto& s : trace.samples) {
    ts.push_back(s.t);
    vals[0].push_back(s.V_F);
    vals[1].push_back(s.V_U);
    vals[2].push_back(s.V_O);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& v : vals)
    for (double x : v)
      if (x > 0) {
        lo = std::min(lo, std::log10(x));
        hi = std::max(hi, std::log10(x));
      }
  const bool any = std::isfinite(lo);
  const Axis vax = any ? padded(lo, hi) : Axis{-1, 1};
  const Axis tax = padded(ts.front(), ts.back());

  std::ofstream f = open_out(file);
  svg_begin(f, 860, 520);
  Panel p{70, 40, 765, 400, tax, vax};
  size_t run = 0;
  while (run < trace.samples.size()) {
    size_t end = run;
    const int dom = trace.samples[run].domain;
    while (end + 1 < trace.samples.size() &&
           trace.samples[end + 1].domain == dom)
      ++end;
    if (end > run)
      f << "<rect x=\"" << fpx(p.px(ts[run])) << "\" y=\"" << fpx(p.y0)
        << "\" width=\"" << fpx(p.px(ts[end]) - p.px(ts[run]))
        << "\" height=\"" << fpx(p.h) << "\" fill=\"" << shade_color(dom)
        << "\"/>\n";
    run = end + 1;
  }
  draw_frame(f, p, "Lyapunov functions", "t [s]", "log10 V");
  static const char* kNames[] = {"V_F", "V_U", "V_O"};
  for (int c = 0; c < 3; ++c) {
    size_t i = 0;
    while (i < vals[c].size()) {
      std::vector<double> rt, rv;
      while (i < vals[c].size() && vals[c][i] > 0) {
        rt.push_back(ts[i]);
        rv.push_back(std::log10(vals[c][i]));
        ++i;
      }
      draw_polyline(f, p, rt, rv, series_color(c), 1.6, false);
      while (i < vals[c].size() && !(vals[c][i] > 0)) ++i;
    }
    legend_entry(f, p.x0 + 10 + 80.0 * c, p.y0 + 16, series_color(c), false,
                 kNames[c]);
  }
  double lx = p.x0 + p.w - 10;
  for (int d = static_cast<int>(trace.domain_names.size()) - 1; d >= 0; --d) {
    const std::string& name = trace.domain_names[d];
    text_at(f, lx, p.y0 + 17, name, "end", 11);
    lx -= 8.0 * (name.size() + 1) + 16;
    f << "<rect x=\"" << fpx(lx) << "\" y=\"" << fpx(p.y0 + 8)
      << "\" width=\"12\" height=\"12\" fill=\"" << shade_color(d)
      << "\" stroke=\"#808080\" stroke-width=\"0.5\"/>\n";
    lx -= 14;
  }
  f << "</svg>\n";
}

void plot_torque(const SimTrace& trace, Scalar limit,
                 const std::string& file) {
  if (trace.samples.size() < 2) throw Error("plot_torque: trace too short");
  std::vector<double> ts;
  std::vector<std::vector<double>> us(trace.n_a);
  for (const auto& s : trace.samples) {
    ts.push_back(s.t);
    for (int i = 0; i < trace.n_a; ++i) us[i].push_back(s.u[i]);
  }
  std::vector<const std::vector<double>*> refs;
  for (const auto& u : us) refs.push_back(&u);
  std::vector<double> lim;
  const bool draw_limit = limit > 0 && limit < 1e3;
  if (draw_limit) {
    lim = {-static_cast<double>(limit), static_cast<double>(limit)};
    refs.push_back(&lim);
  }
  const Axis tax = padded(ts.front(), ts.back());
  const Axis vax = value_axis(refs);

  std::ofstream f = open_out(file);
  svg_begin(f, 860, 520);
  Panel p{70, 40, 765, 400, tax, vax};
  draw_frame(f, p, "actuator torques", "t [s]", "u [N m]");
  for (int i = 0; i < trace.n_a; ++i)
    draw_polyline(f, p, ts, us[i], series_color(i), 1.2, false);
  if (draw_limit) {
    draw_hline(f, p, lim[0], "#303030", true);
    draw_hline(f, p, lim[1], "#303030", true);
    text_at(f, p.x0 + p.w - 8, p.py(lim[1]) - 5, "+limit", "end", 11);
    text_at(f, p.x0 + p.w - 8, p.py(lim[0]) + 13, "-limit", "end", 11);
  }
  f << "</svg>\n";
}

}  // namespace gptwalk
