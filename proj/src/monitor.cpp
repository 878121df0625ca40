#include "gptwalk/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "gptwalk/bezier.hpp"
#include "gptwalk/dynamics.hpp"
#include "gptwalk/outputs.hpp"

namespace gptwalk {

namespace {

std::string fnum(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

struct Segment {
  int domain = 0;
  size_t i0 = 0, i1 = 0;  // inclusive sample range
  bool ends_in_event = false;
};

std::vector<Segment> split_phases(const SimTrace& trace) {
  std::vector<Segment> segs;
  const auto& smp = trace.samples;
  for (size_t i = 0; i < smp.size(); ++i) {
    if (segs.empty() || smp[i].domain != segs.back().domain) {
      segs.push_back({smp[i].domain, i, i, false});
    } else {
      segs.back().i1 = i;
    }
  }
  for (auto& sg : segs) {
    const Scalar te = smp[sg.i1].t;
    for (const auto& ev : trace.events)
      if (std::abs(ev.t - te) < 1e-6) sg.ends_in_event = true;
  }
  return segs;
}

Scalar active_V(const LyapunovCertificate&, const TraceSample& s,
                bool xi_part) {
  switch (s.domain) {
    case 0:
      return s.V_F;
    case 1:
      return xi_part ? s.V_xi : s.V_U;
    default:
      return s.V_O;
  }
}

Scalar domain_c3(const LyapunovCertificate& cert, int domain) {
  switch (domain) {
    case 0:
      return cert.F.c3;
    case 1:
      return cert.Xi.c3;
    default:
      return cert.O.c3;
  }
}

}  // namespace

MonitorReport monitor_trace(const SimTrace& trace,
                            const LyapunovCertificate& cert, Scalar tol,
                            const MonitorContext* ctx) {
  if (trace.samples.size() < 3)
    throw MonitorError("trace too short to monitor");
  for (const auto& s : trace.samples)
    if (s.y.size() == 0)
      throw MonitorError(
          "trace lacks internal output channels; monitor a freshly "
          "simulated trace");

  MonitorReport rep;
  const auto& smp = trace.samples;
  const std::vector<Segment> segs = split_phases(trace);

  // C1: per-phase decay fits, plus the Vdot <= -c3 V interior check for
  // the fully and over-actuated phases.
  rep.c1_ok = true;
  for (const auto& sg : segs) {
    PhaseFit fit;
    fit.domain = sg.domain;
    fit.name = sg.domain < static_cast<int>(trace.domain_names.size())
                   ? trace.domain_names[sg.domain]
                   : "D" + std::to_string(sg.domain);
    fit.t_begin = smp[sg.i0].t;
    fit.t_end = smp[sg.i1].t;
    const bool is_ua = sg.domain == 1;
    if (is_ua) {
      fit.tau_planned = smp[sg.i0].delta_tau_U;
    } else if (ctx && ctx->gait) {
      fit.tau_planned =
          sg.domain == 0 ? ctx->gait->delta_tau_F : ctx->gait->delta_tau_O;
    }
    fit.c3 = domain_c3(cert, sg.domain);
    const Scalar dur = fit.t_end - fit.t_begin;
    const Scalar lo = fit.t_begin + 0.05 * dur;
    const Scalar hi = fit.t_end - 0.05 * dur;
    for (size_t i = sg.i0; i <= sg.i1; ++i)
      fit.v_max = std::max(fit.v_max, active_V(cert, smp[i], is_ua));
    if (fit.v_max < 1e-14 || sg.i1 - sg.i0 < 8) {
      fit.skipped = true;
      fit.decays = true;
      fit.vdot_ok = true;
      rep.fits.push_back(fit);
      continue;
    }
    // Least squares on log V over the interior.
    Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
    long npt = 0;
    for (size_t i = sg.i0; i <= sg.i1; ++i) {
      const Scalar v = active_V(cert, smp[i], is_ua);
      if (smp[i].t < lo || smp[i].t > hi || v <= 0) continue;
      const Scalar x = smp[i].t - fit.t_begin;
      const Scalar w = std::log(v);
      sx += x;
      sy += w;
      sxx += x * x;
      sxy += x * w;
      ++npt;
    }
    if (npt >= 4) {
      const Scalar den = npt * sxx - sx * sx;
      fit.rate = den > 0 ? -(npt * sxy - sx * sy) / den : 0;
    }
    fit.decays = fit.rate > 0;
    fit.vdot_ok = true;
    if (!is_ua) {
      for (size_t i = sg.i0 + 1; i + 1 <= sg.i1; ++i) {
        if (smp[i].t < lo || smp[i].t > hi) continue;
        const Scalar v = active_V(cert, smp[i], false);
        if (v < 1e-14) continue;
        const Scalar dt = smp[i + 1].t - smp[i - 1].t;
        if (dt <= 0) continue;
        const Scalar vd = (active_V(cert, smp[i + 1], false) -
                           active_V(cert, smp[i - 1], false)) /
                          dt;
        if (vd > -0.95 * fit.c3 * v + tol) {
          fit.vdot_ok = false;
          break;
        }
      }
    }
    if (!(fit.decays && fit.vdot_ok)) rep.c1_ok = false;
    rep.fits.push_back(fit);
  }

  // C2: bound the UA exit value by the affine map of the entry value
  // built from the empirical surrogates khat_f and eps_hat_U.
  for (const auto& sg : segs) {
    if (sg.domain != 1 || !sg.ends_in_event) continue;
    for (size_t i = sg.i0 + 1; i + 1 <= sg.i1; ++i) {
      const Scalar dt = smp[i + 1].t - smp[i - 1].t;
      if (dt <= 0 || smp[i + 1].x_eta.size() == 0) continue;
      const Scalar f = ((smp[i + 1].x_eta - smp[i - 1].x_eta) / dt).norm();
      rep.khat_f = std::max(rep.khat_f, f);
    }
    const Scalar planned = smp[sg.i0].delta_tau_U;
    if (planned > 0) {
      const Scalar actual = smp[sg.i1].t - smp[sg.i0].t;
      rep.eps_hat_U =
          std::max(rep.eps_hat_U, std::abs(actual - planned) / planned);
    }
  }
  rep.c2_ok = true;
  for (const auto& sg : segs) {
    if (sg.domain != 1 || !sg.ends_in_event) continue;
    UaBound b;
    b.t_entry = smp[sg.i0].t;
    b.t_exit = smp[sg.i1].t;
    b.v_entry = smp[sg.i0].V_U;
    b.v_exit = smp[sg.i1].V_U;
    b.bound = 2.0 * b.v_entry +
              2.0 * cert.beta * rep.khat_f * rep.khat_f *
                  (1.0 + rep.eps_hat_U) * (1.0 + rep.eps_hat_U) +
              tol;
    b.ok = b.v_exit <= b.bound;
    if (!b.ok) rep.c2_ok = false;
    rep.ua_bounds.push_back(b);
  }

  // C3: switching-in sequences per domain, nonincreasing after the first
  // cycle; entry values come from the post-event samples.
  std::vector<std::vector<size_t>> entries_by_domain(
      std::max<size_t>(trace.domain_names.size(), 3));
  for (size_t k = 0; k < segs.size(); ++k) {
    const Segment& sg = segs[k];
    SwitchRecord sw;
    sw.t = smp[sg.i0].t;
    sw.domain = sg.domain;
    if (k == 0) {
      sw.edge = "start";
    } else {
      for (const auto& ev : trace.events)
        if (std::abs(ev.t - smp[sg.i0].t) < 1e-6) {
          sw.edge = ev.edge;
          sw.guard_slope = ev.guard_slope;
        }
    }
    sw.V_in = sg.domain == 0   ? smp[sg.i0].V_F
              : sg.domain == 1 ? smp[sg.i0].V_U
                               : smp[sg.i0].V_O;
    auto& seq = entries_by_domain[sg.domain];
    sw.first_cycle = seq.empty();
    seq.push_back(rep.switches.size());
    rep.switches.push_back(sw);
  }
  rep.c3_ok = true;
  for (const auto& seq : entries_by_domain) {
    for (size_t i = 2; i < seq.size(); ++i) {
      const Scalar prev = rep.switches[seq[i - 1]].V_in;
      const Scalar cur = rep.switches[seq[i]].V_in;
      if (cur > prev + tol) {
        rep.c3_ok = false;
        rep.notes.push_back(
            "C3 violation entering " +
            (rep.switches[seq[i]].domain <
                     static_cast<int>(trace.domain_names.size())
                 ? trace.domain_names[rep.switches[seq[i]].domain]
                 : "?") +
            " at t=" + fnum(rep.switches[seq[i]].t) + ": " + fnum(cur) +
            " > " + fnum(prev));
      }
    }
  }

  // Transversality: every localized touchdown must be crossed downward.
  for (const auto& ev : trace.events)
    if (ev.guard_slope >= 0)
      rep.notes.push_back("near-tangential guard crossing on " + ev.edge +
                          " at t=" + fnum(ev.t) +
                          " (slope=" + fnum(ev.guard_slope) + ")");

  // B2: reset-compatibility offsets from the planned zero-error states.
  if (ctx && ctx->model && ctx->graph && ctx->gait && ctx->path) {
    rep.resets = b2_offsets(*ctx->model, *ctx->graph, *ctx->gait, *ctx->path,
                            ctx->t0, ctx->b2_threshold);
    for (const auto& r : rep.resets)
      if (!r.ok) {
        rep.b2_ok = false;
        rep.notes.push_back("B2 offset above threshold on " + r.edge + ": " +
                            fnum(r.offset));
      }
  }

  rep.ok = rep.c1_ok && rep.c2_ok && rep.c3_ok && rep.b2_ok;
  return rep;
}

std::vector<ResetOffset> b2_offsets(const RobotModel& model,
                                    const GaitGraph& graph,
                                    const GaitLibrary& gait,
                                    const GlobalPathSpec& path, Scalar t0,
                                    Scalar threshold) {
  const bool three = gait.three_domain();
  if (gait.seed_pose.size() != model.nq())
    throw MonitorError("gait library lacks a seed pose");
  if (gait.ua_aux.curve.coef.size() == 0)
    throw MonitorError("gait library lacks the auxiliary plan channels");

  const Scalar T_U = t0 + gait.delta_tau_F;
  Scalar dtu = gait.delta_tau_U;
  std::vector<Scalar> bounds{t0, T_U};
  if (three) {
    bounds.push_back(T_U + gait.delta_tau_U);
    bounds.push_back(T_U + gait.delta_tau_U + gait.delta_tau_O);
  } else {
    dtu = (gait.theta_max - gait.l_s) /
          std::max(std::abs(path_speed(path, T_U)), Scalar(1e-9));
    bounds.push_back(T_U + dtu);
  }

  // Footprints: the support ankle passes under the base mid-step; the
  // landing footprint sits one step length further along the path.
  const Scalar t_mid1 =
      path_time_at_arc_length(path, t0, 0.5 * gait.theta_max);
  const Scalar t_mid2 =
      path_time_at_arc_length(path, t0, 1.5 * gait.theta_max);
  const GpPoint g1 = desired_gp(path, t_mid1);
  const GpPoint g2 = desired_gp(path, t_mid2);
  const std::vector<FootPlacement> placements{
      {0, Vec2(g1.x, g1.y), g1.psi}, {1, Vec2(g2.x, g2.y), g2.psi}};

  std::vector<ResetOffset> out;
  for (int di = 0; di < graph.size(); ++di) {
    const DomainSpec& dom = graph.at(di);
    const int dj = graph.next(di);
    const DomainSpec& nxt = graph.at(dj);
    const Scalar t_exit = bounds[di + 1];

    Scalar theta_exit;
    if (three)
      theta_exit = (dom.id == DomainId::FA   ? gait.s_fu
                    : dom.id == DomainId::UA ? gait.s_uo
                                             : 1.0) *
                   gait.theta_max;
    else
      theta_exit = dom.id == DomainId::FA ? gait.l_s : gait.theta_max;

    PhaseState ph;
    ph.theta = theta_exit;
    ph.T0 = t0;
    ph.T_Uk = T_U;
    ph.delta_tau_U = dtu;
    const Scalar s_exit = dom.output == OutputKind::UnderTwo
                              ? local_phase(t_exit, ph.T_Uk, ph.delta_tau_U)
                              : normalized_phase(theta_exit, gait.theta_max);

    PoseSpec spec;
    spec.kind = dom.output;
    spec.contacts = &dom.contacts;
    spec.contact_targets =
        planar_contact_targets(model, dom.contacts, placements);
    const GaitCurve& gc = dom.id == DomainId::FA   ? gait.fa
                          : dom.id == DomainId::UA ? gait.ua
                                                   : gait.oa;
    spec.state_targets = bezier_eval(gc.curve, s_exit).value;
    const GpPoint ge = desired_gp(path, t_exit);
    spec.gp = Vec3(ge.x, ge.y, ge.psi);
    Scalar theta_st_dot = 0;
    Vec2 rp_rate = Vec2::Zero();
    if (dom.output == OutputKind::UnderThree) {
      const BezierEval aux = bezier_eval(gait.ua_aux.curve, s_exit);
      spec.theta_st = aux.value[0];
      theta_st_dot =
          aux.d1[0] * std::abs(path_speed(path, t_exit)) / gait.theta_max;
    }
    if (dom.output == OutputKind::UnderTwo) {
      const BezierEval aux = bezier_eval(gait.ua_aux.curve, s_exit);
      spec.base_rp = Vec2(aux.value[0], aux.value[1]);
      rp_rate = Vec2(aux.d1[0], aux.d1[1]) / ph.delta_tau_U;
    }

    VecX qg = gait.seed_pose;
    qg[0] = ge.x;
    qg[1] = ge.y;
    qg[5] = ge.psi;
    const VecX q = solve_pose(model, spec, qg);
    const VecX qd = solve_zero_error_rates(model, dom, t_exit, q, ph, gait,
                                           path, theta_st_dot, rp_rate);

    GeneralizedState post{q, qd};
    if (dom.exit_reset != ResetKind::Continuous)
      post.qdot = impact_map(model, q, qd, dom.exit_impact_contacts).qdot_plus;
    if (dom.exit_reset == ResetKind::ImpactRelabel) post = model.relabel(post);

    PhaseState ph2 = ph;
    if (dj == 0) {
      ph2.theta = 0;
      ph2.T0 = t_exit;
    }
    if (nxt.id == DomainId::UA) ph2.T_Uk = t_exit;
    const OutputEval oe =
        output_function(model, nxt, t_exit, post, ph2, gait, path);

    ResetOffset ro;
    ro.edge = dom.name + "->" + nxt.name;
    ro.t = t_exit;
    ro.offset = std::sqrt(oe.y.squaredNorm() + oe.ydot.squaredNorm());
    ro.ok = ro.offset <= threshold;
    out.push_back(ro);
  }
  return out;
}

std::string format_report(const MonitorReport& rep) {
  std::string s;
  auto line = [&s](const std::string& l) {
    s += l;
    s += '\n';
  };
  auto pf = [](bool b) { return b ? std::string("PASS") : std::string("FAIL"); };
  line("stability monitor report");
  line("C1 continuous-phase decay: " + pf(rep.c1_ok));
  for (const auto& f : rep.fits) {
    std::string l = "  " + f.name + " [" + fnum(f.t_begin) + ", " +
                    fnum(f.t_end) + "]";
    if (f.skipped) {
      l += " skipped (vmax " + fnum(f.v_max) + ")";
    } else {
      l += " rate " + fnum(f.rate) + " c3 " + fnum(f.c3) + " vmax " +
           fnum(f.v_max) + (f.decays ? "" : " NOT DECAYING") +
           (f.vdot_ok ? "" : " VDOT BOUND FAIL");
    }
    if (f.tau_planned > 0)
      l += " tau " + fnum(f.t_end - f.t_begin) + "/" + fnum(f.tau_planned);
    line(l);
  }
  line("C2 underactuated-phase boundedness: " + pf(rep.c2_ok) +
       " (khat_f " + fnum(rep.khat_f) + ", eps_hat_U " + fnum(rep.eps_hat_U) +
       ")");
  for (const auto& b : rep.ua_bounds)
    line("  [" + fnum(b.t_entry) + ", " + fnum(b.t_exit) + "] entry " +
         fnum(b.v_entry) + " exit " + fnum(b.v_exit) + " bound " +
         fnum(b.bound) + (b.ok ? "" : " FAIL"));
  line("C3 switching-in monotonicity: " + pf(rep.c3_ok));
  for (const auto& sw : rep.switches)
    line("  t " + fnum(sw.t) + " -> domain " + std::to_string(sw.domain) +
         " V " + fnum(sw.V_in) + (sw.first_cycle ? " (first cycle)" : "") +
         (sw.edge.empty() ? "" : " via " + sw.edge));
  if (!rep.resets.empty()) {
    line("B2 reset offsets: " + pf(rep.b2_ok));
    for (const auto& r : rep.resets)
      line("  " + r.edge + " at t " + fnum(r.t) + ": " + fnum(r.offset) +
           (r.ok ? "" : " FAIL"));
  }
  for (const auto& n : rep.notes) line("note: " + n);
  line("overall: " + pf(rep.ok));
  return s;
}

void save_report(const MonitorReport& rep, const std::string& prefix) {
  {
    std::ofstream f(prefix + ".txt");
    if (!f) throw Error("cannot write " + prefix + ".txt");
    f << format_report(rep);
  }
  {
    std::ofstream f(prefix + "_phases.csv");
    if (!f) throw Error("cannot write " + prefix + "_phases.csv");
    f << "# monitor phases v1\n";
    f << "domain,t_begin,t_end,tau_planned,rate,c3,v_max,skipped,"
         "decays,vdot_ok\n";
    for (const auto& p : rep.fits)
      f << p.domain << ',' << fmt_num(p.t_begin) << ',' << fmt_num(p.t_end)
        << ',' << fmt_num(p.tau_planned) << ',' << fmt_num(p.rate) << ','
        << fmt_num(p.c3) << ',' << fmt_num(p.v_max) << ',' << p.skipped
        << ',' << p.decays << ',' << p.vdot_ok << "\n";
  }
  {
    std::ofstream f(prefix + "_switches.csv");
    if (!f) throw Error("cannot write " + prefix + "_switches.csv");
    f << "# monitor switches v1\n";
    f << "t,domain,V_in,first_cycle,guard_slope,edge\n";
    for (const auto& sw : rep.switches)
      f << fmt_num(sw.t) << ',' << sw.domain << ',' << fmt_num(sw.V_in)
        << ',' << sw.first_cycle << ',' << fmt_num(sw.guard_slope) << ','
        << sw.edge << "\n";
  }
}

}  // namespace gptwalk
