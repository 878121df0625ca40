#include "gptwalk/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gptwalk/dynamics.hpp"
#include "gptwalk/integrator.hpp"
#include "gptwalk/outputs.hpp"

namespace gptwalk {

namespace {

// Per-phase constants: domain, masked input matrix, frozen contact targets,
// phase bookkeeping, and the held torque in sampled-control mode.
struct PhaseCtx {
  const SimSetup* s = nullptr;
  int di = 0;
  const DomainSpec* dom = nullptr;
  MatX B_eff;
  int n_a = 0;
  PhaseState ph0;
  VecX targets;
  bool zoh = false;
  VecX u_hold;
};

struct LoopEval {
  VecX qddot;
  ControlEval ce;
  VecX Fc;
  OutputEval oe;
  bool have_oe = false;
};

GeneralizedState unpack(int nq, const VecX& z) {
  GeneralizedState st;
  st.q = z.segment(0, nq);
  st.qdot = z.segment(nq, nq);
  return st;
}

LoopEval eval_loop(const PhaseCtx& ctx, Scalar t, const VecX& z,
                   bool want_oe) {
  const RobotModel& m = *ctx.s->model;
  const int nq = m.nq();
  const GeneralizedState st = unpack(nq, z);
  PhaseState ph = ctx.ph0;
  ph.theta = z[2 * nq];
  LoopEval out;
  const DynTerms terms =
      compute_dyn_terms(m, st.q, st.qdot, ctx.dom->contacts, ctx.B_eff);
  if (ctx.zoh) {
    out.ce.u = ctx.u_hold;
    if (want_oe) {
      out.oe = output_function(m, *ctx.dom, t, st, ph, *ctx.s->gait,
                               *ctx.s->path);
      out.have_oe = true;
    }
  } else {
    out.oe =
        output_function(m, *ctx.dom, t, st, ph, *ctx.s->gait, *ctx.s->path);
    out.have_oe = true;
    const PDGains& g = ctx.s->gains.at(ctx.di);
    out.ce = ctx.s->use_qp
                 ? io_qp_control(terms, out.oe, g, ctx.dom->act_mask, ctx.n_a,
                                 ctx.s->limits, ctx.s->qp_p)
                 : io_pd_terms(terms, out.oe, g, ctx.dom->act_mask, ctx.n_a);
  }
  const ConstrainedAccel ca = constrained_dynamics(terms, out.ce.u);
  out.qddot = ca.qddot;
  out.Fc = ca.F_c;
  return out;
}

VecX controller_u(const PhaseCtx& ctx, Scalar t, const VecX& z) {
  PhaseCtx live = ctx;
  live.zoh = false;
  return eval_loop(live, t, z, false).ce.u;
}

Scalar guard_of(const PhaseCtx& ctx, Scalar t, const VecX& z) {
  const RobotModel& m = *ctx.s->model;
  if (ctx.dom->guard_needs_force()) {
    const LoopEval ev = eval_loop(ctx, t, z, false);
    Scalar f = 0;
    for (int r : ctx.dom->contacts.heel_z_rows) f += ev.Fc[r];
    return f;
  }
  const int nq = m.nq();
  return guard_value(m, *ctx.s->graph, ctx.di, t, unpack(nq, z), VecX(),
                     z[2 * nq], ctx.s->gait->l_s);
}

TraceSample make_sample(const PhaseCtx& ctx, Scalar t, const VecX& z) {
  const RobotModel& m = *ctx.s->model;
  const int nq = m.nq();
  const LoopEval ev = eval_loop(ctx, t, z, true);
  TraceSample smp;
  smp.t = t;
  smp.domain = ctx.di;
  smp.q = z.segment(0, nq);
  smp.qd = z.segment(nq, nq);
  smp.u = ev.ce.u;
  smp.theta = z[2 * nq];
  smp.T0 = ctx.ph0.T0;
  smp.T_Uk = ctx.ph0.T_Uk;
  smp.delta_tau_U = ctx.ph0.delta_tau_U;
  const GaitLibrary& gait = *ctx.s->gait;
  smp.s = ctx.dom->output == OutputKind::UnderTwo
              ? local_phase(t, smp.T_Uk, smp.delta_tau_U)
              : normalized_phase(smp.theta, gait.theta_max);
  if (ev.have_oe) {
    smp.y = ev.oe.y;
    smp.ydot = ev.oe.ydot;
    smp.y_norm = ev.oe.y.norm();
    smp.ydot_norm = ev.oe.ydot.norm();
  }
  for (int i = 0; i < ctx.dom->contacts.n_c(); ++i)
    if (ctx.dom->contacts.rows[i].axis == 2) smp.Fc_z_total += ev.Fc[i];
  for (int r : ctx.dom->contacts.heel_z_rows) smp.Fc_z_heel += ev.Fc[r];
  if (ctx.dom->id == DomainId::UA) {
    if (gait.three_domain()) {
      smp.x_eta.resize(2);
      smp.x_eta[0] = foot_pitch_of(m, smp.q, m.feet[0].link);
      smp.x_eta[1] = foot_pitch_rate(m, smp.q, smp.qd, m.feet[0].link);
    } else {
      smp.x_eta.resize(4);
      smp.x_eta << smp.q[3], smp.q[4], smp.qd[3], smp.qd[4];
    }
  }
  const LyapunovCertificate* cert = ctx.s->cert;
  if (cert && ev.have_oe) {
    VecX x(2 * ev.oe.y.size());
    x << ev.oe.y, ev.oe.ydot;
    switch (ctx.dom->id) {
      case DomainId::FA:
        smp.V_F = eval_V(cert->F, x);
        break;
      case DomainId::UA:
        smp.V_xi = eval_V(cert->Xi, x);
        smp.V_U = smp.V_xi + cert->beta * smp.x_eta.squaredNorm();
        break;
      case DomainId::OA:
        smp.V_O = eval_V(cert->O, x);
        break;
    }
  }
  return smp;
}

}  // namespace

GeneralizedState constraint_stabilize(const RobotModel& model,
                                      const GeneralizedState& state,
                                      const ContactSet& contacts,
                                      const VecX& contact_targets,
                                      Scalar drift_tol) {
  GeneralizedState out = state;
  if (contacts.empty()) return out;
  if (contact_targets.size() != contacts.n_c())
    throw Error("constraint_stabilize: target size mismatch");
  for (int it = 0; it < 10; ++it) {
    const VecX r = contact_positions(model, out.q, contacts) - contact_targets;
    if (r.lpNorm<Eigen::Infinity>() < 1e-12) break;
    const MatX J = contact_jacobian(model, out.q, contacts);
    const MatX JJt = J * J.transpose();
    out.q -= J.transpose() * JJt.ldlt().solve(r);
  }
  const VecX r = contact_positions(model, out.q, contacts) - contact_targets;
  if (r.lpNorm<Eigen::Infinity>() > drift_tol)
    throw SimulationError("constraint drift exceeds tolerance");
  const MatX J = contact_jacobian(model, out.q, contacts);
  const MatX JJt = J * J.transpose();
  out.qdot -= J.transpose() * JJt.ldlt().solve(J * out.qdot);
  return out;
}

PhaseOutcome integrate_phase(const SimSetup& setup, int domain_index,
                             const PhaseState& phase, Scalar t_start,
                             const GeneralizedState& state0, Scalar t_horizon,
                             SimTrace* trace, long* sample_index) {
  const RobotModel& m = *setup.model;
  const int nq = m.nq();
  const SimConfig& cf = setup.config;

  PhaseCtx ctx;
  ctx.s = &setup;
  ctx.di = domain_index;
  ctx.dom = &setup.graph->at(domain_index);
  ctx.B_eff = effective_input_matrix(m, *ctx.dom);
  ctx.n_a = static_cast<int>(ctx.B_eff.cols());
  ctx.ph0 = phase;
  ctx.targets = contact_positions(m, state0.q, ctx.dom->contacts);
  ctx.zoh = cf.zoh_rate > 0;

  VecX z0(2 * nq + 1);
  z0 << state0.q, state0.qdot, phase.theta;
  if (ctx.zoh) ctx.u_hold = controller_u(ctx, t_start, z0);

  const Scalar g_entry = guard_of(ctx, t_start, z0);
  if (g_entry <= 0)
    throw SimulationError("guard violated at entry of " + ctx.dom->name);

  PhaseOutcome out;
  out.T_switch = t_horizon;
  out.pre_state = state0;
  out.theta_pre = phase.theta;
  if (t_horizon <= t_start + 1e-15) return out;

  // Entry sample doubles as the post-event sample of the previous edge.
  Scalar last_sample_t = -std::numeric_limits<Scalar>::infinity();
  if (trace) {
    trace->samples.push_back(make_sample(ctx, t_start, z0));
    last_sample_t = t_start;
    while (static_cast<Scalar>(*sample_index) / cf.sample_rate <=
           t_start + 1e-9)
      ++*sample_index;
  }

  Dopri5 stepper(
      [&ctx, nq](Scalar t, const VecX& z) {
        const LoopEval ev = eval_loop(ctx, t, z, false);
        VecX dz(z.size());
        dz.segment(0, nq) = z.segment(nq, nq);
        dz.segment(nq, nq) = ev.qddot;
        dz[2 * nq] = std::hypot(z[nq], z[nq + 1]);
        return dz;
      },
      cf.rtol, cf.atol, cf.hmax);
  stepper.set_state(t_start, z0);

  Scalar next_tick = std::numeric_limits<Scalar>::infinity();
  if (ctx.zoh)
    next_tick = (std::floor(t_start * cf.zoh_rate + 1e-9) + 1.0) / cf.zoh_rate;

  while (stepper.t() < t_horizon - 1e-13) {
    const Scalar t_target = std::min(t_horizon, next_tick);
    const DenseOutput dense = stepper.step(t_target);
    const Scalar ta = dense.t0;
    const Scalar tb = dense.t0 + dense.h;

    // Scan for a downward guard crossing inside the accepted interval.
    Scalar event_T = -1, event_g = 0;
    Scalar sp = ta;
    Scalar gp = guard_of(ctx, ta, dense.eval(ta));
    if (gp <= 0) {
      event_T = ta;  // crossing slipped between scan points of the last step
      event_g = gp;
    }
    while (event_T < 0 && sp < tb - 1e-15) {
      const Scalar sn = std::min(sp + cf.guard_scan_dt, tb);
      const Scalar gn = guard_of(ctx, sn, dense.eval(sn));
      if (gp > 0 && gn <= 0) {
        event_T = bisect_zero(
            [&](Scalar tt) { return guard_of(ctx, tt, dense.eval(tt)); }, sp,
            sn, cf.event_tol);
        event_g = guard_of(ctx, event_T, dense.eval(event_T));
        break;
      }
      sp = sn;
      gp = gn;
    }

    // Fixed-rate samples covered by this interval (held back near events).
    if (trace) {
      while (true) {
        const Scalar tk = static_cast<Scalar>(*sample_index) / cf.sample_rate;
        if (tk > tb + 1e-12) break;
        if (event_T >= 0 && tk > event_T - 2e-9) break;
        if (tk >= ta - 1e-12) {
          trace->samples.push_back(make_sample(ctx, tk, dense.eval(tk)));
          last_sample_t = tk;
        }
        ++*sample_index;
      }
    }

    if (event_T >= 0) {
      if (event_T - t_start < cf.min_dwell)
        throw SimulationError("phase " + ctx.dom->name +
                              " shorter than minimum dwell");
      if (trace && event_T - 1e-9 > t_start) {
        trace->samples.push_back(
            make_sample(ctx, event_T - 1e-9, dense.eval(event_T - 1e-9)));
        while (static_cast<Scalar>(*sample_index) / cf.sample_rate <=
               event_T + 1e-9)
          ++*sample_index;
      }
      const VecX ze = dense.eval(event_T);
      out.event = true;
      out.T_switch = event_T;
      out.pre_state = unpack(nq, ze);
      out.theta_pre = ze[2 * nq];
      out.guard_residual = std::abs(event_g);
      const Scalar db = std::min(Scalar(1e-6), event_T - ta);
      if (db > 0) {
        const Scalar gb =
            guard_of(ctx, event_T - db, dense.eval(event_T - db));
        out.guard_slope = (event_g - gb) / db;
      }
      return out;
    }

    // Control update ticks (sampled mode only).
    if (ctx.zoh && stepper.t() >= next_tick - 1e-12) {
      ctx.u_hold = controller_u(ctx, stepper.t(), stepper.y());
      stepper.set_state(stepper.t(), stepper.y());
      next_tick += 1.0 / cf.zoh_rate;
    }

    // Constraint drift projection on the step endpoint.
    if (!ctx.dom->contacts.empty()) {
      VecX znow = stepper.y();
      const VecX r =
          contact_positions(m, znow.segment(0, nq), ctx.dom->contacts) -
          ctx.targets;
      if (r.lpNorm<Eigen::Infinity>() > 1e-9) {
        GeneralizedState stp = unpack(nq, znow);
        stp = constraint_stabilize(m, stp, ctx.dom->contacts, ctx.targets,
                                   cf.drift_tol);
        znow.segment(0, nq) = stp.q;
        znow.segment(nq, nq) = stp.qdot;
        stepper.set_state(stepper.t(), znow);
      }
    }
  }

  out.pre_state = unpack(nq, stepper.y());
  out.theta_pre = stepper.y()[2 * nq];
  out.T_switch = t_horizon;
  if (trace && t_horizon > last_sample_t + 1e-9)
    trace->samples.push_back(make_sample(ctx, t_horizon, stepper.y()));
  return out;
}

SimTrace simulate(const SimSetup& setup) {
  if (!setup.model || !setup.graph || !setup.gait || !setup.path)
    throw Error("simulate: setup is missing model, graph, gait, or path");
  const RobotModel& m = *setup.model;
  const int nq = m.nq();
  if (setup.z0.size() != 2 * nq + 1)
    throw Error("simulate: initial state must be [q, qdot, theta]");
  if (static_cast<int>(setup.gains.size()) != setup.graph->size())
    throw Error("simulate: one PD gain set per domain required");

  SimTrace trace;
  trace.nq = nq;
  trace.n_a = static_cast<int>(input_matrix(m).cols());
  for (const auto& d : setup.graph->domains) trace.domain_names.push_back(d.name);

  GeneralizedState st = unpack(nq, setup.z0);
  PhaseState ph;
  ph.theta = setup.z0[2 * nq];
  ph.T0 = setup.t0;
  ph.T_Uk = setup.t0;
  ph.delta_tau_U = setup.gait->delta_tau_U;

  const Scalar t_end = setup.t0 + setup.config.horizon;
  Scalar t = setup.t0;
  int di = 0;
  long k = std::lround(std::ceil(setup.t0 * setup.config.sample_rate - 1e-9));

  for (int edges = 0;; ++edges) {
    if (edges > 100000) throw SimulationError("event count runaway");

    const ContactSet& cs = setup.graph->at(di).contacts;
    if (!cs.empty()) {
      VecX tg = contact_positions(m, st.q, cs);
      for (int i = 0; i < cs.n_c(); ++i)
        if (cs.rows[i].axis == 2) tg[i] = 0;  // active contacts ride the ground
      st = constraint_stabilize(m, st, cs, tg, setup.config.drift_tol);
    }

    const PhaseOutcome po =
        integrate_phase(setup, di, ph, t, st, t_end, &trace, &k);
    if (!po.event) break;

    const DomainSpec& dom = setup.graph->at(di);
    const int dj = setup.graph->next(di);
    GeneralizedState post = po.pre_state;
    const Scalar ke_pre = kinetic_energy(m, post.q, post.qdot);
    Scalar impulse_norm = 0;
    if (dom.exit_reset != ResetKind::Continuous) {
      const ImpactResult ir =
          impact_map(m, post.q, post.qdot, dom.exit_impact_contacts);
      post.qdot = ir.qdot_plus;
      impulse_norm = ir.impulse.norm();
    }
    if (dom.exit_reset == ResetKind::ImpactRelabel) post = m.relabel(post);
    const Scalar ke_post = kinetic_energy(m, post.q, post.qdot);

    TraceEvent ev;
    ev.t = po.T_switch;
    ev.edge = dom.name + "->" + setup.graph->at(dj).name;
    ev.impulse_norm = impulse_norm;
    ev.guard_residual = po.guard_residual;
    ev.KE_pre = ke_pre;
    ev.KE_post = ke_post;
    ev.from = di;
    ev.to = dj;
    ev.guard_slope = po.guard_slope;
    trace.events.push_back(ev);

    ph.theta = po.theta_pre;
    if (dj == 0) {
      ph.theta = 0;  // a fresh step starts at the full-actuation entry
      ph.T0 = po.T_switch;
    }
    if (setup.graph->at(dj).id == DomainId::UA) {
      ph.T_Uk = po.T_switch;
      if (!setup.gait->three_domain()) {
        const Scalar v = std::abs(path_speed(*setup.path, po.T_switch));
        ph.delta_tau_U = (setup.gait->theta_max - setup.gait->l_s) /
                         std::max(v, Scalar(1e-9));
      }
    }
    st = post;
    t = po.T_switch;
    di = dj;
    if (t >= t_end - 1e-12) break;
  }
  return trace;
}

}  // namespace gptwalk
