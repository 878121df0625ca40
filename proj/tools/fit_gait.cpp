// Designs a periodic walking step for one of the hybrid gait graphs and
// writes a gait library file.
//
// Pipeline: foot-roll schedules give desired foot poses per phase, whole-body
// inverse kinematics solves a configuration grid, output channels are sampled
// on the grid, and Bernstein curves are fitted with boundary coefficients
// pinned to the post-reset image of the step-end state, so the desired
// outputs stay continuous across resets at the design speed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gptwalk/bezier.hpp"
#include "gptwalk/contacts.hpp"
#include "gptwalk/domains.hpp"
#include "gptwalk/dynamics.hpp"
#include "gptwalk/gait.hpp"
#include "gptwalk/kinematics.hpp"
#include "gptwalk/model.hpp"
#include "gptwalk/monitor.hpp"
#include "gptwalk/outputs.hpp"
#include "gptwalk/path.hpp"
#include "gptwalk/rotation.hpp"
#include "gptwalk/types.hpp"

namespace {

using namespace gptwalk;

struct FitConfig {
  std::string model_file;
  std::string graph = "two-domain";
  std::string out_file;
  std::string gait_name;
  Scalar step_length = 0.071;
  Scalar speed = 0;  // 0 = per-graph default
  Scalar base_height = 0.20;
  Scalar apex = 0.024;
  Scalar land_speed = 0.05;
  Scalar ls_frac = 0.81;
  Scalar ua_frac = 0.08;
  Scalar beta_max = 0.18;
  Scalar gamma_hs = 0.10;
  Scalar lean = 0.20;  // three-domain constant forward base pitch
  int grid = 241;
  int order = 7;
};

Scalar smooth5(Scalar u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (6.0 * u - 15.0));
}

// Cubic with c(0)=0, c(1)=1 and chosen end slopes.
Scalar hermite01(Scalar w, Scalar r0, Scalar r1) {
  w = std::clamp(w, 0.0, 1.0);
  const Scalar w2 = w * w, w3 = w2 * w;
  return 3.0 * w2 - 2.0 * w3 + r0 * (w - 2.0 * w2 + w3) + r1 * (w3 - w2);
}

// Monomial polynomial through derivative conditions (order, x, value).
struct PolyCond {
  int order;
  Scalar x;
  Scalar value;
};

VecX poly_through(const std::vector<PolyCond>& conds) {
  const int n = static_cast<int>(conds.size());
  MatX A = MatX::Zero(n, n);
  VecX b(n);
  for (int i = 0; i < n; ++i) {
    b(i) = conds[i].value;
    for (int k = conds[i].order; k < n; ++k) {
      Scalar f = 1;
      for (int j = 0; j < conds[i].order; ++j) f *= static_cast<Scalar>(k - j);
      A(i, k) = f * std::pow(conds[i].x, k - conds[i].order);
    }
  }
  return A.partialPivLu().solve(b);
}

Scalar poly_val(const VecX& c, Scalar x) {
  Scalar v = 0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * x + c(k);
  return v;
}

struct FootPose {
  Scalar x = 0;
  Scalar z = 0;
  Scalar pitch = 0;
};

// Ankle pose with the foot rolled about its pinned toe line (pitch > 0).
FootPose toe_pivot(const FootGeometry& g, Scalar footprint, Scalar beta) {
  FootPose p;
  p.pitch = beta;
  p.x = footprint + g.toe - g.toe * std::cos(beta) +
        g.sole_drop * std::sin(beta);
  p.z = g.toe * std::sin(beta) + g.sole_drop * std::cos(beta);
  return p;
}

// Ankle pose with the foot rolled about its pinned heel line (pitch = -gamma).
FootPose heel_pivot(const FootGeometry& g, Scalar footprint, Scalar gamma) {
  FootPose p;
  p.pitch = -gamma;
  p.x = footprint - g.heel + g.heel * std::cos(gamma) -
        g.sole_drop * std::sin(gamma);
  p.z = g.heel * std::sin(gamma) + g.sole_drop * std::cos(gamma);
  return p;
}

// Corner height above ground; dx = +toe or -heel.
Scalar corner_height(const FootGeometry& g, const FootPose& p, Scalar dx) {
  return p.z - std::sin(p.pitch) * dx - std::cos(p.pitch) * g.sole_drop;
}

// Desired foot poses over one step, phase s in [0,1]. The support footprint
// sits at x=0, the previous at -L, the landing at +L; the base glides from
// -L/2 to +L/2 at constant height. With rolls enabled the support toe-rolls
// after s_fu and the swing flight ends in a heel strike at s_uo.
struct StepPlan {
  const RobotModel* model = nullptr;
  bool rolls = false;
  Scalar L = 0, v = 0, z0 = 0;
  Scalar lean = 0;  // constant base pitch held through the step
  Scalar s_fu = 0, s_uo = 1;
  Scalar beta_max = 0, gamma_hs = 0;
  Scalar heel_r0 = 0.5, heel_r1 = 1.5;
  VecX zfly;  // flight ankle height, polynomial in u = s/s_uo

  const FootGeometry& sup() const { return model->feet[0]; }
  const FootGeometry& swg() const { return model->feet[1]; }
  Scalar sdot() const { return v / L; }

  FootPose flight_begin() const {
    return rolls ? toe_pivot(swg(), -L, beta_max)
                 : FootPose{-L, swg().sole_drop, 0};
  }
  FootPose flight_end() const {
    return rolls ? heel_pivot(swg(), L, gamma_hs)
                 : FootPose{L, swg().sole_drop, 0};
  }

  void build_flight(Scalar apex, Scalar land_speed) {
    const FootPose a = flight_begin();
    const FootPose b = flight_end();
    const Scalar dz_du = -land_speed * s_uo / sdot();
    zfly = poly_through({{0, 0.0, a.z},
                         {1, 0.0, 0.0},
                         {0, 0.5, swg().sole_drop + apex},
                         {0, 0.85, b.z + 0.3 * apex},
                         {0, 1.0, b.z},
                         {1, 1.0, dz_du}});
  }

  FootPose support_pose(Scalar s) const {
    if (!rolls || s <= s_fu) return FootPose{0, sup().sole_drop, 0};
    const Scalar beta = beta_max * smooth5((s - s_fu) / (1.0 - s_fu));
    return toe_pivot(sup(), 0, beta);
  }

  FootPose swing_pose(Scalar s) const {
    if (rolls && s > s_uo) {
      const Scalar w = (s - s_uo) / (1.0 - s_uo);
      return heel_pivot(swg(), L,
                        gamma_hs * (1.0 - hermite01(w, heel_r0, heel_r1)));
    }
    const Scalar u = std::clamp(s / s_uo, 0.0, 1.0);
    const FootPose a = flight_begin();
    const FootPose b = flight_end();
    const Scalar w = smooth5(u);
    FootPose p;
    p.x = a.x + (b.x - a.x) * w;
    p.pitch = a.pitch + (b.pitch - a.pitch) * w;
    p.z = poly_val(zfly, u);
    return p;
  }

  Vec3 base_pos(Scalar s) const { return Vec3((s - 0.5) * L, 0, z0); }
};

struct PoseTargets {
  Vec3 base_pos = Vec3::Zero();
  Scalar base_pitch = 0;
  FootPose foot[2];
};

PoseTargets plan_targets(const StepPlan& plan, Scalar s) {
  PoseTargets tg;
  tg.base_pos = plan.base_pos(s);
  tg.base_pitch = plan.lean;
  tg.foot[0] = plan.support_pose(s);
  tg.foot[1] = plan.swing_pose(s);
  return tg;
}

// Square residual: base pose rows plus position and orientation rows of both
// feet (pitch-only base, y = 0, yaw- and roll-free feet).
VecX plan_residual(const RobotModel& m, const VecX& q, const PoseTargets& tg) {
  VecX r(m.nq());
  r.segment(0, 3) = q.segment(0, 3) - tg.base_pos;
  r(3) = q(3);
  r(4) = q(4) - tg.base_pitch;
  r(5) = q(5);
  const KinCache kc = fk(m, q);
  int row = 6;
  for (int f = 0; f < 2; ++f) {
    const KinCache::Frame& fr = kc.dof[m.links[m.feet[f].link].dof];
    const Vec3 eul = rot_to_euler_zyx(fr.R);
    r(row++) = fr.p(0) - tg.foot[f].x;
    r(row++) = fr.p(1);
    r(row++) = fr.p(2) - tg.foot[f].z;
    r(row++) = eul(0);
    r(row++) = eul(1) - tg.foot[f].pitch;
    r(row++) = eul(2);
  }
  return r;
}

VecX solve_plan_pose(const RobotModel& m, const PoseTargets& tg,
                     const VecX& seed) {
  auto fn = [&m, &tg](const VecX& q) { return plan_residual(m, q, tg); };
  const VecX q = newton_solve(fn, seed);
  if (plan_residual(m, q, tg).norm() > 1e-8)
    throw Error("plan inverse kinematics did not converge");
  return q;
}

// Bent-knee guess: pitch joints of each leg stepped off the straight-knee
// singularity so the first Newton solve has a useful Jacobian.
VecX nominal_seed(const RobotModel& m, Scalar z0) {
  VecX q = VecX::Zero(m.nq());
  q(2) = z0;
  for (const FootGeometry& foot : m.feet) {
    std::vector<int> pitch;
    for (int li = foot.link; li >= 0; li = m.links[li].parent) {
      const Link& lk = m.links[li];
      if (lk.q_index >= 6 && std::abs(lk.joint_axis(1)) > 0.9)
        pitch.push_back(lk.q_index);
    }
    if (pitch.size() >= 3) {
      q(pitch[0]) = -0.4;
      q(pitch[1]) = 0.8;
      q(pitch[2]) = -0.4;
    }
  }
  return q;
}

// dq/ds by differencing fresh pose solves; side -1 backward, +1 forward,
// 0 central (for the ends of the step and schedule kinks).
VecX plan_qprime(const RobotModel& m, const StepPlan& plan, Scalar s,
                 const VecX& seed, int side) {
  const Scalar h = 1e-5;
  auto at = [&](Scalar sx) {
    return solve_plan_pose(m, plan_targets(plan, sx), seed);
  };
  if (side == 0) return (at(s + h) - at(s - h)) / (2 * h);
  const Scalar d = side > 0 ? -h : h;
  return (3.0 * at(s) - 4.0 * at(s - d) + at(s - 2 * d)) / (2 * d);
}

struct PlanGrid {
  VecX s;
  std::vector<VecX> q;
  std::vector<VecX> qp;  // dq/ds, filled on request
};

PlanGrid solve_grid(const RobotModel& m, const StepPlan& plan, int n,
                    bool with_qp) {
  PlanGrid g;
  g.s = VecX::LinSpaced(n, 0.0, 1.0);
  g.q.resize(n);
  VecX seed = nominal_seed(m, plan.z0);
  seed = solve_plan_pose(m, plan_targets(plan, 0.0), seed);
  for (int i = 0; i < n; ++i) {
    g.q[i] = solve_plan_pose(m, plan_targets(plan, g.s(i)), seed);
    seed = g.q[i];
  }
  if (with_qp) {
    g.qp.resize(n);
    for (int i = 0; i < n; ++i) {
      const int side = i == 0 ? +1 : (i == n - 1 ? -1 : 0);
      g.qp[i] = plan_qprime(m, plan, g.s(i), g.q[i], side);
    }
  }
  return g;
}

// Quasi-static actuation along the plan in the flat-support domain: solves
// [B J^T] [u; F] = M qdd + c for torques and contact forces per grid point.
struct SweepPoint {
  Scalar s = 0;
  Scalar heel_fz = 0;
  Scalar max_torque = 0;
};

std::vector<SweepPoint> force_sweep(const RobotModel& m,
                                    const DomainSpec& fa_dom,
                                    const PlanGrid& g, Scalar sdot,
                                    Scalar s_hi) {
  const MatX B = input_matrix(m);
  const int na = static_cast<int>(B.cols());
  const int nq = m.nq();
  const int n = static_cast<int>(g.q.size());
  const Scalar ds = g.s(1) - g.s(0);
  std::vector<SweepPoint> out;
  for (int i = 1; i + 1 < n; ++i) {
    if (g.s(i) > s_hi) break;
    const VecX qd = g.qp[i] * sdot;
    const VecX qdd = (g.qp[i + 1] - g.qp[i - 1]) / (2 * ds) * sdot * sdot;
    const DynTerms tm = compute_dyn_terms(m, g.q[i], qd, fa_dom.contacts, B);
    const int nc = static_cast<int>(tm.J.rows());
    if (na + nc != nq) throw Error("force sweep needs a square system");
    MatX A(nq, nq);
    A.leftCols(na) = tm.B;
    A.rightCols(nc) = tm.J.transpose();
    const VecX x = A.partialPivLu().solve(tm.M * qdd + tm.c);
    SweepPoint p;
    p.s = g.s(i);
    for (int r : fa_dom.contacts.heel_z_rows) p.heel_fz += x(na + r);
    p.max_torque = x.head(na).cwiseAbs().maxCoeff();
    out.push_back(p);
  }
  return out;
}

Scalar detect_s_fu(const std::vector<SweepPoint>& sweep) {
  if (sweep.front().heel_fz <= 0)
    throw Error(
        "support heel force nonpositive at the step start; move the trunk "
        "mass back");
  for (size_t i = 0; i + 1 < sweep.size(); ++i) {
    if (sweep[i].heel_fz > 0 && sweep[i + 1].heel_fz <= 0) {
      const Scalar f0 = sweep[i].heel_fz;
      const Scalar f1 = sweep[i + 1].heel_fz;
      const Scalar s =
          sweep[i].s + (sweep[i + 1].s - sweep[i].s) * f0 / (f0 - f1);
      if (s < 0.15 || s > 0.85)
        throw Error("heel-force crossing at s=" + std::to_string(s) +
                    " is outside the usable band; retune the trunk mass");
      return s;
    }
  }
  throw Error(
      "support heel force never crosses zero; move the trunk mass forward");
}

// d(state channels)/ds by differencing fresh pose solves.
VecX channel_slope(const RobotModel& m, OutputKind kind, const StepPlan& plan,
                   Scalar s, const VecX& seed, int side) {
  const Scalar h = 1e-5;
  auto at = [&](Scalar sx) {
    return measure_state_rows(
        m, kind, solve_plan_pose(m, plan_targets(plan, sx), seed));
  };
  if (side == 0) return (at(s + h) - at(s - h)) / (2 * h);
  const Scalar d = side > 0 ? -h : h;
  return (3.0 * at(s) - 4.0 * at(s - d) + at(s - 2 * d)) / (2 * d);
}

// Channel rates along a generalized velocity, by directional differencing.
VecX channel_rate(const RobotModel& m, OutputKind kind, const VecX& q,
                  const VecX& qd) {
  const Scalar h = 1e-6;
  return (measure_state_rows(m, kind, q + h * qd) -
          measure_state_rows(m, kind, q - h * qd)) /
         (2 * h);
}

// Control points of the same polynomial over the enclosing phase interval
// [0,1], given points over [a,1]: the right segment of a split at the
// (negative) parameter where s = 0 lands.
MatX extend_left(const MatX& coef, Scalar a) {
  const int m = static_cast<int>(coef.rows()) - 1;
  const Scalar t = -a / (1.0 - a);
  std::vector<MatX> lvl{coef};
  for (int k = 1; k <= m; ++k) {
    MatX cur(m + 1 - k, coef.cols());
    for (int i = 0; i + k <= m; ++i)
      cur.row(i) = (1.0 - t) * lvl[k - 1].row(i) + t * lvl[k - 1].row(i + 1);
    lvl.push_back(cur);
  }
  MatX out(m + 1, coef.cols());
  for (int j = 0; j <= m; ++j) out.row(j) = lvl[m - j].row(j);
  return out;
}

// Left segment of a split at t > 1: stretches the parameter interval so the
// original right endpoint lands at 1/t.
MatX extend_right(const MatX& coef, Scalar t) {
  const int m = static_cast<int>(coef.rows()) - 1;
  std::vector<MatX> lvl{coef};
  for (int k = 1; k <= m; ++k) {
    MatX cur(m + 1 - k, coef.cols());
    for (int i = 0; i + k <= m; ++i)
      cur.row(i) = (1.0 - t) * lvl[k - 1].row(i) + t * lvl[k - 1].row(i + 1);
    lvl.push_back(cur);
  }
  MatX out(m + 1, coef.cols());
  for (int j = 0; j <= m; ++j) out.row(j) = lvl[j].row(0);
  return out;
}

// Re-expresses a curve fitted over the sub-interval [a, b] of the phase on
// the full [0, 1] interval, verifying the control-point arithmetic at a few
// probe phases.
BezierCurve spread_interval(const BezierCurve& sub, Scalar a, Scalar b) {
  BezierCurve full;
  full.coef = extend_left(extend_right(sub.coef, (1.0 - a) / (b - a)), a);
  for (Scalar w : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Scalar s = a + w * (b - a);
    const VecX va = bezier_eval(full, s).value;
    const VecX vb = bezier_eval(sub, w).value;
    if ((va - vb).cwiseAbs().maxCoeff() > 1e-8)
      throw Error("phase-interval extension lost accuracy");
  }
  return full;
}

// Closed-loop rollout of an underactuated stretch at the design conditions:
// the IO-PD law holds the curve channels while the passive directions drift,
// so the recorded step-end state is the one the next domain's entry pins
// must match. Ends at the domain's exit-guard crossing.
struct Rollout {
  std::vector<Scalar> t;
  std::vector<VecX> q;
  std::vector<VecX> qd;
  std::vector<Scalar> theta;
  Scalar t_exit = 0;
  Scalar theta_exit = 0;
  GeneralizedState exit_state;
};

Rollout roll_underactuated(const RobotModel& m, const GaitGraph& graph,
                           int dom_idx, const GaitLibrary& gait,
                           const GlobalPathSpec& path, Scalar t0,
                           const GeneralizedState& entry, Scalar theta0,
                           Scalar t_span) {
  const DomainSpec& dom = graph.at(dom_idx);
  const PDGains gains =
      PDGains::uniform(output_dim(m, dom.output), 225.0, 50.0);
  const MatX B = effective_input_matrix(m, dom);

  auto phase_at = [&](Scalar th) {
    PhaseState ph;
    ph.theta = th;
    ph.T0 = t0 - theta0 / std::max(1e-9, gait.design_speed);
    ph.T_Uk = t0;
    ph.delta_tau_U = gait.delta_tau_U;
    return ph;
  };
  auto torque = [&](Scalar t, const GeneralizedState& st, Scalar th) {
    return io_pd(m, dom, t, st, phase_at(th), gait, path, gains).u;
  };
  auto accel = [&](Scalar t, const GeneralizedState& st, Scalar th) {
    const DynTerms terms = compute_dyn_terms(m, st.q, st.qdot, dom.contacts, B);
    return constrained_dynamics(terms, torque(t, st, th)).qddot;
  };
  auto guard = [&](Scalar t, const GeneralizedState& st, Scalar th) {
    return guard_value(m, graph, dom_idx, t, st, torque(t, st, th), th,
                       gait.l_s);
  };
  auto rk4 = [&](Scalar t, const GeneralizedState& st, Scalar th, Scalar h) {
    struct K {
      VecX dq, dqd;
      Scalar dth;
    };
    auto f = [&](Scalar tt, const GeneralizedState& s, Scalar hh) {
      return K{s.qdot, accel(tt, s, hh), std::hypot(s.qdot(0), s.qdot(1))};
    };
    const K k1 = f(t, st, th);
    const K k2 = f(t + h / 2,
                   {st.q + h / 2 * k1.dq, st.qdot + h / 2 * k1.dqd},
                   th + h / 2 * k1.dth);
    const K k3 = f(t + h / 2,
                   {st.q + h / 2 * k2.dq, st.qdot + h / 2 * k2.dqd},
                   th + h / 2 * k2.dth);
    const K k4 = f(t + h, {st.q + h * k3.dq, st.qdot + h * k3.dqd},
                   th + h * k3.dth);
    GeneralizedState out;
    out.q = st.q + h / 6 * (k1.dq + 2 * k2.dq + 2 * k3.dq + k4.dq);
    out.qdot = st.qdot + h / 6 * (k1.dqd + 2 * k2.dqd + 2 * k3.dqd + k4.dqd);
    const Scalar tho = th + h / 6 * (k1.dth + 2 * k2.dth + 2 * k3.dth + k4.dth);
    return std::pair<GeneralizedState, Scalar>(out, tho);
  };

  Rollout out;
  const int n_steps = 600;
  const Scalar h = t_span / n_steps;
  Scalar t = t0, th = theta0;
  GeneralizedState st = entry;
  out.t.push_back(t);
  out.q.push_back(st.q);
  out.qd.push_back(st.qdot);
  out.theta.push_back(th);
  const Scalar arm = t0 + 0.25 * t_span;
  for (int i = 0; i < 3 * n_steps; ++i) {
    const auto [st2, th2] = rk4(t, st, th, h);
    const Scalar t2 = t + h;
    if (t2 > arm && guard(t2, st2, th2) <= 0) {
      Scalar lo = 0, hi = h;
      GeneralizedState se = st2;
      Scalar the = th2, te = t2;
      for (int it = 0; it < 60; ++it) {
        const Scalar mid = 0.5 * (lo + hi);
        const auto [sm, thm] = rk4(t, st, th, mid);
        if (guard(t + mid, sm, thm) <= 0) {
          hi = mid;
          se = sm;
          the = thm;
          te = t + mid;
        } else {
          lo = mid;
        }
        if (hi - lo < 1e-14) break;
      }
      out.t.push_back(te);
      out.q.push_back(se.q);
      out.qd.push_back(se.qdot);
      out.theta.push_back(the);
      out.t_exit = te;
      out.theta_exit = the;
      out.exit_state = se;
      return out;
    }
    t = t2;
    st = st2;
    th = th2;
    out.t.push_back(t);
    out.q.push_back(st.q);
    out.qd.push_back(st.qdot);
    out.theta.push_back(th);
  }
  throw Error("underactuated rollout never reached its exit guard");
}

// Design-speed straight line registered like the reset estimate: the base
// mid-travel point of the first step sits over the support ankle.
GlobalPathSpec design_line(Scalar speed, Scalar step_length) {
  GlobalPathSpec path;
  path.name = "design-line";
  PathSegment seg;
  seg.t_begin = 0;
  seg.t_end = 1e9;
  seg.tref = 0;
  seg.ax = speed;
  seg.bx = -0.5 * step_length;
  path.segments.push_back(seg);
  return path;
}

Scalar fit_residual(const BezierCurve& curve, const VecX& s_samples,
                    const MatX& values) {
  Scalar worst = 0;
  for (int i = 0; i < s_samples.size(); ++i) {
    const VecX v = bezier_eval(curve, s_samples(i)).value;
    worst = std::max(worst, (v - values.col(i)).cwiseAbs().maxCoeff());
  }
  return worst;
}

MatX sample_values(const RobotModel& m, OutputKind kind, const PlanGrid& g,
                   int i_lo, int i_hi) {
  const int dim = static_cast<int>(measure_state_rows(m, kind, g.q[0]).size());
  MatX vals(dim, i_hi - i_lo + 1);
  for (int i = i_lo; i <= i_hi; ++i)
    vals.col(i - i_lo) = measure_state_rows(m, kind, g.q[i]);
  return vals;
}

GaitCurve make_curve(const RobotModel& m, OutputKind kind,
                     const BezierCurve& c) {
  GaitCurve gc;
  gc.channels = state_row_labels(m, kind);
  gc.curve = c;
  return gc;
}

// Minimum swing-corner heights along the plan; throws on ground scuffing and
// on a guard that would not stay positive until its crossing.
void check_clearance(const StepPlan& plan, Scalar guard_lo) {
  const FootGeometry& g = plan.swg();
  const Scalar end = plan.rolls ? plan.s_uo : 1.0;
  Scalar min_all = 1e9, min_guard = 1e9;
  for (int i = 1; i < 800; ++i) {
    const Scalar s = end * i / 800.0;
    const FootPose p = plan.swing_pose(s);
    const Scalar toe_z = corner_height(g, p, g.toe);
    const Scalar heel_z = corner_height(g, p, -g.heel);
    if (s > 0.02 * end && s < 0.98 * end)
      min_all = std::min(min_all, std::min(toe_z, heel_z));
    if (s > guard_lo + 0.002 && s < 0.995 * end) {
      const Scalar gv = plan.rolls ? heel_z : std::min(toe_z, heel_z);
      min_guard = std::min(min_guard, gv);
    }
  }
  std::printf("  swing clearance: interior min %.4f m, guard min %.4f m\n",
              min_all, min_guard);
  if (min_all <= 0) throw Error("swing foot scuffs the ground; raise apex");
  if (min_guard <= 0)
    throw Error("touchdown guard dips early; retune the flight profile");
}

void report_curve(const char* name, const BezierCurve& c, const VecX& s,
                  const MatX& vals) {
  std::printf("  %-6s order %d, %2d channels, fit residual %.3e\n", name,
              c.order(), c.dim(), fit_residual(c, s, vals));
}

GaitLibrary fit_two_domain(const RobotModel& m, const GaitGraph& graph,
                           const FitConfig& c) {
  StepPlan plan;
  plan.model = &m;
  plan.rolls = false;
  plan.L = c.step_length;
  plan.v = c.speed;
  plan.z0 = c.base_height;
  plan.build_flight(c.apex, c.land_speed);
  check_clearance(plan, c.ls_frac);

  const int n = c.grid;
  const PlanGrid g = solve_grid(m, plan, n, false);
  const int n1 = n - 1;
  const int mo = c.order;

  GaitLibrary gait;
  gait.name = c.gait_name;
  gait.graph = "two-domain";
  gait.theta_max = c.step_length;
  gait.l_s = c.ls_frac * c.step_length;
  gait.delta_tau_F = gait.l_s / c.speed;
  gait.delta_tau_U = (gait.theta_max - gait.l_s) / c.speed;
  gait.design_speed = c.speed;
  gait.step_length = c.step_length;
  gait.apex_height = c.apex;
  gait.base_height = c.base_height;
  gait.seed_pose = g.q[0];

  const Scalar ls = c.ls_frac;
  const int i_near = static_cast<int>(std::round(ls * n1));
  const VecX q_ls = solve_plan_pose(m, plan_targets(plan, ls), g.q[i_near]);
  const VecX qe = g.q[n1];

  {  // ua: local-time phase tau over the final stretch, plan-pinned
    const Scalar span = 1.0 - ls;
    const VecX h0 = measure_state_rows(m, OutputKind::UnderTwo, q_ls);
    const VecX h1 = channel_slope(m, OutputKind::UnderTwo, plan, ls, q_ls, 0);
    const VecX t0v = measure_state_rows(m, OutputKind::UnderTwo, qe);
    const VecX t1v = channel_slope(m, OutputKind::UnderTwo, plan, 1.0, qe, -1);
    MatX head(2, h0.size()), tail(2, h0.size());
    head.row(0) = h0.transpose();
    head.row(1) = (h0 + h1 * span / mo).transpose();
    tail.row(0) = (t0v - t1v * span / mo).transpose();
    tail.row(1) = t0v.transpose();
    int i0 = i_near;
    while (g.s(i0) < ls) ++i0;
    const int cnt = n1 - i0 + 1;
    VecX tau(cnt);
    for (int i = 0; i < cnt; ++i) tau(i) = (g.s(i0 + i) - ls) / span;
    const MatX vals = sample_values(m, OutputKind::UnderTwo, g, i0, n1);
    gait.ua = make_curve(m, OutputKind::UnderTwo,
                         bezier_fit(tau, vals, mo, head, tail));
    report_curve("ua", gait.ua.curve, tau, vals);
  }

  // closed-loop rollout of the passive stretch, iterated so the scheduled
  // window matches the guard-to-guard duration
  const GlobalPathSpec dline = design_line(c.speed, c.step_length);
  GeneralizedState entry;
  entry.q = q_ls;
  entry.qdot = plan_qprime(m, plan, ls, q_ls, 0) * plan.sdot();
  Rollout ro;
  for (int it = 0; it < 10; ++it) {
    ro = roll_underactuated(m, graph, 1, gait, dline, gait.delta_tau_F, entry,
                            gait.l_s, gait.delta_tau_U);
    const Scalar dur = ro.t_exit - gait.delta_tau_F;
    const Scalar change = std::abs(dur - gait.delta_tau_U);
    gait.delta_tau_U = dur;
    if (change < 1e-11) break;
  }
  const GeneralizedState& xe = ro.exit_state;
  std::printf(
      "  rollout: duration %.4f s, exit pitch %+.4f rad (%+.3f rad/s), "
      "roll %+.4f rad (%+.3f rad/s)\n",
      gait.delta_tau_U, xe.q(4), xe.qdot(4), xe.q(3), xe.qdot(3));

  {  // auxiliary base roll/pitch along the passive stretch
    const int cnt = static_cast<int>(ro.t.size());
    VecX tau(cnt);
    MatX vals(2, cnt);
    for (int i = 0; i < cnt; ++i) {
      tau(i) = (ro.t[i] - gait.delta_tau_F) / gait.delta_tau_U;
      vals(0, i) = ro.q[i](3);
      vals(1, i) = ro.q[i](4);
    }
    VecX v_e(2), r_e(2);
    v_e << xe.q(3), xe.q(4);
    r_e << xe.qdot(3) * gait.delta_tau_U, xe.qdot(4) * gait.delta_tau_U;
    MatX head = MatX::Zero(2, 2);
    MatX tail(2, 2);
    tail.row(0) = (v_e - r_e / mo).transpose();
    tail.row(1) = v_e.transpose();
    gait.ua_aux.channels = {"phi_b", "theta_b"};
    gait.ua_aux.curve = bezier_fit(tau, vals, mo, head, tail);
    report_curve("aux", gait.ua_aux.curve, tau, vals);
  }

  // step-end impact of the rollout state against the landing flat foot
  const ImpactResult ir =
      impact_map(m, xe.q, xe.qdot, graph.at(1).exit_impact_contacts);
  const GeneralizedState post = m.relabel({xe.q, ir.qdot_plus});
  const Scalar sdot_plus =
      std::hypot(post.qdot(0), post.qdot(1)) / c.step_length;

  {  // fa: arc-length phase over the actual dwell [0, ls], head pinned to
     // the reset image and tail to the handoff state the rollout starts
     // from, then re-expressed over the global phase interval
    const VecX y0 = measure_state_rows(m, OutputKind::FullAct, post.q);
    const VecX yd0 = channel_rate(m, OutputKind::FullAct, post.q, post.qdot);
    const VecX t0v = measure_state_rows(m, OutputKind::FullAct, q_ls);
    const VecX t1v = channel_slope(m, OutputKind::FullAct, plan, ls, q_ls, 0);
    MatX head(2, y0.size()), tail(2, y0.size());
    head.row(0) = y0.transpose();
    head.row(1) = (y0 + yd0 * ls / (mo * sdot_plus)).transpose();
    tail.row(0) = (t0v - t1v * ls / mo).transpose();
    tail.row(1) = t0v.transpose();
    int i0 = n1;
    while (g.s(i0) > ls) --i0;
    const MatX vals = sample_values(m, OutputKind::FullAct, g, 0, i0);
    VecX u(i0 + 1);
    for (int i = 0; i <= i0; ++i) u(i) = g.s(i) / ls;
    const BezierCurve sub = bezier_fit(u, vals, mo, head, tail);
    report_curve("fa", sub, u, vals);
    gait.fa = make_curve(m, OutputKind::FullAct, spread_interval(sub, 0.0, ls));
  }

  gait.validate();
  return gait;
}

GaitLibrary fit_three_domain(const RobotModel& m, const GaitGraph& graph,
                             const FitConfig& c) {
  const int n = c.grid;
  const int n1 = n - 1;
  const int mo = c.order;
  const Scalar ds = 1.0 / n1;

  // pass 1: all-flat plan to locate the heel-force handoff
  StepPlan flat;
  flat.model = &m;
  flat.rolls = false;
  flat.L = c.step_length;
  flat.v = c.speed;
  flat.z0 = c.base_height;
  flat.lean = c.lean;
  flat.build_flight(c.apex, c.land_speed);
  const PlanGrid g1 = solve_grid(m, flat, n, true);
  const auto sweep = force_sweep(m, graph.at(0), g1, flat.sdot(), 0.92);
  Scalar fz_lo = 1e30, fz_hi = -1e30;
  for (const SweepPoint& p : sweep) {
    fz_lo = std::min(fz_lo, p.heel_fz);
    fz_hi = std::max(fz_hi, p.heel_fz);
  }
  std::printf("  support heel force range [%.3f, %.3f] N\n", fz_lo, fz_hi);
  const Scalar s_star = detect_s_fu(sweep);
  Scalar peak_u = 0;
  for (const SweepPoint& p : sweep) peak_u = std::max(peak_u, p.max_torque);
  std::printf("  heel force crosses zero at s=%.4f (nominal peak torque %.3f)\n",
              s_star, peak_u);

  const Scalar s_fu = std::round(s_star / ds) * ds;
  const Scalar s_uo = s_fu + std::max(1.0, std::round(c.ua_frac / ds)) * ds;
  if (s_uo >= 1.0 - 4 * ds)
    throw Error("no room for the double-support stretch; lower ua-frac");

  StepPlan plan;
  plan.model = &m;
  plan.rolls = true;
  plan.L = c.step_length;
  plan.v = c.speed;
  plan.z0 = c.base_height;
  plan.lean = c.lean;
  plan.s_fu = s_fu;
  plan.s_uo = s_uo;
  plan.beta_max = c.beta_max;
  plan.gamma_hs = c.gamma_hs;
  plan.build_flight(c.apex, c.land_speed);
  check_clearance(plan, s_fu);

  const PlanGrid g = solve_grid(m, plan, n, false);
  const int i_fu = static_cast<int>(std::round(s_fu * n1));
  const int i_uo = static_cast<int>(std::round(s_uo * n1));

  GaitLibrary gait;
  gait.name = c.gait_name;
  gait.graph = "three-domain";
  gait.theta_max = c.step_length;
  gait.delta_tau_F = s_fu * c.step_length / c.speed;
  gait.delta_tau_U = (s_uo - s_fu) * c.step_length / c.speed;
  gait.delta_tau_O = (1.0 - s_uo) * c.step_length / c.speed;
  gait.design_speed = c.speed;
  gait.step_length = c.step_length;
  gait.apex_height = c.apex;
  gait.base_height = c.base_height;
  gait.s_fu = s_fu;
  gait.s_uo = s_uo;
  gait.seed_pose = g.q[0];

  {  // ua: joint channels, fitted where the phase actually dwells,
     // [s_fu, s_uo], plan-pinned at both ends, then spread over [0, 1]
    const Scalar span = s_uo - s_fu;
    const VecX h0 = measure_state_rows(m, OutputKind::UnderThree, g.q[i_fu]);
    const VecX h1 =
        channel_slope(m, OutputKind::UnderThree, plan, s_fu, g.q[i_fu], 0);
    const VecX t0v = measure_state_rows(m, OutputKind::UnderThree, g.q[i_uo]);
    const VecX t1v =
        channel_slope(m, OutputKind::UnderThree, plan, s_uo, g.q[i_uo], -1);
    MatX head(2, h0.size()), tail(2, h0.size());
    head.row(0) = h0.transpose();
    head.row(1) = (h0 + h1 * span / mo).transpose();
    tail.row(0) = (t0v - t1v * span / mo).transpose();
    tail.row(1) = t0v.transpose();
    const int cnt = i_uo - i_fu + 1;
    VecX u(cnt);
    for (int i = 0; i < cnt; ++i) u(i) = (g.s(i_fu + i) - s_fu) / span;
    const MatX vals = sample_values(m, OutputKind::UnderThree, g, i_fu, i_uo);
    const BezierCurve sub = bezier_fit(u, vals, mo, head, tail);
    report_curve("ua", sub, u, vals);
    gait.ua = make_curve(m, OutputKind::UnderThree,
                         spread_interval(sub, s_fu, s_uo));
  }

  // closed-loop rollout of the toe-pivot stretch; the guard crossing fixes
  // the actual handoff fraction and the passive stance-pitch history
  const GlobalPathSpec dline = design_line(c.speed, c.step_length);
  GeneralizedState entry;
  entry.q = g.q[i_fu];
  entry.qdot = plan_qprime(m, plan, s_fu, g.q[i_fu], 0) * plan.sdot();
  const Rollout ro =
      roll_underactuated(m, graph, 1, gait, dline, gait.delta_tau_F, entry,
                         s_fu * c.step_length, gait.delta_tau_U);
  const GeneralizedState& xe = ro.exit_state;
  const Scalar s_uo_r = ro.theta_exit / c.step_length;
  const Scalar pitch_e = frame_kinematics(m, xe.q).theta_st;
  std::printf(
      "  rollout: handoff at s=%.4f (scheduled %.4f), exit stance pitch "
      "%+.4f rad\n",
      s_uo_r, s_uo, pitch_e);
  gait.s_uo = s_uo_r;
  gait.delta_tau_U = ro.t_exit - gait.delta_tau_F;
  gait.delta_tau_O = (1.0 - s_uo_r) * c.step_length / c.speed;

  {  // auxiliary stance-pitch plan from the rollout
    const Scalar span = s_uo_r - s_fu;
    const int cnt = static_cast<int>(ro.t.size());
    VecX u(cnt);
    MatX vals(1, cnt);
    for (int i = 0; i < cnt; ++i) {
      u(i) = (ro.theta[i] / c.step_length - s_fu) / span;
      vals(0, i) = frame_kinematics(m, ro.q[i]).theta_st;
    }
    const Scalar h = 1e-6;
    const Scalar rate_t = (frame_kinematics(m, VecX(xe.q + h * xe.qdot)).theta_st -
                           frame_kinematics(m, VecX(xe.q - h * xe.qdot)).theta_st) /
                          (2 * h);
    const Scalar sdot_e = std::hypot(xe.qdot(0), xe.qdot(1)) / c.step_length;
    const Scalar t1 = rate_t / sdot_e;
    MatX head = MatX::Zero(2, 1);
    MatX tail(2, 1);
    tail << pitch_e - t1 * span / mo, pitch_e;
    const BezierCurve sub = bezier_fit(u, vals, mo, head, tail);
    report_curve("aux", sub, u, vals);
    gait.ua_aux.channels = {"theta_st"};
    gait.ua_aux.curve = spread_interval(sub, s_fu, s_uo_r);
  }

  const VecX qe = g.q[n1];

  {  // oa: fitted over [s_uo, 1] with the head pinned to the image of the
     // rollout exit under the heel-strike impact, then re-expressed over
     // the global phase interval
    const ImpactResult iu =
        impact_map(m, xe.q, xe.qdot, graph.at(1).exit_impact_contacts);
    const Scalar sdot_uo =
        std::hypot(iu.qdot_plus(0), iu.qdot_plus(1)) / c.step_length;
    const Scalar span = 1.0 - s_uo_r;
    const VecX y0 = measure_state_rows(m, OutputKind::OverAct, xe.q);
    const VecX yd0 = channel_rate(m, OutputKind::OverAct, xe.q, iu.qdot_plus);
    const VecX t0v = measure_state_rows(m, OutputKind::OverAct, qe);
    const VecX t1v = channel_slope(m, OutputKind::OverAct, plan, 1.0, qe, -1);
    MatX head(2, y0.size()), tail(2, y0.size());
    head.row(0) = y0.transpose();
    head.row(1) = (y0 + yd0 * span / (mo * sdot_uo)).transpose();
    tail.row(0) = (t0v - t1v * span / mo).transpose();
    tail.row(1) = t0v.transpose();
    int j0 = i_uo;
    while (g.s(j0) < s_uo_r) ++j0;
    const int cnt = n1 - j0 + 1;
    VecX u(cnt);
    for (int i = 0; i < cnt; ++i) u(i) = (g.s(j0 + i) - s_uo_r) / span;
    const MatX vals = sample_values(m, OutputKind::OverAct, g, j0, n1);
    const BezierCurve sub = bezier_fit(u, vals, mo, head, tail);
    report_curve("oa", sub, u, vals);
    gait.oa =
        make_curve(m, OutputKind::OverAct, spread_interval(sub, s_uo_r, 1.0));
  }

  // step-end impact of the landing heel-rolled foot, then relabel
  const VecX qde = plan_qprime(m, plan, 1.0, qe, -1) * plan.sdot();
  const ImpactResult ir =
      impact_map(m, qe, qde, graph.at(2).exit_impact_contacts);
  const GeneralizedState post = m.relabel({qe, ir.qdot_plus});
  const Scalar sdot_plus =
      std::hypot(post.qdot(0), post.qdot(1)) / c.step_length;

  {  // fa: arc-length phase over the actual dwell [0, s_fu], head pinned
     // to the reset image and tail to the handoff state the rollout starts
     // from, then re-expressed over the global interval
    const VecX y0 = measure_state_rows(m, OutputKind::FullAct, post.q);
    const VecX yd0 = channel_rate(m, OutputKind::FullAct, post.q, post.qdot);
    const VecX t0v = measure_state_rows(m, OutputKind::FullAct, g.q[i_fu]);
    const VecX t1v =
        channel_slope(m, OutputKind::FullAct, plan, s_fu, g.q[i_fu], 0);
    MatX head(2, y0.size()), tail(2, y0.size());
    head.row(0) = y0.transpose();
    head.row(1) = (y0 + yd0 * s_fu / (mo * sdot_plus)).transpose();
    tail.row(0) = (t0v - t1v * s_fu / mo).transpose();
    tail.row(1) = t0v.transpose();
    const MatX vals = sample_values(m, OutputKind::FullAct, g, 0, i_fu);
    VecX u(i_fu + 1);
    for (int i = 0; i <= i_fu; ++i) u(i) = g.s(i) / s_fu;
    const BezierCurve sub = bezier_fit(u, vals, mo, head, tail);
    report_curve("fa", sub, u, vals);
    gait.fa =
        make_curve(m, OutputKind::FullAct, spread_interval(sub, 0.0, s_fu));
  }

  gait.validate();
  return gait;
}

void self_check(const RobotModel& m, const GaitGraph& graph,
                const GaitLibrary& gait, Scalar v) {
  GlobalPathSpec line;
  line.name = "design-line";
  PathSegment seg;
  seg.t_begin = 0;
  seg.t_end = 1e9;
  seg.ax = v;
  line.segments.push_back(seg);
  for (const ResetOffset& r : b2_offsets(m, graph, gait, line, 0.0))
    std::printf("  reset %-8s offset %.3e %s\n", r.edge.c_str(), r.offset,
                r.ok ? "ok" : "LARGE");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"designs a periodic walking gait and writes a gait library"};
  FitConfig cfg;
  app.add_option("--model", cfg.model_file, "robot model file")->required();
  app.add_option("--graph", cfg.graph, "gait graph name")
      ->check(CLI::IsMember({"two-domain", "three-domain"}));
  app.add_option("--out", cfg.out_file, "output gait file")->required();
  app.add_option("--name", cfg.gait_name, "gait name (default: graph name)");
  app.add_option("--step-length", cfg.step_length, "step length, m");
  app.add_option("--speed", cfg.speed, "design path speed, m/s (0 = default)");
  app.add_option("--base-height", cfg.base_height, "nominal base height, m");
  app.add_option("--apex", cfg.apex, "swing apex above ground, m");
  app.add_option("--land-speed", cfg.land_speed, "touchdown speed, m/s");
  app.add_option("--ls-frac", cfg.ls_frac, "two-domain handoff fraction");
  app.add_option("--lean", cfg.lean, "three-domain base forward pitch, rad");
  app.add_option("--ua-frac", cfg.ua_frac, "three-domain toe-roll fraction");
  app.add_option("--beta-max", cfg.beta_max, "support toe-roll pitch, rad");
  app.add_option("--gamma-hs", cfg.gamma_hs, "heel-strike pitch, rad");
  app.add_option("--grid", cfg.grid, "phase grid points")
      ->check(CLI::Range(41, 2001));
  app.add_option("--order", cfg.order, "Bernstein order")
      ->check(CLI::Range(5, 15));
  CLI11_PARSE(app, argc, argv);

  if (cfg.speed <= 0) cfg.speed = cfg.graph == "two-domain" ? 0.08 : 0.25;
  if (cfg.gait_name.empty()) cfg.gait_name = cfg.graph;

  try {
    const RobotModel model = load_model(cfg.model_file);
    const GaitGraph graph = make_gait_graph(cfg.graph, model);
    std::printf("fitting %s gait for %s at %.3f m/s\n", cfg.graph.c_str(),
                model.name.c_str(), cfg.speed);
    const GaitLibrary gait = cfg.graph == "two-domain"
                                 ? fit_two_domain(model, graph, cfg)
                                 : fit_three_domain(model, graph, cfg);
    self_check(model, graph, gait, cfg.speed);
    save_gait(cfg.out_file, gait);
    std::printf("wrote %s\n", cfg.out_file.c_str());
  } catch (const std::exception& e) {
    std::cerr << "fit_gait: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
