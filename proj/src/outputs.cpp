#include "gptwalk/outputs.hpp"

#include <algorithm>
#include <cmath>

#include "gptwalk/dynamics.hpp"
#include "gptwalk/kinematics.hpp"
#include "gptwalk/rotation.hpp"

namespace gptwalk {

namespace {

Scalar wrap_angle(Scalar a) { return std::atan2(std::sin(a), std::cos(a)); }

struct StateRows {
  VecX value;
  MatX H;  // d value / dq
  std::vector<int> frame_rows;
};

int state_dim_of(const RobotModel& m, OutputKind kind) {
  const int nup = static_cast<int>(m.upper_q.size());
  switch (kind) {
    case OutputKind::FullAct:
      return 9 + nup;
    case OutputKind::UnderThree:
      return m.n;
    case OutputKind::OverAct:
      return 5 + nup;
    case OutputKind::UnderTwo:
      return 7 + nup;
  }
  return 0;
}

void add_selector(StateRows& E, int r, int qi, const VecX& q) {
  E.value(r) = q(qi);
  E.H(r, qi) = 1.0;
}

std::pair<Scalar, VecX> pitch_value_row(const RobotModel& m,
                                        const KinCache& kc, int link) {
  const KinCache::Frame& fr = kc.dof[m.links[link].dof];
  const Scalar ct = std::hypot(fr.R(2, 1), fr.R(2, 2));
  if (ct < kChartTol)
    throw SingularChartError("foot pitch chart singular: foot near vertical");
  const Vec3 c0 = fr.R.col(0);
  const MatX Jw = angular_jacobian(m, kc, link);
  VecX row = (c0.x() * Jw.row(1) - c0.y() * Jw.row(0)).transpose() / ct;
  return {std::atan2(-fr.R(2, 0), ct), row};
}

StateRows eval_state_rows(const RobotModel& m, OutputKind kind,
                          const VecX& q) {
  const int nq = m.nq();
  const int dim = state_dim_of(m, kind);
  StateRows E;
  E.value = VecX::Zero(dim);
  E.H = MatX::Zero(dim, nq);

  if (kind == OutputKind::UnderThree) {
    for (int j = 0; j < m.n; ++j) add_selector(E, j, 6 + j, q);
    return E;
  }

  const KinCache kc = fk(m, q);
  int r = 0;
  add_selector(E, r++, 2, q);  // z_b
  if (kind != OutputKind::UnderTwo) {
    add_selector(E, r++, 3, q);  // phi_b
    add_selector(E, r++, 4, q);  // theta_b
  }
  if (kind == OutputKind::OverAct) {
    for (int which = 0; which < 2; ++which) {
      auto [val, row] = pitch_value_row(m, kc, m.feet[which].link);
      E.value(r) = val;
      E.H.row(r) = row.transpose();
      E.frame_rows.push_back(r);
      ++r;
    }
  } else {
    const int swl = m.feet[1].link;
    const KinCache::Frame& ff = kc.dof[m.links[swl].dof];
    const Mat3 Rzt = rot_z(q(5)).transpose();
    const Vec3 p_sw = Rzt * (ff.p - q.head<3>());
    MatX Hp = Rzt * point_jacobian(m, kc, swl, ff.p);
    Hp.leftCols<3>() -= Rzt;
    Hp.col(5) -= Vec3::UnitZ().cross(p_sw);
    for (int i = 0; i < 3; ++i) {
      E.value(r) = p_sw(i);
      E.H.row(r) = Hp.row(i);
      E.frame_rows.push_back(r);
      ++r;
    }
    const Vec3 gam = rot_to_euler_zyx(Rzt * ff.R);
    const Mat3 Einv = euler_rate_inv(gam);
    MatX Hg = Einv * (Rzt * angular_jacobian(m, kc, swl));
    Hg.col(5) -= Einv * Vec3::UnitZ();
    for (int i = 0; i < 3; ++i) {
      E.value(r) = gam(i);
      E.H.row(r) = Hg.row(i);
      E.frame_rows.push_back(r);
      ++r;
    }
  }
  for (int qi : m.upper_q) add_selector(E, r++, qi, q);
  if (r != dim) throw Error("output selector: internal row count error");
  return E;
}

// Directional central difference of the frame-row velocities, giving
// (d/dt dh/dq) qdot for exactly those rows; selector rows stay zero.
VecX frame_hdot_qdot(const RobotModel& m, OutputKind kind, const VecX& q,
                     const VecX& qdot, const StateRows& E) {
  VecX out = VecX::Zero(E.value.size());
  if (E.frame_rows.empty()) return out;
  const Scalar nrm = qdot.norm();
  if (nrm == 0) return out;
  const Scalar eps = 1e-6 / std::max(1.0, nrm);
  const StateRows Ep = eval_state_rows(m, kind, q + eps * qdot);
  const StateRows Em = eval_state_rows(m, kind, q - eps * qdot);
  const VecX vp = Ep.H * qdot;
  const VecX vm = Em.H * qdot;
  for (int r : E.frame_rows) out(r) = (vp(r) - vm(r)) / (2 * eps);
  return out;
}

}  // namespace

int output_dim(const RobotModel& model, OutputKind kind) {
  switch (kind) {
    case OutputKind::FullAct:
    case OutputKind::UnderThree:
      return model.n;
    case OutputKind::OverAct:
      return model.n - 4;
    case OutputKind::UnderTwo:
      return model.n - 2;
  }
  return 0;
}

std::vector<std::string> state_row_labels(const RobotModel& m,
                                          OutputKind kind) {
  auto joint_label = [&m](int qi) {
    for (const Link& lk : m.links)
      if (lk.q_index == qi) return lk.name;
    return std::string("q") + std::to_string(qi);
  };
  std::vector<std::string> out;
  switch (kind) {
    case OutputKind::UnderThree:
      for (int j = 0; j < m.n; ++j) out.push_back(joint_label(6 + j));
      return out;
    case OutputKind::FullAct:
      out = {"z_b",      "phi_b",     "theta_b", "psw_x", "psw_y",
             "psw_z",    "gsw_roll",  "gsw_pitch", "gsw_yaw"};
      break;
    case OutputKind::OverAct:
      out = {"z_b", "phi_b", "theta_b", "theta_t", "theta_l"};
      break;
    case OutputKind::UnderTwo:
      out = {"z_b",      "psw_x",    "psw_y",     "psw_z",
             "gsw_roll", "gsw_pitch", "gsw_yaw"};
      break;
  }
  for (int qi : m.upper_q) out.push_back(joint_label(qi));
  return out;
}

VecX measure_state_rows(const RobotModel& model, OutputKind kind,
                        const VecX& q) {
  return eval_state_rows(model, kind, q).value;
}

Scalar foot_pitch_of(const RobotModel& model, const VecX& q, int link) {
  const KinCache kc = fk(model, q);
  return pitch_value_row(model, kc, link).first;
}

Scalar foot_pitch_rate(const RobotModel& model, const VecX& q, const VecX& qd,
                       int link) {
  const KinCache kc = fk(model, q);
  return pitch_value_row(model, kc, link).second.dot(qd);
}

OutputEval output_function(const RobotModel& model, const DomainSpec& domain,
                           Scalar t, const GeneralizedState& state,
                           const PhaseState& phase, const GaitLibrary& gait,
                           const GlobalPathSpec& path) {
  const OutputKind kind = domain.output;
  const int nq = model.nq();
  const int dim = output_dim(model, kind);
  const bool has_time = kind != OutputKind::UnderThree;
  const int off = has_time ? 3 : 0;
  const int dim_state = dim - off;

  if (state_dim_of(model, kind) != dim_state)
    throw Error("output dimension mismatch: selector provides " +
                std::to_string(state_dim_of(model, kind)) +
                " state rows, domain needs " + std::to_string(dim_state));
  const GaitCurve& curve =
      kind == OutputKind::OverAct
          ? gait.oa
          : (kind == OutputKind::FullAct ? gait.fa : gait.ua);
  if (curve.dim() != dim_state)
    throw Error("output dimension mismatch: gait curve has " +
                std::to_string(curve.dim()) + " channels, selector needs " +
                std::to_string(dim_state));

  const VecX& q = state.q;
  const VecX& qd = state.qdot;
  const StateRows E = eval_state_rows(model, kind, q);
  const VecX hdqd = frame_hdot_qdot(model, kind, q, qd, E);

  OutputEval oe;
  oe.y = VecX::Zero(dim);
  oe.G = MatX::Zero(dim, nq);
  oe.yt = VecX::Zero(dim);
  oe.acc_bias = VecX::Zero(dim);
  oe.d2hd_dt2 = VecX::Zero(dim);

  if (has_time) {
    const GpPoint gp = desired_gp(path, t);
    oe.y(0) = q(0) - gp.x;
    oe.y(1) = q(1) - gp.y;
    oe.y(2) = wrap_angle(q(5) - gp.psi);
    oe.G(0, 0) = 1;
    oe.G(1, 1) = 1;
    oe.G(2, 5) = 1;
    oe.yt(0) = -gp.xdot;
    oe.yt(1) = -gp.ydot;
    oe.yt(2) = -gp.psidot;
    oe.acc_bias(0) = -gp.xddot;
    oe.acc_bias(1) = -gp.yddot;
    oe.acc_bias(2) = -gp.psiddot;
    oe.d2hd_dt2(0) = gp.xddot;
    oe.d2hd_dt2(1) = gp.yddot;
    oe.d2hd_dt2(2) = gp.psiddot;
  }

  if (kind == OutputKind::UnderTwo) {
    const Scalar dtu =
        phase.delta_tau_U > 0 ? phase.delta_tau_U : gait.delta_tau_U;
    const Scalar ls = local_phase(t, phase.T_Uk, dtu);
    const Scalar lrate = local_phase_rate(t, phase.T_Uk, dtu);
    const BezierEval des = bezier_eval(curve.curve, ls);
    for (int r = 0; r < dim_state; ++r) {
      oe.y(off + r) = E.value(r) - des.value(r);
      oe.G.row(off + r) = E.H.row(r);
      oe.yt(off + r) = -des.d1(r) * lrate;
      oe.acc_bias(off + r) = hdqd(r) - des.d2(r) * lrate * lrate;
      oe.d2hd_dt2(off + r) = des.d2(r) * lrate * lrate;
    }
  } else {
    const Scalar s = normalized_phase(phase.theta, gait.theta_max);
    const Scalar srate = normalized_phase_rate(phase.theta, gait.theta_max);
    const BezierEval des = bezier_eval(curve.curve, s);
    const Scalar theta_dot = std::hypot(qd(0), qd(1));
    VecX w = VecX::Zero(nq);
    if (theta_dot >= 1e-6) {
      w(0) = qd(0) / theta_dot;
      w(1) = qd(1) / theta_dot;
    }
    const Scalar sdot = srate * theta_dot;
    for (int r = 0; r < dim_state; ++r) {
      const Scalar h_theta = -des.d1(r) * srate;
      oe.y(off + r) = E.value(r) - des.value(r);
      oe.G.row(off + r) = E.H.row(r) + h_theta * w.transpose();
      oe.acc_bias(off + r) = hdqd(r) - des.d2(r) * sdot * sdot;
    }
  }

  oe.ydot = oe.G * qd + oe.yt;
  return oe;
}

VecX newton_solve(const std::function<VecX(const VecX&)>& residual, VecX x,
                  int max_iter, Scalar tol) {
  const int n = static_cast<int>(x.size());
  VecX r = residual(x);
  if (r.size() != n) throw Error("newton_solve: residual is not square");
  for (int it = 0; it < max_iter; ++it) {
    if (r.lpNorm<Eigen::Infinity>() < tol) return x;
    MatX J(n, n);
    for (int j = 0; j < n; ++j) {
      const Scalar h = 1e-7 * std::max(1.0, std::abs(x(j)));
      VecX xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      J.col(j) = (residual(xp) - residual(xm)) / (2 * h);
    }
    const VecX dx = Eigen::PartialPivLU<MatX>(J).solve(-r);
    if (!dx.allFinite()) throw Error("newton_solve: singular Jacobian");
    const Scalar r0 = r.norm();
    Scalar step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const VecX xn = x + step * dx;
      try {
        VecX rn = residual(xn);
        if (rn.norm() < r0) {
          x = xn;
          r = rn;
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // out-of-chart trial point, shorten the step
      }
      step *= 0.5;
    }
    if (!accepted) throw Error("newton_solve: line search failed");
  }
  if (r.lpNorm<Eigen::Infinity>() < tol) return x;
  throw Error("newton_solve: no convergence");
}

VecX solve_pose(const RobotModel& model, const PoseSpec& spec,
                const VecX& q_guess) {
  if (!spec.contacts) throw Error("solve_pose: contact set required");
  const ContactSet& cs = *spec.contacts;
  const int nq = model.nq();
  const int dim_state = state_dim_of(model, spec.kind);
  const bool has_time = spec.kind != OutputKind::UnderThree;
  int rows = cs.n_c() + dim_state + (has_time ? 3 : 1);
  if (spec.kind == OutputKind::UnderTwo) rows += 2;
  if (rows != nq)
    throw Error("solve_pose: " + std::to_string(rows) + " rows for " +
                std::to_string(nq) + " unknowns");
  if (spec.contact_targets.size() != cs.n_c() ||
      spec.state_targets.size() != dim_state)
    throw Error("solve_pose: target size mismatch");

  auto resid = [&](const VecX& q) -> VecX {
    VecX r(nq);
    int k = 0;
    const VecX cp = contact_positions(model, q, cs);
    for (int i = 0; i < cp.size(); ++i)
      r(k++) = cp(i) - spec.contact_targets(i);
    if (has_time) {
      r(k++) = q(0) - spec.gp(0);
      r(k++) = q(1) - spec.gp(1);
      r(k++) = wrap_angle(q(5) - spec.gp(2));
    } else if (spec.pin_swing_heel) {
      const KinCache kc = fk(model, q);
      const FootGeometry& swf = model.feet[1];
      const auto corners = foot_corners_local(swf);
      const KinCache::Frame& ff = kc.dof[model.links[swf.link].dof];
      r(k++) = 0.5 * ((ff.p + ff.R * corners[2]).z() +
                      (ff.p + ff.R * corners[3]).z());
    } else {
      r(k++) = foot_pitch_of(model, q, model.feet[0].link) - spec.theta_st;
    }
    if (spec.kind == OutputKind::UnderTwo) {
      r(k++) = q(3) - spec.base_rp(0);
      r(k++) = q(4) - spec.base_rp(1);
    }
    const VecX sv = measure_state_rows(model, spec.kind, q);
    for (int i = 0; i < sv.size(); ++i) r(k++) = sv(i) - spec.state_targets(i);
    return r;
  };
  return newton_solve(resid, q_guess, 120, 1e-12);
}

VecX solve_zero_error_rates(const RobotModel& model, const DomainSpec& domain,
                            Scalar t, const VecX& q, const PhaseState& phase,
                            const GaitLibrary& gait,
                            const GlobalPathSpec& path, Scalar theta_st_dot,
                            const Vec2& base_rp_rate) {
  const int nq = model.nq();
  const MatX J = contact_jacobian(model, q, domain.contacts);
  const int nc = static_cast<int>(J.rows());
  const int dim = output_dim(model, domain.output);
  int extra = 0;
  if (domain.output == OutputKind::UnderThree) extra = 1;
  if (domain.output == OutputKind::UnderTwo) extra = 2;
  if (dim + nc + extra != nq)
    throw Error("solve_zero_error_rates: system is not square");

  VecX qdot = VecX::Zero(nq);
  for (int it = 0; it < 20; ++it) {
    const OutputEval oe =
        output_function(model, domain, t, {q, qdot}, phase, gait, path);
    MatX A = MatX::Zero(nq, nq);
    VecX b = VecX::Zero(nq);
    A.topRows(dim) = oe.G;
    b.head(dim) = -oe.yt;
    A.middleRows(dim, nc) = J;
    int k = dim + nc;
    if (domain.output == OutputKind::UnderThree) {
      const KinCache kc = fk(model, q);
      auto [val, row] = pitch_value_row(model, kc, model.feet[0].link);
      (void)val;
      A.row(k) = row.transpose();
      b(k) = theta_st_dot;
    } else if (domain.output == OutputKind::UnderTwo) {
      A(k, 3) = 1;
      b(k) = base_rp_rate(0);
      A(k + 1, 4) = 1;
      b(k + 1) = base_rp_rate(1);
    }
    const VecX next = Eigen::PartialPivLU<MatX>(A).solve(b);
    if (!next.allFinite())
      throw Error("solve_zero_error_rates: singular system");
    const Scalar diff = (next - qdot).lpNorm<Eigen::Infinity>();
    qdot = next;
    if (diff < 1e-12) return qdot;
  }
  throw Error("solve_zero_error_rates: phase-rate coupling did not converge");
}

}  // namespace gptwalk
