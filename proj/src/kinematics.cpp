#include "gptwalk/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gptwalk/rotation.hpp"

namespace gptwalk {

void check_chart(const RobotModel& model, const VecX& q) {
  if (q.size() != model.nq())
    throw Error("state dimension mismatch: expected " +
                std::to_string(model.nq()) + ", got " +
                std::to_string(q.size()));
  if (!q.allFinite()) throw Error("non-finite configuration");
  if (std::abs(q(4)) >= M_PI / 2 - kChartTol)
    throw SingularChartError("Euler chart singular: |theta_b| >= pi/2 - tol");
}

static Mat3 axis_rotation(const Vec3& axis, Scalar angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

KinCache fk(const RobotModel& model, const VecX& q) {
  check_chart(model, q);
  KinCache kc;
  kc.dof.resize(model.dofs.size());
  for (size_t i = 0; i < model.dofs.size(); ++i) {
    const Dof& d = model.dofs[i];
    const Mat3 Rp = d.pred >= 0 ? kc.dof[d.pred].R : Mat3::Identity();
    const Vec3 pp = d.pred >= 0 ? kc.dof[d.pred].p : Vec3::Zero();
    KinCache::Frame& f = kc.dof[i];
    const Vec3 o = pp + Rp * d.origin;
    f.axis_w = Rp * d.axis;
    if (d.revolute) {
      f.R = Rp * axis_rotation(d.axis, q(d.q_index));
      f.p = o;
    } else {
      f.R = Rp;
      f.p = o + f.axis_w * q(d.q_index);
    }
  }
  return kc;
}

KinCache fk_velocity(const RobotModel& model, const VecX& q,
                     const VecX& qdot) {
  KinCache kc = fk(model, q);
  kc.with_velocity = true;
  for (size_t i = 0; i < model.dofs.size(); ++i) {
    const Dof& d = model.dofs[i];
    KinCache::Frame& f = kc.dof[i];
    const Vec3 wp = d.pred >= 0 ? kc.dof[d.pred].omega : Vec3::Zero();
    const Vec3 vp = d.pred >= 0 ? kc.dof[d.pred].v_o : Vec3::Zero();
    const Scalar qd = qdot(d.q_index);
    if (d.revolute) {
      f.omega = wp + f.axis_w * qd;
      f.v_o = vp + qd * f.p.cross(f.axis_w);
    } else {
      f.omega = wp;
      f.v_o = vp + qd * f.axis_w;
    }
  }
  return kc;
}

KinCache fk_accel(const RobotModel& model, const VecX& q, const VecX& qdot,
                  const VecX& qddot) {
  KinCache kc = fk_velocity(model, q, qdot);
  kc.with_accel = true;
  for (size_t i = 0; i < model.dofs.size(); ++i) {
    const Dof& d = model.dofs[i];
    KinCache::Frame& f = kc.dof[i];
    const Vec3 wp = d.pred >= 0 ? kc.dof[d.pred].omega : Vec3::Zero();
    const Vec3 vp = d.pred >= 0 ? kc.dof[d.pred].v_o : Vec3::Zero();
    const Vec3 ap_ang = d.pred >= 0 ? kc.dof[d.pred].alpha : Vec3::Zero();
    const Vec3 ap_lin = d.pred >= 0 ? kc.dof[d.pred].a_o : Vec3::Zero();
    const Scalar qd = qdot(d.q_index);
    const Scalar qdd = qddot(d.q_index);
    if (d.revolute) {
      // S = (a, p x a), Sdot = v_pred x S
      const Vec3 s_ang = f.axis_w;
      const Vec3 s_lin = f.p.cross(f.axis_w);
      const Vec3 sd_ang = wp.cross(s_ang);
      const Vec3 sd_lin = vp.cross(s_ang) + wp.cross(s_lin);
      f.alpha = ap_ang + sd_ang * qd + s_ang * qdd;
      f.a_o = ap_lin + sd_lin * qd + s_lin * qdd;
    } else {
      f.alpha = ap_ang;
      f.a_o = ap_lin + wp.cross(f.axis_w) * qd + f.axis_w * qdd;
    }
  }
  return kc;
}

Vec3 point_world(const RobotModel& model, const KinCache& kc, int link,
                 const Vec3& local) {
  const KinCache::Frame& f = kc.dof[model.links[link].dof];
  return f.p + f.R * local;
}

Vec3 point_velocity(const KinCache& kc, int dof, const Vec3& p_world) {
  const KinCache::Frame& f = kc.dof[dof];
  return f.v_o + f.omega.cross(p_world);
}

Vec3 point_accel(const KinCache& kc, int dof, const Vec3& p_world) {
  const KinCache::Frame& f = kc.dof[dof];
  return f.a_o + f.alpha.cross(p_world) +
         f.omega.cross(f.v_o + f.omega.cross(p_world));
}

MatX point_jacobian(const RobotModel& model, const KinCache& kc, int link,
                    const Vec3& p_world) {
  MatX J = MatX::Zero(3, model.nq());
  int k = model.links[link].dof;
  while (k >= 0) {
    const Dof& d = model.dofs[k];
    const KinCache::Frame& f = kc.dof[k];
    if (d.revolute)
      J.col(d.q_index) = f.axis_w.cross(p_world - f.p);
    else
      J.col(d.q_index) = f.axis_w;
    k = d.pred;
  }
  return J;
}

MatX angular_jacobian(const RobotModel& model, const KinCache& kc, int link) {
  MatX J = MatX::Zero(3, model.nq());
  int k = model.links[link].dof;
  while (k >= 0) {
    const Dof& d = model.dofs[k];
    if (d.revolute) J.col(d.q_index) = kc.dof[k].axis_w;
    k = d.pred;
  }
  return J;
}

std::array<Vec3, 4> foot_corners_local(const FootGeometry& foot) {
  const Scalar z = -foot.sole_drop;
  return {Vec3(foot.toe, foot.half_width, z),
          Vec3(foot.toe, -foot.half_width, z),
          Vec3(-foot.heel, foot.half_width, z),
          Vec3(-foot.heel, -foot.half_width, z)};
}

static Scalar foot_pitch(const Mat3& R) {
  return std::atan2(-R(2, 0), std::hypot(R(2, 1), R(2, 2)));
}

FrameKin frame_kinematics(const RobotModel& model, const KinCache& kc,
                          const VecX& q) {
  FrameKin out;
  const FootGeometry& sup = model.support_foot();
  const FootGeometry& sw = model.swing_foot();
  const KinCache::Frame& fsup = kc.dof[model.links[sup.link].dof];
  const KinCache::Frame& fsw = kc.dof[model.links[sw.link].dof];

  const auto corners = foot_corners_local(sw);
  Scalar zt = std::numeric_limits<Scalar>::infinity();
  Scalar zh = zt;
  for (int i = 0; i < 4; ++i) {
    const Scalar z = (fsw.p + fsw.R * corners[i]).z();
    if (i < 2)
      zt = std::min(zt, z);
    else
      zh = std::min(zh, z);
  }
  out.z_swt = zt;
  out.z_swh = zh;

  out.theta_t = foot_pitch(fsup.R);
  out.theta_st = out.theta_t;
  out.theta_l = foot_pitch(fsw.R);

  const Mat3 Rv = rot_z(q(5));
  out.p_sw = Rv.transpose() * (fsw.p - q.head<3>());
  out.gamma_sw = rot_to_euler_zyx(Rv.transpose() * fsw.R);
  return out;
}

FrameKin frame_kinematics(const RobotModel& model, const VecX& q) {
  KinCache kc = fk(model, q);
  return frame_kinematics(model, kc, q);
}

}  // namespace gptwalk
