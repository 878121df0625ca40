#ifndef GPTWALK_KINEMATICS_HPP
#define GPTWALK_KINEMATICS_HPP

#include <array>

#include "gptwalk/model.hpp"
#include "gptwalk/types.hpp"

namespace gptwalk {

// World-frame kinematics with spatial quantities referred to the world
// origin: velocity pairs (omega, v_o) where v_o is the velocity of the
// body-fixed point currently at the origin.
struct KinCache {
  struct Frame {
    Mat3 R;
    Vec3 p;       // dof frame origin
    Vec3 axis_w;  // world direction of the dof axis
    Vec3 omega = Vec3::Zero();
    Vec3 v_o = Vec3::Zero();
    Vec3 alpha = Vec3::Zero();
    Vec3 a_o = Vec3::Zero();
  };
  std::vector<Frame> dof;  // per model dof
  bool with_velocity = false;
  bool with_accel = false;
};

void check_chart(const RobotModel& model, const VecX& q);

KinCache fk(const RobotModel& model, const VecX& q);
KinCache fk_velocity(const RobotModel& model, const VecX& q, const VecX& qdot);
// Acceleration pass with explicit qddot (pass zero for bias terms).
KinCache fk_accel(const RobotModel& model, const VecX& q, const VecX& qdot,
                  const VecX& qddot);

Vec3 point_world(const RobotModel& model, const KinCache& kc, int link,
                 const Vec3& local);
Vec3 point_velocity(const KinCache& kc, int dof, const Vec3& p_world);
// Material acceleration of the body point currently at p_world.
Vec3 point_accel(const KinCache& kc, int dof, const Vec3& p_world);

// 3 x (n+6) Jacobians in world coordinates.
MatX point_jacobian(const RobotModel& model, const KinCache& kc, int link,
                    const Vec3& p_world);
MatX angular_jacobian(const RobotModel& model, const KinCache& kc, int link);

// Foot corner points in the foot-link frame: toe-left, toe-right,
// heel-left, heel-right, all at sole level.
std::array<Vec3, 4> foot_corners_local(const FootGeometry& foot);

struct FrameKin {
  Vec3 p_sw;        // swing foot (ankle) position, vehicle frame
  Vec3 gamma_sw;    // swing foot Euler angles w.r.t. vehicle frame
  Scalar z_swh;     // lowest swing heel corner height
  Scalar z_swt;     // lowest swing toe corner height
  Scalar theta_t;   // trailing (support-slot) foot pitch
  Scalar theta_l;   // leading (swing-slot) foot pitch
  Scalar theta_st;  // stance foot pitch (= theta_t)
};

FrameKin frame_kinematics(const RobotModel& model, const VecX& q);
FrameKin frame_kinematics(const RobotModel& model, const KinCache& kc,
                          const VecX& q);

}  // namespace gptwalk

#endif
