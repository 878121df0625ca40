#ifndef GPTWALK_OUTPUTS_HPP
#define GPTWALK_OUTPUTS_HPP

#include <functional>
#include <string>
#include <vector>

#include "gptwalk/domains.hpp"
#include "gptwalk/gait.hpp"
#include "gptwalk/path.hpp"

namespace gptwalk {

// Output bundle for y = h_c(q) - h_d(t, theta). The exact identities
//   ydot  = G qdot + yt
//   yddot = G qddot + acc_bias
// hold, with G absorbing the arc-length phase rate (the dependence of
// thetadot on qdot enters G through the unit-velocity direction).
struct OutputEval {
  VecX y;
  VecX ydot;
  MatX G;         // effective output Jacobian
  VecX yt;        // explicit time partial of y
  VecX acc_bias;  // yddot - G qddot
  VecX d2hd_dt2;  // explicit second time derivative of the desired side
};

int output_dim(const RobotModel& model, OutputKind kind);

// State-channel labels in gait-curve order (time rows excluded).
std::vector<std::string> state_row_labels(const RobotModel& model,
                                          OutputKind kind);

// Measured state-channel values in gait-curve order.
VecX measure_state_rows(const RobotModel& model, OutputKind kind,
                        const VecX& q);

OutputEval output_function(const RobotModel& model, const DomainSpec& domain,
                           Scalar t, const GeneralizedState& state,
                           const PhaseState& phase, const GaitLibrary& gait,
                           const GlobalPathSpec& path);

// ---- pose and rate construction -------------------------------------
// Shared by scenario seeding, gait fitting, and the reset-offset
// estimates of the stability monitor.

// Damped Newton on a square residual with a finite-difference Jacobian.
VecX newton_solve(const std::function<VecX(const VecX&)>& residual, VecX x,
                  int max_iter = 80, Scalar tol = 1e-12);

// Square inverse-kinematics problem: contact rows pinned to
// contact_targets, state rows to state_targets, plus the kind-specific
// base rows that close the system.
struct PoseSpec {
  OutputKind kind = OutputKind::FullAct;
  const ContactSet* contacts = nullptr;
  VecX contact_targets;
  VecX state_targets;      // gait-curve order
  Vec3 gp = Vec3::Zero();  // x_b, y_b, psi_b rows (kinds with time rows)
  // UnderThree closing row: support pitch target, or (when pin_swing_heel
  // is set) mean swing-heel-corner height zero.
  Scalar theta_st = 0;
  bool pin_swing_heel = false;
  Vec2 base_rp = Vec2::Zero();  // UnderTwo extra rows (phi_b, theta_b)
};

VecX solve_pose(const RobotModel& model, const PoseSpec& spec,
                const VecX& q_guess);

// Generalized rates with ydot = 0, contact rows stationary, and the
// kind-specific closing rates; fixed-point iteration on the phase-rate
// coupling inside G.
VecX solve_zero_error_rates(const RobotModel& model, const DomainSpec& domain,
                            Scalar t, const VecX& q, const PhaseState& phase,
                            const GaitLibrary& gait,
                            const GlobalPathSpec& path, Scalar theta_st_dot = 0,
                            const Vec2& base_rp_rate = Vec2::Zero());

// Support-foot pitch value and Jacobian row (used for the UnderThree
// closing row and by the gait fitter).
Scalar foot_pitch_of(const RobotModel& model, const VecX& q, int link);
Scalar foot_pitch_rate(const RobotModel& model, const VecX& q, const VecX& qd,
                       int link);

}  // namespace gptwalk

#endif
