#ifndef GPTWALK_CONTROL_HPP
#define GPTWALK_CONTROL_HPP

#include <vector>

#include "gptwalk/dynamics.hpp"
#include "gptwalk/outputs.hpp"
#include "gptwalk/qp.hpp"

namespace gptwalk {

struct PDGains {
  VecX kp, kd;  // per output channel, diagonal
  static PDGains uniform(int dim, Scalar kp, Scalar kd);
};

struct TorqueLimits {
  VecX u_min, u_max;
  static TorqueLimits box(int n_a, Scalar mag);
};

struct DecouplingResult {
  MatX D;  // G M^{-1} Bbar on enabled actuator columns
  Scalar cond = 0;
};

DecouplingResult decoupling_matrix(const DynTerms& terms, const OutputEval& oe,
                                   const std::vector<bool>& act_mask);
DecouplingResult decoupling_matrix(const RobotModel& model,
                                   const DomainSpec& domain, Scalar t,
                                   const GeneralizedState& state,
                                   const PhaseState& phase,
                                   const GaitLibrary& gait,
                                   const GlobalPathSpec& path);

struct ControlEval {
  VecX u;  // n_a torques, masked actuators zero
  VecX v;  // commanded output acceleration
  VecX y, ydot;
  VecX N;  // feedback-linearizing torque backing the QP relaxation
  VecX qp_delta;  // empty unless the torque-limited variant ran
  Scalar decoupling_cond = 0;
};

// Input-output linearizing PD law from precomputed terms (the form the
// simulator right-hand side calls).
ControlEval io_pd_terms(const DynTerms& terms, const OutputEval& oe,
                        const PDGains& gains,
                        const std::vector<bool>& act_mask, int n_a);

ControlEval io_pd(const RobotModel& model, const DomainSpec& domain, Scalar t,
                  const GeneralizedState& state, const PhaseState& phase,
                  const GaitLibrary& gait, const GlobalPathSpec& path,
                  const PDGains& gains);

struct QPResult {
  VecX u;
  VecX delta;  // u - N
};

// Torque relaxation min u^T u + p delta^T delta, u = N + delta, boxed.
QPResult io_qp(const VecX& N, const TorqueLimits& limits, Scalar p);

// IO-QP controller: the linearizing torque passed through io_qp.
ControlEval io_qp_control(const DynTerms& terms, const OutputEval& oe,
                          const PDGains& gains,
                          const std::vector<bool>& act_mask, int n_a,
                          const TorqueLimits& limits, Scalar p);

}  // namespace gptwalk

#endif
