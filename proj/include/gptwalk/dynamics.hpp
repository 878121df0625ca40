#ifndef GPTWALK_DYNAMICS_HPP
#define GPTWALK_DYNAMICS_HPP

#include <Eigen/Cholesky>

#include "gptwalk/contacts.hpp"
#include "gptwalk/kinematics.hpp"
#include "gptwalk/model.hpp"

namespace gptwalk {

inline constexpr Scalar kContactCondLimit = 1e10;

MatX mass_matrix(const RobotModel& model, const VecX& q);
VecX bias_forces(const RobotModel& model, const VecX& q, const VecX& qdot);

MatX contact_jacobian(const RobotModel& model, const VecX& q,
                      const ContactSet& contacts);
VecX jdot_qdot(const RobotModel& model, const VecX& q, const VecX& qdot,
               const ContactSet& contacts);

// Standard joint-torque selection matrix (identity block on joint rows);
// actuator masking lives in domains.cpp.
MatX input_matrix(const RobotModel& model);

// Shared terms of Eq. M qddot + c = B u + J^T F_c, factored once per state.
struct DynTerms {
  MatX M;
  VecX c;
  MatX J;      // n_c x nq
  VecX Jdqd;   // n_c
  MatX B;      // nq x n_a
  Eigen::LLT<MatX> Mllt;
  MatX JMiJt;  // n_c x n_c
  Scalar contact_cond = 1.0;

  // Constraint-reduced dynamics M qddot + cbar = Bbar u.
  VecX cbar() const;
  MatX Bbar() const;
};

DynTerms compute_dyn_terms(const RobotModel& model, const VecX& q,
                           const VecX& qdot, const ContactSet& contacts,
                           const MatX& B);

struct ConstrainedAccel {
  VecX qddot;
  VecX F_c;
};

ConstrainedAccel constrained_dynamics(const RobotModel& model, const VecX& q,
                                      const VecX& qdot, const VecX& u,
                                      const ContactSet& contacts,
                                      const MatX& B);
ConstrainedAccel constrained_dynamics(const DynTerms& dt, const VecX& u);

struct ImpactResult {
  VecX qdot_plus;
  VecX impulse;  // n_c contact impulses
};

ImpactResult impact_map(const RobotModel& model, const VecX& q,
                        const VecX& qdot_minus, const ContactSet& new_contacts);

Scalar kinetic_energy(const RobotModel& model, const VecX& q,
                      const VecX& qdot);
Scalar potential_energy(const RobotModel& model, const VecX& q);

}  // namespace gptwalk

#endif
