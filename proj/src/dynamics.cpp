#include "gptwalk/dynamics.hpp"

#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "gptwalk/rotation.hpp"

namespace gptwalk {

namespace {

using Vec6 = Eigen::Matrix<Scalar, 6, 1>;
using Mat6 = Eigen::Matrix<Scalar, 6, 6>;

// Spatial inertia about the world origin for a body with world com c and
// world-axes rotational inertia Ic; acts on motion vectors (omega, v_o).
Mat6 spatial_inertia(Scalar m, const Vec3& c, const Mat3& Ic) {
  const Mat3 S = skew(c);
  Mat6 I;
  I.topLeftCorner<3, 3>() = Ic + m * S * S.transpose();
  I.topRightCorner<3, 3>() = m * S;
  I.bottomLeftCorner<3, 3>() = m * S.transpose();
  I.bottomRightCorner<3, 3>() = m * Mat3::Identity();
  return I;
}

Vec6 dof_subspace(const Dof& d, const KinCache::Frame& f) {
  Vec6 s;
  if (d.revolute) {
    s.head<3>() = f.axis_w;
    s.tail<3>() = f.p.cross(f.axis_w);
  } else {
    s.head<3>().setZero();
    s.tail<3>() = f.axis_w;
  }
  return s;
}

}  // namespace

MatX mass_matrix(const RobotModel& model, const VecX& q) {
  const KinCache kc = fk(model, q);
  const int nl = static_cast<int>(model.links.size());
  std::vector<Mat6> comp(nl, Mat6::Zero());
  for (int l = 0; l < nl; ++l) {
    const Link& lk = model.links[l];
    const KinCache::Frame& f = kc.dof[lk.dof];
    const Vec3 com_w = f.p + f.R * lk.com;
    comp[l] = spatial_inertia(lk.mass, com_w, f.R * lk.inertia * f.R.transpose());
  }
  for (int l = nl - 1; l >= 0; --l)
    if (model.links[l].parent >= 0) comp[model.links[l].parent] += comp[l];

  MatX M = MatX::Zero(model.nq(), model.nq());
  for (size_t j = 0; j < model.dofs.size(); ++j) {
    const Dof& dj = model.dofs[j];
    const Vec6 Sj = dof_subspace(dj, kc.dof[j]);
    const Vec6 F = comp[dj.driven_link] * Sj;
    int k = static_cast<int>(j);
    while (k >= 0) {
      const Dof& dk = model.dofs[k];
      M(dk.q_index, dj.q_index) = dof_subspace(dk, kc.dof[k]).dot(F);
      k = dk.pred;
    }
  }
  for (int i = 0; i < M.rows(); ++i)
    for (int j = i + 1; j < M.cols(); ++j) M(i, j) = M(j, i);
  return M;
}

VecX bias_forces(const RobotModel& model, const VecX& q, const VecX& qdot) {
  const KinCache kc = fk_accel(model, q, qdot, VecX::Zero(model.nq()));
  const Vec3 g_vec(0, 0, -model.gravity);
  VecX tau = VecX::Zero(model.nq());
  for (const Link& lk : model.links) {
    const KinCache::Frame& f = kc.dof[lk.dof];
    const Vec3 com_w = f.p + f.R * lk.com;
    const Mat6 I = spatial_inertia(lk.mass, com_w, f.R * lk.inertia * f.R.transpose());
    Vec6 v, a;
    v << f.omega, f.v_o;
    a << f.alpha, f.a_o;
    const Vec6 h = I * v;
    Vec6 fl = I * a;
    fl.head<3>() += f.omega.cross(h.head<3>()) + f.v_o.cross(h.tail<3>());
    fl.tail<3>() += f.omega.cross(h.tail<3>());
    fl.head<3>() -= com_w.cross(lk.mass * g_vec);
    fl.tail<3>() -= lk.mass * g_vec;
    int k = lk.dof;
    while (k >= 0) {
      const Dof& dk = model.dofs[k];
      tau(dk.q_index) += dof_subspace(dk, kc.dof[k]).dot(fl);
      k = dk.pred;
    }
  }
  return tau;
}

MatX contact_jacobian(const RobotModel& model, const VecX& q,
                      const ContactSet& contacts) {
  const KinCache kc = fk(model, q);
  MatX J = MatX::Zero(contacts.n_c(), model.nq());
  for (int i = 0; i < contacts.n_c(); ++i) {
    const ContactRow& r = contacts.rows[i];
    const Vec3 p = point_world(model, kc, r.link, r.local);
    J.row(i) = point_jacobian(model, kc, r.link, p).row(r.axis);
  }
  return J;
}

VecX jdot_qdot(const RobotModel& model, const VecX& q, const VecX& qdot,
               const ContactSet& contacts) {
  const KinCache kc = fk_accel(model, q, qdot, VecX::Zero(model.nq()));
  VecX out(contacts.n_c());
  for (int i = 0; i < contacts.n_c(); ++i) {
    const ContactRow& r = contacts.rows[i];
    const KinCache::Frame& f = kc.dof[model.links[r.link].dof];
    const Vec3 p = f.p + f.R * r.local;
    out(i) = point_accel(kc, model.links[r.link].dof, p)(r.axis);
  }
  return out;
}

MatX input_matrix(const RobotModel& model) {
  MatX B = MatX::Zero(model.nq(), model.n_a);
  int col = 0;
  for (const Link& lk : model.links)
    if (lk.parent >= 0 && lk.actuated) B(lk.q_index, col++) = 1.0;
  return B;
}

DynTerms compute_dyn_terms(const RobotModel& model, const VecX& q,
                           const VecX& qdot, const ContactSet& contacts,
                           const MatX& B) {
  DynTerms dt;
  dt.M = mass_matrix(model, q);
  dt.c = bias_forces(model, q, qdot);
  dt.B = B;
  dt.Mllt.compute(dt.M);
  if (dt.Mllt.info() != Eigen::Success)
    throw Error("mass matrix not positive definite");
  if (!contacts.empty()) {
    dt.J = contact_jacobian(model, q, contacts);
    dt.Jdqd = jdot_qdot(model, q, qdot, contacts);
    dt.JMiJt = dt.J * dt.Mllt.solve(dt.J.transpose());
    Eigen::SelfAdjointEigenSolver<MatX> es(dt.JMiJt);
    const Scalar lmin = es.eigenvalues().minCoeff();
    const Scalar lmax = es.eigenvalues().maxCoeff();
    dt.contact_cond = (lmin <= 0) ? std::numeric_limits<Scalar>::infinity()
                                  : lmax / lmin;
    if (dt.contact_cond > kContactCondLimit)
      throw ContactDegeneracyError(
          "contact constraints degenerate: cond(J M^-1 J^T) = " +
          std::to_string(dt.contact_cond));
  } else {
    dt.J.resize(0, model.nq());
    dt.Jdqd.resize(0);
    dt.JMiJt.resize(0, 0);
  }
  return dt;
}

VecX DynTerms::cbar() const {
  if (J.rows() == 0) return c;
  const VecX JMic = J * Mllt.solve(c);
  Eigen::LLT<MatX> lam(JMiJt);
  return c - J.transpose() * lam.solve(JMic - Jdqd);
}

MatX DynTerms::Bbar() const {
  if (J.rows() == 0) return B;
  const MatX JMiB = J * Mllt.solve(B);
  Eigen::LLT<MatX> lam(JMiJt);
  return B - J.transpose() * lam.solve(JMiB);
}

ConstrainedAccel constrained_dynamics(const DynTerms& dt, const VecX& u) {
  const int nq = static_cast<int>(dt.M.rows());
  const int nc = static_cast<int>(dt.J.rows());
  ConstrainedAccel out;
  if (nc == 0) {
    out.qddot = dt.Mllt.solve(dt.B * u - dt.c);
    out.F_c.resize(0);
    return out;
  }
  MatX K = MatX::Zero(nq + nc, nq + nc);
  K.topLeftCorner(nq, nq) = dt.M;
  K.topRightCorner(nq, nc) = -dt.J.transpose();
  K.bottomLeftCorner(nc, nq) = dt.J;
  VecX rhs(nq + nc);
  rhs.head(nq) = dt.B * u - dt.c;
  rhs.tail(nc) = -dt.Jdqd;
  Eigen::PartialPivLU<MatX> lu(K);
  VecX x = lu.solve(rhs);
  x += lu.solve(rhs - K * x);  // one refinement pass for the 1e-9 residual
  out.qddot = x.head(nq);
  out.F_c = x.tail(nc);
  return out;
}

ConstrainedAccel constrained_dynamics(const RobotModel& model, const VecX& q,
                                      const VecX& qdot, const VecX& u,
                                      const ContactSet& contacts,
                                      const MatX& B) {
  return constrained_dynamics(
      compute_dyn_terms(model, q, qdot, contacts, B), u);
}

ImpactResult impact_map(const RobotModel& model, const VecX& q,
                        const VecX& qdot_minus,
                        const ContactSet& new_contacts) {
  if (new_contacts.empty()) throw Error("impact_map: empty contact set");
  const MatX B = input_matrix(model);
  const DynTerms dt =
      compute_dyn_terms(model, q, VecX::Zero(model.nq()), new_contacts, B);
  const int nq = static_cast<int>(dt.M.rows());
  const int nc = static_cast<int>(dt.J.rows());
  MatX K = MatX::Zero(nq + nc, nq + nc);
  K.topLeftCorner(nq, nq) = dt.M;
  K.topRightCorner(nq, nc) = -dt.J.transpose();
  K.bottomLeftCorner(nc, nq) = dt.J;
  VecX rhs = VecX::Zero(nq + nc);
  rhs.head(nq) = dt.M * qdot_minus;
  Eigen::PartialPivLU<MatX> lu(K);
  VecX x = lu.solve(rhs);
  x += lu.solve(rhs - K * x);
  ImpactResult out;
  out.qdot_plus = x.head(nq);
  out.impulse = x.tail(nc);
  return out;
}

Scalar kinetic_energy(const RobotModel& model, const VecX& q,
                      const VecX& qdot) {
  const KinCache kc = fk_velocity(model, q, qdot);
  Scalar ke = 0;
  for (const Link& lk : model.links) {
    const KinCache::Frame& f = kc.dof[lk.dof];
    const Vec3 com_w = f.p + f.R * lk.com;
    const Vec3 v_com = f.v_o + f.omega.cross(com_w);
    const Mat3 Iw = f.R * lk.inertia * f.R.transpose();
    ke += 0.5 * lk.mass * v_com.squaredNorm() +
          0.5 * f.omega.dot(Iw * f.omega);
  }
  return ke;
}

Scalar potential_energy(const RobotModel& model, const VecX& q) {
  const KinCache kc = fk(model, q);
  Scalar pe = 0;
  for (const Link& lk : model.links) {
    const KinCache::Frame& f = kc.dof[lk.dof];
    pe += lk.mass * model.gravity * (f.p + f.R * lk.com).z();
  }
  return pe;
}

}  // namespace gptwalk
