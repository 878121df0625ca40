#include "gptwalk/control.hpp"

#include <limits>
#include <string>

namespace gptwalk {

PDGains PDGains::uniform(int dim, Scalar kp, Scalar kd) {
  PDGains g;
  g.kp = VecX::Constant(dim, kp);
  g.kd = VecX::Constant(dim, kd);
  return g;
}

TorqueLimits TorqueLimits::box(int n_a, Scalar mag) {
  TorqueLimits l;
  l.u_min = VecX::Constant(n_a, -mag);
  l.u_max = VecX::Constant(n_a, mag);
  return l;
}

namespace {

std::vector<int> enabled_columns(const std::vector<bool>& act_mask) {
  std::vector<int> cols;
  for (int j = 0; j < static_cast<int>(act_mask.size()); ++j)
    if (act_mask[j]) cols.push_back(j);
  return cols;
}

}  // namespace

DecouplingResult decoupling_matrix(const DynTerms& terms, const OutputEval& oe,
                                   const std::vector<bool>& act_mask) {
  const MatX Bbar = terms.Bbar();
  const std::vector<int> cols = enabled_columns(act_mask);
  MatX Be(Bbar.rows(), cols.size());
  for (size_t j = 0; j < cols.size(); ++j) Be.col(j) = Bbar.col(cols[j]);
  DecouplingResult out;
  out.D = oe.G * terms.Mllt.solve(Be);
  if (out.D.rows() == out.D.cols() && out.D.rows() > 0) {
    const MatX Dinv = Eigen::PartialPivLU<MatX>(out.D).inverse();
    out.cond = Dinv.allFinite()
                   ? out.D.norm() * Dinv.norm()
                   : std::numeric_limits<Scalar>::infinity();
  } else {
    out.cond = std::numeric_limits<Scalar>::infinity();
  }
  return out;
}

DecouplingResult decoupling_matrix(const RobotModel& model,
                                   const DomainSpec& domain, Scalar t,
                                   const GeneralizedState& state,
                                   const PhaseState& phase,
                                   const GaitLibrary& gait,
                                   const GlobalPathSpec& path) {
  const MatX B = effective_input_matrix(model, domain);
  const DynTerms terms =
      compute_dyn_terms(model, state.q, state.qdot, domain.contacts, B);
  const OutputEval oe =
      output_function(model, domain, t, state, phase, gait, path);
  return decoupling_matrix(terms, oe, domain.act_mask);
}

ControlEval io_pd_terms(const DynTerms& terms, const OutputEval& oe,
                        const PDGains& gains,
                        const std::vector<bool>& act_mask, int n_a) {
  const int dim = static_cast<int>(oe.y.size());
  const std::vector<int> cols = enabled_columns(act_mask);
  if (static_cast<int>(cols.size()) != dim)
    throw Error("io_pd: " + std::to_string(cols.size()) +
                " enabled actuators for " + std::to_string(dim) + " outputs");
  if (gains.kp.size() != dim || gains.kd.size() != dim)
    throw Error("io_pd: gain dimension mismatch");

  const DecouplingResult dec = decoupling_matrix(terms, oe, act_mask);
  if (!(dec.cond < kContactCondLimit))
    throw DecouplingSingularError(
        "decoupling matrix singular: cond = " + std::to_string(dec.cond));

  ControlEval ce;
  ce.y = oe.y;
  ce.ydot = oe.ydot;
  ce.decoupling_cond = dec.cond;
  ce.v = -(gains.kp.array() * oe.y.array()) -
         (gains.kd.array() * oe.ydot.array());
  const VecX rhs = ce.v - oe.acc_bias + oe.G * terms.Mllt.solve(terms.cbar());
  const VecX ue = Eigen::PartialPivLU<MatX>(dec.D).solve(rhs);
  if (!ue.allFinite()) throw DecouplingSingularError("io_pd: singular solve");
  ce.u = VecX::Zero(n_a);
  for (size_t j = 0; j < cols.size(); ++j) ce.u(cols[j]) = ue(j);
  ce.N = ce.u;
  return ce;
}

ControlEval io_pd(const RobotModel& model, const DomainSpec& domain, Scalar t,
                  const GeneralizedState& state, const PhaseState& phase,
                  const GaitLibrary& gait, const GlobalPathSpec& path,
                  const PDGains& gains) {
  const MatX B = effective_input_matrix(model, domain);
  const DynTerms terms =
      compute_dyn_terms(model, state.q, state.qdot, domain.contacts, B);
  const OutputEval oe =
      output_function(model, domain, t, state, phase, gait, path);
  return io_pd_terms(terms, oe, gains, domain.act_mask, model.n_a);
}

QPResult io_qp(const VecX& N, const TorqueLimits& limits, Scalar p) {
  if (limits.u_min.size() != N.size() || limits.u_max.size() != N.size())
    throw Error("io_qp: limit dimension mismatch");
  for (int i = 0; i < N.size(); ++i)
    if (!(limits.u_min(i) < limits.u_max(i)))
      throw Error("io_qp: u_min must be below u_max");
  QPResult out;
  out.u = box_qp_closed_form(N, limits.u_min, limits.u_max, p);
  out.delta = out.u - N;
  return out;
}

ControlEval io_qp_control(const DynTerms& terms, const OutputEval& oe,
                          const PDGains& gains,
                          const std::vector<bool>& act_mask, int n_a,
                          const TorqueLimits& limits, Scalar p) {
  ControlEval ce = io_pd_terms(terms, oe, gains, act_mask, n_a);
  const QPResult qp = io_qp(ce.N, limits, p);
  ce.u = qp.u;
  ce.qp_delta = qp.delta;
  return ce;
}

}  // namespace gptwalk
