#include "gptwalk/domains.hpp"

#include <algorithm>

#include "gptwalk/dynamics.hpp"
#include "gptwalk/kinematics.hpp"

namespace gptwalk {

int actuator_column(const RobotModel& model, int q_index) {
  int col = 0;
  for (const Link& lk : model.links) {
    if (lk.parent < 0 || !lk.actuated) continue;
    if (lk.q_index == q_index) return col;
    ++col;
  }
  return -1;
}

std::vector<int> ankle_q_indices(const RobotModel& model,
                                 const FootGeometry& foot) {
  std::vector<int> out;
  for (int l = foot.link; l >= 0 && out.size() < 2;
       l = model.links[l].parent) {
    if (model.links[l].q_index >= 0) out.push_back(model.links[l].q_index);
  }
  if (out.size() < 2)
    throw Error("model '" + model.name + "': foot '" + foot.name +
                "' lacks an ankle joint pair");
  return out;
}

MatX effective_input_matrix(const RobotModel& model, const DomainSpec& dom) {
  MatX B = input_matrix(model);
  if (static_cast<int>(dom.act_mask.size()) != model.n_a)
    throw Error("domain '" + dom.name + "': actuator mask size mismatch");
  for (int j = 0; j < model.n_a; ++j)
    if (!dom.act_mask[j]) B.col(j).setZero();
  return B;
}

GaitGraph make_gait_graph(const std::string& name, const RobotModel& model) {
  if (model.feet.size() != 2) throw Error("gait graph needs two feet");
  const FootGeometry& sup = model.feet[0];
  const FootGeometry& swg = model.feet[1];
  const std::vector<bool> all_on(model.n_a, true);

  GaitGraph g;
  g.name = name;
  if (name == "three-domain") {
    DomainSpec fa;
    fa.id = DomainId::FA;
    fa.name = "FA";
    fa.output = OutputKind::FullAct;
    fa.contacts = contacts_flat6(model, sup);
    fa.act_mask = all_on;
    fa.guard = GuardKind::HeelForce;
    fa.exit_reset = ResetKind::Continuous;
    g.domains.push_back(fa);

    DomainSpec ua;
    ua.id = DomainId::UA;
    ua.name = "UA";
    ua.output = OutputKind::UnderThree;
    ua.contacts = contacts_toe5(model, sup);
    ua.act_mask = all_on;
    ua.guard = GuardKind::SwingHeelHeight;
    ua.exit_reset = ResetKind::Impact;
    ua.exit_impact_contacts = contacts_oa10(model, sup, swg);
    g.domains.push_back(ua);

    DomainSpec oa;
    oa.id = DomainId::OA;
    oa.name = "OA";
    oa.output = OutputKind::OverAct;
    oa.contacts = contacts_oa10(model, sup, swg);
    oa.act_mask = all_on;
    oa.guard = GuardKind::SwingToeHeight;
    oa.exit_reset = ResetKind::ImpactRelabel;
    oa.exit_impact_contacts = contacts_flat6(model, swg);
    g.domains.push_back(oa);
  } else if (name == "two-domain") {
    DomainSpec fa;
    fa.id = DomainId::FA;
    fa.name = "FA";
    fa.output = OutputKind::FullAct;
    fa.contacts = contacts_flat6(model, sup);
    fa.act_mask = all_on;
    fa.guard = GuardKind::ArcLength;
    fa.exit_reset = ResetKind::Continuous;
    g.domains.push_back(fa);

    DomainSpec ua;
    ua.id = DomainId::UA;
    ua.name = "UA";
    ua.output = OutputKind::UnderTwo;
    ua.contacts = contacts_flat6(model, sup);
    ua.act_mask = all_on;
    for (int qi : ankle_q_indices(model, sup)) {
      const int col = actuator_column(model, qi);
      if (col < 0)
        throw Error("two-domain graph: support ankle joint is unactuated");
      ua.act_mask[col] = false;
    }
    ua.guard = GuardKind::SwingFootHeight;
    ua.exit_reset = ResetKind::ImpactRelabel;
    ua.exit_impact_contacts = contacts_flat6(model, swg);
    g.domains.push_back(ua);
  } else {
    throw Error("unknown gait graph '" + name + "'");
  }
  return g;
}

Scalar guard_value(const RobotModel& model, const GaitGraph& graph,
                   int domain_index, Scalar /*t*/,
                   const GeneralizedState& state, const VecX& u, Scalar theta,
                   Scalar l_s) {
  const DomainSpec& dom = graph.at(domain_index);
  switch (dom.guard) {
    case GuardKind::ArcLength:
      return l_s - theta;
    case GuardKind::HeelForce: {
      const MatX B = effective_input_matrix(model, dom);
      const DynTerms terms =
          compute_dyn_terms(model, state.q, state.qdot, dom.contacts, B);
      const ConstrainedAccel ca = constrained_dynamics(terms, u);
      Scalar f = 0;
      for (int r : dom.contacts.heel_z_rows) f += ca.F_c(r);
      return f;
    }
    case GuardKind::SwingHeelHeight:
      return frame_kinematics(model, state.q).z_swh;
    case GuardKind::SwingToeHeight:
      return frame_kinematics(model, state.q).z_swt;
    case GuardKind::SwingFootHeight: {
      const FrameKin fk = frame_kinematics(model, state.q);
      return std::min(fk.z_swh, fk.z_swt);
    }
  }
  throw Error("guard_value: unreachable");
}

}  // namespace gptwalk
