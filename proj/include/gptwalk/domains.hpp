#ifndef GPTWALK_DOMAINS_HPP
#define GPTWALK_DOMAINS_HPP

#include <string>
#include <vector>

#include "gptwalk/contacts.hpp"
#include "gptwalk/model.hpp"

namespace gptwalk {

enum class DomainId { FA, UA, OA };

// Output-function selector; two-domain FA shares FullAct.
enum class OutputKind { FullAct, UnderThree, OverAct, UnderTwo };

enum class GuardKind {
  HeelForce,        // support-heel vertical GRF (needs u)
  SwingHeelHeight,  // lowest swing heel corner
  SwingToeHeight,   // lowest swing toe corner
  SwingFootHeight,  // lowest of all four swing corners
  ArcLength,        // l_s - theta
};

enum class ResetKind { Continuous, Impact, ImpactRelabel };

struct DomainSpec {
  DomainId id = DomainId::FA;
  std::string name;
  OutputKind output = OutputKind::FullAct;
  ContactSet contacts;
  std::vector<bool> act_mask;  // n_a entries, false = motor switched off
  GuardKind guard = GuardKind::ArcLength;  // exit guard
  ResetKind exit_reset = ResetKind::Continuous;
  ContactSet exit_impact_contacts;  // set the exit impact resolves against

  bool guard_needs_force() const { return guard == GuardKind::HeelForce; }
  bool guard_is_touchdown() const {
    return guard == GuardKind::SwingHeelHeight ||
           guard == GuardKind::SwingToeHeight ||
           guard == GuardKind::SwingFootHeight;
  }
};

struct GaitGraph {
  std::string name;
  std::vector<DomainSpec> domains;  // cycle order; step starts in domains[0]
  int size() const { return static_cast<int>(domains.size()); }
  int next(int i) const { return (i + 1) % size(); }
  const DomainSpec& at(int i) const { return domains.at(i); }
};

// "three-domain" (FA -> UA -> OA) or "two-domain" (FA -> UA with the
// support-ankle motors switched off in UA).
GaitGraph make_gait_graph(const std::string& name, const RobotModel& model);

// Column of a joint coordinate in the input matrix; -1 if unactuated.
int actuator_column(const RobotModel& model, int q_index);
// The two joints nearest a foot walking up the tree (its ankle pair).
std::vector<int> ankle_q_indices(const RobotModel& model,
                                 const FootGeometry& foot);

// Joint-torque selection matrix with masked actuator columns zeroed.
MatX effective_input_matrix(const RobotModel& model, const DomainSpec& domain);

// Exit-guard scalar: positive inside the domain and zero on the switching
// surface; touchdown guards also require a downward crossing, which the
// simulator checks separately.
Scalar guard_value(const RobotModel& model, const GaitGraph& graph,
                   int domain_index, Scalar t, const GeneralizedState& state,
                   const VecX& u, Scalar theta, Scalar l_s);

}  // namespace gptwalk

#endif
