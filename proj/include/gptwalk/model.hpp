#ifndef GPTWALK_MODEL_HPP
#define GPTWALK_MODEL_HPP

#include <string>
#include <vector>

#include "gptwalk/textio.hpp"
#include "gptwalk/types.hpp"

namespace gptwalk {

struct Link {
  std::string name;
  int parent = -1;  // link index, -1 for the base
  Scalar mass = 0;
  Vec3 com = Vec3::Zero();       // in link frame
  Mat3 inertia = Mat3::Zero();   // about com, link frame
  Vec3 joint_origin = Vec3::Zero();  // joint position in parent link frame
  Vec3 joint_axis = Vec3::UnitZ();
  bool actuated = true;
  bool upper = false;  // member of q_up
  int dof = -1;        // dof concluding this link's frame
  int q_index = -1;    // joint coordinate, -1 for the base link
};

// Elementary dof: translate(origin), then rotate or slide about axis.
struct Dof {
  int pred = -1;
  bool revolute = true;
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin = Vec3::Zero();
  int q_index = -1;
  int link = -1;        // link whose frame this dof concludes, -1 if chained
  int driven_link = -1; // link whose subtree this dof moves
};

struct FootGeometry {
  std::string name;
  int link = -1;
  Scalar toe = 0;        // toe line x-offset from ankle (forward, +)
  Scalar heel = 0;       // heel line x-offset magnitude (backward)
  Scalar half_width = 0;
  Scalar sole_drop = 0;  // ankle origin height above the sole
};

struct MirrorPair {
  int qa = -1, qb = -1;
  Scalar sign = 1.0;
};

struct RobotModel {
  std::string name;
  Scalar gravity = 9.81;
  std::vector<Link> links;
  std::vector<Dof> dofs;
  int base_link = -1;
  int n = 0;    // joint count
  int n_a = 0;  // actuated joint count
  std::vector<int> upper_q;           // q indices of q_up, file order
  std::vector<FootGeometry> feet;     // feet[0] = support slot, feet[1] = swing
  std::vector<MirrorPair> mirror;

  int nq() const { return n + 6; }
  int link_index(const std::string& nm) const;  // throws ParseError
  const FootGeometry& support_foot() const { return feet.at(0); }
  const FootGeometry& swing_foot() const { return feet.at(1); }

  // Left/right joint value swap per the mirror map; world base pose unchanged.
  GeneralizedState relabel(const GeneralizedState& s) const;

  void validate() const;  // mass/inertia/tree invariants
};

RobotModel parse_model(const TextNode& root);
RobotModel load_model(const std::string& path);

}  // namespace gptwalk

#endif
