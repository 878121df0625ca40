#ifndef GPTWALK_CONTACTS_HPP
#define GPTWALK_CONTACTS_HPP

#include <vector>

#include "gptwalk/model.hpp"

namespace gptwalk {

struct ContactRow {
  int link = -1;
  Vec3 local = Vec3::Zero();  // point in link frame
  int axis = 2;               // constrained world direction (0,1,2)
};

// Line contacts are realized as point pairs with redundant directions
// removed so that n_c matches the walking domains: 6 (flat foot),
// 5 (toe or heel line), 10 (double support).
struct ContactSet {
  std::vector<ContactRow> rows;
  std::vector<int> heel_z_rows;  // rows summing to the heel vertical force
  int n_c() const { return static_cast<int>(rows.size()); }
  bool empty() const { return rows.empty(); }
};

// Flat foot: heel-left xyz, heel-right xz, toe-left z.
ContactSet contacts_flat6(const RobotModel& model, const FootGeometry& foot);
// Toe line: toe-left xyz, toe-right xz.
ContactSet contacts_toe5(const RobotModel& model, const FootGeometry& foot);
// Heel line: heel-left xyz, heel-right xz.
ContactSet contacts_heel5(const RobotModel& model, const FootGeometry& foot);
// Double support: trailing toe line + leading heel line.
ContactSet contacts_oa10(const RobotModel& model, const FootGeometry& trailing,
                         const FootGeometry& leading);

// World positions of all contact rows' points (n_c entries, one scalar
// per row: the constrained coordinate).
VecX contact_positions(const RobotModel& model, const VecX& q,
                       const ContactSet& contacts);

// Flat foot placement on the ground plane: ankle above (x, y), sole at
// z = 0, foot rotated by yaw.
struct FootPlacement {
  int foot = 0;  // index into model.feet
  Vec2 ankle_xy = Vec2::Zero();
  Scalar yaw = 0;
};

// Contact-row targets for feet resting flat at the given placements.
VecX planar_contact_targets(const RobotModel& model, const ContactSet& contacts,
                            const std::vector<FootPlacement>& placements);

}  // namespace gptwalk

#endif
