#include "gptwalk/contacts.hpp"

#include "gptwalk/kinematics.hpp"

namespace gptwalk {

namespace {
void push_point(ContactSet& cs, int link, const Vec3& local,
                std::initializer_list<int> axes) {
  for (int a : axes) cs.rows.push_back({link, local, a});
}
}  // namespace

ContactSet contacts_flat6(const RobotModel& model, const FootGeometry& foot) {
  (void)model;
  const auto c = foot_corners_local(foot);
  ContactSet cs;
  push_point(cs, foot.link, c[2], {0, 1, 2});  // heel-left
  push_point(cs, foot.link, c[3], {0, 2});     // heel-right
  push_point(cs, foot.link, c[0], {2});        // toe-left
  cs.heel_z_rows = {2, 4};
  return cs;
}

ContactSet contacts_toe5(const RobotModel& model, const FootGeometry& foot) {
  (void)model;
  const auto c = foot_corners_local(foot);
  ContactSet cs;
  push_point(cs, foot.link, c[0], {0, 1, 2});  // toe-left
  push_point(cs, foot.link, c[1], {0, 2});     // toe-right
  return cs;
}

ContactSet contacts_heel5(const RobotModel& model, const FootGeometry& foot) {
  (void)model;
  const auto c = foot_corners_local(foot);
  ContactSet cs;
  push_point(cs, foot.link, c[2], {0, 1, 2});  // heel-left
  push_point(cs, foot.link, c[3], {0, 2});     // heel-right
  cs.heel_z_rows = {2, 4};
  return cs;
}

ContactSet contacts_oa10(const RobotModel& model, const FootGeometry& trailing,
                         const FootGeometry& leading) {
  ContactSet cs = contacts_toe5(model, trailing);
  const ContactSet heel = contacts_heel5(model, leading);
  const int base = cs.n_c();
  for (const auto& r : heel.rows) cs.rows.push_back(r);
  for (int i : heel.heel_z_rows) cs.heel_z_rows.push_back(base + i);
  return cs;
}

VecX contact_positions(const RobotModel& model, const VecX& q,
                       const ContactSet& contacts) {
  const KinCache kc = fk(model, q);
  VecX p(contacts.n_c());
  for (int i = 0; i < contacts.n_c(); ++i) {
    const ContactRow& r = contacts.rows[i];
    p(i) = point_world(model, kc, r.link, r.local)(r.axis);
  }
  return p;
}

VecX planar_contact_targets(const RobotModel& model, const ContactSet& contacts,
                            const std::vector<FootPlacement>& placements) {
  VecX tg(contacts.n_c());
  for (int i = 0; i < contacts.n_c(); ++i) {
    const ContactRow& r = contacts.rows[i];
    const FootPlacement* pl = nullptr;
    for (const auto& cand : placements)
      if (model.feet.at(cand.foot).link == r.link) pl = &cand;
    if (!pl) throw Error("planar_contact_targets: no placement for link");
    const Scalar c = std::cos(pl->yaw), s = std::sin(pl->yaw);
    const Vec3 w(pl->ankle_xy.x() + c * r.local.x() - s * r.local.y(),
                 pl->ankle_xy.y() + s * r.local.x() + c * r.local.y(),
                 model.feet.at(pl->foot).sole_drop + r.local.z());
    tg(i) = w(r.axis);
  }
  return tg;
}

}  // namespace gptwalk
