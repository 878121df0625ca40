#include "gptwalk/model.hpp"

#include <Eigen/Eigenvalues>

namespace gptwalk {

int RobotModel::link_index(const std::string& nm) const {
  for (size_t i = 0; i < links.size(); ++i)
    if (links[i].name == nm) return static_cast<int>(i);
  throw ParseError("model '" + name + "': unknown link '" + nm + "'");
}

GeneralizedState RobotModel::relabel(const GeneralizedState& s) const {
  if (mirror.empty())
    throw Error("model '" + name + "' declares no mirror map");
  GeneralizedState r = s;
  for (const auto& m : mirror) {
    r.q(m.qa) = m.sign * s.q(m.qb);
    r.q(m.qb) = m.sign * s.q(m.qa);
    r.qdot(m.qa) = m.sign * s.qdot(m.qb);
    r.qdot(m.qb) = m.sign * s.qdot(m.qa);
  }
  return r;
}

void RobotModel::validate() const {
  if (links.empty()) throw ParseError("model has no links");
  if (n_a > n) throw ParseError("model: n_a exceeds n");
  int roots = 0;
  for (size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    if (l.parent < 0) {
      ++roots;
    } else if (l.parent >= static_cast<int>(i)) {
      throw ParseError("model: link '" + l.name +
                       "' must appear after its parent");
    }
    if (!(l.mass > 0)) throw ParseError("model: link '" + l.name +
                                        "' mass must be positive");
    if ((l.inertia - l.inertia.transpose()).norm() > 1e-12)
      throw ParseError("model: link '" + l.name + "' inertia not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia);
    if (es.eigenvalues().minCoeff() <= 0)
      throw ParseError("model: link '" + l.name + "' inertia not SPD");
  }
  if (roots != 1) throw ParseError("model: exactly one base link required");
  for (const auto& f : feet) {
    if (f.link < 0) throw ParseError("model: foot references unknown link");
    if (f.toe <= 0 || f.heel <= 0 || f.half_width <= 0)
      throw ParseError("model: foot '" + f.name +
                       "' needs positive toe/heel/half_width");
  }
}

static Vec3 parse_vec3(const TextNode& n) {
  if (n.args.size() != 3)
    throw ParseError("line " + std::to_string(n.line) + ": '" + n.key +
                     "' needs 3 values");
  return Vec3(n.num(0), n.num(1), n.num(2));
}

static Mat3 parse_inertia(const TextNode& n) {
  // ixx iyy izz [ixy ixz iyz]
  if (n.args.size() != 3 && n.args.size() != 6)
    throw ParseError("line " + std::to_string(n.line) +
                     ": 'inertia' needs 3 or 6 values");
  Mat3 I = Mat3::Zero();
  I(0, 0) = n.num(0);
  I(1, 1) = n.num(1);
  I(2, 2) = n.num(2);
  if (n.args.size() == 6) {
    I(0, 1) = I(1, 0) = n.num(3);
    I(0, 2) = I(2, 0) = n.num(4);
    I(1, 2) = I(2, 1) = n.num(5);
  }
  return I;
}

RobotModel parse_model(const TextNode& root) {
  RobotModel m;
  m.name = root.get_str("name", "unnamed");
  m.gravity = root.get_num("gravity", 9.81);

  for (const TextNode* ln : root.all("link")) {
    Link l;
    l.name = ln->str();
    if (ln->has("parent")) l.parent = m.link_index(ln->get_str("parent"));
    l.mass = ln->get_num("mass");
    l.com = parse_vec3(ln->child("com"));
    l.inertia = parse_inertia(ln->child("inertia"));
    if (l.parent >= 0) {
      l.joint_origin = parse_vec3(ln->child("origin"));
      l.joint_axis = parse_vec3(ln->child("axis")).normalized();
      l.actuated = ln->get_str("actuated", "true") == "true";
      l.upper = ln->get_str("upper", "false") == "true";
    }
    m.links.push_back(l);
  }

  // Base dofs: translations x,y,z then rotations z,y,x; q stores Euler
  // angles as (phi, theta, psi) so the rotation chain maps to q 5,4,3.
  int base = -1;
  for (size_t i = 0; i < m.links.size(); ++i)
    if (m.links[i].parent < 0) base = static_cast<int>(i);
  if (base < 0) throw ParseError("model: no base link");
  m.base_link = base;
  const int trans_q[3] = {0, 1, 2};
  const int rot_q[3] = {5, 4, 3};
  const Vec3 axes[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (int i = 0; i < 3; ++i) {
    Dof d;
    d.pred = static_cast<int>(m.dofs.size()) - 1;
    d.revolute = false;
    d.axis = axes[i];
    d.q_index = trans_q[i];
    d.driven_link = base;
    m.dofs.push_back(d);
  }
  for (int i = 0; i < 3; ++i) {
    Dof d;
    d.pred = static_cast<int>(m.dofs.size()) - 1;
    d.revolute = true;
    d.axis = axes[2 - i];  // z, y, x
    d.q_index = rot_q[i];
    d.driven_link = base;
    if (i == 2) d.link = base;
    m.dofs.push_back(d);
  }
  m.links[base].dof = 5;

  int next_q = 6;
  for (size_t i = 0; i < m.links.size(); ++i) {
    Link& l = m.links[i];
    if (l.parent < 0) continue;
    Dof d;
    d.pred = m.links[l.parent].dof;
    if (d.pred < 0)
      throw ParseError("model: link '" + l.name +
                       "' must appear after its parent");
    d.revolute = true;
    d.axis = l.joint_axis;
    d.origin = l.joint_origin;
    d.q_index = next_q;
    d.link = static_cast<int>(i);
    d.driven_link = static_cast<int>(i);
    l.dof = static_cast<int>(m.dofs.size());
    l.q_index = next_q;
    m.dofs.push_back(d);
    ++next_q;
    ++m.n;
    if (l.actuated) ++m.n_a;
    if (l.upper) m.upper_q.push_back(l.q_index);
  }

  for (const TextNode* fn : root.all("foot")) {
    FootGeometry f;
    f.name = fn->str();
    f.link = m.link_index(f.name);
    f.toe = fn->get_num("toe");
    f.heel = fn->get_num("heel");
    f.half_width = fn->get_num("half_width");
    f.sole_drop = fn->get_num("sole_drop");
    m.feet.push_back(f);
  }

  if (const TextNode* mir = root.find("mirror")) {
    for (const TextNode* sw : mir->all("swap")) {
      MirrorPair p;
      p.qa = m.links[m.link_index(sw->str(0))].q_index;
      p.qb = m.links[m.link_index(sw->str(1))].q_index;
      p.sign = sw->args.size() > 2 ? sw->num(2) : 1.0;
      if (p.qa < 6 || p.qb < 6)
        throw ParseError("model: mirror map may only swap joints");
      m.mirror.push_back(p);
    }
  }

  m.validate();
  return m;
}

RobotModel load_model(const std::string& path) {
  return parse_model(load_text_file(path));
}

}  // namespace gptwalk
