#include "gptwalk/gait.hpp"

#include <cmath>

namespace gptwalk {

void GaitLibrary::validate() const {
  if (graph != "two-domain" && graph != "three-domain")
    throw ParseError("gait '" + name + "': unknown graph '" + graph + "'");
  if (!(theta_max > 0)) throw ParseError("gait: theta_max must be positive");
  if (!(delta_tau_F > 0) || !(delta_tau_U > 0))
    throw ParseError("gait: domain durations must be positive");
  if (fa.dim() <= 0 || ua.dim() <= 0)
    throw ParseError("gait: fa and ua curves required");
  if (three_domain()) {
    if (!(delta_tau_O > 0))
      throw ParseError("gait: delta_tau_O must be positive");
    if (oa.dim() <= 0) throw ParseError("gait: oa curve required");
    if (!(s_fu > 0 && s_fu < s_uo && s_uo < 1))
      throw ParseError("gait: need 0 < s_fu < s_uo < 1");
  } else {
    if (!(l_s > 0 && l_s < theta_max))
      throw ParseError("gait: need 0 < l_s < theta_max");
  }
  for (const GaitCurve* c : {&fa, &ua, &oa, &ua_aux}) {
    if (c->curve.coef.size() == 0) continue;
    if (static_cast<int>(c->channels.size()) != c->dim())
      throw ParseError("gait: channel label count mismatch");
    bezier_eval(c->curve, 0.5);  // rejects order < 1 / non-finite
  }
}

Scalar phase_update(PhaseState& phase, Scalar xdot_b, Scalar ydot_b,
                    Scalar dt) {
  phase.theta += std::hypot(xdot_b, ydot_b) * dt;
  return phase.theta;
}

Scalar normalized_phase(Scalar theta, Scalar theta_max) {
  if (!(theta_max > 0)) throw Error("normalized_phase: theta_max <= 0");
  const Scalar s = theta / theta_max;
  return s < 0 ? 0 : (s > 1 ? 1 : s);
}

Scalar normalized_phase_rate(Scalar theta, Scalar theta_max) {
  if (!(theta_max > 0)) throw Error("normalized_phase: theta_max <= 0");
  const Scalar s = theta / theta_max;
  return (s < 0 || s > 1) ? 0 : 1.0 / theta_max;
}

Scalar local_phase(Scalar t, Scalar T_Uk, Scalar delta_tau_U) {
  if (!(delta_tau_U > 0)) throw Error("local_phase: delta_tau_U <= 0");
  const Scalar s = (t - T_Uk) / delta_tau_U;
  return s < 0 ? 0 : (s > 1 ? 1 : s);
}

Scalar local_phase_rate(Scalar t, Scalar T_Uk, Scalar delta_tau_U) {
  if (!(delta_tau_U > 0)) throw Error("local_phase: delta_tau_U <= 0");
  const Scalar s = (t - T_Uk) / delta_tau_U;
  return (s < 0 || s > 1) ? 0 : 1.0 / delta_tau_U;
}

namespace {

GaitCurve parse_curve(const TextNode& node) {
  GaitCurve c;
  const int order = static_cast<int>(node.get_num("order"));
  if (order < 1) throw ParseError("gait curve: order must be >= 1");
  const auto rows = node.all("row");
  if (rows.empty()) throw ParseError("gait curve: no rows");
  c.curve.coef.resize(order + 1, static_cast<int>(rows.size()));
  int j = 0;
  for (const TextNode* r : rows) {
    c.channels.push_back(r->str(0));
    if (static_cast<int>(r->args.size()) != order + 2)
      throw ParseError("gait curve row '" + r->str(0) + "': expected " +
                       std::to_string(order + 1) + " coefficients");
    for (int i = 0; i <= order; ++i) c.curve.coef(i, j) = r->num(i + 1);
    ++j;
  }
  return c;
}

TextNode curve_to_text(const std::string& which, const GaitCurve& c) {
  TextNode node;
  node.key = "curve";
  node.args = {which};
  TextNode ord;
  ord.key = "order";
  ord.args = {std::to_string(c.curve.order())};
  node.children.push_back(ord);
  for (int j = 0; j < c.dim(); ++j) {
    TextNode r;
    r.key = "row";
    r.args.push_back(c.channels[j]);
    for (int i = 0; i <= c.curve.order(); ++i)
      r.args.push_back(fmt_num(c.curve.coef(i, j)));
    node.children.push_back(r);
  }
  return node;
}

}  // namespace

GaitLibrary parse_gait(const TextNode& root) {
  GaitLibrary g;
  g.name = root.get_str("name", "gait");
  g.graph = root.get_str("graph");
  g.theta_max = root.get_num("theta_max");
  g.l_s = root.get_num("l_s", 0.0);
  g.delta_tau_F = root.get_num("delta_tau_F");
  g.delta_tau_U = root.get_num("delta_tau_U");
  g.delta_tau_O = root.get_num("delta_tau_O", 0.0);
  g.design_speed = root.get_num("design_speed", 0.0);
  g.step_length = root.get_num("step_length", g.theta_max);
  g.apex_height = root.get_num("apex_height", 0.0);
  g.base_height = root.get_num("base_height", 0.0);
  g.s_fu = root.get_num("s_fu", 0.0);
  g.s_uo = root.get_num("s_uo", 0.0);
  for (const TextNode* cn : root.all("curve")) {
    const std::string which = cn->str(0);
    if (which == "fa")
      g.fa = parse_curve(*cn);
    else if (which == "ua")
      g.ua = parse_curve(*cn);
    else if (which == "oa")
      g.oa = parse_curve(*cn);
    else if (which == "ua_aux")
      g.ua_aux = parse_curve(*cn);
    else
      throw ParseError("gait: unknown curve '" + which + "'");
  }
  if (const TextNode* sd = root.find("seed")) g.seed_pose = sd->vec();
  g.validate();
  return g;
}

GaitLibrary load_gait(const std::string& file) {
  return parse_gait(load_text_file(file));
}

TextNode gait_to_text(const GaitLibrary& gait) {
  TextNode root;
  root.key = "gait";
  auto add = [&root](const std::string& k, const std::string& v) {
    TextNode c;
    c.key = k;
    c.args = {v};
    root.children.push_back(c);
  };
  add("name", gait.name);
  add("graph", gait.graph);
  add("theta_max", fmt_num(gait.theta_max));
  if (!gait.three_domain()) add("l_s", fmt_num(gait.l_s));
  add("delta_tau_F", fmt_num(gait.delta_tau_F));
  add("delta_tau_U", fmt_num(gait.delta_tau_U));
  if (gait.three_domain()) add("delta_tau_O", fmt_num(gait.delta_tau_O));
  add("design_speed", fmt_num(gait.design_speed));
  add("step_length", fmt_num(gait.step_length));
  add("apex_height", fmt_num(gait.apex_height));
  add("base_height", fmt_num(gait.base_height));
  if (gait.three_domain()) {
    add("s_fu", fmt_num(gait.s_fu));
    add("s_uo", fmt_num(gait.s_uo));
  }
  if (gait.seed_pose.size() > 0) {
    TextNode sd;
    sd.key = "seed";
    for (int i = 0; i < gait.seed_pose.size(); ++i)
      sd.args.push_back(fmt_num(gait.seed_pose(i)));
    root.children.push_back(sd);
  }
  root.children.push_back(curve_to_text("fa", gait.fa));
  root.children.push_back(curve_to_text("ua", gait.ua));
  if (gait.three_domain())
    root.children.push_back(curve_to_text("oa", gait.oa));
  if (gait.ua_aux.curve.coef.size() > 0)
    root.children.push_back(curve_to_text("ua_aux", gait.ua_aux));
  return root;
}

void save_gait(const std::string& file, const GaitLibrary& gait) {
  save_text_file(file, gait_to_text(gait));
}

}  // namespace gptwalk
