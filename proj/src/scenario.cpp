#include "gptwalk/scenario.hpp"

#include <cmath>
#include <cstdlib>

#include "gptwalk/bezier.hpp"
#include "gptwalk/outputs.hpp"

namespace gptwalk {

namespace {

TextNode entry(const std::string& k, const std::string& v) {
  TextNode t;
  t.key = k;
  t.args = {v};
  return t;
}

TextNode entry(const std::string& k, Scalar v) { return entry(k, fmt_num(v)); }

}  // namespace

Scenario parse_scenario(const TextNode& root) {
  const TextNode& n = root.key == "scenario" ? root : root.child("scenario");
  Scenario sc;
  sc.name = n.get_str("name", "");
  sc.model_file = n.get_str("model");
  sc.graph = n.get_str("graph");
  sc.gait_file = n.get_str("gait");
  sc.path = n.get_str("path");
  sc.out_dir = n.get_str("out", "");
  if (const TextNode* c = n.find("controller")) {
    sc.controller.type = c->get_str("type", "io-pd");
    if (sc.controller.type != "io-pd" && sc.controller.type != "io-qp")
      throw ParseError("scenario: unknown controller type '" +
                       sc.controller.type + "'");
    sc.controller.kp = c->get_num("kp", 225);
    sc.controller.kd = c->get_num("kd", 50);
    sc.controller.p = c->get_num("p", 1e7);
    sc.controller.torque_limit = c->get_num("torque_limit", 4.1);
    sc.controller.zoh_rate = c->get_num("zoh_rate", 0);
  }
  if (const TextNode* e = n.find("initial_error")) {
    sc.error.swing_pct = e->get_num("swing_pct", 0);
    sc.error.heading_deg = e->get_num("heading_deg", 0);
    sc.error.base_pct = e->get_num("base_pct", 0);
  }
  if (const TextNode* s = n.find("sim")) {
    const SimConfig d;
    sc.config.rtol = s->get_num("rtol", d.rtol);
    sc.config.atol = s->get_num("atol", d.atol);
    sc.config.hmax = s->get_num("hmax", d.hmax);
    sc.config.event_tol = s->get_num("event_tol", d.event_tol);
    sc.config.horizon = s->get_num("horizon", d.horizon);
    sc.config.sample_rate = s->get_num("sample_rate", d.sample_rate);
    sc.config.min_dwell = s->get_num("min_dwell", d.min_dwell);
    sc.config.guard_scan_dt = s->get_num("guard_scan_dt", d.guard_scan_dt);
    sc.config.drift_tol = s->get_num("drift_tol", d.drift_tol);
  }
  return sc;
}

Scenario load_scenario(const std::string& file) {
  return parse_scenario(load_text_file(file));
}

TextNode scenario_to_text(const Scenario& sc) {
  TextNode root;
  root.key = "scenario";
  if (!sc.name.empty()) root.children.push_back(entry("name", sc.name));
  root.children.push_back(entry("model", sc.model_file));
  root.children.push_back(entry("graph", sc.graph));
  root.children.push_back(entry("gait", sc.gait_file));
  root.children.push_back(entry("path", sc.path));
  if (!sc.out_dir.empty()) root.children.push_back(entry("out", sc.out_dir));
  TextNode c;
  c.key = "controller";
  c.children.push_back(entry("type", sc.controller.type));
  c.children.push_back(entry("kp", sc.controller.kp));
  c.children.push_back(entry("kd", sc.controller.kd));
  c.children.push_back(entry("p", sc.controller.p));
  c.children.push_back(entry("torque_limit", sc.controller.torque_limit));
  c.children.push_back(entry("zoh_rate", sc.controller.zoh_rate));
  root.children.push_back(c);
  TextNode e;
  e.key = "initial_error";
  e.children.push_back(entry("swing_pct", sc.error.swing_pct));
  e.children.push_back(entry("heading_deg", sc.error.heading_deg));
  e.children.push_back(entry("base_pct", sc.error.base_pct));
  root.children.push_back(e);
  TextNode s;
  s.key = "sim";
  s.children.push_back(entry("rtol", sc.config.rtol));
  s.children.push_back(entry("atol", sc.config.atol));
  s.children.push_back(entry("hmax", sc.config.hmax));
  s.children.push_back(entry("event_tol", sc.config.event_tol));
  s.children.push_back(entry("horizon", sc.config.horizon));
  s.children.push_back(entry("sample_rate", sc.config.sample_rate));
  s.children.push_back(entry("min_dwell", sc.config.min_dwell));
  s.children.push_back(entry("guard_scan_dt", sc.config.guard_scan_dt));
  s.children.push_back(entry("drift_tol", sc.config.drift_tol));
  root.children.push_back(s);
  return root;
}

void save_scenario(const Scenario& sc, const std::string& file) {
  save_text_file(file, scenario_to_text(sc));
}

std::string data_dir() {
  if (const char* d = std::getenv("GPTWALK_DATA_DIR")) return d;
#ifdef GPTWALK_DATA_DIR
  return GPTWALK_DATA_DIR;
#else
  return "data";
#endif
}

Scenario scenario_preset(const std::string& name) {
  const std::string d = data_dir();
  Scenario sc;
  sc.name = name;
  sc.model_file = d + "/models/mini3d.txt";
  if (name == "case-a") {
    sc.graph = "two-domain";
    sc.gait_file = d + "/gaits/two_domain.txt";
    sc.path = "gp1";
    sc.error = {27.5, 0.0, 15.0};
    sc.config.horizon = 8.9;
  } else if (name == "case-b") {
    sc.graph = "two-domain";
    sc.gait_file = d + "/gaits/two_domain.txt";
    sc.path = "gp2";
    sc.error = {27.5, 17.0, 15.0};
    sc.config.horizon = 3.6;
  } else if (name == "case-c") {
    sc.graph = "three-domain";
    sc.gait_file = d + "/gaits/three_domain.txt";
    sc.path = "gp3";
    sc.error = {40.0, 12.0, 8.0};
    sc.config.horizon = 2.84;
  } else {
    throw Error("unknown scenario preset '" + name + "'");
  }
  return sc;
}

ScenarioRuntime prepare(const Scenario& sc) {
  ScenarioRuntime rt;
  rt.scenario = sc;
  rt.model = load_model(sc.model_file);
  rt.model.validate();
  rt.graph = make_gait_graph(sc.graph, rt.model);
  rt.gait = load_gait(sc.gait_file);
  rt.gait.validate();
  if (rt.gait.graph != sc.graph)
    throw Error("gait library '" + rt.gait.name + "' fits graph '" +
                rt.gait.graph + "' but the scenario uses '" + sc.graph + "'");
  rt.path = (sc.path == "gp1" || sc.path == "gp2" || sc.path == "gp3")
                ? path_preset(sc.path)
                : load_path(sc.path);
  auto cert_for = [&](int dim) {
    return build_domain_cert(VecX::Constant(dim, sc.controller.kp),
                             VecX::Constant(dim, sc.controller.kd));
  };
  rt.cert.F = cert_for(output_dim(rt.model, rt.graph.at(0).output));
  rt.cert.Xi = cert_for(output_dim(rt.model, rt.graph.at(1).output));
  if (rt.graph.size() > 2) {
    rt.cert.O = cert_for(output_dim(rt.model, rt.graph.at(2).output));
    rt.cert.has_O = true;
  }
  rt.cert.beta = 0.001;
  return rt;
}

SimSetup make_setup(const ScenarioRuntime& rt) {
  SimSetup s;
  s.model = &rt.model;
  s.graph = &rt.graph;
  s.gait = &rt.gait;
  s.path = &rt.path;
  for (int i = 0; i < rt.graph.size(); ++i) {
    const int dim = output_dim(rt.model, rt.graph.at(i).output);
    s.gains.push_back(PDGains::uniform(dim, rt.scenario.controller.kp,
                                       rt.scenario.controller.kd));
  }
  s.use_qp = rt.scenario.controller.type == "io-qp";
  s.limits =
      TorqueLimits::box(rt.model.n_a, rt.scenario.controller.torque_limit);
  s.qp_p = rt.scenario.controller.p;
  s.cert = &rt.cert;
  s.config = rt.scenario.config;
  s.config.zoh_rate = rt.scenario.controller.zoh_rate;
  s.z0 = initial_state(rt);
  s.t0 = 0;
  return s;
}

VecX initial_state(const ScenarioRuntime& rt) {
  const RobotModel& m = rt.model;
  const GaitLibrary& gait = rt.gait;
  const Scalar L = gait.step_length > 0 ? gait.step_length : gait.theta_max;
  const GpPoint g0 = desired_gp(rt.path, 0);

  // Footprints: support ankle under the base at mid-step, landing spot one
  // step further along the path.
  const Scalar t1 = path_time_at_arc_length(rt.path, 0, 0.5 * gait.theta_max);
  const Scalar t2 = path_time_at_arc_length(rt.path, 0, 1.5 * gait.theta_max);
  const GpPoint gm1 = desired_gp(rt.path, t1);
  const GpPoint gm2 = desired_gp(rt.path, t2);
  const std::vector<FootPlacement> placements{
      {0, Vec2(gm1.x, gm1.y), gm1.psi}, {1, Vec2(gm2.x, gm2.y), gm2.psi}};

  const DomainSpec& fa = rt.graph.at(0);
  PoseSpec spec;
  spec.kind = fa.output;
  spec.contacts = &fa.contacts;
  spec.contact_targets = planar_contact_targets(m, fa.contacts, placements);
  VecX st = bezier_eval(gait.fa.curve, 0.0).value;
  const InitialErrorSpec& err = rt.scenario.error;
  if (err.swing_pct != 0) {
    const auto labels = state_row_labels(m, fa.output);
    int idx = -1;
    for (size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == "psw_x") idx = static_cast<int>(i);
    if (idx < 0) throw Error("initial_state: no swing-foot channel");
    st[idx] += 0.01 * err.swing_pct * L;
  }
  spec.state_targets = st;
  const Scalar psi_b = g0.psi - err.heading_deg * M_PI / 180.0;
  const Scalar shift = 0.01 * err.base_pct * L;
  spec.gp = Vec3(g0.x + shift * std::cos(g0.psi),
                 g0.y + shift * std::sin(g0.psi), psi_b);

  VecX qg = gait.seed_pose;
  if (qg.size() != m.nq())
    throw Error("initial_state: gait library lacks a seed pose");
  qg[0] = spec.gp.x();
  qg[1] = spec.gp.y();
  qg[5] = psi_b;
  const VecX q = solve_pose(m, spec, qg);

  PhaseState ph;
  ph.theta = 0;
  ph.T0 = 0;
  ph.T_Uk = 0;
  ph.delta_tau_U = gait.delta_tau_U;
  const VecX qd = solve_zero_error_rates(m, fa, 0.0, q, ph, gait, rt.path);

  VecX z0(2 * m.nq() + 1);
  z0 << q, qd, 0.0;
  return z0;
}

SimTrace run_scenario(const Scenario& sc) {
  const ScenarioRuntime rt = prepare(sc);
  const SimSetup setup = make_setup(rt);
  return simulate(setup);
}

}  // namespace gptwalk
