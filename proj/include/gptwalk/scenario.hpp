#ifndef GPTWALK_SCENARIO_HPP
#define GPTWALK_SCENARIO_HPP

#include <string>

#include "gptwalk/sim.hpp"
#include "gptwalk/textio.hpp"

namespace gptwalk {

struct ControllerConfig {
  std::string type = "io-pd";  // "io-pd" or "io-qp"
  Scalar kp = 225, kd = 50;    // uniform output gains
  Scalar p = 1e7;              // QP relaxation weight
  Scalar torque_limit = 4.1;   // symmetric box, N*m
  Scalar zoh_rate = 0;         // Hz; 0 keeps the control law continuous
};

// Initial tracking-error norms, realized along documented directions:
// the swing-foot offset along the vehicle-frame x axis, the base offset
// along the path tangent, and the heading error subtracted from the
// desired yaw.
struct InitialErrorSpec {
  Scalar swing_pct = 0;    // percent of step length
  Scalar heading_deg = 0;  // degrees
  Scalar base_pct = 0;     // percent of step length
};

struct Scenario {
  std::string name;
  std::string model_file;
  std::string graph;  // gait graph name
  std::string gait_file;
  std::string path;  // preset name (gp1/gp2/gp3) or a file path
  ControllerConfig controller;
  InitialErrorSpec error;
  SimConfig config;
  std::string out_dir;
};

Scenario parse_scenario(const TextNode& root);
Scenario load_scenario(const std::string& file);
TextNode scenario_to_text(const Scenario& sc);
void save_scenario(const Scenario& sc, const std::string& file);

// Bundled data directory: $GPTWALK_DATA_DIR when set, else the path baked
// in at build time, else "data".
std::string data_dir();

// Table-derived presets on the bundled model, gaits, and paths:
// case-a (straight line, two-domain), case-b (diagonal line, two-domain,
// 17 deg heading error), case-c (line-arc-line course, three-domain).
Scenario scenario_preset(const std::string& name);

// Scenario with every referenced asset loaded, validated, and wired up.
struct ScenarioRuntime {
  Scenario scenario;
  RobotModel model;
  GaitGraph graph;
  GaitLibrary gait;
  GlobalPathSpec path;
  LyapunovCertificate cert;
};

ScenarioRuntime prepare(const Scenario& sc);

// Simulation inputs bound to the runtime (which must outlive the setup).
SimSetup make_setup(const ScenarioRuntime& rt);

// [q, qdot, theta] at t = 0 realizing the scenario's initial error spec:
// perturbed-target inverse kinematics plus a zero-error-rate velocity
// solve at the perturbed pose.
VecX initial_state(const ScenarioRuntime& rt);

SimTrace run_scenario(const Scenario& sc);

}  // namespace gptwalk

#endif
