#ifndef GPTWALK_SIM_HPP
#define GPTWALK_SIM_HPP

#include <string>
#include <vector>

#include "gptwalk/control.hpp"
#include "gptwalk/domains.hpp"
#include "gptwalk/gait.hpp"
#include "gptwalk/lyapunov.hpp"
#include "gptwalk/model.hpp"
#include "gptwalk/path.hpp"
#include "gptwalk/types.hpp"

namespace gptwalk {

struct SimConfig {
  Scalar rtol = 1e-8;
  Scalar atol = 1e-10;
  Scalar hmax = 1e-2;
  Scalar event_tol = 1e-10;     // |guard| at the localized event
  Scalar horizon = 10.0;        // s
  Scalar sample_rate = 1000.0;  // Hz
  Scalar min_dwell = 1e-6;      // s
  Scalar guard_scan_dt = 1e-3;  // s, guard sign-change scan resolution
  Scalar drift_tol = 1e-6;      // contact position drift bound
  Scalar zoh_rate = 0;          // Hz; 0 keeps the control law continuous
};

struct TraceSample {
  Scalar t = 0;
  int domain = 0;
  VecX q, qd, u;
  Scalar y_norm = 0, ydot_norm = 0;
  Scalar V_F = 0, V_U = 0, V_O = 0;
  Scalar Fc_z_heel = 0, Fc_z_total = 0;
  Scalar theta = 0, s = 0;
  // Monitor-only channels, not serialized.
  VecX y, ydot, x_eta;
  Scalar V_xi = 0;
  Scalar T0 = 0, T_Uk = 0, delta_tau_U = 0;
};

struct TraceEvent {
  Scalar t = 0;
  std::string edge;  // e.g. "FA->UA"
  Scalar impulse_norm = 0;
  Scalar guard_residual = 0;
  Scalar KE_pre = 0, KE_post = 0;
  // Monitor-only channels, not serialized.
  int from = 0, to = 0;
  Scalar guard_slope = 0;  // d(guard)/dt at the event, finite-differenced
};

struct SimTrace {
  std::vector<TraceSample> samples;
  std::vector<TraceEvent> events;
  std::vector<std::string> domain_names;
  int nq = 0;   // generalized coordinates
  int n_a = 0;  // actuator count (torque columns)
};

// Everything a closed-loop run needs, resolved to in-memory objects.
struct SimSetup {
  const RobotModel* model = nullptr;
  const GaitGraph* graph = nullptr;
  const GaitLibrary* gait = nullptr;
  const GlobalPathSpec* path = nullptr;
  std::vector<PDGains> gains;  // one entry per graph domain
  bool use_qp = false;
  TorqueLimits limits;
  Scalar qp_p = 1e7;
  const LyapunovCertificate* cert = nullptr;  // optional, for V columns
  SimConfig config;
  VecX z0;  // [q, qdot, theta]
  Scalar t0 = 0;
};

struct PhaseOutcome {
  bool event = false;  // false when the horizon ended the phase
  Scalar T_switch = 0;
  GeneralizedState pre_state;
  Scalar theta_pre = 0;
  Scalar guard_residual = 0;
  Scalar guard_slope = 0;
};

// Projects q back onto the frozen contact manifold (Gauss-Newton, least
// squares in dq) and removes the constraint-space component of qdot. Throws
// SimulationError when the residual exceeds drift_tol after projection.
GeneralizedState constraint_stabilize(const RobotModel& model,
                                      const GeneralizedState& state,
                                      const ContactSet& contacts,
                                      const VecX& contact_targets,
                                      Scalar drift_tol = 1e-6);

// Integrates one domain until its guard crosses zero or t_horizon is hit.
// Appends fixed-rate samples (and the pre-event sample) to trace when given.
PhaseOutcome integrate_phase(const SimSetup& setup, int domain_index,
                             const PhaseState& phase, Scalar t_start,
                             const GeneralizedState& state0, Scalar t_horizon,
                             SimTrace* trace, long* sample_index);

// Runs the full hybrid closed loop from setup.z0 over config.horizon.
SimTrace simulate(const SimSetup& setup);

}  // namespace gptwalk

#endif
