#ifndef GPTWALK_MONITOR_HPP
#define GPTWALK_MONITOR_HPP

#include <string>
#include <vector>

#include "gptwalk/sim.hpp"

namespace gptwalk {

// Decay fit of one continuous phase: least squares on log V vs t over the
// interior samples (5% trimmed at each end).
struct PhaseFit {
  int domain = 0;
  std::string name;
  Scalar t_begin = 0, t_end = 0;
  Scalar tau_planned = 0;  // nominal duration, 0 when unknown
  Scalar rate = 0;         // fitted decay rate of the active V
  Scalar c3 = 0;           // certified lower decay bound
  Scalar v_max = 0;
  bool skipped = false;    // V below the noise floor, fit meaningless
  bool decays = false;
  bool vdot_ok = false;    // Vdot <= -c3 V on interior samples (FA/OA)
};

// One domain entry with the Lyapunov bookkeeping around it.
struct SwitchRecord {
  Scalar t = 0;
  int domain = 0;  // domain being entered
  std::string edge;
  Scalar V_in = 0;        // active V at the entry sample
  Scalar guard_slope = 0;  // exit-guard time slope of the producing event
  bool first_cycle = false;
};

// Underactuated-phase bound: V_U(exit) <= 2 V_U(entry) + intercept.
struct UaBound {
  Scalar t_entry = 0, t_exit = 0;
  Scalar v_entry = 0, v_exit = 0;
  Scalar bound = 0;
  bool ok = false;
};

// Reset-compatibility offset of one graph edge: the output error committed
// by the reset when leaving from the zero-error exit state at the planned
// switching time.
struct ResetOffset {
  std::string edge;
  Scalar t = 0;
  Scalar offset = 0;  // ||(y+, ydot+)|| in the target domain's outputs
  bool ok = false;
};

struct MonitorReport {
  std::vector<PhaseFit> fits;          // C1 material
  std::vector<UaBound> ua_bounds;      // C2 material
  std::vector<SwitchRecord> switches;  // C3 material
  std::vector<ResetOffset> resets;     // B2 estimates
  Scalar khat_f = 0;    // max ||xdot_eta|| over UA samples
  Scalar eps_hat_U = 0; // max relative UA duration deviation
  bool c1_ok = false, c2_ok = false, c3_ok = false, b2_ok = true;
  bool ok = false;
  std::vector<std::string> notes;
};

// Optional plan context; enables planned durations and the B2 offsets.
struct MonitorContext {
  const RobotModel* model = nullptr;
  const GaitGraph* graph = nullptr;
  const GaitLibrary* gait = nullptr;
  const GlobalPathSpec* path = nullptr;
  Scalar t0 = 0;
  Scalar b2_threshold = 1e-2;
};

MonitorReport monitor_trace(const SimTrace& trace,
                            const LyapunovCertificate& cert,
                            Scalar tol = 1e-9,
                            const MonitorContext* ctx = nullptr);

std::string format_report(const MonitorReport& report);

// Writes <prefix>.txt plus <prefix>_phases.csv (one row per phase) and
// <prefix>_switches.csv (one row per switch-in).
void save_report(const MonitorReport& report, const std::string& prefix);

// Reset offsets of every graph edge over one planned step starting at t0.
std::vector<ResetOffset> b2_offsets(const RobotModel& model,
                                    const GaitGraph& graph,
                                    const GaitLibrary& gait,
                                    const GlobalPathSpec& path, Scalar t0,
                                    Scalar threshold = 1e-2);

}  // namespace gptwalk

#endif
