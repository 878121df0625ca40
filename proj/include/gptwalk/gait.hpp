#ifndef GPTWALK_GAIT_HPP
#define GPTWALK_GAIT_HPP

#include <string>
#include <vector>

#include "gptwalk/bezier.hpp"
#include "gptwalk/textio.hpp"
#include "gptwalk/types.hpp"

namespace gptwalk {

// One desired-trajectory table: a Bezier curve whose columns are output
// channels, with labels kept so selector construction can be validated.
struct GaitCurve {
  std::vector<std::string> channels;
  BezierCurve curve;
  int dim() const { return curve.dim(); }
};

struct GaitLibrary {
  std::string name;
  std::string graph;       // "two-domain" or "three-domain"
  Scalar theta_max = 0;    // arc length of one step, m
  Scalar l_s = 0;          // two-domain FA->UA arc-length threshold, m
  Scalar delta_tau_F = 0;  // nominal domain durations, s
  Scalar delta_tau_U = 0;
  Scalar delta_tau_O = 0;
  Scalar design_speed = 0;  // path speed the curves were fitted at, m/s
  Scalar step_length = 0;   // m
  Scalar apex_height = 0;   // swing-foot apex above ground, m
  Scalar base_height = 0;   // nominal z_b, m
  Scalar s_fu = 0;          // phase fraction at FA->UA (three-domain)
  Scalar s_uo = 0;          // phase fraction at UA->OA (three-domain)
  GaitCurve fa;
  GaitCurve ua;  // three-domain: arc-length phase; two-domain: local time
  GaitCurve oa;  // three-domain only
  // Auxiliary plan channels that are not control outputs (three-domain UA
  // support-foot pitch), used to reconstruct nominal states.
  GaitCurve ua_aux;
  // A solved configuration from the fitting process; inverse-kinematics
  // seeds are derived from it by shifting the base pose.
  VecX seed_pose;

  bool three_domain() const { return graph == "three-domain"; }
  void validate() const;
};

// Phase bookkeeping for one walking step.
struct PhaseState {
  Scalar theta = 0;        // arc length traveled this step, m
  Scalar T0 = 0;           // step start time, s
  Scalar T_Uk = 0;         // UA-phase start time, s
  Scalar delta_tau_U = 0;  // UA duration backing the time-based phase, s
};

// theta <- theta + hypot(xdot_b, ydot_b) * dt; returns the new theta.
Scalar phase_update(PhaseState& phase, Scalar xdot_b, Scalar ydot_b,
                    Scalar dt);

// s = theta / theta_max saturated to [0,1]; the rate is ds/dtheta, zero in
// saturation so desired values freeze consistently with their derivatives.
Scalar normalized_phase(Scalar theta, Scalar theta_max);
Scalar normalized_phase_rate(Scalar theta, Scalar theta_max);
// Local time phase (t - T_Uk) / delta_tau_U, saturated; rate is d/dt.
Scalar local_phase(Scalar t, Scalar T_Uk, Scalar delta_tau_U);
Scalar local_phase_rate(Scalar t, Scalar T_Uk, Scalar delta_tau_U);

GaitLibrary parse_gait(const TextNode& root);
GaitLibrary load_gait(const std::string& file);
TextNode gait_to_text(const GaitLibrary& gait);
void save_gait(const std::string& file, const GaitLibrary& gait);

}  // namespace gptwalk

#endif
