#ifndef GPTWALK_TRACE_IO_HPP
#define GPTWALK_TRACE_IO_HPP

#include <string>
#include <vector>

#include "gptwalk/sim.hpp"

namespace gptwalk {

// Trace CSV (schema v1, exact column order): t, domain, q[0..nq-1],
// qd[0..nq-1], u[0..n_a-1], y_norm, ydot_norm, V_F, V_U, V_O, Fc_z_heel,
// Fc_z_total, theta, s. All numbers go through fmt_num, so identical
// traces serialize byte-identically.
void write_trace_csv(const SimTrace& trace, const std::string& file);

// Events CSV (schema v1): t, edge, impulse_norm, guard_residual, KE_pre,
// KE_post.
void write_events_csv(const SimTrace& trace, const std::string& file);

// Reads the serialized columns back; monitor-only channels stay empty.
SimTrace read_trace_csv(const std::string& file);
std::vector<TraceEvent> read_events_csv(const std::string& file);

}  // namespace gptwalk

#endif
