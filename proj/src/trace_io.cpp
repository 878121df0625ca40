#include "gptwalk/trace_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gptwalk {

namespace {

constexpr const char* kTraceHeader = "# gptwalk trace v1";
constexpr const char* kEventsHeader = "# gptwalk events v1";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

Scalar to_num(const std::string& s, const std::string& file, int line) {
  char* end = nullptr;
  const Scalar v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError(file + ":" + std::to_string(line) + ": bad number '" +
                     s + "'");
  return v;
}

std::string strip_cr(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
  return s;
}

}  // namespace

void write_trace_csv(const SimTrace& trace, const std::string& file) {
  std::ofstream f(file);
  if (!f) throw Error("cannot write " + file);
  f << kTraceHeader << "\n";
  f << "t,domain";
  for (int i = 0; i < trace.nq; ++i) f << ",q" << i;
  for (int i = 0; i < trace.nq; ++i) f << ",qd" << i;
  for (int i = 0; i < trace.n_a; ++i) f << ",u" << i;
  f << ",y_norm,ydot_norm,V_F,V_U,V_O,Fc_z_heel,Fc_z_total,theta,s\n";
  for (const auto& s : trace.samples) {
    if (s.q.size() != trace.nq || s.qd.size() != trace.nq ||
        s.u.size() != trace.n_a)
      throw Error("write_trace_csv: sample width mismatch");
    f << fmt_num(s.t) << ','
      << (s.domain < static_cast<int>(trace.domain_names.size())
              ? trace.domain_names[s.domain]
              : "D" + std::to_string(s.domain));
    for (int i = 0; i < trace.nq; ++i) f << ',' << fmt_num(s.q[i]);
    for (int i = 0; i < trace.nq; ++i) f << ',' << fmt_num(s.qd[i]);
    for (int i = 0; i < trace.n_a; ++i) f << ',' << fmt_num(s.u[i]);
    f << ',' << fmt_num(s.y_norm) << ',' << fmt_num(s.ydot_norm) << ','
      << fmt_num(s.V_F) << ',' << fmt_num(s.V_U) << ',' << fmt_num(s.V_O)
      << ',' << fmt_num(s.Fc_z_heel) << ',' << fmt_num(s.Fc_z_total) << ','
      << fmt_num(s.theta) << ',' << fmt_num(s.s) << '\n';
  }
}

void write_events_csv(const SimTrace& trace, const std::string& file) {
  std::ofstream f(file);
  if (!f) throw Error("cannot write " + file);
  f << kEventsHeader << "\n";
  f << "t,edge,impulse_norm,guard_residual,KE_pre,KE_post\n";
  for (const auto& e : trace.events)
    f << fmt_num(e.t) << ',' << e.edge << ',' << fmt_num(e.impulse_norm)
      << ',' << fmt_num(e.guard_residual) << ',' << fmt_num(e.KE_pre) << ','
      << fmt_num(e.KE_post) << '\n';
}

SimTrace read_trace_csv(const std::string& file) {
  std::ifstream f(file);
  if (!f) throw ParseError("cannot read " + file);
  std::string line;
  int ln = 0;
  if (!std::getline(f, line) || strip_cr(line) != kTraceHeader)
    throw ParseError(file + ": missing trace schema header");
  ++ln;
  if (!std::getline(f, line)) throw ParseError(file + ": missing columns");
  ++ln;
  const std::vector<std::string> cols = split_csv(line);
  int nq = 0, nqd = 0, na = 0;
  for (const auto& c : cols) {
    if (c.rfind("qd", 0) == 0)
      ++nqd;
    else if (c.rfind('q', 0) == 0)
      ++nq;
    else if (c.rfind('u', 0) == 0)
      ++na;
  }
  if (nq == 0 || nq != nqd ||
      cols.size() != static_cast<size_t>(2 + 2 * nq + na + 9) ||
      cols.front() != "t" || cols.back() != "s")
    throw ParseError(file + ": unexpected trace columns");

  SimTrace trace;
  trace.nq = nq;
  trace.n_a = na;
  while (std::getline(f, line)) {
    ++ln;
    if (line.empty()) continue;
    const std::vector<std::string> tok = split_csv(line);
    if (tok.size() != cols.size())
      throw ParseError(file + ":" + std::to_string(ln) + ": column count");
    TraceSample s;
    int k = 0;
    s.t = to_num(tok[k++], file, ln);
    const std::string& dn = tok[k++];
    int di = -1;
    for (size_t i = 0; i < trace.domain_names.size(); ++i)
      if (trace.domain_names[i] == dn) di = static_cast<int>(i);
    if (di < 0) {
      di = static_cast<int>(trace.domain_names.size());
      trace.domain_names.push_back(dn);
    }
    s.domain = di;
    s.q.resize(nq);
    s.qd.resize(nq);
    s.u.resize(na);
    for (int i = 0; i < nq; ++i) s.q[i] = to_num(tok[k++], file, ln);
    for (int i = 0; i < nq; ++i) s.qd[i] = to_num(tok[k++], file, ln);
    for (int i = 0; i < na; ++i) s.u[i] = to_num(tok[k++], file, ln);
    s.y_norm = to_num(tok[k++], file, ln);
    s.ydot_norm = to_num(tok[k++], file, ln);
    s.V_F = to_num(tok[k++], file, ln);
    s.V_U = to_num(tok[k++], file, ln);
    s.V_O = to_num(tok[k++], file, ln);
    s.Fc_z_heel = to_num(tok[k++], file, ln);
    s.Fc_z_total = to_num(tok[k++], file, ln);
    s.theta = to_num(tok[k++], file, ln);
    s.s = to_num(tok[k++], file, ln);
    trace.samples.push_back(std::move(s));
  }
  return trace;
}

std::vector<TraceEvent> read_events_csv(const std::string& file) {
  std::ifstream f(file);
  if (!f) throw ParseError("cannot read " + file);
  std::string line;
  int ln = 0;
  if (!std::getline(f, line) || strip_cr(line) != kEventsHeader)
    throw ParseError(file + ": missing events schema header");
  ++ln;
  if (!std::getline(f, line)) throw ParseError(file + ": missing columns");
  ++ln;
  if (split_csv(line).size() != 6)
    throw ParseError(file + ": unexpected events columns");
  std::vector<TraceEvent> events;
  while (std::getline(f, line)) {
    ++ln;
    if (line.empty()) continue;
    const std::vector<std::string> tok = split_csv(line);
    if (tok.size() != 6)
      throw ParseError(file + ":" + std::to_string(ln) + ": column count");
    TraceEvent e;
    e.t = to_num(tok[0], file, ln);
    e.edge = tok[1];
    e.impulse_norm = to_num(tok[2], file, ln);
    e.guard_residual = to_num(tok[3], file, ln);
    e.KE_pre = to_num(tok[4], file, ln);
    e.KE_post = to_num(tok[5], file, ln);
    events.push_back(e);
  }
  return events;
}

}  // namespace gptwalk
