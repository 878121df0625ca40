#include "CLI11.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gptwalk/monitor.hpp"
#include "gptwalk/scenario.hpp"
#include "gptwalk/svgplot.hpp"
#include "gptwalk/trace_io.hpp"

namespace fs = std::filesystem;
using namespace gptwalk;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kParse = 2;
constexpr int kSim = 3;
constexpr int kMonitor = 4;

int code_of_error(const std::exception& e, int phase_default) {
  if (dynamic_cast<const ParseError*>(&e)) return kParse;
  if (dynamic_cast<const SimulationError*>(&e) ||
      dynamic_cast<const ContactDegeneracyError*>(&e) ||
      dynamic_cast<const SingularChartError*>(&e) ||
      dynamic_cast<const DecouplingSingularError*>(&e))
    return kSim;
  return phase_default;
}

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

std::string out_dir_of(const Scenario& sc) {
  if (!sc.out_dir.empty()) return sc.out_dir;
  if (const char* d = std::getenv("GPTWALK_OUT_DIR")) return d;
  return "out";
}

struct JobSpec {
  Scenario scenario;
  std::string label;
};

struct Selection {
  std::vector<std::string> presets;
  std::vector<std::string> files;
  std::string controller;
  std::string out;
};

void add_selection_flags(CLI::App* cmd, Selection& sel, bool with_controller) {
  cmd->add_option("--preset", sel.presets, "bundled scenario preset")
      ->check(CLI::IsMember({"case-a", "case-b", "case-c"}));
  cmd->add_option("--scenario", sel.files, "scenario file");
  if (with_controller)
    cmd->add_option("--controller", sel.controller, "controller override")
        ->check(CLI::IsMember({"io-pd", "io-qp"}));
  cmd->add_option("--out", sel.out, "output directory override");
}

std::vector<JobSpec> collect_jobs(const Selection& sel, bool apply_controller) {
  std::vector<JobSpec> jobs;
  for (const auto& p : sel.presets) {
    JobSpec j;
    j.scenario = scenario_preset(p);
    j.label = j.scenario.name;
    jobs.push_back(std::move(j));
  }
  for (const auto& f : sel.files) {
    JobSpec j;
    j.scenario = load_scenario(f);
    j.label = j.scenario.name.empty() ? stem_of(f) : j.scenario.name;
    jobs.push_back(std::move(j));
  }
  for (auto& j : jobs) {
    if (apply_controller && !sel.controller.empty())
      j.scenario.controller.type = sel.controller;
    if (!sel.out.empty()) j.scenario.out_dir = sel.out;
  }
  return jobs;
}

struct TrackStats {
  Scalar heading_deg = 0;
  Scalar horiz_m = 0;
  Scalar pct_step = 0;
  Scalar max_u = 0;
  long violations = 0;
  VecX peaks;
};

TrackStats stats_of(const ScenarioRuntime& rt, const SimTrace& trace) {
  TrackStats st;
  const TraceSample& last = trace.samples.back();
  const GpPoint g = desired_gp(rt.path, last.t);
  st.horiz_m = std::hypot(last.q[0] - g.x, last.q[1] - g.y);
  st.pct_step = rt.gait.step_length > 0
                    ? 100.0 * st.horiz_m / rt.gait.step_length
                    : 0.0;
  st.heading_deg =
      std::abs(std::remainder(last.q[5] - g.psi, 2 * M_PI)) * 180.0 / M_PI;
  st.peaks = VecX::Zero(trace.n_a);
  const Scalar lim = rt.scenario.controller.torque_limit;
  for (const auto& s : trace.samples) {
    if (s.u.size() == 0) continue;
    st.peaks = st.peaks.cwiseMax(s.u.cwiseAbs());
    const Scalar m = s.u.cwiseAbs().maxCoeff();
    st.max_u = std::max(st.max_u, m);
    if (m > lim + 1e-9) ++st.violations;
  }
  return st;
}

std::string summarize(const ScenarioRuntime& rt, const std::string& label,
                      const SimTrace& trace, const MonitorReport& rep) {
  const TrackStats st = stats_of(rt, trace);
  const TraceSample& last = trace.samples.back();
  std::ostringstream o;
  o << "# gptwalk run summary v1\n";
  o << "scenario " << label << "\n";
  o << "controller " << rt.scenario.controller.type << "\n";
  o << "samples " << trace.samples.size() << "\n";
  o << "events " << trace.events.size() << "\n";
  o << "final_t " << fmt_num(last.t) << "\n";
  o << "final_heading_err_deg " << fmt_num(st.heading_deg) << "\n";
  o << "final_horizontal_err_m " << fmt_num(st.horiz_m) << "\n";
  o << "final_horizontal_err_pct_step " << fmt_num(st.pct_step) << "\n";
  o << "final_y_norm " << fmt_num(last.y_norm) << "\n";
  o << "final_ydot_norm " << fmt_num(last.ydot_norm) << "\n";
  o << "max_torque " << fmt_num(st.max_u) << "\n";
  o << "torque_limit " << fmt_num(rt.scenario.controller.torque_limit)
    << "\n";
  o << "violations " << st.violations << "\n";
  o << "monitor_ok " << (rep.ok ? 1 : 0) << "\n";
  return o.str();
}

struct RunResult {
  int code = kOk;
  std::string summary;
  std::string error;
};

RunResult do_run(const JobSpec& job, bool strict) {
  RunResult res;
  bool simulating = false;
  try {
    ScenarioRuntime rt = prepare(job.scenario);
    SimSetup setup = make_setup(rt);
    simulating = true;
    const SimTrace trace = simulate(setup);
    const std::string dir = out_dir_of(job.scenario);
    fs::create_directories(dir);
    const std::string base = dir + "/" + job.label;
    write_trace_csv(trace, base + "_trace.csv");
    write_events_csv(trace, base + "_events.csv");
    MonitorContext ctx{&rt.model, &rt.graph, &rt.gait, &rt.path, setup.t0,
                       1e-2};
    const MonitorReport rep = monitor_trace(trace, rt.cert, 1e-9, &ctx);
    save_report(rep, base + "_monitor");
    res.summary = summarize(rt, job.label, trace, rep);
    std::ofstream f(base + "_summary.txt");
    if (!f) throw Error("cannot write " + base + "_summary.txt");
    f << res.summary;
    if (strict && !rep.ok) res.code = kMonitor;
  } catch (const std::exception& e) {
    res.code = code_of_error(e, simulating ? kSim : kParse);
    res.error = job.label + ": " + e.what();
  }
  return res;
}

// Batch runs use a small worker pool; each worker owns its jobs end to
// end (separate output files), aggregation below is single-threaded.
int run_jobs(const std::vector<JobSpec>& jobs, bool strict) {
  std::vector<RunResult> results(jobs.size());
  if (jobs.size() == 1) {
    results[0] = do_run(jobs[0], strict);
  } else {
    std::atomic<size_t> next{0};
    const unsigned hc = std::thread::hardware_concurrency();
    const size_t workers = std::min(jobs.size(), static_cast<size_t>(
                                                     hc ? hc : 1));
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next++; i < jobs.size(); i = next++)
          results[i] = do_run(jobs[i], strict);
      });
    for (auto& th : pool) th.join();
  }
  int code = kOk;
  for (const auto& r : results) {
    if (!r.summary.empty()) std::cout << r.summary << "\n";
    if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
    code = std::max(code, r.code);
  }
  return code;
}

int do_compare(const JobSpec& job, const std::string& controller) {
  bool simulating = false;
  try {
    ScenarioRuntime rt = prepare(job.scenario);
    const std::array<std::string, 2> types =
        controller.empty()
            ? std::array<std::string, 2>{"io-pd", "io-qp"}
            : std::array<std::string, 2>{controller, controller};
    simulating = true;
    std::array<SimTrace, 2> traces;
    std::array<TrackStats, 2> stats;
    for (int k = 0; k < 2; ++k) {
      rt.scenario.controller.type = types[k];
      SimSetup setup = make_setup(rt);
      traces[k] = simulate(setup);
      stats[k] = stats_of(rt, traces[k]);
    }
    const std::string dir = out_dir_of(job.scenario);
    fs::create_directories(dir);
    const std::string base = dir + "/" + job.label;
    for (int k = 0; k < 2; ++k)
      write_trace_csv(traces[k],
                      base + "_" + types[k] + (k ? "_second" : "_first") +
                          "_trace.csv");
    std::ostringstream o;
    o << "# gptwalk compare v1\n";
    o << "scenario " << job.label << "\n";
    o << "first " << types[0] << "\n";
    o << "second " << types[1] << "\n";
    o << "torque_limit " << fmt_num(rt.scenario.controller.torque_limit)
      << "\n";
    o << "joint peak_first peak_second\n";
    for (int i = 0; i < traces[0].n_a; ++i)
      o << "u" << i << " " << fmt_num(stats[0].peaks[i]) << " "
        << fmt_num(stats[1].peaks[i]) << "\n";
    o << "violations_first " << stats[0].violations << "\n";
    o << "violations_second " << stats[1].violations << "\n";
    for (int k = 0; k < 2; ++k)
      o << (k ? "second" : "first") << "_final_heading_err_deg "
        << fmt_num(stats[k].heading_deg) << "\n"
        << (k ? "second" : "first") << "_final_horizontal_err_m "
        << fmt_num(stats[k].horiz_m) << "\n";
    if (traces[0].samples.size() == traces[1].samples.size()) {
      Scalar div = 0;
      for (size_t i = 0; i < traces[0].samples.size(); ++i) {
        div = std::max(div, (traces[0].samples[i].q -
                             traces[1].samples[i].q).cwiseAbs().maxCoeff());
        div = std::max(div, (traces[0].samples[i].qd -
                             traces[1].samples[i].qd).cwiseAbs().maxCoeff());
      }
      o << "max_state_divergence " << fmt_num(div) << "\n";
    }
    std::ofstream f(base + "_compare.txt");
    if (!f) throw Error("cannot write " + base + "_compare.txt");
    f << o.str();
    std::cout << o.str();
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << job.label << ": " << e.what() << "\n";
    return code_of_error(e, simulating ? kSim : kParse);
  }
}

int do_monitor(const JobSpec& job, bool strict) {
  bool simulating = false;
  try {
    ScenarioRuntime rt = prepare(job.scenario);
    SimSetup setup = make_setup(rt);
    simulating = true;
    const SimTrace trace = simulate(setup);
    MonitorContext ctx{&rt.model, &rt.graph, &rt.gait, &rt.path, setup.t0,
                       1e-2};
    const MonitorReport rep = monitor_trace(trace, rt.cert, 1e-9, &ctx);
    const std::string dir = out_dir_of(job.scenario);
    fs::create_directories(dir);
    save_report(rep, dir + "/" + job.label + "_monitor");
    std::cout << format_report(rep);
    return strict && !rep.ok ? kMonitor : kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << job.label << ": " << e.what() << "\n";
    return code_of_error(e, simulating ? kSim : kParse);
  }
}

int do_validate(const std::vector<JobSpec>& jobs) {
  int code = kOk;
  for (const auto& job : jobs) {
    try {
      ScenarioRuntime rt = prepare(job.scenario);
      const VecX z0 = initial_state(rt);
      std::cout << "OK " << job.label << " nq=" << rt.model.nq()
                << " domains=" << rt.graph.size()
                << " state_dim=" << z0.size() << "\n";
    } catch (const std::exception& e) {
      std::cerr << "FAIL " << job.label << ": " << e.what() << "\n";
      code = std::max(code, code_of_error(e, kParse));
    }
  }
  return code;
}

int do_plot(const std::string& trace_file, std::vector<std::string> kinds,
            const std::string& scenario_file, const std::string& preset,
            const std::string& out) {
  try {
    const SimTrace trace = read_trace_csv(trace_file);
    GlobalPathSpec pspec;
    const GlobalPathSpec* path = nullptr;
    Scalar limit = 4.1;
    if (!scenario_file.empty() || !preset.empty()) {
      const Scenario sc = preset.empty() ? load_scenario(scenario_file)
                                         : scenario_preset(preset);
      pspec = (sc.path == "gp1" || sc.path == "gp2" || sc.path == "gp3")
                  ? path_preset(sc.path)
                  : load_path(sc.path);
      path = &pspec;
      limit = sc.controller.torque_limit;
    }
    if (kinds.empty()) kinds = {"gp", "lyapunov", "torque"};
    const std::string dir = !out.empty()
                                ? out
                                : (std::getenv("GPTWALK_OUT_DIR")
                                       ? std::getenv("GPTWALK_OUT_DIR")
                                       : "out");
    fs::create_directories(dir);
    const std::string base = dir + "/" + stem_of(trace_file);
    for (const auto& k : kinds) {
      const std::string file = base + "_" + k + ".svg";
      if (k == "gp")
        plot_gp(trace, path, file);
      else if (k == "lyapunov")
        plot_lyapunov(trace, file);
      else
        plot_torque(trace, limit, file);
      std::cout << "wrote " << file << "\n";
    }
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code_of_error(e, kParse);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid walking simulation and stability monitoring"};
  app.require_subcommand(1);
  long seed = 0;
  app.add_option("--seed", seed,
                 "randomized test harness seed (simulations are "
                 "deterministic and ignore it)");

  Selection run_sel, cmp_sel, mon_sel, val_sel;
  bool run_strict = false, mon_strict = false;

  CLI::App* run =
      app.add_subcommand("run", "simulate scenarios and write artifacts");
  add_selection_flags(run, run_sel, true);
  run->add_flag("--strict", run_strict,
                "exit 4 when the stability monitor fails");

  CLI::App* cmp = app.add_subcommand(
      "compare", "run a scenario under both controllers and compare");
  add_selection_flags(cmp, cmp_sel, true);

  CLI::App* mon = app.add_subcommand(
      "monitor", "re-run a scenario and print the stability report");
  add_selection_flags(mon, mon_sel, false);
  mon->add_flag("--strict", mon_strict,
                "exit 4 when the stability monitor fails");

  CLI::App* val = app.add_subcommand(
      "validate", "parse and cross-check scenario assets without running");
  add_selection_flags(val, val_sel, false);

  std::string plot_trace, plot_scen, plot_preset, plot_out;
  std::vector<std::string> plot_kinds;
  CLI::App* plt =
      app.add_subcommand("plot", "render SVG plots from a trace CSV");
  plt->add_option("--trace", plot_trace, "trace CSV file")->required();
  plt->add_option("--kind", plot_kinds, "gp, lyapunov, torque (default all)")
      ->check(CLI::IsMember({"gp", "lyapunov", "torque"}));
  plt->add_option("--scenario", plot_scen,
                  "scenario file for desired-path overlay and limits");
  plt->add_option("--preset", plot_preset, "preset for overlay and limits")
      ->check(CLI::IsMember({"case-a", "case-b", "case-c"}));
  plt->add_option("--out", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) {
      const auto jobs = collect_jobs(run_sel, true);
      if (jobs.empty()) {
        std::cerr << "run: give --preset and/or --scenario\n";
        return kUsage;
      }
      return run_jobs(jobs, run_strict);
    }
    if (cmp->parsed()) {
      const auto jobs = collect_jobs(cmp_sel, false);
      if (jobs.empty()) {
        std::cerr << "compare: give --preset and/or --scenario\n";
        return kUsage;
      }
      int code = kOk;
      for (const auto& j : jobs)
        code = std::max(code, do_compare(j, cmp_sel.controller));
      return code;
    }
    if (mon->parsed()) {
      const auto jobs = collect_jobs(mon_sel, false);
      if (jobs.empty()) {
        std::cerr << "monitor: give --preset and/or --scenario\n";
        return kUsage;
      }
      int code = kOk;
      for (const auto& j : jobs) code = std::max(code, do_monitor(j, mon_strict));
      return code;
    }
    if (val->parsed()) {
      const auto jobs = collect_jobs(val_sel, false);
      if (jobs.empty()) {
        std::cerr << "validate: give --preset and/or --scenario\n";
        return kUsage;
      }
      return do_validate(jobs);
    }
    if (plt->parsed())
      return do_plot(plot_trace, plot_kinds, plot_scen, plot_preset,
                     plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code_of_error(e, kParse);
  }
  return kUsage;
}
