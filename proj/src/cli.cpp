#include "edgecbf/cli.hpp"

#include "edgecbf/error.hpp"
#include "edgecbf/scenario.hpp"
#include "edgecbf/simulator.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace edgecbf::cli {

std::filesystem::path default_output_dir() {
  if (const char* dir = std::getenv("EDGECBF_OUT_DIR"); dir && *dir) return dir;
  return std::filesystem::current_path();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const char* first = text.data() + pos;
    const char* last = text.data() + comma;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw InputError("invalid integer list '" + text + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

namespace {

std::filesystem::path artifact_path(const std::optional<std::filesystem::path>& given,
                                    const std::filesystem::path& scenario, const char* suffix) {
  if (given) return *given;
  return default_output_dir() / (scenario.stem().string() + suffix);
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  return os;
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g s", s);
  return buf;
}

}  // namespace

int cmd_run(const std::filesystem::path& scenario, const RunOptions& opts, std::ostream& out,
            std::ostream& err) {
  SimResult res;
  std::filesystem::path trace_path;
  try {
    const Scenario s = load_scenario(scenario);
    const RobotModel model = build_model(s);
    const Corridor corridor = build_corridor(s);
    SimConfig cfg = sim_config(s);
    cfg.record_timing = opts.record_timing;
    res = run_scenario(model, corridor, start_configuration(s), cfg);
    trace_path = artifact_path(opts.trace, scenario, "_trace.csv");
    std::ofstream os = open_output(trace_path);
    write_trace_csv(os, res.trace);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  out << "status: " << to_string(res.status) << '\n'
      << "steps: " << res.steps << '\n'
      << "final set: C_" << res.final_set << '\n'
      << "solve time: mean " << seconds(res.timing.mean) << ", median "
      << seconds(res.timing.median) << ", p99 " << seconds(res.timing.p99) << '\n'
      << "joint clamp events: " << res.clamp_events << '\n'
      << "trace: " << trace_path.string() << '\n';
  if (!res.message.empty()) out << "note: " << res.message << '\n';

  switch (res.status) {
    case SimStatus::ReachedGoal: return kOk;
    case SimStatus::Infeasible: return kInfeasible;
    case SimStatus::Timeout: return kTimeout;
  }
  return kInvalidInput;
}

int cmd_check(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err) {
  try {
    const Scenario s = load_scenario(scenario);
    const RobotModel model = build_model(s);
    const Corridor corridor = build_corridor(s);
    const auto pts = edge_points(model, start_configuration(s));
    const CorridorReport report = validate(corridor, pts);
    out << scenario.string() << ": " << corridor.sets.size() << " corridor sets, "
        << model.edge_count() << " edge points\n"
        << report.describe();
    if (!report.ok()) {
      err << "error: corridor check failed\n";
      return kInvalidInput;
    }
    out << "ok\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

int cmd_bench(const std::filesystem::path& scenario, const BenchOptions& opts, std::ostream& out,
              std::ostream& err) {
  try {
    for (int j : opts.joints)
      if (j < 1 || j > 4) throw InputError("joint count " + std::to_string(j) + " outside 1..4");
    if (opts.joints.empty()) throw InputError("no joint counts given");
    const Scenario s = load_scenario(scenario);
    if (s.robot.type != RobotSpec::Type::MobileArm) throw InputError("bench requires a mobile_arm scenario");
    const RobotModel model = build_model(s);
    const Corridor corridor = build_corridor(s);
    const std::uint64_t seed = opts.seed.value_or(s.seed.value_or(0));
    const auto rows = benchmark_scaling(model, corridor, start_configuration(s), sim_config(s),
                                        opts.joints, opts.repeats, seed,
                                        s.robot.edge_points == "by_active_joints");

    const std::filesystem::path path = artifact_path(opts.out, scenario, "_bench.csv");
    std::ofstream os = open_output(path);
    os << "joints,median_s,p99_s,constraints,steps\n";
    char buf[160];
    for (const BenchRow& r : rows) {
      std::snprintf(buf, sizeof buf, "%d,%.6e,%.6e,%d,%lld\n", r.joints, r.median_s, r.p99_s,
                    r.constraints, r.steps);
      os << buf;
      out << "joints " << r.joints << ": median " << seconds(r.median_s) << ", p99 "
          << seconds(r.p99_s) << ", " << r.constraints << " constraints, " << r.steps
          << " steps\n";
    }
    out << "bench: " << path.string() << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

int cmd_workspace(const std::filesystem::path& scenario, const WorkspaceOptions& opts,
                  std::ostream& out, std::ostream& err) {
  try {
    const Scenario s = load_scenario(scenario);
    if (s.robot.type != RobotSpec::Type::MobileArm)
      throw InputError("workspace requires a mobile_arm scenario");
    const int resolution = opts.resolution.value_or(s.control.workspace_resolution);
    if (resolution < 2) throw InputError("resolution must be at least 2");
    const RobotModel model = build_model(s);
    const auto cloud = workspace_cloud(model, s.start_angles, resolution);

    const std::filesystem::path path = artifact_path(opts.out, scenario, "_workspace.csv");
    std::ofstream os = open_output(path);
    os << "x,y,z\n";
    char buf[96];
    for (const Eigen::Vector3d& p : cloud) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x(), p.y(), p.z());
      os << buf;
    }
    out << cloud.size() << " workspace points -> " << path.string() << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

}  // namespace edgecbf::cli
