#include "edgecbf/cli.hpp"
#include "edgecbf/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  namespace cli = edgecbf::cli;
  CLI::App app{"Edge-point CBF safe control simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string trace, out, joints = "1,2,3,4";
  bool record_timing = false;
  int repeats = 5;
  std::uint64_t seed = 0;
  int resolution = 0;

  auto* run = app.add_subcommand("run", "Simulate a scenario and write its trace CSV");
  run->add_option("scenario", scenario, "Scenario JSON")->required();
  run->add_option("--trace", trace, "Trace CSV path");
  run->add_flag("--record-timing", record_timing, "Write measured solve times into the trace");

  auto* check = app.add_subcommand("check", "Validate the corridor and start configuration");
  check->add_option("scenario", scenario, "Scenario JSON")->required();

  auto* bench = app.add_subcommand("bench", "Per-step solve time versus rotating joint count");
  bench->add_option("scenario", scenario, "Scenario JSON")->required();
  bench->add_option("--joints", joints, "Comma-separated joint counts (1..4)");
  bench->add_option("--repeats", repeats, "Runs per joint count")->check(CLI::PositiveNumber);
  auto* seed_opt = bench->add_option("--seed", seed, "Start jitter seed");
  bench->add_option("--out", out, "Output CSV path");

  auto* ws = app.add_subcommand("workspace", "Export the arm workspace cloud as x,y,z CSV");
  ws->add_option("scenario", scenario, "Scenario JSON")->required();
  auto* res_opt = ws->add_option("--resolution", resolution, "Samples per active joint");
  ws->add_option("--out", out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInvalidInput;
  }

  if (*run) {
    cli::RunOptions opts;
    if (!trace.empty()) opts.trace = trace;
    opts.record_timing = record_timing;
    return cli::cmd_run(scenario, opts, std::cout, std::cerr);
  }
  if (*check) return cli::cmd_check(scenario, std::cout, std::cerr);
  if (*bench) {
    cli::BenchOptions opts;
    try {
      opts.joints = cli::parse_int_list(joints);
    } catch (const edgecbf::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return cli::kInvalidInput;
    }
    opts.repeats = repeats;
    if (seed_opt->count()) opts.seed = seed;
    if (!out.empty()) opts.out = out;
    return cli::cmd_bench(scenario, opts, std::cout, std::cerr);
  }
  cli::WorkspaceOptions opts;
  if (res_opt->count()) opts.resolution = resolution;
  if (!out.empty()) opts.out = out;
  return cli::cmd_workspace(scenario, opts, std::cout, std::cerr);
}
