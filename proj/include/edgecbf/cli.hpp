#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace edgecbf::cli {

enum ExitCode : int {
  kOk = 0,
  kInfeasible = 2,
  kTimeout = 3,
  kInvalidInput = 4,
};

// Output directory for artifacts whose path was not given: $EDGECBF_OUT_DIR,
// else the working directory.
std::filesystem::path default_output_dir();

struct RunOptions {
  std::optional<std::filesystem::path> trace;  // default <out dir>/<stem>_trace.csv
  bool record_timing = false;
};

int cmd_run(const std::filesystem::path& scenario, const RunOptions& opts, std::ostream& out,
            std::ostream& err);

int cmd_check(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::vector<int> joints{1, 2, 3, 4};
  int repeats = 5;
  std::optional<std::filesystem::path> out;  // default <out dir>/<stem>_bench.csv
  std::optional<std::uint64_t> seed;         // falls back to the scenario seed, then 0
};

int cmd_bench(const std::filesystem::path& scenario, const BenchOptions& opts, std::ostream& out,
              std::ostream& err);

struct WorkspaceOptions {
  std::optional<int> resolution;             // default: scenario workspace_resolution
  std::optional<std::filesystem::path> out;  // default <out dir>/<stem>_workspace.csv
};

int cmd_workspace(const std::filesystem::path& scenario, const WorkspaceOptions& opts,
                  std::ostream& out, std::ostream& err);

// "1,2,4" -> {1, 2, 4}. Throws InputError on malformed lists.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace edgecbf::cli
