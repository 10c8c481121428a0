#pragma once

#include "edgecbf/corridor.hpp"
#include "edgecbf/kinematics.hpp"
#include "edgecbf/safety.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace edgecbf {

struct SimConfig {
  double dt = 1e-3;
  int max_steps = 200000;
  double goal_tol = 0.02;
  double margin = 0.05;  // waypoint pull toward the set center, fraction
  SafetyConfig safety{};
  int record_every = 1;
  // Grid resolution of the arm workspace cloud when none is supplied.
  int workspace_resolution = 25;
  // Write measured solve times into the trace. Off keeps traces reproducible.
  bool record_timing = false;
};

enum class SimStatus { ReachedGoal, Infeasible, Timeout };

const char* to_string(SimStatus s);

struct TraceRow {
  double t = 0.0;
  Configuration q;
  Eigen::VectorXd u;
  std::size_t active_set = 0;
  std::vector<double> min_h;  // per edge point
  double min_dist = 0.0;
  double solve_time_s = 0.0;
};

struct Trace {
  std::vector<std::string> state_names;
  std::vector<std::string> input_names;
  std::size_t edge_count = 0;
  std::vector<TraceRow> rows;
};

struct TimingStats {
  double mean = 0.0;
  double median = 0.0;
  double p99 = 0.0;
};

TimingStats timing_stats(std::vector<double> samples);

struct SimResult {
  SimStatus status = SimStatus::Timeout;
  int steps = 0;
  Trace trace;
  TimingStats timing;
  std::vector<double> solve_times;  // one per safe_control call
  int max_constraints = 0;
  int clamp_events = 0;
  Configuration final_q;
  std::size_t final_set = 0;
  std::string message;
};

// Explicit Euler step. Arm angles are clamped to their limits; each clamped
// joint increments `clamp_events` when given.
Configuration step(const RobotModel& model, const Configuration& q, const Eigen::VectorXd& u,
                   double dt, int* clamp_events = nullptr);

/// Closed loop advanced one control step at a time. `model`, `corridor` and
/// `cloud` must outlive the simulation.
class Simulation {
 public:
  Simulation(const RobotModel& model, const Corridor& corridor, const Configuration& q0,
             const SimConfig& cfg, const WorkspaceCloud* cloud = nullptr);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  bool finished() const { return finished_; }
  // One iteration: handoff, goal test, safe control, Euler step. No-op once finished.
  void advance();
  const SimResult& result() const { return res_; }

 private:
  bool reached(const Configuration& q) const;
  void record(int s, const Eigen::VectorXd& u, std::vector<double> h, double solve_time);
  void finish(SimStatus status, const std::vector<Eigen::Vector3d>& pts, std::string message);

  const RobotModel& model_;
  const Corridor& corridor_;
  SimConfig cfg_;
  WorkspaceCloud own_cloud_;
  const WorkspaceCloud* cloud_ = nullptr;
  LeastDistanceSolver solver_;
  Configuration q_;
  CorridorState state_;
  int step_ = 0;
  bool finished_ = false;
  SimResult res_;
};

// Closed loop from q0 until the goal predicate, a halting infeasibility, or
// max_steps. For an arm the goal predicate is in_goal_region within goal_tol
// while the last corridor set is active; `cloud` is built from the start
// angles when null.
SimResult run_scenario(const RobotModel& model, const Corridor& corridor, const Configuration& q0,
                       const SimConfig& cfg, const WorkspaceCloud* cloud = nullptr);

struct BenchRow {
  int joints = 0;
  double median_s = 0.0;
  double p99_s = 0.0;
  int constraints = 0;
  long long steps = 0;  // summed over repeats
};

// Per joint count, solve-time statistics over every step of every repeat.
// Repeat r starts from q0 with its base shifted by a seeded jitter of at most
// 1 cm per axis; the same jitter is used for every joint count. Repeats are
// interleaved across joint counts, and within a repeat the joint counts
// advance in lockstep one control step at a time, so slow drifts in machine
// speed hit every joint count alike.
std::vector<BenchRow> benchmark_scaling(const RobotModel& model, const Corridor& corridor,
                                        const Configuration& q0, const SimConfig& cfg,
                                        const std::vector<int>& joint_counts, int repeats,
                                        std::uint64_t seed, bool edges_follow_active);

std::vector<std::vector<std::pair<double, double>>> min_distance_series(const Trace& trace);

std::string trace_header(const Trace& trace);
void write_trace_csv(std::ostream& os, const Trace& trace);

}  // namespace edgecbf
