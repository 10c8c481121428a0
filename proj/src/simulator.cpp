#include "edgecbf/simulator.hpp"

#include "edgecbf/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

namespace edgecbf {

const char* to_string(SimStatus s) {
  switch (s) {
    case SimStatus::ReachedGoal: return "ReachedGoal";
    case SimStatus::Infeasible: return "Infeasible";
    case SimStatus::Timeout: return "Timeout";
  }
  return "?";
}

TimingStats timing_stats(std::vector<double> samples) {
  TimingStats st;
  if (samples.empty()) return st;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  st.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  st.median = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  // Nearest-rank percentile.
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(n)));
  st.p99 = samples[std::max<std::size_t>(rank, 1) - 1];
  return st;
}

Configuration step(const RobotModel& model, const Configuration& q, const Eigen::VectorXd& u,
                   double dt, int* clamp_events) {
  check_configuration(model, q);
  if (u.size() != model.input_dim())
    throw InputError("input has " + std::to_string(u.size()) + " components, model expects " +
                     std::to_string(model.input_dim()));
  Configuration next = q;
  if (model.is_rod()) {
    next.base += dt * u.head<2>();
    next.angles(0) += dt * u(2);
    return next;
  }
  const auto& active = model.active_joints();
  const auto& rows = model.dh_rows();
  for (std::size_t j = 0; j < active.size(); ++j) {
    const int r = active[j];
    const double raw = q.angles(r) + dt * u(static_cast<Eigen::Index>(j));
    const double clamped = std::clamp(raw, rows[r].min_angle, rows[r].max_angle);
    if (clamped != raw && clamp_events) ++*clamp_events;
    next.angles(r) = clamped;
  }
  const Eigen::Index nj = static_cast<Eigen::Index>(active.size());
  next.base += dt * u.segment<2>(nj);
  return next;
}

namespace {

EdgeSetAssignment assignment(const Corridor& corridor, const CorridorState& state) {
  EdgeSetAssignment sets(state.edge_sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k)
    sets[k].push_back({state.edge_sets[k], &corridor.sets[state.edge_sets[k]]});
  return sets;
}

std::vector<double> edge_barriers(const Corridor& corridor, const CorridorState& state,
                                  const std::vector<Eigen::Vector3d>& pts) {
  std::vector<double> h(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const ConvexSet& set = corridor.sets[state.edge_sets[k]];
    h[k] = min_barrier(set, pts[k].head(set.dim()));
  }
  return h;
}

void check_sim_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw InputError("dt must be positive");
  if (cfg.max_steps < 1) throw InputError("max_steps must be at least 1");
  if (cfg.record_every < 1) throw InputError("record_every must be at least 1");
  if (!(cfg.goal_tol > 0.0)) throw InputError("goal_tol must be positive");
  if (!(cfg.margin >= 0.0 && cfg.margin < 1.0)) throw InputError("margin must lie in [0, 1)");
  if (!(cfg.safety.kappa.gamma > 0.0)) throw InputError("gamma must be positive");
}

}  // namespace

Simulation::Simulation(const RobotModel& model, const Corridor& corridor, const Configuration& q0,
                       const SimConfig& cfg, const WorkspaceCloud* cloud)
    : model_(model), corridor_(corridor), cfg_(cfg), cloud_(cloud), q_(q0) {
  check_sim_config(cfg);
  check_configuration(model, q0);
  if (corridor.sets.empty()) throw CorridorError("corridor has no sets");

  const auto start_pts = edge_points(model, q0);
  const CorridorReport report = validate(corridor, start_pts);
  for (std::size_t i = 0; i < report.pair_connected.size(); ++i)
    if (!report.pair_connected[i])
      throw CorridorError("invalid corridor: sets " + std::to_string(i) + " and " +
                          std::to_string(i + 1) + " do not overlap");
  if (!report.goal_in_last) throw CorridorError("invalid corridor: goal lies outside the last set");
  if (!report.start_outside.empty())
    throw CorridorError("start outside corridor: edge point e" +
                        std::to_string(report.start_outside.front()) + " is not in set C_0");

  if (!model.is_rod() && !cloud_) {
    own_cloud_ = WorkspaceCloud(workspace_cloud(model, q0.angles, cfg.workspace_resolution));
    cloud_ = &own_cloud_;
  }
  res_.trace.state_names = model.state_names();
  res_.trace.input_names = model.input_names();
  res_.trace.edge_count = static_cast<std::size_t>(model.edge_count());
  res_.solve_times.reserve(static_cast<std::size_t>(std::min(cfg.max_steps, 1 << 20)));
  state_ = initial_state(corridor, start_pts.size(), reference_point(model, q0), cfg.margin);
}

bool Simulation::reached(const Configuration& q) const {
  if (model_.is_rod()) return (reference_point(model_, q) - corridor_.goal).norm() <= cfg_.goal_tol;
  return state_.index == corridor_.last() &&
         in_goal_region(model_, q, corridor_.goal, *cloud_, cfg_.goal_tol);
}

void Simulation::record(int s, const Eigen::VectorXd& u, std::vector<double> h, double solve_time) {
  TraceRow row;
  row.t = s * cfg_.dt;
  row.q = q_;
  row.u = u;
  row.active_set = state_.index;
  row.min_dist = h.empty() ? 0.0 : *std::min_element(h.begin(), h.end());
  row.min_h = std::move(h);
  row.solve_time_s = cfg_.record_timing ? solve_time : 0.0;
  res_.trace.rows.push_back(std::move(row));
}

void Simulation::finish(SimStatus status, const std::vector<Eigen::Vector3d>& pts,
                        std::string message) {
  res_.status = status;
  res_.steps = step_;
  if (!message.empty()) res_.message = std::move(message);
  record(step_, Eigen::VectorXd::Zero(model_.input_dim()), edge_barriers(corridor_, state_, pts), 0.0);
  res_.final_q = q_;
  res_.final_set = state_.index;
  res_.timing = timing_stats(res_.solve_times);
  finished_ = true;
}

void Simulation::advance() {
  if (finished_) return;
  const auto pts = edge_points(model_, q_);
  state_ = edgecbf::advance(corridor_, state_, pts, reference_point(model_, q_), cfg_.margin);

  if (reached(q_)) return finish(SimStatus::ReachedGoal, pts, {});
  if (step_ == cfg_.max_steps) return finish(SimStatus::Timeout, pts, {});

  SafeControl sc;
  try {
    sc = safe_control(model_, q_, assignment(corridor_, state_), state_.waypoint, cfg_.safety, solver_);
  } catch (const UnsafeStateError& e) {
    return finish(SimStatus::Infeasible, pts, e.what());
  }
  res_.solve_times.push_back(sc.diagnostics.solve_time_s);
  res_.max_constraints = std::max(res_.max_constraints, sc.diagnostics.rows);

  if (sc.status != QpStatus::Optimal) {
    std::string why = sc.status == QpStatus::Infeasible ? "QP infeasible" : "QP iteration limit";
    why += " at t=" + std::to_string(step_ * cfg_.dt) + "; conflicting rows:";
    for (const CbfRow& r : sc.diagnostics.conflict)
      why += r.edge < 0 ? " limit(j" + std::to_string(r.set + 1) + ")"
                        : " (e" + std::to_string(r.edge) + ",C" + std::to_string(r.set) + ",f" +
                              std::to_string(r.face) + ")";
    if (cfg_.safety.policy == InfeasibilityPolicy::Halt)
      return finish(SimStatus::Infeasible, pts, why);
    if (res_.message.empty()) res_.message = why;
  }

  if (step_ % cfg_.record_every == 0)
    record(step_, sc.u, sc.diagnostics.edge_min_barrier, sc.diagnostics.solve_time_s);
  q_ = step(model_, q_, sc.u, cfg_.dt, &res_.clamp_events);
  ++step_;
}

SimResult run_scenario(const RobotModel& model, const Corridor& corridor, const Configuration& q0,
                       const SimConfig& cfg, const WorkspaceCloud* cloud) {
  Simulation sim(model, corridor, q0, cfg, cloud);
  while (!sim.finished()) sim.advance();
  return sim.result();
}

std::vector<BenchRow> benchmark_scaling(const RobotModel& model, const Corridor& corridor,
                                        const Configuration& q0, const SimConfig& cfg,
                                        const std::vector<int>& joint_counts, int repeats,
                                        std::uint64_t seed, bool edges_follow_active) {
  if (model.is_rod()) throw InputError("benchmark requires a mobile arm");
  if (repeats < 1) throw InputError("repeats must be at least 1");
  for (int j : joint_counts)
    if (j < 1 || j > 4) throw InputError("joint count " + std::to_string(j) + " outside 1..4");

  std::vector<RobotModel> models;
  std::vector<WorkspaceCloud> clouds;
  for (int j : joint_counts) {
    models.push_back(model.with_active_joints(j, edges_follow_active));
    clouds.emplace_back(workspace_cloud(models.back(), q0.angles, cfg.workspace_resolution));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::vector<std::vector<double>> samples(joint_counts.size());
  std::vector<BenchRow> rows(joint_counts.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].joints = joint_counts[i];

  for (int r = 0; r < repeats; ++r) {
    Configuration q = q0;
    const double dx = jitter(rng);
    const double dy = jitter(rng);
    q.base += Eigen::Vector2d(dx, dy);
    std::vector<std::unique_ptr<Simulation>> sims;
    for (std::size_t i = 0; i < models.size(); ++i)
      sims.push_back(std::make_unique<Simulation>(models[i], corridor, q, cfg, &clouds[i]));
    for (bool running = true; running;) {
      running = false;
      for (auto& sim : sims) {
        sim->advance();
        running = running || !sim->finished();
      }
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
      const SimResult& res = sims[i]->result();
      samples[i].insert(samples[i].end(), res.solve_times.begin(), res.solve_times.end());
      rows[i].constraints = std::max(rows[i].constraints, res.max_constraints);
      rows[i].steps += res.steps;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TimingStats st = timing_stats(samples[i]);
    rows[i].median_s = st.median;
    rows[i].p99_s = st.p99;
  }
  return rows;
}

std::vector<std::vector<std::pair<double, double>>> min_distance_series(const Trace& trace) {
  if (trace.rows.empty()) throw InputError("trace is empty");
  std::vector<std::vector<std::pair<double, double>>> series(trace.edge_count);
  for (const TraceRow& row : trace.rows)
    for (std::size_t k = 0; k < trace.edge_count; ++k) series[k].emplace_back(row.t, row.min_h[k]);
  return series;
}

std::string trace_header(const Trace& trace) {
  std::string h = "t";
  for (const auto& n : trace.state_names) h += "," + n;
  for (const auto& n : trace.input_names) h += "," + n;
  h += ",active_set";
  for (std::size_t k = 0; k < trace.edge_count; ++k) h += ",minH_e" + std::to_string(k);
  h += ",min_dist,solve_time_s";
  return h;
}

namespace {

void put(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, ",%.17g", v);
  line += buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << trace_header(trace) << '\n';
  std::string line;
  for (const TraceRow& row : trace.rows) {
    line.clear();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", row.t);
    line += buf;
    put(line, row.q.base.x());
    put(line, row.q.base.y());
    for (Eigen::Index i = 0; i < row.q.angles.size(); ++i) put(line, row.q.angles(i));
    for (Eigen::Index i = 0; i < row.u.size(); ++i) put(line, row.u(i));
    line += "," + std::to_string(row.active_set);
    for (double h : row.min_h) put(line, h);
    put(line, row.min_dist);
    put(line, row.solve_time_s);
    os << line << '\n';
  }
}

}  // namespace edgecbf
