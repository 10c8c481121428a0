#pragma once

#include "edgecbf/geometry.hpp"
#include "edgecbf/kinematics.hpp"
#include "edgecbf/qp_solver.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace edgecbf {

// Linear extended class-K function alpha(H) = gamma * H.
struct ClassKappa {
  double gamma = 1.0;
  double operator()(double h) const { return gamma * h; }
};

// One linear CBF constraint  coefficients . u >= offset.
struct CbfRow {
  Eigen::VectorXd coefficients;
  double offset = 0.0;
  int edge = -1;           // edge point index, -1 for joint-limit rows
  std::size_t set = 0;     // corridor set index (joint index for limit rows)
  int face = 0;
};

enum class InfeasibilityPolicy { Halt, ZeroInput };

struct SafetyConfig {
  double k_p = 1.0;
  ClassKappa kappa{};
  double lambda_dls = 0.01;
  InfeasibilityPolicy policy = InfeasibilityPolicy::Halt;
  bool joint_limit_cbf = true;
  // Barrier values below -unsafe_tolerance are reported as an unsafe state.
  double unsafe_tolerance = 1e-4;
};

// A corridor set handed to the constraint builder, tagged with its index.
struct SetRef {
  std::size_t id = 0;
  const ConvexSet* set = nullptr;
};
using EdgeSetAssignment = std::vector<std::vector<SetRef>>;

// Task-space proportional command toward `waypoint`, mapped to inputs.
// Rod: (v, 0) directly. Arm: damped least squares on the end-effector Jacobian.
Eigen::VectorXd nominal_control(const RobotModel& model, const Configuration& q,
                                const Eigen::Vector3d& waypoint, const SafetyConfig& cfg);
Eigen::VectorXd nominal_control(const RobotModel& model, const KinematicState& ks,
                                const Eigen::Vector3d& waypoint, const SafetyConfig& cfg);

// Rows grad(H) J_k u >= -gamma H for every edge, set and face, in that order.
// Throws UnsafeStateError when an edge point's barrier is below -unsafe_tolerance.
std::vector<CbfRow> assemble_constraints(const RobotModel& model, const Configuration& q,
                                         const EdgeSetAssignment& active_sets,
                                         const ClassKappa& kappa,
                                         double unsafe_tolerance = 1e-4);
std::vector<CbfRow> assemble_constraints(const KinematicState& ks,
                                         const EdgeSetAssignment& active_sets,
                                         const ClassKappa& kappa,
                                         double unsafe_tolerance = 1e-4);

// Box barriers on the rotating joint angles (upper then lower per joint).
std::vector<CbfRow> joint_limit_rows(const RobotModel& model, const Configuration& q,
                                     const ClassKappa& kappa);

struct SafetyDiagnostics {
  std::vector<double> edge_min_barrier;  // per edge point, over its active sets
  int rows = 0;
  int active_constraints = 0;
  int qp_iterations = 0;
  double solve_time_s = 0.0;
  // Identifiers of the rows the QP could not satisfy together.
  std::vector<CbfRow> conflict;
};

struct SafeControl {
  QpStatus status = QpStatus::Optimal;
  Eigen::VectorXd u;          // filtered input; zero when the QP failed
  Eigen::VectorXd u_nominal;
  SafetyDiagnostics diagnostics;
};

/// Solves min ||u - u_p||^2 over the intersection of the CBF rows. The caller
/// applies the infeasibility policy; on failure `u` is left at zero.
SafeControl safe_control(const RobotModel& model, const Configuration& q,
                         const EdgeSetAssignment& active_sets, const Eigen::Vector3d& waypoint,
                         const SafetyConfig& cfg, LeastDistanceSolver& solver);

}  // namespace edgecbf
