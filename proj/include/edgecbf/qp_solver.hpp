#pragma once

#include <Eigen/Dense>

#include <vector>

namespace edgecbf {

/// minimize ||u - target||^2  subject to  G u >= h.
struct QpProblem {
  Eigen::VectorXd target;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  int max_iterations = 0;  // 0 selects 10 * (m + c)
  double tolerance = 1e-9;
};

enum class QpStatus { Optimal, Infeasible, IterationLimit };

struct QpSolution {
  QpStatus status = QpStatus::Infeasible;
  Eigen::VectorXd u_star;
  Eigen::VectorXd multipliers;   // one per row of G, zero off the active set
  std::vector<int> active_rows;  // ascending
  int iterations = 0;
  double kkt_residual = 0.0;
  // When Infeasible: the active rows plus the row that could not be added.
  std::vector<int> conflict_rows;
};

/// Dual active-set (Goldfarb-Idnani) solver specialized to the identity
/// Hessian. Starts from the unconstrained minimizer u = target and adds the
/// most violated row (lowest index on ties) until primal feasible, dropping
/// rows whose multiplier would turn negative.
///
/// An instance keeps scratch storage between calls; do not share one
/// instance across threads.
class LeastDistanceSolver {
 public:
  QpSolution solve(const QpProblem& problem);

 private:
  Eigen::VectorXd slack_;
  Eigen::VectorXd normal_, r_, z_, stationarity_;
  Eigen::MatrixXd active_normals_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
  std::vector<int> active_;
  std::vector<double> lambda_;
  std::vector<char> in_active_;
};

QpSolution solve_least_distance(const QpProblem& problem);

// max of: stationarity norm ||u - target - G^T lambda||, primal violation
// max(h - G u)^+, dual negativity max(-lambda)^+, and max |lambda_j (G u - h)_j|.
double kkt_residual(const QpProblem& problem, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& multipliers);

}  // namespace edgecbf
