#pragma once

#include <Eigen/Dense>

namespace edgecbf {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
};

// Dense two-phase tableau simplex with Bland's rule.
// Solves  max c^T x  s.t.  A x <= b  over free variables x.
// Intended for the small systems used by the geometry module (n <= 4, m <= ~50).
LpResult lp_maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b);

}  // namespace edgecbf
