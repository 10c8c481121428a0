#include "edgecbf/linprog.hpp"

#include <limits>
#include <vector>

namespace edgecbf {
namespace {

constexpr double kPivotEps = 1e-10;

struct Tableau {
  Eigen::MatrixXd t;           // constraint rows, then the objective row
  std::vector<int> basis;      // basic column per constraint row
  int cols = 0;                // structural columns, RHS excluded
  int rows() const { return static_cast<int>(basis.size()); }
  double& rhs(int r) { return t(r, cols); }
};

void pivot(Tableau& tab, int row, int col) {
  const double p = tab.t(row, col);
  tab.t.row(row) /= p;
  for (int r = 0; r < tab.t.rows(); ++r) {
    if (r == row) continue;
    const double f = tab.t(r, col);
    if (f != 0.0) tab.t.row(r) -= f * tab.t.row(row);
  }
  tab.basis[row] = col;
}

// Maximizes with the objective row holding reduced costs (negative = improving).
// Columns at or beyond `col_limit` may not enter. Returns false when unbounded.
bool run_simplex(Tableau& tab, int col_limit) {
  const int obj = tab.rows();
  for (;;) {
    int enter = -1;
    for (int j = 0; j < col_limit; ++j) {
      if (tab.t(obj, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;

    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < obj; ++r) {
      const double a = tab.t(r, enter);
      if (a <= kPivotEps) continue;
      const double ratio = tab.rhs(r) / a;
      if (ratio < best - 1e-12 ||
          (ratio <= best + 1e-12 && leave >= 0 && tab.basis[r] < tab.basis[leave])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave < 0) return false;
    pivot(tab, leave, enter);
  }
}

void load_objective(Tableau& tab, const Eigen::VectorXd& cost) {
  const int obj = tab.rows();
  tab.t.row(obj).setZero();
  tab.t.row(obj).head(cost.size()) = -cost.transpose();
  for (int r = 0; r < obj; ++r) {
    const double cb = tab.basis[r] < cost.size() ? cost(tab.basis[r]) : 0.0;
    if (cb != 0.0) tab.t.row(obj) += cb * tab.t.row(r);
  }
}

}  // namespace

LpResult lp_maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());

  // Columns: x+ (n), x- (n), slacks (m), artificials (one per negative rhs).
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (b(i) < 0.0) art_rows.push_back(i);
  const int n_struct = 2 * n + m;
  const int n_art = static_cast<int>(art_rows.size());

  Tableau tab;
  tab.cols = n_struct + n_art;
  tab.t = Eigen::MatrixXd::Zero(m + 1, tab.cols + 1);
  tab.basis.assign(m, -1);

  int next_art = n_struct;
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    tab.t.block(i, 0, 1, n) = sign * A.row(i);
    tab.t.block(i, n, 1, n) = -sign * A.row(i);
    tab.t(i, 2 * n + i) = sign;
    tab.rhs(i) = sign * b(i);
    if (sign < 0.0) {
      tab.t(i, next_art) = 1.0;
      tab.basis[i] = next_art++;
    } else {
      tab.basis[i] = 2 * n + i;
    }
  }

  LpResult result;
  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(tab.cols);
    phase1.tail(n_art).setConstant(-1.0);
    load_objective(tab, phase1);
    run_simplex(tab, tab.cols);
    if (tab.t(m, tab.cols) < -1e-9) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (tab.basis[r] < n_struct) continue;
      for (int j = 0; j < n_struct; ++j) {
        if (std::abs(tab.t(r, j)) > 1e-9) {
          pivot(tab, r, j);
          break;
        }
      }
    }
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(tab.cols);
  phase2.head(n) = c;
  phase2.segment(n, n) = -c;
  load_objective(tab, phase2);
  if (!run_simplex(tab, n_struct)) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(tab.cols);
  for (int r = 0; r < m; ++r) y(tab.basis[r]) = tab.rhs(r);
  result.status = LpStatus::Optimal;
  result.x = y.head(n) - y.segment(n, n);
  result.value = c.dot(result.x);
  return result;
}

}  // namespace edgecbf
