#include "edgecbf/qp_solver.hpp"

#include "edgecbf/error.hpp"

#include <algorithm>
#include <limits>

namespace edgecbf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_problem(const QpProblem& p) {
  if (p.G.rows() != p.h.size())
    throw InputError("qp: G has " + std::to_string(p.G.rows()) + " rows but h has " +
                     std::to_string(p.h.size()) + " entries");
  if (p.G.rows() > 0 && p.G.cols() != p.target.size())
    throw InputError("qp: G column count does not match target dimension");
  if (!(p.tolerance > 0.0)) throw InputError("qp: tolerance must be positive");
}

}  // namespace

QpSolution LeastDistanceSolver::solve(const QpProblem& p) {
  check_problem(p);
  const int m = static_cast<int>(p.target.size());
  const int c = static_cast<int>(p.G.rows());
  const int max_iter = p.max_iterations > 0 ? p.max_iterations : 10 * (m + c);
  const double tol = p.tolerance;

  QpSolution sol;
  sol.u_star = p.target;
  sol.multipliers = Eigen::VectorXd::Zero(c);

  Eigen::VectorXd& x = sol.u_star;
  std::vector<int>& active = active_;       // rows currently in the working set
  std::vector<double>& lambda = lambda_;    // their multipliers, parallel to `active`
  std::vector<char>& in_active = in_active_;
  active.clear();
  lambda.clear();
  in_active.assign(static_cast<std::size_t>(c), 0);
  slack_.resize(c);

  auto finish = [&](QpStatus status) {
    sol.status = status;
    for (std::size_t k = 0; k < active.size(); ++k) sol.multipliers(active[k]) = lambda[k];
    sol.active_rows = active;
    std::sort(sol.active_rows.begin(), sol.active_rows.end());
    if (status != QpStatus::Optimal) {
      sol.kkt_residual = kkt_residual(p, x, sol.multipliers);
      return sol;
    }
    // slack_ holds G x - h at the final x; multipliers vanish off the active set.
    stationarity_ = x - p.target;
    double res = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      stationarity_.noalias() -= lambda[k] * p.G.row(active[k]).transpose();
      res = std::max(res, -lambda[k]);
      res = std::max(res, std::abs(lambda[k] * slack_(active[k])));
    }
    res = std::max(res, stationarity_.norm());
    if (c > 0) res = std::max(res, -slack_.minCoeff());
    sol.kkt_residual = res;
    return sol;
  };

  for (;;) {
    // Most violated inactive row, lowest index on ties.
    if (c > 0) slack_.noalias() = p.G * x - p.h;
    int add = -1;
    double worst = -tol;
    for (int j = 0; j < c; ++j) {
      if (in_active[j]) continue;
      if (slack_(j) < worst) {
        worst = slack_(j);
        add = j;
      }
    }
    if (add < 0) return finish(QpStatus::Optimal);

    normal_ = p.G.row(add).transpose();
    const Eigen::VectorXd& normal = normal_;
    double lambda_add = 0.0;

    for (;;) {
      if (++sol.iterations > max_iter) return finish(QpStatus::IterationLimit);

      const int q = static_cast<int>(active.size());
      Eigen::VectorXd& r = r_;
      Eigen::VectorXd& z = z_;
      z = normal;
      r.resize(q);
      if (q > 0) {
        active_normals_.resize(m, q);
        for (int k = 0; k < q; ++k) active_normals_.col(k) = p.G.row(active[k]).transpose();
        qr_.compute(active_normals_);
        r = qr_.solve(normal);
        z.noalias() -= active_normals_ * r;
      }

      // Partial step: the first active multiplier to reach zero.
      double t_partial = kInf;
      int drop = -1;
      for (int k = 0; k < q; ++k) {
        if (r(k) <= 1e-12) continue;
        const double t = lambda[k] / r(k);
        if (t < t_partial || (t == t_partial && active[k] < active[drop])) {
          t_partial = t;
          drop = k;
        }
      }

      // Full step: make row `add` tight.
      const double zz = z.squaredNorm();
      double t_full = kInf;
      if (std::sqrt(zz) > 1e-10 * std::max(1.0, normal.norm())) {
        const double s = normal.dot(x) - p.h(add);
        t_full = std::max(0.0, -s / zz);
      }

      if (t_partial == kInf && t_full == kInf) {
        sol.conflict_rows = active;
        sol.conflict_rows.push_back(add);
        std::sort(sol.conflict_rows.begin(), sol.conflict_rows.end());
        return finish(QpStatus::Infeasible);
      }

      if (t_full == kInf) {
        // Dual-only step: `add` is dependent on the working set.
        for (int k = 0; k < q; ++k) lambda[k] -= t_partial * r(k);
        lambda_add += t_partial;
        in_active[active[drop]] = 0;
        active.erase(active.begin() + drop);
        lambda.erase(lambda.begin() + drop);
        continue;
      }

      const double t = std::min(t_partial, t_full);
      x.noalias() += t * z;
      for (int k = 0; k < q; ++k) lambda[k] -= t * r(k);
      lambda_add += t;

      if (t_full <= t_partial) {
        active.push_back(add);
        lambda.push_back(lambda_add);
        in_active[add] = 1;
        break;
      }
      in_active[active[drop]] = 0;
      active.erase(active.begin() + drop);
      lambda.erase(lambda.begin() + drop);
    }
  }
}

QpSolution solve_least_distance(const QpProblem& problem) {
  LeastDistanceSolver solver;
  return solver.solve(problem);
}

double kkt_residual(const QpProblem& p, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& multipliers) {
  const int c = static_cast<int>(p.G.rows());
  if (u.size() != p.target.size() || multipliers.size() != c)
    throw InputError("kkt_residual: dimension mismatch");

  Eigen::VectorXd stationarity = u - p.target;
  if (c > 0) stationarity.noalias() -= p.G.transpose() * multipliers;
  double res = stationarity.norm();
  for (int j = 0; j < c; ++j) {
    const double s = p.G.row(j).dot(u) - p.h(j);
    res = std::max(res, -s);
    res = std::max(res, -multipliers(j));
    res = std::max(res, std::abs(multipliers(j) * s));
  }
  return res;
}

}  // namespace edgecbf
