#include "edgecbf/geometry.hpp"

#include "edgecbf/error.hpp"
#include "edgecbf/linprog.hpp"
#include "edgecbf/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace edgecbf {
namespace {

constexpr double kChebyshevCap = 1e6;

void check_dim(const ConvexSet& set, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != set.dim())
    throw InputError(std::string(what) + ": expected dimension " + std::to_string(set.dim()) +
                     ", got " + std::to_string(v.size()));
}

// max t  s.t.  a_j^T x + t <= b_j,  t <= cap.
LpResult chebyshev_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  Eigen::MatrixXd Ae = Eigen::MatrixXd::Zero(m + 1, n + 1);
  Eigen::VectorXd be(m + 1);
  Ae.topLeftCorner(m, n) = A;
  Ae.col(n).head(m).setOnes();
  Ae(m, n) = 1.0;
  be.head(m) = b;
  be(m) = kChebyshevCap;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
  c(n) = 1.0;
  return lp_maximize(c, Ae, be);
}

// Newton's method on -sum log(b - A x) from a strictly feasible start.
Eigen::VectorXd analytic_center(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                Eigen::VectorXd x) {
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd s = b - A * x;
    const Eigen::VectorXd inv = s.cwiseInverse();
    const Eigen::VectorXd grad = A.transpose() * inv;
    const Eigen::MatrixXd hess = A.transpose() * inv.cwiseAbs2().asDiagonal() * A;
    const Eigen::VectorXd dx = -hess.ldlt().solve(grad);
    const double decrement = -grad.dot(dx);
    if (decrement < 1e-20) break;
    double step = 1.0;
    const double f0 = -s.array().log().sum();
    for (;;) {
      const Eigen::VectorXd sn = b - A * (x + step * dx);
      if ((sn.array() > 0.0).all() &&
          -sn.array().log().sum() <= f0 - 0.25 * step * decrement)
        break;
      step *= 0.5;
      if (step < 1e-12) return x;
    }
    x += step * dx;
  }
  return x;
}

// Exact vertex through the first n linearly independent faces tight at x.
Eigen::VectorXd polish_vertex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& x) {
  const int n = static_cast<int>(A.cols());
  Eigen::MatrixXd rows(0, n);
  Eigen::VectorXd rhs(0);
  for (int j = 0; j < A.rows() && rows.rows() < n; ++j) {
    if (std::abs(b(j) - A.row(j).dot(x)) > 1e-7) continue;
    Eigen::MatrixXd trial(rows.rows() + 1, n);
    trial << rows, A.row(j);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
    lu.setThreshold(1e-9);
    if (lu.rank() < trial.rows()) continue;
    rows = trial;
    rhs.conservativeResize(rhs.size() + 1);
    rhs(rhs.size() - 1) = b(j);
  }
  if (rows.rows() < n) return x;
  return rows.partialPivLu().solve(rhs);
}

Eigen::VectorXd polytope_support(const ConvexSet& set, const Eigen::VectorXd& d) {
  const int n = set.dim();
  if (const auto& box = set.box_bounds()) {
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v(k) = d(k) > 1e-12 ? box->hi(k) : box->lo(k);
    return v;
  }

  const Eigen::MatrixXd& A = set.normals();
  const Eigen::VectorXd& b = set.offsets();
  const LpResult top = lp_maximize(d, A, b);
  if (top.status == LpStatus::Unbounded)
    throw UnboundedError("polytope is unbounded along the query direction");
  if (top.status != LpStatus::Optimal) throw InputError("polytope support LP failed");

  // Lexicographic minimum over the optimal face: fix the objective, then
  // minimize coordinates one at a time.
  const int m = static_cast<int>(A.rows());
  const double slack = 1e-9 * (1.0 + std::abs(top.value));
  Eigen::MatrixXd Ae(m + 1 + 2 * n, n);
  Eigen::VectorXd be(m + 1 + 2 * n);
  Ae.topRows(m) = A;
  be.head(m) = b;
  Ae.row(m) = -d.transpose();
  be(m) = -(top.value - slack);
  int rows = m + 1;
  Eigen::VectorXd x = top.x;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(k) = -1.0;
    const LpResult lex = lp_maximize(c, Ae.topRows(rows), be.head(rows));
    if (lex.status == LpStatus::Unbounded)
      throw UnboundedError("polytope optimal face has no extreme point");
    if (lex.status != LpStatus::Optimal) break;
    x = lex.x;
    Ae.row(rows) = Eigen::RowVectorXd::Unit(n, k);
    be(rows++) = x(k) + 1e-9;
    Ae.row(rows) = -Eigen::RowVectorXd::Unit(n, k);
    be(rows++) = -(x(k) - 1e-9);
  }
  return polish_vertex(A, b, x);
}

bool boxes_overlap(const BoxBounds& a, const BoxBounds& b) {
  for (int k = 0; k < a.lo.size(); ++k)
    if (std::max(a.lo(k), b.lo(k)) > std::min(a.hi(k), b.hi(k))) return false;
  return true;
}

// Appends rows of G u >= h describing (an outer approximation of) the set.
void append_rows(const ConvexSet& s, Eigen::MatrixXd& G, Eigen::VectorXd& h) {
  if (s.is_ellipsoid()) return;
  const int r0 = static_cast<int>(G.rows());
  const int k = static_cast<int>(s.normals().rows());
  G.conservativeResize(r0 + k, s.dim());
  h.conservativeResize(r0 + k);
  G.bottomRows(k) = -s.normals();
  h.tail(k) = -s.offsets();
}

// Supporting halfspace of ellipsoid `e` separating the exterior point u.
void append_ellipsoid_cut(const ConvexSet& e, const Eigen::VectorXd& u, Eigen::MatrixXd& G,
                          Eigen::VectorXd& h) {
  const Eigen::VectorXd r = u - e.center();
  const double q = r.dot(e.shape() * r);
  const Eigen::VectorXd y = e.center() + r / std::sqrt(q);
  const Eigen::VectorXd normal = e.shape() * (y - e.center());
  const int r0 = static_cast<int>(G.rows());
  G.conservativeResize(r0 + 1, e.dim());
  h.conservativeResize(r0 + 1);
  G.row(r0) = -normal.transpose();
  h(r0) = -normal.dot(y);
}

}  // namespace

ConvexSet ConvexSet::ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape) {
  const auto n = center.size();
  if (n == 0) throw InputError("ellipsoid: empty center");
  if (shape.rows() != n || shape.cols() != n)
    throw InputError("ellipsoid: shape must be " + std::to_string(n) + "x" + std::to_string(n));
  if (((shape - shape.transpose()).cwiseAbs().array() > 1e-12).any())
    throw InputError("ellipsoid: shape matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape);
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw InputError("ellipsoid: shape matrix is not positive definite");

  ConvexSet s;
  s.kind_ = Kind::Ellipsoid;
  s.center_ = std::move(center);
  s.shape_ = std::move(shape);
  s.shape_inv_ = s.shape_.inverse();
  return s;
}

ConvexSet ConvexSet::polytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets) {
  const auto m = normals.rows();
  const auto n = normals.cols();
  if (m == 0 || n == 0) throw InputError("polytope: needs at least one face");
  if (offsets.size() != m) throw InputError("polytope: A and b row counts differ");
  for (Eigen::Index j = 0; j < m; ++j) {
    const double norm = normals.row(j).norm();
    if (!(norm > 1e-12)) throw InputError("polytope: face " + std::to_string(j) + " has zero normal");
    normals.row(j) /= norm;
    offsets(j) /= norm;
  }

  const LpResult cheb = chebyshev_lp(normals, offsets);
  if (cheb.status != LpStatus::Optimal || cheb.x(n) <= 1e-9)
    throw InputError("polytope: set is empty or has no interior");

  ConvexSet s;
  s.kind_ = Kind::Polytope;
  s.normals_ = std::move(normals);
  s.offsets_ = std::move(offsets);

  for (Eigen::Index k = 0; k < n && s.bounded_; ++k) {
    for (double sign : {1.0, -1.0}) {
      const Eigen::VectorXd e = sign * Eigen::VectorXd::Unit(n, k);
      if (lp_maximize(e, s.normals_, s.offsets_).status == LpStatus::Unbounded) {
        s.bounded_ = false;
        break;
      }
    }
  }
  const Eigen::VectorXd start = cheb.x.head(n);
  s.center_ = s.bounded_ ? analytic_center(s.normals_, s.offsets_, start) : start;
  return s;
}

ConvexSet ConvexSet::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  const auto n = lo.size();
  if (n == 0 || hi.size() != n) throw InputError("box: min and max must have equal nonzero length");
  for (Eigen::Index k = 0; k < n; ++k)
    if (!(lo(k) < hi(k)))
      throw InputError("box: min must be strictly below max on axis " + std::to_string(k));

  ConvexSet s;
  s.kind_ = Kind::Polytope;
  s.normals_ = Eigen::MatrixXd::Zero(2 * n, n);
  s.offsets_.resize(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    s.normals_(2 * k, k) = -1.0;
    s.offsets_(2 * k) = -lo(k);
    s.normals_(2 * k + 1, k) = 1.0;
    s.offsets_(2 * k + 1) = hi(k);
  }
  s.center_ = 0.5 * (lo + hi);
  s.box_ = BoxBounds{std::move(lo), std::move(hi)};
  return s;
}

int ConvexSet::face_count() const {
  return is_ellipsoid() ? 1 : static_cast<int>(normals_.rows());
}

std::vector<BarrierEvaluation> barrier_faces(const ConvexSet& set, const Eigen::VectorXd& point) {
  check_dim(set, point, "barrier_faces");
  std::vector<BarrierEvaluation> out;
  if (set.is_ellipsoid()) {
    const Eigen::VectorXd r = point - set.center();
    const Eigen::VectorXd pr = set.shape() * r;
    out.push_back({1.0 - r.dot(pr), -2.0 * pr});
    return out;
  }
  const Eigen::VectorXd values = set.offsets() - set.normals() * point;
  out.reserve(values.size());
  for (Eigen::Index j = 0; j < values.size(); ++j)
    out.push_back({values(j), -set.normals().row(j).transpose()});
  return out;
}

double min_barrier(const ConvexSet& set, const Eigen::VectorXd& point) {
  check_dim(set, point, "min_barrier");
  if (set.is_ellipsoid()) {
    const Eigen::VectorXd r = point - set.center();
    return 1.0 - r.dot(set.shape() * r);
  }
  return (set.offsets() - set.normals() * point).minCoeff();
}

bool contains(const ConvexSet& set, const Eigen::VectorXd& point) {
  return min_barrier(set, point) >= 0.0;
}

Eigen::VectorXd farthest_point_along(const ConvexSet& set, const Eigen::VectorXd& direction,
                                     double margin) {
  check_dim(set, direction, "farthest_point_along");
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw InputError("farthest_point_along: direction must have unit norm");
  if (!(margin >= 0.0 && margin < 1.0))
    throw InputError("farthest_point_along: margin must lie in [0,1)");

  if (set.is_ellipsoid()) {
    const Eigen::VectorXd pd = set.shape_inverse() * direction;
    return set.center() + (1.0 - margin) * pd / std::sqrt(direction.dot(pd));
  }
  const Eigen::VectorXd v = polytope_support(set, direction);
  if (margin == 0.0) return v;
  return v + margin * (set.center() - v);
}

bool intersection_nonempty(const ConvexSet& a, const ConvexSet& b, int probes) {
  if (a.dim() != b.dim()) throw InputError("intersection_nonempty: dimension mismatch");
  if (a.box_bounds() && b.box_bounds()) return boxes_overlap(*a.box_bounds(), *b.box_bounds());

  QpProblem qp;
  qp.target = 0.5 * (a.center() + b.center());
  qp.G.resize(0, a.dim());
  qp.h.resize(0);
  append_rows(a, qp.G, qp.h);
  append_rows(b, qp.G, qp.h);

  LeastDistanceSolver solver;
  for (int round = 0; round < std::max(1, probes); ++round) {
    const QpSolution sol = solver.solve(qp);
    if (sol.status == QpStatus::Infeasible) return false;
    const Eigen::VectorXd& u = sol.u_star;
    const double ha = min_barrier(a, u);
    const double hb = min_barrier(b, u);
    if (ha >= -1e-9 && hb >= -1e-9) return true;
    // Cuts are supporting halfspaces, so they never remove common points.
    if (a.is_ellipsoid() && ha < -1e-9) append_ellipsoid_cut(a, u, qp.G, qp.h);
    if (b.is_ellipsoid() && hb < -1e-9) append_ellipsoid_cut(b, u, qp.G, qp.h);
    if (sol.status != QpStatus::Optimal && !a.is_ellipsoid() && !b.is_ellipsoid()) return false;
  }
  return false;
}

}  // namespace edgecbf
