#include "edgecbf/safety.hpp"

#include "edgecbf/error.hpp"

#include <chrono>
#include <limits>

namespace edgecbf {

Eigen::VectorXd nominal_control(const RobotModel& model, const Configuration& q,
                                const Eigen::Vector3d& waypoint, const SafetyConfig& cfg) {
  return nominal_control(model, kinematic_state(model, q), waypoint, cfg);
}

Eigen::VectorXd nominal_control(const RobotModel& model, const KinematicState& ks,
                                const Eigen::Vector3d& waypoint, const SafetyConfig& cfg) {
  const Eigen::Vector3d v = cfg.k_p * (waypoint - ks.reference);
  if (model.is_rod()) return Eigen::Vector3d(v.x(), v.y(), 0.0);

  const Eigen::MatrixXd& J = ks.reference_jacobian;
  const double lam2 = cfg.lambda_dls * cfg.lambda_dls;
  const Eigen::Matrix3d JJt = J * J.transpose() + lam2 * Eigen::Matrix3d::Identity();
  return J.transpose() * JJt.ldlt().solve(v);
}

std::vector<CbfRow> assemble_constraints(const RobotModel& model, const Configuration& q,
                                         const EdgeSetAssignment& active_sets,
                                         const ClassKappa& kappa, double unsafe_tolerance) {
  if (static_cast<int>(active_sets.size()) != model.edge_count())
    throw InputError("assemble_constraints: need one set list per edge point");
  return assemble_constraints(kinematic_state(model, q), active_sets, kappa, unsafe_tolerance);
}

namespace {

struct RowTag {
  int edge;
  std::size_t set;
  int face;
};

// Rows G u >= h in (edge, set, face) order, written straight into dense
// storage. Joint-limit rows are appended by the caller.
struct RowSystem {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  std::vector<RowTag> tags;
  std::vector<double> edge_min;  // smallest barrier value per edge point
};

RowSystem edge_rows(const KinematicState& ks, const EdgeSetAssignment& active_sets,
                    const ClassKappa& kappa, double unsafe_tolerance, int extra_rows) {
  const int edges = static_cast<int>(ks.edge_points.size());
  if (static_cast<int>(active_sets.size()) != edges)
    throw InputError("assemble_constraints: need one set list per edge point");

  Eigen::Index count = extra_rows;
  for (int k = 0; k < edges; ++k) {
    if (active_sets[k].empty())
      throw InputError("edge point " + std::to_string(k) + " has no active set");
    for (const SetRef& ref : active_sets[k]) count += ref.set->face_count();
  }
  const Eigen::Index m = ks.edge_jacobians.cols();
  RowSystem sys;
  sys.G.resize(count, m);
  sys.h.resize(count);
  sys.tags.reserve(static_cast<std::size_t>(count));
  sys.edge_min.assign(static_cast<std::size_t>(edges), std::numeric_limits<double>::infinity());

  Eigen::Index r = 0;
  for (int k = 0; k < edges; ++k) {
    const auto J = ks.edge_jacobian(k);
    for (const SetRef& ref : active_sets[k]) {
      const ConvexSet& set = *ref.set;
      const int n = set.dim();
      const auto p = ks.edge_points[k].head(n);
      const int faces = set.face_count();
      if (const auto& box = set.box_bounds()) {
        // Faces -e_i then +e_i per axis; rows are +/- the Jacobian rows.
        for (int i = 0; i < n; ++i) {
          sys.h(r + 2 * i) = p(i) - box->lo(i);
          sys.h(r + 2 * i + 1) = box->hi(i) - p(i);
          sys.G.row(r + 2 * i) = J.row(i);
          sys.G.row(r + 2 * i + 1) = -J.row(i);
        }
      } else if (set.is_ellipsoid()) {
        const auto f = barrier_faces(set, p).front();
        sys.G.row(r) = f.gradient.transpose() * J.topRows(n);
        sys.h(r) = f.value;
      } else {
        // H_j = b_j - a_j . p, gradient -a_j.
        sys.h.segment(r, faces) = set.offsets() - set.normals().lazyProduct(p);
        sys.G.middleRows(r, faces) = -set.normals().lazyProduct(J.topRows(n));
      }
      for (int f = 0; f < faces; ++f) {
        const double value = sys.h(r + f);
        if (value < -unsafe_tolerance)
          throw UnsafeStateError(static_cast<std::size_t>(k), ref.id, value);
        sys.edge_min[k] = std::min(sys.edge_min[k], value);
        sys.h(r + f) = -kappa(value);
        sys.tags.push_back({k, ref.id, f});
      }
      r += faces;
    }
  }
  return sys;
}

}  // namespace

std::vector<CbfRow> assemble_constraints(const KinematicState& ks,
                                         const EdgeSetAssignment& active_sets,
                                         const ClassKappa& kappa, double unsafe_tolerance) {
  const RowSystem sys = edge_rows(ks, active_sets, kappa, unsafe_tolerance, 0);
  std::vector<CbfRow> rows(sys.tags.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = static_cast<Eigen::Index>(i);
    rows[i].coefficients = sys.G.row(r).transpose();
    rows[i].offset = sys.h(r);
    rows[i].edge = sys.tags[i].edge;
    rows[i].set = sys.tags[i].set;
    rows[i].face = sys.tags[i].face;
  }
  return rows;
}

std::vector<CbfRow> joint_limit_rows(const RobotModel& model, const Configuration& q,
                                     const ClassKappa& kappa) {
  std::vector<CbfRow> rows;
  if (model.is_rod()) return rows;
  const int m = model.input_dim();
  const auto& active = model.active_joints();
  for (std::size_t j = 0; j < active.size(); ++j) {
    const DHRow& dh = model.dh_rows()[active[j]];
    const double theta = q.angles(active[j]);
    CbfRow upper;
    upper.coefficients = -Eigen::VectorXd::Unit(m, static_cast<Eigen::Index>(j));
    upper.offset = -kappa(dh.max_angle - theta);
    upper.set = static_cast<std::size_t>(active[j]);
    upper.face = 0;
    CbfRow lower;
    lower.coefficients = Eigen::VectorXd::Unit(m, static_cast<Eigen::Index>(j));
    lower.offset = -kappa(theta - dh.min_angle);
    lower.set = static_cast<std::size_t>(active[j]);
    lower.face = 1;
    rows.push_back(std::move(upper));
    rows.push_back(std::move(lower));
  }
  return rows;
}

SafeControl safe_control(const RobotModel& model, const Configuration& q,
                         const EdgeSetAssignment& active_sets, const Eigen::Vector3d& waypoint,
                         const SafetyConfig& cfg, LeastDistanceSolver& solver) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  if (static_cast<int>(active_sets.size()) != model.edge_count())
    throw InputError("safe_control: need one set list per edge point");
  const KinematicState ks = kinematic_state(model, q);
  SafeControl out;
  out.u_nominal = nominal_control(model, ks, waypoint, cfg);
  const auto& active = model.active_joints();
  const int limit_rows = cfg.joint_limit_cbf && !model.is_rod() ? 2 * static_cast<int>(active.size()) : 0;
  RowSystem sys = edge_rows(ks, active_sets, cfg.kappa, cfg.unsafe_tolerance, limit_rows);
  if (limit_rows > 0) {
    // Same rows as joint_limit_rows, written in place.
    Eigen::Index r = static_cast<Eigen::Index>(sys.tags.size());
    for (std::size_t j = 0; j < active.size(); ++j, r += 2) {
      const DHRow& dh = model.dh_rows()[active[j]];
      const double theta = q.angles(active[j]);
      const Eigen::Index col = static_cast<Eigen::Index>(j);
      sys.G.middleRows(r, 2).setZero();
      sys.G(r, col) = -1.0;
      sys.h(r) = -cfg.kappa(dh.max_angle - theta);
      sys.G(r + 1, col) = 1.0;
      sys.h(r + 1) = -cfg.kappa(theta - dh.min_angle);
      sys.tags.push_back({-1, static_cast<std::size_t>(active[j]), 0});
      sys.tags.push_back({-1, static_cast<std::size_t>(active[j]), 1});
    }
  }

  QpProblem qp;
  qp.target = out.u_nominal;
  qp.G = std::move(sys.G);
  qp.h = std::move(sys.h);
  const QpSolution sol = solver.solve(qp);
  out.diagnostics.solve_time_s = std::chrono::duration<double>(Clock::now() - start).count();

  out.status = sol.status;
  out.diagnostics.rows = static_cast<int>(sys.tags.size());
  out.diagnostics.active_constraints = static_cast<int>(sol.active_rows.size());
  out.diagnostics.qp_iterations = sol.iterations;
  if (sol.status == QpStatus::Optimal) {
    out.u = sol.u_star;
  } else {
    out.u = Eigen::VectorXd::Zero(model.input_dim());
    for (int r : sol.conflict_rows) {
      CbfRow row;
      row.coefficients = qp.G.row(r).transpose();
      row.offset = qp.h(r);
      row.edge = sys.tags[r].edge;
      row.set = sys.tags[r].set;
      row.face = sys.tags[r].face;
      out.diagnostics.conflict.push_back(std::move(row));
    }
  }

  out.diagnostics.edge_min_barrier = std::move(sys.edge_min);
  return out;
}

}  // namespace edgecbf
