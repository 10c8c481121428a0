#pragma once

// Generators and independent oracles shared by the unit tests and the
// acceptance binary. Oracles here never call the code they check.

#include "edgecbf/geometry.hpp"
#include "edgecbf/kinematics.hpp"
#include "edgecbf/qp_solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace edgecbf::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  Eigen::VectorXd vector(int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  Eigen::VectorXd unit(int n) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    do {
      for (int i = 0; i < n; ++i) v(i) = g(gen_);
    } while (v.norm() < 1e-6);
    return v.normalized();
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Uniform angles inside each row's limits, base in [-2, 2]^2.
inline Configuration random_configuration(const RobotModel& model, Rng& rng) {
  Configuration q;
  q.base = rng.vector(2, -2.0, 2.0);
  if (model.is_rod()) {
    q.angles = rng.vector(1, -3.0, 3.0);
    return q;
  }
  const auto& rows = model.dh_rows();
  q.angles.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    q.angles(static_cast<Eigen::Index>(i)) = rng.uniform(rows[i].min_angle, rows[i].max_angle);
  return q;
}

// Applies input u to the configuration without clamping: active joint rates
// then base velocity for an arm, (v_x, v_y, omega) for a rod.
inline Configuration displaced(const RobotModel& model, const Configuration& q, const Eigen::VectorXd& u,
                               double h) {
  Configuration out = q;
  if (model.is_rod()) {
    out.base += h * u.head<2>();
    out.angles(0) += h * u(2);
    return out;
  }
  const auto& active = model.active_joints();
  for (std::size_t j = 0; j < active.size(); ++j) out.angles(active[j]) += h * u(static_cast<Eigen::Index>(j));
  const int m = model.input_dim();
  out.base += h * u.segment<2>(m - 2);
  return out;
}

// Central finite difference of edge point k along every input direction.
inline Eigen::MatrixXd fd_edge_jacobian(const RobotModel& model, const Configuration& q, int k,
                                        double h = 1e-6) {
  const int m = model.input_dim();
  Eigen::MatrixXd J(3, m);
  for (int c = 0; c < m; ++c) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(m, c);
    const Eigen::Vector3d plus = edge_points(model, displaced(model, q, e, h))[k];
    const Eigen::Vector3d minus = edge_points(model, displaced(model, q, e, -h))[k];
    J.col(c) = (plus - minus) / (2.0 * h);
  }
  return J;
}

// ||A - B|| relative to max(||B||, 1); absolute near zero columns.
inline double relative_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return (A - B).norm() / std::max(B.norm(), 1.0);
}

struct OracleResult {
  bool feasible = false;
  Eigen::VectorXd u;
};

// Least-distance projection by enumerating every subset of rows as an
// equality-constrained projection, keeping the feasible candidates and
// returning the one nearest the target. Rank-deficient subsets use a
// least-squares solve and are kept only when they satisfy the equalities.
inline OracleResult brute_force_projection(const Eigen::VectorXd& target, const Eigen::MatrixXd& G,
                                           const Eigen::VectorXd& h, double feas_tol = 1e-9) {
  const int c = static_cast<int>(G.rows());
  OracleResult best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << c); ++mask) {
    std::vector<int> rows;
    for (int i = 0; i < c; ++i)
      if (mask & (1u << i)) rows.push_back(i);
    Eigen::VectorXd u = target;
    if (!rows.empty()) {
      Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), G.cols());
      Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        A.row(static_cast<Eigen::Index>(r)) = G.row(rows[r]);
        b(static_cast<Eigen::Index>(r)) = h(rows[r]);
      }
      // u = target + A^T y with A A^T y = b - A target.
      const Eigen::MatrixXd AAt = A * A.transpose();
      const Eigen::VectorXd y = AAt.completeOrthogonalDecomposition().solve(b - A * target);
      u = target + A.transpose() * y;
      if ((A * u - b).cwiseAbs().maxCoeff() > 1e-9) continue;
    }
    if (c > 0 && (h - G * u).maxCoeff() > feas_tol) continue;
    const double obj = (u - target).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best.feasible = true;
      best.u = u;
    }
  }
  return best;
}

// Independent modified-DH fold: Rx(alpha) Tx(a) Rz(theta) Tz(d) written out
// entry by entry.
inline Eigen::Matrix4d oracle_dh(double alpha, double a, double theta, double d) {
  const double ca = std::cos(alpha), sa = std::sin(alpha), ct = std::cos(theta), st = std::sin(theta);
  Eigen::Matrix4d T;
  T << ct, -st, 0, a,
       st * ca, ct * ca, -sa, -sa * d,
       st * sa, ct * sa, ca, ca * d,
       0, 0, 0, 1;
  return T;
}

// Hand-derived closed form of the 3 x 4 joint block of the four-joint
// end-effector Jacobian, columns (theta1, theta2, theta3, theta5).
// Angles include the DH offsets; a2 = a of row 2, d4 = d of row 3, d6 = d of
// row 5. Used only as a cross-check against the chain-derived Jacobian.
inline Eigen::Matrix<double, 3, 4> closed_form_joint_block(const std::vector<DHRow>& rows,
                                                       const Eigen::VectorXd& angles) {
  auto th = [&](int i) { return rows[i].theta_offset + angles(i); };
  const double a2 = rows[2].a, d4 = rows[3].d, d6 = rows[5].d;
  const double s1 = std::sin(th(0)), c1 = std::cos(th(0));
  const double s2 = std::sin(th(1)), c2 = std::cos(th(1));
  const double s23 = std::sin(th(1) + th(2)), c23 = std::cos(th(1) + th(2));
  const double s235 = std::sin(th(1) + th(2) + th(4)), c235 = std::cos(th(1) + th(2) + th(4));
  Eigen::Matrix<double, 3, 4> f;
  f(0, 0) = -a2 * s1 * s2 - d4 * s1 * c23 + d6 * s1 * c235;
  f(0, 1) = -a2 * c1 * c2 - d4 * c1 * s23 + d6 * c1 * s235;
  f(0, 2) = -d4 * c1 * s23 + d6 * c1 * s235;
  f(0, 3) = d6 * c1 * s235;
  f(1, 0) = -a2 * c1 * s2 + d4 * c1 * s23 + d6 * s1 * s235;
  f(1, 1) = a2 * s1 * c2 - d4 * s1 * s23 + d6 * s1 * s235;
  f(1, 2) = -d4 * s1 * s23 + d6 * s1 * s235;
  f(1, 3) = d6 * s1 * s235;
  f(2, 0) = 0.0;
  f(2, 1) = -a2 * s2 - d4 * c23 + d6 * c235;
  f(2, 2) = -d4 * c23 + d6 * c235;
  f(2, 3) = d6 * c235;
  return f;
}

// Per-entry maximum |closed form - derived| over random configurations of the
// four-joint arm.
inline Eigen::Matrix<double, 3, 4> closed_form_block_discrepancy(const RobotModel& arm4, Rng& rng, int samples) {
  Eigen::Matrix<double, 3, 4> worst = Eigen::Matrix<double, 3, 4>::Zero();
  for (int n = 0; n < samples; ++n) {
    const Configuration q = random_configuration(arm4, rng);
    const Eigen::MatrixXd J = reference_jacobian(arm4, q);
    worst = worst.cwiseMax((closed_form_joint_block(arm4.dh_rows(), q.angles) - J.leftCols<4>()).cwiseAbs());
  }
  return worst;
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }

  // Entries of a named column; empty when absent.
  std::vector<double> values(const std::string& name) const {
    std::vector<double> out;
    const int c = column(name);
    if (c < 0) return out;
    for (const auto& r : rows) out.push_back(r[static_cast<std::size_t>(c)]);
    return out;
  }
};

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline std::optional<Csv> read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  Csv csv;
  std::string line;
  if (!std::getline(is, line)) return std::nullopt;
  csv.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(std::stod(cell));
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

}  // namespace edgecbf::testing
