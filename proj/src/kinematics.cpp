#include "edgecbf/kinematics.hpp"

#include "edgecbf/error.hpp"

#include <algorithm>
#include <cmath>

namespace edgecbf {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Joint rows eligible to rotate, and the chain frames used as edge points.
constexpr int kRotatingRows[] = {0, 1, 2, 4};
constexpr int kEdgeChainFrames[] = {1, 2, 3, 5, 6};

}  // namespace

HomTransform HomTransform::translation(const Eigen::Vector3d& p) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topRightCorner<3, 1>() = p;
  return HomTransform(m);
}

HomTransform HomTransform::rot_x(double angle) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  const double c = std::cos(angle), s = std::sin(angle);
  m(1, 1) = c;
  m(1, 2) = -s;
  m(2, 1) = s;
  m(2, 2) = c;
  return HomTransform(m);
}

HomTransform HomTransform::rot_z(double angle) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  const double c = std::cos(angle), s = std::sin(angle);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return HomTransform(m);
}

HomTransform hom_compose(const HomTransform& a, const HomTransform& b) {
  return HomTransform(a.matrix() * b.matrix());
}

Eigen::Vector3d hom_apply(const HomTransform& t, const Eigen::Vector3d& p) {
  return t.rotation() * p + t.translation();
}

HomTransform dh_link_transform(const DHRow& row, double theta) {
  // Closed form of Rx(alpha) Tx(a) Rz(theta) Tz(d).
  const double th = row.theta_offset + theta;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Eigen::Matrix4d m;
  m << ct, -st, 0.0, row.a,
       st * ca, ct * ca, -sa, -sa * row.d,
       st * sa, ct * sa, ca, ca * row.d,
       0.0, 0.0, 0.0, 1.0;
  return HomTransform(m);
}

std::vector<DHRow> reference_arm_dh() {
  // Table values are in millimetres and degrees.
  constexpr double mm = 0.001;
  const double pi = std::numbers::pi;
  return {
      {0.0, 80 * mm, 0 * mm, 0.0, -100 * kDeg, 100 * kDeg},
      {-pi / 2, 0 * mm, 32 * mm, -pi / 2, -60 * kDeg, 90 * kDeg},
      {0.0, 0 * mm, 108 * mm, 0.0, -180 * kDeg, 50 * kDeg},
      {0.0, 176 * mm, 20 * mm, -pi / 2, -180 * kDeg, 180 * kDeg},
      {pi / 2, 0 * mm, 0 * mm, pi / 2, -180 * kDeg, 40 * kDeg},
      {0.0, -20 * mm, 0 * mm, pi / 2, -180 * kDeg, 180 * kDeg},
  };
}

HomTransform camera_to_arm_transform(const CameraMount& mount, double alpha) {
  const double r = std::hypot(mount.l1, mount.l2);
  const double c = std::cos(alpha), s = std::sin(alpha);
  Eigen::Matrix4d m;
  m << 1.0, 0.0, 0.0, 0.0,
       0.0, c, s, -r * std::cos(alpha + mount.theta),
       0.0, -s, c, r * std::sin(alpha + mount.theta),
       0.0, 0.0, 0.0, 1.0;
  return HomTransform(m);
}

// ---------------------------------------------------------------------------
// RobotModel

RobotModel RobotModel::planar_rod(double length) {
  if (!(length > 0.0) || !std::isfinite(length)) throw InputError("rod length must be positive");
  RobotModel m;
  m.kind_ = Kind::PlanarRod;
  m.rod_length_ = length;
  m.edge_frames_ = {1, 2};
  return m;
}

std::vector<int> RobotModel::all_edge_frames(std::size_t dh_rows) {
  std::vector<int> frames{0};
  for (int f : kEdgeChainFrames)
    if (static_cast<std::size_t>(f) <= dh_rows) frames.push_back(f);
  return frames;
}

std::vector<int> RobotModel::edge_frames_for_active(std::size_t dh_rows, int active_joints) {
  std::vector<int> all = all_edge_frames(dh_rows);
  const std::size_t keep = std::min(all.size(), static_cast<std::size_t>(active_joints) + 2);
  all.resize(keep);
  return all;
}

RobotModel RobotModel::mobile_arm(std::vector<DHRow> rows, int active_joints,
                                  std::vector<int> edge_frames) {
  if (rows.empty() || rows.size() > 6) throw InputError("mobile arm needs 1 to 6 DH rows");
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!(rows[i].min_angle < rows[i].max_angle))
      throw InputError("DH row " + std::to_string(i + 1) + ": min limit must be below max limit");

  std::vector<int> rotating;
  for (int r : kRotatingRows)
    if (static_cast<std::size_t>(r) < rows.size()) rotating.push_back(r);
  if (active_joints < 1 || active_joints > static_cast<int>(rotating.size()))
    throw InputError("active joint count must be between 1 and " +
                     std::to_string(rotating.size()));
  rotating.resize(active_joints);

  if (edge_frames.empty()) throw InputError("mobile arm needs at least one edge point");
  for (int f : edge_frames)
    if (f < 0 || f > static_cast<int>(rows.size()))
      throw InputError("edge frame " + std::to_string(f) + " is outside the DH chain");

  RobotModel m;
  m.kind_ = Kind::MobileArm;
  m.rows_ = std::move(rows);
  m.active_ = std::move(rotating);
  m.edge_frames_ = std::move(edge_frames);
  return m;
}

RobotModel RobotModel::with_active_joints(int active_joints, bool edges_follow_active) const {
  if (is_rod()) throw InputError("a planar rod has no arm joints");
  std::vector<int> edges =
      edges_follow_active ? edge_frames_for_active(rows_.size(), active_joints) : edge_frames_;
  return mobile_arm(rows_, active_joints, std::move(edges));
}

int RobotModel::input_dim() const {
  return is_rod() ? 3 : static_cast<int>(active_.size()) + 2;
}

int RobotModel::edge_count() const { return static_cast<int>(edge_frames_.size()); }

int RobotModel::angle_count() const { return is_rod() ? 1 : static_cast<int>(rows_.size()); }

std::vector<std::string> RobotModel::state_names() const {
  if (is_rod()) return {"x", "y", "phi"};
  std::vector<std::string> names{"x", "y"};
  for (std::size_t i = 0; i < rows_.size(); ++i) names.push_back("theta" + std::to_string(i + 1));
  return names;
}

std::vector<std::string> RobotModel::input_names() const {
  if (is_rod()) return {"vx", "vy", "omega"};
  std::vector<std::string> names;
  for (int r : active_) names.push_back("dtheta" + std::to_string(r + 1));
  names.push_back("vx");
  names.push_back("vy");
  return names;
}

void check_configuration(const RobotModel& model, const Configuration& q) {
  if (q.angles.size() != model.angle_count())
    throw InputError("configuration has " + std::to_string(q.angles.size()) +
                     " angles, model expects " + std::to_string(model.angle_count()));
  if (!q.base.allFinite() || !q.angles.allFinite())
    throw InputError("configuration contains non-finite values");
}

// ---------------------------------------------------------------------------
// Forward kinematics and Jacobians

std::vector<HomTransform> forward_kinematics(const RobotModel& model, const Configuration& q) {
  check_configuration(model, q);
  std::vector<HomTransform> frames;
  const HomTransform base = HomTransform::translation({q.base.x(), q.base.y(), 0.0});
  if (model.is_rod()) {
    const HomTransform center = hom_compose(base, HomTransform::rot_z(q.angles(0)));
    const double half = 0.5 * model.rod_length();
    frames.push_back(center);
    frames.push_back(hom_compose(center, HomTransform::translation({-half, 0.0, 0.0})));
    frames.push_back(hom_compose(center, HomTransform::translation({half, 0.0, 0.0})));
    return frames;
  }
  const auto& rows = model.dh_rows();
  frames.reserve(rows.size() + 1);
  frames.push_back(base);
  for (std::size_t i = 0; i < rows.size(); ++i)
    frames.push_back(hom_compose(frames.back(), dh_link_transform(rows[i], q.angles(i))));
  return frames;
}

std::vector<Eigen::Vector3d> edge_points(const RobotModel& model, const Configuration& q) {
  const auto frames = forward_kinematics(model, q);
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(model.edge_frames().size());
  for (int f : model.edge_frames()) pts.push_back(frames[f].translation());
  return pts;
}

namespace {

// Writes the 3 x input_dim Jacobian of `frame` into rows row0..row0+2 of `out`.
void fill_arm_jacobian(const RobotModel& model, const std::vector<HomTransform>& frames, int frame,
                       Eigen::MatrixXd& out, Eigen::Index row0) {
  const int m = model.input_dim();
  out.block(row0, 0, 3, m).setZero();
  const Eigen::Vector3d p = frames[frame].matrix().col(3).head<3>();
  const auto& active = model.active_joints();
  for (std::size_t j = 0; j < active.size(); ++j) {
    // Joint in DH row r rotates about z of frame r+1.
    const int axis_frame = active[j] + 1;
    if (frame < axis_frame) continue;
    const Eigen::Matrix4d& T = frames[axis_frame].matrix();
    const Eigen::Vector3d c = T.col(2).head<3>().cross(p - T.col(3).head<3>());
    const Eigen::Index col = static_cast<Eigen::Index>(j);
    out(row0, col) = c.x();
    out(row0 + 1, col) = c.y();
    out(row0 + 2, col) = c.z();
  }
  out(row0, m - 2) = 1.0;
  out(row0 + 1, m - 1) = 1.0;
}

Eigen::MatrixXd arm_point_jacobian(const RobotModel& model, const std::vector<HomTransform>& frames,
                                   int frame) {
  Eigen::MatrixXd J(3, model.input_dim());
  fill_arm_jacobian(model, frames, frame, J, 0);
  return J;
}

}  // namespace

Eigen::MatrixXd edge_point_jacobian(const RobotModel& model, const Configuration& q, int k) {
  if (k < 0 || k >= model.edge_count())
    throw InputError("edge index " + std::to_string(k) + " out of range");
  if (model.is_rod()) {
    check_configuration(model, q);
    const double half = 0.5 * model.rod_length();
    const double sign = k == 0 ? -1.0 : 1.0;
    const double phi = q.angles(0);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
    J(0, 0) = 1.0;
    J(1, 1) = 1.0;
    J(0, 2) = -sign * half * std::sin(phi);
    J(1, 2) = sign * half * std::cos(phi);
    return J;
  }
  const auto frames = forward_kinematics(model, q);
  return arm_point_jacobian(model, frames, model.edge_frames()[k]);
}

std::vector<Eigen::MatrixXd> edge_point_jacobians(const RobotModel& model,
                                                  const Configuration& q) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(model.edge_frames().size());
  if (model.is_rod()) {
    for (int k = 0; k < model.edge_count(); ++k) out.push_back(edge_point_jacobian(model, q, k));
    return out;
  }
  const auto frames = forward_kinematics(model, q);
  for (int f : model.edge_frames()) out.push_back(arm_point_jacobian(model, frames, f));
  return out;
}

Eigen::Vector3d reference_point(const RobotModel& model, const Configuration& q) {
  if (model.is_rod()) {
    check_configuration(model, q);
    return {q.base.x(), q.base.y(), 0.0};
  }
  return forward_kinematics(model, q).back().translation();
}

Eigen::MatrixXd reference_jacobian(const RobotModel& model, const Configuration& q) {
  if (model.is_rod()) {
    check_configuration(model, q);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
    J(0, 0) = 1.0;
    J(1, 1) = 1.0;
    return J;
  }
  const auto frames = forward_kinematics(model, q);
  return arm_point_jacobian(model, frames, model.reference_frame());
}

KinematicState kinematic_state(const RobotModel& model, const Configuration& q) {
  KinematicState ks;
  if (model.is_rod()) {
    ks.edge_points = edge_points(model, q);
    const auto jacobians = edge_point_jacobians(model, q);
    ks.edge_jacobians.resize(3 * static_cast<Eigen::Index>(jacobians.size()), model.input_dim());
    for (std::size_t k = 0; k < jacobians.size(); ++k)
      ks.edge_jacobians.middleRows<3>(3 * static_cast<Eigen::Index>(k)) = jacobians[k];
    ks.reference = reference_point(model, q);
    ks.reference_jacobian = reference_jacobian(model, q);
    return ks;
  }
  const auto frames = forward_kinematics(model, q);
  const auto& edges = model.edge_frames();
  ks.edge_points.reserve(edges.size());
  ks.edge_jacobians.resize(3 * static_cast<Eigen::Index>(edges.size()), model.input_dim());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    ks.edge_points.push_back(frames[edges[k]].translation());
    fill_arm_jacobian(model, frames, edges[k], ks.edge_jacobians, 3 * static_cast<Eigen::Index>(k));
  }
  ks.reference = frames.back().translation();
  ks.reference_jacobian.resize(3, model.input_dim());
  fill_arm_jacobian(model, frames, model.reference_frame(), ks.reference_jacobian, 0);
  return ks;
}

// ---------------------------------------------------------------------------
// Workspace

WorkspaceCloud::WorkspaceCloud(std::vector<Eigen::Vector3d> points, double cell_size)
    : points_(std::move(points)), cell_(cell_size) {
  if (!(cell_ > 0.0)) throw InputError("workspace cloud cell size must be positive");
  for (std::uint32_t i = 0; i < points_.size(); ++i) {
    const Eigen::Vector3d& p = points_[i];
    cells_[key(static_cast<std::int64_t>(std::floor(p.x() / cell_)),
               static_cast<std::int64_t>(std::floor(p.y() / cell_)),
               static_cast<std::int64_t>(std::floor(p.z() / cell_)))]
        .push_back(i);
  }
}

std::int64_t WorkspaceCloud::key(std::int64_t i, std::int64_t j, std::int64_t k) const {
  constexpr std::int64_t mask = (std::int64_t{1} << 21) - 1;
  return ((i & mask) << 42) | ((j & mask) << 21) | (k & mask);
}

bool WorkspaceCloud::any_within(const Eigen::Vector3d& p, double radius) const {
  const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
  const auto ci = static_cast<std::int64_t>(std::floor(p.x() / cell_));
  const auto cj = static_cast<std::int64_t>(std::floor(p.y() / cell_));
  const auto ck = static_cast<std::int64_t>(std::floor(p.z() / cell_));
  const double r2 = radius * radius;
  for (std::int64_t i = ci - reach; i <= ci + reach; ++i)
    for (std::int64_t j = cj - reach; j <= cj + reach; ++j)
      for (std::int64_t k = ck - reach; k <= ck + reach; ++k) {
        const auto it = cells_.find(key(i, j, k));
        if (it == cells_.end()) continue;
        for (std::uint32_t idx : it->second)
          if ((points_[idx] - p).squaredNorm() <= r2) return true;
      }
  return false;
}

std::vector<Eigen::Vector3d> workspace_cloud(const RobotModel& model,
                                             const Eigen::VectorXd& rest_angles,
                                             int steps_per_joint) {
  if (model.is_rod()) throw InputError("workspace cloud requires a mobile arm");
  if (steps_per_joint < 2) throw InputError("workspace resolution must be at least 2");
  const auto& rows = model.dh_rows();
  const auto& active = model.active_joints();
  if (rest_angles.size() != static_cast<Eigen::Index>(rows.size()))
    throw InputError("rest angle vector does not match the DH table");

  std::size_t total = 1;
  for (std::size_t j = 0; j < active.size(); ++j) total *= static_cast<std::size_t>(steps_per_joint);

  std::vector<Eigen::Vector3d> cloud;
  cloud.reserve(total);
  std::vector<int> idx(active.size(), 0);
  Configuration q{Eigen::Vector2d::Zero(), rest_angles};
  for (std::size_t n = 0; n < total; ++n) {
    for (std::size_t j = 0; j < active.size(); ++j) {
      const DHRow& row = rows[active[j]];
      const double frac = static_cast<double>(idx[j]) / (steps_per_joint - 1);
      q.angles(active[j]) = row.min_angle + frac * (row.max_angle - row.min_angle);
    }
    cloud.push_back(reference_point(model, q));
    // Odometer increment, last active joint fastest.
    for (int j = static_cast<int>(active.size()) - 1; j >= 0; --j) {
      if (++idx[j] < steps_per_joint) break;
      idx[j] = 0;
    }
  }
  return cloud;
}

bool in_goal_region(const RobotModel& model, const Configuration& q, const Eigen::Vector3d& x_goal,
                    const WorkspaceCloud& cloud, double tol) {
  if (cloud.empty()) throw InputError("in_goal_region: workspace cloud is empty");
  check_configuration(model, q);
  const Eigen::Vector3d local = x_goal - Eigen::Vector3d(q.base.x(), q.base.y(), 0.0);
  return cloud.any_within(local, tol);
}

}  // namespace edgecbf
