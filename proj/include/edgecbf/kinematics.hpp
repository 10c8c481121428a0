#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

namespace edgecbf {

// Rigid transform stored as a 4x4 homogeneous matrix.
class HomTransform {
 public:
  HomTransform() : m_(Eigen::Matrix4d::Identity()) {}
  explicit HomTransform(const Eigen::Matrix4d& m) : m_(m) {}

  static HomTransform identity() { return HomTransform(); }
  static HomTransform translation(const Eigen::Vector3d& p);
  static HomTransform rot_x(double angle);
  static HomTransform rot_z(double angle);

  const Eigen::Matrix4d& matrix() const { return m_; }
  Eigen::Matrix3d rotation() const { return m_.topLeftCorner<3, 3>(); }
  Eigen::Vector3d translation() const { return m_.topRightCorner<3, 1>(); }

 private:
  Eigen::Matrix4d m_;
};

HomTransform hom_compose(const HomTransform& a, const HomTransform& b);
Eigen::Vector3d hom_apply(const HomTransform& t, const Eigen::Vector3d& p);

/// One row of a modified (Craig) DH table. `d` is the joint offset along z_i,
/// `a` and `alpha` are the a_{i-1}, alpha_{i-1} of the previous link.
struct DHRow {
  double theta_offset = 0.0;
  double d = 0.0;
  double a = 0.0;
  double alpha = 0.0;
  double min_angle = -std::numbers::pi;
  double max_angle = std::numbers::pi;

  bool operator==(const DHRow&) const = default;
};

// Rx(alpha) * Tx(a) * Rz(theta_offset + theta) * Tz(d)
HomTransform dh_link_transform(const DHRow& row, double theta);

// Six-joint table of the reference arm in meters with joint limits in radians.
std::vector<DHRow> reference_arm_dh();

struct CameraMount {
  double l1 = 0.0;
  double l2 = 0.0;
  double theta = 0.0;

  bool operator==(const CameraMount&) const = default;
};

// Camera frame -> arm frame for a given joint-3 angle alpha.
HomTransform camera_to_arm_transform(const CameraMount& mount, double alpha);

/// Generalized state. For a planar rod `base` is the rod center and
/// `angles` holds the single heading phi. For a mobile arm `base` is the
/// planar base position and `angles` holds every DH joint angle (active or
/// frozen).
struct Configuration {
  Eigen::Vector2d base = Eigen::Vector2d::Zero();
  Eigen::VectorXd angles;

  bool operator==(const Configuration& o) const {
    return base == o.base && angles.size() == o.angles.size() && angles == o.angles;
  }
};

/// Kinematic robot description plus its edge points.
///
/// PlanarRod: input u = (v_x, v_y, omega); edge points are the two endpoints,
/// minus end first.
///
/// MobileArm: input u = (active joint rates..., v_x, v_y). The rotating joints
/// are the first N_j of J1, J2, J3, J5; the rest hold their configured angle.
/// Edge points are joint-frame origins: frame 0 is the base reference point
/// at (x, y, 0) and frame k is the center of joint Jk.
class RobotModel {
 public:
  enum class Kind { PlanarRod, MobileArm };

  static RobotModel planar_rod(double length);
  static RobotModel mobile_arm(std::vector<DHRow> rows, int active_joints,
                               std::vector<int> edge_frames);

  // Base point plus J1, J2, J3, J5, J6 (as far as the table reaches).
  static std::vector<int> all_edge_frames(std::size_t dh_rows);
  // Base point plus the first (active_joints + 1) of J1, J2, J3, J5, J6.
  static std::vector<int> edge_frames_for_active(std::size_t dh_rows, int active_joints);

  Kind kind() const { return kind_; }
  bool is_rod() const { return kind_ == Kind::PlanarRod; }

  double rod_length() const { return rod_length_; }
  const std::vector<DHRow>& dh_rows() const { return rows_; }
  // DH row indices of the rotating joints, in input order.
  const std::vector<int>& active_joints() const { return active_; }
  const std::vector<int>& edge_frames() const { return edge_frames_; }

  int input_dim() const;
  int edge_count() const;
  int angle_count() const;
  // Joint index used for the end-effector reference point (last frame).
  int reference_frame() const { return static_cast<int>(rows_.size()); }

  // Same arm with a different rotating-joint count; edge frames are kept
  // unless `edges_follow_active` is set.
  RobotModel with_active_joints(int active_joints, bool edges_follow_active) const;

  std::vector<std::string> state_names() const;
  std::vector<std::string> input_names() const;

 private:
  RobotModel() = default;

  Kind kind_ = Kind::PlanarRod;
  double rod_length_ = 0.0;
  std::vector<DHRow> rows_;
  std::vector<int> active_;
  std::vector<int> edge_frames_;
};

void check_configuration(const RobotModel& model, const Configuration& q);

// World transforms, base frame first. MobileArm: base then one per DH row.
// PlanarRod: rod frame at the center, then the minus and plus endpoints.
std::vector<HomTransform> forward_kinematics(const RobotModel& model, const Configuration& q);

std::vector<Eigen::Vector3d> edge_points(const RobotModel& model, const Configuration& q);

// 3 x input_dim Jacobian of edge point k.
Eigen::MatrixXd edge_point_jacobian(const RobotModel& model, const Configuration& q, int k);

// All edge-point Jacobians from a single forward-kinematics pass.
std::vector<Eigen::MatrixXd> edge_point_jacobians(const RobotModel& model, const Configuration& q);

// End-effector (arm) or rod center, and its 3 x input_dim Jacobian.
Eigen::Vector3d reference_point(const RobotModel& model, const Configuration& q);
Eigen::MatrixXd reference_jacobian(const RobotModel& model, const Configuration& q);

// Everything the controller needs at one configuration, from a single
// forward-kinematics pass.
struct KinematicState {
  std::vector<Eigen::Vector3d> edge_points;
  Eigen::MatrixXd edge_jacobians;  // 3 rows per edge point, stacked in edge order
  Eigen::Vector3d reference = Eigen::Vector3d::Zero();
  Eigen::MatrixXd reference_jacobian;

  auto edge_jacobian(int k) const { return edge_jacobians.middleRows<3>(3 * k); }
};

KinematicState kinematic_state(const RobotModel& model, const Configuration& q);

/// Sampled workspace of the arm: end-effector positions over a grid spanning
/// each active joint's range, in the arm base frame. Holds a voxel index for
/// radius queries.
class WorkspaceCloud {
 public:
  WorkspaceCloud() = default;
  explicit WorkspaceCloud(std::vector<Eigen::Vector3d> points, double cell_size = 0.02);

  const std::vector<Eigen::Vector3d>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }

  // Any cloud point within `radius` of p (base-frame coordinates).
  bool any_within(const Eigen::Vector3d& p, double radius) const;

 private:
  std::int64_t key(std::int64_t i, std::int64_t j, std::int64_t k) const;

  std::vector<Eigen::Vector3d> points_;
  double cell_ = 0.02;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

// Row-major over the active-joint grid (first active joint outermost).
// `rest_angles` supplies the frozen joints.
std::vector<Eigen::Vector3d> workspace_cloud(const RobotModel& model,
                                             const Eigen::VectorXd& rest_angles,
                                             int steps_per_joint);

bool in_goal_region(const RobotModel& model, const Configuration& q,
                    const Eigen::Vector3d& x_goal, const WorkspaceCloud& cloud, double tol);

}  // namespace edgecbf
