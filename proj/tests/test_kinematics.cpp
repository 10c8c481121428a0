#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edgecbf/error.hpp"
#include "edgecbf/kinematics.hpp"
#include "test_support.hpp"

#include <cstdio>
#include <numbers>

using namespace edgecbf;
using edgecbf::testing::Rng;

namespace {

RobotModel arm(int active) {
  return RobotModel::mobile_arm(reference_arm_dh(), active, RobotModel::all_edge_frames(6));
}

Configuration zero_arm() { return {Eigen::Vector2d::Zero(), Eigen::VectorXd::Zero(6)}; }

void check_rigid(const HomTransform& t) {
  const Eigen::Matrix4d& m = t.matrix();
  CHECK((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).norm() == 0.0);
  const Eigen::Matrix3d R = t.rotation();
  CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).norm() < 1e-9);
  CHECK(std::abs(R.determinant() - 1.0) < 1e-9);
}

// Frame origins from an independent fold of the DH table.
std::vector<Eigen::Vector3d> oracle_origins(const std::vector<DHRow>& rows, const Configuration& q) {
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T(0, 3) = q.base.x();
  T(1, 3) = q.base.y();
  std::vector<Eigen::Vector3d> out{T.topRightCorner<3, 1>()};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    T = T * edgecbf::testing::oracle_dh(rows[i].alpha, rows[i].a,
                                        rows[i].theta_offset + q.angles(static_cast<Eigen::Index>(i)),
                                        rows[i].d);
    out.push_back(T.topRightCorner<3, 1>());
  }
  return out;
}

}  // namespace

TEST_CASE("dh_link_transform matches the written-out product") {
  Rng rng(21);
  for (int n = 0; n < 100; ++n) {
    DHRow row{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-3, 3)};
    const double theta = rng.uniform(-3, 3);
    const HomTransform t = dh_link_transform(row, theta);
    check_rigid(t);
    CHECK((t.matrix() - edgecbf::testing::oracle_dh(row.alpha, row.a, row.theta_offset + theta, row.d)).norm() <
          1e-12);
  }
}

TEST_CASE("forward kinematics at zero angles") {
  const RobotModel m = arm(4);
  const auto frames = forward_kinematics(m, zero_arm());
  REQUIRE(frames.size() == 7);
  CHECK((frames[1].translation() - Eigen::Vector3d(0, 0, 0.080)).norm() < 1e-12);
  const auto oracle = oracle_origins(m.dh_rows(), zero_arm());
  for (std::size_t i = 0; i < frames.size(); ++i) CHECK((frames[i].translation() - oracle[i]).norm() < 1e-12);
}

TEST_CASE("planar rod frames and endpoints") {
  const RobotModel rod = RobotModel::planar_rod(1.0);
  const auto frames = forward_kinematics(rod, {Eigen::Vector2d::Zero(), Eigen::VectorXd::Zero(1)});
  REQUIRE(frames.size() == 3);
  CHECK((frames[1].translation() - Eigen::Vector3d(-0.5, 0, 0)).norm() < 1e-12);
  CHECK((frames[2].translation() - Eigen::Vector3d(0.5, 0, 0)).norm() < 1e-12);

  const RobotModel rod2 = RobotModel::planar_rod(2.0);
  Configuration q{Eigen::Vector2d(1, 1), Eigen::VectorXd::Constant(1, std::numbers::pi / 2)};
  const auto pts = edge_points(rod2, q);
  REQUIRE(pts.size() == 2);
  CHECK((pts[0] - Eigen::Vector3d(1, 0, 0)).norm() < 1e-12);
  CHECK((pts[1] - Eigen::Vector3d(1, 2, 0)).norm() < 1e-12);
}

TEST_CASE("base translation shifts every frame exactly") {
  Rng rng(22);
  for (const RobotModel& m : {arm(4), RobotModel::planar_rod(1.4)}) {
    Configuration q = edgecbf::testing::random_configuration(m, rng);
    q.base.setZero();
    Configuration moved = q;
    moved.base = Eigen::Vector2d(1, 2);
    const auto a = forward_kinematics(m, q), b = forward_kinematics(m, moved);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK((b[i].translation() - a[i].translation() - Eigen::Vector3d(1, 2, 0)).norm() < 1e-12);
  }
}

TEST_CASE("property: forward kinematics frames are rigid transforms") {
  Rng rng(23);
  const RobotModel m = arm(4);
  for (int n = 0; n < 100; ++n)
    for (const auto& t : forward_kinematics(m, edgecbf::testing::random_configuration(m, rng))) check_rigid(t);
}

TEST_CASE("edge frames and counts") {
  CHECK(RobotModel::all_edge_frames(6) == std::vector<int>{0, 1, 2, 3, 5, 6});
  // The frame beyond the last rotating joint is the one it swings.
  CHECK(RobotModel::edge_frames_for_active(6, 1) == std::vector<int>{0, 1, 2});
  CHECK(RobotModel::edge_frames_for_active(6, 3) == std::vector<int>{0, 1, 2, 3, 5});
  CHECK(RobotModel::edge_frames_for_active(6, 4) == std::vector<int>{0, 1, 2, 3, 5, 6});
  const RobotModel m = arm(4);
  CHECK(m.edge_count() == 6);
  CHECK(m.input_dim() == 6);
  CHECK(m.active_joints() == std::vector<int>{0, 1, 2, 4});
  CHECK(arm(2).input_dim() == 4);
  CHECK(RobotModel::planar_rod(1).edge_count() == 2);
  CHECK_THROWS_AS(RobotModel::mobile_arm(reference_arm_dh(), 5, {0}), InputError);
  CHECK_THROWS_AS(RobotModel::planar_rod(-1), InputError);
}

TEST_CASE("edge-point spacings at zero angles match the DH fold") {
  const RobotModel m = arm(4);
  const auto pts = edge_points(m, zero_arm());
  const auto oracle = oracle_origins(m.dh_rows(), zero_arm());
  const std::vector<int> frames = m.edge_frames();
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double expected = (oracle[frames[k]] - oracle[frames[k - 1]]).norm();
    CHECK((pts[k] - pts[k - 1]).norm() == doctest::Approx(expected).epsilon(1e-12));
  }
  // Frame-to-frame offsets depend on a and d only.
  CHECK((pts[1] - pts[0]).norm() == doctest::Approx(0.080));
  CHECK((pts[3] - pts[2]).norm() == doctest::Approx(0.108));
}

TEST_CASE("property: edge-point spacings are configuration independent") {
  Rng rng(24);
  const RobotModel m = arm(4);
  const auto ref = edge_points(m, zero_arm());
  for (int n = 0; n < 100; ++n) {
    const auto pts = edge_points(m, edgecbf::testing::random_configuration(m, rng));
    for (std::size_t k = 1; k < pts.size(); ++k)
      CHECK((pts[k] - pts[k - 1]).norm() == doctest::Approx((ref[k] - ref[k - 1]).norm()).epsilon(1e-12));
  }
}

TEST_CASE("Jacobian base columns and rod rotation column") {
  Rng rng(25);
  for (const RobotModel& m : {arm(1), arm(4), RobotModel::planar_rod(2.0)}) {
    const Configuration q = edgecbf::testing::random_configuration(m, rng);
    const int bx = m.is_rod() ? 0 : m.input_dim() - 2;
    for (int k = 0; k < m.edge_count(); ++k) {
      const Eigen::MatrixXd J = edge_point_jacobian(m, q, k);
      CHECK((J.col(bx) - Eigen::Vector3d::UnitX()).norm() == 0.0);
      CHECK((J.col(bx + 1) - Eigen::Vector3d::UnitY()).norm() == 0.0);
    }
  }
  // endpoint = center + (l/2)(cos phi, sin phi); d/dphi at phi = 0 is (0, l/2).
  const RobotModel rod = RobotModel::planar_rod(2.0);
  const Eigen::MatrixXd J = edge_point_jacobian(rod, {Eigen::Vector2d::Zero(), Eigen::VectorXd::Zero(1)}, 1);
  CHECK((J.col(2) - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
  CHECK_THROWS_AS(edge_point_jacobian(rod, {Eigen::Vector2d::Zero(), Eigen::VectorXd::Zero(1)}, 2), InputError);
}

TEST_CASE("Jacobian columns of distal joints are zero") {
  Rng rng(26);
  const RobotModel m = arm(4);
  const Configuration q = edgecbf::testing::random_configuration(m, rng);
  const auto& frames = m.edge_frames();
  for (int k = 0; k < m.edge_count(); ++k) {
    const Eigen::MatrixXd J = edge_point_jacobian(m, q, k);
    for (std::size_t j = 0; j < m.active_joints().size(); ++j)
      if (m.active_joints()[j] + 1 > frames[k]) CHECK(J.col(static_cast<Eigen::Index>(j)).norm() == 0.0);
  }
}

TEST_CASE("property: edge Jacobians match central differences") {
  Rng rng(27);
  for (const RobotModel& m : {RobotModel::planar_rod(1.0), arm(1), arm(2), arm(3), arm(4)}) {
    for (int n = 0; n < 100; ++n) {
      const Configuration q = edgecbf::testing::random_configuration(m, rng);
      const auto all = edge_point_jacobians(m, q);
      const KinematicState ks = kinematic_state(m, q);
      for (int k = 0; k < m.edge_count(); ++k) {
        const Eigen::MatrixXd J = edge_point_jacobian(m, q, k);
        CHECK(edgecbf::testing::relative_error(J, edgecbf::testing::fd_edge_jacobian(m, q, k)) < 1e-5);
        CHECK((all[k] - J).norm() == 0.0);
        CHECK((ks.edge_jacobian(k) - J).norm() == 0.0);
      }
      CHECK((ks.reference_jacobian - reference_jacobian(m, q)).norm() == 0.0);
      CHECK((ks.reference - reference_point(m, q)).norm() == 0.0);
    }
  }
}

TEST_CASE("property: one Euler step keeps edge spacings to second order") {
  Rng rng(28);
  const double dt = 1e-4;
  for (const RobotModel& m : {RobotModel::planar_rod(1.8), arm(4)}) {
    for (int n = 0; n < 100; ++n) {
      const Configuration q = edgecbf::testing::random_configuration(m, rng);
      const Eigen::VectorXd u = rng.vector(m.input_dim(), -1, 1);
      const auto a = edge_points(m, q);
      const auto b = edge_points(m, edgecbf::testing::displaced(m, q, u, dt));
      for (std::size_t k = 1; k < a.size(); ++k) {
        const double la = (a[k] - a[k - 1]).norm(), lb = (b[k] - b[k - 1]).norm();
        if (la > 0) CHECK(std::abs(lb - la) / la < 1e-6);
      }
    }
  }
}

TEST_CASE("closed-form joint block cross-check (diagnostic)") {
  Rng rng(29);
  const auto worst = edgecbf::testing::closed_form_block_discrepancy(arm(4), rng, 500);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c)
      MESSAGE("f" << r + 1 << c + 1 << " max |closed form - derived| = " << worst(r, c));
}

TEST_CASE("workspace cloud cardinality, reach and ordering") {
  const RobotModel m = arm(4);
  const auto cloud = workspace_cloud(m, Eigen::VectorXd::Zero(6), 2);
  CHECK(cloud.size() == 16);
  double reach = 0.0;
  for (const auto& r : m.dh_rows()) reach += std::hypot(r.a, r.d);
  for (const auto& p : workspace_cloud(m, Eigen::VectorXd::Zero(6), 6)) CHECK(p.norm() <= reach + 1e-12);
  // First active joint is outermost: the first two samples differ only in J5.
  Configuration q = zero_arm();
  for (int j : m.active_joints()) q.angles(j) = m.dh_rows()[j].min_angle;
  CHECK((cloud[0] - reference_point(m, q)).norm() < 1e-12);
  q.angles(4) = m.dh_rows()[4].max_angle;
  CHECK((cloud[1] - reference_point(m, q)).norm() < 1e-12);
  CHECK_THROWS_AS(workspace_cloud(m, Eigen::VectorXd::Zero(6), 1), InputError);
}

TEST_CASE("single-joint workspace is a horizontal arc over the J1 range") {
  const RobotModel m = arm(1);
  const int n = 41;
  const auto cloud = workspace_cloud(m, Eigen::VectorXd::Zero(6), n);
  const Eigen::Vector3d p0 = reference_point(m, zero_arm());
  const double radius = p0.head<2>().norm(), phase = std::atan2(p0.y(), p0.x());
  const double lo = m.dh_rows()[0].min_angle, hi = m.dh_rows()[0].max_angle;
  CHECK(lo == doctest::Approx(-100.0 * std::numbers::pi / 180.0));
  CHECK(hi == doctest::Approx(100.0 * std::numbers::pi / 180.0));
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1) + phase;
    const Eigen::Vector3d arc(radius * std::cos(t), radius * std::sin(t), p0.z());
    CHECK((cloud[i] - arc).norm() < 1e-12);
  }
}

TEST_CASE("in_goal_region") {
  const RobotModel m = arm(1);
  const WorkspaceCloud cloud(workspace_cloud(m, Eigen::VectorXd::Zero(6), 25));
  Configuration q = zero_arm();
  q.base = Eigen::Vector2d(0.3, -0.2);
  CHECK(in_goal_region(m, q, reference_point(m, q), cloud, 1e-6));
  CHECK_FALSE(in_goal_region(m, q, Eigen::Vector3d(10, 0, 0), cloud, 0.02));
  CHECK_THROWS_AS(in_goal_region(m, q, Eigen::Vector3d::Zero(), WorkspaceCloud{}, 0.02), InputError);

  // Exhaustive scan oracle for goals about 0.2 m from the base.
  Rng rng(30);
  const RobotModel m4 = arm(4);
  const WorkspaceCloud cloud4(workspace_cloud(m4, Eigen::VectorXd::Zero(6), 8));
  int hits = 0;
  for (int n = 0; n < 200; ++n) {
    const Eigen::Vector3d dir = rng.unit(3);
    const Eigen::Vector3d goal = Eigen::Vector3d(q.base.x(), q.base.y(), 0) + 0.2 * dir;
    double best = 1e300;
    for (const auto& p : cloud4.points()) best = std::min(best, (p + Eigen::Vector3d(q.base.x(), q.base.y(), 0) - goal).norm());
    const bool expected = best <= 0.02;
    hits += expected;
    CHECK(in_goal_region(m4, q, goal, cloud4, 0.02) == expected);
  }
  MESSAGE("mid-reach goals inside the region: " << hits << " / 200");
}

TEST_CASE("camera_to_arm_transform") {
  const CameraMount mount{3.0, 4.0, 0.0};
  HomTransform t = camera_to_arm_transform(mount, 0.0);
  CHECK((t.rotation() - Eigen::Matrix3d::Identity()).norm() < 1e-15);
  CHECK((t.translation() - Eigen::Vector3d(0, -5, 0)).norm() < 1e-12);
  t = camera_to_arm_transform({3.0, 4.0, std::numbers::pi / 2}, 0.0);
  CHECK((t.translation() - Eigen::Vector3d(0, 0, 5)).norm() < 1e-12);

  // Hand evaluation at alpha = pi/4: c = s = sqrt(2)/2, translation (0, -5c, 5s).
  const double c = std::sqrt(0.5);
  t = camera_to_arm_transform(mount, std::numbers::pi / 4);
  const Eigen::Vector3d p(1, 2, 3);
  const Eigen::Vector3d expected(1, c * 2 + c * 3 - 5 * c, -c * 2 + c * 3 + 5 * c);
  CHECK((hom_apply(t, p) - expected).norm() < 1e-12);

  Rng rng(31);
  for (int n = 0; n < 100; ++n) {
    const HomTransform r = camera_to_arm_transform({rng.uniform(-1, 1), rng.uniform(0.1, 1), rng.uniform(-3, 3)},
                                                   rng.uniform(-3, 3));
    check_rigid(r);
    CHECK((r.rotation().col(0) - Eigen::Vector3d::UnitX()).norm() == 0.0);
  }
}

TEST_CASE("check_configuration rejects mismatched sizes") {
  CHECK_THROWS_AS(edge_points(arm(4), {Eigen::Vector2d::Zero(), Eigen::VectorXd::Zero(5)}), InputError);
  CHECK_THROWS_AS(edge_points(RobotModel::planar_rod(1), {Eigen::Vector2d::Zero(), Eigen::VectorXd::Zero(2)}),
                  InputError);
}
