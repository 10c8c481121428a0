#pragma once

#include "edgecbf/corridor.hpp"
#include "edgecbf/kinematics.hpp"
#include "edgecbf/simulator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace edgecbf {

struct RobotSpec {
  enum class Type { Rod, MobileArm };
  Type type = Type::Rod;
  double length = 1.0;              // rod
  std::vector<DHRow> dh;            // arm
  int active_joints = 4;            // arm
  std::optional<CameraMount> camera_mount;
  // "all", "by_active_joints", or an explicit frame list (0 = base, k = Jk).
  std::string edge_points = "all";
  std::vector<int> edge_frames;

  bool operator==(const RobotSpec&) const = default;
};

struct SetSpec {
  enum class Type { Box, Polytope, Ellipsoid };
  Type type = Type::Box;
  Eigen::VectorXd lo, hi;      // box
  Eigen::MatrixXd A;           // polytope
  Eigen::VectorXd b;
  Eigen::VectorXd center;      // ellipsoid
  Eigen::MatrixXd shape;

  bool operator==(const SetSpec& o) const;
};

struct GridSpec {
  std::string file;  // relative to the scenario directory
  double cell_size = 1.0;

  bool operator==(const GridSpec&) const = default;
};

struct ControlSpec {
  double k_p = 1.0;
  double gamma = 1.0;
  double lambda_dls = 0.01;
  double dt = 1e-3;
  int max_steps = 200000;
  double margin = 0.05;
  double goal_tol = 0.02;
  bool joint_limit_cbf = true;
  InfeasibilityPolicy infeasibility_policy = InfeasibilityPolicy::Halt;
  int record_every = 1;
  int workspace_resolution = 25;

  bool operator==(const ControlSpec&) const = default;
};

struct Scenario {
  std::string name;
  RobotSpec robot;
  std::vector<SetSpec> sets;
  std::optional<GridSpec> grid;
  Eigen::Vector2d start_base = Eigen::Vector2d::Zero();
  Eigen::VectorXd start_angles;
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  ControlSpec control;
  std::optional<std::uint64_t> seed;
  std::filesystem::path base_dir;  // resolves the grid file; not serialized

  bool operator==(const Scenario& o) const;
};

// Parse errors carry "source:line:col"; schema errors carry the line of the
// offending value when known and its JSON pointer. Both throw InputError.
Scenario parse_scenario(const std::string& text, const std::string& source_name,
                        const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

std::string scenario_to_json(const Scenario& s);

RobotModel build_model(const Scenario& s);
Configuration start_configuration(const Scenario& s);
SimConfig sim_config(const Scenario& s);
// Explicit sets, or the decomposed occupancy grid. The goal is the scenario goal.
Corridor build_corridor(const Scenario& s);

}  // namespace edgecbf
