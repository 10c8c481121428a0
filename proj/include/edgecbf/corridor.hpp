#pragma once

#include "edgecbf/geometry.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edgecbf {

// Ordered chain of overlapping convex sets C_0 ... C_N ending at the goal.
struct Corridor {
  std::vector<ConvexSet> sets;
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();

  std::size_t last() const { return sets.empty() ? 0 : sets.size() - 1; }
};

struct CorridorState {
  std::size_t index = 0;
  Eigen::Vector3d waypoint = Eigen::Vector3d::Zero();
  std::vector<std::size_t> edge_sets;  // active set per edge point
};

// Leading `dim` coordinates of a 3D position.
Eigen::VectorXd project(const Eigen::Vector3d& p, int dim);

// Goal when it lies in C_i; otherwise the support point of C_i along the
// direction from x_ref toward the center of C_{i+1}, pulled in by `margin`.
Eigen::Vector3d select_waypoint(const Corridor& corridor, std::size_t i,
                                const Eigen::Vector3d& x_ref, double margin);

CorridorState initial_state(const Corridor& corridor, std::size_t edge_count,
                            const Eigen::Vector3d& x_ref, double margin);

// Hands off to C_{i+1} once every edge point lies inside it. The waypoint is
// recomputed only on handoff.
CorridorState advance(const Corridor& corridor, const CorridorState& state,
                      std::span<const Eigen::Vector3d> edge_pts, const Eigen::Vector3d& x_ref,
                      double margin);

struct CorridorReport {
  std::vector<bool> pair_connected;       // entry i: C_i overlaps C_{i+1}
  bool goal_in_last = false;
  std::optional<bool> start_in_first;     // set when edge points were given
  std::vector<std::size_t> start_outside; // edge indices outside C_0

  bool ok() const;
  std::string describe() const;
};

CorridorReport validate(const Corridor& corridor,
                        std::span<const Eigen::Vector3d> start_edge_pts = {});

struct GridCell {
  int row = 0;
  int col = 0;
  bool operator==(const GridCell&) const = default;
};

/// Occupancy grid read from text rows of '.' (free) and '#' (blocked).
/// Row 0 is the top line of the file; cell (r, c) covers
/// x in [c s, (c+1) s], y in [(rows-1-r) s, (rows-r) s] for cell size s.
struct OccupancyGrid {
  int rows = 0;
  int cols = 0;
  double cell_size = 1.0;
  std::vector<char> blocked;  // row-major

  static OccupancyGrid parse(const std::string& text, double cell_size);

  bool is_free(int r, int c) const;
  GridCell cell_at(const Eigen::Vector2d& p) const;
  Eigen::Vector2d cell_center(GridCell cell) const;
};

// Shortest 4-connected cell path between `start` and `goal`.
std::vector<GridCell> grid_shortest_path(const OccupancyGrid& grid, GridCell start, GridCell goal);

// Breadth-first path, then greedy merge of consecutive path cells into
// maximal free rectangles, emitted as boxes. Consecutive boxes share at least
// one cell. The corridor goal is the goal cell center (z = 0).
Corridor grid_maze_decompose(const OccupancyGrid& grid, GridCell start, GridCell goal);

}  // namespace edgecbf
