#include "edgecbf/corridor.hpp"

#include "edgecbf/error.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace edgecbf {

Eigen::VectorXd project(const Eigen::Vector3d& p, int dim) {
  if (dim < 1 || dim > 3) throw InputError("set dimension must be 1, 2 or 3");
  return p.head(dim);
}

namespace {

Eigen::Vector3d embed(const Eigen::VectorXd& v) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  out.head(v.size()) = v;
  return out;
}

}  // namespace

Eigen::Vector3d select_waypoint(const Corridor& corridor, std::size_t i,
                                const Eigen::Vector3d& x_ref, double margin) {
  if (i >= corridor.sets.size())
    throw InputError("select_waypoint: set index " + std::to_string(i) + " out of range");
  const ConvexSet& current = corridor.sets[i];
  const int n = current.dim();
  if (contains(current, project(corridor.goal, n))) return corridor.goal;
  if (i == corridor.last())
    throw CorridorError("goal lies outside the last corridor set " + std::to_string(i));

  const Eigen::VectorXd from = project(x_ref, n);
  Eigen::VectorXd d = corridor.sets[i + 1].center().head(n) - from;
  if (d.norm() < 1e-12) d = project(corridor.goal, n) - from;
  if (d.norm() < 1e-12) return x_ref;
  const Eigen::VectorXd wp = farthest_point_along(current, d.normalized(), margin);
  Eigen::Vector3d out = embed(wp);
  if (n < 3) out.tail(3 - n) = x_ref.tail(3 - n);
  return out;
}

CorridorState initial_state(const Corridor& corridor, std::size_t edge_count,
                            const Eigen::Vector3d& x_ref, double margin) {
  CorridorState s;
  s.index = 0;
  s.waypoint = select_waypoint(corridor, 0, x_ref, margin);
  s.edge_sets.assign(edge_count, 0);
  return s;
}

CorridorState advance(const Corridor& corridor, const CorridorState& state,
                      std::span<const Eigen::Vector3d> edge_pts, const Eigen::Vector3d& x_ref,
                      double margin) {
  if (state.index >= corridor.last()) return state;
  const ConvexSet& next = corridor.sets[state.index + 1];
  for (const Eigen::Vector3d& p : edge_pts)
    if (!contains(next, project(p, next.dim()))) return state;

  CorridorState s = state;
  s.index = state.index + 1;
  s.waypoint = select_waypoint(corridor, s.index, x_ref, margin);
  s.edge_sets.assign(edge_pts.size(), s.index);
  return s;
}

bool CorridorReport::ok() const {
  const bool pairs = std::all_of(pair_connected.begin(), pair_connected.end(), [](bool b) { return b; });
  return pairs && goal_in_last && start_in_first.value_or(true);
}

std::string CorridorReport::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < pair_connected.size(); ++i)
    os << "  C_" << i << " -> C_" << i + 1 << ": "
       << (pair_connected[i] ? "connected" : "DISJOINT") << '\n';
  os << "  goal in C_" << pair_connected.size() << ": " << (goal_in_last ? "yes" : "NO") << '\n';
  if (start_in_first) {
    os << "  start edge points in C_0: " << (*start_in_first ? "yes" : "NO");
    if (!start_outside.empty()) {
      os << " (outside:";
      for (std::size_t e : start_outside) os << " e" << e;
      os << ')';
    }
    os << '\n';
  }
  return os.str();
}

CorridorReport validate(const Corridor& corridor, std::span<const Eigen::Vector3d> start_edge_pts) {
  CorridorReport r;
  if (corridor.sets.empty()) return r;
  for (std::size_t i = 0; i + 1 < corridor.sets.size(); ++i) {
    const auto& a = corridor.sets[i];
    const auto& b = corridor.sets[i + 1];
    r.pair_connected.push_back(a.dim() == b.dim() && intersection_nonempty(a, b));
  }
  const ConvexSet& last = corridor.sets.back();
  r.goal_in_last = contains(last, project(corridor.goal, last.dim()));
  if (!start_edge_pts.empty()) {
    const ConvexSet& first = corridor.sets.front();
    for (std::size_t k = 0; k < start_edge_pts.size(); ++k)
      if (!contains(first, project(start_edge_pts[k], first.dim()))) r.start_outside.push_back(k);
    r.start_in_first = r.start_outside.empty();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Occupancy grid

OccupancyGrid OccupancyGrid::parse(const std::string& text, double cell_size) {
  if (!(cell_size > 0.0)) throw InputError("grid cell size must be positive");
  OccupancyGrid g;
  g.cell_size = cell_size;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (g.cols == 0) g.cols = static_cast<int>(line.size());
    if (static_cast<int>(line.size()) != g.cols)
      throw InputError("grid line " + std::to_string(lineno) + ": expected " +
                       std::to_string(g.cols) + " columns, got " + std::to_string(line.size()));
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (line[c] != '.' && line[c] != '#')
        throw InputError("grid line " + std::to_string(lineno) + ", column " +
                         std::to_string(c + 1) + ": expected '.' or '#'");
      g.blocked.push_back(line[c] == '#');
    }
    ++g.rows;
  }
  if (g.rows == 0) throw InputError("grid is empty");
  return g;
}

bool OccupancyGrid::is_free(int r, int c) const {
  return r >= 0 && r < rows && c >= 0 && c < cols && !blocked[static_cast<std::size_t>(r) * cols + c];
}

GridCell OccupancyGrid::cell_at(const Eigen::Vector2d& p) const {
  const int c = static_cast<int>(std::floor(p.x() / cell_size));
  const int r_from_bottom = static_cast<int>(std::floor(p.y() / cell_size));
  return {rows - 1 - r_from_bottom, c};
}

Eigen::Vector2d OccupancyGrid::cell_center(GridCell cell) const {
  return {(cell.col + 0.5) * cell_size, (rows - 1 - cell.row + 0.5) * cell_size};
}

std::vector<GridCell> grid_shortest_path(const OccupancyGrid& grid, GridCell start, GridCell goal) {
  if (!grid.is_free(start.row, start.col))
    throw NoPathError("start cell (" + std::to_string(start.row) + "," + std::to_string(start.col) +
                      ") is blocked or outside the grid");
  if (!grid.is_free(goal.row, goal.col))
    throw NoPathError("goal cell (" + std::to_string(goal.row) + "," + std::to_string(goal.col) +
                      ") is blocked or outside the grid");

  const auto index = [&](GridCell c) { return static_cast<std::size_t>(c.row) * grid.cols + c.col; };
  std::vector<int> parent(static_cast<std::size_t>(grid.rows) * grid.cols, -1);
  std::queue<GridCell> frontier;
  frontier.push(start);
  parent[index(start)] = static_cast<int>(index(start));
  constexpr int dr[] = {-1, 1, 0, 0};
  constexpr int dc[] = {0, 0, -1, 1};
  while (!frontier.empty()) {
    const GridCell cur = frontier.front();
    frontier.pop();
    if (cur == goal) break;
    for (int k = 0; k < 4; ++k) {
      const GridCell nb{cur.row + dr[k], cur.col + dc[k]};
      if (!grid.is_free(nb.row, nb.col) || parent[index(nb)] >= 0) continue;
      parent[index(nb)] = static_cast<int>(index(cur));
      frontier.push(nb);
    }
  }
  if (parent[index(goal)] < 0) throw NoPathError("no free path between start and goal cells");

  std::vector<GridCell> path;
  for (std::size_t at = index(goal);; at = static_cast<std::size_t>(parent[at])) {
    path.push_back({static_cast<int>(at) / grid.cols, static_cast<int>(at) % grid.cols});
    if (at == index(start)) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

struct Rect {
  int r0, r1, c0, c1;  // inclusive
  bool holds(GridCell c) const { return c.row >= r0 && c.row <= r1 && c.col >= c0 && c.col <= c1; }
  Rect joined(GridCell c) const {
    return {std::min(r0, c.row), std::max(r1, c.row), std::min(c0, c.col), std::max(c1, c.col)};
  }
};

bool rect_free(const OccupancyGrid& g, const Rect& r) {
  for (int i = r.r0; i <= r.r1; ++i)
    for (int j = r.c0; j <= r.c1; ++j)
      if (!g.is_free(i, j)) return false;
  return true;
}

Rect inflate(const OccupancyGrid& g, Rect r) {
  for (bool grew = true; grew;) {
    grew = false;
    const Rect candidates[] = {{r.r0 - 1, r.r1, r.c0, r.c1},
                               {r.r0, r.r1 + 1, r.c0, r.c1},
                               {r.r0, r.r1, r.c0 - 1, r.c1},
                               {r.r0, r.r1, r.c0, r.c1 + 1}};
    for (const Rect& c : candidates) {
      if (rect_free(g, c)) {
        r = c;
        grew = true;
      }
    }
  }
  return r;
}

ConvexSet rect_to_box(const OccupancyGrid& g, const Rect& r) {
  const double s = g.cell_size;
  Eigen::Vector2d lo(r.c0 * s, (g.rows - 1 - r.r1) * s);
  Eigen::Vector2d hi((r.c1 + 1) * s, (g.rows - r.r0) * s);
  return ConvexSet::box(lo, hi);
}

}  // namespace

Corridor grid_maze_decompose(const OccupancyGrid& grid, GridCell start, GridCell goal) {
  const std::vector<GridCell> path = grid_shortest_path(grid, start, goal);
  const std::size_t n = path.size();

  Corridor corridor;
  std::size_t i = 0;
  for (;;) {
    Rect box{path[i].row, path[i].row, path[i].col, path[i].col};
    std::size_t j = i;
    while (j + 1 < n && rect_free(grid, box.joined(path[j + 1]))) box = box.joined(path[++j]);
    const Rect rect = inflate(grid, box);
    while (j + 1 < n && rect.holds(path[j + 1])) ++j;
    corridor.sets.push_back(rect_to_box(grid, rect));
    if (j + 1 == n) break;
    i = j;
  }
  const Eigen::Vector2d g = grid.cell_center(goal);
  corridor.goal = {g.x(), g.y(), 0.0};
  return corridor;
}

}  // namespace edgecbf
