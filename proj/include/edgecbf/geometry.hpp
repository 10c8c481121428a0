#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace edgecbf {

// One smooth barrier H and its gradient at a query point.
struct BarrierEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

// Axis-aligned bounds kept alongside the face representation of a box.
struct BoxBounds {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

/// Convex obstacle-free region: either an ellipsoid
///   { x : 1 - (x-c)^T P (x-c) >= 0 }
/// or a polytope { x : A x <= b } whose rows are normalized to unit length at
/// construction, so each face barrier b_j - a_j^T x is a Euclidean distance.
///
/// Construction validates the set (positive-definite shape, nonempty interior)
/// and throws InputError otherwise. Instances are immutable.
class ConvexSet {
 public:
  enum class Kind { Ellipsoid, Polytope };

  static ConvexSet ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape);
  static ConvexSet polytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets);
  static ConvexSet box(Eigen::VectorXd lo, Eigen::VectorXd hi);

  Kind kind() const { return kind_; }
  bool is_ellipsoid() const { return kind_ == Kind::Ellipsoid; }
  int dim() const { return static_cast<int>(center_.size()); }

  // Number of smooth barriers the set contributes (1 for an ellipsoid).
  int face_count() const;

  // Ellipsoid center, box midpoint, or polytope analytic center. For an
  // unbounded polytope this is the Chebyshev center of the capped LP.
  const Eigen::VectorXd& center() const { return center_; }

  const Eigen::MatrixXd& shape() const { return shape_; }
  const Eigen::MatrixXd& shape_inverse() const { return shape_inv_; }
  const Eigen::MatrixXd& normals() const { return normals_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }

  const std::optional<BoxBounds>& box_bounds() const { return box_; }
  bool bounded() const { return bounded_; }

 private:
  ConvexSet() = default;

  Kind kind_ = Kind::Polytope;
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
  Eigen::MatrixXd shape_inv_;
  Eigen::MatrixXd normals_;
  Eigen::VectorXd offsets_;
  std::optional<BoxBounds> box_;
  bool bounded_ = true;
};

// Per-face barriers at `point`. Ellipsoid: one entry; polytope: one per row.
std::vector<BarrierEvaluation> barrier_faces(const ConvexSet& set,
                                             const Eigen::VectorXd& point);

// Minimum face barrier. Signed Euclidean distance to the nearest face for
// polytopes; the dimensionless algebraic barrier for ellipsoids.
double min_barrier(const ConvexSet& set, const Eigen::VectorXd& point);

bool contains(const ConvexSet& set, const Eigen::VectorXd& point);

// Support point of the set along the unit `direction`, pulled toward center()
// by the fraction `margin` in [0,1). Ties on a polytope face resolve to the
// lexicographically smallest optimizer. Throws UnboundedError when the set has
// no finite maximizer along `direction`.
Eigen::VectorXd farthest_point_along(const ConvexSet& set,
                                     const Eigen::VectorXd& direction,
                                     double margin);

// Exact interval test for two boxes; otherwise a cutting-plane sequence of
// least-distance QPs with at most `probes` rounds.
bool intersection_nonempty(const ConvexSet& a, const ConvexSet& b, int probes = 200);

}  // namespace edgecbf
