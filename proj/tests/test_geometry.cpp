#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edgecbf/error.hpp"
#include "edgecbf/geometry.hpp"
#include "edgecbf/linprog.hpp"
#include "test_support.hpp"

using namespace edgecbf;
using edgecbf::testing::Rng;

namespace {

Eigen::VectorXd v2(double a, double b) { return Eigen::Vector2d(a, b); }
Eigen::VectorXd v3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }

ConvexSet unit_sphere(int n) { return ConvexSet::ellipsoid(Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)); }
ConvexSet unit_box() { return ConvexSet::box(v2(0, 0), v2(1, 1)); }

// A handful of sets covering every representation.
std::vector<ConvexSet> sample_sets() {
  std::vector<ConvexSet> sets;
  sets.push_back(unit_sphere(3));
  Eigen::Matrix2d P;
  P << 0.5, 0.1, 0.1, 2.0;
  sets.push_back(ConvexSet::ellipsoid(v2(1, -1), P));
  sets.push_back(unit_box());
  sets.push_back(ConvexSet::box(v3(-1, 0, 2), v3(0.5, 3, 2.5)));
  // Triangle with unnormalized rows.
  Eigen::MatrixXd A(3, 2);
  A << -1, 0, 0, -2, 3, 3;
  sets.push_back(ConvexSet::polytope(A, Eigen::Vector3d(0, 0, 3)));
  return sets;
}

// Rejection sample inside the set's bounding region.
Eigen::VectorXd sample_inside(const ConvexSet& s, Rng& rng) {
  for (;;) {
    Eigen::VectorXd x = s.center() + rng.vector(s.dim(), -3.0, 3.0);
    if (contains(s, x)) return x;
  }
}

}  // namespace

TEST_CASE("barrier_faces of the unit sphere") {
  const ConvexSet s = unit_sphere(3);
  auto f = barrier_faces(s, v3(0, 0, 0));
  REQUIRE(f.size() == 1);
  CHECK(f[0].value == doctest::Approx(1.0));
  CHECK(f[0].gradient.norm() == doctest::Approx(0.0));
  f = barrier_faces(s, v3(2, 0, 0));
  CHECK(f[0].value == doctest::Approx(-3.0));
  CHECK((f[0].gradient - v3(-4, 0, 0)).norm() < 1e-12);
}

TEST_CASE("barrier_faces of the unit box at its center") {
  const auto f = barrier_faces(unit_box(), v2(0.5, 0.5));
  REQUIRE(f.size() == 4);
  for (const auto& e : f) CHECK(e.value == doctest::Approx(0.5));
}

TEST_CASE("min_barrier and contains") {
  CHECK(min_barrier(unit_box(), v2(0.1, 0.5)) == doctest::Approx(0.1));
  CHECK(min_barrier(unit_sphere(3), v3(1, 0, 0)) == doctest::Approx(0.0));
  CHECK(min_barrier(unit_box(), v2(1.2, 0.5)) == doctest::Approx(-0.2));
  CHECK(contains(unit_sphere(3), v3(0, 0, 0)));
  CHECK(contains(unit_sphere(3), v3(1, 0, 0)));
  CHECK_FALSE(contains(unit_box(), v2(1.5, 0.5)));
}

TEST_CASE("dimension mismatch is an input error") {
  CHECK_THROWS_AS(barrier_faces(unit_box(), v3(0, 0, 0)), InputError);
  CHECK_THROWS_AS(min_barrier(unit_sphere(3), v2(0, 0)), InputError);
}

TEST_CASE("invalid sets are rejected at construction") {
  Eigen::Matrix2d notpd;
  notpd << 1, 0, 0, -1;
  CHECK_THROWS_AS(ConvexSet::ellipsoid(v2(0, 0), notpd), InputError);
  Eigen::Matrix2d asym;
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(ConvexSet::ellipsoid(v2(0, 0), asym), InputError);
  CHECK_THROWS_AS(ConvexSet::box(v2(0, 0), v2(-1, 1)), InputError);
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  CHECK_THROWS_AS(ConvexSet::polytope(A, Eigen::Vector2d(-1, -1)), InputError);
}

TEST_CASE("polytope rows are unit normalized") {
  for (const auto& s : sample_sets()) {
    if (s.is_ellipsoid()) continue;
    for (Eigen::Index i = 0; i < s.normals().rows(); ++i)
      CHECK(s.normals().row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("farthest_point_along examples") {
  CHECK((farthest_point_along(unit_sphere(3), v3(1, 0, 0), 0.0) - v3(1, 0, 0)).norm() < 1e-12);

  // Oracle: dense boundary sampling of the ellipsoid x = c + P^{-1/2} (cos, sin).
  const ConvexSet e = ConvexSet::ellipsoid(v2(0, 0), Eigen::Vector2d(0.25, 1.0).asDiagonal());
  const Eigen::VectorXd p = farthest_point_along(e, v2(1, 0), 0.0);
  double best = -1e9;
  Eigen::Vector2d arg;
  for (int i = 0; i < 200000; ++i) {
    const double t = 2 * M_PI * i / 200000.0;
    const Eigen::Vector2d x(2 * std::cos(t), std::sin(t));
    if (x.x() > best) best = x.x(), arg = x;
  }
  CHECK((p - arg).norm() < 1e-6);
  CHECK((p - v2(2, 0)).norm() < 1e-12);

  // Oracle: enumerate box vertices, ties resolved to the smallest coordinates.
  const Eigen::VectorXd b = farthest_point_along(unit_box(), v2(1, 0), 0.0);
  CHECK((b - v2(1, 0)).norm() < 1e-9);
}

TEST_CASE("farthest_point_along margin pulls toward the center") {
  const Eigen::VectorXd b = farthest_point_along(unit_box(), v2(1, 0), 0.1);
  CHECK((b - (v2(1, 0) + 0.1 * (v2(0.5, 0.5) - v2(1, 0)))).norm() < 1e-9);
}

TEST_CASE("farthest_point_along on an unbounded polytope throws") {
  Eigen::MatrixXd A(1, 2);
  A << 1, 0;
  const ConvexSet half = ConvexSet::polytope(A, Eigen::VectorXd::Ones(1));
  CHECK_FALSE(half.bounded());
  CHECK_THROWS_AS(farthest_point_along(half, v2(0, 1), 0.0), UnboundedError);
  // The optimal face x = 1 is a whole line with no smallest point.
  CHECK_THROWS_AS(farthest_point_along(half, v2(1, 0), 0.0), UnboundedError);

  // Unbounded wedge x <= 1, y <= x with apex (1, 1).
  Eigen::MatrixXd W(2, 2);
  W << 1, 0, -1, 1;
  const ConvexSet wedge = ConvexSet::polytope(W, Eigen::Vector2d(1, 0));
  const Eigen::VectorXd apex = farthest_point_along(wedge, v2(1, 1).normalized(), 0.0);
  CHECK((apex - v2(1, 1)).norm() < 1e-9);
}

TEST_CASE("intersection_nonempty examples") {
  CHECK(intersection_nonempty(unit_box(), ConvexSet::box(v2(0.5, 0.5), v2(1.5, 1.5))));
  CHECK_FALSE(intersection_nonempty(unit_box(), ConvexSet::box(v2(2, 2), v2(3, 3))));
  // (0.6, 0.6) lies in both by substitution.
  const ConvexSet b = ConvexSet::box(v2(0.5, 0.5), v2(1.5, 1.5));
  CHECK(contains(unit_sphere(2), v2(0.6, 0.6)));
  CHECK(contains(b, v2(0.6, 0.6)));
  CHECK(intersection_nonempty(unit_sphere(2), b));
  CHECK_FALSE(intersection_nonempty(unit_sphere(2), ConvexSet::box(v2(0.8, 0.8), v2(2, 2))));
  CHECK_FALSE(intersection_nonempty(unit_sphere(2),
                                    ConvexSet::ellipsoid(v2(3, 0), Eigen::Matrix2d::Identity())));
  CHECK(intersection_nonempty(unit_sphere(2),
                              ConvexSet::ellipsoid(v2(1.9, 0), Eigen::Matrix2d::Identity())));
}

TEST_CASE("property: convex combinations stay inside") {
  Rng rng(11);
  for (const auto& s : sample_sets()) {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd p = sample_inside(s, rng), q = sample_inside(s, rng);
      for (int k = 0; k < 100; ++k) {
        const double lam = rng.uniform(0, 1);
        CHECK(contains(s, lam * p + (1 - lam) * q));
      }
    }
  }
}

TEST_CASE("property: barrier gradients match central differences") {
  Rng rng(12);
  const double h = 1e-6;
  for (const auto& s : sample_sets()) {
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd x = sample_inside(s, rng);
      const auto faces = barrier_faces(s, x);
      for (std::size_t f = 0; f < faces.size(); ++f) {
        Eigen::VectorXd fd(s.dim());
        for (int i = 0; i < s.dim(); ++i) {
          Eigen::VectorXd e = Eigen::VectorXd::Unit(s.dim(), i) * h;
          fd(i) = (barrier_faces(s, x + e)[f].value - barrier_faces(s, x - e)[f].value) / (2 * h);
        }
        CHECK((fd - faces[f].gradient).norm() / std::max(1.0, faces[f].gradient.norm()) < 1e-5);
      }
    }
  }
}

TEST_CASE("property: support points lie on the boundary and are optimal") {
  Rng rng(13);
  for (const auto& s : sample_sets()) {
    std::vector<Eigen::VectorXd> inside;
    for (int i = 0; i < 1000; ++i) inside.push_back(sample_inside(s, rng));
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd d = rng.unit(s.dim());
      const Eigen::VectorXd p = farthest_point_along(s, d, 0.0);
      CHECK(std::abs(min_barrier(s, p)) < 1e-9);
      const double top = d.dot(p);
      double worst = -1e300;
      for (const auto& x : inside) worst = std::max(worst, d.dot(x));
      CHECK(top >= worst - 1e-9);
    }
  }
}

TEST_CASE("lp_maximize agrees with vertex enumeration on boxes") {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd lo = rng.vector(3, -2, 0), hi = lo + rng.vector(3, 0.1, 2);
    const ConvexSet box = ConvexSet::box(lo, hi);
    const Eigen::VectorXd c = rng.vector(3, -1, 1);
    const LpResult r = lp_maximize(c, box.normals(), box.offsets());
    REQUIRE(r.status == LpStatus::Optimal);
    double best = -1e300;
    for (int m = 0; m < 8; ++m) {
      Eigen::Vector3d v;
      for (int i = 0; i < 3; ++i) v(i) = (m >> i) & 1 ? hi(i) : lo(i);
      best = std::max(best, c.dot(v));
    }
    CHECK(r.value == doctest::Approx(best).epsilon(1e-9));
  }
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  CHECK(lp_maximize(Eigen::VectorXd::Ones(1), A, Eigen::Vector2d(-1, -1)).status == LpStatus::Infeasible);
  CHECK(lp_maximize(Eigen::VectorXd::Ones(1), A.topRows(1) * -1, Eigen::VectorXd::Zero(1)).status ==
        LpStatus::Unbounded);
}
