#include <cmath>

#include "curvesub/geometry.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace curvesub;
using testutil::point_gap;
using testutil::random_point;
using testutil::ref_distance;
using testutil::regular_ngon;

TEST_CASE("geometry names round trip") {
  for (Geometry g : kAllGeometries) CHECK(parse_geometry(to_string(g)) == g);
  CHECK_THROWS_AS(parse_geometry("klein"), UsageError);
}

TEST_CASE("distances match closed forms") {
  CHECK(geodesic_distance(point_e2(0, 0), point_e2(3, 4)) == doctest::Approx(5.0).epsilon(1e-14));

  // quarter arc between orthogonal unit vectors
  CHECK(geodesic_distance(point_s2(1, 0, 0), point_s2(0, 1, 0)) ==
        doctest::Approx(kPi / 2).epsilon(1e-14));

  // from the disk origin, d = 2 atanh r
  double r = 0.5;
  CHECK(geodesic_distance(point_h2(0, 0), point_h2(r, 0)) ==
        doctest::Approx(2.0 * std::atanh(r)).epsilon(1e-14));
}

TEST_CASE("distances agree with the independent model formulas") {
  Rng rng(20240811);
  for (Geometry g : kAllGeometries) {
    for (int k = 0; k < 200; ++k) {
      Point a = random_point(g, rng);
      Point b = random_point(g, rng);
      double d = geodesic_distance(a, b);
      CHECK(d == doctest::Approx(ref_distance(a, b)).epsilon(1e-10));
      CHECK(geodesic_distance(b, a) == doctest::Approx(d).epsilon(1e-12));
      CHECK(d >= 0.0);
    }
  }
}

TEST_CASE("mobius addition identities") {
  Rng rng(77);
  Point zero = point_h2(0, 0);
  for (int k = 0; k < 100; ++k) {
    Point a = random_point(Geometry::Hyperbolic, rng);
    Point b = random_point(Geometry::Hyperbolic, rng);

    Point right_id = mobius_add(a, zero);
    CHECK(point_gap(right_id, a) < 1e-14);
    Point left_id = mobius_add(zero, a);
    CHECK(point_gap(left_id, a) < 1e-14);

    Point neg = point_h2(-a.x(), -a.y());
    Point cancel = mobius_add(neg, a);
    CHECK(std::hypot(cancel.x(), cancel.y()) < 1e-13);

    Point sum = mobius_add(a, b);
    CHECK(std::hypot(sum.x(), sum.y()) < 1.0);

    // left translation is a disk isometry
    Point ca = mobius_add(b, a);
    Point cz = mobius_add(b, zero);
    CHECK(geodesic_distance(ca, cz) == doctest::Approx(geodesic_distance(a, zero)).epsilon(1e-11));
  }
}

TEST_CASE("unit tangents walk back to their targets") {
  Rng rng(31337);
  for (Geometry g : kAllGeometries) {
    for (int k = 0; k < 100; ++k) {
      Point p = random_point(g, rng);
      Point q = random_point(g, rng);
      double d = geodesic_distance(p, q);
      if (d < 1e-6 || (g == Geometry::Spherical && d > kPi - 1e-3)) continue;
      TangentVector t = unit_tangent(p, q);
      double n2 = t.d[0] * t.d[0] + t.d[1] * t.d[1] + t.d[2] * t.d[2];
      CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
      Point back = geodesic_walk(t, d);
      CHECK(point_gap(back, q) < 1e-9);
    }
  }
}

TEST_CASE("tangent plane rotation is counterclockwise") {
  TangentVector t;
  t.base = point_e2(0, 0);
  t.d = {1.0, 0.0, 0.0};
  TangentVector r = rotate_in_tangent_plane(t, kPi / 2);
  CHECK(r.d[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.d[1] == doctest::Approx(1.0).epsilon(1e-15));

  // on the sphere, rotating x-hat at the north pole by +pi/2 (seen from
  // outside) takes it to y-hat
  TangentVector ts;
  ts.base = point_s2(0, 0, 1);
  ts.d = {1.0, 0.0, 0.0};
  TangentVector rs = rotate_in_tangent_plane(ts, kPi / 2);
  CHECK(rs.d[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rs.d[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rs.d[2] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("exterior angles of regular polygons") {
  // convex CCW polygons turn left: positive angles summing to 2 pi on the plane
  for (int n : {4, 6, 12}) {
    ClosedPolygon poly = regular_ngon(Geometry::Euclidean, n, 1.0);
    std::vector<double> deltas = exterior_angles(poly);
    REQUIRE(deltas.size() == static_cast<size_t>(n));
    double sum = 0.0;
    for (double d : deltas) {
      CHECK(d == doctest::Approx(2.0 * kPi / n).epsilon(1e-12));
      sum += d;
    }
    CHECK(sum == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  }

  // spherical excess: a regular spherical polygon turns less than its planar
  // counterpart, a hyperbolic one more
  ClosedPolygon sph = regular_ngon(Geometry::Spherical, 6, 0.6);
  for (double d : exterior_angles(sph)) CHECK(d < 2.0 * kPi / 6);
  ClosedPolygon hyp = regular_ngon(Geometry::Hyperbolic, 6, 0.6);
  for (double d : exterior_angles(hyp)) CHECK(d > 2.0 * kPi / 6);
}

TEST_CASE("exterior angles flip sign under orientation reversal") {
  Rng rng(99);
  for (Geometry g : kAllGeometries) {
    ClosedPolygon poly = testutil::random_polygon(g, 8, rng);
    ClosedPolygon rev = poly;
    std::reverse(rev.pts.begin(), rev.pts.end());
    std::vector<double> d = exterior_angles(poly);
    std::vector<double> dr = exterior_angles(rev);
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i)
      CHECK(dr[i] == doctest::Approx(-d[(n - 1 - i) % n]).epsilon(1e-12));
  }
}

TEST_CASE("isometries preserve distances and angles") {
  Rng rng(4242);
  for (Geometry g : kAllGeometries) {
    ClosedPolygon poly = testutil::random_polygon(g, 7, rng);
    std::vector<double> deltas = exterior_angles(poly);
    for (int k = 0; k < 25; ++k) {
      Isometry iso = random_isometry(g, rng);
      ClosedPolygon moved = iso.apply(poly);
      std::vector<double> moved_deltas = exterior_angles(moved);
      for (size_t i = 0; i < poly.size(); ++i) {
        CHECK(moved_deltas[i] == doctest::Approx(deltas[i]).epsilon(1e-9));
        double d0 = geodesic_distance(poly.vertex(i), poly.vertex(i + 1));
        double d1 = geodesic_distance(moved.vertex(i), moved.vertex(i + 1));
        CHECK(d1 == doctest::Approx(d0).epsilon(1e-9));
      }
      // round trip through the inverse
      ClosedPolygon back = iso.inverse().apply(moved);
      for (size_t i = 0; i < poly.size(); ++i)
        CHECK(point_gap(back.pts[i], poly.pts[i]) < 1e-10);
    }
  }
}

TEST_CASE("point validation rejects model violations") {
  CHECK_THROWS_AS(validate_point(point_s2(0.5, 0.5, 0.5)), DomainError);   // not unit
  CHECK_THROWS_AS(validate_point(point_h2(1.0, 0.1)), DomainError);       // outside disk
  CHECK_THROWS_AS(validate_point(point_e2(std::nan(""), 0)), DomainError);
  CHECK_NOTHROW(validate_point(point_s2(0, 0, -1)));
  CHECK_NOTHROW(validate_point(point_h2(0.99, 0)));
}

TEST_CASE("polygon validation rejects degenerate input") {
  ClosedPolygon tri;
  tri.geom = Geometry::Euclidean;
  tri.pts = {point_e2(0, 0), point_e2(1, 0), point_e2(0, 1)};
  CHECK_THROWS_AS(validate_polygon(tri), UsageError);  // too few vertices

  ClosedPolygon dup = regular_ngon(Geometry::Euclidean, 5, 1.0);
  dup.pts[2] = dup.pts[1];
  CHECK_THROWS_AS(validate_polygon(dup), DegenerateInputError);

  CHECK_NOTHROW(validate_polygon(regular_ngon(Geometry::Spherical, 5, 0.5)));
}

TEST_CASE("antipodal tangents are rejected on the sphere") {
  CHECK_THROWS_AS(unit_tangent(point_s2(1, 0, 0), point_s2(-1, 0, 0)), DomainError);
  CHECK_THROWS_AS(unit_tangent(point_e2(0, 0), point_e2(0, 0)), DegenerateInputError);
}

TEST_CASE("random rotations fix the disk origin and sphere norms") {
  Rng rng(5150);
  for (int k = 0; k < 50; ++k) {
    Isometry rot = random_rotation(Geometry::Hyperbolic, rng);
    Point o = rot.apply(point_h2(0, 0));
    CHECK(std::hypot(o.x(), o.y()) < 1e-15);

    Isometry sph = random_rotation(Geometry::Spherical, rng);
    Point p = sph.apply(random_point(Geometry::Spherical, rng));
    CHECK(p.x() * p.x() + p.y() * p.y() + p.z() * p.z() == doctest::Approx(1.0).epsilon(1e-12));
  }
}
