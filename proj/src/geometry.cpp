#include "curvesub/geometry.hpp"

#include <cmath>

namespace curvesub {

const char* to_string(Geometry g) {
  switch (g) {
    case Geometry::Euclidean:
      return "euclidean";
    case Geometry::Spherical:
      return "spherical";
    default:
      return "hyperbolic";
  }
}

Geometry parse_geometry(std::string_view s) {
  if (s == "euclidean" || s == "e2") return Geometry::Euclidean;
  if (s == "spherical" || s == "s2") return Geometry::Spherical;
  if (s == "hyperbolic" || s == "h2") return Geometry::Hyperbolic;
  throw UsageError("unknown geometry: " + std::string(s));
}

void validate_point(const Point& p) {
  for (double v : p.c)
    if (!std::isfinite(v)) throw DomainError("non-finite point coordinate");
  if (p.geom == Geometry::Spherical) {
    double n = std::sqrt(p.c[0] * p.c[0] + p.c[1] * p.c[1] + p.c[2] * p.c[2]);
    if (std::fabs(n - 1.0) > 1e-9) throw DomainError("spherical point off the unit sphere");
  } else if (p.geom == Geometry::Hyperbolic) {
    if (p.c[2] != 0.0) throw DomainError("disk point carries a third coordinate");
    double n2 = p.c[0] * p.c[0] + p.c[1] * p.c[1];
    if (n2 >= 1.0) throw DomainError("disk point outside the open unit disk");
  } else if (p.c[2] != 0.0) {
    throw DomainError("planar point carries a third coordinate");
  }
}

void validate_polygon(const ClosedPolygon& poly) {
  size_t n = poly.size();
  if (n < 4) throw UsageError("closed polygon needs at least 4 vertices");
  for (const Point& p : poly.pts) {
    if (p.geom != poly.geom) throw UsageError("polygon vertex geometry mismatch");
    validate_point(p);
  }
  for (size_t i = 0; i < n; ++i) {
    if (geodesic_distance(poly.pts[i], poly.vertex(i + 1)) <= kDegenerateEps)
      throw DegenerateInputError("degenerate polygon edge");
  }
}

std::vector<Vec2<double>> polygon_vec2(const ClosedPolygon& poly) {
  std::vector<Vec2<double>> out;
  out.reserve(poly.size());
  for (const Point& p : poly.pts) out.push_back(as_vec2(p));
  return out;
}

std::vector<Vec3<double>> polygon_vec3(const ClosedPolygon& poly) {
  std::vector<Vec3<double>> out;
  out.reserve(poly.size());
  for (const Point& p : poly.pts) out.push_back(as_vec3(p));
  return out;
}

ClosedPolygon polygon_from_vec2(Geometry g, const std::vector<Vec2<double>>& pts) {
  ClosedPolygon poly{g, {}};
  poly.pts.reserve(pts.size());
  for (const auto& p : pts) poly.pts.push_back({g, {p.x, p.y, 0.0}});
  return poly;
}

ClosedPolygon polygon_from_vec3(Geometry g, const std::vector<Vec3<double>>& pts) {
  ClosedPolygon poly{g, {}};
  poly.pts.reserve(pts.size());
  for (const auto& p : pts) poly.pts.push_back({g, {p.x, p.y, p.z}});
  return poly;
}

namespace {

void require_same(const Point& a, const Point& b) {
  if (a.geom != b.geom) throw UsageError("points from different geometries");
}

}  // namespace

double geodesic_distance(const Point& a, const Point& b) {
  require_same(a, b);
  switch (a.geom) {
    case Geometry::Euclidean:
      return kern::Eucl<double>::dist(as_vec2(a), as_vec2(b));
    case Geometry::Spherical:
      return kern::Sph<double>::dist(as_vec3(a), as_vec3(b));
    default:
      return kern::Hyp<double>::dist(as_vec2(a), as_vec2(b));
  }
}

Point mobius_add(const Point& a, const Point& b) {
  require_same(a, b);
  if (a.geom != Geometry::Hyperbolic) throw UsageError("mobius_add is a disk operation");
  Vec2<double> r = kern::Hyp<double>::mobius_add(as_vec2(a), as_vec2(b));
  return point_h2(r.x, r.y);
}

TangentVector unit_tangent(const Point& p, const Point& q) {
  require_same(p, q);
  TangentVector t{p, {}};
  switch (p.geom) {
    case Geometry::Euclidean: {
      auto d = kern::Eucl<double>::tangent(as_vec2(p), as_vec2(q));
      t.d = {d.x, d.y, 0.0};
      break;
    }
    case Geometry::Spherical: {
      auto d = kern::Sph<double>::tangent(as_vec3(p), as_vec3(q));
      t.d = {d.x, d.y, d.z};
      break;
    }
    default: {
      auto d = kern::Hyp<double>::tangent(as_vec2(p), as_vec2(q));
      t.d = {d.x, d.y, 0.0};
      break;
    }
  }
  return t;
}

std::vector<double> exterior_angles(const ClosedPolygon& poly) {
  validate_polygon(poly);
  size_t n = poly.size();
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    const Point& prev = poly.vertex(i + n - 1);
    const Point& cur = poly.pts[i];
    const Point& next = poly.vertex(i + 1);
    switch (poly.geom) {
      case Geometry::Euclidean:
        out[i] = kern::Eucl<double>::ext_angle(as_vec2(prev), as_vec2(cur), as_vec2(next));
        break;
      case Geometry::Spherical:
        out[i] = kern::Sph<double>::ext_angle(as_vec3(prev), as_vec3(cur), as_vec3(next));
        break;
      default:
        out[i] = kern::Hyp<double>::ext_angle(as_vec2(prev), as_vec2(cur), as_vec2(next));
        break;
    }
  }
  return out;
}

TangentVector rotate_in_tangent_plane(const TangentVector& t, double alpha) {
  TangentVector out = t;
  double c = std::cos(alpha), s = std::sin(alpha);
  if (t.base.geom == Geometry::Spherical) {
    Vec3<double> base = as_vec3(t.base);
    Vec3<double> d{t.d[0], t.d[1], t.d[2]};
    Vec3<double> r = kern::Sph<double>::rotate_tangent(base, d, c, s);
    out.d = {r.x, r.y, r.z};
  } else {
    Vec2<double> r = rotate(Vec2<double>{t.d[0], t.d[1]}, c, s);
    out.d = {r.x, r.y, 0.0};
  }
  return out;
}

Point geodesic_walk(const TangentVector& t, double dist) {
  switch (t.base.geom) {
    case Geometry::Euclidean: {
      auto r = kern::Eucl<double>::exp_map(as_vec2(t.base), Vec2<double>{t.d[0], t.d[1]} * dist);
      return point_e2(r.x, r.y);
    }
    case Geometry::Spherical: {
      auto r = kern::Sph<double>::exp_map(as_vec3(t.base),
                                          Vec3<double>{t.d[0], t.d[1], t.d[2]} * dist);
      return point_s2(r.x, r.y, r.z);
    }
    default: {
      auto r = kern::Hyp<double>::exp_map(as_vec2(t.base), Vec2<double>{t.d[0], t.d[1]} * dist);
      return point_h2(r.x, r.y);
    }
  }
}

Point Isometry::apply(const Point& p) const {
  if (p.geom != geom) throw UsageError("isometry applied across geometries");
  switch (geom) {
    case Geometry::Euclidean: {
      Vec2<double> r = rotate(as_vec2(p), c, s);
      return point_e2(r.x, r.y);
    }
    case Geometry::Spherical: {
      Vec3<double> r = rot.apply(as_vec3(p));
      return point_s2(r.x, r.y, r.z);
    }
    default: {
      Vec2<double> r = kern::Hyp<double>::mobius_add(t, rotate(as_vec2(p), c, s));
      return point_h2(r.x, r.y);
    }
  }
}

ClosedPolygon Isometry::apply(const ClosedPolygon& poly) const {
  ClosedPolygon out{poly.geom, {}};
  out.pts.reserve(poly.size());
  for (const Point& p : poly.pts) out.pts.push_back(apply(p));
  return out;
}

Isometry Isometry::inverse() const {
  Isometry inv;
  inv.geom = geom;
  inv.c = c;
  inv.s = -s;
  inv.rot = rot.transposed();
  // Rotations are Mobius automorphisms, so the inverse keeps the
  // rotate-then-translate form: z -> R^-1(-t) + (x) R^-1 z in gyro terms.
  inv.t = rotate(Vec2<double>{-t.x, -t.y}, inv.c, inv.s);
  return inv;
}

namespace {

Isometry planar_rotation(Geometry g, Rng& rng) {
  Isometry iso;
  iso.geom = g;
  double theta = rng.uniform(0.0, 2.0 * kPi);
  iso.c = std::cos(theta);
  iso.s = std::sin(theta);
  return iso;
}

}  // namespace

Isometry random_rotation(Geometry g, Rng& rng) {
  if (g != Geometry::Spherical) return planar_rotation(g, rng);
  Isometry iso;
  iso.geom = g;
  // Normalized 4-gaussian quaternion is Haar-uniform on SO(3).
  double w = rng.normal(), x = rng.normal(), y = rng.normal(), z = rng.normal();
  double n = std::sqrt(w * w + x * x + y * y + z * z);
  iso.rot = quat_to_mat3(w / n, x / n, y / n, z / n);
  return iso;
}

Isometry random_isometry(Geometry g, Rng& rng) {
  Isometry iso = random_rotation(g, rng);
  if (g == Geometry::Hyperbolic) {
    double theta = rng.uniform(0.0, 2.0 * kPi);
    double r = rng.uniform(0.0, 0.3);
    iso.t = {r * std::cos(theta), r * std::sin(theta)};
  }
  return iso;
}

}  // namespace curvesub
