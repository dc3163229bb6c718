#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "curvesub/autodiff.hpp"
#include "curvesub/rng.hpp"
#include "curvesub/vec.hpp"

namespace curvesub {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Admissible insertion angles. The 0.02 margin keeps the classical clamp and
// the network's output range strictly inside (-pi/4, pi/4), where the
// insertion trigonometry is well posed (cos|alpha| > 0.72).
inline constexpr double kAlphaMax = kPi / 4.0 - 0.02;
inline constexpr double kAlphaMin = -kAlphaMax;

inline constexpr double kDegenerateEps = 1e-12;
inline constexpr double kHypEdgeClamp = 4.0;    // hyperbolic edge-length guard rail
inline constexpr double kHypNormClamp = 0.999;  // inserted points stay off the rim

enum class Geometry { Euclidean, Spherical, Hyperbolic };

constexpr int curvature_code(Geometry g) {
  return g == Geometry::Euclidean ? 0 : (g == Geometry::Spherical ? 1 : -1);
}

constexpr int ambient_dim(Geometry g) { return g == Geometry::Spherical ? 3 : 2; }

const char* to_string(Geometry g);
Geometry parse_geometry(std::string_view s);

inline constexpr std::array<Geometry, 3> kAllGeometries = {
    Geometry::Euclidean, Geometry::Spherical, Geometry::Hyperbolic};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tagged ambient coordinates: (x, y) for the plane and the Poincare disk,
// (x, y, z) on the unit sphere. The unused slot stays zero.
struct Point {
  Geometry geom = Geometry::Euclidean;
  std::array<double, 3> c{};

  double x() const { return c[0]; }
  double y() const { return c[1]; }
  double z() const { return c[2]; }
};

inline Point point_e2(double x, double y) { return {Geometry::Euclidean, {x, y, 0.0}}; }
inline Point point_s2(double x, double y, double z) { return {Geometry::Spherical, {x, y, z}}; }
inline Point point_h2(double x, double y) { return {Geometry::Hyperbolic, {x, y, 0.0}}; }

inline Vec2<double> as_vec2(const Point& p) { return {p.c[0], p.c[1]}; }
inline Vec3<double> as_vec3(const Point& p) { return {p.c[0], p.c[1], p.c[2]}; }

void validate_point(const Point& p);  // throws DomainError on model violations

struct TangentVector {
  Point base;
  std::array<double, 3> d{};
};

struct ClosedPolygon {
  Geometry geom = Geometry::Euclidean;
  std::vector<Point> pts;

  size_t size() const { return pts.size(); }
  const Point& vertex(size_t i) const { return pts[i % pts.size()]; }
};

// At least 4 vertices, every point valid for its model, no degenerate edge
// (closing edge included). Throws on violation.
void validate_polygon(const ClosedPolygon& poly);

// Length rule for hyperbolic insertion. Corrected uses the identity that
// makes alpha = 0 land on the geodesic midpoint; Paper keeps the doubled
// arctanh argument of the originally printed rule, for comparison runs.
enum class HypInsertMode { Corrected, Paper };

// ---------------------------------------------------------------------------
// Per-geometry kernels, templated on the scalar. T is double or ad::Var; both
// share one code path so primal values agree bitwise between plain evaluation
// and taped evaluation.
//
// Conventions, identical in all three geometries:
//   * tangent(p, q) is the unit direction at p toward q.
//   * exterior angles are CCW-positive via atan2(cross, dot) of the incoming
//     and outgoing unit tangents.
//   * insert(p, q, alpha) places the apex of the isoceles triangle with base
//     angles |alpha| on the outward side: direction = tangent rotated by
//     -alpha. With CCW-positive angles this is what makes the mu = 0 rule
//     circle-exact on the plane (inscribed-angle theorem) and agree with the
//     classical linear four-point direction on shallow arcs.

namespace kern {

using ad::clamp_guard;
using ad::value_of;

template <typename T>
struct Eucl {
  using Scalar = T;
  using Pt = Vec2<T>;
  static constexpr Geometry geom = Geometry::Euclidean;

  static T dist(const Pt& p, const Pt& q) {
    using std::sqrt;
    using ad::sqrt;
    return sqrt(norm2(q - p));
  }

  static Pt tangent(const Pt& p, const Pt& q) {
    T e = dist(p, q);
    if (value_of(e) <= kDegenerateEps)
      throw DegenerateInputError("unit tangent undefined for coincident points");
    return (q - p) * (1.0 / e);
  }

  static T ext_angle(const Pt& prev, const Pt& cur, const Pt& next) {
    using std::atan2;
    using ad::atan2;
    Pt v = tangent(cur, prev) * T(-1.0);
    Pt t = tangent(cur, next);
    return atan2(cross(v, t), dot(v, t));
  }

  static Pt insert(const Pt& p, const Pt& q, const T& alpha, HypInsertMode) {
    using std::cos;
    using std::sin;
    using ad::cos;
    using ad::sin;
    T e = dist(p, q);
    if (value_of(e) <= kDegenerateEps)
      throw DegenerateInputError("insertion on a degenerate edge");
    // sin|a| / sin(pi - 2|a|) * e collapses to e / (2 cos a); no 0/0 anywhere
    // on the admissible interval and smooth through alpha = 0.
    T e_new = e / (2.0 * cos(alpha));
    Pt dir = rotate(tangent(p, q), cos(alpha), -sin(alpha));
    return p + e_new * dir;
  }

  static Pt exp_map(const Pt& p, const Pt& v) { return p + v; }
  static Pt log_map(const Pt& p, const Pt& q) { return q - p; }
};

template <typename T>
struct Sph {
  using Scalar = T;
  using Pt = Vec3<T>;
  static constexpr Geometry geom = Geometry::Spherical;

  // Chord identity 2 asin(|q-p|/2): equal to acos<p,q> for unit vectors but
  // well conditioned near d = 0, where Chamfer pairs actually live.
  static T dist(const Pt& p, const Pt& q) {
    using std::sqrt;
    using ad::sqrt;
    T half_chord = 0.5 * sqrt(norm2(q - p));
    using std::asin;
    using ad::asin;
    return 2.0 * asin(clamp_guard(half_chord, -1.0, 1.0));
  }

  static Pt tangent(const Pt& p, const Pt& q) {
    using std::sqrt;
    using ad::sqrt;
    Pt w = q - dot(p, q) * p;
    T n = sqrt(norm2(w));
    if (value_of(n) <= kDegenerateEps) {
      if (value_of(dot(p, q)) < 0.0)
        throw DomainError("tangent direction undefined for antipodal points");
      throw DegenerateInputError("unit tangent undefined for coincident points");
    }
    return w * (1.0 / n);
  }

  static T ext_angle(const Pt& prev, const Pt& cur, const Pt& next) {
    using std::atan2;
    using ad::atan2;
    Pt v = tangent(cur, prev) * T(-1.0);
    Pt t = tangent(cur, next);
    return atan2(dot(cross(v, t), cur), dot(v, t));
  }

  // CCW rotation of a unit tangent about the base point (viewed from outside).
  static Pt rotate_tangent(const Pt& base, const Pt& t, const T& c, const T& s) {
    return c * t + s * cross(base, t);
  }

  static Pt insert(const Pt& p, const Pt& q, const T& alpha, HypInsertMode) {
    using std::atan;
    using std::cos;
    using std::sin;
    using std::tan;
    using ad::atan;
    using ad::cos;
    using ad::sin;
    using ad::tan;
    T e = dist(p, q);
    if (value_of(e) <= kDegenerateEps)
      throw DegenerateInputError("insertion on a degenerate edge");
    T e_new = atan(tan(0.5 * e) / cos(alpha));
    Pt dir = rotate_tangent(p, tangent(p, q), cos(alpha), -sin(alpha));
    return normalized(cos(e_new) * p + sin(e_new) * dir);
  }

  static Pt exp_map(const Pt& p, const Pt& v) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    using ad::cos;
    using ad::sin;
    using ad::sqrt;
    T len = sqrt(norm2(v));
    if (value_of(len) <= kDegenerateEps) return p;
    return normalized(cos(len) * p + (sin(len) / len) * v);
  }

  static Pt log_map(const Pt& p, const Pt& q) {
    using std::sqrt;
    using ad::sqrt;
    T d = dist(p, q);
    if (value_of(d) <= kDegenerateEps) return Pt{T(0.0), T(0.0), T(0.0)};
    if (value_of(dot(p, q)) <= -1.0 + 1e-12)
      throw DomainError("log map undefined for antipodal points");
    Pt w = q - dot(p, q) * p;
    T n = sqrt(norm2(w));
    return (d / n) * w;
  }

  static Pt normalized(const Pt& u) {
    using std::sqrt;
    using ad::sqrt;
    return u * (1.0 / sqrt(norm2(u)));
  }
};

template <typename T>
struct Hyp {
  using Scalar = T;
  using Pt = Vec2<T>;
  static constexpr Geometry geom = Geometry::Hyperbolic;

  static Pt mobius_add(const Pt& a, const Pt& b) {
    T ab = dot(a, b);
    T na = norm2(a);
    T nb = norm2(b);
    T den = 1.0 + 2.0 * ab + na * nb;
    return ((1.0 + 2.0 * ab + nb) / den) * a + ((1.0 - na) / den) * b;
  }

  static Pt gyro_diff(const Pt& p, const Pt& q) { return mobius_add(-p, q); }

  static T dist(const Pt& p, const Pt& q) {
    using std::sqrt;
    using ad::sqrt;
    using std::atanh;
    using ad::atanh;
    T r = sqrt(norm2(gyro_diff(p, q)));
    return 2.0 * atanh(clamp_guard(r, 0.0, 1.0 - 1e-15));
  }

  static Pt tangent(const Pt& p, const Pt& q) {
    using std::sqrt;
    using ad::sqrt;
    Pt m = gyro_diff(p, q);
    T n = sqrt(norm2(m));
    if (value_of(n) <= kDegenerateEps)
      throw DegenerateInputError("unit tangent undefined for coincident points");
    return m * (1.0 / n);
  }

  // The disk model is conformal, so the planar atan2 of the gyro-translated
  // tangents is the hyperbolic angle.
  static T ext_angle(const Pt& prev, const Pt& cur, const Pt& next) {
    using std::atan2;
    using ad::atan2;
    Pt v = tangent(cur, prev) * T(-1.0);
    Pt t = tangent(cur, next);
    return atan2(cross(v, t), dot(v, t));
  }

  static Pt insert(const Pt& p, const Pt& q, const T& alpha, HypInsertMode mode) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    using std::tanh;
    using std::atanh;
    using ad::cos;
    using ad::sin;
    using ad::sqrt;
    using ad::tanh;
    using ad::atanh;
    T e = dist(p, q);
    if (value_of(e) <= kDegenerateEps)
      throw DegenerateInputError("insertion on a degenerate edge");
    e = clamp_guard(e, 0.0, kHypEdgeClamp);
    // Right-triangle identity tanh(e_new) = tanh(e/2) / cos(alpha). At the
    // guard-rail extremes the ratio can cross 1, so it is clamped below the
    // atanh pole and the norm clamp below catches the resulting rim point.
    T ratio = clamp_guard(tanh(0.5 * e) / cos(alpha), 0.0, 1.0 - 1e-12);
    T e_new = mode == HypInsertMode::Corrected ? atanh(ratio) : 2.0 * atanh(ratio);
    Pt dir = rotate(tangent(p, q), cos(alpha), -sin(alpha));
    Pt out = mobius_add(p, tanh(0.5 * e_new) * dir);
    T n = sqrt(norm2(out));
    if (value_of(n) > kHypNormClamp) {
      double scale = kHypNormClamp / value_of(n);
      return Pt{T(value_of(out.x) * scale), T(value_of(out.y) * scale)};
    }
    return out;
  }

  static Pt exp_map(const Pt& p, const Pt& v) {
    using std::sqrt;
    using std::tanh;
    using ad::sqrt;
    using ad::tanh;
    T len = sqrt(norm2(v));
    if (value_of(len) <= kDegenerateEps) return p;
    return mobius_add(p, (tanh(0.5 * len) / len) * v);
  }

  static Pt log_map(const Pt& p, const Pt& q) {
    using std::sqrt;
    using std::atanh;
    using ad::sqrt;
    using ad::atanh;
    Pt m = gyro_diff(p, q);
    T n = sqrt(norm2(m));
    if (value_of(n) <= kDegenerateEps) return Pt{T(0.0), T(0.0)};
    T d = 2.0 * atanh(clamp_guard(n, 0.0, 1.0 - 1e-15));
    return (d / n) * m;
  }
};

}  // namespace kern

template <Geometry G, typename T>
struct KernelFor;
template <typename T>
struct KernelFor<Geometry::Euclidean, T> {
  using type = kern::Eucl<T>;
};
template <typename T>
struct KernelFor<Geometry::Spherical, T> {
  using type = kern::Sph<T>;
};
template <typename T>
struct KernelFor<Geometry::Hyperbolic, T> {
  using type = kern::Hyp<T>;
};

template <class F>
decltype(auto) dispatch_geometry(Geometry g, F&& f) {
  switch (g) {
    case Geometry::Euclidean:
      return f(std::integral_constant<Geometry, Geometry::Euclidean>{});
    case Geometry::Spherical:
      return f(std::integral_constant<Geometry, Geometry::Spherical>{});
    default:
      return f(std::integral_constant<Geometry, Geometry::Hyperbolic>{});
  }
}

// Typed views of a polygon's coordinates for the templated kernels.
std::vector<Vec2<double>> polygon_vec2(const ClosedPolygon& poly);
std::vector<Vec3<double>> polygon_vec3(const ClosedPolygon& poly);
ClosedPolygon polygon_from_vec2(Geometry g, const std::vector<Vec2<double>>& pts);
ClosedPolygon polygon_from_vec3(Geometry g, const std::vector<Vec3<double>>& pts);

// ---------------------------------------------------------------------------
// Double-facing operations.

double geodesic_distance(const Point& a, const Point& b);
Point mobius_add(const Point& a, const Point& b);
TangentVector unit_tangent(const Point& p, const Point& q);
std::vector<double> exterior_angles(const ClosedPolygon& poly);

// CCW-positive rotation of a tangent vector within its tangent plane.
TangentVector rotate_in_tangent_plane(const TangentVector& t, double alpha);

// Walk a geodesic distance along a unit tangent.
Point geodesic_walk(const TangentVector& t, double dist);

// Orientation-preserving model isometry, stored as rotate-then-translate
// (the translation part is only used on the disk).
struct Isometry {
  Geometry geom = Geometry::Euclidean;
  double c = 1.0, s = 0.0;   // SO(2) part for E2 / H2
  Vec2<double> t{0.0, 0.0};  // Mobius translation for H2
  Mat3 rot;                  // SO(3) for S2

  Point apply(const Point& p) const;
  ClosedPolygon apply(const ClosedPolygon& poly) const;
  Isometry inverse() const;
};

// Rotation about the origin (E2, H2) or uniform SO(3) (S2); on the disk a
// Mobius translation of norm <= 0.3 is composed on top.
Isometry random_isometry(Geometry g, Rng& rng);

// Rotation-only variant (what the equivariance loss trains against).
Isometry random_rotation(Geometry g, Rng& rng);

}  // namespace curvesub
