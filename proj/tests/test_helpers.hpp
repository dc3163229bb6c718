#pragma once

// Shared fixtures for the unit tests: random points in each model, reference
// geodesic constructions that deliberately do not go through the library
// (hand-rolled slerp, hyperboloid-model interpolation), and small polygon
// builders.

#include <algorithm>
#include <cmath>
#include <vector>

#include "curvesub/geometry.hpp"
#include "curvesub/rng.hpp"

namespace testutil {

using curvesub::ClosedPolygon;
using curvesub::Geometry;
using curvesub::Point;
using curvesub::Rng;

inline Point random_point(Geometry g, Rng& rng) {
  switch (g) {
    case Geometry::Euclidean:
      return curvesub::point_e2(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    case Geometry::Spherical: {
      // Gaussian direction, normalized: uniform on the sphere.
      double x = rng.normal(), y = rng.normal(), z = rng.normal();
      double n = std::sqrt(x * x + y * y + z * z);
      if (n < 1e-12) return curvesub::point_s2(1.0, 0.0, 0.0);
      return curvesub::point_s2(x / n, y / n, z / n);
    }
    default: {
      double r = 0.8 * std::sqrt(rng.uniform());
      double phi = rng.uniform(0.0, 2.0 * curvesub::kPi);
      return curvesub::point_h2(r * std::cos(phi), r * std::sin(phi));
    }
  }
}

inline ClosedPolygon regular_ngon(Geometry g, int n, double radius) {
  ClosedPolygon poly;
  poly.geom = g;
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * curvesub::kPi * i / n;
    double x = radius * std::cos(t), y = radius * std::sin(t);
    switch (g) {
      case Geometry::Euclidean:
        poly.pts.push_back(curvesub::point_e2(x, y));
        break;
      case Geometry::Hyperbolic:
        poly.pts.push_back(curvesub::point_h2(x, y));
        break;
      default: {
        // circle of ambient radius `radius` at height sqrt(1 - radius^2)
        double z = std::sqrt(std::max(0.0, 1.0 - radius * radius));
        poly.pts.push_back(curvesub::point_s2(x, y, z));
        break;
      }
    }
  }
  return poly;
}

inline ClosedPolygon random_polygon(Geometry g, int n, Rng& rng) {
  // Star-shaped: angularly ordered vertices with jittered radii, so edges
  // never degenerate and the polygon is simple.
  ClosedPolygon poly;
  poly.geom = g;
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * curvesub::kPi * (i + 0.3 * rng.uniform(-1.0, 1.0)) / n;
    double r = g == Geometry::Hyperbolic ? rng.uniform(0.3, 0.7) : rng.uniform(0.6, 1.4);
    double x = r * std::cos(t), y = r * std::sin(t);
    switch (g) {
      case Geometry::Euclidean:
        poly.pts.push_back(curvesub::point_e2(x, y));
        break;
      case Geometry::Hyperbolic:
        poly.pts.push_back(curvesub::point_h2(x, y));
        break;
      default: {
        double s = rng.uniform(0.4, 0.9);
        double z = std::sqrt(std::max(0.0, 1.0 - s * s));
        poly.pts.push_back(curvesub::point_s2(s * std::cos(t), s * std::sin(t), z));
        break;
      }
    }
  }
  return poly;
}

// ---------------------------------------------------------------------------
// Independent reference geodesics. Distances and interpolation are written
// from the textbook models, not the library kernels, so a sign or convention
// slip in the library cannot cancel out here.

inline double ref_distance(const Point& a, const Point& b) {
  switch (a.geom) {
    case Geometry::Euclidean: {
      double dx = a.x() - b.x(), dy = a.y() - b.y();
      return std::sqrt(dx * dx + dy * dy);
    }
    case Geometry::Spherical: {
      double d = a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
      return std::acos(std::clamp(d, -1.0, 1.0));
    }
    default: {
      // hyperboloid model: lift, Minkowski inner product, arcosh
      auto lift = [](const Point& p, double out[3]) {
        double r2 = p.x() * p.x() + p.y() * p.y();
        double s = 1.0 / (1.0 - r2);
        out[0] = 2.0 * p.x() * s;
        out[1] = 2.0 * p.y() * s;
        out[2] = (1.0 + r2) * s;
      };
      double pa[3], pb[3];
      lift(a, pa);
      lift(b, pb);
      double m = pa[2] * pb[2] - pa[0] * pb[0] - pa[1] * pb[1];
      return std::acosh(std::max(1.0, m));
    }
  }
}

// Point at parameter t in [0, 1] along the geodesic from a to b.
inline Point ref_geodesic(const Point& a, const Point& b, double t) {
  switch (a.geom) {
    case Geometry::Euclidean:
      return curvesub::point_e2(a.x() + t * (b.x() - a.x()), a.y() + t * (b.y() - a.y()));
    case Geometry::Spherical: {
      double omega = ref_distance(a, b);
      double so = std::sin(omega);
      double wa = std::sin((1.0 - t) * omega) / so;
      double wb = std::sin(t * omega) / so;
      double x = wa * a.x() + wb * b.x();
      double y = wa * a.y() + wb * b.y();
      double z = wa * a.z() + wb * b.z();
      double n = std::sqrt(x * x + y * y + z * z);
      return curvesub::point_s2(x / n, y / n, z / n);
    }
    default: {
      auto lift = [](const Point& p, double out[3]) {
        double r2 = p.x() * p.x() + p.y() * p.y();
        double s = 1.0 / (1.0 - r2);
        out[0] = 2.0 * p.x() * s;
        out[1] = 2.0 * p.y() * s;
        out[2] = (1.0 + r2) * s;
      };
      double pa[3], pb[3];
      lift(a, pa);
      lift(b, pb);
      double d = ref_distance(a, b);
      double sd = std::sinh(d);
      double wa = std::sinh((1.0 - t) * d) / sd;
      double wb = std::sinh(t * d) / sd;
      double x = wa * pa[0] + wb * pb[0];
      double y = wa * pa[1] + wb * pb[1];
      double w = wa * pa[2] + wb * pb[2];
      return curvesub::point_h2(x / (1.0 + w), y / (1.0 + w));
    }
  }
}

// Geodesic midpoint by bisection on the signed distance imbalance, using only
// the reference formulas above.
inline Point ref_midpoint_bisect(const Point& a, const Point& b) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    Point m = ref_geodesic(a, b, mid);
    if (ref_distance(a, m) < ref_distance(m, b))
      lo = mid;
    else
      hi = mid;
  }
  return ref_geodesic(a, b, 0.5 * (lo + hi));
}

inline double point_gap(const Point& a, const Point& b) {
  double dx = a.x() - b.x(), dy = a.y() - b.y(), dz = a.z() - b.z();
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Largest singular value by cyclic one-sided Jacobi on A^T A: an independent
// oracle that shares no code with the power iteration.
inline double jacobi_largest_singular(const std::vector<double>& a, int rows, int cols) {
  std::vector<double> g(static_cast<size_t>(cols) * cols, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      for (int k = 0; k < cols; ++k)
        g[size_t(j) * cols + k] += a[size_t(i) * cols + j] * a[size_t(i) * cols + k];
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < cols - 1; ++p) {
      for (int q = p + 1; q < cols; ++q) {
        double gpq = g[size_t(p) * cols + q];
        off += gpq * gpq;
        if (std::fabs(gpq) < 1e-15) continue;
        double gpp = g[size_t(p) * cols + p];
        double gqq = g[size_t(q) * cols + q];
        double theta = 0.5 * std::atan2(2.0 * gpq, gpp - gqq);
        double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < cols; ++k) {
          double gkp = g[size_t(k) * cols + p];
          double gkq = g[size_t(k) * cols + q];
          g[size_t(k) * cols + p] = c * gkp + s * gkq;
          g[size_t(k) * cols + q] = -s * gkp + c * gkq;
        }
        for (int k = 0; k < cols; ++k) {
          double gpk = g[size_t(p) * cols + k];
          double gqk = g[size_t(q) * cols + k];
          g[size_t(p) * cols + k] = c * gpk + s * gqk;
          g[size_t(q) * cols + k] = -s * gpk + c * gqk;
        }
      }
    }
    if (off < 1e-24) break;
  }
  double lmax = 0.0;
  for (int j = 0; j < cols; ++j) lmax = std::max(lmax, g[size_t(j) * cols + j]);
  return std::sqrt(std::max(0.0, lmax));
}

}  // namespace testutil
