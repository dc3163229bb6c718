#include "curvesub/subdivision.hpp"

#include <algorithm>
#include <cmath>

#include "curvesub/features.hpp"
#include "curvesub/predictor.hpp"

namespace curvesub {

namespace {

double clamp_alpha(double a) { return std::clamp(a, kAlphaMin, kAlphaMax); }

double tension_angle(const std::vector<double>& d, size_t j, double mu) {
  size_t n = d.size();
  double outer = d[(j + n - 1) % n] + d[(j + 2) % n];
  double inner = d[j] + d[(j + 1) % n];
  return clamp_alpha((mu * outer + (1.0 - mu) * inner) / 8.0);
}

}  // namespace

std::vector<double> classical_angles(const std::vector<double>& deltas, double mu) {
  if (deltas.size() < 4) throw UsageError("tension rule needs at least 4 angles");
  std::vector<double> out(deltas.size());
  for (size_t j = 0; j < deltas.size(); ++j) out[j] = tension_angle(deltas, j, mu);
  return out;
}

std::vector<double> lah_angles(const std::vector<double>& deltas, double mu_star, double slope) {
  if (deltas.size() < 4) throw UsageError("tension rule needs at least 4 angles");
  size_t n = deltas.size();
  double poly_mean = 0.0;
  for (double d : deltas) poly_mean += std::fabs(d);
  poly_mean /= static_cast<double>(n);
  std::vector<double> out(n);
  for (size_t j = 0; j < n; ++j) {
    double window = (std::fabs(deltas[(j + n - 1) % n]) + std::fabs(deltas[j]) +
                     std::fabs(deltas[(j + 1) % n]) + std::fabs(deltas[(j + 2) % n])) /
                    4.0;
    double mu = std::clamp(mu_star + slope * (window - poly_mean), -0.5, 0.1);
    out[j] = tension_angle(deltas, j, mu);
  }
  return out;
}

Point insert_vertex(const Point& p, const Point& q, double alpha, HypInsertMode mode) {
  if (p.geom != q.geom) throw UsageError("insertion endpoints from different geometries");
  if (!(std::fabs(alpha) <= kAlphaMax)) throw UsageError("insertion angle outside the admissible interval");
  switch (p.geom) {
    case Geometry::Euclidean: {
      auto r = kern::Eucl<double>::insert(as_vec2(p), as_vec2(q), alpha, mode);
      return point_e2(r.x, r.y);
    }
    case Geometry::Spherical: {
      auto r = kern::Sph<double>::insert(as_vec3(p), as_vec3(q), alpha, mode);
      return point_s2(r.x, r.y, r.z);
    }
    default: {
      auto r = kern::Hyp<double>::insert(as_vec2(p), as_vec2(q), alpha, mode);
      return point_h2(r.x, r.y);
    }
  }
}

ClosedPolygon subdivide_step(const ClosedPolygon& poly, const std::vector<double>& alphas,
                             HypInsertMode mode) {
  validate_polygon(poly);
  if (alphas.size() != poly.size())
    throw UsageError("one insertion angle per edge required");
  for (double a : alphas)
    if (!(std::fabs(a) <= kAlphaMax))
      throw UsageError("insertion angle outside the admissible interval");
  return dispatch_geometry(poly.geom, [&](auto tag) {
    using K = typename KernelFor<tag(), double>::type;
    if constexpr (tag() == Geometry::Spherical) {
      return polygon_from_vec3(poly.geom,
                               pipeline::subdivide_once_t<K>(polygon_vec3(poly), alphas, mode));
    } else {
      return polygon_from_vec2(poly.geom,
                               pipeline::subdivide_once_t<K>(polygon_vec2(poly), alphas, mode));
    }
  });
}

ClosedPolygon subdivide_classical(const ClosedPolygon& poly, double mu, int levels,
                                  HypInsertMode mode) {
  ClosedPolygon cur = poly;
  for (int l = 0; l < levels; ++l)
    cur = subdivide_step(cur, classical_angles(exterior_angles(cur), mu), mode);
  return cur;
}

ClosedPolygon subdivide_logexp(const ClosedPolygon& poly, LogExpStencil stencil, int levels) {
  validate_polygon(poly);
  if (stencil == LogExpStencil::SixPoint && poly.size() < 6)
    throw UsageError("six-point stencil needs at least 6 vertices");
  ClosedPolygon cur = poly;
  for (int l = 0; l < levels; ++l) {
    cur = dispatch_geometry(cur.geom, [&](auto tag) {
      using K = typename KernelFor<tag(), double>::type;
      if constexpr (tag() == Geometry::Spherical) {
        auto pts = polygon_vec3(cur);
        auto next = stencil == LogExpStencil::FourPoint
                        ? pipeline::logexp_once_t<K>(pts, kFourPointWeights, -1)
                        : pipeline::logexp_once_t<K>(pts, kSixPointWeights, -2);
        return polygon_from_vec3(cur.geom, next);
      } else {
        auto pts = polygon_vec2(cur);
        auto next = stencil == LogExpStencil::FourPoint
                        ? pipeline::logexp_once_t<K>(pts, kFourPointWeights, -1)
                        : pipeline::logexp_once_t<K>(pts, kSixPointWeights, -2);
        return polygon_from_vec2(cur.geom, next);
      }
    });
  }
  return cur;
}

ClosedPolygon apply_scheme(const SchemeConfig& scheme, const ClosedPolygon& poly, int levels) {
  if (levels < 0) throw UsageError("negative refinement level");
  switch (scheme.kind) {
    case SchemeConfig::Kind::ClassicalMu:
      return subdivide_classical(poly, scheme.mu, levels, scheme.hyp_mode);
    case SchemeConfig::Kind::LogExp4:
      return subdivide_logexp(poly, LogExpStencil::FourPoint, levels);
    case SchemeConfig::Kind::LogExp6:
      return subdivide_logexp(poly, LogExpStencil::SixPoint, levels);
    case SchemeConfig::Kind::Lah: {
      ClosedPolygon cur = poly;
      for (int l = 0; l < levels; ++l) {
        auto alphas = lah_angles(exterior_angles(cur), scheme.lah_mu_star, scheme.lah_slope);
        cur = subdivide_step(cur, alphas, scheme.hyp_mode);
      }
      return cur;
    }
    case SchemeConfig::Kind::Neural: {
      if (!scheme.model) throw UsageError("neural scheme without a model");
      ClosedPolygon cur = poly;
      for (int l = 0; l < levels; ++l) {
        if (l == 0) {
          cur = subdivide_classical(cur, scheme.neural_warmup_mu, 1, scheme.hyp_mode);
          continue;
        }
        auto alphas = predict_angles(*scheme.model, cur);
        cur = subdivide_step(cur, alphas, scheme.hyp_mode);
      }
      return cur;
    }
  }
  throw UsageError("unknown scheme kind");
}

}  // namespace curvesub
