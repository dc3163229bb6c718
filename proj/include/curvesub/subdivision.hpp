#pragma once

#include <array>
#include <memory>
#include <vector>

#include "curvesub/geometry.hpp"

namespace curvesub {

struct NeuralModel;  // predictor.hpp

// Interpolatory step: every input vertex survives, one vertex is inserted per
// edge, so per-edge insertion angles index edges (p_j, p_{j+1}).

// Classical tension rule: the inner angle pair carries weight (1 - mu), the
// outer pair mu, both divided by 8; results clamped to the admissible
// interval. mu = 0 is the four-point scheme, mu = -0.25 the six-point one.
std::vector<double> classical_angles(const std::vector<double>& deltas, double mu);

// Local adaptivity heuristic: per-edge tension mu_j = clip(mu_star +
// slope * (window_mean_j - polygon_mean), -0.5, 0.1) where the means are of
// |delta| over the edge's 4-vertex stencil and over the whole polygon.
std::vector<double> lah_angles(const std::vector<double>& deltas, double mu_star, double slope);

Point insert_vertex(const Point& p, const Point& q, double alpha,
                    HypInsertMode mode = HypInsertMode::Corrected);

ClosedPolygon subdivide_step(const ClosedPolygon& poly, const std::vector<double>& alphas,
                             HypInsertMode mode = HypInsertMode::Corrected);

ClosedPolygon subdivide_classical(const ClosedPolygon& poly, double mu, int levels,
                                  HypInsertMode mode = HypInsertMode::Corrected);

enum class LogExpStencil { FourPoint, SixPoint };

// Midpoint weights of the linear schemes, indexed by stencil offset
// (-1..2 and -2..3 respectively). They sum to 1, so the log-exp lift
// reproduces the linear schemes exactly on the plane.
inline constexpr std::array<double, 4> kFourPointWeights = {-1.0 / 16, 9.0 / 16, 9.0 / 16,
                                                            -1.0 / 16};
inline constexpr std::array<double, 6> kSixPointWeights = {3.0 / 256,   -25.0 / 256, 150.0 / 256,
                                                           150.0 / 256, -25.0 / 256, 3.0 / 256};

ClosedPolygon subdivide_logexp(const ClosedPolygon& poly, LogExpStencil stencil, int levels);

struct SchemeConfig {
  enum class Kind { ClassicalMu, LogExp4, LogExp6, Lah, Neural };

  Kind kind = Kind::ClassicalMu;
  double mu = 0.0;                      // ClassicalMu
  double lah_mu_star = 0.0;             // Lah
  double lah_slope = -0.5;              // Lah
  double neural_warmup_mu = -0.15;      // Neural: first step is classical
  std::shared_ptr<const NeuralModel> model;  // Neural
  HypInsertMode hyp_mode = HypInsertMode::Corrected;

  static SchemeConfig classical(double mu_) {
    SchemeConfig s;
    s.mu = mu_;
    return s;
  }
  static SchemeConfig four_point() { return classical(0.0); }
  static SchemeConfig six_point() { return classical(-0.25); }
  static SchemeConfig logexp(LogExpStencil st) {
    SchemeConfig s;
    s.kind = st == LogExpStencil::FourPoint ? Kind::LogExp4 : Kind::LogExp6;
    return s;
  }
  static SchemeConfig lah(double mu_star, double slope = -0.5) {
    SchemeConfig s;
    s.kind = Kind::Lah;
    s.lah_mu_star = mu_star;
    s.lah_slope = slope;
    return s;
  }
  static SchemeConfig neural(std::shared_ptr<const NeuralModel> model, double warmup_mu = -0.15) {
    SchemeConfig s;
    s.kind = Kind::Neural;
    s.model = std::move(model);
    s.neural_warmup_mu = warmup_mu;
    return s;
  }
};

// Refine `levels` times. The neural scheme spends its first level on a
// classical warm-up step and the remaining ones on predicted angles.
ClosedPolygon apply_scheme(const SchemeConfig& scheme, const ClosedPolygon& poly, int levels);

// ---------------------------------------------------------------------------
// Templated pipeline pieces shared with the training graph.

namespace pipeline {

template <class K>
std::vector<typename K::Scalar> exterior_angles_t(const std::vector<typename K::Pt>& pts) {
  size_t n = pts.size();
  std::vector<typename K::Scalar> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = K::ext_angle(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
  return out;
}

template <class K>
std::vector<typename K::Scalar> edge_lengths_t(const std::vector<typename K::Pt>& pts) {
  size_t n = pts.size();
  std::vector<typename K::Scalar> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = K::dist(pts[i], pts[(i + 1) % n]);
  return out;
}

template <class K>
std::vector<typename K::Pt> subdivide_once_t(const std::vector<typename K::Pt>& pts,
                                             const std::vector<typename K::Scalar>& alphas,
                                             HypInsertMode mode) {
  size_t n = pts.size();
  std::vector<typename K::Pt> out(2 * n);
  for (size_t i = 0; i < n; ++i) {
    out[2 * i] = pts[i];
    out[2 * i + 1] = K::insert(pts[i], pts[(i + 1) % n], alphas[i], mode);
  }
  return out;
}

template <class K, size_t W>
std::vector<typename K::Pt> logexp_once_t(const std::vector<typename K::Pt>& pts,
                                          const std::array<double, W>& weights, int first_offset) {
  size_t n = pts.size();
  std::vector<typename K::Pt> out(2 * n);
  for (size_t i = 0; i < n; ++i) {
    const auto& base = pts[i];
    typename K::Pt v{};
    for (size_t k = 0; k < W; ++k) {
      long j = (static_cast<long>(i) + static_cast<long>(k) + first_offset) % static_cast<long>(n);
      if (j < 0) j += static_cast<long>(n);
      v = v + K::log_map(base, pts[static_cast<size_t>(j)]) * typename K::Scalar(weights[k]);
    }
    out[2 * i] = pts[i];
    out[2 * i + 1] = K::exp_map(base, v);
  }
  return out;
}

}  // namespace pipeline

}  // namespace curvesub
