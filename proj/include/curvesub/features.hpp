#pragma once

#include <array>
#include <vector>

#include "curvesub/geometry.hpp"
#include "curvesub/subdivision.hpp"

namespace curvesub {

inline constexpr int kFeatureDim = 7;

// Per-edge descriptor: the four stencil exterior angles normalized by pi, the
// lengths of this edge and the next one relative to the polygon mean, and the
// curvature code of the model space. Everything intrinsic, so the vector is
// invariant under model isometries.
struct EdgeFeatures {
  std::array<double, kFeatureDim> v{};

  double angle(int k) const { return v[static_cast<size_t>(k)]; }  // k in 0..3
  double edge_ratio(int k) const { return v[static_cast<size_t>(4 + k)]; }  // k in 0..1
  double curvature() const { return v[6]; }
};

std::vector<EdgeFeatures> extract_features(const ClosedPolygon& poly);

namespace pipeline {

// Flat row-major n x 7 feature matrix on the pipeline scalar.
template <class K>
std::vector<typename K::Scalar> extract_features_t(const std::vector<typename K::Pt>& pts) {
  using T = typename K::Scalar;
  size_t n = pts.size();
  auto deltas = exterior_angles_t<K>(pts);
  auto lens = edge_lengths_t<K>(pts);
  T mean_len(0.0);
  for (const T& e : lens) mean_len += e;
  mean_len = mean_len * (1.0 / static_cast<double>(n));
  double kappa = static_cast<double>(curvature_code(K::geom));
  std::vector<T> out;
  out.reserve(n * kFeatureDim);
  for (size_t j = 0; j < n; ++j) {
    out.push_back(deltas[(j + n - 1) % n] * (1.0 / kPi));
    out.push_back(deltas[j] * (1.0 / kPi));
    out.push_back(deltas[(j + 1) % n] * (1.0 / kPi));
    out.push_back(deltas[(j + 2) % n] * (1.0 / kPi));
    out.push_back(lens[j] / mean_len);
    out.push_back(lens[(j + 1) % n] / mean_len);
    out.push_back(T(kappa));
  }
  return out;
}

}  // namespace pipeline

}  // namespace curvesub
