#include "curvesub/features.hpp"

namespace curvesub {

std::vector<EdgeFeatures> extract_features(const ClosedPolygon& poly) {
  validate_polygon(poly);
  auto flat = dispatch_geometry(poly.geom, [&](auto tag) {
    using K = typename KernelFor<tag(), double>::type;
    if constexpr (tag() == Geometry::Spherical) {
      return pipeline::extract_features_t<K>(polygon_vec3(poly));
    } else {
      return pipeline::extract_features_t<K>(polygon_vec2(poly));
    }
  });
  std::vector<EdgeFeatures> out(poly.size());
  for (size_t j = 0; j < poly.size(); ++j)
    for (int k = 0; k < kFeatureDim; ++k)
      out[j].v[static_cast<size_t>(k)] = flat[j * kFeatureDim + static_cast<size_t>(k)];
  return out;
}

}  // namespace curvesub
