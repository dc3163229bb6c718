#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curvesub/geometry.hpp"

namespace curvesub {

// One supervised curve: a coarse closed control polygon plus a dense sampling
// of the underlying curve it was read off from.
struct CurveSample {
  std::string id;
  std::string family;
  uint64_t seed = 0;
  std::string params;  // generator parameters as JSON, for reproducibility
  ClosedPolygon control;
  std::vector<Point> ground_truth;

  Geometry geometry() const { return control.geom; }
};

struct Dataset {
  std::vector<CurveSample> train;
  std::vector<CurveSample> val;
};

inline size_t count_geometry(std::span<const CurveSample> split, Geometry g) {
  size_t n = 0;
  for (const CurveSample& s : split)
    if (s.geometry() == g) ++n;
  return n;
}

}  // namespace curvesub
