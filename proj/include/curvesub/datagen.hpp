#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvesub/dataset.hpp"
#include "curvesub/geometry.hpp"
#include "curvesub/vec.hpp"

namespace curvesub {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataGenConfig {
  int curves_per_geometry = 400;
  int n_control = 12;
  int n_ground_truth = 1000;
  double val_fraction = 0.2;
};

// Raw curve families, exposed so tests can pin down specific parameter
// choices.  Each returns n points sampled at uniform parameter values
// t_i = 2*pi*i/n; gen_curve applies the per-geometry normalisation on top.
namespace families {

// Planar families.  Points come back un-normalised; run center_and_scale_unit
// to get the mean-centred, unit-max-radius version used in datasets.
std::vector<Point> ellipse(double a, double b, int n);
std::vector<Point> planar_fourier(const std::vector<double>& ax,
                                  const std::vector<double>& bx,
                                  const std::vector<double>& ay,
                                  const std::vector<double>& by, int n);
std::vector<Point> superellipse(double exponent, int n);
void center_and_scale_unit(std::vector<Point>& pts);

// Spherical families; every point is renormalised to unit length.
std::vector<Point> lissajous(int a, int b, int n);
std::vector<Point> polar_fourier(const std::vector<double>& at,
                                 const std::vector<double>& bt,
                                 const std::vector<double>& ap,
                                 const std::vector<double>& bp, int n);
std::vector<Point> great_circle_wobble(double eps, int freq, int n);

// Hyperbolic families, all strictly inside the disk.
std::vector<Point> fourier_disk(const std::vector<double>& ax,
                                const std::vector<double>& bx,
                                const std::vector<double>& ay,
                                const std::vector<double>& by,
                                double target_radius, int n);
std::vector<Point> hyperbolic_circle(double radius, const Vec2<double>& center,
                                     int n);
std::vector<Point> offset_ellipse(double a, double b,
                                  const Vec2<double>& center, int n);

}  // namespace families

// Family names available per geometry, in the order they are cycled through.
const std::vector<std::string>& families_for(Geometry g);

// Draws one curve of the given family.  Samples parameters from a seeded
// stream, builds the dense ground truth, and picks control vertices at
// uniform arc-length fractions.  Parameter draws that produce a control
// polygon with near-coincident vertices are rejected and redrawn from a
// fresh substream, so the result is deterministic in (family, seed).
CurveSample gen_curve(Geometry g, const std::string& family, uint64_t seed,
                      const DataGenConfig& cfg);

// Indices into a dense closed loop at uniform arc-length fractions i/n of
// the total length, closure segment included.  Each fraction is snapped to
// the nearest dense sample (ties go to the lower index).
std::vector<size_t> arclength_indices(const std::vector<Point>& loop, int n,
                                      Geometry g);
ClosedPolygon arclength_sample(const std::vector<Point>& loop, int n,
                               Geometry g);

// Generates the full corpus: curves_per_geometry curves for each geometry,
// cycling through that geometry's families, then splits train/val per
// geometry so the mixture is preserved on both sides.
Dataset build_dataset(uint64_t seed, const DataGenConfig& cfg);

// On-disk layout: dir/manifest.json plus one JSONL file per sample under
// dir/{train,val}/{geometry}/{id}.jsonl.  Coordinates are stored as hex bit
// patterns (with a human-readable decimal mirror), so a round trip is exact.
void save_dataset(const Dataset& ds, uint64_t seed, const DataGenConfig& cfg,
                  const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace curvesub
