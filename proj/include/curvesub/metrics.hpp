#pragma once

#include <string>
#include <vector>

#include "curvesub/geometry.hpp"

namespace curvesub {

// Point-set and smoothness metrics. Nearest-neighbour searches are brute
// force on purpose: the sets are at most a few hundred against a thousand,
// and the same loops double as the loss-side oracle.

// One-sided mean nearest-neighbour distance from each of `from` to `to`.
double mean_nn(const std::vector<Point>& from, const std::vector<Point>& to);

// Symmetric Chamfer: (mean_nn(a, b) + mean_nn(b, a)) / 2.
double sym_chamfer(const std::vector<Point>& a, const std::vector<Point>& b);

// Symmetric Hausdorff: max over both one-sided sup-inf distances.
double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b);

enum class BendLengths {
  Default,   // geodesic edge lengths, except ambient chords on the disk
  Geodesic,  // geodesic everywhere (fully isometry-invariant diagnostic)
};

// Discrete bending energy: mean over vertices of (delta_j / (mean of the two
// adjacent edge lengths + eps))^2.
double bending_energy(const ClosedPolygon& poly, double eps = 1e-8,
                      BendLengths lengths = BendLengths::Default);

// G1 defect proxy: max |exterior angle|.
double g1_proxy(const ClosedPolygon& poly);

// Mean squared exterior angle.
double smoothness(const ClosedPolygon& poly);

struct MetricsReport {
  double mean_nn = 0.0;  // one-sided, prediction to ground truth
  double sym_chamfer = 0.0;
  double hausdorff = 0.0;
  double bending = 0.0;
  double g1 = 0.0;
};

MetricsReport compute_metrics(const ClosedPolygon& refined, const std::vector<Point>& truth);

// CSV row layout shared by every evaluation artifact.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& curve_id, Geometry g, const std::string& method,
                            const MetricsReport& m);

}  // namespace curvesub
