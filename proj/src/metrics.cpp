#include "curvesub/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curvesub {

namespace {

void require_compatible(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) throw UsageError("metric over an empty point set");
  Geometry g = a.front().geom;
  for (const Point& p : a)
    if (p.geom != g) throw UsageError("mixed geometries in a point set");
  for (const Point& p : b)
    if (p.geom != g) throw UsageError("mixed geometries in a point set");
}

double nearest(const Point& p, const std::vector<Point>& to) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& q : to) best = std::min(best, geodesic_distance(p, q));
  return best;
}

double directed_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
  double worst = 0.0;
  for (const Point& p : a) worst = std::max(worst, nearest(p, b));
  return worst;
}

double chord_length(const Point& a, const Point& b) {
  double dx = a.c[0] - b.c[0], dy = a.c[1] - b.c[1], dz = a.c[2] - b.c[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

double mean_nn(const std::vector<Point>& from, const std::vector<Point>& to) {
  require_compatible(from, to);
  double sum = 0.0;
  for (const Point& p : from) sum += nearest(p, to);
  return sum / static_cast<double>(from.size());
}

double sym_chamfer(const std::vector<Point>& a, const std::vector<Point>& b) {
  return 0.5 * (mean_nn(a, b) + mean_nn(b, a));
}

double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
  require_compatible(a, b);
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double bending_energy(const ClosedPolygon& poly, double eps, BendLengths lengths) {
  auto deltas = exterior_angles(poly);
  size_t n = poly.size();
  bool chords = lengths == BendLengths::Default && poly.geom == Geometry::Hyperbolic;
  std::vector<double> len(n);
  for (size_t i = 0; i < n; ++i)
    len[i] = chords ? chord_length(poly.pts[i], poly.vertex(i + 1))
                    : geodesic_distance(poly.pts[i], poly.vertex(i + 1));
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double denom = 0.5 * (len[(i + n - 1) % n] + len[i]) + eps;
    double t = deltas[i] / denom;
    sum += t * t;
  }
  return sum / static_cast<double>(n);
}

double g1_proxy(const ClosedPolygon& poly) {
  double worst = 0.0;
  for (double d : exterior_angles(poly)) worst = std::max(worst, std::fabs(d));
  return worst;
}

double smoothness(const ClosedPolygon& poly) {
  double sum = 0.0;
  auto deltas = exterior_angles(poly);
  for (double d : deltas) sum += d * d;
  return sum / static_cast<double>(deltas.size());
}

MetricsReport compute_metrics(const ClosedPolygon& refined, const std::vector<Point>& truth) {
  MetricsReport m;
  m.mean_nn = mean_nn(refined.pts, truth);
  m.sym_chamfer = sym_chamfer(refined.pts, truth);
  m.hausdorff = hausdorff(refined.pts, truth);
  m.bending = bending_energy(refined);
  m.g1 = g1_proxy(refined);
  return m;
}

std::string metrics_csv_header() {
  return "curve_id,geometry,method,mean_nn,chamfer,hausdorff,bending,g1";
}

std::string metrics_csv_row(const std::string& curve_id, Geometry g, const std::string& method,
                            const MetricsReport& m) {
  std::ostringstream os;
  os.precision(17);
  os << curve_id << ',' << to_string(g) << ',' << method << ',' << m.mean_nn << ','
     << m.sym_chamfer << ',' << m.hausdorff << ',' << m.bending << ',' << m.g1;
  return os.str();
}

}  // namespace curvesub
