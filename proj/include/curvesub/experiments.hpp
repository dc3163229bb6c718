#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curvesub/dataset.hpp"
#include "curvesub/geometry.hpp"
#include "curvesub/metrics.hpp"
#include "curvesub/subdivision.hpp"
#include "curvesub/training.hpp"

namespace curvesub {

// ---------------------------------------------------------------------------
// Method evaluation over a dataset split.

struct EvalRow {
  std::string curve_id;
  Geometry geometry = Geometry::Euclidean;
  MetricsReport metrics;
};

struct MetricStats {
  MetricsReport mean;
  MetricsReport sd;  // sample standard deviation, zero when count < 2
  int count = 0;
};

struct EvalRun {
  std::string method;
  int levels = 0;
  std::vector<EvalRow> rows;  // in split order
  std::map<Geometry, MetricStats> aggregate;
};

// Recomputes per-geometry mean/sd from rows; evaluate_method uses the same
// helper, so stored aggregates are reproducible from the row data.
std::map<Geometry, MetricStats> aggregate_rows(std::span<const EvalRow> rows);

// Refines every control polygon `levels` times with the scheme and scores it
// against the stored dense curve. Rows keep split order regardless of jobs.
EvalRun evaluate_method(const SchemeConfig& scheme, const std::string& method_id,
                        std::span<const CurveSample> split, int levels = 5,
                        int jobs = 1);

// ---------------------------------------------------------------------------
// Fixed-tension oracle.

// 21-point tension grid spanning [-0.50, 0.05], both endpoints included.
std::vector<double> oracle_mu_grid();

struct OracleResult {
  Geometry geometry = Geometry::Euclidean;
  std::vector<std::pair<double, double>> table;  // (mu, mean nearest-neighbour)
  double best_mu = 0.0;
  double best_mean_nn = 0.0;
};

// Evaluates the classical rule at every grid tension on the split's curves of
// one geometry and returns the argmin along with the full table.
OracleResult oracle_grid_search(std::span<const CurveSample> split, Geometry g,
                                int levels = 5, int jobs = 1);

// ---------------------------------------------------------------------------
// Effective tension.

struct TensionProfile {
  static constexpr double kClampLo = -3.0;
  static constexpr double kClampHi = 1.5;
  std::vector<double> mu_eff;  // per edge; NaN marks a degenerate inversion
};

// Inverts the classical rule per edge: the unique global tension that would
// reproduce alpha_j given the polygon's exterior angles. Values are clamped
// to [-3.0, 1.5]; edges where the stencil halves differ by < 1e-6 get NaN.
TensionProfile mu_effective(const ClosedPolygon& poly,
                            const std::vector<double>& alphas);

struct TensionMarginal {
  Geometry geometry = Geometry::Euclidean;
  int defined = 0;
  int total = 0;
  double mean = 0.0;
  double sd = 0.0;
};

// Marginal statistics of the predictor's effective tension over a split's
// curves of one geometry, measured at the first predicted step (the polygon
// produced by the scheme's classical warm-up).
TensionMarginal tension_marginal(const SchemeConfig& neural_scheme,
                                 std::span<const CurveSample> split, Geometry g);

// ---------------------------------------------------------------------------
// Noise robustness.

// Adds i.i.d. Gaussian noise to every vertex coordinate, with standard
// deviation sigma_rel times the polygon's mean edge length. Planar only.
ClosedPolygon perturb_polygon(const ClosedPolygon& poly, double sigma_rel,
                              uint64_t seed);

struct RobustnessCell {
  std::string method;
  double sigma = 0.0;
  double mean_g1 = 0.0;
  double sd_g1 = 0.0;
  double mean_nn = 0.0;
  double sd_nn = 0.0;
};

// One row per (method, sigma). The perturbed polygon depends only on the
// curve and the sigma index, so every method sees identical noise.
std::vector<RobustnessCell> robustness_study(
    std::span<const CurveSample> split, const std::vector<double>& sigmas,
    const std::vector<std::pair<std::string, SchemeConfig>>& methods,
    int levels, uint64_t seed, int jobs = 1);

// ---------------------------------------------------------------------------
// Proximity and angle-decay diagnostics.

struct ProximityLevel {
  int level = 0;          // refinement depth of the input polygon
  double h = 0.0;         // max edge length at that depth
  double max_delta = 0.0; // max |exterior angle| at that depth
  double deviation = 0.0; // max vertex gap: scheme step vs zero-tension step
};

struct ProximityReport {
  std::vector<ProximityLevel> levels;
  double slope_dev_vs_h = 0.0;   // log-log slope; NaN when deviations vanish
  double angle_decay_log2 = 0.0; // fitted halving rate of max |exterior angle|
};

ProximityReport proximity_diagnostic(const SchemeConfig& scheme,
                                     const ClosedPolygon& control, int levels);

// Least-squares slope of log2 max |exterior angle| against refinement depth,
// negated, so exact per-level halving reads as 1.0.
double angle_decay_rate(const SchemeConfig& scheme, const ClosedPolygon& control,
                        int levels);

// ---------------------------------------------------------------------------
// Orbital ground-track case study.

struct IssTrack {
  std::vector<Point> ground_truth;  // 520 unit vectors, closed
  ClosedPolygon control;            // 16 arc-length-uniform samples
  double closure_gap_deg = 0.0;     // westward longitude gap after one period
  int closure_points = 0;           // dense samples spent on the closing arc
};

// Deterministic construction of the ISS-style ground track: one orbital
// revolution at inclination 51.64 deg and period 92.68 min against Earth's
// sidereal rotation, closed by a great-circle arc across the longitude gap.
IssTrack iss_track();

// ---------------------------------------------------------------------------
// Ablation conditions.

enum class AblationCondition {
  LearnedEmbed,  // full model, the reference condition
  OneHot,
  NoGeom,
  NoEquiv,
  NoBending,
  NoSmooth,
};

const char* to_string(AblationCondition c);
AblationCondition parse_ablation(std::string_view s);
const std::vector<AblationCondition>& all_ablations();

// Applies one condition's delta to a base configuration.
TrainConfig ablation_config(AblationCondition c, TrainConfig base);

struct AblationOutcome {
  AblationCondition condition = AblationCondition::LearnedEmbed;
  TrainResult train;
  EvalRun eval;
};

AblationOutcome ablation_run(AblationCondition c, const Dataset& ds,
                             const TrainConfig& base, uint64_t seed,
                             int eval_levels = 5);

}  // namespace curvesub
