#include "curvesub/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "curvesub/datagen.hpp"
#include "curvesub/predictor.hpp"
#include "curvesub/rng.hpp"

namespace curvesub {
namespace {


// Work-stealing loop over [0, n). Results must be written to preallocated
// slots so the output is identical whatever the job count.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  size_t workers = std::min<size_t>(std::max(jobs, 1), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto body = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::array<double, 5> metric_fields(const MetricsReport& m) {
  return {m.mean_nn, m.sym_chamfer, m.hausdorff, m.bending, m.g1};
}

MetricsReport report_from_fields(const std::array<double, 5>& f) {
  MetricsReport m;
  m.mean_nn = f[0];
  m.sym_chamfer = f[1];
  m.hausdorff = f[2];
  m.bending = f[3];
  m.g1 = f[4];
  return m;
}

struct Accumulator {
  std::array<double, 5> sum{};
  std::array<double, 5> sumsq{};
  int count = 0;

  void add(const MetricsReport& m) {
    auto f = metric_fields(m);
    for (int i = 0; i < 5; ++i) {
      sum[i] += f[i];
      sumsq[i] += f[i] * f[i];
    }
    ++count;
  }

  MetricStats stats() const {
    MetricStats s;
    s.count = count;
    if (count == 0) return s;
    std::array<double, 5> mean{}, sd{};
    for (int i = 0; i < 5; ++i) {
      mean[i] = sum[i] / count;
      if (count > 1) {
        double var = (sumsq[i] - count * mean[i] * mean[i]) / (count - 1);
        sd[i] = std::sqrt(std::max(var, 0.0));
      }
    }
    s.mean = report_from_fields(mean);
    s.sd = report_from_fields(sd);
    return s;
  }
};

double max_edge_length(const ClosedPolygon& poly) {
  double h = 0.0;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    h = std::max(h, geodesic_distance(poly.pts[i], poly.pts[(i + 1) % n]));
  }
  return h;
}

double mean_edge_length(const ClosedPolygon& poly) {
  double total = 0.0;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    total += geodesic_distance(poly.pts[i], poly.pts[(i + 1) % n]);
  }
  return total / static_cast<double>(n);
}

double max_abs_angle(const ClosedPolygon& poly) {
  double worst = 0.0;
  for (double d : exterior_angles(poly)) worst = std::max(worst, std::abs(d));
  return worst;
}

}  // namespace

std::map<Geometry, MetricStats> aggregate_rows(std::span<const EvalRow> rows) {
  std::map<Geometry, Accumulator> acc;
  for (const EvalRow& r : rows) acc[r.geometry].add(r.metrics);
  std::map<Geometry, MetricStats> out;
  for (const auto& [g, a] : acc) out[g] = a.stats();
  return out;
}

EvalRun evaluate_method(const SchemeConfig& scheme, const std::string& method_id,
                        std::span<const CurveSample> split, int levels,
                        int jobs) {
  if (levels < 0) throw UsageError("refinement level must be nonnegative");
  if (scheme.kind == SchemeConfig::Kind::Neural && !scheme.model) {
    throw ConfigError("neural evaluation needs a loaded model");
  }
  EvalRun run;
  run.method = method_id;
  run.levels = levels;
  run.rows.resize(split.size());
  parallel_for(split.size(), jobs, [&](size_t i) {
    const CurveSample& s = split[i];
    ClosedPolygon refined = apply_scheme(scheme, s.control, levels);
    run.rows[i] = {s.id, s.geometry(), compute_metrics(refined, s.ground_truth)};
  });
  run.aggregate = aggregate_rows(run.rows);
  return run;
}

std::vector<double> oracle_mu_grid() {
  constexpr double lo = -0.50, hi = 0.05;
  std::vector<double> grid(21);
  for (int i = 0; i < 21; ++i) {
    // convex combination so both endpoints are hit exactly
    double t = i / 20.0;
    grid[i] = (1.0 - t) * lo + t * hi;
  }
  return grid;
}

OracleResult oracle_grid_search(std::span<const CurveSample> split, Geometry g,
                                int levels, int jobs) {
  std::vector<const CurveSample*> curves;
  for (const CurveSample& s : split) {
    if (s.geometry() == g) curves.push_back(&s);
  }
  if (curves.empty()) {
    throw ConfigError(std::string("no curves of geometry ") + to_string(g) +
                      " in the split");
  }
  OracleResult res;
  res.geometry = g;
  res.best_mean_nn = std::numeric_limits<double>::infinity();
  for (double mu : oracle_mu_grid()) {
    SchemeConfig scheme = SchemeConfig::classical(mu);
    std::vector<double> nn(curves.size());
    parallel_for(curves.size(), jobs, [&](size_t i) {
      ClosedPolygon refined = apply_scheme(scheme, curves[i]->control, levels);
      nn[i] = mean_nn(refined.pts, curves[i]->ground_truth);
    });
    double mean = 0.0;
    for (double v : nn) mean += v;
    mean /= static_cast<double>(nn.size());
    res.table.emplace_back(mu, mean);
    if (mean < res.best_mean_nn) {
      res.best_mean_nn = mean;
      res.best_mu = mu;
    }
  }
  return res;
}

TensionProfile mu_effective(const ClosedPolygon& poly,
                            const std::vector<double>& alphas) {
  size_t n = poly.size();
  if (alphas.size() != n) {
    throw UsageError("need one insertion angle per polygon edge");
  }
  std::vector<double> deltas = exterior_angles(poly);
  TensionProfile prof;
  prof.mu_eff.resize(n);
  for (size_t j = 0; j < n; ++j) {
    double outer = (deltas[(j + n - 1) % n] + deltas[(j + 2) % n]) / 8.0;
    double inner = (deltas[j] + deltas[(j + 1) % n]) / 8.0;
    if (std::abs(outer - inner) < 1e-6) {
      prof.mu_eff[j] = std::numeric_limits<double>::quiet_NaN();
    } else {
      double mu = (alphas[j] - inner) / (outer - inner);
      prof.mu_eff[j] =
          std::clamp(mu, TensionProfile::kClampLo, TensionProfile::kClampHi);
    }
  }
  return prof;
}

TensionMarginal tension_marginal(const SchemeConfig& neural_scheme,
                                 std::span<const CurveSample> split,
                                 Geometry g) {
  if (neural_scheme.kind != SchemeConfig::Kind::Neural || !neural_scheme.model) {
    throw ConfigError("tension marginals need a neural scheme with a model");
  }
  TensionMarginal out;
  out.geometry = g;
  double sum = 0.0, sumsq = 0.0;
  for (const CurveSample& s : split) {
    if (s.geometry() != g) continue;
    ClosedPolygon warmed = apply_scheme(neural_scheme, s.control, 1);
    std::vector<double> alphas = predict_angles(*neural_scheme.model, warmed);
    TensionProfile prof = mu_effective(warmed, alphas);
    for (double mu : prof.mu_eff) {
      ++out.total;
      if (std::isnan(mu)) continue;
      ++out.defined;
      sum += mu;
      sumsq += mu * mu;
    }
  }
  if (out.defined > 0) {
    out.mean = sum / out.defined;
    if (out.defined > 1) {
      double var = (sumsq - out.defined * out.mean * out.mean) / (out.defined - 1);
      out.sd = std::sqrt(std::max(var, 0.0));
    }
  }
  return out;
}

ClosedPolygon perturb_polygon(const ClosedPolygon& poly, double sigma_rel,
                              uint64_t seed) {
  if (poly.geom != Geometry::Euclidean) {
    throw UsageError("vertex noise is defined for planar polygons only");
  }
  double scale = sigma_rel * mean_edge_length(poly);
  Rng rng(seed);
  ClosedPolygon out = poly;
  for (Point& p : out.pts) {
    p.c[0] += scale * rng.normal();
    p.c[1] += scale * rng.normal();
  }
  return out;
}

std::vector<RobustnessCell> robustness_study(
    std::span<const CurveSample> split, const std::vector<double>& sigmas,
    const std::vector<std::pair<std::string, SchemeConfig>>& methods,
    int levels, uint64_t seed, int jobs) {
  std::vector<const CurveSample*> curves;
  for (const CurveSample& s : split) {
    if (s.geometry() == Geometry::Euclidean) curves.push_back(&s);
  }
  if (curves.empty()) throw ConfigError("no planar curves in the split");
  if (sigmas.empty() || methods.empty()) {
    throw ConfigError("robustness study needs noise levels and methods");
  }

  std::vector<std::vector<RobustnessCell>> cells(
      methods.size(), std::vector<RobustnessCell>(sigmas.size()));
  for (size_t si = 0; si < sigmas.size(); ++si) {
    // one perturbation per curve, shared by all methods
    std::vector<ClosedPolygon> noisy(curves.size());
    for (size_t ci = 0; ci < curves.size(); ++ci) {
      noisy[ci] = perturb_polygon(curves[ci]->control, sigmas[si],
                                  derive_seed(seed, "noise", ci, si));
    }
    for (size_t mi = 0; mi < methods.size(); ++mi) {
      std::vector<MetricsReport> reports(curves.size());
      parallel_for(curves.size(), jobs, [&](size_t ci) {
        ClosedPolygon refined =
            apply_scheme(methods[mi].second, noisy[ci], levels);
        reports[ci] = compute_metrics(refined, curves[ci]->ground_truth);
      });
      // accumulated exactly like a plain evaluation, so the sigma = 0 row
      // reproduces evaluate_method bit for bit
      Accumulator acc;
      for (const MetricsReport& r : reports) acc.add(r);
      MetricStats stats = acc.stats();
      cells[mi][si] = {methods[mi].first, sigmas[si], stats.mean.g1,
                       stats.sd.g1,       stats.mean.mean_nn, stats.sd.mean_nn};
    }
  }

  std::vector<RobustnessCell> out;
  out.reserve(methods.size() * sigmas.size());
  for (const auto& row : cells) {
    for (const auto& cell : row) out.push_back(cell);
  }
  return out;
}

ProximityReport proximity_diagnostic(const SchemeConfig& scheme,
                                     const ClosedPolygon& control, int levels) {
  if (levels < 1) throw UsageError("need at least one refinement level");
  SchemeConfig baseline = SchemeConfig::four_point();
  baseline.hyp_mode = scheme.hyp_mode;

  auto fit_slope = [](const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0.0, my = 0.0;
    for (auto& [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double num = 0.0, den = 0.0;
    for (auto& [x, y] : pts) {
      num += (x - mx) * (y - my);
      den += (x - mx) * (x - mx);
    }
    return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
  };

  ProximityReport rep;
  std::vector<std::pair<double, double>> decay_pts;
  for (int k = 0; k < levels; ++k) {
    ClosedPolygon cur = apply_scheme(scheme, control, k);
    ClosedPolygon next = apply_scheme(scheme, control, k + 1);
    ClosedPolygon base = apply_scheme(baseline, cur, 1);
    double dev = 0.0;
    for (size_t j = 0; j < next.size(); ++j) {
      dev = std::max(dev, geodesic_distance(next.pts[j], base.pts[j]));
    }
    double delta = max_abs_angle(cur);
    rep.levels.push_back({k, max_edge_length(cur), delta, dev});
    if (delta > 0.0) decay_pts.emplace_back(k, std::log2(delta));
    if (k + 1 == levels) {
      double last = max_abs_angle(next);
      if (last > 0.0) decay_pts.emplace_back(k + 1, std::log2(last));
    }
  }

  // log-log fit of deviation against the input mesh size
  std::vector<std::pair<double, double>> pts;
  for (const auto& lv : rep.levels) {
    if (lv.deviation > 0.0 && lv.h > 0.0) {
      pts.emplace_back(std::log(lv.h), std::log(lv.deviation));
    }
  }
  rep.slope_dev_vs_h = fit_slope(pts);

  // fitted halving rate of the max exterior angle across depths 0..levels
  rep.angle_decay_log2 = -fit_slope(decay_pts);
  return rep;
}

double angle_decay_rate(const SchemeConfig& scheme, const ClosedPolygon& control,
                        int levels) {
  return proximity_diagnostic(scheme, control, levels).angle_decay_log2;
}

IssTrack iss_track() {
  constexpr double kDeg = kPi / 180.0;
  constexpr double inclination = 51.64 * kDeg;
  constexpr double period_s = 92.68 * 60.0;
  constexpr double lambda0 = -155.0 * kDeg;
  constexpr double sidereal_day_s = 23.0 * 3600.0 + 56.0 * 60.0 + 4.0;
  constexpr double omega_e = 2.0 * kPi / sidereal_day_s;  // rad per second
  constexpr int kTotal = 520;

  auto track_point = [&](double theta) {
    double t = period_s * theta / (2.0 * kPi);
    double phi = std::asin(std::sin(inclination) * std::sin(theta));
    double lambda = std::atan2(std::cos(inclination) * std::sin(theta),
                               std::cos(theta)) -
                    omega_e * t + lambda0;
    double x = std::cos(phi) * std::cos(lambda);
    double y = std::cos(phi) * std::sin(lambda);
    double z = std::sin(phi);
    double norm = std::sqrt(x * x + y * y + z * z);
    return point_s2(x / norm, y / norm, z / norm);
  };

  // One revolution's arc length and the gap it leaves, to split the fixed
  // sample budget proportionally between orbit and closing arc.
  constexpr int kQuad = 20000;
  double orbit_len = 0.0;
  Point prev = track_point(0.0);
  for (int i = 1; i <= kQuad; ++i) {
    Point cur = track_point(2.0 * kPi * i / kQuad);
    orbit_len += geodesic_distance(prev, cur);
    prev = cur;
  }
  Point start = track_point(0.0);
  Point end = track_point(2.0 * kPi);
  double gap_len = geodesic_distance(end, start);

  int n_closure = static_cast<int>(
      std::lround(kTotal * gap_len / (orbit_len + gap_len)));
  n_closure = std::clamp(n_closure, 1, kTotal / 4);
  int n_orbit = kTotal - n_closure;

  IssTrack track;
  track.closure_points = n_closure;
  track.ground_truth.reserve(kTotal);
  for (int i = 0; i < n_orbit; ++i) {
    track.ground_truth.push_back(
        track_point(2.0 * kPi * i / (n_orbit - 1)));
  }
  TangentVector toward_start = unit_tangent(end, start);
  for (int j = 1; j <= n_closure; ++j) {
    track.ground_truth.push_back(
        geodesic_walk(toward_start, gap_len * j / (n_closure + 1)));
  }

  double lam_start = std::atan2(start.y(), start.x());
  double lam_end = std::atan2(end.y(), end.x());
  double gap = lam_start - lam_end;
  while (gap < 0.0) gap += 2.0 * kPi;
  while (gap >= 2.0 * kPi) gap -= 2.0 * kPi;
  track.closure_gap_deg = gap / kDeg;

  track.control = arclength_sample(track.ground_truth, 16, Geometry::Spherical);
  return track;
}

const char* to_string(AblationCondition c) {
  switch (c) {
    case AblationCondition::LearnedEmbed:
      return "learned_embed";
    case AblationCondition::OneHot:
      return "one_hot";
    case AblationCondition::NoGeom:
      return "no_geom";
    case AblationCondition::NoEquiv:
      return "no_equiv";
    case AblationCondition::NoBending:
      return "no_bending";
    default:
      return "no_smooth";
  }
}

AblationCondition parse_ablation(std::string_view s) {
  for (AblationCondition c : all_ablations()) {
    if (s == to_string(c)) return c;
  }
  throw UsageError("unknown ablation condition '" + std::string(s) + "'");
}

const std::vector<AblationCondition>& all_ablations() {
  static const std::vector<AblationCondition> all = {
      AblationCondition::LearnedEmbed, AblationCondition::OneHot,
      AblationCondition::NoGeom,       AblationCondition::NoEquiv,
      AblationCondition::NoBending,    AblationCondition::NoSmooth,
  };
  return all;
}

TrainConfig ablation_config(AblationCondition c, TrainConfig base) {
  switch (c) {
    case AblationCondition::LearnedEmbed:
      base.predictor.geometry_mode = GeometryMode::Learned;
      break;
    case AblationCondition::OneHot:
      base.predictor.geometry_mode = GeometryMode::OneHot;
      break;
    case AblationCondition::NoGeom:
      base.predictor.geometry_mode = GeometryMode::None;
      break;
    case AblationCondition::NoEquiv:
      base.lambda_equiv = 0.0;
      break;
    case AblationCondition::NoBending:
      base.lambda_bend = 0.0;
      break;
    case AblationCondition::NoSmooth:
      base.lambda_smooth_e2 = 0.0;
      base.lambda_smooth_s2 = 0.0;
      base.lambda_smooth_h2 = 0.0;
      break;
  }
  return base;
}

AblationOutcome ablation_run(AblationCondition c, const Dataset& ds,
                             const TrainConfig& base, uint64_t seed,
                             int eval_levels) {
  AblationOutcome out;
  out.condition = c;
  TrainConfig cfg = ablation_config(c, base);
  out.train = train(ds, cfg, seed);
  auto model = std::make_shared<NeuralModel>();
  model->cfg = cfg.predictor;
  model->params = out.train.best_params;
  SchemeConfig scheme = SchemeConfig::neural(model, cfg.warmup_mu);
  scheme.hyp_mode = cfg.hyp_mode;
  out.eval = evaluate_method(scheme, std::string("neural_") + to_string(c),
                             ds.val, eval_levels);
  return out;
}

}  // namespace curvesub
