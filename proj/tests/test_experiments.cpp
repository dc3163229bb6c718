#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"

#include "curvesub/datagen.hpp"
#include "curvesub/experiments.hpp"
#include "curvesub/metrics.hpp"
#include "curvesub/predictor.hpp"
#include "curvesub/rng.hpp"
#include "curvesub/subdivision.hpp"
#include "curvesub/training.hpp"
#include "test_helpers.hpp"

using namespace curvesub;

namespace {

DataGenConfig tiny_cfg() {
  DataGenConfig cfg;
  cfg.curves_per_geometry = 4;
  cfg.n_control = 12;
  cfg.n_ground_truth = 400;
  return cfg;
}

std::vector<CurveSample> planar_split(int count, uint64_t seed) {
  std::vector<CurveSample> out;
  const char* fams[] = {"ellipse", "fourier3", "superellipse"};
  for (int i = 0; i < count; ++i)
    out.push_back(gen_curve(Geometry::Euclidean, fams[i % 3], seed + i, tiny_cfg()));
  return out;
}

// Stencil halves of the classical tension rule for edge j, written out again
// here so the inversion below is checked against plain arithmetic rather than
// against its own implementation.
void stencil_halves(const std::vector<double>& deltas, size_t j, double& outer,
                    double& inner) {
  size_t n = deltas.size();
  outer = (deltas[(j + n - 1) % n] + deltas[(j + 2) % n]) / 8.0;
  inner = (deltas[j] + deltas[(j + 1) % n]) / 8.0;
}

// Gently wobbled circle: evenly spaced directions with a few percent of
// radial jitter, so every exterior angle stays well inside the admissible
// interval and the classical rule never clamps.
ClosedPolygon wobbly_ngon(Geometry g, int n, Rng& rng) {
  ClosedPolygon poly;
  poly.geom = g;
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * kPi * i / n;
    double base = g == Geometry::Euclidean ? 1.0 : 0.5;
    double r = base * (1.0 + 0.05 * rng.uniform(-1.0, 1.0));
    double x = r * std::cos(t), y = r * std::sin(t);
    switch (g) {
      case Geometry::Euclidean:
        poly.pts.push_back(point_e2(x, y));
        break;
      case Geometry::Hyperbolic:
        poly.pts.push_back(point_h2(x, y));
        break;
      default: {
        double z = std::sqrt(std::max(0.0, 1.0 - r * r));
        poly.pts.push_back(point_s2(x, y, z));
        break;
      }
    }
  }
  return poly;
}

std::shared_ptr<const NeuralModel> toy_model(uint64_t seed) {
  PredictorConfig cfg;
  cfg.width = 8;
  cfg.depth = 2;
  cfg.embed_dim = 4;
  cfg.head_hidden = 4;
  auto m = std::make_shared<NeuralModel>();
  m->cfg = cfg;
  m->params = init_params(cfg, seed);
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Effective tension.

TEST_CASE("effective tension recovers the tension used to build the angles") {
  Rng rng(901);
  for (Geometry g : {Geometry::Euclidean, Geometry::Spherical, Geometry::Hyperbolic}) {
    for (double mu : {-0.5, -0.25, 0.0}) {
      ClosedPolygon poly = wobbly_ngon(g, 24, rng);
      std::vector<double> deltas = exterior_angles(poly);
      std::vector<double> alphas = classical_angles(deltas, mu);
      // stay away from the admissible-interval clamp so the rule is invertible
      for (double a : alphas) REQUIRE(std::abs(a) < 0.7);

      TensionProfile prof = mu_effective(poly, alphas);
      REQUIRE(prof.mu_eff.size() == poly.pts.size());
      int defined = 0;
      for (size_t j = 0; j < prof.mu_eff.size(); ++j) {
        if (std::isnan(prof.mu_eff[j])) continue;
        ++defined;
        CHECK(std::abs(prof.mu_eff[j] - mu) < 1e-9);
      }
      CHECK(defined > static_cast<int>(poly.pts.size()) / 2);
    }
  }
}

TEST_CASE("effective tension matches the hand inversion and clamps extremes") {
  Rng rng(902);
  ClosedPolygon poly = testutil::random_polygon(Geometry::Euclidean, 16, rng);
  std::vector<double> deltas = exterior_angles(poly);
  size_t n = deltas.size();

  std::vector<double> mixed(n), high(n), low(n);
  for (size_t j = 0; j < n; ++j) {
    double outer, inner;
    stencil_halves(deltas, j, outer, inner);
    mixed[j] = 0.25 * outer + 0.75 * inner;   // tension 0.25
    high[j] = inner + 10.0 * (outer - inner); // tension 10, beyond the cap
    low[j] = inner - 5.0 * (outer - inner);   // tension -5, below the floor
  }

  TensionProfile pm = mu_effective(poly, mixed);
  TensionProfile ph = mu_effective(poly, high);
  TensionProfile pl = mu_effective(poly, low);
  for (size_t j = 0; j < n; ++j) {
    double outer, inner;
    stencil_halves(deltas, j, outer, inner);
    if (std::abs(outer - inner) < 1e-6) {
      CHECK(std::isnan(pm.mu_eff[j]));
      continue;
    }
    CHECK(std::abs(pm.mu_eff[j] - 0.25) < 1e-9);
    CHECK(ph.mu_eff[j] == TensionProfile::kClampHi);
    CHECK(pl.mu_eff[j] == TensionProfile::kClampLo);
  }
}

TEST_CASE("effective tension is undefined on a regular polygon") {
  ClosedPolygon poly = testutil::regular_ngon(Geometry::Euclidean, 12, 1.0);
  std::vector<double> alphas(12, 0.1);
  TensionProfile prof = mu_effective(poly, alphas);
  for (double v : prof.mu_eff) CHECK(std::isnan(v));
}

TEST_CASE("effective tension rejects a mismatched angle count") {
  ClosedPolygon poly = testutil::regular_ngon(Geometry::Euclidean, 12, 1.0);
  std::vector<double> alphas(11, 0.0);
  CHECK_THROWS_AS(mu_effective(poly, alphas), UsageError);
}

// ---------------------------------------------------------------------------
// Tension grid.

TEST_CASE("tension grid has 21 uniform values with both endpoints") {
  std::vector<double> grid = oracle_mu_grid();
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == -0.50);
  CHECK(grid.back() == 0.05);
  CHECK(std::abs(grid[10] - (-0.225)) < 1e-12);
  for (size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
    CHECK(std::abs((grid[i] - grid[i - 1]) - 0.0275) < 1e-12);
  }
}

TEST_CASE("tension grid search returns the argmin of its own table") {
  std::vector<CurveSample> split = planar_split(3, 7100);
  OracleResult res = oracle_grid_search(split, Geometry::Euclidean, 3);
  REQUIRE(res.table.size() == 21);
  CHECK(res.geometry == Geometry::Euclidean);

  auto best = std::min_element(res.table.begin(), res.table.end(),
                               [](auto& a, auto& b) { return a.second < b.second; });
  CHECK(res.best_mu == best->first);
  CHECK(res.best_mean_nn == best->second);

  // spot-check the table against a direct evaluation at both endpoints
  for (size_t i : {size_t{0}, size_t{20}}) {
    EvalRun run = evaluate_method(SchemeConfig::classical(res.table[i].first),
                                  "probe", split, 3);
    CHECK(res.table[i].second ==
          run.aggregate.at(Geometry::Euclidean).mean.mean_nn);
  }
}

TEST_CASE("tension grid search rejects a geometry absent from the split") {
  std::vector<CurveSample> split = planar_split(2, 7200);
  CHECK_THROWS_AS(oracle_grid_search(split, Geometry::Spherical, 2), ConfigError);
}

// ---------------------------------------------------------------------------
// Method evaluation.

TEST_CASE("evaluating at depth zero scores the raw control polygon") {
  std::vector<CurveSample> split = planar_split(3, 7300);
  EvalRun run = evaluate_method(SchemeConfig::four_point(), "four_point", split, 0);
  REQUIRE(run.rows.size() == split.size());
  CHECK(run.method == "four_point");
  CHECK(run.levels == 0);
  for (size_t i = 0; i < split.size(); ++i) {
    CHECK(run.rows[i].curve_id == split[i].id);
    MetricsReport direct = compute_metrics(split[i].control, split[i].ground_truth);
    CHECK(run.rows[i].metrics.mean_nn == direct.mean_nn);
    CHECK(run.rows[i].metrics.hausdorff == direct.hausdorff);
    CHECK(run.rows[i].metrics.g1 == direct.g1);
  }
}

TEST_CASE("evaluation rows and aggregates are identical across thread counts") {
  std::vector<CurveSample> split = planar_split(5, 7400);
  EvalRun serial = evaluate_method(SchemeConfig::six_point(), "m", split, 3, 1);
  EvalRun threaded = evaluate_method(SchemeConfig::six_point(), "m", split, 3, 4);
  REQUIRE(serial.rows.size() == threaded.rows.size());
  for (size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].curve_id == threaded.rows[i].curve_id);
    CHECK(serial.rows[i].metrics.mean_nn == threaded.rows[i].metrics.mean_nn);
    CHECK(serial.rows[i].metrics.bending == threaded.rows[i].metrics.bending);
  }
  CHECK(serial.aggregate.at(Geometry::Euclidean).mean.sym_chamfer ==
        threaded.aggregate.at(Geometry::Euclidean).mean.sym_chamfer);
}

TEST_CASE("stored aggregates can be recomputed from the rows") {
  std::vector<CurveSample> split = planar_split(4, 7500);
  EvalRun run = evaluate_method(SchemeConfig::four_point(), "m", split, 2);
  auto redone = aggregate_rows(run.rows);
  REQUIRE(redone.size() == run.aggregate.size());
  for (auto& [g, stats] : run.aggregate) {
    CHECK(redone.at(g).count == stats.count);
    CHECK(redone.at(g).mean.mean_nn == stats.mean.mean_nn);
    CHECK(redone.at(g).sd.g1 == stats.sd.g1);
  }
}

TEST_CASE("aggregation computes per-geometry sample statistics") {
  std::vector<EvalRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].curve_id = "r";
    rows[i].geometry = Geometry::Spherical;
    rows[i].metrics.mean_nn = 1.0 + i;  // 1, 2, 3
    rows[i].metrics.g1 = 0.5;
  }
  EvalRow lone;
  lone.geometry = Geometry::Hyperbolic;
  lone.metrics.mean_nn = 7.0;
  rows.push_back(lone);

  auto agg = aggregate_rows(rows);
  REQUIRE(agg.size() == 2);
  CHECK(agg.at(Geometry::Spherical).count == 3);
  CHECK(agg.at(Geometry::Spherical).mean.mean_nn == doctest::Approx(2.0));
  CHECK(agg.at(Geometry::Spherical).sd.mean_nn == doctest::Approx(1.0));
  CHECK(agg.at(Geometry::Spherical).sd.g1 == doctest::Approx(0.0));
  CHECK(agg.at(Geometry::Hyperbolic).count == 1);
  CHECK(agg.at(Geometry::Hyperbolic).mean.mean_nn == doctest::Approx(7.0));
  CHECK(agg.at(Geometry::Hyperbolic).sd.mean_nn == 0.0);
  CHECK(aggregate_rows({}).empty());
}

TEST_CASE("evaluation validates its configuration") {
  std::vector<CurveSample> split = planar_split(1, 7600);
  CHECK_THROWS_AS(evaluate_method(SchemeConfig::four_point(), "m", split, -1),
                  UsageError);
  SchemeConfig headless;
  headless.kind = SchemeConfig::Kind::Neural;  // no model attached
  CHECK_THROWS_AS(evaluate_method(headless, "m", split, 1), ConfigError);
}

// ---------------------------------------------------------------------------
// Perturbation and robustness.

TEST_CASE("perturbation is planar-only, deterministic, and scales linearly") {
  Rng rng(903);
  ClosedPolygon poly = testutil::random_polygon(Geometry::Euclidean, 12, rng);

  ClosedPolygon zero = perturb_polygon(poly, 0.0, 11);
  for (size_t i = 0; i < poly.pts.size(); ++i) {
    CHECK(zero.pts[i].x() == poly.pts[i].x());
    CHECK(zero.pts[i].y() == poly.pts[i].y());
  }

  ClosedPolygon a = perturb_polygon(poly, 0.05, 11);
  ClosedPolygon b = perturb_polygon(poly, 0.05, 11);
  ClosedPolygon c = perturb_polygon(poly, 0.05, 12);
  ClosedPolygon d = perturb_polygon(poly, 0.10, 11);
  bool seeds_differ = false;
  for (size_t i = 0; i < poly.pts.size(); ++i) {
    CHECK(a.pts[i].x() == b.pts[i].x());
    CHECK(a.pts[i].y() == b.pts[i].y());
    seeds_differ |= a.pts[i].x() != c.pts[i].x();
    // same seed, doubled sigma: every displacement doubles exactly
    double dx = a.pts[i].x() - poly.pts[i].x();
    double dX = d.pts[i].x() - poly.pts[i].x();
    if (std::abs(dx) > 1e-300) CHECK(std::abs(dX / dx - 2.0) < 1e-12);
  }
  CHECK(seeds_differ);

  ClosedPolygon sphere = testutil::regular_ngon(Geometry::Spherical, 8, 0.5);
  CHECK_THROWS_AS(perturb_polygon(sphere, 0.05, 1), UsageError);
}

TEST_CASE("robustness study shares one noise draw across methods") {
  std::vector<CurveSample> split = planar_split(3, 7700);
  std::vector<double> sigmas = {0.0, 0.1};
  std::vector<std::pair<std::string, SchemeConfig>> methods = {
      {"four_point", SchemeConfig::four_point()},
      {"six_point", SchemeConfig::six_point()},
  };
  const uint64_t seed = 5151;
  const int levels = 3;
  std::vector<RobustnessCell> cells = robustness_study(split, sigmas, methods,
                                                       levels, seed);
  REQUIRE(cells.size() == methods.size() * sigmas.size());

  // clean rows coincide with a plain evaluation of the same split
  for (auto& [name, scheme] : methods) {
    auto cell = std::find_if(cells.begin(), cells.end(), [&](auto& c) {
      return c.method == name && c.sigma == 0.0;
    });
    REQUIRE(cell != cells.end());
    EvalRun run = evaluate_method(scheme, name, split, levels);
    const MetricStats& stats = run.aggregate.at(Geometry::Euclidean);
    CHECK(cell->mean_g1 == stats.mean.g1);
    CHECK(cell->mean_nn == stats.mean.mean_nn);
    CHECK(cell->sd_g1 == stats.sd.g1);
  }

  // noisy rows rebuild from the documented per-curve draw, which depends on
  // the curve and sigma index only; this is what keeps the noise shared
  // across methods, so it is frozen here as a regression
  for (size_t mi = 0; mi < methods.size(); ++mi) {
    auto cell = std::find_if(cells.begin(), cells.end(), [&](auto& c) {
      return c.method == methods[mi].first && c.sigma == 0.1;
    });
    REQUIRE(cell != cells.end());
    std::vector<EvalRow> rows;
    for (size_t ci = 0; ci < split.size(); ++ci) {
      ClosedPolygon noisy =
          perturb_polygon(split[ci].control, 0.1, derive_seed(seed, "noise", ci, 1));
      EvalRow row;
      row.geometry = Geometry::Euclidean;
      row.metrics = compute_metrics(apply_scheme(methods[mi].second, noisy, levels),
                                    split[ci].ground_truth);
      rows.push_back(row);
    }
    auto agg = aggregate_rows(rows);
    CHECK(cell->mean_g1 == agg.at(Geometry::Euclidean).mean.g1);
    CHECK(cell->mean_nn == agg.at(Geometry::Euclidean).mean.mean_nn);
  }
}

// ---------------------------------------------------------------------------
// Proximity and angle decay.

TEST_CASE("proximity of the zero-tension rule to itself vanishes") {
  std::vector<CurveSample> split = planar_split(1, 7800);
  ProximityReport rep =
      proximity_diagnostic(SchemeConfig::four_point(), split[0].control, 4);
  REQUIRE(rep.levels.size() == 4);
  for (auto& lv : rep.levels) CHECK(lv.deviation == 0.0);
  CHECK(std::isnan(rep.slope_dev_vs_h));
}

TEST_CASE("proximity diagnostic tracks a shrinking mesh and a finite slope") {
  std::vector<CurveSample> split = planar_split(1, 7900);
  ProximityReport rep =
      proximity_diagnostic(SchemeConfig::logexp(LogExpStencil::SixPoint),
                           split[0].control, 4);
  REQUIRE(rep.levels.size() == 4);
  for (size_t i = 0; i < rep.levels.size(); ++i) {
    CHECK(rep.levels[i].level == static_cast<int>(i));
    CHECK(rep.levels[i].h > 0.0);
    CHECK(rep.levels[i].deviation > 0.0);
    if (i > 0) CHECK(rep.levels[i].h < rep.levels[i - 1].h);
  }
  CHECK(std::isfinite(rep.slope_dev_vs_h));
  CHECK(rep.slope_dev_vs_h > 0.5);
}

TEST_CASE("exterior angles of a regular polygon halve exactly per level") {
  ClosedPolygon poly = testutil::regular_ngon(Geometry::Euclidean, 16, 1.0);
  double rate = angle_decay_rate(SchemeConfig::four_point(), poly, 4);
  CHECK(std::abs(rate - 1.0) < 1e-9);
}

TEST_CASE("angle decay on a smooth oval sits near the halving rate") {
  // mildly eccentric ellipse; sharper ovals approach the halving rate more
  // slowly and are covered by the aggregate check in the acceptance suite
  std::vector<Point> dense = families::ellipse(1.2, 0.9, 800);
  ClosedPolygon control = arclength_sample(dense, 12, Geometry::Euclidean);
  double rate = angle_decay_rate(SchemeConfig::four_point(), control, 5);
  CHECK(rate > 0.85);
  CHECK(rate < 1.1);
}

// ---------------------------------------------------------------------------
// Ground-track case study.

TEST_CASE("ground track construction is deterministic") {
  IssTrack a = iss_track();
  IssTrack b = iss_track();
  REQUIRE(a.ground_truth.size() == b.ground_truth.size());
  for (size_t i = 0; i < a.ground_truth.size(); ++i) {
    CHECK(a.ground_truth[i].x() == b.ground_truth[i].x());
    CHECK(a.ground_truth[i].y() == b.ground_truth[i].y());
    CHECK(a.ground_truth[i].z() == b.ground_truth[i].z());
  }
  CHECK(a.closure_gap_deg == b.closure_gap_deg);
  CHECK(a.closure_points == b.closure_points);
}

TEST_CASE("ground track has the documented shape") {
  IssTrack t = iss_track();
  CHECK(t.ground_truth.size() == 520);
  CHECK(t.control.pts.size() == 16);
  CHECK(t.control.geom == Geometry::Spherical);
  CHECK(t.closure_points == 33);

  // one sidereal-drift gap, closed by a short arc
  CHECK(std::abs(t.closure_gap_deg - 23.2335) < 5e-3);

  double max_lat = 0.0;
  for (const Point& p : t.ground_truth) {
    double n = std::sqrt(p.x() * p.x() + p.y() * p.y() + p.z() * p.z());
    CHECK(std::abs(n - 1.0) < 1e-12);
    max_lat = std::max(max_lat, std::abs(std::asin(std::clamp(p.z(), -1.0, 1.0))));
  }
  CHECK(std::abs(max_lat * 180.0 / kPi - 51.64) < 0.01);

  // control vertices are dense-track samples, bit for bit
  for (const Point& c : t.control.pts) {
    bool found = false;
    for (const Point& p : t.ground_truth)
      found |= c.x() == p.x() && c.y() == p.y() && c.z() == p.z();
    CHECK(found);
  }

  // the loop closes: no consecutive gap wider than a few dense steps
  double max_step = 0.0;
  for (size_t i = 0; i < t.ground_truth.size(); ++i) {
    const Point& p = t.ground_truth[i];
    const Point& q = t.ground_truth[(i + 1) % t.ground_truth.size()];
    max_step = std::max(max_step, geodesic_distance(p, q));
  }
  CHECK(max_step < 0.03);
}

// ---------------------------------------------------------------------------
// Ablations.

TEST_CASE("ablation names round-trip and unknown names are rejected") {
  REQUIRE(all_ablations().size() == 6);
  for (AblationCondition c : all_ablations())
    CHECK(parse_ablation(to_string(c)) == c);
  CHECK_THROWS_AS(parse_ablation("bogus"), UsageError);
}

TEST_CASE("ablation conditions change exactly their own knob") {
  TrainConfig base;
  base.predictor.width = 8;

  TrainConfig full = ablation_config(AblationCondition::LearnedEmbed, base);
  CHECK(full.predictor == base.predictor);
  CHECK(full.lambda_equiv == base.lambda_equiv);

  TrainConfig onehot = ablation_config(AblationCondition::OneHot, base);
  CHECK(onehot.predictor.geometry_mode == GeometryMode::OneHot);
  CHECK(onehot.predictor.input_dim() == 9);
  CHECK(onehot.lambda_equiv == base.lambda_equiv);

  TrainConfig nogeom = ablation_config(AblationCondition::NoGeom, base);
  CHECK(nogeom.predictor.geometry_mode == GeometryMode::None);
  CHECK(nogeom.predictor.input_dim() == 6);

  TrainConfig noequiv = ablation_config(AblationCondition::NoEquiv, base);
  CHECK(noequiv.lambda_equiv == 0.0);
  CHECK(noequiv.lambda_bend == base.lambda_bend);

  TrainConfig nobend = ablation_config(AblationCondition::NoBending, base);
  CHECK(nobend.lambda_bend == 0.0);
  CHECK(nobend.lambda_equiv == base.lambda_equiv);

  TrainConfig nosmooth = ablation_config(AblationCondition::NoSmooth, base);
  CHECK(nosmooth.lambda_smooth_e2 == 0.0);
  CHECK(nosmooth.lambda_smooth_s2 == 0.0);
  CHECK(nosmooth.lambda_smooth_h2 == 0.0);
  CHECK(nosmooth.lambda_bend == base.lambda_bend);
}

TEST_CASE("a miniature ablation run trains and evaluates the held-out curves") {
  Dataset ds;
  uint64_t seed = 8200;
  int i = 0;
  for (Geometry g : {Geometry::Euclidean, Geometry::Spherical, Geometry::Hyperbolic}) {
    for (const std::string& fam : {families_for(g)[0], families_for(g)[1]})
      ds.train.push_back(gen_curve(g, fam, seed + 10 * i++, tiny_cfg()));
    ds.val.push_back(gen_curve(g, families_for(g)[2], seed + 10 * i++, tiny_cfg()));
  }

  TrainConfig base;
  base.predictor.width = 8;
  base.predictor.depth = 1;
  base.predictor.embed_dim = 4;
  base.predictor.head_hidden = 4;
  base.epochs = 2;
  base.eval_every = 1;
  base.neural_steps = 1;
  base.batch_size = 4;
  base.val_levels = 2;

  AblationOutcome out = ablation_run(AblationCondition::NoEquiv, ds, base, 99, 2);
  CHECK(out.condition == AblationCondition::NoEquiv);
  CHECK(out.train.epochs_run >= 1);
  CHECK(!out.train.best_params.empty());
  CHECK(out.eval.rows.size() == ds.val.size());
  CHECK(out.eval.method == std::string("neural_") + to_string(AblationCondition::NoEquiv));
  for (auto& [g, stats] : out.eval.aggregate) CHECK(std::isfinite(stats.mean.mean_nn));
}

// ---------------------------------------------------------------------------
// Predictor tension marginals.

TEST_CASE("tension marginal summarises the predictor on one geometry") {
  std::vector<CurveSample> split = planar_split(2, 8300);
  split.push_back(gen_curve(Geometry::Spherical, "lissajous", 8400, tiny_cfg()));

  SchemeConfig scheme = SchemeConfig::neural(toy_model(17));
  TensionMarginal tm = tension_marginal(scheme, split, Geometry::Spherical);
  CHECK(tm.geometry == Geometry::Spherical);
  // one warm-up level doubles the 12 control vertices
  CHECK(tm.total == 24);
  CHECK(tm.defined > 0);
  CHECK(tm.defined <= tm.total);
  CHECK(tm.mean >= TensionProfile::kClampLo);
  CHECK(tm.mean <= TensionProfile::kClampHi);
  CHECK(std::isfinite(tm.sd));

  CHECK_THROWS_AS(tension_marginal(SchemeConfig::four_point(), split,
                                   Geometry::Euclidean),
                  ConfigError);
}
