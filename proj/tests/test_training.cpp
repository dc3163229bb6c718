#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"

#include "curvesub/dataset.hpp"
#include "curvesub/metrics.hpp"
#include "curvesub/rng.hpp"
#include "curvesub/subdivision.hpp"
#include "curvesub/training.hpp"
#include "test_helpers.hpp"

using namespace curvesub;

namespace {

PredictorConfig toy_net() {
  PredictorConfig p;
  p.width = 8;
  p.depth = 2;
  p.embed_dim = 4;
  p.head_hidden = 4;
  p.dropout = 0.1;
  return p;
}

TrainConfig toy_train() {
  TrainConfig cfg;
  cfg.predictor = toy_net();
  return cfg;
}

// A curve sample whose ground truth is a classical refinement of the control
// polygon; good enough shape data for exercising the loss machinery.
CurveSample make_sample(Geometry g, uint64_t seed, int n_control = 12, int gt_levels = 3) {
  Rng rng(seed);
  CurveSample s;
  s.id = std::string(to_string(g)) + "_toy";
  s.control = testutil::random_polygon(g, n_control, rng);
  s.ground_truth = subdivide_classical(s.control, 0.0, gt_levels).pts;
  return s;
}

std::vector<Isometry> identity_rotations(Geometry g, int k) {
  Isometry id;
  id.geom = g;
  return std::vector<Isometry>(static_cast<size_t>(k), id);
}

}  // namespace

TEST_CASE("learning rate follows the warmup then cosine schedule") {
  TrainConfig cfg;  // lr 1e-3, 5 warm-up epochs, 300 total
  CHECK(lr_at_epoch(0, cfg) == doctest::Approx(2e-4).epsilon(1e-12));
  CHECK(lr_at_epoch(4, cfg) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(lr_at_epoch(5, cfg) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(lr_at_epoch(300, cfg) == doctest::Approx(0.0).epsilon(1e-15));
  // value frozen from an independent evaluation of the schedule formula;
  // halving it reproduces the plateau-reduction rate the schedule is known
  // to produce at epoch 240 of a 300-epoch run
  CHECK(lr_at_epoch(240, cfg) == doctest::Approx(9.8644181034518281e-05).epsilon(1e-12));
  // monotone decay after warm-up
  for (int e = 5; e < 300; ++e) CHECK(lr_at_epoch(e, cfg) >= lr_at_epoch(e + 1, cfg));
}

TEST_CASE("early stopping counters") {
  SUBCASE("strict improvement never halves or stops") {
    EarlyStopController ctrl(1e-5, 10, 25);
    double metric = 1.0;
    for (int i = 0; i < 40; ++i) {
      auto d = ctrl.observe(metric);
      CHECK(d.new_best);
      CHECK_FALSE(d.halve);
      CHECK_FALSE(d.stop);
      metric -= 1e-3;
    }
  }
  SUBCASE("stagnant metric halves after 10 checks and stops after 25") {
    EarlyStopController ctrl(1e-5, 10, 25);
    auto first = ctrl.observe(1.0);
    CHECK(first.new_best);
    int halves_at_stagnant[2] = {0, 0};
    int nh = 0;
    int stop_at = 0;
    for (int stagnant = 1; stagnant <= 25; ++stagnant) {
      auto d = ctrl.observe(1.0);
      CHECK_FALSE(d.new_best);
      if (d.halve && nh < 2) halves_at_stagnant[nh++] = stagnant;
      if (d.stop && stop_at == 0) stop_at = stagnant;
    }
    CHECK(nh == 2);
    CHECK(halves_at_stagnant[0] == 10);
    CHECK(halves_at_stagnant[1] == 20);
    CHECK(stop_at == 25);
  }
  SUBCASE("tiny improvement is a new best but still counts as stagnant") {
    EarlyStopController ctrl(1e-5, 3, 100);
    ctrl.observe(1.0);
    auto d = ctrl.observe(1.0 - 5e-6);  // below the 1e-5 threshold
    CHECK(d.new_best);
    CHECK(ctrl.stagnant() == 1);
    CHECK(ctrl.best() == doctest::Approx(1.0 - 5e-6));
  }
}

TEST_CASE("adamw update") {
  TrainConfig cfg;
  SUBCASE("zero gradient and zero decay leave parameters alone") {
    cfg.weight_decay = 0.0;
    std::vector<double> params{0.5, -1.5};
    AdamWState st(2);
    std::vector<double> grad{0.0, 0.0};
    CHECK(adamw_step(params, st, grad, cfg, 1e-3));
    CHECK(params[0] == 0.5);
    CHECK(params[1] == -1.5);
  }
  SUBCASE("norm-5 gradient is clipped to norm one half before the moments") {
    std::vector<double> params{0.0, 0.0};
    AdamWState st(2);
    std::vector<double> grad{3.0, 4.0};
    CHECK(adamw_step(params, st, grad, cfg, 1e-3));
    // frozen from the clipped gradient (0.3, 0.4): m = 0.1 g, v = 0.05 g^2
    CHECK(st.m[0] == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(st.m[1] == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(st.v[0] == doctest::Approx(0.0045).epsilon(1e-12));
    CHECK(st.v[1] == doctest::Approx(0.008).epsilon(1e-12));
  }
  SUBCASE("single step matches the hand-evaluated update rule") {
    cfg.lr = 0.1;  // passed explicitly below; kept for clarity
    std::vector<double> params{1.0, -2.0};
    AdamWState st(2);
    std::vector<double> grad{0.01, 0.02};
    CHECK(adamw_step(params, st, grad, cfg, 0.1));
    // frozen from evaluating the decoupled update by hand at t = 1
    CHECK(params[0] == doctest::Approx(0.8999900999999001).epsilon(1e-14));
    CHECK(params[1] == doctest::Approx(-2.0999799500000247).epsilon(1e-14));
    CHECK(st.step_count == 1);
  }
  SUBCASE("non-finite gradient skips the step") {
    std::vector<double> params{1.0, 2.0};
    AdamWState st(2);
    std::vector<double> grad{0.1, std::numeric_limits<double>::quiet_NaN()};
    CHECK_FALSE(adamw_step(params, st, grad, cfg, 1e-3));
    CHECK(params[0] == 1.0);
    CHECK(params[1] == 2.0);
    CHECK(st.step_count == 0);
    CHECK(st.skipped_steps == 1);
  }
}

TEST_CASE("loss components behave as the weighted sum promises") {
  TrainConfig cfg = toy_train();
  cfg.predictor.dropout = 0.0;  // deterministic forward for these checks
  std::vector<double> params = init_params(cfg.predictor, 99);
  CurveSample s = make_sample(Geometry::Euclidean, 7);
  auto rots = identity_rotations(Geometry::Euclidean, cfg.k_equiv);

  SUBCASE("zeroing the regularizer weights reduces the loss to fidelity") {
    cfg.lambda_smooth_e2 = 0.0;
    cfg.lambda_bend = 0.0;
    cfg.lambda_equiv = 0.0;
    LossComponents c = sample_loss(s, params, cfg, rots, 0);
    CHECK(std::isfinite(c.total));
    CHECK(c.total == c.chamfer * cfg.lambda_chamfer);
  }
  SUBCASE("identity rotations make the consistency term exactly zero") {
    LossComponents c = sample_loss(s, params, cfg, rots, 0);
    CHECK(c.equiv == 0.0);
  }
  SUBCASE("ground truth equal to the refined vertex set zeroes fidelity") {
    auto model = std::make_shared<NeuralModel>();
    model->cfg = cfg.predictor;
    model->params = params;
    SchemeConfig scheme = SchemeConfig::neural(model, cfg.warmup_mu);
    CurveSample t = s;
    t.ground_truth = apply_scheme(scheme, t.control, 1 + cfg.neural_steps).pts;
    LossComponents c = sample_loss(t, params, cfg, rots, 0);
    CHECK(c.chamfer < 1e-12);
    CHECK(c.smooth > 0.0);
  }
  SUBCASE("components are individually reproduced by the total") {
    LossComponents c = sample_loss(s, params, cfg, rots, 0);
    double expect = cfg.lambda_chamfer * c.chamfer + cfg.lambda_smooth_e2 * c.smooth +
                    cfg.lambda_bend * c.bend + cfg.lambda_equiv * c.equiv;
    CHECK(c.total == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("warm-up step carries no gradient when the network is unused downstream") {
  // With no neural steps and the consistency weight off, nothing on the tape
  // depends on the parameters: the classical warm-up runs outside it.
  TrainConfig cfg = toy_train();
  cfg.neural_steps = 0;
  cfg.lambda_equiv = 0.0;
  std::vector<double> params = init_params(cfg.predictor, 3);
  for (Geometry g : kAllGeometries) {
    CurveSample s = make_sample(g, 11);
    auto rots = identity_rotations(g, cfg.k_equiv);
    auto [grad, c] = sample_gradient(s, params, cfg, rots, 5);
    CHECK(std::isfinite(c.total));
    for (double x : grad) CHECK(x == 0.0);
  }
}

TEST_CASE("pipeline gradient matches central finite differences in every geometry") {
  TrainConfig cfg = toy_train();
  std::vector<double> params = init_params(cfg.predictor, 2024);
  for (Geometry g : kAllGeometries) {
    CAPTURE(to_string(g));
    CurveSample s = make_sample(g, 31 + static_cast<uint64_t>(g), 6, 4);
    const CurveSample* one[] = {&s};
    auto rots = draw_equiv_rotations(one, cfg, 400);
    uint64_t drop_base = sample_dropout_base(400, 0);

    auto [grad, c] = sample_gradient(s, params, cfg, rots[0], drop_base);
    REQUIRE(std::isfinite(c.total));

    Rng pick(77);
    for (int trial = 0; trial < 20; ++trial) {
      auto i = static_cast<size_t>(pick.uniform_int(0, static_cast<int64_t>(params.size()) - 1));
      double h = 1e-5;
      std::vector<double> pp = params;
      pp[i] += h;
      double up = sample_loss(s, pp, cfg, rots[0], drop_base).total;
      pp[i] = params[i] - h;
      double dn = sample_loss(s, pp, cfg, rots[0], drop_base).total;
      double fd = (up - dn) / (2 * h);
      double err = std::fabs(grad[i] - fd);
      double tol = 1e-4 * std::max(std::fabs(fd), 1e-4);
      CAPTURE(i);
      CHECK(err < tol);
    }
  }
}

TEST_CASE("grouped batch evaluation reproduces the per-sample gradients") {
  TrainConfig cfg = toy_train();  // dropout 0.1 stays on: masks must align
  std::vector<double> params = init_params(cfg.predictor, 5);

  std::vector<CurveSample> samples;
  samples.push_back(make_sample(Geometry::Euclidean, 1));
  samples.push_back(make_sample(Geometry::Spherical, 2));
  samples.push_back(make_sample(Geometry::Euclidean, 3));
  samples.push_back(make_sample(Geometry::Hyperbolic, 4));
  samples.push_back(make_sample(Geometry::Spherical, 5));
  samples.push_back(make_sample(Geometry::Hyperbolic, 6));
  samples.push_back(make_sample(Geometry::Euclidean, 7));
  samples.push_back(make_sample(Geometry::Spherical, 8));
  std::vector<const CurveSample*> batch;
  for (const CurveSample& s : samples) batch.push_back(&s);

  uint64_t batch_seed = 1234;
  BatchResult r = batch_gradient(batch, params, cfg, batch_seed);
  REQUIRE(r.used == 8);
  REQUIRE(r.skipped.empty());

  auto rots = draw_equiv_rotations(batch, cfg, batch_seed);
  std::vector<double> mean(params.size(), 0.0);
  double mean_total = 0.0;
  for (size_t s = 0; s < batch.size(); ++s) {
    auto [grad, c] =
        sample_gradient(*batch[s], params, cfg, rots[s], sample_dropout_base(batch_seed, s));
    REQUIRE(std::isfinite(c.total));
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += grad[i];
    mean_total += c.total;
  }
  for (double& x : mean) x /= static_cast<double>(batch.size());
  mean_total /= static_cast<double>(batch.size());

  double worst = 0.0;
  for (size_t i = 0; i < mean.size(); ++i)
    worst = std::max(worst, std::fabs(mean[i] - r.grad[i]));
  CHECK(worst < 1e-10);
  CHECK(std::fabs(mean_total - r.mean_loss.total) < 1e-12);

  SUBCASE("identical batch seed reproduces the gradient bitwise") {
    BatchResult r2 = batch_gradient(batch, params, cfg, batch_seed);
    for (size_t i = 0; i < r.grad.size(); ++i) CHECK(r.grad[i] == r2.grad[i]);
  }
}

TEST_CASE("samples that cannot be evaluated are skipped, not fatal") {
  TrainConfig cfg = toy_train();
  std::vector<double> params = init_params(cfg.predictor, 5);
  CurveSample good = make_sample(Geometry::Euclidean, 42);
  CurveSample bad = make_sample(Geometry::Euclidean, 43);
  bad.ground_truth.clear();

  std::vector<const CurveSample*> batch{&good, &bad};
  BatchResult r = batch_gradient(batch, params, cfg, 9);
  CHECK(r.used == 1);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0] == 1);

  auto rots = draw_equiv_rotations(batch, cfg, 9);
  auto [grad, c] = sample_gradient(good, params, cfg, rots[0], sample_dropout_base(9, 0));
  for (size_t i = 0; i < grad.size(); ++i) CHECK(std::fabs(grad[i] - r.grad[i]) < 1e-12);

  LossComponents lc = sample_loss(bad, params, cfg, rots[1], sample_dropout_base(9, 1));
  CHECK(std::isnan(lc.total));
}

TEST_CASE("validation reports per-geometry fidelity and their mean") {
  TrainConfig cfg = toy_train();
  std::vector<double> params = init_params(cfg.predictor, 12);
  std::vector<CurveSample> val;
  for (Geometry g : kAllGeometries) val.push_back(make_sample(g, 50 + static_cast<uint64_t>(g)));

  ValidationResult v = validate(val, params, cfg);
  double total = 0.0;
  for (size_t gi = 0; gi < 3; ++gi) {
    CHECK(std::isfinite(v.per_geometry[gi]));
    CHECK(v.per_geometry[gi] >= 0.0);
    CHECK(std::isfinite(v.loss_depth[gi]));
    total += v.per_geometry[gi];
  }
  CHECK(v.mean == doctest::Approx(total / 3.0).epsilon(1e-12));
}

TEST_CASE("training loop runs, logs every epoch, and is deterministic") {
  TrainConfig cfg = toy_train();
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.eval_every = 1;
  cfg.val_levels = 3;  // keep the smoke run fast

  Dataset data;
  uint64_t n = 0;
  for (Geometry g : kAllGeometries) {
    data.train.push_back(make_sample(g, 100 + n++));
    data.train.push_back(make_sample(g, 100 + n++));
    data.val.push_back(make_sample(g, 200 + n++));
  }

  TrainResult a = train(data, cfg, 777);
  CHECK(a.epochs_run == 2);
  CHECK(a.log.size() == 3);  // initial validation plus one record per epoch
  CHECK(a.best_params.size() == param_count(cfg.predictor));
  CHECK(std::isfinite(a.initial_metric));
  CHECK(std::isfinite(a.best_metric));
  CHECK(a.best_metric <= a.initial_metric);  // the initial check is a candidate

  TrainResult b = train(data, cfg, 777);
  REQUIRE(b.log.size() == a.log.size());
  for (size_t i = 0; i < a.log.size(); ++i) CHECK(a.log[i] == b.log[i]);

  SUBCASE("a different seed changes the log") {
    TrainResult c = train(data, cfg, 778);
    CHECK(c.log.back() != a.log.back());
  }

  SUBCASE("an impossible improvement threshold trips the plateau logic") {
    cfg.min_improve = 1e9;
    cfg.lr_patience = 1;
    cfg.stop_patience = 2;
    TrainResult c = train(data, cfg, 777);
    CHECK(c.stopped_early);
    CHECK(c.epochs_run == 2);
  }
}

TEST_CASE("training rejects unusable splits") {
  TrainConfig cfg = toy_train();
  Dataset empty;
  CHECK_THROWS_AS(train(empty, cfg, 1), ConfigError);

  Dataset lopsided;
  lopsided.train.push_back(make_sample(Geometry::Euclidean, 1));
  lopsided.val.push_back(make_sample(Geometry::Spherical, 2));
  CHECK_THROWS_AS(train(lopsided, cfg, 1), ConfigError);

  std::vector<const CurveSample*> none;
  std::vector<double> params = init_params(cfg.predictor, 1);
  CHECK_THROWS_AS(batch_gradient(none, params, cfg, 0), UsageError);
}

TEST_CASE("warm-started training continues the epoch counter") {
  TrainConfig cfg = toy_train();
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.eval_every = 1;
  cfg.val_levels = 3;

  Dataset data;
  uint64_t n = 0;
  for (Geometry g : kAllGeometries) {
    data.train.push_back(make_sample(g, 300 + n++));
    data.val.push_back(make_sample(g, 400 + n++));
  }

  TrainResult first = train(data, cfg, 55);

  TrainConfig more = cfg;
  more.epochs = 4;
  more.resume_params = first.best_params;
  more.resume_epoch = 2;
  TrainResult second = train(data, more, 55);
  CHECK(second.epochs_run == 4);  // absolute counter, two fresh epochs
  CHECK(second.log.size() == 3);  // baseline plus epochs 2 and 3
  CHECK(second.log[0].find("\"epoch\":1") != std::string::npos);
  CHECK(second.log[1].find("\"epoch\":2") != std::string::npos);
  CHECK(second.initial_metric == doctest::Approx(first.best_metric).epsilon(1e-12));
  CHECK(second.best_metric <= first.best_metric);

  SUBCASE("mismatched parameter shapes are rejected") {
    more.resume_params.pop_back();
    CHECK_THROWS_AS(train(data, more, 55), ConfigError);
  }
  SUBCASE("a resume point past the schedule is rejected") {
    more.resume_epoch = 5;
    CHECK_THROWS_AS(train(data, more, 55), ConfigError);
  }
}
