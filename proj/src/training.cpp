#include "curvesub/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <type_traits>

#include "json.hpp"

#include "curvesub/autodiff.hpp"
#include "curvesub/features.hpp"
#include "curvesub/metrics.hpp"
#include "curvesub/rng.hpp"

namespace curvesub {

namespace {

using ad::Var;
using ad::value_of;

constexpr double kBendEps = 1e-8;  // matches the bending-energy metric
constexpr double kAdamEps = 1e-8;

template <class K>
typename K::Pt lift_point(const Point& p) {
  using T = typename K::Scalar;
  if constexpr (std::is_same_v<typename K::Pt, Vec2<T>>)
    return {T(p.c[0]), T(p.c[1])};
  else
    return {T(p.c[0]), T(p.c[1]), T(p.c[2])};
}

template <class K>
std::vector<typename K::Pt> lift_polygon(const ClosedPolygon& poly) {
  std::vector<typename K::Pt> out;
  out.reserve(poly.pts.size());
  for (const Point& p : poly.pts) out.push_back(lift_point<K>(p));
  return out;
}

template <class K>
ClosedPolygon detach_polygon(const std::vector<typename K::Pt>& pts) {
  using T = typename K::Scalar;
  ClosedPolygon out;
  out.geom = K::geom;
  out.pts.reserve(pts.size());
  for (const auto& p : pts) {
    if constexpr (std::is_same_v<typename K::Pt, Vec2<T>>)
      out.pts.push_back({K::geom, {value_of(p.x), value_of(p.y), 0.0}});
    else
      out.pts.push_back({K::geom, {value_of(p.x), value_of(p.y), value_of(p.z)}});
  }
  return out;
}

// Bending uses ambient chords on the disk and geodesics elsewhere, the same
// convention as the bending-energy metric.
template <class K>
typename K::Scalar bend_edge_length(const typename K::Pt& a, const typename K::Pt& b) {
  if constexpr (K::geom == Geometry::Hyperbolic) {
    using std::sqrt;
    using ad::sqrt;
    return sqrt(norm2(a - b));
  } else {
    return K::dist(a, b);
  }
}

bool finite_polygon(const ClosedPolygon& poly) {
  for (const Point& p : poly.pts)
    for (double c : p.c)
      if (!std::isfinite(c)) return false;
  return true;
}

struct GroupInput {
  const CurveSample* sample = nullptr;
  const std::vector<Isometry>* rotations = nullptr;
  uint64_t drop_base = 0;
};

template <class T>
struct GroupOutcome {
  std::vector<bool> ok;
  std::vector<T> total;
  std::vector<LossComponents> comps;
};

// Evaluates the loss of every sample in one geometry group, sharing a single
// network invocation per refinement step over the concatenated edge features.
// A sample that throws or overflows anywhere along the way is marked dead and
// simply drops out of the joint evaluation; per-edge dropout seeding keeps
// the surviving samples' results independent of the group's composition.
template <class K>
GroupOutcome<typename K::Scalar> evaluate_group(const std::vector<GroupInput>& in,
                                                std::span<const typename K::Scalar> params,
                                                const TrainConfig& cfg) {
  using T = typename K::Scalar;
  using KD = typename KernelFor<K::geom, double>::type;

  const size_t m = in.size();
  GroupOutcome<T> out;
  out.ok.assign(m, true);
  out.total.resize(m, T(0.0));
  out.comps.resize(m);

  // Classical warm-up, off the tape by construction: its output enters the
  // differentiable part only as plain numbers.
  std::vector<std::vector<typename K::Pt>> polys(m);
  for (size_t i = 0; i < m; ++i) {
    try {
      ClosedPolygon p1 = subdivide_classical(in[i].sample->control, cfg.warmup_mu, 1, cfg.hyp_mode);
      if (!finite_polygon(p1)) throw DomainError("warm-up produced non-finite vertices");
      polys[i] = lift_polygon<K>(p1);
    } catch (const std::exception&) {
      out.ok[i] = false;
    }
  }

  // Neural refinement steps, evaluated jointly per step.
  for (int t = 0; t < cfg.neural_steps; ++t) {
    std::vector<T> feats;
    std::vector<uint64_t> seeds;
    std::vector<size_t> counts(m, 0);
    for (size_t i = 0; i < m; ++i) {
      if (!out.ok[i]) continue;
      try {
        std::vector<T> f = pipeline::extract_features_t<K>(polys[i]);
        counts[i] = polys[i].size();
        feats.insert(feats.end(), f.begin(), f.end());
        for (size_t e = 0; e < counts[i]; ++e)
          seeds.push_back(derive_seed(in[i].drop_base, "edge", static_cast<uint64_t>(t), e));
      } catch (const std::exception&) {
        out.ok[i] = false;
        counts[i] = 0;
      }
    }
    size_t total_edges = seeds.size();
    if (total_edges == 0) return out;
    std::vector<T> alphas = predictor_forward<T>(cfg.predictor, params, feats, total_edges,
                                                 ForwardMode::Train, 0, seeds);
    size_t off = 0;
    for (size_t i = 0; i < m; ++i) {
      if (counts[i] == 0) continue;
      std::vector<T> a(alphas.begin() + static_cast<long>(off),
                       alphas.begin() + static_cast<long>(off + counts[i]));
      off += counts[i];
      if (!out.ok[i]) continue;
      try {
        polys[i] = pipeline::subdivide_once_t<K>(polys[i], a, cfg.hyp_mode);
      } catch (const std::exception&) {
        out.ok[i] = false;
      }
    }
  }

  // Rotation-consistency term: the refined polygon is detached, rotated, and
  // re-featurised in plain doubles; only the network runs on the tape, in
  // eval mode so identical features give identical angles.
  std::vector<ClosedPolygon> detached(m);
  std::vector<T> equiv(m, T(0.0));
  if (cfg.k_equiv > 0 && cfg.lambda_equiv != 0.0) {
    std::vector<T> efeats;
    std::vector<size_t> ecounts(m, 0);
    for (size_t i = 0; i < m; ++i) {
      if (!out.ok[i]) continue;
      try {
        detached[i] = detach_polygon<K>(polys[i]);
        auto push_features = [&](const ClosedPolygon& poly) {
          std::vector<double> f;
          if constexpr (ambient_dim(K::geom) == 2)
            f = pipeline::extract_features_t<KD>(polygon_vec2(poly));
          else
            f = pipeline::extract_features_t<KD>(polygon_vec3(poly));
          for (double x : f) efeats.push_back(T(x));
        };
        push_features(detached[i]);
        for (int k = 0; k < cfg.k_equiv; ++k)
          push_features((*in[i].rotations)[static_cast<size_t>(k)].apply(detached[i]));
        ecounts[i] = polys[i].size();
      } catch (const std::exception&) {
        out.ok[i] = false;
      }
    }
    size_t rows = efeats.size() / kFeatureDim;
    if (rows > 0) {
      std::vector<T> angles =
          predictor_forward<T>(cfg.predictor, params, efeats, rows, ForwardMode::Eval);
      size_t off = 0;
      for (size_t i = 0; i < m; ++i) {
        if (ecounts[i] == 0) continue;
        size_t n = ecounts[i];
        T acc(0.0);
        for (int k = 0; k < cfg.k_equiv; ++k)
          for (size_t j = 0; j < n; ++j) {
            T d = angles[off + j] - angles[off + n * static_cast<size_t>(k + 1) + j];
            acc += d * d;
          }
        equiv[i] = acc * (1.0 / cfg.k_equiv);
        off += n * static_cast<size_t>(cfg.k_equiv + 1);
      }
    }
  } else {
    for (size_t i = 0; i < m; ++i)
      if (out.ok[i]) detached[i] = detach_polygon<K>(polys[i]);
  }

  // Fidelity, smoothness, and bending per sample. Nearest-neighbour
  // assignments are decided on the detached values; only the realized
  // distances are differentiated.
  for (size_t i = 0; i < m; ++i) {
    if (!out.ok[i]) continue;
    try {
      const auto& p3 = polys[i];
      const size_t n3 = p3.size();
      const std::vector<Point>& gt = in[i].sample->ground_truth;
      if (gt.empty()) throw DomainError("sample has no ground truth");

      std::vector<typename KD::Pt> p3d = lift_polygon<KD>(detached[i]);
      std::vector<typename KD::Pt> gtd;
      gtd.reserve(gt.size());
      for (const Point& g : gt) gtd.push_back(lift_point<KD>(g));

      T sum_pg(0.0);
      for (size_t j = 0; j < n3; ++j) {
        size_t arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t g = 0; g < gtd.size(); ++g) {
          double d = KD::dist(p3d[j], gtd[g]);
          if (d < best) {
            best = d;
            arg = g;
          }
        }
        sum_pg += K::dist(p3[j], lift_point<K>(gt[arg]));
      }
      T sum_gp(0.0);
      for (size_t g = 0; g < gtd.size(); ++g) {
        size_t arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < n3; ++j) {
          double d = KD::dist(gtd[g], p3d[j]);
          if (d < best) {
            best = d;
            arg = j;
          }
        }
        sum_gp += K::dist(lift_point<K>(gt[g]), p3[arg]);
      }
      T chamfer =
          (sum_pg * (1.0 / static_cast<double>(n3)) + sum_gp * (1.0 / static_cast<double>(gtd.size()))) *
          0.5;

      std::vector<T> deltas = pipeline::exterior_angles_t<K>(p3);
      T smooth(0.0);
      for (const T& d : deltas) smooth += d * d;
      smooth = smooth * (1.0 / static_cast<double>(n3));

      std::vector<T> lens(n3);
      for (size_t j = 0; j < n3; ++j) lens[j] = bend_edge_length<K>(p3[j], p3[(j + 1) % n3]);
      T bend(0.0);
      for (size_t j = 0; j < n3; ++j) {
        T denom = (lens[(j + n3 - 1) % n3] + lens[j]) * 0.5 + kBendEps;
        T r = deltas[j] / denom;
        bend += r * r;
      }
      bend = bend * (1.0 / static_cast<double>(n3));

      T total = chamfer * cfg.lambda_chamfer + smooth * cfg.lambda_smooth_for(K::geom) +
                bend * cfg.lambda_bend + equiv[i] * cfg.lambda_equiv;
      if (!std::isfinite(value_of(total))) {
        out.ok[i] = false;
        continue;
      }
      out.total[i] = total;
      out.comps[i] = {value_of(chamfer), value_of(smooth), value_of(bend), value_of(equiv[i]),
                      value_of(total)};
    } catch (const std::exception&) {
      out.ok[i] = false;
    }
  }
  return out;
}

template <class T>
GroupOutcome<T> evaluate_group_dispatch(Geometry g, const std::vector<GroupInput>& in,
                                        std::span<const T> params, const TrainConfig& cfg) {
  return dispatch_geometry(g, [&](auto tag) {
    using K = typename KernelFor<decltype(tag)::value, T>::type;
    return evaluate_group<K>(in, params, cfg);
  });
}

void accumulate(LossComponents& into, const LossComponents& c) {
  into.chamfer += c.chamfer;
  into.smooth += c.smooth;
  into.bend += c.bend;
  into.equiv += c.equiv;
  into.total += c.total;
}

void scale(LossComponents& c, double s) {
  c.chamfer *= s;
  c.smooth *= s;
  c.bend *= s;
  c.equiv *= s;
  c.total *= s;
}

}  // namespace

std::vector<std::vector<Isometry>> draw_equiv_rotations(
    std::span<const CurveSample* const> batch, const TrainConfig& cfg, uint64_t batch_seed) {
  Rng rng(derive_seed(batch_seed, "iso"));
  std::vector<std::vector<Isometry>> out(batch.size());
  for (size_t s = 0; s < batch.size(); ++s) {
    out[s].reserve(static_cast<size_t>(std::max(cfg.k_equiv, 0)));
    for (int k = 0; k < cfg.k_equiv; ++k)
      out[s].push_back(random_rotation(batch[s]->geometry(), rng));
  }
  return out;
}

uint64_t sample_dropout_base(uint64_t batch_seed, size_t index_in_batch) {
  return derive_seed(batch_seed, "drop", index_in_batch);
}

LossComponents sample_loss(const CurveSample& sample, std::span<const double> params,
                           const TrainConfig& cfg, std::span<const Isometry> rotations,
                           uint64_t dropout_base) {
  if (rotations.size() < static_cast<size_t>(cfg.k_equiv))
    throw UsageError("fewer rotations than the consistency term needs");
  std::vector<Isometry> rots(rotations.begin(), rotations.end());
  std::vector<GroupInput> in{{&sample, &rots, dropout_base}};
  auto res = evaluate_group_dispatch<double>(sample.geometry(), in, params, cfg);
  if (!res.ok[0]) {
    LossComponents c;
    c.total = std::numeric_limits<double>::quiet_NaN();
    return c;
  }
  return res.comps[0];
}

LossComponents sample_loss(const CurveSample& sample, std::span<const double> params,
                           const TrainConfig& cfg, uint64_t seed) {
  const CurveSample* one[] = {&sample};
  auto rots = draw_equiv_rotations(one, cfg, seed);
  return sample_loss(sample, params, cfg, rots[0], sample_dropout_base(seed, 0));
}

std::pair<std::vector<double>, LossComponents> sample_gradient(
    const CurveSample& sample, std::span<const double> params, const TrainConfig& cfg,
    std::span<const Isometry> rotations, uint64_t dropout_base) {
  if (rotations.size() < static_cast<size_t>(cfg.k_equiv))
    throw UsageError("fewer rotations than the consistency term needs");
  std::vector<Isometry> rots(rotations.begin(), rotations.end());
  std::vector<GroupInput> in{{&sample, &rots, dropout_base}};

  ad::Tape tape;
  ad::TapeScope scope(tape);
  std::vector<Var> pv;
  pv.reserve(params.size());
  for (double p : params) pv.push_back(ad::leaf(p));

  auto res = evaluate_group_dispatch<Var>(sample.geometry(), in,
                                          std::span<const Var>(pv.data(), pv.size()), cfg);
  std::vector<double> grad(params.size(), 0.0);
  if (!res.ok[0]) {
    LossComponents c;
    c.total = std::numeric_limits<double>::quiet_NaN();
    return {std::move(grad), c};
  }
  std::vector<double> adj = tape.backward(res.total[0].idx);
  for (size_t i = 0; i < pv.size(); ++i) grad[i] = adj[static_cast<size_t>(pv[i].idx)];
  return {std::move(grad), res.comps[0]};
}

BatchResult batch_gradient(std::span<const CurveSample* const> batch,
                           std::span<const double> params, const TrainConfig& cfg,
                           uint64_t batch_seed) {
  if (batch.empty()) throw UsageError("batch_gradient needs a nonempty batch");
  auto rotations = draw_equiv_rotations(batch, cfg, batch_seed);

  BatchResult res;
  res.grad.assign(params.size(), 0.0);

  for (Geometry g : kAllGeometries) {
    std::vector<GroupInput> in;
    std::vector<size_t> batch_idx;
    for (size_t s = 0; s < batch.size(); ++s) {
      if (batch[s]->geometry() != g) continue;
      in.push_back({batch[s], &rotations[s], sample_dropout_base(batch_seed, s)});
      batch_idx.push_back(s);
    }
    if (in.empty()) continue;

    ad::Tape tape;
    ad::TapeScope scope(tape);
    std::vector<Var> pv;
    pv.reserve(params.size());
    for (double p : params) pv.push_back(ad::leaf(p));

    auto group = evaluate_group_dispatch<Var>(g, in, std::span<const Var>(pv.data(), pv.size()), cfg);

    // Dead samples are never seeded, so their subtrees contribute nothing to
    // the backward sweep.
    Var gsum(0.0);
    bool any = false;
    for (size_t i = 0; i < in.size(); ++i) {
      if (!group.ok[i]) {
        res.skipped.push_back(batch_idx[i]);
        continue;
      }
      gsum += group.total[i];
      accumulate(res.mean_loss, group.comps[i]);
      ++res.used;
      any = true;
    }
    if (any) {
      std::vector<double> adj = tape.backward(gsum.idx);
      for (size_t i = 0; i < pv.size(); ++i)
        res.grad[i] += adj[static_cast<size_t>(pv[i].idx)];
    }
  }

  if (res.used > 0) {
    double inv = 1.0 / res.used;
    for (double& x : res.grad) x *= inv;
    scale(res.mean_loss, inv);
  }
  std::sort(res.skipped.begin(), res.skipped.end());
  return res;
}

double lr_at_epoch(int epoch, const TrainConfig& cfg) {
  if (epoch < cfg.warmup_epochs)
    return cfg.lr * static_cast<double>(epoch + 1) / static_cast<double>(cfg.warmup_epochs);
  if (cfg.epochs <= cfg.warmup_epochs) return cfg.lr;
  double t = static_cast<double>(epoch - cfg.warmup_epochs) /
             static_cast<double>(cfg.epochs - cfg.warmup_epochs);
  return cfg.lr * 0.5 * (1.0 + std::cos(kPi * t));
}

bool adamw_step(std::span<double> params, AdamWState& state, std::span<const double> grad,
                const TrainConfig& cfg, double lr) {
  if (params.size() != grad.size() || state.m.size() != params.size())
    throw UsageError("optimizer state and gradient must match the parameter count");

  double norm2_sum = 0.0;
  for (double g : grad) norm2_sum += g * g;
  if (!std::isfinite(norm2_sum)) {
    ++state.skipped_steps;
    return false;
  }
  double nrm = std::sqrt(norm2_sum);
  double clip = nrm > cfg.clip_norm && nrm > 0.0 ? cfg.clip_norm / nrm : 1.0;

  ++state.step_count;
  double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step_count));
  double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step_count));
  for (size_t i = 0; i < params.size(); ++i) {
    double g = grad[i] * clip;
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    double mhat = state.m[i] / bc1;
    double vhat = state.v[i] / bc2;
    params[i] -= lr * (mhat / (std::sqrt(vhat) + kAdamEps)) + lr * cfg.weight_decay * params[i];
  }
  return true;
}

EarlyStopController::Decision EarlyStopController::observe(double metric) {
  Decision d;
  ++checks_;
  if (metric < best_abs_) {
    best_abs_ = metric;
    d.new_best = true;
  }
  if (best_ref_ - metric >= min_improve_) {
    best_ref_ = metric;
    lr_count_ = 0;
    stop_count_ = 0;
    return d;
  }
  ++lr_count_;
  ++stop_count_;
  if (lr_count_ >= lr_patience_) {
    d.halve = true;
    lr_count_ = 0;
  }
  if (stop_count_ >= stop_patience_) d.stop = true;
  return d;
}

ValidationResult validate(std::span<const CurveSample> val, std::span<const double> params,
                          const TrainConfig& cfg) {
  auto model = std::make_shared<NeuralModel>();
  model->cfg = cfg.predictor;
  model->params.assign(params.begin(), params.end());
  SchemeConfig scheme = SchemeConfig::neural(model, cfg.warmup_mu);
  scheme.hyp_mode = cfg.hyp_mode;

  std::array<double, 3> sum{};
  std::array<double, 3> sum_loss_depth{};
  std::array<size_t, 3> count{};
  for (const CurveSample& s : val) {
    auto gi = static_cast<size_t>(s.geometry());
    ClosedPolygon deep = apply_scheme(scheme, s.control, cfg.val_levels);
    sum[gi] += mean_nn(deep.pts, s.ground_truth);
    ClosedPolygon shallow = apply_scheme(scheme, s.control, 1 + cfg.neural_steps);
    sum_loss_depth[gi] += mean_nn(shallow.pts, s.ground_truth);
    ++count[gi];
  }

  ValidationResult out;
  double total = 0.0;
  int present = 0;
  for (size_t gi = 0; gi < 3; ++gi) {
    if (count[gi] == 0) {
      out.per_geometry[gi] = std::numeric_limits<double>::quiet_NaN();
      out.loss_depth[gi] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out.per_geometry[gi] = sum[gi] / static_cast<double>(count[gi]);
    out.loss_depth[gi] = sum_loss_depth[gi] / static_cast<double>(count[gi]);
    total += out.per_geometry[gi];
    ++present;
  }
  if (present == 0) throw ConfigError("validation split is empty");
  out.mean = total / present;
  return out;
}

namespace {

nlohmann::ordered_json validation_json(const ValidationResult& v) {
  nlohmann::ordered_json j;
  for (Geometry g : kAllGeometries)
    j[to_string(g)] = v.per_geometry[static_cast<size_t>(g)];
  j["mean"] = v.mean;
  nlohmann::ordered_json depth;
  for (Geometry g : kAllGeometries)
    depth[to_string(g)] = v.loss_depth[static_cast<size_t>(g)];
  j["loss_depth"] = depth;
  return j;
}

}  // namespace

TrainResult train(const Dataset& data, const TrainConfig& cfg, uint64_t seed) {
  if (data.train.empty() || data.val.empty())
    throw ConfigError("training requires nonempty train and validation splits");
  for (Geometry g : kAllGeometries)
    if (count_geometry(data.train, g) > 0 && count_geometry(data.val, g) == 0)
      throw ConfigError(std::string("no validation curves for geometry ") + to_string(g));
  if (cfg.batch_size <= 0 || cfg.epochs <= 0 || cfg.eval_every <= 0)
    throw ConfigError("batch size, epochs, and eval cadence must be positive");

  if (cfg.resume_epoch < 0 || cfg.resume_epoch > cfg.epochs)
    throw ConfigError("resume epoch lies outside the schedule");
  std::vector<double> params;
  if (cfg.resume_params.empty()) {
    params = init_params(cfg.predictor, derive_seed(seed, "init"));
  } else {
    if (cfg.resume_params.size() != param_count(cfg.predictor))
      throw ConfigError("resume parameters do not match the predictor shape");
    params = cfg.resume_params;
  }
  AdamWState state(params.size());
  EarlyStopController ctrl(cfg.min_improve, cfg.lr_patience, cfg.stop_patience);
  double lr_scale = 1.0;

  TrainResult res;
  ValidationResult v0 = validate(data.val, params, cfg);
  ctrl.observe(v0.mean);
  res.initial_metric = v0.mean;
  res.best_params = params;
  res.best_metric = v0.mean;
  res.best_epoch = cfg.resume_epoch - 1;
  {
    nlohmann::ordered_json j;
    j["epoch"] = cfg.resume_epoch - 1;
    j["val"] = validation_json(v0);
    res.log.push_back(j.dump());
  }

  std::vector<size_t> order(data.train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int e = cfg.resume_epoch; e < cfg.epochs; ++e) {
    double lr_e = lr_at_epoch(e, cfg) * lr_scale;

    Rng shuffle_rng(derive_seed(seed, "shuffle", static_cast<uint64_t>(e)));
    for (size_t i = order.size(); i > 1; --i) {
      auto j = static_cast<size_t>(shuffle_rng.uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }

    LossComponents epoch_loss;
    int epoch_used = 0;
    int epoch_skipped = 0;
    int epoch_skipped_steps = 0;
    size_t n_batches = (order.size() + static_cast<size_t>(cfg.batch_size) - 1) /
                       static_cast<size_t>(cfg.batch_size);
    for (size_t b = 0; b < n_batches; ++b) {
      std::vector<const CurveSample*> batch;
      size_t lo = b * static_cast<size_t>(cfg.batch_size);
      size_t hi = std::min(order.size(), lo + static_cast<size_t>(cfg.batch_size));
      for (size_t i = lo; i < hi; ++i) batch.push_back(&data.train[order[i]]);

      uint64_t bseed = derive_seed(seed, "batch", static_cast<uint64_t>(e), b);
      BatchResult r = batch_gradient(batch, params, cfg, bseed);
      epoch_skipped += static_cast<int>(r.skipped.size());
      if (r.used == 0) continue;
      LossComponents weighted = r.mean_loss;
      scale(weighted, static_cast<double>(r.used));
      accumulate(epoch_loss, weighted);
      epoch_used += r.used;
      if (!adamw_step(params, state, r.grad, cfg, lr_e)) ++epoch_skipped_steps;
    }
    if (epoch_used > 0) scale(epoch_loss, 1.0 / epoch_used);
    res.skipped_samples += epoch_skipped;

    nlohmann::ordered_json j;
    j["epoch"] = e;
    j["lr"] = lr_e;
    j["lr_scale"] = lr_scale;
    j["loss"] = {{"total", epoch_loss.total},
                 {"chamfer", epoch_loss.chamfer},
                 {"smooth", epoch_loss.smooth},
                 {"bend", epoch_loss.bend},
                 {"equiv", epoch_loss.equiv}};
    j["samples"] = epoch_used;
    j["skipped_samples"] = epoch_skipped;
    j["skipped_steps"] = epoch_skipped_steps;

    bool stop = false;
    if ((e + 1) % cfg.eval_every == 0) {
      ValidationResult vr = validate(data.val, params, cfg);
      EarlyStopController::Decision d = ctrl.observe(vr.mean);
      if (d.new_best) {
        res.best_params = params;
        res.best_metric = vr.mean;
        res.best_epoch = e;
      }
      if (d.halve) lr_scale = std::max(lr_scale * 0.5, cfg.lr_min / cfg.lr);
      j["val"] = validation_json(vr);
      j["stagnant_checks"] = ctrl.stagnant();
      j["best_metric"] = ctrl.best();
      stop = d.stop;
    }
    res.log.push_back(j.dump());
    res.epochs_run = e + 1;
    if (stop) {
      res.stopped_early = true;
      break;
    }
  }

  res.skipped_steps = state.skipped_steps;
  return res;
}

}  // namespace curvesub
