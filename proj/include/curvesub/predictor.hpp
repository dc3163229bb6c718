#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvesub/autodiff.hpp"
#include "curvesub/features.hpp"
#include "curvesub/geometry.hpp"
#include "curvesub/rng.hpp"

namespace curvesub {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GeometryMode { Learned, OneHot, None };

const char* to_string(GeometryMode m);
GeometryMode parse_geometry_mode(std::string_view s);

struct PredictorConfig {
  int width = 128;
  int depth = 4;  // residual blocks
  int embed_dim = 8;
  int head_hidden = 32;
  double dropout = 0.05;
  GeometryMode geometry_mode = GeometryMode::Learned;
  double alpha_min = kAlphaMin;
  double alpha_max = kAlphaMax;

  // 6 intrinsic inputs plus the geometry conditioning, if any.
  int input_dim() const {
    switch (geometry_mode) {
      case GeometryMode::Learned:
        return 6 + embed_dim;
      case GeometryMode::OneHot:
        return 6 + 3;
      default:
        return 6;
    }
  }

  bool operator==(const PredictorConfig&) const = default;
};

struct TensorSpec {
  std::string name;
  std::vector<int> shape;
  size_t offset = 0;
  size_t size = 0;
};

struct ParamLayout {
  std::vector<TensorSpec> tensors;
  size_t total = 0;

  static ParamLayout from_config(const PredictorConfig& cfg);
  const TensorSpec& find(const std::string& name) const;
};

size_t param_count(const PredictorConfig& cfg);

// He-initialized weights, zero biases, unit LayerNorm scales.
std::vector<double> init_params(const PredictorConfig& cfg, uint64_t seed);

struct NeuralModel {
  PredictorConfig cfg;
  std::vector<double> params;
};

enum class ForwardMode { Eval, Train };

std::vector<double> predict_angles(const NeuralModel& model, const ClosedPolygon& poly);

struct CheckpointMeta {
  int epoch = -1;
  double metric = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

// JSON header (format version, config, tensor manifest, training metadata)
// followed by the flat parameter vector as little-endian binary64. Round
// trips are bitwise.
void save_checkpoint(const std::string& path, const NeuralModel& model,
                     const CheckpointMeta& meta = {});
NeuralModel load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);
NeuralModel load_checkpoint_expect(const std::string& path, const PredictorConfig& expected,
                                   CheckpointMeta* meta = nullptr);

struct LipschitzReport {
  std::vector<std::string> layer_names;
  std::vector<double> layer_norms;
  double product = 0.0;  // network Lipschitz bound
  double c_prox = 0.0;   // downstream proximity constant
};

// Product of per-linear-layer spectral norms via power iteration, and the
// derived proximity constant (L + pi/8) * K_feat * K_ins with K_feat = 1/pi,
// K_ins = 2.
LipschitzReport lipschitz_estimate(const NeuralModel& model, int power_iters = 50,
                                   uint64_t seed = 12345);

// Largest singular value of a dense row-major matrix by power iteration.
double spectral_norm_power(std::span<const double> a, int rows, int cols, int iters, Rng& rng);

// ---------------------------------------------------------------------------
// Forward pass, templated on the scalar so the training graph can run the
// same code on tape variables.

namespace nn {

using ad::Var;

// Fused affine: dot(w, x) + b as one tape node; constants contribute no args.
inline double affine(std::span<const double> w, std::span<const double> x, double b) {
  double acc = b;
  for (size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
  return acc;
}

inline Var affine(std::span<const Var> w, std::span<const Var> x, const Var& b) {
  double acc = b.v;
  ad::Tape* t = ad::active_tape();
  bool tracked = b.tracked();
  if (!tracked)
    for (size_t i = 0; i < w.size(); ++i)
      if (w[i].tracked() || x[i].tracked()) {
        tracked = true;
        break;
      }
  if (!tracked || t == nullptr) {
    for (size_t i = 0; i < w.size(); ++i) acc += w[i].v * x[i].v;
    return Var(acc);
  }
  t->begin_node();
  if (b.tracked()) t->arg(b.idx, 1.0);
  for (size_t i = 0; i < w.size(); ++i) {
    acc += w[i].v * x[i].v;
    if (w[i].tracked()) t->arg(w[i].idx, x[i].v);
    if (x[i].tracked()) t->arg(x[i].idx, w[i].v);
  }
  return Var(acc, t->end_node());
}

inline double mul_add(double a, double b, double c) { return a * b + c; }
inline Var mul_add(const Var& a, const Var& b, const Var& c) {
  double v = a.v * b.v + c.v;
  ad::Tape* t = ad::active_tape();
  if ((!a.tracked() && !b.tracked() && !c.tracked()) || t == nullptr) return Var(v);
  t->begin_node();
  if (a.tracked()) t->arg(a.idx, b.v);
  if (b.tracked()) t->arg(b.idx, a.v);
  if (c.tracked()) t->arg(c.idx, 1.0);
  return Var(v, t->end_node());
}

template <typename T>
void layer_norm(std::span<T> h, std::span<const T> scale, std::span<const T> shift) {
  using std::sqrt;
  using ad::sqrt;
  size_t n = h.size();
  double inv_n = 1.0 / static_cast<double>(n);
  T mean(0.0);
  for (const T& x : h) mean += x;
  mean = mean * inv_n;
  T var(0.0);
  for (const T& x : h) var += ad::sq(x - mean);
  var = var * inv_n;
  T rstd = 1.0 / sqrt(var + 1e-5);
  for (size_t i = 0; i < n; ++i) h[i] = mul_add(scale[i], (h[i] - mean) * rstd, shift[i]);
}

// Fused n-ary mean for Var to keep the tape flat.
inline void layer_norm(std::span<Var> h, std::span<const Var> scale, std::span<const Var> shift) {
  size_t n = h.size();
  double inv_n = 1.0 / static_cast<double>(n);
  ad::Tape* t = ad::active_tape();
  Var mean;
  bool any_tracked = false;
  for (const Var& x : h)
    if (x.tracked()) {
      any_tracked = true;
      break;
    }
  if (any_tracked && t != nullptr) {
    double acc = 0.0;
    t->begin_node();
    for (const Var& x : h) {
      acc += x.v;
      if (x.tracked()) t->arg(x.idx, inv_n);
    }
    mean = Var(acc * inv_n, t->end_node());
  } else {
    double acc = 0.0;
    for (const Var& x : h) acc += x.v;
    mean = Var(acc * inv_n);
  }
  std::vector<Var> centered(n);
  for (size_t i = 0; i < n; ++i) centered[i] = h[i] - mean;
  Var var;
  if (any_tracked && t != nullptr) {
    double acc = 0.0;
    t->begin_node();
    for (const Var& c : centered) {
      acc += c.v * c.v;
      if (c.tracked()) t->arg(c.idx, 2.0 * c.v * inv_n);
    }
    var = Var(acc * inv_n, t->end_node());
  } else {
    double acc = 0.0;
    for (const Var& c : centered) acc += c.v * c.v;
    var = Var(acc * inv_n);
  }
  Var rstd = 1.0 / ad::sqrt(var + 1e-5);
  for (size_t i = 0; i < n; ++i) h[i] = mul_add(scale[i], centered[i] * rstd, shift[i]);
}

}  // namespace nn

// Row-major n_edges x 7 feature matrix in, one angle per edge out. Angles are
// strictly inside (alpha_min, alpha_max) for any finite parameters: the head
// is an affine-rescaled logistic whose output is nudged off the exact
// endpoints before rescaling.
//
// Dropout draws come from a single stream seeded by dropout_seed, consumed in
// edge order. When edge_dropout_seeds is non-empty (one seed per edge) each
// edge instead gets its own stream, which makes the mask independent of how
// edges are batched together; the trainer relies on this to evaluate many
// polygons in one call without changing any per-edge result.
template <typename T>
std::vector<T> predictor_forward(const PredictorConfig& cfg, std::span<const T> params,
                                 std::span<const T> features, size_t n_edges,
                                 ForwardMode mode = ForwardMode::Eval, uint64_t dropout_seed = 0,
                                 std::span<const uint64_t> edge_dropout_seeds = {});

extern template std::vector<double> predictor_forward<double>(const PredictorConfig&,
                                                              std::span<const double>,
                                                              std::span<const double>, size_t,
                                                              ForwardMode, uint64_t,
                                                              std::span<const uint64_t>);
extern template std::vector<ad::Var> predictor_forward<ad::Var>(const PredictorConfig&,
                                                                std::span<const ad::Var>,
                                                                std::span<const ad::Var>, size_t,
                                                                ForwardMode, uint64_t,
                                                                std::span<const uint64_t>);

}  // namespace curvesub
