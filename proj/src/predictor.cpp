#include "curvesub/predictor.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace curvesub {

const char* to_string(GeometryMode m) {
  switch (m) {
    case GeometryMode::Learned:
      return "learned";
    case GeometryMode::OneHot:
      return "onehot";
    default:
      return "none";
  }
}

GeometryMode parse_geometry_mode(std::string_view s) {
  if (s == "learned") return GeometryMode::Learned;
  if (s == "onehot") return GeometryMode::OneHot;
  if (s == "none") return GeometryMode::None;
  throw UsageError("unknown geometry mode: " + std::string(s));
}

ParamLayout ParamLayout::from_config(const PredictorConfig& cfg) {
  if (cfg.width < 1 || cfg.depth < 0 || cfg.head_hidden < 1 ||
      (cfg.geometry_mode == GeometryMode::Learned && cfg.embed_dim < 1))
    throw UsageError("invalid predictor dimensions");
  ParamLayout layout;
  size_t off = 0;
  auto add = [&](std::string name, std::vector<int> shape) {
    size_t size = 1;
    for (int d : shape) size *= static_cast<size_t>(d);
    layout.tensors.push_back({std::move(name), std::move(shape), off, size});
    off += size;
  };
  int in = cfg.input_dim();
  if (cfg.geometry_mode == GeometryMode::Learned) add("embed", {3, cfg.embed_dim});
  add("proj_w", {cfg.width, in});
  add("proj_b", {cfg.width});
  add("proj_ln_scale", {cfg.width});
  add("proj_ln_shift", {cfg.width});
  for (int l = 0; l < cfg.depth; ++l) {
    std::string p = "block" + std::to_string(l) + ".";
    add(p + "ln1_scale", {cfg.width});
    add(p + "ln1_shift", {cfg.width});
    add(p + "w1", {cfg.width, cfg.width});
    add(p + "b1", {cfg.width});
    add(p + "ln2_scale", {cfg.width});
    add(p + "ln2_shift", {cfg.width});
    add(p + "w2", {cfg.width, cfg.width});
    add(p + "b2", {cfg.width});
  }
  add("head_w1", {cfg.head_hidden, cfg.width});
  add("head_b1", {cfg.head_hidden});
  add("head_w2", {1, cfg.head_hidden});
  add("head_b2", {1});
  layout.total = off;
  return layout;
}

const TensorSpec& ParamLayout::find(const std::string& name) const {
  for (const TensorSpec& t : tensors)
    if (t.name == name) return t;
  throw UsageError("no tensor named " + name);
}

size_t param_count(const PredictorConfig& cfg) { return ParamLayout::from_config(cfg).total; }

std::vector<double> init_params(const PredictorConfig& cfg, uint64_t seed) {
  ParamLayout layout = ParamLayout::from_config(cfg);
  std::vector<double> params(layout.total, 0.0);
  Rng rng(seed);
  for (const TensorSpec& t : layout.tensors) {
    double* p = params.data() + t.offset;
    if (t.name == "embed") {
      for (size_t i = 0; i < t.size; ++i) p[i] = rng.normal();
    } else if (t.shape.size() == 2) {
      double stddev = std::sqrt(2.0 / static_cast<double>(t.shape.back()));
      for (size_t i = 0; i < t.size; ++i) p[i] = stddev * rng.normal();
    } else if (t.name.ends_with("scale")) {
      std::fill(p, p + t.size, 1.0);
    }
    // biases and LayerNorm shifts stay zero
  }
  return params;
}

// ---------------------------------------------------------------------------
// Forward pass

template <typename T>
std::vector<T> predictor_forward(const PredictorConfig& cfg, std::span<const T> params,
                                 std::span<const T> features, size_t n_edges, ForwardMode mode,
                                 uint64_t dropout_seed, std::span<const uint64_t> edge_dropout_seeds) {
  using ad::clamp_guard;
  using ad::gelu;
  using ad::sigmoid;
  using ad::value_of;
  using nn::affine;
  using nn::layer_norm;

  ParamLayout layout = ParamLayout::from_config(cfg);
  if (params.size() != layout.total) throw UsageError("parameter vector has the wrong length");
  for (const T& p : params)
    if (!std::isfinite(value_of(p))) throw CheckpointError("non-finite model parameter");
  if (features.size() != n_edges * static_cast<size_t>(kFeatureDim))
    throw UsageError("feature matrix has the wrong length");
  if (!edge_dropout_seeds.empty() && edge_dropout_seeds.size() != n_edges)
    throw UsageError("per-edge dropout seeds must match the edge count");

  const int width = cfg.width;
  const int in_dim = cfg.input_dim();
  auto span_of = [&](const std::string& name) {
    const TensorSpec& t = layout.find(name);
    return params.subspan(t.offset, t.size);
  };
  auto proj_w = span_of("proj_w");
  auto proj_b = span_of("proj_b");
  auto proj_ln_s = span_of("proj_ln_scale");
  auto proj_ln_b = span_of("proj_ln_shift");
  struct BlockSpans {
    std::span<const T> ln1_s, ln1_b, w1, b1, ln2_s, ln2_b, w2, b2;
  };
  std::vector<BlockSpans> blocks(cfg.depth);
  for (int l = 0; l < cfg.depth; ++l) {
    std::string p = "block" + std::to_string(l) + ".";
    blocks[l] = {span_of(p + "ln1_scale"), span_of(p + "ln1_shift"), span_of(p + "w1"),
                 span_of(p + "b1"),        span_of(p + "ln2_scale"), span_of(p + "ln2_shift"),
                 span_of(p + "w2"),        span_of(p + "b2")};
  }
  auto head_w1 = span_of("head_w1");
  auto head_b1 = span_of("head_b1");
  auto head_w2 = span_of("head_w2");
  auto head_b2 = span_of("head_b2");
  std::span<const T> embed;
  if (cfg.geometry_mode == GeometryMode::Learned) embed = span_of("embed");

  const bool drop = mode == ForwardMode::Train && cfg.dropout > 0.0;
  const double keep_inv = drop ? 1.0 / (1.0 - cfg.dropout) : 1.0;
  Rng drop_rng(dropout_seed);

  const double range = cfg.alpha_max - cfg.alpha_min;
  std::vector<T> in(static_cast<size_t>(in_dim));
  std::vector<T> h(static_cast<size_t>(width));
  std::vector<T> y(static_cast<size_t>(width));
  std::vector<T> z(static_cast<size_t>(width));
  std::vector<T> head(static_cast<size_t>(cfg.head_hidden));
  std::vector<T> out;
  out.reserve(n_edges);

  for (size_t e = 0; e < n_edges; ++e) {
    if (drop && !edge_dropout_seeds.empty()) drop_rng = Rng(edge_dropout_seeds[e]);
    const T* f = features.data() + e * kFeatureDim;
    for (int k = 0; k < 6; ++k) in[static_cast<size_t>(k)] = f[k];
    if (cfg.geometry_mode != GeometryMode::None) {
      double kappa = value_of(f[6]);
      int row = static_cast<int>(std::lround(kappa)) + 1;
      if (row < 0 || row > 2 || std::fabs(kappa - std::lround(kappa)) > 1e-9)
        throw UsageError("curvature feature must be -1, 0, or +1");
      if (cfg.geometry_mode == GeometryMode::Learned) {
        for (int k = 0; k < cfg.embed_dim; ++k)
          in[static_cast<size_t>(6 + k)] = embed[static_cast<size_t>(row * cfg.embed_dim + k)];
      } else {
        for (int k = 0; k < 3; ++k) in[static_cast<size_t>(6 + k)] = T(k == row ? 1.0 : 0.0);
      }
    }

    for (int i = 0; i < width; ++i)
      h[static_cast<size_t>(i)] = affine(proj_w.subspan(static_cast<size_t>(i) * in_dim, in_dim),
                                         std::span<const T>(in), proj_b[static_cast<size_t>(i)]);
    layer_norm(std::span<T>(h), proj_ln_s, proj_ln_b);
    for (T& x : h) x = gelu(x);

    for (const BlockSpans& b : blocks) {
      std::copy(h.begin(), h.end(), y.begin());
      layer_norm(std::span<T>(y), b.ln1_s, b.ln1_b);
      for (int i = 0; i < width; ++i)
        z[static_cast<size_t>(i)] = affine(b.w1.subspan(static_cast<size_t>(i) * width, width),
                                           std::span<const T>(y), b.b1[static_cast<size_t>(i)]);
      for (T& x : z) x = gelu(x);
      if (drop)
        for (T& x : z) x = drop_rng.uniform() < cfg.dropout ? T(0.0) : x * keep_inv;
      layer_norm(std::span<T>(z), b.ln2_s, b.ln2_b);
      for (int i = 0; i < width; ++i)
        y[static_cast<size_t>(i)] = affine(b.w2.subspan(static_cast<size_t>(i) * width, width),
                                           std::span<const T>(z), b.b2[static_cast<size_t>(i)]);
      for (int i = 0; i < width; ++i)
        h[static_cast<size_t>(i)] = gelu(h[static_cast<size_t>(i)] + y[static_cast<size_t>(i)]);
    }

    for (int i = 0; i < cfg.head_hidden; ++i)
      head[static_cast<size_t>(i)] =
          gelu(affine(head_w1.subspan(static_cast<size_t>(i) * width, width),
                      std::span<const T>(h), head_b1[static_cast<size_t>(i)]));
    T logit = affine(head_w2, std::span<const T>(head), head_b2[0]);
    T s = clamp_guard(sigmoid(logit), 1e-12, 1.0 - 1e-12);
    out.push_back(cfg.alpha_min + range * s);
  }
  return out;
}

template std::vector<double> predictor_forward<double>(const PredictorConfig&,
                                                       std::span<const double>,
                                                       std::span<const double>, size_t, ForwardMode,
                                                       uint64_t, std::span<const uint64_t>);
template std::vector<ad::Var> predictor_forward<ad::Var>(const PredictorConfig&,
                                                         std::span<const ad::Var>,
                                                         std::span<const ad::Var>, size_t,
                                                         ForwardMode, uint64_t,
                                                         std::span<const uint64_t>);

std::vector<double> predict_angles(const NeuralModel& model, const ClosedPolygon& poly) {
  std::vector<EdgeFeatures> feats = extract_features(poly);
  std::vector<double> flat;
  flat.reserve(feats.size() * kFeatureDim);
  for (const EdgeFeatures& f : feats) flat.insert(flat.end(), f.v.begin(), f.v.end());
  return predictor_forward<double>(model.cfg, model.params, flat, feats.size());
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'C', 'S', 'U', 'B', 'C', 'K', 'P', '1'};

using nlohmann::json;

json config_to_json(const PredictorConfig& cfg) {
  return json{{"width", cfg.width},
              {"depth", cfg.depth},
              {"embed_dim", cfg.embed_dim},
              {"head_hidden", cfg.head_hidden},
              {"dropout", cfg.dropout},
              {"geometry_mode", to_string(cfg.geometry_mode)},
              {"alpha_min", cfg.alpha_min},
              {"alpha_max", cfg.alpha_max}};
}

PredictorConfig config_from_json(const json& j) {
  PredictorConfig cfg;
  cfg.width = j.at("width").get<int>();
  cfg.depth = j.at("depth").get<int>();
  cfg.embed_dim = j.at("embed_dim").get<int>();
  cfg.head_hidden = j.at("head_hidden").get<int>();
  cfg.dropout = j.at("dropout").get<double>();
  cfg.geometry_mode = parse_geometry_mode(j.at("geometry_mode").get<std::string>());
  cfg.alpha_min = j.at("alpha_min").get<double>();
  cfg.alpha_max = j.at("alpha_max").get<double>();
  return cfg;
}

void append_u32(std::string& buf, uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f64(std::string& buf, double d) {
  uint64_t bits = std::bit_cast<uint64_t>(d);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double read_f64(const unsigned char* p) {
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const std::string& path, const NeuralModel& model,
                     const CheckpointMeta& meta) {
  ParamLayout layout = ParamLayout::from_config(model.cfg);
  if (model.params.size() != layout.total)
    throw UsageError("model parameter vector does not match its config");

  json manifest = json::array();
  for (const TensorSpec& t : layout.tensors)
    manifest.push_back(json{{"name", t.name}, {"shape", t.shape}, {"offset", t.offset}});
  json header{{"format_version", 1},
              {"config", config_to_json(model.cfg)},
              {"manifest", manifest},
              {"meta",
               {{"epoch", meta.epoch},
                {"metric", std::isfinite(meta.metric) ? json(meta.metric) : json(nullptr)},
                {"note", meta.note}}}};
  std::string header_str = header.dump();

  std::string buf;
  buf.reserve(16 + header_str.size() + 8 * model.params.size());
  buf.append(kMagic, sizeof(kMagic));
  append_u32(buf, static_cast<uint32_t>(header_str.size()));
  buf += header_str;
  for (double p : model.params) append_f64(buf, p);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw CheckpointError("short write to " + path);
}

NeuralModel load_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof(kMagic) + 4) throw CheckpointError("checkpoint truncated: " + path);
  if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0)
    throw CheckpointError("bad checkpoint magic in " + path);

  const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data.data());
  uint32_t header_len = 0;
  for (int i = 0; i < 4; ++i)
    header_len |= static_cast<uint32_t>(bytes[sizeof(kMagic) + i]) << (8 * i);
  size_t payload_off = sizeof(kMagic) + 4 + header_len;
  if (payload_off > data.size()) throw CheckpointError("checkpoint header truncated: " + path);

  json header;
  try {
    header = json::parse(data.substr(sizeof(kMagic) + 4, header_len));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  if (header.at("format_version").get<int>() != 1)
    throw CheckpointError("unsupported checkpoint format version");

  NeuralModel model;
  try {
    model.cfg = config_from_json(header.at("config"));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint config: ") + e.what());
  }
  ParamLayout layout = ParamLayout::from_config(model.cfg);

  const json& manifest = header.at("manifest");
  if (!manifest.is_array() || manifest.size() != layout.tensors.size())
    throw CheckpointError("checkpoint manifest does not match its config");
  for (size_t i = 0; i < layout.tensors.size(); ++i) {
    const TensorSpec& t = layout.tensors[i];
    const json& m = manifest[i];
    if (m.at("name").get<std::string>() != t.name ||
        m.at("shape").get<std::vector<int>>() != t.shape ||
        m.at("offset").get<size_t>() != t.offset)
      throw CheckpointError("checkpoint manifest does not match its config");
  }

  size_t payload_bytes = data.size() - payload_off;
  if (payload_bytes != 8 * layout.total)
    throw CheckpointError("checkpoint payload has the wrong size");
  model.params.resize(layout.total);
  for (size_t i = 0; i < layout.total; ++i)
    model.params[i] = read_f64(bytes + payload_off + 8 * i);
  for (double p : model.params)
    if (!std::isfinite(p)) throw CheckpointError("checkpoint contains non-finite parameters");

  if (meta != nullptr) {
    const json& m = header.at("meta");
    meta->epoch = m.at("epoch").get<int>();
    meta->metric = m.at("metric").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                            : m.at("metric").get<double>();
    meta->note = m.at("note").get<std::string>();
  }
  return model;
}

NeuralModel load_checkpoint_expect(const std::string& path, const PredictorConfig& expected,
                                   CheckpointMeta* meta) {
  NeuralModel model = load_checkpoint(path, meta);
  if (!(model.cfg == expected))
    throw CheckpointError("checkpoint config does not match the requested architecture");
  return model;
}

// ---------------------------------------------------------------------------
// Spectral norms

double spectral_norm_power(std::span<const double> a, int rows, int cols, int iters, Rng& rng) {
  if (rows < 1 || cols < 1 || a.size() != static_cast<size_t>(rows) * cols)
    throw UsageError("matrix dimensions do not match the data");
  std::vector<double> v(static_cast<size_t>(cols));
  std::vector<double> u(static_cast<size_t>(rows));
  double vn = 0.0;
  for (double& x : v) {
    x = rng.normal();
    vn += x * x;
  }
  vn = std::sqrt(vn);
  if (vn == 0.0) {
    v[0] = 1.0;
    vn = 1.0;
  }
  for (double& x : v) x /= vn;

  for (int it = 0; it < iters; ++it) {
    for (int i = 0; i < rows; ++i) {
      double acc = 0.0;
      const double* row = a.data() + static_cast<size_t>(i) * cols;
      for (int j = 0; j < cols; ++j) acc += row[j] * v[static_cast<size_t>(j)];
      u[static_cast<size_t>(i)] = acc;
    }
    std::fill(v.begin(), v.end(), 0.0);
    for (int i = 0; i < rows; ++i) {
      const double* row = a.data() + static_cast<size_t>(i) * cols;
      double ui = u[static_cast<size_t>(i)];
      for (int j = 0; j < cols; ++j) v[static_cast<size_t>(j)] += row[j] * ui;
    }
    double wn = 0.0;
    for (double x : v) wn += x * x;
    wn = std::sqrt(wn);
    if (wn == 0.0) return 0.0;  // v landed in the null space
    for (double& x : v) x /= wn;
  }

  double sigma2 = 0.0;
  for (int i = 0; i < rows; ++i) {
    double acc = 0.0;
    const double* row = a.data() + static_cast<size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) acc += row[j] * v[static_cast<size_t>(j)];
    sigma2 += acc * acc;
  }
  return std::sqrt(sigma2);
}

LipschitzReport lipschitz_estimate(const NeuralModel& model, int power_iters, uint64_t seed) {
  ParamLayout layout = ParamLayout::from_config(model.cfg);
  if (model.params.size() != layout.total)
    throw UsageError("model parameter vector does not match its config");
  LipschitzReport report;
  report.product = 1.0;
  Rng rng(seed);
  for (const TensorSpec& t : layout.tensors) {
    if (t.shape.size() != 2 || t.name == "embed") continue;
    std::span<const double> mat(model.params.data() + t.offset, t.size);
    double sigma = spectral_norm_power(mat, t.shape[0], t.shape[1], power_iters, rng);
    report.layer_names.push_back(t.name);
    report.layer_norms.push_back(sigma);
    report.product *= sigma;
  }
  report.c_prox = (report.product + kPi / 8.0) * (1.0 / kPi) * 2.0;
  return report;
}

}  // namespace curvesub
