#include "curvesub/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

#include "curvesub/geometry.hpp"

namespace fs = std::filesystem;

namespace curvesub {

namespace {

struct KeyBinding {
  const char* key;
  std::variant<int FlatConfig::*, double FlatConfig::*, std::string FlatConfig::*> member;
};

// One row per recognised key; order defines the echoed config layout.
const std::vector<KeyBinding>& bindings() {
  static const std::vector<KeyBinding> rows = {
      {"io.dataset", &FlatConfig::io_dataset},
      {"io.checkpoint", &FlatConfig::io_checkpoint},
      {"data.curves_per_geometry", &FlatConfig::data_curves_per_geometry},
      {"data.n_control", &FlatConfig::data_n_control},
      {"data.n_ground_truth", &FlatConfig::data_n_ground_truth},
      {"data.val_fraction", &FlatConfig::data_val_fraction},
      {"model.width", &FlatConfig::model_width},
      {"model.depth", &FlatConfig::model_depth},
      {"model.embed_dim", &FlatConfig::model_embed_dim},
      {"model.head_hidden", &FlatConfig::model_head_hidden},
      {"model.dropout", &FlatConfig::model_dropout},
      {"model.geometry_mode", &FlatConfig::model_geometry_mode},
      {"train.epochs", &FlatConfig::train_epochs},
      {"train.batch_size", &FlatConfig::train_batch_size},
      {"train.lr", &FlatConfig::train_lr},
      {"train.beta1", &FlatConfig::train_beta1},
      {"train.beta2", &FlatConfig::train_beta2},
      {"train.weight_decay", &FlatConfig::train_weight_decay},
      {"train.clip_norm", &FlatConfig::train_clip_norm},
      {"train.warmup_epochs", &FlatConfig::train_warmup_epochs},
      {"train.lambda_chamfer", &FlatConfig::train_lambda_chamfer},
      {"train.lambda_bend", &FlatConfig::train_lambda_bend},
      {"train.lambda_equiv", &FlatConfig::train_lambda_equiv},
      {"train.lambda_smooth_e2", &FlatConfig::train_lambda_smooth_e2},
      {"train.lambda_smooth_s2", &FlatConfig::train_lambda_smooth_s2},
      {"train.lambda_smooth_h2", &FlatConfig::train_lambda_smooth_h2},
      {"train.warmup_mu", &FlatConfig::train_warmup_mu},
      {"train.neural_steps", &FlatConfig::train_neural_steps},
      {"train.k_equiv", &FlatConfig::train_k_equiv},
      {"train.eval_every", &FlatConfig::train_eval_every},
      {"train.lr_patience", &FlatConfig::train_lr_patience},
      {"train.stop_patience", &FlatConfig::train_stop_patience},
      {"train.min_improve", &FlatConfig::train_min_improve},
      {"train.lr_min", &FlatConfig::train_lr_min},
      {"train.val_levels", &FlatConfig::train_val_levels},
      {"scheme.hyp_insert", &FlatConfig::scheme_hyp_insert},
      {"scheme.lah_mu_star", &FlatConfig::scheme_lah_mu_star},
      {"scheme.lah_slope", &FlatConfig::scheme_lah_slope},
      {"eval.split", &FlatConfig::eval_split},
      {"eval.levels", &FlatConfig::eval_levels},
      {"eval.methods", &FlatConfig::eval_methods},
      {"robustness.sigmas", &FlatConfig::robustness_sigmas},
      {"robustness.methods", &FlatConfig::robustness_methods},
      {"robustness.levels", &FlatConfig::robustness_levels},
      {"ablate.conditions", &FlatConfig::ablate_conditions},
      {"analyze.curves_per_geometry", &FlatConfig::analyze_curves_per_geometry},
      {"analyze.proximity_levels", &FlatConfig::analyze_proximity_levels},
      {"lipschitz.iters", &FlatConfig::lipschitz_iters},
      {"iss.levels", &FlatConfig::iss_levels},
      {"iss.methods", &FlatConfig::iss_methods},
  };
  return rows;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& key, const std::string& text) {
  int value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return value;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

void set_key(FlatConfig& cfg, const std::string& key, const std::string& value) {
  for (const KeyBinding& b : bindings()) {
    if (key != b.key) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, int>) {
            cfg.*member = parse_int(key, value);
          } else if constexpr (std::is_same_v<T, double>) {
            cfg.*member = parse_double(key, value);
          } else {
            cfg.*member = value;
          }
        },
        b.member);
    return;
  }
  throw ConfigError("unknown setting '" + key + "'; see config_keys() for the list");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  keys.reserve(bindings().size());
  for (const KeyBinding& b : bindings()) keys.emplace_back(b.key);
  return keys;
}

void apply_preset(FlatConfig& cfg, const std::string& name) {
  if (name.empty() || name == "paper") return;  // defaults are the paper run
  if (name == "desk") {
    cfg.data_curves_per_geometry = 30;
    cfg.model_width = 32;
    cfg.train_epochs = 30;
    cfg.train_eval_every = 5;
    return;
  }
  throw ConfigError("unknown preset '" + name + "' (valid: desk, paper)");
}

void apply_file(FlatConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read settings file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    set_key(cfg, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
  }
}

void apply_override(FlatConfig& cfg, const std::string& key_equals_value) {
  size_t eq = key_equals_value.find('=');
  if (eq == std::string::npos)
    throw UsageError("override '" + key_equals_value + "' is not key=value");
  set_key(cfg, trim(key_equals_value.substr(0, eq)),
          trim(key_equals_value.substr(eq + 1)));
}

FlatConfig resolve_config(const RunSpec& spec) {
  FlatConfig cfg;
  apply_preset(cfg, spec.preset);
  if (!spec.config_path.empty()) apply_file(cfg, spec.config_path);
  for (const std::string& kv : spec.overrides) apply_override(cfg, kv);
  return cfg;
}

nlohmann::ordered_json config_json(const FlatConfig& cfg) {
  nlohmann::ordered_json j;
  for (const KeyBinding& b : bindings()) {
    std::visit([&](auto member) { j[b.key] = cfg.*member; }, b.member);
  }
  return j;
}

void write_effective_config(const RunSpec& spec, const FlatConfig& cfg) {
  fs::create_directories(spec.out_dir);
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = spec.subcommand;
  j["seed"] = spec.seed;
  j["jobs"] = spec.jobs;
  j["preset"] = spec.preset;
  j["settings"] = config_json(cfg);
  std::ofstream out(fs::path(spec.out_dir) / "effective_config.json");
  if (!out) throw IoError("cannot write effective_config.json in " + spec.out_dir);
  out << j.dump(2) << "\n";
}

DataGenConfig datagen_config(const FlatConfig& cfg) {
  DataGenConfig d;
  d.curves_per_geometry = cfg.data_curves_per_geometry;
  d.n_control = cfg.data_n_control;
  d.n_ground_truth = cfg.data_n_ground_truth;
  d.val_fraction = cfg.data_val_fraction;
  return d;
}

PredictorConfig predictor_config(const FlatConfig& cfg) {
  PredictorConfig p;
  p.width = cfg.model_width;
  p.depth = cfg.model_depth;
  p.embed_dim = cfg.model_embed_dim;
  p.head_hidden = cfg.model_head_hidden;
  p.dropout = cfg.model_dropout;
  p.geometry_mode = parse_geometry_mode(cfg.model_geometry_mode);
  return p;
}

HypInsertMode hyp_insert_mode(const FlatConfig& cfg) {
  if (cfg.scheme_hyp_insert == "corrected") return HypInsertMode::Corrected;
  if (cfg.scheme_hyp_insert == "paper") return HypInsertMode::Paper;
  throw ConfigError("scheme.hyp_insert must be 'corrected' or 'paper', got '" +
                    cfg.scheme_hyp_insert + "'");
}

TrainConfig train_config(const FlatConfig& cfg) {
  TrainConfig t;
  t.predictor = predictor_config(cfg);
  t.lambda_chamfer = cfg.train_lambda_chamfer;
  t.lambda_bend = cfg.train_lambda_bend;
  t.lambda_equiv = cfg.train_lambda_equiv;
  t.lambda_smooth_e2 = cfg.train_lambda_smooth_e2;
  t.lambda_smooth_s2 = cfg.train_lambda_smooth_s2;
  t.lambda_smooth_h2 = cfg.train_lambda_smooth_h2;
  t.warmup_mu = cfg.train_warmup_mu;
  t.neural_steps = cfg.train_neural_steps;
  t.k_equiv = cfg.train_k_equiv;
  t.batch_size = cfg.train_batch_size;
  t.lr = cfg.train_lr;
  t.beta1 = cfg.train_beta1;
  t.beta2 = cfg.train_beta2;
  t.weight_decay = cfg.train_weight_decay;
  t.clip_norm = cfg.train_clip_norm;
  t.epochs = cfg.train_epochs;
  t.warmup_epochs = cfg.train_warmup_epochs;
  t.eval_every = cfg.train_eval_every;
  t.lr_patience = cfg.train_lr_patience;
  t.stop_patience = cfg.train_stop_patience;
  t.min_improve = cfg.train_min_improve;
  t.lr_min = cfg.train_lr_min;
  t.val_levels = cfg.train_val_levels;
  t.hyp_mode = hyp_insert_mode(cfg);
  return t;
}

SchemeConfig scheme_from_name(const std::string& name, const FlatConfig& cfg,
                              std::shared_ptr<const NeuralModel> model) {
  SchemeConfig s;
  if (name == "four_point") {
    s = SchemeConfig::four_point();
  } else if (name == "six_point") {
    s = SchemeConfig::six_point();
  } else if (name == "logexp4") {
    s = SchemeConfig::logexp(LogExpStencil::FourPoint);
  } else if (name == "logexp6") {
    s = SchemeConfig::logexp(LogExpStencil::SixPoint);
  } else if (name == "lah") {
    s = SchemeConfig::lah(cfg.scheme_lah_mu_star, cfg.scheme_lah_slope);
  } else if (name == "neural") {
    if (!model) throw ConfigError("the neural scheme needs io.checkpoint");
    s = SchemeConfig::neural(std::move(model), cfg.train_warmup_mu);
  } else if (name.rfind("classical:", 0) == 0) {
    s = SchemeConfig::classical(parse_double(name, name.substr(10)));
  } else {
    throw UsageError("unknown method '" + name +
                     "' (valid: four_point, six_point, logexp4, logexp6, lah, "
                     "neural, classical:<mu>)");
  }
  s.hyp_mode = hyp_insert_mode(cfg);
  return s;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  for (const std::string& item : split_list(csv))
    out.push_back(parse_double("list entry", item));
  return out;
}

}  // namespace curvesub
