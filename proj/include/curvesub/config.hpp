#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "curvesub/datagen.hpp"
#include "curvesub/predictor.hpp"
#include "curvesub/subdivision.hpp"
#include "curvesub/training.hpp"

namespace curvesub {

inline constexpr const char* kVersion = "0.1.0";

// How a command was invoked: everything outside the dotted-key settings.
struct RunSpec {
  std::string subcommand;
  std::string config_path;  // optional settings file
  std::string out_dir;
  std::string preset;  // "", "desk", or "paper"
  uint64_t seed = 1;
  int jobs = 1;
  bool force = false;
  std::vector<std::string> overrides;  // raw key=value pairs, applied in order
};

// Flat dotted-key settings shared by every subcommand. Field defaults are the
// full-scale run; presets and overrides layer on top. Every key round-trips
// through the echoed effective_config.json.
struct FlatConfig {
  // io
  std::string io_dataset = "data";
  std::string io_checkpoint;

  // data
  int data_curves_per_geometry = 400;
  int data_n_control = 12;
  int data_n_ground_truth = 1000;
  double data_val_fraction = 0.2;

  // model
  int model_width = 128;
  int model_depth = 4;
  int model_embed_dim = 8;
  int model_head_hidden = 32;
  double model_dropout = 0.05;
  std::string model_geometry_mode = "learned";

  // train
  int train_epochs = 300;
  int train_batch_size = 8;
  double train_lr = 1e-3;
  double train_beta1 = 0.9;
  double train_beta2 = 0.95;
  double train_weight_decay = 1e-4;
  double train_clip_norm = 0.5;
  int train_warmup_epochs = 5;
  double train_lambda_chamfer = 1.0;
  double train_lambda_bend = 1e-4;
  double train_lambda_equiv = 0.10;
  double train_lambda_smooth_e2 = 0.05;
  double train_lambda_smooth_s2 = 0.15;
  double train_lambda_smooth_h2 = 0.05;
  double train_warmup_mu = -0.15;
  int train_neural_steps = 2;
  int train_k_equiv = 2;
  int train_eval_every = 10;
  int train_lr_patience = 10;
  int train_stop_patience = 25;
  double train_min_improve = 1e-5;
  double train_lr_min = 1e-6;
  int train_val_levels = 5;

  // scheme
  std::string scheme_hyp_insert = "corrected";
  double scheme_lah_mu_star = 0.05;
  double scheme_lah_slope = -0.5;

  // eval
  std::string eval_split = "val";
  int eval_levels = 5;
  std::string eval_methods = "four_point,six_point,logexp4,logexp6,lah,neural";

  // robustness
  std::string robustness_sigmas = "0,0.03,0.06,0.1,0.15,0.2";
  std::string robustness_methods = "four_point,neural";
  int robustness_levels = 5;

  // ablate
  std::string ablate_conditions =
      "learned_embed,one_hot,no_geom,no_equiv,no_bending,no_smooth";

  // analyze
  int analyze_curves_per_geometry = 60;
  int analyze_proximity_levels = 4;

  // lipschitz
  int lipschitz_iters = 200;

  // iss
  int iss_levels = 5;
  std::string iss_methods = "four_point,six_point";
};

// All recognised dotted keys, in declaration order.
std::vector<std::string> config_keys();

// Mutators. Unknown keys and unparsable values throw ConfigError; a missing
// '=' in an override throws UsageError.
void apply_preset(FlatConfig& cfg, const std::string& name);
void apply_file(FlatConfig& cfg, const std::string& path);
void apply_override(FlatConfig& cfg, const std::string& key_equals_value);

// Resolution pipeline: defaults -> preset -> file -> overrides, in order.
FlatConfig resolve_config(const RunSpec& spec);

nlohmann::ordered_json config_json(const FlatConfig& cfg);

// Writes <dir>/effective_config.json capturing the run spec, code version,
// and every resolved key. Creates the directory if needed.
void write_effective_config(const RunSpec& spec, const FlatConfig& cfg);

// Typed views of the flat settings.
DataGenConfig datagen_config(const FlatConfig& cfg);
PredictorConfig predictor_config(const FlatConfig& cfg);
TrainConfig train_config(const FlatConfig& cfg);
HypInsertMode hyp_insert_mode(const FlatConfig& cfg);

// Builds a scheme from one of: four_point, six_point, logexp4, logexp6, lah,
// neural, or classical:<mu>. The neural scheme requires a loaded model.
SchemeConfig scheme_from_name(const std::string& name, const FlatConfig& cfg,
                              std::shared_ptr<const NeuralModel> model = nullptr);

// Comma-separated lists in settings values.
std::vector<std::string> split_list(const std::string& csv);
std::vector<double> parse_double_list(const std::string& csv);

}  // namespace curvesub
