#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "curvesub/config.hpp"
#include "curvesub/datagen.hpp"
#include "curvesub/dataset.hpp"
#include "curvesub/experiments.hpp"
#include "curvesub/metrics.hpp"
#include "curvesub/predictor.hpp"
#include "curvesub/subdivision.hpp"
#include "curvesub/training.hpp"

namespace fs = std::filesystem;
using namespace curvesub;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

ordered_json metrics_json(const MetricsReport& m) {
  return {{"mean_nn", m.mean_nn}, {"chamfer", m.sym_chamfer},
          {"hausdorff", m.hausdorff}, {"bending", m.bending}, {"g1", m.g1}};
}

ordered_json stats_json(const MetricStats& s) {
  return {{"count", s.count}, {"mean", metrics_json(s.mean)}, {"sd", metrics_json(s.sd)}};
}

ordered_json aggregate_json(const EvalRun& run) {
  ordered_json j;
  for (const auto& [g, stats] : run.aggregate) j[to_string(g)] = stats_json(stats);
  return j;
}

std::string eval_csv(const EvalRun& run) {
  std::ostringstream os;
  os << metrics_csv_header() << "\n";
  for (const EvalRow& row : run.rows)
    os << metrics_csv_row(row.curve_id, row.geometry, run.method, row.metrics) << "\n";
  return os.str();
}

std::vector<Geometry> geometries_present(std::span<const CurveSample> split) {
  std::vector<Geometry> out;
  for (Geometry g : kAllGeometries)
    if (count_geometry(split, g) > 0) out.push_back(g);
  return out;
}

const std::vector<CurveSample>& pick_split(const Dataset& ds, const FlatConfig& cfg) {
  if (cfg.eval_split == "val") return ds.val;
  if (cfg.eval_split == "train") return ds.train;
  throw ConfigError("eval.split must be 'val' or 'train', got '" + cfg.eval_split + "'");
}

std::shared_ptr<const NeuralModel> load_model(const FlatConfig& cfg) {
  if (cfg.io_checkpoint.empty())
    throw ConfigError("io.checkpoint is required for the neural predictor");
  return std::make_shared<const NeuralModel>(load_checkpoint(cfg.io_checkpoint));
}

bool wants_method(const std::vector<std::string>& names, const char* name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

double lat_deg(const Point& p) {
  return std::asin(std::clamp(p.z(), -1.0, 1.0)) * 180.0 / kPi;
}

double lon_deg(const Point& p) { return std::atan2(p.y(), p.x()) * 180.0 / kPi; }

// Per-geometry best fixed tension, evaluated as one method over the split.
EvalRun oracle_eval(const std::vector<CurveSample>& split, int levels, int jobs,
                    const FlatConfig& cfg, ordered_json& best_out) {
  EvalRun run;
  run.method = "oracle";
  run.levels = levels;
  run.rows.resize(split.size());
  for (Geometry g : geometries_present(split)) {
    OracleResult res = oracle_grid_search(split, g, levels, jobs);
    best_out[to_string(g)] = {{"best_mu", res.best_mu},
                              {"best_mean_nn", res.best_mean_nn}};
    SchemeConfig scheme = SchemeConfig::classical(res.best_mu);
    scheme.hyp_mode = hyp_insert_mode(cfg);
    std::vector<CurveSample> sub;
    std::vector<size_t> at;
    for (size_t i = 0; i < split.size(); ++i) {
      if (split[i].geometry() == g) {
        sub.push_back(split[i]);
        at.push_back(i);
      }
    }
    EvalRun part = evaluate_method(scheme, "oracle", sub, levels, jobs);
    for (size_t j = 0; j < at.size(); ++j) run.rows[at[j]] = part.rows[j];
  }
  run.aggregate = aggregate_rows(run.rows);
  return run;
}

// ---------------------------------------------------------------------------
// Subcommands. Each assumes effective_config.json is already on disk and
// throws on any failure, so the exit code tracks produced outputs.

int cmd_gen_data(const RunSpec& spec, const FlatConfig& cfg) {
  fs::path dir = spec.out_dir;
  Dataset ds = build_dataset(spec.seed, datagen_config(cfg));
  save_dataset(ds, spec.seed, datagen_config(cfg), dir.string());
  std::printf("wrote %zu samples (%zu train, %zu val) to %s\n",
              ds.train.size() + ds.val.size(), ds.train.size(), ds.val.size(),
              dir.string().c_str());
  return 0;
}

int cmd_train(const RunSpec& spec, const FlatConfig& cfg, const std::string& resume) {
  Dataset ds = load_dataset(cfg.io_dataset);
  TrainConfig tc = train_config(cfg);
  if (!resume.empty()) {
    CheckpointMeta meta;
    NeuralModel prev = load_checkpoint_expect(resume, tc.predictor, &meta);
    tc.resume_params = std::move(prev.params);
    tc.resume_epoch = meta.epoch + 1;
  }
  TrainResult res = train(ds, tc, spec.seed);

  NeuralModel best;
  best.cfg = tc.predictor;
  best.params = res.best_params;
  CheckpointMeta meta;
  meta.epoch = res.best_epoch;
  meta.metric = res.best_metric;
  meta.note = "best validation mean nearest-neighbour";
  fs::path out = spec.out_dir;
  save_checkpoint((out / "checkpoint.bin").string(), best, meta);

  std::ostringstream log;
  for (const std::string& line : res.log) log << line << "\n";
  write_text(out / "training_log.jsonl", log.str());

  ordered_json summary{{"initial_metric", res.initial_metric},
                       {"best_metric", res.best_metric},
                       {"best_epoch", res.best_epoch},
                       {"epochs_run", res.epochs_run},
                       {"stopped_early", res.stopped_early},
                       {"skipped_samples", res.skipped_samples},
                       {"skipped_steps", res.skipped_steps},
                       {"param_count", res.best_params.size()}};
  write_text(out / "train_summary.json", summary.dump(2) + "\n");
  std::printf("best val mean-nn %.6g at epoch %d (%d epochs run)\n",
              res.best_metric, res.best_epoch, res.epochs_run);
  return 0;
}

int cmd_eval(const RunSpec& spec, const FlatConfig& cfg) {
  Dataset ds = load_dataset(cfg.io_dataset);
  const std::vector<CurveSample>& split = pick_split(ds, cfg);
  std::vector<std::string> methods = split_list(cfg.eval_methods);
  if (methods.empty()) throw ConfigError("eval.methods is empty");

  std::shared_ptr<const NeuralModel> model;
  if (wants_method(methods, "neural")) model = load_model(cfg);

  fs::path out = spec.out_dir;
  ordered_json aggregate;
  ordered_json oracle_best;
  for (const std::string& name : methods) {
    EvalRun run = name == "oracle"
                      ? oracle_eval(split, cfg.eval_levels, spec.jobs, cfg, oracle_best)
                      : evaluate_method(scheme_from_name(name, cfg, model), name,
                                        split, cfg.eval_levels, spec.jobs);
    write_text(out / ("eval_" + name + ".csv"), eval_csv(run));
    aggregate[name] = aggregate_json(run);
  }
  ordered_json j{{"split", cfg.eval_split},
                 {"levels", cfg.eval_levels},
                 {"methods", aggregate}};
  if (!oracle_best.empty()) j["oracle_best_mu"] = oracle_best;
  write_text(out / "aggregate.json", j.dump(2) + "\n");
  std::printf("evaluated %zu methods on %zu curves\n", methods.size(), split.size());
  return 0;
}

int cmd_oracle(const RunSpec& spec, const FlatConfig& cfg) {
  Dataset ds = load_dataset(cfg.io_dataset);
  const std::vector<CurveSample>& split = pick_split(ds, cfg);
  fs::path out = spec.out_dir;
  ordered_json j;
  for (Geometry g : geometries_present(split)) {
    OracleResult res = oracle_grid_search(split, g, cfg.eval_levels, spec.jobs);
    std::ostringstream csv;
    csv.precision(17);
    csv << "mu,mean_nn\n";
    for (auto& [mu, nn] : res.table) csv << mu << ',' << nn << "\n";
    write_text(out / (std::string("oracle_") + to_string(g) + ".csv"), csv.str());

    // the grid skips zero, so the untensioned baseline is measured directly
    SchemeConfig base = SchemeConfig::four_point();
    base.hyp_mode = hyp_insert_mode(cfg);
    std::vector<CurveSample> sub;
    for (const CurveSample& s : split)
      if (s.geometry() == g) sub.push_back(s);
    EvalRun zero = evaluate_method(base, "four_point", sub, cfg.eval_levels, spec.jobs);
    double mu0 = zero.aggregate.at(g).mean.mean_nn;
    j[to_string(g)] = {{"best_mu", res.best_mu},
                       {"best_mean_nn", res.best_mean_nn},
                       {"mu0_mean_nn", mu0},
                       {"improvement_pct", 100.0 * (mu0 - res.best_mean_nn) / mu0}};
  }
  write_text(out / "oracle.json", j.dump(2) + "\n");
  std::printf("tension grid search done for %zu curves\n", split.size());
  return 0;
}

int cmd_robustness(const RunSpec& spec, const FlatConfig& cfg) {
  Dataset ds = load_dataset(cfg.io_dataset);
  std::vector<std::string> names = split_list(cfg.robustness_methods);
  std::vector<double> sigmas = parse_double_list(cfg.robustness_sigmas);
  std::shared_ptr<const NeuralModel> model;
  if (wants_method(names, "neural")) model = load_model(cfg);

  std::vector<std::pair<std::string, SchemeConfig>> methods;
  for (const std::string& name : names)
    methods.emplace_back(name, scheme_from_name(name, cfg, model));

  std::vector<RobustnessCell> cells = robustness_study(
      ds.val, sigmas, methods, cfg.robustness_levels, spec.seed, spec.jobs);

  std::ostringstream csv;
  csv.precision(17);
  csv << "method,sigma,mean_g1,sd_g1,mean_nn,sd_nn\n";
  ordered_json j;
  for (const RobustnessCell& c : cells) {
    csv << c.method << ',' << c.sigma << ',' << c.mean_g1 << ',' << c.sd_g1 << ','
        << c.mean_nn << ',' << c.sd_nn << "\n";
    j[c.method].push_back({{"sigma", c.sigma},
                           {"mean_g1", c.mean_g1},
                           {"sd_g1", c.sd_g1},
                           {"mean_nn", c.mean_nn},
                           {"sd_nn", c.sd_nn}});
  }
  fs::path out = spec.out_dir;
  write_text(out / "robustness.csv", csv.str());
  write_text(out / "robustness.json", j.dump(2) + "\n");
  std::printf("robustness grid: %zu methods x %zu noise levels\n", methods.size(),
              sigmas.size());
  return 0;
}

int cmd_ablate(const RunSpec& spec, const FlatConfig& cfg) {
  Dataset ds = load_dataset(cfg.io_dataset);
  TrainConfig base = train_config(cfg);
  fs::path out = spec.out_dir;
  ordered_json j;
  for (const std::string& name : split_list(cfg.ablate_conditions)) {
    AblationCondition c = parse_ablation(name);
    AblationOutcome res = ablation_run(c, ds, base, spec.seed, cfg.eval_levels);

    NeuralModel best;
    best.cfg = ablation_config(c, base).predictor;
    best.params = res.train.best_params;
    CheckpointMeta meta;
    meta.epoch = res.train.best_epoch;
    meta.metric = res.train.best_metric;
    meta.note = name;
    save_checkpoint((out / ("ablate_" + name + ".bin")).string(), best, meta);
    write_text(out / ("eval_" + name + ".csv"), eval_csv(res.eval));

    j[name] = {{"train",
                {{"initial_metric", res.train.initial_metric},
                 {"best_metric", res.train.best_metric},
                 {"best_epoch", res.train.best_epoch},
                 {"epochs_run", res.train.epochs_run},
                 {"stopped_early", res.train.stopped_early}}},
               {"eval", aggregate_json(res.eval)}};
    std::printf("ablation %s: best val mean-nn %.6g\n", name.c_str(),
                res.train.best_metric);
  }
  write_text(out / "ablation.json", j.dump(2) + "\n");
  return 0;
}

int cmd_analyze(const RunSpec& spec, const FlatConfig& cfg) {
  Dataset ds = load_dataset(cfg.io_dataset);
  std::shared_ptr<const NeuralModel> model = load_model(cfg);
  SchemeConfig scheme = scheme_from_name("neural", cfg, model);
  fs::path out = spec.out_dir;

  // effective-tension marginals with the per-edge values behind them
  ordered_json marginals;
  std::ostringstream mu_csv;
  mu_csv.precision(17);
  mu_csv << "curve_id,edge,defined,mu_eff\n";
  for (Geometry g : geometries_present(ds.val)) {
    std::vector<CurveSample> sub;
    for (const CurveSample& s : ds.val) {
      if (s.geometry() != g) continue;
      sub.push_back(s);
      if (static_cast<int>(sub.size()) >= cfg.analyze_curves_per_geometry) break;
    }
    TensionMarginal tm = tension_marginal(scheme, sub, g);
    marginals[to_string(g)] = {{"curves", sub.size()},
                               {"defined", tm.defined},
                               {"total", tm.total},
                               {"mean", tm.mean},
                               {"sd", tm.sd}};
    for (const CurveSample& s : sub) {
      ClosedPolygon warmed = apply_scheme(scheme, s.control, 1);
      TensionProfile prof = mu_effective(warmed, predict_angles(*model, warmed));
      for (size_t e = 0; e < prof.mu_eff.size(); ++e) {
        bool defined = !std::isnan(prof.mu_eff[e]);
        mu_csv << s.id << ',' << e << ',' << (defined ? 1 : 0) << ',';
        if (defined) mu_csv << prof.mu_eff[e];
        mu_csv << "\n";
      }
    }
  }
  write_text(out / "mu_eff.csv", mu_csv.str());

  LipschitzReport lip =
      lipschitz_estimate(*model, cfg.lipschitz_iters, derive_seed(spec.seed, "power"));
  ordered_json layers = ordered_json::array();
  for (size_t i = 0; i < lip.layer_names.size(); ++i)
    layers.push_back({{"layer", lip.layer_names[i]}, {"sigma", lip.layer_norms[i]}});
  ordered_json lip_json{
      {"layers", layers}, {"product", lip.product}, {"c_prox", lip.c_prox}};

  // how far one predicted step strays from the zero-tension step, per geometry
  std::ostringstream prox_csv;
  prox_csv.precision(17);
  prox_csv << "geometry,level,h,max_delta,deviation\n";
  ordered_json slopes;
  for (Geometry g : geometries_present(ds.val)) {
    const CurveSample* first = nullptr;
    for (const CurveSample& s : ds.val)
      if (s.geometry() == g) {
        first = &s;
        break;
      }
    ProximityReport rep =
        proximity_diagnostic(scheme, first->control, cfg.analyze_proximity_levels);
    for (const ProximityLevel& lv : rep.levels) {
      prox_csv << to_string(g) << ',' << lv.level << ',' << lv.h << ','
               << lv.max_delta << ',' << lv.deviation << "\n";
    }
    slopes[to_string(g)] = {{"curve", first->id},
                            {"slope_dev_vs_h", rep.slope_dev_vs_h},
                            {"angle_decay_log2", rep.angle_decay_log2}};
  }
  write_text(out / "proximity.csv", prox_csv.str());

  ordered_json jameson{{"marginals", marginals},
                       {"lipschitz", lip_json},
                       {"proximity", slopes}};
  write_text(out / "analysis.json", jameson.dump(2) + "\n");
  std::printf("analysis written: tension marginals, Lipschitz product %.4g, "
              "proximity slopes\n",
              lip.product);
  return 0;
}

int cmd_lipschitz(const RunSpec& spec, const FlatConfig& cfg) {
  std::shared_ptr<const NeuralModel> model = load_model(cfg);
  LipschitzReport lip =
      lipschitz_estimate(*model, cfg.lipschitz_iters, derive_seed(spec.seed, "power"));
  ordered_json layers = ordered_json::array();
  for (size_t i = 0; i < lip.layer_names.size(); ++i)
    layers.push_back({{"layer", lip.layer_names[i]}, {"sigma", lip.layer_norms[i]}});
  ordered_json j{{"layers", layers}, {"product", lip.product}, {"c_prox", lip.c_prox}};
  write_text(fs::path(spec.out_dir) / "lipschitz.json", j.dump(2) + "\n");
  std::printf("Lipschitz product %.6g, proximity constant %.6g\n", lip.product,
              lip.c_prox);
  return 0;
}

int cmd_iss(const RunSpec& spec, const FlatConfig& cfg) {
  IssTrack track = iss_track();
  fs::path out = spec.out_dir;
  size_t n_orbit = track.ground_truth.size() - static_cast<size_t>(track.closure_points);

  std::ostringstream gt;
  gt.precision(17);
  gt << "index,segment,x,y,z,lat_deg,lon_deg\n";
  for (size_t i = 0; i < track.ground_truth.size(); ++i) {
    const Point& p = track.ground_truth[i];
    gt << i << ',' << (i < n_orbit ? "orbit" : "closure") << ',' << p.x() << ','
       << p.y() << ',' << p.z() << ',' << lat_deg(p) << ',' << lon_deg(p) << "\n";
  }
  write_text(out / "ground_truth.csv", gt.str());

  std::ostringstream ctrl;
  ctrl.precision(17);
  ctrl << "index,x,y,z,lat_deg,lon_deg\n";
  for (size_t i = 0; i < track.control.size(); ++i) {
    const Point& p = track.control.pts[i];
    ctrl << i << ',' << p.x() << ',' << p.y() << ',' << p.z() << ','
         << lat_deg(p) << ',' << lon_deg(p) << "\n";
  }
  write_text(out / "control.csv", ctrl.str());

  std::vector<std::string> names = split_list(cfg.iss_methods);
  std::shared_ptr<const NeuralModel> model;
  if (wants_method(names, "neural")) model = load_model(cfg);

  ordered_json per_method;
  for (const std::string& name : names) {
    SchemeConfig scheme = scheme_from_name(name, cfg, model);
    ClosedPolygon refined = apply_scheme(scheme, track.control, cfg.iss_levels);
    std::ostringstream rf;
    rf.precision(17);
    rf << "index,x,y,z,lat_deg,lon_deg\n";
    for (size_t i = 0; i < refined.size(); ++i) {
      const Point& p = refined.pts[i];
      rf << i << ',' << p.x() << ',' << p.y() << ',' << p.z() << ','
         << lat_deg(p) << ',' << lon_deg(p) << "\n";
    }
    write_text(out / ("refined_" + name + ".csv"), rf.str());
    per_method[name] = metrics_json(compute_metrics(refined, track.ground_truth));
  }

  ordered_json j{{"closure_gap_deg", track.closure_gap_deg},
                 {"closure_points", track.closure_points},
                 {"n_ground_truth", track.ground_truth.size()},
                 {"n_control", track.control.size()},
                 {"levels", cfg.iss_levels},
                 {"methods", per_method}};
  write_text(out / "iss.json", j.dump(2) + "\n");
  std::printf("ground track written: %zu dense points, %zu methods\n",
              track.ground_truth.size(), names.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic curve subdivision workbench"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string resume, opt_dataset, opt_checkpoint, opt_hyp, opt_methods;
  int opt_levels = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", spec.config_path, "settings file, key = value per line");
    sub->add_option("--seed", spec.seed, "master seed; every substream derives from it");
    sub->add_option("--out", spec.out_dir, "output directory");
    sub->add_option("--jobs", spec.jobs, "worker threads for curve-level loops");
    sub->add_option("--preset", spec.preset, "settings preset: desk or paper");
    sub->add_option("--set", spec.overrides, "override one setting, key=value")
        ->take_all();
    sub->add_option("--dataset", opt_dataset, "shorthand for io.dataset");
    sub->add_option("--checkpoint", opt_checkpoint, "shorthand for io.checkpoint");
    sub->add_option("--hyp-insert", opt_hyp,
                    "hyperbolic insertion rule: corrected or paper");
    sub->add_flag("--force", spec.force, "replace existing outputs");
    return sub;
  };

  add_common(app.add_subcommand("gen-data", "generate the curve dataset"));
  CLI::App* trn = add_common(app.add_subcommand("train", "fit the tension predictor"));
  trn->add_option("--resume", resume, "checkpoint to continue from");
  CLI::App* evl = add_common(app.add_subcommand("eval", "score methods on a split"));
  CLI::App* orc = add_common(
      app.add_subcommand("oracle", "grid-search the best fixed tension per geometry"));
  CLI::App* rob = add_common(
      app.add_subcommand("robustness", "score methods under control-point noise"));
  add_common(app.add_subcommand("ablate", "train and score each ablation condition"));
  add_common(app.add_subcommand(
      "analyze", "tension marginals, Lipschitz report, proximity diagnostic"));
  add_common(app.add_subcommand("lipschitz", "spectral-norm report for a checkpoint"));
  CLI::App* iss = add_common(
      app.add_subcommand("iss", "orbital ground-track case study"));
  for (CLI::App* sub : {evl, rob, iss}) {
    sub->add_option("--methods", opt_methods, "comma-separated method list");
    sub->add_option("--levels", opt_levels, "refinement depth");
  }
  orc->add_option("--levels", opt_levels, "refinement depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::fflush(stdout);
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  spec.subcommand = sub->get_name();
  if (spec.out_dir.empty())
    spec.out_dir = spec.subcommand == "gen-data" ? "data" : "out/" + spec.subcommand;

  try {
    FlatConfig cfg = resolve_config(spec);
    if (!opt_dataset.empty()) cfg.io_dataset = opt_dataset;
    if (!opt_checkpoint.empty()) cfg.io_checkpoint = opt_checkpoint;
    if (!opt_hyp.empty()) cfg.scheme_hyp_insert = opt_hyp;
    hyp_insert_mode(cfg);  // validate eagerly so every command rejects typos
    if (!opt_methods.empty()) {
      if (spec.subcommand == "eval") cfg.eval_methods = opt_methods;
      if (spec.subcommand == "robustness") cfg.robustness_methods = opt_methods;
      if (spec.subcommand == "iss") cfg.iss_methods = opt_methods;
    }
    if (opt_levels >= 0) {
      if (spec.subcommand == "eval" || spec.subcommand == "oracle")
        cfg.eval_levels = opt_levels;
      if (spec.subcommand == "robustness") cfg.robustness_levels = opt_levels;
      if (spec.subcommand == "iss") cfg.iss_levels = opt_levels;
    }

    if (spec.subcommand == "gen-data") {
      // refuse to clobber an existing dataset unless asked
      fs::path dir = spec.out_dir;
      bool occupied = fs::exists(dir / "manifest.json") || fs::exists(dir / "train") ||
                      fs::exists(dir / "val");
      if (occupied && !spec.force)
        throw ConfigError("dataset already present in " + dir.string() +
                          "; pass --force to regenerate");
      if (occupied) {
        fs::remove(dir / "manifest.json");
        fs::remove_all(dir / "train");
        fs::remove_all(dir / "val");
      }
    }

    write_effective_config(spec, cfg);

    if (spec.subcommand == "gen-data") return cmd_gen_data(spec, cfg);
    if (spec.subcommand == "train") return cmd_train(spec, cfg, resume);
    if (spec.subcommand == "eval") return cmd_eval(spec, cfg);
    if (spec.subcommand == "oracle") return cmd_oracle(spec, cfg);
    if (spec.subcommand == "robustness") return cmd_robustness(spec, cfg);
    if (spec.subcommand == "ablate") return cmd_ablate(spec, cfg);
    if (spec.subcommand == "analyze") return cmd_analyze(spec, cfg);
    if (spec.subcommand == "lipschitz") return cmd_lipschitz(spec, cfg);
    if (spec.subcommand == "iss") return cmd_iss(spec, cfg);
    throw UsageError("unhandled subcommand " + spec.subcommand);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: usage: %s\n", e.what());
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: io: %s\n", e.what());
  } catch (const CheckpointError& e) {
    std::fprintf(stderr, "error: checkpoint: %s\n", e.what());
  } catch (const DegenerateInputError& e) {
    std::fprintf(stderr, "error: degenerate-input: %s\n", e.what());
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: domain: %s\n", e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
  }
  return 1;
}
