#include "auctk/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "auctk/experiments.hpp"
#include "auctk/metrics.hpp"
#include "auctk/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace auctk {

namespace {

int thread_count() {
  if (const char* env = std::getenv("AUCTK_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string display_name(LossKind kind) {
  switch (kind) {
    case LossKind::bce: return "BCE";
    case LossKind::ce: return "CE";
    case LossKind::wbce: return "W-BCE";
    case LossKind::cb_bce: return "CB-BCE";
    case LossKind::cb_ce: return "CB-CE";
    case LossKind::s_fl: return "S-FL";
    case LossKind::a_fl: return "A-FL";
    case LossKind::s_ml: return "S-ML";
    case LossKind::a_ml: return "A-ML";
    case LossKind::ldam: return "LDAM";
    case LossKind::mbauc: return "MBAUC";
  }
  return "?";
}

PenaltyMode penalty_mode_from_name(const std::string& name) {
  if (name == "alm") return PenaltyMode::alm;
  if (name == "quadratic_only") return PenaltyMode::quadratic_only;
  if (name == "lagrangian_only") return PenaltyMode::lagrangian_only;
  if (name == "none") return PenaltyMode::none;
  throw std::invalid_argument("config: unknown penalty_mode '" + name + "'");
}

LossSpec loss_from_json(const nlohmann::json& j,
                        const std::vector<long>& counts) {
  LossSpec spec;
  spec.kind = loss_kind_from_name(j.value("kind", std::string("bce")));
  spec.w = j.value("w", spec.w);
  spec.beta = j.value("beta", spec.beta);
  spec.gamma = j.value("gamma", spec.gamma);
  spec.m = j.value("m", spec.m);
  spec.s = j.value("s", spec.s);
  spec.margin = j.value("margin", spec.margin);
  spec.class_counts = counts;
  return spec;
}

nlohmann::json loss_to_json(const LossSpec& spec) {
  nlohmann::json j;
  j["kind"] = loss_kind_name(spec.kind);
  j["w"] = spec.w;
  j["beta"] = spec.beta;
  j["gamma"] = spec.gamma;
  j["m"] = spec.m;
  j["s"] = spec.s;
  j["margin"] = spec.margin;
  return j;
}

AlmConfig alm_from_json(const nlohmann::json& j) {
  AlmConfig cfg;
  cfg.mu0 = j.value("mu0", cfg.mu0);
  cfg.rho = j.value("rho", cfg.rho);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.val_tolerance = j.value("val_tolerance", cfg.val_tolerance);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.patience = j.value("patience", cfg.patience);
  cfg.mc_variant = j.value("mc_variant", cfg.mc_variant);
  cfg.constraint_on_logits =
      j.value("constraint_on_logits", cfg.constraint_on_logits);
  cfg.penalty_mode =
      penalty_mode_from_name(j.value("penalty_mode", std::string("alm")));
  std::string metric = j.value("val_metric", std::string("auto"));
  if (metric == "auc")
    cfg.val_metric = ValMetric::auc;
  else if (metric == "accuracy")
    cfg.val_metric = ValMetric::accuracy;
  std::string opt = j.value("optimizer", std::string("sgd"));
  cfg.optimizer = opt == "adam" ? OptimizerKind::adam : OptimizerKind::sgd;
  std::string strat = j.value("stratified", std::string("auto"));
  if (strat == "on")
    cfg.stratified = StratifiedBatching::on;
  else if (strat == "off")
    cfg.stratified = StratifiedBatching::off;
  return cfg;
}

nlohmann::json alm_to_json(const AlmConfig& cfg) {
  nlohmann::json j;
  j["mu0"] = cfg.mu0;
  j["rho"] = cfg.rho;
  j["delta"] = cfg.delta;
  j["val_tolerance"] = cfg.val_tolerance;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["patience"] = cfg.patience;
  j["mc_variant"] = cfg.mc_variant;
  switch (cfg.penalty_mode) {
    case PenaltyMode::alm: j["penalty_mode"] = "alm"; break;
    case PenaltyMode::quadratic_only: j["penalty_mode"] = "quadratic_only"; break;
    case PenaltyMode::lagrangian_only: j["penalty_mode"] = "lagrangian_only"; break;
    case PenaltyMode::none: j["penalty_mode"] = "none"; break;
  }
  j["optimizer"] = cfg.optimizer == OptimizerKind::adam ? "adam" : "sgd";
  return j;
}

// Dataset specs: {"csv": path} or {"gaussians": {...}}, optionally thinned
// by {"ratio": R, "minority_class": c}.
Dataset dataset_from_spec(const nlohmann::json& j, std::uint64_t seed) {
  Dataset data;
  if (j.is_string()) {
    data = load_csv(j.get<std::string>());
  } else if (j.contains("csv")) {
    data = load_csv(j.at("csv").get<std::string>());
  } else if (j.contains("gaussians")) {
    const auto& g = j.at("gaussians");
    auto n_per_class = g.at("n_per_class").get<std::vector<std::size_t>>();
    std::vector<std::vector<double>> means, covs;
    if (g.contains("means")) {
      means = g.at("means").get<std::vector<std::vector<double>>>();
    } else {
      // default desk-scale binary task: overlapping unit Gaussians
      means = {{0.0, 0.0}, {1.5, 1.5}};
    }
    if (g.contains("covs"))
      covs = g.at("covs").get<std::vector<std::vector<double>>>();
    else
      covs.assign(means.size(),
                  std::vector<double>(means.front().size(), 1.0));
    data = gen_gaussians(n_per_class, means, covs,
                         g.value("seed", seed));
    if (g.contains("critical_classes")) {
      data.critical_classes.clear();
      for (int c : g.at("critical_classes").get<std::vector<int>>())
        data.critical_classes.insert(c);
    }
  } else {
    throw std::invalid_argument(
        "config: dataset needs either \"csv\" or \"gaussians\"");
  }
  if (j.is_object() && j.contains("ratio")) {
    int minority = j.value("minority_class", 1);
    data = subsample_to_ratio(data, minority, j.at("ratio").get<double>(),
                              mix_seed(seed, 0x5ab));
  }
  return data;
}

struct CliConfig {
  nlohmann::json raw;
  std::string task = "binary";
  std::uint64_t seed = 1;
  std::string out = "out";
  std::vector<std::size_t> hidden{32, 32};
  double train_fraction = 0.8;
  int ensemble_k = 10;

  bool binary() const { return task == "binary"; }
};

CliConfig load_config(const std::string& path, long seed_override,
                      const std::string& out_override) {
  CliConfig cfg;
  cfg.raw = nlohmann::json::parse(read_file(path));
  cfg.task = cfg.raw.value("task", cfg.task);
  if (cfg.task != "binary" && cfg.task != "multiclass")
    throw std::invalid_argument("config: task must be binary or multiclass");
  cfg.seed = cfg.raw.value("seed", cfg.seed);
  cfg.out = cfg.raw.value("out", cfg.out);
  cfg.train_fraction = cfg.raw.value("train_fraction", cfg.train_fraction);
  cfg.ensemble_k = cfg.raw.value("ensemble_k", cfg.ensemble_k);
  if (cfg.raw.contains("model") && cfg.raw.at("model").contains("hidden"))
    cfg.hidden =
        cfg.raw.at("model").at("hidden").get<std::vector<std::size_t>>();
  // flags override config fields
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  if (!out_override.empty()) cfg.out = out_override;
  return cfg;
}

Mlp build_model(const CliConfig& cfg, const Dataset& data) {
  std::vector<std::size_t> dims;
  dims.push_back(data.feature_dim());
  for (std::size_t h : cfg.hidden) dims.push_back(h);
  dims.push_back(cfg.binary() ? 1
                              : static_cast<std::size_t>(data.num_classes()));
  return Mlp::make(
      dims, cfg.binary() ? HeadKind::sigmoid : HeadKind::identity_logits,
      cfg.seed);
}

nlohmann::json metrics_json(const std::string& method, const Mlp& model,
                            const Dataset& data) {
  nlohmann::json j;
  j["method"] = method;
  Matrix out = model.forward(data.feature_matrix());
  std::vector<int> labels = data.labels();
  char key[16];
  if (model.head() == HeadKind::sigmoid) {
    std::vector<double> scores(out.rows());
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = out(i, 0);
    j["auc"] = auc_from_scores(scores, labels);
    RocCurve curve = roc(scores, labels);
    nlohmann::json table = nlohmann::json::object();
    for (double level : kBinaryTprLevels) {
      std::snprintf(key, sizeof(key), "%.2f", level);
      table[key] = fpr_at_tpr(curve, level);
    }
    j["fpr_at_tpr"] = table;
  } else {
    j["accuracy"] = accuracy(out, labels);
    int critical = *data.critical_classes.begin();
    nlohmann::json table = nlohmann::json::object();
    for (double level : kMulticlassTprLevels) {
      std::snprintf(key, sizeof(key), "%.2f", level);
      table[key] = multiclass_error_at_tpr(out, labels, critical, level).error;
    }
    j["error_at_tpr"] = table;
  }
  return j;
}

std::string method_name(const LossSpec& loss, const AlmConfig& alm) {
  std::string name = display_name(loss.kind);
  if (alm.penalty_mode == PenaltyMode::none) return name;
  if (alm.penalty_mode == PenaltyMode::quadratic_only)
    return "QP + " + name;
  if (alm.penalty_mode == PenaltyMode::lagrangian_only)
    return "LM + " + name;
  return "ALM + " + name;
}

int cmd_train(const CliConfig& cfg) {
  Dataset pool = dataset_from_spec(cfg.raw.at("dataset"), cfg.seed);
  auto split = stratified_splits(pool, 1, cfg.train_fraction, cfg.seed).front();
  LossSpec loss = loss_from_json(cfg.raw.value("loss", nlohmann::json::object()),
                                 split.train.counts_vector());
  AlmConfig alm = alm_from_json(cfg.raw.value("alm", nlohmann::json::object()));
  alm.seed = cfg.seed;

  Mlp model = build_model(cfg, split.train);
  TrainResult result = train(model, split.train, split.validation, loss, alm);

  fs::path out(cfg.out);
  write_file(out / "trace.csv", result.trace.to_csv());
  result.model.save_checkpoint((out / "checkpoint.json").string());
  write_file(out / "constraint_state.json", result.state.to_json());
  nlohmann::json metrics =
      metrics_json(method_name(loss, alm), result.model, split.validation);
  metrics["best_epoch"] = result.best_epoch;
  metrics["diverged"] = result.diverged;
  write_file(out / "metrics.json", metrics.dump(2) + "\n");
  if (result.diverged) {
    std::cerr << "training diverged (non-finite loss); trace written to "
              << (out / "trace.csv") << "\n";
    return 1;
  }
  std::cout << "trained " << method_name(loss, alm) << ": best epoch "
            << result.best_epoch << ", validation metric "
            << result.best_metric << "\n";
  return 0;
}

// `data_path` is a CSV dataset or, with a .json extension, a dataset spec
// of the same shape as the config's "dataset" entry.
int cmd_evaluate(const std::string& checkpoint, const std::string& data_path,
                 const std::string& out_dir, const std::string& method) {
  Mlp model = Mlp::load_checkpoint(checkpoint);
  Dataset data =
      fs::path(data_path).extension() == ".json"
          ? dataset_from_spec(nlohmann::json::parse(read_file(data_path)), 0)
          : load_csv(data_path);
  std::string name = method.empty() ? fs::path(checkpoint).stem().string()
                                    : method;
  nlohmann::json j = metrics_json(name, model, data);
  std::string text = j.dump(2) + "\n";
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "metrics.json", text);
    if (model.head() == HeadKind::sigmoid) {
      Matrix out = model.forward(data.feature_matrix());
      std::vector<double> scores(out.rows());
      for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = out(i, 0);
      write_file(fs::path(out_dir) / "roc.csv",
                 roc(scores, data.labels()).to_csv());
    }
  }
  std::cout << text;
  return 0;
}

GridSpec grid_from_json(const nlohmann::json& raw, bool binary,
                        const Dataset& train_data) {
  auto counts = train_data.counts_vector();
  long largest = 0, smallest = counts.empty() ? 1 : counts.front();
  for (long c : counts) {
    largest = std::max(largest, c);
    smallest = std::min(smallest, c);
  }
  double ratio =
      smallest > 0 ? static_cast<double>(largest) / static_cast<double>(smallest)
                   : 1.0;
  GridSpec grid = binary ? GridSpec::defaults_binary(ratio)
                         : GridSpec::defaults_multiclass(ratio);
  if (!raw.is_object()) return grid;
  auto fill = [&](const char* key, std::vector<double>& dst) {
    if (raw.contains(key)) dst = raw.at(key).get<std::vector<double>>();
  };
  fill("mu0", grid.mu0);
  fill("rho", grid.rho);
  fill("delta", grid.delta);
  fill("m", grid.margin_m);
  fill("gamma", grid.gamma);
  fill("w", grid.w);
  fill("beta", grid.beta);
  fill("ldam_s", grid.ldam_s);
  fill("mbauc_margin", grid.mbauc_margin);
  return grid;
}

int cmd_grid(const CliConfig& cfg, int budget) {
  Dataset pool = dataset_from_spec(cfg.raw.at("dataset"), cfg.seed);
  int k = cfg.raw.value("grid_splits", 1);
  auto splits = stratified_splits(pool, k, cfg.train_fraction, cfg.seed);
  LossSpec loss =
      loss_from_json(cfg.raw.value("loss", nlohmann::json::object()),
                     splits.front().train.counts_vector());
  AlmConfig base = alm_from_json(cfg.raw.value("alm", nlohmann::json::object()));
  GridSpec grid = grid_from_json(cfg.raw.value("grid", nlohmann::json()),
                                 cfg.binary(), splits.front().train);

  RunContext ctx;
  ctx.hidden = cfg.hidden;
  ctx.binary = cfg.binary();
  ctx.base_seed = cfg.seed;
  ctx.threads = thread_count();

  GridResult result = grid_search(splits, loss.kind, grid, base, ctx, budget);

  fs::path out(cfg.out);
  write_file(out / "leaderboard.csv", result.leaderboard_csv());
  nlohmann::json best;
  best["loss"] = loss_to_json(result.best.loss);
  best["alm"] = alm_to_json(result.best.alm);
  best["val_metric"] = result.best.val_metric;
  best["budget_exhausted"] = result.budget_exhausted;
  write_file(out / "best_config.json", best.dump(2) + "\n");
  std::cout << "grid: " << result.leaderboard.size() << " runs, best "
            << result.best.key << " at " << result.best.val_metric << "\n";
  return 0;
}

int cmd_ensemble(const CliConfig& cfg) {
  Dataset pool = dataset_from_spec(cfg.raw.at("dataset"), cfg.seed);
  if (!cfg.raw.contains("test"))
    throw std::invalid_argument("config: ensemble needs a \"test\" dataset");
  Dataset test =
      dataset_from_spec(cfg.raw.at("test"), mix_seed(cfg.seed, 0x7e57));
  LossSpec loss = loss_from_json(cfg.raw.value("loss", nlohmann::json::object()),
                                 pool.counts_vector());
  AlmConfig alm = alm_from_json(cfg.raw.value("alm", nlohmann::json::object()));

  RunContext ctx;
  ctx.hidden = cfg.hidden;
  ctx.binary = cfg.binary();
  ctx.base_seed = cfg.seed;
  ctx.threads = thread_count();

  ExperimentResult result =
      ensemble_run(pool, test, loss, alm, cfg.ensemble_k, ctx);
  nlohmann::json j = nlohmann::json::parse(result.to_json());
  j["method"] = method_name(loss, alm);
  if (ctx.binary) j["auc"] = result.ensembled_auc;
  else j["accuracy"] = result.ensembled_accuracy;
  write_file(fs::path(cfg.out) / "result.json", j.dump(2) + "\n");
  std::cout << "ensemble " << method_name(loss, alm) << ": avg "
            << result.avg_metric << " +- " << result.std_metric
            << ", ensembled "
            << (ctx.binary ? result.ensembled_auc : result.ensembled_accuracy)
            << "\n";
  return 0;
}

int cmd_verify(const std::string& out_dir) {
  VerifyOutcome outcome = run_verify();
  std::cout << outcome.table;
  std::cout << (outcome.failures == 0 ? "all checks passed"
                                      : std::to_string(outcome.failures) +
                                            " check(s) failed")
            << "\n";
  if (!out_dir.empty())
    write_file(fs::path(out_dir) / "verify.json", outcome.json + "\n");
  return outcome.failures == 0 ? 0 : 1;
}

// One row per metrics/result file; columns follow the task's metric table.
int cmd_report(const std::string& dir, const std::string& out_path) {
  struct Row {
    std::string method;
    std::map<std::string, double> fpr;
    std::map<std::string, double> err;
    double auc = -1.0, acc = -1.0;
  };
  std::vector<Row> rows;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(f));
    } catch (const std::exception&) {
      continue;
    }
    if (!j.is_object() || !(j.contains("fpr_at_tpr") || j.contains("error_at_tpr")))
      continue;
    Row row;
    row.method = j.value("method", f.stem().string());
    if (j.contains("fpr_at_tpr"))
      for (const auto& [k, v] : j.at("fpr_at_tpr").items())
        row.fpr[k] = v.get<double>();
    if (j.contains("error_at_tpr"))
      for (const auto& [k, v] : j.at("error_at_tpr").items())
        row.err[k] = v.get<double>();
    if (j.contains("auc")) row.auc = j.at("auc").get<double>();
    if (j.contains("ensembled_auc")) row.auc = j.at("ensembled_auc").get<double>();
    if (j.contains("accuracy")) row.acc = j.at("accuracy").get<double>();
    if (j.contains("ensembled_accuracy"))
      row.acc = j.at("ensembled_accuracy").get<double>();
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    std::cerr << "no metric files found in " << dir << "\n";
    return 1;
  }

  bool binary = rows.front().auc >= 0.0;
  std::set<std::string> levels;
  for (const auto& r : rows)
    for (const auto& [k, v] : (binary ? r.fpr : r.err)) levels.insert(k);

  // bold the better side of each (baseline, treated) pair per column
  auto partner = [&](const Row& r) -> const Row* {
    std::string base = r.method;
    auto plus = base.find(" + ");
    std::string want = plus == std::string::npos
                           ? ""  // baseline: find any treated row
                           : base.substr(plus + 3);
    for (const auto& other : rows) {
      if (&other == &r) continue;
      if (plus == std::string::npos) {
        auto p2 = other.method.find(" + ");
        if (p2 != std::string::npos && other.method.substr(p2 + 3) == base)
          return &other;
      } else if (other.method == want) {
        return &other;
      }
    }
    return nullptr;
  };

  std::string md = "| Method |";
  for (const auto& level : levels)
    md += (binary ? " FPR @ " : " Error @ ") + level + " TPR |";
  md += binary ? " AUC |\n" : " Accuracy |\n";
  md += "|---|";
  for (std::size_t i = 0; i < levels.size() + 1; ++i) md += "---|";
  md += "\n";
  char buf[64];
  for (const auto& r : rows) {
    const Row* other = partner(r);
    md += "| " + r.method + " |";
    for (const auto& level : levels) {
      const auto& table = binary ? r.fpr : r.err;
      auto it = table.find(level);
      if (it == table.end()) {
        md += " - |";
        continue;
      }
      bool better =
          other && [&]() {
            const auto& ot = binary ? other->fpr : other->err;
            auto oit = ot.find(level);
            return oit != ot.end() && it->second < oit->second;  // lower wins
          }();
      std::snprintf(buf, sizeof(buf), better ? " **%.4f** |" : " %.4f |",
                    it->second);
      md += buf;
    }
    double headline = binary ? r.auc : r.acc;
    double other_headline = other ? (binary ? other->auc : other->acc) : -1.0;
    bool better = other && headline > other_headline;  // higher wins
    std::snprintf(buf, sizeof(buf), better ? " **%.4f** |\n" : " %.4f |\n",
                  headline);
    md += buf;
  }

  std::cout << md;
  if (!out_path.empty()) write_file(out_path, md);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"AUC-constrained training toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_override, checkpoint, data_path, method;
  std::string report_dir, report_out;
  long seed_override = -1;
  int budget = 0;

  auto add_config_flags = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "JSON config file");
    if (needs_config) opt->required();
    sub->add_option("--seed", seed_override, "override the config seed");
    sub->add_option("--out", out_override, "override the output directory");
  };

  auto* train_cmd = app.add_subcommand("train", "train one model");
  add_config_flags(train_cmd, true);
  auto* eval_cmd =
      app.add_subcommand("evaluate", "evaluate a checkpoint on a CSV dataset");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint JSON")
      ->required();
  eval_cmd->add_option("--data", data_path, "dataset CSV")->required();
  eval_cmd->add_option("--out", out_override, "output directory");
  eval_cmd->add_option("--method", method, "method name for the report");
  auto* grid_cmd =
      app.add_subcommand("grid", "staged hyperparameter search");
  add_config_flags(grid_cmd, true);
  grid_cmd->add_option("--budget", budget, "max training runs (0 = all)");
  auto* ens_cmd =
      app.add_subcommand("ensemble", "k-split training with logit averaging");
  add_config_flags(ens_cmd, true);
  auto* verify_cmd =
      app.add_subcommand("verify", "run the oracle checks");
  verify_cmd->add_option("--out", out_override, "directory for verify.json");
  auto* report_cmd =
      app.add_subcommand("report", "markdown table from a results directory");
  report_cmd->add_option("dir", report_dir, "directory of metric JSON files")
      ->required();
  report_cmd->add_option("--out", report_out, "markdown output path");

  std::vector<const char*> argv;
  argv.push_back("auctk");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train_cmd->parsed())
      return cmd_train(load_config(config_path, seed_override, out_override));
    if (eval_cmd->parsed())
      return cmd_evaluate(checkpoint, data_path, out_override, method);
    if (grid_cmd->parsed())
      return cmd_grid(load_config(config_path, seed_override, out_override),
                      budget);
    if (ens_cmd->parsed())
      return cmd_ensemble(load_config(config_path, seed_override, out_override));
    if (verify_cmd->parsed()) return cmd_verify(out_override);
    if (report_cmd->parsed()) return cmd_report(report_dir, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace auctk
