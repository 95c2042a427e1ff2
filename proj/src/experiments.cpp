#include "auctk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <thread>

#include "auctk/metrics.hpp"
#include "auctk/rng.hpp"
#include "json.hpp"

namespace auctk {

const std::vector<double> kBinaryTprLevels{0.98, 0.95, 0.92, 0.90};
const std::vector<double> kMulticlassTprLevels{0.80, 0.90};

GridSpec GridSpec::defaults_binary(double class_ratio) {
  GridSpec g;
  g.w = {class_ratio / 3.0, 2.0 * class_ratio / 3.0, class_ratio};
  return g;
}

GridSpec GridSpec::defaults_multiclass(double class_ratio) {
  GridSpec g = defaults_binary(class_ratio);
  g.delta = {0.05, 0.1};
  return g;
}

void GridSpec::validate() const {
  if (mu0.empty() || rho.empty() || delta.empty())
    throw std::invalid_argument("grid candidate sets must be non-empty");
}

std::string config_key(const LossSpec& loss, const AlmConfig& alm) {
  char buf[512];
  const char* mode = "alm";
  switch (alm.penalty_mode) {
    case PenaltyMode::alm: mode = "alm"; break;
    case PenaltyMode::quadratic_only: mode = "quadratic_only"; break;
    case PenaltyMode::lagrangian_only: mode = "lagrangian_only"; break;
    case PenaltyMode::none: mode = "none"; break;
  }
  std::snprintf(buf, sizeof(buf),
                "loss=%s;beta=%.12g;gamma=%.12g;m=%.12g;margin=%.12g;s=%.12g;"
                "w=%.12g;mode=%s;mu0=%.12g;rho=%.12g;delta=%.12g",
                loss_kind_name(loss.kind).c_str(), loss.beta, loss.gamma,
                loss.m, loss.margin, loss.s, loss.w, mode, alm.mu0, alm.rho,
                alm.delta);
  return buf;
}

std::string loss_key(const LossSpec& loss) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "loss=%s;beta=%.12g;gamma=%.12g;m=%.12g;margin=%.12g;s=%.12g;"
                "w=%.12g",
                loss_kind_name(loss.kind).c_str(), loss.beta, loss.gamma,
                loss.m, loss.margin, loss.s, loss.w);
  return buf;
}

std::uint64_t config_seed(const RunContext& ctx, const std::string& key,
                          std::uint64_t split_index) {
  // FNV-1a over the canonical key, mixed with the base seed and split
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix_seed(mix_seed(ctx.base_seed, h), split_index);
}

void run_parallel(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

void sort_leaderboard(std::vector<GridEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const GridEntry& a, const GridEntry& b) {
              if (a.val_metric != b.val_metric)
                return a.val_metric > b.val_metric;
              return a.key < b.key;
            });
}

const GridEntry& select_best(const std::vector<GridEntry>& entries) {
  if (entries.empty())
    throw std::invalid_argument("cannot select from an empty leaderboard");
  const GridEntry* best = &entries.front();
  for (const auto& e : entries) {
    if (e.val_metric > best->val_metric ||
        (e.val_metric == best->val_metric && e.key < best->key))
      best = &e;
  }
  return *best;
}

std::string GridResult::leaderboard_csv() const {
  std::string out = "rank,stage,val_metric,config\n";
  char buf[640];
  for (std::size_t i = 0; i < leaderboard.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%d,%.12g,%s\n", i + 1,
                  leaderboard[i].stage, leaderboard[i].val_metric,
                  leaderboard[i].key.c_str());
    out += buf;
  }
  return out;
}

namespace {

Mlp build_model(const RunContext& ctx, const Dataset& data,
                std::uint64_t seed) {
  std::vector<std::size_t> dims;
  dims.push_back(data.feature_dim());
  for (std::size_t h : ctx.hidden) dims.push_back(h);
  dims.push_back(ctx.binary ? 1
                            : static_cast<std::size_t>(data.num_classes()));
  return Mlp::make(dims,
                   ctx.binary ? HeadKind::sigmoid : HeadKind::identity_logits,
                   seed);
}

double run_config(const Dataset& train_data, const Dataset& val_data,
                  const LossSpec& loss, const AlmConfig& alm,
                  const RunContext& ctx, std::uint64_t split_index) {
  AlmConfig cfg = alm;
  cfg.seed = config_seed(ctx, loss_key(loss), split_index);
  Mlp model = build_model(ctx, train_data, cfg.seed);
  TrainResult r = train(model, train_data, val_data, loss, cfg);
  if (r.diverged) return -1.0;  // ranks below any real metric
  return r.best_metric;
}

std::vector<LossSpec> stage1_candidates(LossKind kind, const GridSpec& grid,
                                        const std::vector<long>& counts) {
  std::vector<LossSpec> out;
  LossSpec base;
  base.kind = kind;
  base.class_counts = counts;
  switch (kind) {
    case LossKind::bce:
    case LossKind::ce:
      out.push_back(base);
      break;
    case LossKind::wbce:
      for (double w : grid.w) {
        base.w = w;
        out.push_back(base);
      }
      break;
    case LossKind::cb_bce:
    case LossKind::cb_ce:
      for (double beta : grid.beta) {
        base.beta = beta;
        out.push_back(base);
      }
      break;
    case LossKind::s_fl:
      for (double gamma : grid.gamma) {
        base.gamma = gamma;
        out.push_back(base);
      }
      break;
    case LossKind::a_fl:
      for (double gamma : grid.gamma)
        for (double m : grid.margin_m) {
          base.gamma = gamma;
          base.m = m;
          out.push_back(base);
        }
      break;
    case LossKind::s_ml:
    case LossKind::a_ml:
      for (double m : grid.margin_m) {
        base.m = m;
        out.push_back(base);
      }
      break;
    case LossKind::ldam:
      for (double s : grid.ldam_s) {
        base.s = s;
        out.push_back(base);
      }
      break;
    case LossKind::mbauc:
      for (double margin : grid.mbauc_margin) {
        base.margin = margin;
        out.push_back(base);
      }
      break;
  }
  return out;
}

}  // namespace

GridResult grid_search(const Dataset& train_pool, const Dataset& validation,
                       LossKind kind, const GridSpec& grid,
                       const AlmConfig& base, const RunContext& ctx,
                       int budget) {
  std::vector<SplitPair> splits(1);
  splits[0].train = train_pool;
  splits[0].validation = validation;
  return grid_search(splits, kind, grid, base, ctx, budget);
}

GridResult grid_search(const std::vector<SplitPair>& splits, LossKind kind,
                       const GridSpec& grid, const AlmConfig& base,
                       const RunContext& ctx, int budget) {
  grid.validate();
  if (splits.empty())
    throw std::invalid_argument("grid search needs at least one split");
  GridResult result;
  int runs = 0;
  auto exhausted = [&]() { return budget > 0 && runs >= budget; };

  auto evaluate_stage = [&](std::vector<GridEntry>& stage_entries) {
    const std::size_t k = splits.size();
    std::size_t n = stage_entries.size();
    if (budget > 0)
      n = std::min(n, static_cast<std::size_t>((budget - runs) /
                                               static_cast<int>(k)));
    // per-job slots, reduced in a fixed order afterwards so the thread
    // schedule cannot change the sums
    std::vector<double> metrics(n * k, 0.0);
    run_parallel(n * k, ctx.threads, [&](std::size_t job) {
      std::size_t i = job / k;
      std::size_t s = job % k;
      metrics[job] = run_config(splits[s].train, splits[s].validation,
                                stage_entries[i].loss, stage_entries[i].alm,
                                ctx, s);
    });
    runs += static_cast<int>(n * k);
    stage_entries.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t s = 0; s < k; ++s) sum += metrics[i * k + s];
      stage_entries[i].val_metric = sum / static_cast<double>(k);
    }
    for (auto& e : stage_entries) result.leaderboard.push_back(e);
  };

  // stage 1: loss hyperparameters with the penalty off
  std::vector<GridEntry> stage1;
  for (const LossSpec& loss : stage1_candidates(
           kind, grid, splits.front().train.counts_vector())) {
    GridEntry e;
    e.loss = loss;
    e.alm = base;
    e.alm.penalty_mode = PenaltyMode::none;
    e.stage = 1;
    e.key = config_key(e.loss, e.alm);
    stage1.push_back(std::move(e));
  }
  evaluate_stage(stage1);
  if (stage1.empty()) {
    result.budget_exhausted = true;
    sort_leaderboard(result.leaderboard);
    return result;
  }
  GridEntry best = select_best(stage1);

  // stage 2: (mu0, rho) with delta fixed at its first candidate
  if (!exhausted()) {
    std::vector<GridEntry> stage2;
    for (double mu0 : grid.mu0)
      for (double rho : grid.rho) {
        GridEntry e;
        e.loss = best.loss;
        e.alm = base;
        e.alm.penalty_mode = PenaltyMode::alm;
        e.alm.mu0 = mu0;
        e.alm.rho = rho;
        e.alm.delta = grid.delta.front();
        e.stage = 2;
        e.key = config_key(e.loss, e.alm);
        stage2.push_back(std::move(e));
      }
    evaluate_stage(stage2);
    if (!stage2.empty()) {
      GridEntry best2 = select_best(stage2);
      best = best2;

      // stage 3: delta, with (mu0, rho) fixed
      if (!exhausted() && grid.delta.size() > 1) {
        std::vector<GridEntry> stage3;
        for (std::size_t di = 1; di < grid.delta.size(); ++di) {
          GridEntry e = best2;
          e.alm.delta = grid.delta[di];
          e.stage = 3;
          e.key = config_key(e.loss, e.alm);
          stage3.push_back(std::move(e));
        }
        evaluate_stage(stage3);
        if (!stage3.empty()) {
          stage3.push_back(best2);  // delta.front() already measured
          GridEntry best3 = select_best(stage3);
          best = best3;
        }
      }
    } else {
      result.budget_exhausted = true;
    }
  } else {
    result.budget_exhausted = true;
  }

  if (budget > 0 && runs >= budget) result.budget_exhausted = true;
  result.best = best;
  sort_leaderboard(result.leaderboard);
  return result;
}

double improvement_correlation(const std::vector<double>& baseline,
                               const std::vector<double>& treated) {
  if (baseline.size() != treated.size())
    throw std::invalid_argument("paired metric lists must align");
  std::vector<double> improvement(baseline.size());
  for (std::size_t i = 0; i < baseline.size(); ++i)
    improvement[i] = treated[i] - baseline[i];
  return pearson(baseline, improvement);
}

std::string ExperimentResult::to_json() const {
  nlohmann::json j;
  j["config"] = key;
  j["loss"] = loss_kind_name(loss.kind);
  j["k"] = k;
  j["task"] = binary ? "binary" : "multiclass";
  j["split_metrics"] = split_metrics;
  j["avg_metric"] = avg_metric;
  j["std_metric"] = std_metric;
  if (binary) {
    j["ensembled_auc"] = ensembled_auc;
    j["fpr_at_tpr"] = fpr_at_tpr;
  } else {
    j["ensembled_accuracy"] = ensembled_accuracy;
    j["error_at_tpr"] = error_at_tpr;
  }
  return j.dump(2);
}

ExperimentResult ensemble_run(const Dataset& train_pool, const Dataset& test,
                              const LossSpec& loss, const AlmConfig& alm,
                              int k, const RunContext& ctx) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  ExperimentResult result;
  result.loss = loss;
  result.alm = alm;
  result.k = k;
  result.binary = ctx.binary;
  result.key = config_key(loss, alm);

  auto splits = stratified_splits(train_pool, k, 0.8, ctx.base_seed);
  std::vector<Matrix> logits(static_cast<std::size_t>(k));
  std::vector<double> metrics(static_cast<std::size_t>(k), 0.0);
  const Matrix test_features = test.feature_matrix();
  const std::vector<int> test_labels = test.labels();

  run_parallel(static_cast<std::size_t>(k), ctx.threads, [&](std::size_t i) {
    AlmConfig cfg = alm;
    cfg.seed = config_seed(ctx, loss_key(loss), i);
    Mlp model = build_model(ctx, splits[i].train, cfg.seed);
    TrainResult r =
        train(model, splits[i].train, splits[i].validation, loss, cfg);
    logits[i] = r.model.forward_logits(test_features);
    if (ctx.binary) {
      std::vector<double> scores(logits[i].rows());
      for (std::size_t s = 0; s < scores.size(); ++s)
        scores[s] = logits[i](s, 0);
      metrics[i] = auc_from_scores(scores, test_labels);
    } else {
      metrics[i] = accuracy(logits[i], test_labels);
    }
  });

  result.split_metrics = metrics;
  double mean = 0.0;
  for (double m : metrics) mean += m;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (double m : metrics) var += (m - mean) * (m - mean);
  result.avg_metric = mean;
  result.std_metric = k > 1 ? std::sqrt(var / static_cast<double>(k - 1)) : 0.0;

  Matrix ens = ensemble_logits(logits);
  if (ctx.binary) {
    std::vector<double> scores(ens.rows());
    for (std::size_t s = 0; s < scores.size(); ++s)
      scores[s] = sigmoid(ens(s, 0));
    result.ensembled_auc = auc_from_scores(scores, test_labels);
    RocCurve curve = roc(scores, test_labels);
    char key_buf[16];
    for (double level : kBinaryTprLevels) {
      std::snprintf(key_buf, sizeof(key_buf), "%.2f", level);
      result.fpr_at_tpr[key_buf] = fpr_at_tpr(curve, level);
    }
  } else {
    result.ensembled_accuracy = accuracy(ens, test_labels);
    int critical = *test.critical_classes.begin();
    char key_buf[16];
    for (double level : kMulticlassTprLevels) {
      std::snprintf(key_buf, sizeof(key_buf), "%.2f", level);
      result.error_at_tpr[key_buf] =
          multiclass_error_at_tpr(ens, test_labels, critical, level).error;
    }
  }
  return result;
}

}  // namespace auctk
