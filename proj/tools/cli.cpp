#include "cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uol/uol.h"

namespace {

using json = nlohmann::ordered_json;

struct DatasetDeleter {
  void operator()(uol_dataset* ds) const { uol_dataset_free(ds); }
};
struct ModelDeleter {
  void operator()(uol_model* m) const { uol_model_free(m); }
};
using DatasetPtr = std::unique_ptr<uol_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<uol_model, ModelDeleter>;

[[noreturn]] void raise(uol_status status) {
  throw std::runtime_error(std::string(uol_last_error()) + " [status " +
                           std::to_string(static_cast<int>(status)) + "]");
}

void check(uol_status status) {
  if (status != UOL_OK) raise(status);
}

DatasetPtr load_dataset(const std::string& path) {
  uol_dataset* ds = nullptr;
  check(uol_dataset_load(path.c_str(), &ds));
  return DatasetPtr(ds);
}

ModelPtr load_model(const std::string& path) {
  uol_model* m = nullptr;
  check(uol_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

// Applies --skip/--take; take < 0 means "to the end".
DatasetPtr slice(DatasetPtr ds, int64_t skip, int64_t take) {
  const int64_t n = uol_dataset_size(ds.get());
  if (skip == 0 && (take < 0 || take == n)) return ds;
  const int64_t count = take < 0 ? n - skip : take;
  uol_dataset* out = nullptr;
  check(uol_dataset_slice(ds.get(), skip, count, &out));
  return DatasetPtr(out);
}

uint64_t default_seed() {
  if (const char* env = std::getenv("UOL_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

struct GenArgs {
  uol_gen_config cfg;
  std::string score_dist = "uniform";
  std::string out;
};

struct ShiftArgs {
  std::string in;
  std::string out;
  double gamma = 1.0;
};

struct TrainArgs {
  uol_train_config cfg;
  std::string mode = "uol";
  std::string data;
  std::string out;
  std::string loss_csv;
  int64_t skip = 0;
  int64_t take = -1;
};

struct EvalArgs {
  uol_eval_config cfg;
  std::string checkpoint;
  std::string data;
  std::string ref;
  std::string target = "mean";
  int64_t skip = 0;
  int64_t take = -1;
  int64_t ref_skip = 0;
  int64_t ref_take = -1;
};

struct EstimateArgs {
  uol_eval_config cfg;
  std::string checkpoint;
  std::string data;
  std::string ref;
  int64_t index = 0;
  int64_t ref_skip = 0;
  int64_t ref_take = -1;
};

struct AuditArgs {
  std::string data;
  int batch = 32;
  int pair_cap = 4;
  double theta = 0.2;
  uint64_t seed = 0;
};

void add_eval_flags(CLI::App* cmd, uol_eval_config& cfg) {
  cmd->add_option("--delta", cfg.bt_delta, "Bradley-Terry delta");
  cmd->add_option("--k", cfg.bt_k, "Bradley-Terry scale k");
  cmd->add_option("--search-tol", cfg.search_tol, "golden-section tolerance");
  cmd->add_option("--ref-cap", cfg.ref_cap, "max references per score bin");
  cmd->add_option("--bin-width", cfg.bin_width, "reference bin width");
  cmd->add_option("--draws", cfg.estimate_draws, "comparison draws per reference");
  cmd->add_option("--seed", cfg.seed, "random seed");
}

int run_gen(const GenArgs& a) {
  uol_gen_config cfg = a.cfg;
  if (a.score_dist == "uniform") {
    cfg.score_distribution = UOL_SCORE_UNIFORM;
  } else if (a.score_dist == "beta") {
    cfg.score_distribution = UOL_SCORE_BETA;
  } else {
    throw std::runtime_error("unknown score distribution: " + a.score_dist);
  }
  uol_dataset* ds = nullptr;
  check(uol_dataset_generate(&cfg, &ds));
  DatasetPtr owner(ds);
  check(uol_dataset_save(ds, a.out.c_str()));
  std::cerr << "wrote " << uol_dataset_size(ds) << " instances to " << a.out << "\n";
  return 0;
}

int run_shift(const ShiftArgs& a) {
  DatasetPtr ds = load_dataset(a.in);
  uol_dataset* shifted = nullptr;
  check(uol_dataset_shift(ds.get(), a.gamma, &shifted));
  DatasetPtr owner(shifted);
  check(uol_dataset_save(shifted, a.out.c_str()));
  std::cerr << "wrote " << uol_dataset_size(shifted) << " shifted instances to " << a.out
            << "\n";
  return 0;
}

int run_train(const TrainArgs& a) {
  uol_train_config cfg = a.cfg;
  if (a.mode == "regression") {
    cfg.mode = UOL_MODE_REGRESSION;
  } else if (a.mode == "order_point") {
    cfg.mode = UOL_MODE_ORDER_POINT;
  } else if (a.mode == "uol") {
    cfg.mode = UOL_MODE_UOL;
  } else {
    throw std::runtime_error("unknown mode: " + a.mode);
  }
  DatasetPtr ds = slice(load_dataset(a.data), a.skip, a.take);
  uol_model* model = nullptr;
  check(uol_train(ds.get(), &cfg, a.loss_csv.empty() ? nullptr : a.loss_csv.c_str(),
                  &model));
  ModelPtr owner(model);
  check(uol_model_save(model, a.out.c_str()));
  std::cerr << "trained " << a.mode << " model on " << uol_dataset_size(ds.get())
            << " instances, checkpoint " << a.out << "\n";
  return 0;
}

int run_eval(const EvalArgs& a) {
  uol_eval_config cfg = a.cfg;
  if (a.target == "true") {
    cfg.target_true_score = 1;
  } else if (a.target != "mean") {
    throw std::runtime_error("unknown target: " + a.target);
  }
  ModelPtr model = load_model(a.checkpoint);
  DatasetPtr data = slice(load_dataset(a.data), a.skip, a.take);
  DatasetPtr ref;
  if (!a.ref.empty()) ref = slice(load_dataset(a.ref), a.ref_skip, a.ref_take);

  uol_metrics metrics{};
  check(uol_evaluate(model.get(), data.get(), ref.get(), &cfg, &metrics));

  json report{{"mae", metrics.mae},
              {"rmse", metrics.rmse},
              {"pc", metrics.pc},
              {"pairwise_acc", metrics.pairwise_acc}};
  std::cout << report.dump() << "\n";
  std::cerr << "metric          value\n"
            << "mae             " << metrics.mae << "\n"
            << "rmse            " << metrics.rmse << "\n"
            << "pc              " << metrics.pc << "\n"
            << "pairwise_acc    " << metrics.pairwise_acc << "\n";
  return 0;
}

int run_estimate(const EstimateArgs& a) {
  ModelPtr model = load_model(a.checkpoint);
  DatasetPtr data = load_dataset(a.data);
  const int64_t n = uol_dataset_size(data.get());
  if (a.index < 0 || a.index >= n)
    throw std::runtime_error("--index out of range (dataset has " + std::to_string(n) +
                             " instances)");
  uol_dataset* one = nullptr;
  check(uol_dataset_slice(data.get(), a.index, 1, &one));
  DatasetPtr owner(one);
  DatasetPtr ref;
  if (!a.ref.empty()) ref = slice(load_dataset(a.ref), a.ref_skip, a.ref_take);

  double score = 0.0;
  check(uol_predict(model.get(), one, ref.get(), &a.cfg, &score));
  json report{{"score", score}};
  std::cout << report.dump() << "\n";
  return 0;
}

int run_audit(const AuditArgs& a) {
  DatasetPtr ds = load_dataset(a.data);
  uol_pair_audit rep{};
  check(uol_pair_audit_run(ds.get(), a.batch, a.pair_cap, a.theta, a.seed, &rep));
  json report{{"batches", rep.batches},
              {"pairs", rep.pairs},
              {"approx", rep.approx},
              {"less", rep.less},
              {"greater", rep.greater},
              {"approx_fraction", rep.approx_fraction},
              {"max_partner_count", rep.max_partner_count}};
  std::cout << report.dump() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"uncertainty-oriented order learning toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  uol_gen_config_init(&gen.cfg);
  gen.cfg.seed = default_seed();
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic rated dataset");
  gen_cmd->add_option("--n", gen.cfg.n, "instance count");
  gen_cmd->add_option("--feature-dim", gen.cfg.feature_dim, "feature dimensionality");
  gen_cmd->add_option("--raters", gen.cfg.rater_count, "ratings per instance");
  gen_cmd->add_option("--dispersion-lo", gen.cfg.dispersion_lo, "min rater dispersion");
  gen_cmd->add_option("--dispersion-hi", gen.cfg.dispersion_hi, "max rater dispersion");
  gen_cmd->add_option("--score-dist", gen.score_dist, "score distribution: uniform|beta");
  gen_cmd->add_option("--beta-a", gen.cfg.beta_a, "beta shape a");
  gen_cmd->add_option("--beta-b", gen.cfg.beta_b, "beta shape b");
  gen_cmd->add_option("--feature-noise", gen.cfg.feature_noise, "feature noise stddev");
  gen_cmd->add_option("--seed", gen.cfg.seed, "random seed");
  gen_cmd->add_option("--out", gen.out, "output JSONL path")->required();

  ShiftArgs shift;
  uint64_t shift_seed = default_seed();  // accepted for interface uniformity
  CLI::App* shift_cmd = app.add_subcommand("shift", "apply a monotone label shift");
  shift_cmd->add_option("--in", shift.in, "input JSONL path")->required();
  shift_cmd->add_option("--gamma", shift.gamma, "shift exponent")->required();
  shift_cmd->add_option("--out", shift.out, "output JSONL path")->required();
  shift_cmd->add_option("--seed", shift_seed, "random seed (unused; shift is deterministic)");

  TrainArgs train;
  uol_train_config_init(&train.cfg);
  train.cfg.seed = default_seed();
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--data", train.data, "training JSONL path")->required();
  train_cmd->add_option("--mode", train.mode, "regression|order_point|uol");
  train_cmd->add_option("--theta", train.cfg.theta, "order threshold");
  train_cmd->add_option("--tau", train.cfg.tau, "hinge margin");
  train_cmd->add_option("--alpha", train.cfg.alpha, "hinge weight");
  train_cmd->add_option("--beta", train.cfg.beta, "dispersion weight");
  train_cmd->add_option("--mc-samples", train.cfg.mc_samples, "comparison draws per pair");
  train_cmd->add_option("--batch", train.cfg.batch_size, "batch size");
  train_cmd->add_option("--epochs", train.cfg.epochs, "epoch count");
  train_cmd->add_option("--lr-max", train.cfg.lr_max, "initial learning rate");
  train_cmd->add_option("--lr-min", train.cfg.lr_min, "final learning rate");
  train_cmd->add_option("--pair-cap", train.cfg.pair_cap, "pairs per instance");
  train_cmd->add_option("--hidden", train.cfg.hidden, "hidden width");
  train_cmd->add_option("--embed-dim", train.cfg.embed_dim, "embedding dimensionality");
  train_cmd->add_flag("--normalized-kl",
                      [&train](std::int64_t) { train.cfg.normalized_kl = 1; },
                      "normalize the dispersion loss (ablation)");
  train_cmd->add_option("--seed", train.cfg.seed, "random seed");
  train_cmd->add_option("--skip", train.skip, "skip first instances");
  train_cmd->add_option("--take", train.take, "use only this many instances");
  train_cmd->add_option("--out", train.out, "checkpoint path")->required();
  train_cmd->add_option("--loss-csv", train.loss_csv, "per-epoch loss trace CSV path");

  EvalArgs eval;
  uol_eval_config_init(&eval.cfg);
  eval.cfg.seed = default_seed();
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "checkpoint path")->required();
  eval_cmd->add_option("--data", eval.data, "evaluation JSONL path")->required();
  eval_cmd->add_option("--ref", eval.ref, "reference JSONL path (training split)");
  eval_cmd->add_option("--target", eval.target, "metric target: mean|true");
  eval_cmd->add_option("--skip", eval.skip, "skip first instances");
  eval_cmd->add_option("--take", eval.take, "use only this many instances");
  eval_cmd->add_option("--ref-skip", eval.ref_skip, "skip first reference instances");
  eval_cmd->add_option("--ref-take", eval.ref_take, "use only this many reference instances");
  add_eval_flags(eval_cmd, eval.cfg);

  EstimateArgs est;
  uol_eval_config_init(&est.cfg);
  est.cfg.seed = default_seed();
  CLI::App* est_cmd = app.add_subcommand("estimate", "score a single instance");
  est_cmd->add_option("--checkpoint", est.checkpoint, "checkpoint path")->required();
  est_cmd->add_option("--data", est.data, "JSONL path holding the instance")->required();
  est_cmd->add_option("--index", est.index, "instance index")->required();
  est_cmd->add_option("--ref", est.ref, "reference JSONL path");
  est_cmd->add_option("--ref-skip", est.ref_skip, "skip first reference instances");
  est_cmd->add_option("--ref-take", est.ref_take, "use only this many reference instances");
  add_eval_flags(est_cmd, est.cfg);

  AuditArgs audit;
  audit.seed = default_seed();
  CLI::App* audit_cmd =
      app.add_subcommand("pair-audit", "report balanced-pair selection statistics");
  audit_cmd->add_option("--data", audit.data, "JSONL path")->required();
  audit_cmd->add_option("--batch", audit.batch, "batch size");
  audit_cmd->add_option("--pair-cap", audit.pair_cap, "pairs per instance");
  audit_cmd->add_option("--theta", audit.theta, "order threshold");
  audit_cmd->add_option("--seed", audit.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (shift_cmd->parsed()) return run_shift(shift);
    if (train_cmd->parsed()) return run_train(train);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (est_cmd->parsed()) return run_estimate(est);
    if (audit_cmd->parsed()) return run_audit(audit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
