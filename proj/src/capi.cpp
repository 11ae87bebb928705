#include "uol/uol.h"

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "uol/checkpoint_io.hpp"
#include "uol/dataset_io.hpp"
#include "uol/error.hpp"
#include "uol/ordering.hpp"
#include "uol/synth_data.hpp"
#include "uol/trainer.hpp"

struct uol_dataset {
  std::vector<uol::RatedInstance> instances;
};

struct uol_model {
  uol::ModelCheckpoint checkpoint;
};

namespace {

thread_local std::string g_last_error;

uol_status fail(uol_status code, const char* what) {
  g_last_error = what;
  return code;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
uol_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return UOL_OK;
  } catch (const uol::InvalidArgument& e) {
    return fail(UOL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const uol::IoError& e) {
    return fail(UOL_ERR_IO, e.what());
  } catch (const uol::ParseError& e) {
    return fail(UOL_ERR_PARSE, e.what());
  } catch (const uol::ValidationError& e) {
    return fail(UOL_ERR_VALIDATION, e.what());
  } catch (const uol::ContractViolation& e) {
    return fail(UOL_ERR_CONTRACT, e.what());
  } catch (const uol::UnsupportedVersion& e) {
    return fail(UOL_ERR_UNSUPPORTED_VERSION, e.what());
  } catch (const std::exception& e) {
    return fail(UOL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UOL_ERR_INTERNAL, "unknown error");
  }
}

uol_status require(bool ok, const char* what) {
  return ok ? UOL_OK : fail(UOL_ERR_INVALID_ARGUMENT, what);
}

uol::EvalConfig to_eval_config(const uol_eval_config& cfg) {
  uol::EvalConfig out;
  out.target = cfg.target_true_score ? uol::EvalTarget::true_score
                                     : uol::EvalTarget::mean_score;
  out.bt.delta = cfg.bt_delta;
  out.bt.k = cfg.bt_k;
  out.bt.search_tol = cfg.search_tol;
  out.ref_cap = cfg.ref_cap;
  out.bin_width = cfg.bin_width;
  out.estimate_draws = cfg.estimate_draws;
  out.seed = cfg.seed;
  return out;
}

}  // namespace

extern "C" {

const char* uol_last_error(void) { return g_last_error.c_str(); }

const char* uol_version(void) { return "1.0.0"; }

void uol_gen_config_init(uol_gen_config* cfg) {
  if (!cfg) return;
  uol::SyntheticConfig d;
  cfg->n = d.n;
  cfg->feature_dim = d.feature_dim;
  cfg->rater_count = d.rater_count;
  cfg->dispersion_lo = d.dispersion_lo;
  cfg->dispersion_hi = d.dispersion_hi;
  cfg->score_distribution =
      d.score_distribution == uol::ScoreDistribution::uniform ? UOL_SCORE_UNIFORM
                                                              : UOL_SCORE_BETA;
  cfg->beta_a = d.beta_a;
  cfg->beta_b = d.beta_b;
  cfg->feature_noise = d.feature_noise;
  cfg->seed = d.seed;
}

uol_status uol_dataset_generate(const uol_gen_config* cfg, uol_dataset** out) {
  if (uol_status s = require(cfg && out, "null argument")) return s;
  return guarded([&] {
    uol::SyntheticConfig c;
    c.n = static_cast<int>(cfg->n);
    c.feature_dim = cfg->feature_dim;
    c.rater_count = cfg->rater_count;
    c.dispersion_lo = cfg->dispersion_lo;
    c.dispersion_hi = cfg->dispersion_hi;
    switch (cfg->score_distribution) {
      case UOL_SCORE_UNIFORM: c.score_distribution = uol::ScoreDistribution::uniform; break;
      case UOL_SCORE_BETA: c.score_distribution = uol::ScoreDistribution::beta; break;
      default: throw uol::InvalidArgument("unknown score distribution");
    }
    c.beta_a = cfg->beta_a;
    c.beta_b = cfg->beta_b;
    c.feature_noise = cfg->feature_noise;
    c.seed = cfg->seed;
    *out = new uol_dataset{uol::generate_dataset(c)};
  });
}

uol_status uol_dataset_load(const char* path, uol_dataset** out) {
  if (uol_status s = require(path && out, "null argument")) return s;
  return guarded([&] { *out = new uol_dataset{uol::load_dataset(path)}; });
}

uol_status uol_dataset_save(const uol_dataset* ds, const char* path) {
  if (uol_status s = require(ds && path, "null argument")) return s;
  return guarded([&] { uol::save_dataset(path, ds->instances); });
}

uol_status uol_dataset_shift(const uol_dataset* ds, double gamma, uol_dataset** out) {
  if (uol_status s = require(ds && out, "null argument")) return s;
  return guarded([&] {
    *out = new uol_dataset{uol::apply_label_shift(ds->instances, gamma)};
  });
}

uol_status uol_dataset_slice(const uol_dataset* ds, int64_t start, int64_t count,
                             uol_dataset** out) {
  if (uol_status s = require(ds && out, "null argument")) return s;
  return guarded([&] {
    const auto n = static_cast<int64_t>(ds->instances.size());
    if (start < 0 || count < 0 || start + count > n)
      throw uol::InvalidArgument("slice out of range");
    *out = new uol_dataset{std::vector<uol::RatedInstance>(
        ds->instances.begin() + start, ds->instances.begin() + start + count)};
  });
}

int64_t uol_dataset_size(const uol_dataset* ds) {
  return ds ? static_cast<int64_t>(ds->instances.size()) : 0;
}

void uol_dataset_free(uol_dataset* ds) { delete ds; }

void uol_train_config_init(uol_train_config* cfg) {
  if (!cfg) return;
  uol::TrainConfig d;
  cfg->mode = UOL_MODE_UOL;
  cfg->theta = d.theta;
  cfg->tau = d.tau;
  cfg->alpha = d.alpha;
  cfg->beta = d.beta;
  cfg->mc_samples = d.mc_samples;
  cfg->batch_size = d.batch_size;
  cfg->epochs = d.epochs;
  cfg->lr_max = d.lr_max;
  cfg->lr_min = d.lr_min;
  cfg->pair_cap = d.pair_cap;
  cfg->hidden = d.hidden;
  cfg->embed_dim = d.embed_dim;
  cfg->normalized_kl = d.normalized_kl ? 1 : 0;
  cfg->seed = d.seed;
}

uol_status uol_train(const uol_dataset* ds, const uol_train_config* cfg,
                     const char* loss_csv_path, uol_model** out) {
  if (uol_status s = require(ds && cfg && out, "null argument")) return s;
  return guarded([&] {
    uol::TrainConfig c;
    switch (cfg->mode) {
      case UOL_MODE_REGRESSION: c.mode = uol::TrainMode::regression; break;
      case UOL_MODE_ORDER_POINT: c.mode = uol::TrainMode::order_point; break;
      case UOL_MODE_UOL: c.mode = uol::TrainMode::uol; break;
      default: throw uol::InvalidArgument("unknown train mode");
    }
    c.theta = cfg->theta;
    c.tau = cfg->tau;
    c.alpha = cfg->alpha;
    c.beta = cfg->beta;
    c.mc_samples = cfg->mc_samples;
    c.batch_size = cfg->batch_size;
    c.epochs = cfg->epochs;
    c.lr_max = cfg->lr_max;
    c.lr_min = cfg->lr_min;
    c.pair_cap = cfg->pair_cap;
    c.hidden = cfg->hidden;
    c.embed_dim = cfg->embed_dim;
    c.normalized_kl = cfg->normalized_kl != 0;
    c.seed = cfg->seed;

    uol::TrainResult result = uol::train(ds->instances, c);
    if (loss_csv_path) uol::save_loss_trace(loss_csv_path, result.trace);
    *out = new uol_model{std::move(result.checkpoint)};
  });
}

uol_status uol_model_save(const uol_model* model, const char* path) {
  if (uol_status s = require(model && path, "null argument")) return s;
  return guarded([&] { uol::save_checkpoint(path, model->checkpoint); });
}

uol_status uol_model_load(const char* path, uol_model** out) {
  if (uol_status s = require(path && out, "null argument")) return s;
  return guarded([&] { *out = new uol_model{uol::load_checkpoint(path)}; });
}

void uol_model_free(uol_model* model) { delete model; }

void uol_eval_config_init(uol_eval_config* cfg) {
  if (!cfg) return;
  uol::EvalConfig d;
  cfg->target_true_score = 0;
  cfg->bt_delta = d.bt.delta;
  cfg->bt_k = d.bt.k;
  cfg->search_tol = d.bt.search_tol;
  cfg->ref_cap = d.ref_cap;
  cfg->bin_width = d.bin_width;
  cfg->estimate_draws = d.estimate_draws;
  cfg->seed = d.seed;
}

uol_status uol_evaluate(const uol_model* model, const uol_dataset* eval,
                        const uol_dataset* reference, const uol_eval_config* cfg,
                        uol_metrics* out) {
  if (uol_status s = require(model && eval && cfg && out, "null argument")) return s;
  return guarded([&] {
    static const std::vector<uol::RatedInstance> kEmpty;
    const auto& ref = reference ? reference->instances : kEmpty;
    const uol::MetricsReport rep =
        uol::evaluate(model->checkpoint, eval->instances, ref, to_eval_config(*cfg));
    out->mae = rep.mae;
    out->rmse = rep.rmse;
    out->pc = rep.pc;
    out->pairwise_acc = rep.pairwise_acc;
  });
}

uol_status uol_predict(const uol_model* model, const uol_dataset* eval,
                       const uol_dataset* reference, const uol_eval_config* cfg,
                       double* out_scores) {
  if (uol_status s = require(model && eval && cfg && out_scores, "null argument")) return s;
  return guarded([&] {
    static const std::vector<uol::RatedInstance> kEmpty;
    const auto& ref = reference ? reference->instances : kEmpty;
    const std::vector<double> preds =
        uol::predict_scores(model->checkpoint, eval->instances, ref, to_eval_config(*cfg));
    std::memcpy(out_scores, preds.data(), preds.size() * sizeof(double));
  });
}

uol_status uol_pair_audit_run(const uol_dataset* ds, int batch_size, int pair_cap,
                              double theta, uint64_t seed, uol_pair_audit* out) {
  if (uol_status s = require(ds && out, "null argument")) return s;
  return guarded([&] {
    if (batch_size < 2) throw uol::InvalidArgument("pair audit: batch_size must be >= 2");
    const auto& instances = ds->instances;
    if (instances.size() < static_cast<std::size_t>(batch_size))
      throw uol::InvalidArgument("pair audit: dataset smaller than one batch");

    uol::Rng rng(seed);
    std::vector<std::size_t> perm(instances.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);

    uol_pair_audit rep{};
    std::vector<double> scores(static_cast<std::size_t>(batch_size));
    std::vector<int> partner_count(static_cast<std::size_t>(batch_size));
    const std::size_t batches = instances.size() / static_cast<std::size_t>(batch_size);
    for (std::size_t b = 0; b < batches; ++b) {
      for (std::size_t k = 0; k < scores.size(); ++k) {
        scores[k] = instances[perm[b * scores.size() + k]].mean_score;
      }
      const std::vector<uol::Pair> pairs =
          uol::select_balanced_pairs(scores, pair_cap, theta, rng);
      std::fill(partner_count.begin(), partner_count.end(), 0);
      for (const uol::Pair& p : pairs) {
        ++partner_count[static_cast<std::size_t>(p.i)];
        ++partner_count[static_cast<std::size_t>(p.j)];
        switch (p.relation) {
          case uol::OrderRelation::approx: ++rep.approx; break;
          case uol::OrderRelation::less: ++rep.less; break;
          case uol::OrderRelation::greater: ++rep.greater; break;
        }
      }
      for (int c : partner_count) rep.max_partner_count = std::max(rep.max_partner_count, c);
      rep.pairs += static_cast<int64_t>(pairs.size());
      ++rep.batches;
    }
    rep.approx_fraction =
        rep.pairs > 0 ? static_cast<double>(rep.approx) / static_cast<double>(rep.pairs) : 0.0;
    *out = rep;
  });
}

}  // extern "C"
