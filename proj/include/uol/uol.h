/* C interface to the uncertainty-oriented order learning library.
 *
 * All functions return uol_status; on failure a thread-local message is
 * available through uol_last_error(). Objects returned through out-pointers
 * are owned by the caller and released with the matching *_free function.
 */
#ifndef UOL_H
#define UOL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uol_status {
  UOL_OK = 0,
  UOL_ERR_INVALID_ARGUMENT = 1,
  UOL_ERR_IO = 2,
  UOL_ERR_PARSE = 3,
  UOL_ERR_VALIDATION = 4,
  UOL_ERR_CONTRACT = 5,
  UOL_ERR_UNSUPPORTED_VERSION = 6,
  UOL_ERR_INTERNAL = 7
} uol_status;

/* Message for the most recent failure on this thread; empty string if none. */
const char* uol_last_error(void);

const char* uol_version(void);

/* ---- datasets ------------------------------------------------------- */

typedef struct uol_dataset uol_dataset;

typedef enum uol_score_dist {
  UOL_SCORE_UNIFORM = 0,
  UOL_SCORE_BETA = 1
} uol_score_dist;

typedef struct uol_gen_config {
  int64_t n;
  int feature_dim;
  int rater_count;
  double dispersion_lo;
  double dispersion_hi;
  int score_distribution; /* uol_score_dist */
  double beta_a;
  double beta_b;
  double feature_noise;
  uint64_t seed;
} uol_gen_config;

void uol_gen_config_init(uol_gen_config* cfg);

uol_status uol_dataset_generate(const uol_gen_config* cfg, uol_dataset** out);
uol_status uol_dataset_load(const char* path, uol_dataset** out);
uol_status uol_dataset_save(const uol_dataset* ds, const char* path);
/* Monotone label shift s -> 1 + 4*((s-1)/4)^gamma on mean and true scores. */
uol_status uol_dataset_shift(const uol_dataset* ds, double gamma, uol_dataset** out);
/* Contiguous sub-range [start, start+count). */
uol_status uol_dataset_slice(const uol_dataset* ds, int64_t start, int64_t count,
                             uol_dataset** out);
int64_t uol_dataset_size(const uol_dataset* ds);
void uol_dataset_free(uol_dataset* ds);

/* ---- training ------------------------------------------------------- */

typedef enum uol_train_mode {
  UOL_MODE_REGRESSION = 0,
  UOL_MODE_ORDER_POINT = 1,
  UOL_MODE_UOL = 2
} uol_train_mode;

typedef struct uol_train_config {
  int mode; /* uol_train_mode */
  double theta;
  double tau;
  double alpha;
  double beta;
  int mc_samples;
  int batch_size;
  int epochs;
  double lr_max;
  double lr_min;
  int pair_cap;
  int hidden;
  int embed_dim;
  int normalized_kl; /* boolean */
  uint64_t seed;
} uol_train_config;

void uol_train_config_init(uol_train_config* cfg);

typedef struct uol_model uol_model;

/* Trains on the full dataset. When loss_csv_path is non-NULL the per-epoch
 * loss trace is written there as CSV. */
uol_status uol_train(const uol_dataset* ds, const uol_train_config* cfg,
                     const char* loss_csv_path, uol_model** out);

uol_status uol_model_save(const uol_model* model, const char* path);
uol_status uol_model_load(const char* path, uol_model** out);
void uol_model_free(uol_model* model);

/* ---- evaluation ----------------------------------------------------- */

typedef struct uol_eval_config {
  int target_true_score; /* boolean: metrics against true_score instead of mean_score */
  double bt_delta;
  double bt_k;
  double search_tol;
  int ref_cap;
  double bin_width;
  int estimate_draws;
  uint64_t seed;
} uol_eval_config;

void uol_eval_config_init(uol_eval_config* cfg);

typedef struct uol_metrics {
  double mae;
  double rmse;
  double pc;
  double pairwise_acc;
} uol_metrics;

/* reference supplies the scored instances the estimator compares against;
 * it is ignored in regression mode. */
uol_status uol_evaluate(const uol_model* model, const uol_dataset* eval,
                        const uol_dataset* reference, const uol_eval_config* cfg,
                        uol_metrics* out);

/* out_scores must hold uol_dataset_size(eval) doubles. */
uol_status uol_predict(const uol_model* model, const uol_dataset* eval,
                       const uol_dataset* reference, const uol_eval_config* cfg,
                       double* out_scores);

/* ---- pair-selection audit ------------------------------------------- */

typedef struct uol_pair_audit {
  int64_t batches;
  int64_t pairs;
  int64_t approx;
  int64_t less;
  int64_t greater;
  double approx_fraction;
  int max_partner_count;
} uol_pair_audit;

/* Shuffles the dataset, splits it into full batches, runs balanced pair
 * selection per batch, and aggregates relation counts. */
uol_status uol_pair_audit_run(const uol_dataset* ds, int batch_size, int pair_cap,
                              double theta, uint64_t seed, uol_pair_audit* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* UOL_H */
