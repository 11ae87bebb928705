#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uol/bt_estimator.hpp"
#include "uol/distribution.hpp"
#include "uol/losses.hpp"
#include "uol/metrics.hpp"
#include "uol/networks.hpp"
#include "uol/ordering.hpp"
#include "uol/synth_data.hpp"

namespace uol {

enum class TrainMode { regression, order_point, uol };

std::string to_string(TrainMode mode);
TrainMode train_mode_from_string(const std::string& s);

struct TrainConfig {
  TrainMode mode = TrainMode::uol;
  double theta = 0.2;   // order threshold
  double tau = 1.0;     // hinge margin
  double alpha = 1e-4;  // hinge weight
  double beta = 1e-3;   // dispersion weight
  int mc_samples = 5;   // comparison draws per pair during training
  int batch_size = 32;
  int epochs = 50;
  double lr_max = 1e-4;
  double lr_min = 1e-6;
  int pair_cap = 4;  // balanced-pair quota per instance
  int hidden = 64;
  int embed_dim = 16;
  bool normalized_kl = false;  // ablation: normalize the dispersion loss
  std::uint64_t seed = 0;
};

struct ModelCheckpoint {
  int format_version = 1;
  TrainConfig config;
  int feature_dim = 0;
  Mlp encoder;
  Mlp comparator;
  Mlp head;  // scalar regression head on the trunk
};

struct EpochTrace {
  int epoch = 0;
  double lr = 0.0;
  double ce = 0.0;
  double hinge = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

struct TrainResult {
  ModelCheckpoint checkpoint;
  std::vector<EpochTrace> trace;
  int dropped_triplets = 0;  // anchors skipped across all batches
};

// Standard Adam with bias correction on one tensor. `step` is the shared
// optimizer step count, starting at 1 for the first update.
void adam_update(std::span<double> params, std::span<const double> grads, Vec& m, Vec& v,
                 long long step, double lr, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8);

// Cosine annealing from lr_max (epoch 0) to lr_min (last epoch). A one-epoch
// schedule has no room to anneal and returns lr_max.
double cosine_lr(int epoch, int epochs, double lr_max, double lr_min);

struct BatchLossTerms {
  double ce = 0.0;
  double hinge = 0.0;
  double kl = 0.0;
  double total = 0.0;
  int pair_count = 0;
  int triplet_count = 0;
  bool hinge_empty = false;
};

// Loss (and optionally gradients) of one order-learning batch with fixed
// pairs, triplets, and sampling noise. Exposed separately from train() so the
// analytic gradients can be checked against finite differences on a frozen
// graph. `pair_noise` must hold one entry per pair in uol mode and is ignored
// in order_point mode. Gradients of the total loss are accumulated into the
// optional outputs.
BatchLossTerms order_batch_loss(const Mlp& encoder, const Mlp& comparator,
                                std::span<const RatedInstance> batch,
                                std::span<const Pair> pairs,
                                std::span<const Triplet> triplets,
                                std::span<const SampleNoise> pair_noise,
                                const LossWeights& weights, TrainMode mode,
                                bool normalized_kl, MlpGrads* encoder_grads,
                                MlpGrads* comparator_grads);

TrainResult train(std::span<const RatedInstance> dataset, const TrainConfig& cfg);

enum class EvalTarget { mean_score, true_score };

struct EvalConfig {
  EvalTarget target = EvalTarget::mean_score;
  BTConfig bt;
  int ref_cap = 10;
  double bin_width = 0.1;
  int estimate_draws = 10;  // comparison draws per reference in uol mode
  std::uint64_t seed = 0;
};

// Score predictions for every instance: Bradley-Terry estimation against a
// reference set built from `reference` (order modes), or the scalar head
// (regression).
std::vector<double> predict_scores(const ModelCheckpoint& ckpt,
                                   std::span<const RatedInstance> instances,
                                   std::span<const RatedInstance> reference,
                                   const EvalConfig& cfg);

MetricsReport evaluate(const ModelCheckpoint& ckpt, std::span<const RatedInstance> instances,
                       std::span<const RatedInstance> reference, const EvalConfig& cfg);

}  // namespace uol
