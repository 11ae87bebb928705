#pragma once

#include <span>

#include "uol/distribution.hpp"
#include "uol/networks.hpp"
#include "uol/ordering.hpp"

namespace uol {

struct LossWeights {
  double alpha = 1e-4;  // hinge weight
  double beta = 1e-3;   // dispersion weight
  double tau = 1.0;     // hinge margin
};

// Cross entropy of the softmax over order logits against the target relation.
double ce_loss(const OrderLogits& logits, OrderRelation target);

struct HingeResult {
  double value = 0.0;
  bool empty = false;  // no triplets supplied; value forced to 0
};

// Mean over triplets of max(0, d(z_l,z_m) + tau - d(z_l,z_n)) with d the
// square root of wasserstein_sq. Triplets must index into `embeddings` and
// satisfy the nearer/farther ordering documented on Triplet.
HingeResult hinge_ordinal_loss(std::span<const GaussianEmbedding> embeddings,
                               std::span<const Triplet> triplets, double tau);

// Dispersion matching term, written exactly as the unnormalized sum
// sum_m eta_m * (log(eta_m + 1e-8) - log(pred_m)). Can be negative.
double kl_dispersion_loss(std::span<const double> predicted,
                          std::span<const double> eta);

// Ablation variant: both sides normalized to probability vectors first.
double kl_dispersion_loss_normalized(std::span<const double> predicted,
                                     std::span<const double> eta);

double total_loss(double ce, double hinge, double kl, const LossWeights& w);

}  // namespace uol
