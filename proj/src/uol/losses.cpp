#include "uol/losses.hpp"

#include <algorithm>
#include <cmath>

#include "uol/error.hpp"

namespace uol {

namespace {
constexpr double kLogFloor = 1e-8;
}

double ce_loss(const OrderLogits& logits, OrderRelation target) {
  for (double v : logits.v) {
    if (!std::isfinite(v)) throw InvalidArgument("ce_loss: non-finite logit");
  }
  const double m = std::max({logits[0], logits[1], logits[2]});
  double lse = 0.0;
  for (double v : logits.v) lse += std::exp(v - m);
  lse = m + std::log(lse);
  return lse - logits[static_cast<std::size_t>(onehot_index(target))];
}

HingeResult hinge_ordinal_loss(std::span<const GaussianEmbedding> embeddings,
                               std::span<const Triplet> triplets, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("hinge_ordinal_loss: tau must be > 0");
  if (triplets.empty()) return {0.0, true};

  double sum = 0.0;
  for (const Triplet& t : triplets) {
    const auto& zl = embeddings[static_cast<std::size_t>(t.l)];
    const auto& zm = embeddings[static_cast<std::size_t>(t.m)];
    const auto& zn = embeddings[static_cast<std::size_t>(t.n)];
    const double near = std::sqrt(wasserstein_sq(zl, zm));
    const double far = std::sqrt(wasserstein_sq(zl, zn));
    sum += std::max(0.0, near + tau - far);
  }
  return {sum / static_cast<double>(triplets.size()), false};
}

double kl_dispersion_loss(std::span<const double> predicted, std::span<const double> eta) {
  if (predicted.size() != eta.size())
    throw InvalidArgument("kl_dispersion_loss: size mismatch");
  double sum = 0.0;
  for (std::size_t m = 0; m < predicted.size(); ++m) {
    if (!(predicted[m] > 0.0))
      throw InvalidArgument("kl_dispersion_loss: non-positive prediction");
    if (eta[m] < 0.0) throw InvalidArgument("kl_dispersion_loss: negative variance");
    sum += eta[m] * (std::log(eta[m] + kLogFloor) - std::log(predicted[m]));
  }
  return sum;
}

double kl_dispersion_loss_normalized(std::span<const double> predicted,
                                     std::span<const double> eta) {
  if (predicted.size() != eta.size())
    throw InvalidArgument("kl_dispersion_loss: size mismatch");
  double psum = 0.0;
  double esum = 0.0;
  for (std::size_t m = 0; m < predicted.size(); ++m) {
    if (!(predicted[m] > 0.0))
      throw InvalidArgument("kl_dispersion_loss: non-positive prediction");
    if (eta[m] < 0.0) throw InvalidArgument("kl_dispersion_loss: negative variance");
    psum += predicted[m];
    esum += eta[m];
  }
  if (esum <= 0.0) return 0.0;  // degenerate all-zero variances carry no signal
  double sum = 0.0;
  for (std::size_t m = 0; m < predicted.size(); ++m) {
    const double p = eta[m] / esum;
    const double q = predicted[m] / psum;
    sum += p * (std::log(p + kLogFloor) - std::log(q));
  }
  return sum;
}

double total_loss(double ce, double hinge, double kl, const LossWeights& w) {
  if (!std::isfinite(ce) || !std::isfinite(hinge) || !std::isfinite(kl))
    throw InvalidArgument("total_loss: non-finite component");
  return ce + w.alpha * hinge + w.beta * kl;
}

}  // namespace uol
