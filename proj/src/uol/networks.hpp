#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uol/linalg.hpp"
#include "uol/ordering.hpp"
#include "uol/rng.hpp"

namespace uol {

enum class Activation { relu, identity };

struct LayerSpec {
  int in = 0;
  int out = 0;
  Activation act = Activation::relu;
};

struct LinearLayer {
  Mat w;  // out x in
  Vec b;
  Activation act = Activation::relu;
};

struct Mlp {
  std::vector<LinearLayer> layers;

  int input_dim() const { return layers.empty() ? 0 : layers.front().w.cols; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().w.rows; }
};

// Weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)) drawn row-major layer by layer;
// biases zero.
Mlp init_params(std::span<const LayerSpec> spec, Rng& rng);

std::size_t parameter_count(const Mlp& mlp);

// Post-activation values captured during forward, reused by backward.
struct MlpCache {
  Vec input;
  std::vector<Vec> post;
};

inline constexpr std::size_t kAllLayers = static_cast<std::size_t>(-1);

// Runs the first `layer_count` layers (all by default).
Vec forward(const Mlp& mlp, std::span<const double> x, MlpCache* cache = nullptr,
            std::size_t layer_count = kAllLayers);

struct MlpGrads {
  std::vector<Mat> w;
  std::vector<Vec> b;
};

MlpGrads zeros_like(const Mlp& mlp);

// Reverse pass over the layers covered by the cache. Accumulates parameter
// gradients into `acc` (+=) and returns the gradient w.r.t. the input. The
// cache must come from a forward pass through the same architecture; a shape
// mismatch means it is stale.
Vec backward(const Mlp& mlp, const MlpCache& cache, std::span<const double> dout,
             MlpGrads& acc);

// Encoder: feature trunk (two relu layers) plus one linear head emitting the
// mean in the first D outputs and the log-variance in the last D.
Mlp make_encoder(int feature_dim, int hidden, int embed_dim, Rng& rng);
// Comparator: three fully connected layers over the concatenated pair.
Mlp make_comparator(int embed_dim, int hidden, Rng& rng);
// Scalar head for the plain regression baseline, attached to the trunk.
Mlp make_regression_head(int hidden, Rng& rng);

struct GaussianEmbedding {
  Vec mu;
  Vec var_diag;  // strictly positive

  int dim() const { return static_cast<int>(mu.size()); }
};

// Runs the encoder and exponentiates the log-variance half of the output.
GaussianEmbedding encode(const Mlp& encoder, std::span<const double> features,
                         MlpCache* cache = nullptr);

// Maps (d loss / d mu, d loss / d var) back to the gradient w.r.t. the raw
// encoder output, folding in d var / d logvar = var.
Vec encode_output_grad(const GaussianEmbedding& z, std::span<const double> dmu,
                       std::span<const double> dvar);

OrderLogits compare_points(const Mlp& comparator, std::span<const double> z1,
                           std::span<const double> z2, MlpCache* cache = nullptr);

}  // namespace uol
