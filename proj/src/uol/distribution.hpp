#pragma once

#include <span>
#include <vector>

#include "uol/networks.hpp"
#include "uol/rng.hpp"

namespace uol {

// Frozen standard-normal draws for one Monte-Carlo comparison: independent
// noise per draw and per side. Storing the noise keeps the comparison graph
// deterministic, which is what makes finite-difference checks possible.
struct SampleNoise {
  std::vector<Vec> eps1;  // T vectors of length D
  std::vector<Vec> eps2;

  int draws() const { return static_cast<int>(eps1.size()); }
  static SampleNoise draw(int t, int dim, Rng& rng);
};

// sqrt of the summed absolute diagonal entries.
double frobenius_dispersion(std::span<const double> var_diag);

// Sum over dimensions of squared mean gap plus squared gap of the diagonal
// covariance entries (the variances themselves, not their square roots).
double wasserstein_sq(const GaussianEmbedding& z1, const GaussianEmbedding& z2);

// mu + sqrt(var_diag) * eps elementwise.
Vec reparam_sample(const GaussianEmbedding& z, std::span<const double> eps);

// Mean of T comparator logits over reparameterized draws; softmax, if any,
// is applied by the caller after averaging.
OrderLogits compare_distributions(const Mlp& comparator, const GaussianEmbedding& z1,
                                  const GaussianEmbedding& z2, const SampleNoise& noise);

}  // namespace uol
