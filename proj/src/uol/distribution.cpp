#include "uol/distribution.hpp"

#include <cmath>

#include "uol/error.hpp"

namespace uol {

SampleNoise SampleNoise::draw(int t, int dim, Rng& rng) {
  if (t < 1) throw InvalidArgument("SampleNoise: need at least one draw");
  if (dim < 1) throw InvalidArgument("SampleNoise: dimension must be positive");
  SampleNoise noise;
  noise.eps1.resize(static_cast<std::size_t>(t));
  noise.eps2.resize(static_cast<std::size_t>(t));
  for (int k = 0; k < t; ++k) {
    noise.eps1[k].resize(static_cast<std::size_t>(dim));
    for (double& e : noise.eps1[k]) e = rng.normal();
    noise.eps2[k].resize(static_cast<std::size_t>(dim));
    for (double& e : noise.eps2[k]) e = rng.normal();
  }
  return noise;
}

double frobenius_dispersion(std::span<const double> var_diag) {
  if (var_diag.empty()) throw InvalidArgument("frobenius_dispersion: empty diagonal");
  double sum = 0.0;
  for (double v : var_diag) {
    if (!(v > 0.0)) throw InvalidArgument("frobenius_dispersion: non-positive entry");
    sum += std::abs(v);
  }
  return std::sqrt(sum);
}

double wasserstein_sq(const GaussianEmbedding& z1, const GaussianEmbedding& z2) {
  if (z1.mu.size() != z2.mu.size() || z1.var_diag.size() != z2.var_diag.size() ||
      z1.mu.size() != z1.var_diag.size())
    throw InvalidArgument("wasserstein_sq: dimension mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < z1.mu.size(); ++j) {
    const double dm = z1.mu[j] - z2.mu[j];
    const double dv = z1.var_diag[j] - z2.var_diag[j];
    acc += dm * dm + dv * dv;
  }
  return acc;
}

Vec reparam_sample(const GaussianEmbedding& z, std::span<const double> eps) {
  if (eps.size() != z.mu.size()) throw InvalidArgument("reparam_sample: dimension mismatch");
  Vec out(z.mu.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = z.mu[j] + std::sqrt(z.var_diag[j]) * eps[j];
  }
  return out;
}

OrderLogits compare_distributions(const Mlp& comparator, const GaussianEmbedding& z1,
                                  const GaussianEmbedding& z2, const SampleNoise& noise) {
  const int t = noise.draws();
  if (t < 1) throw InvalidArgument("compare_distributions: need at least one draw");
  OrderLogits mean;
  for (int k = 0; k < t; ++k) {
    const Vec s1 = reparam_sample(z1, noise.eps1[k]);
    const Vec s2 = reparam_sample(z2, noise.eps2[k]);
    const OrderLogits y = compare_points(comparator, s1, s2);
    for (int c = 0; c < 3; ++c) mean[c] += y[c];
  }
  for (int c = 0; c < 3; ++c) mean[c] /= t;
  return mean;
}

}  // namespace uol
