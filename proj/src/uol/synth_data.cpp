#include "uol/synth_data.hpp"

#include <algorithm>
#include <cmath>

#include "uol/error.hpp"

namespace uol {

namespace {

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

void validate(const SyntheticConfig& cfg) {
  if (cfg.n < 1) throw InvalidArgument("generate_dataset: n must be >= 1");
  if (cfg.feature_dim < 1) throw InvalidArgument("generate_dataset: feature_dim must be >= 1");
  if (cfg.rater_count < 2) throw InvalidArgument("generate_dataset: rater_count must be >= 2");
  if (cfg.dispersion_lo < 0.0 || cfg.dispersion_hi < cfg.dispersion_lo)
    throw InvalidArgument("generate_dataset: dispersion range must satisfy 0 <= lo <= hi");
  if (cfg.feature_noise < 0.0) throw InvalidArgument("generate_dataset: feature_noise must be >= 0");
  if (cfg.score_distribution == ScoreDistribution::beta && (cfg.beta_a <= 0.0 || cfg.beta_b <= 0.0))
    throw InvalidArgument("generate_dataset: beta parameters must be positive");
}

// Smooth score basis: standardized score, its square, and two phase features.
// Tiled to feature_dim and mixed by a random matrix so every coordinate
// carries score information without being affine in the score.
constexpr int kBasisDim = 4;

void score_basis(double s, double out[kBasisDim]) {
  const double st = (s - 3.0) / 2.0;
  out[0] = st;
  out[1] = st * st;
  out[2] = std::sin(s);
  out[3] = std::cos(s);
}

}  // namespace

RaterSummary simulate_raters(double true_score, double dispersion, int k, Rng& rng) {
  if (k < 2) throw InvalidArgument("simulate_raters: need at least 2 raters");
  if (true_score < 1.0 || true_score > 5.0)
    throw InvalidArgument("simulate_raters: true_score outside [1,5]");
  if (dispersion < 0.0) throw InvalidArgument("simulate_raters: negative dispersion");

  RaterSummary out;
  out.ratings.resize(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (double& r : out.ratings) {
    r = clip(rng.normal(true_score, dispersion), 1.0, 5.0);
    sum += r;
  }
  out.mean_score = sum / k;
  double ss = 0.0;
  for (double r : out.ratings) {
    const double d = r - out.mean_score;
    ss += d * d;
  }
  out.rating_variance = ss / k;
  return out;
}

std::vector<RatedInstance> generate_dataset(const SyntheticConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const int f = cfg.feature_dim;

  // Mixing matrix, entries U(-sqrt(3/F), sqrt(3/F)) so feature magnitudes
  // stay O(1) regardless of F.
  const double bound = std::sqrt(3.0 / f);
  Mat w(f, f);
  for (double& x : w.a) x = rng.uniform(-bound, bound);

  std::vector<RatedInstance> out;
  out.reserve(static_cast<std::size_t>(cfg.n));
  Vec phi(static_cast<std::size_t>(f));
  for (int i = 0; i < cfg.n; ++i) {
    RatedInstance inst;
    inst.id = i;
    const double s = cfg.score_distribution == ScoreDistribution::uniform
                         ? rng.uniform(1.0, 5.0)
                         : 1.0 + 4.0 * rng.beta(cfg.beta_a, cfg.beta_b);
    inst.true_score = s;

    double basis[kBasisDim];
    score_basis(s, basis);
    for (int j = 0; j < f; ++j) phi[j] = basis[j % kBasisDim];

    inst.features.resize(static_cast<std::size_t>(f));
    for (int r = 0; r < f; ++r) {
      double acc = 0.0;
      for (int c = 0; c < f; ++c) acc += w(r, c) * phi[c];
      inst.features[r] = acc + cfg.feature_noise * rng.normal();
    }

    const double dispersion = rng.uniform(cfg.dispersion_lo, cfg.dispersion_hi);
    RaterSummary raters = simulate_raters(s, dispersion, cfg.rater_count, rng);
    inst.ratings = std::move(raters.ratings);
    inst.mean_score = raters.mean_score;
    inst.rating_variance = raters.rating_variance;
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<RatedInstance> apply_label_shift(std::span<const RatedInstance> instances,
                                             double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("apply_label_shift: gamma must be > 0");
  auto remap = [gamma](double s) {
    return clip(1.0 + 4.0 * std::pow((s - 1.0) / 4.0, gamma), 1.0, 5.0);
  };
  std::vector<RatedInstance> out;
  out.reserve(instances.size());
  for (const RatedInstance& inst : instances) {
    RatedInstance shifted = inst;
    shifted.mean_score = remap(inst.mean_score);
    if (inst.true_score) shifted.true_score = remap(*inst.true_score);
    shifted.ratings.clear();
    out.push_back(std::move(shifted));
  }
  return out;
}

int bin_count(double width) {
  if (!(width > 0.0)) throw InvalidArgument("bin_count: width must be > 0");
  return static_cast<int>(std::floor(4.0 / width - 1e-12)) + 1;
}

int bin_index(double score, double width) {
  if (score < 1.0 || score > 5.0) throw InvalidArgument("bin_index: score outside [1,5]");
  const int n = bin_count(width);
  const int idx = static_cast<int>(std::floor((score - 1.0) / width));
  return std::min(idx, n - 1);
}

}  // namespace uol
