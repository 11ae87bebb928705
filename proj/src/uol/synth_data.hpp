#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uol/linalg.hpp"
#include "uol/rng.hpp"

namespace uol {

// One synthetic "image": a feature vector plus the ratings it received.
struct RatedInstance {
  std::int64_t id = 0;
  Vec features;
  double mean_score = 0.0;        // mean rating, in [1, 5]
  double rating_variance = 0.0;   // population variance of the ratings
  std::optional<double> true_score;  // latent score the raters perceived
  std::vector<double> ratings;    // raw ratings; empty when not retained

  bool has_ratings() const { return !ratings.empty(); }
};

enum class ScoreDistribution { uniform, beta };

struct SyntheticConfig {
  int n = 2000;
  int feature_dim = 16;
  int rater_count = 10;
  double dispersion_lo = 0.2;
  double dispersion_hi = 1.0;
  ScoreDistribution score_distribution = ScoreDistribution::uniform;
  double beta_a = 4.0;
  double beta_b = 4.0;
  double feature_noise = 0.05;
  std::uint64_t seed = 0;
};

struct RaterSummary {
  std::vector<double> ratings;
  double mean_score = 0.0;
  double rating_variance = 0.0;
};

// Draws `k` ratings from Normal(true_score, dispersion^2), clipped to [1, 5].
// Variance is the population variance (divide by k).
RaterSummary simulate_raters(double true_score, double dispersion, int k, Rng& rng);

// Samples latent scores from cfg.score_distribution, derives features through
// a fixed smooth basis mixed by a seeded random matrix, then simulates raters
// per instance with dispersion drawn uniformly from the configured range.
std::vector<RatedInstance> generate_dataset(const SyntheticConfig& cfg);

// Monotone rescoring s -> 1 + 4*((s-1)/4)^gamma applied to mean_score and
// true_score. Features stay untouched; raw ratings are dropped because no
// per-rater sample mean reproduces the remapped score.
std::vector<RatedInstance> apply_label_shift(std::span<const RatedInstance> instances,
                                             double gamma);

// Half-open score bins of the given width over [1, 5]; score 5 lands in the
// last bin.
int bin_index(double score, double width = 0.1);
int bin_count(double width = 0.1);

}  // namespace uol
