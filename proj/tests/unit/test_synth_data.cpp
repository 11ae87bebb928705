#include <doctest.h>

#include <cmath>
#include <vector>

#include "uol/error.hpp"
#include "uol/rng.hpp"
#include "uol/synth_data.hpp"

using namespace uol;

namespace {

// Moments of Normal(mu, sigma^2) censored (clipped) to [a, b].
struct ClippedMoments {
  double mean;
  double var;
};

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.141592653589793); }
double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

ClippedMoments clipped_normal(double mu, double sigma, double a, double b) {
  const double al = (a - mu) / sigma;
  const double be = (b - mu) / sigma;
  const double pa = Phi(al);
  const double pb = Phi(be);
  const double mid = pb - pa;
  const double mean = a * pa + b * (1.0 - pb) + mu * mid - sigma * (phi(be) - phi(al));
  const double ex2 = a * a * pa + b * b * (1.0 - pb) + (mu * mu + sigma * sigma) * mid +
                     2.0 * mu * sigma * (phi(al) - phi(be)) +
                     sigma * sigma * (al * phi(al) - be * phi(be));
  return {mean, ex2 - mean * mean};
}

}  // namespace

TEST_SUITE("synth_data") {

TEST_CASE("simulate_raters with zero dispersion is exact") {
  Rng rng(1);
  const auto r = simulate_raters(3.0, 0.0, 5, rng);
  REQUIRE(r.ratings.size() == 5);
  for (double x : r.ratings) CHECK(x == 3.0);
  CHECK(r.mean_score == 3.0);
  CHECK(r.rating_variance == 0.0);
}

TEST_CASE("simulate_raters rejects fewer than two raters") {
  Rng rng(1);
  CHECK_THROWS_AS(simulate_raters(3.0, 0.5, 1, rng), InvalidArgument);
  CHECK_THROWS_AS(simulate_raters(3.0, 0.5, 0, rng), InvalidArgument);
  CHECK_NOTHROW(simulate_raters(3.0, 0.5, 2, rng));
}

TEST_CASE("simulate_raters matches the clipped-normal Monte-Carlo window") {
  // 1000 seeds at (3.0, 0.5, 60): mean of mean_score in 3.0 +- 0.02, mean
  // of rating_variance in 0.25 +- 0.03 (population variance shaves the
  // usual (K-1)/K factor off 0.25).
  double mean_sum = 0.0, var_sum = 0.0;
  const int trials = 1000;
  for (int s = 0; s < trials; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    const auto r = simulate_raters(3.0, 0.5, 60, rng);
    mean_sum += r.mean_score;
    var_sum += r.rating_variance;
  }
  CHECK(std::abs(mean_sum / trials - 3.0) < 0.02);
  CHECK(std::abs(var_sum / trials - 0.25) < 0.03);
}

TEST_CASE("clipping pulls the mean inside the boundary") {
  Rng rng(9);
  const auto r = simulate_raters(5.0, 1.0, 60, rng);
  CHECK(r.mean_score < 5.0);
  for (double x : r.ratings) {
    CHECK(x >= 1.0);
    CHECK(x <= 5.0);
  }
}

TEST_CASE("simulate_raters tracks the censored-normal oracle") {
  // Empirical mean and mean variance over 1000 seeds vs the closed-form
  // censored normal, within 3 standard errors (estimated from the sample).
  struct Case {
    double mu, sigma;
  };
  for (const Case c : {Case{3.0, 0.5}, Case{4.8, 1.0}, Case{1.2, 0.8}}) {
    const int trials = 1000, k = 20;
    std::vector<double> means, vars;
    means.reserve(trials);
    vars.reserve(trials);
    for (int s = 0; s < trials; ++s) {
      Rng rng(static_cast<std::uint64_t>(1000 + s));
      const auto r = simulate_raters(c.mu, c.sigma, k, rng);
      means.push_back(r.mean_score);
      vars.push_back(r.rating_variance);
    }
    auto mean_of = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    auto se_of = [&](const std::vector<double>& v) {
      const double m = mean_of(v);
      double s2 = 0.0;
      for (double x : v) s2 += (x - m) * (x - m);
      return std::sqrt(s2 / static_cast<double>(v.size() - 1) /
                       static_cast<double>(v.size()));
    };
    const auto oracle = clipped_normal(c.mu, c.sigma, 1.0, 5.0);
    CHECK(std::abs(mean_of(means) - oracle.mean) < 3.0 * se_of(means));
    const double expected_var = oracle.var * (k - 1) / static_cast<double>(k);
    CHECK(std::abs(mean_of(vars) - expected_var) < 3.0 * se_of(vars));
  }
}

TEST_CASE("generate_dataset shapes, ranges, and determinism") {
  SyntheticConfig cfg;
  cfg.n = 100;
  cfg.feature_dim = 16;
  cfg.seed = 7;
  const auto ds = generate_dataset(cfg);
  REQUIRE(ds.size() == 100);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(ds[i].id == static_cast<std::int64_t>(i));
    CHECK(ds[i].features.size() == 16);
    CHECK(ds[i].mean_score >= 1.0);
    CHECK(ds[i].mean_score <= 5.0);
    REQUIRE(ds[i].true_score.has_value());
    CHECK(*ds[i].true_score >= 1.0);
    CHECK(*ds[i].true_score <= 5.0);
    CHECK(ds[i].ratings.size() == static_cast<std::size_t>(cfg.rater_count));
    CHECK(ds[i].rating_variance >= 0.0);
  }

  const auto again = generate_dataset(cfg);
  REQUIRE(again.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(again[i].features == ds[i].features);
    CHECK(again[i].mean_score == ds[i].mean_score);
    CHECK(again[i].rating_variance == ds[i].rating_variance);
    CHECK(again[i].ratings == ds[i].ratings);
  }

  cfg.seed = 8;
  const auto other = generate_dataset(cfg);
  CHECK(other[0].features != ds[0].features);
}

TEST_CASE("generate_dataset validates its config") {
  SyntheticConfig cfg;
  cfg.n = 0;
  CHECK_THROWS_AS(generate_dataset(cfg), InvalidArgument);
  cfg = SyntheticConfig{};
  cfg.rater_count = 1;
  CHECK_THROWS_AS(generate_dataset(cfg), InvalidArgument);
  cfg = SyntheticConfig{};
  cfg.dispersion_lo = 2.0;
  cfg.dispersion_hi = 1.0;
  CHECK_THROWS_AS(generate_dataset(cfg), InvalidArgument);
  cfg = SyntheticConfig{};
  cfg.feature_noise = -0.1;
  CHECK_THROWS_AS(generate_dataset(cfg), InvalidArgument);
}

TEST_CASE("beta scores pile up in the middle") {
  SyntheticConfig cfg;
  cfg.n = 2000;
  cfg.score_distribution = ScoreDistribution::beta;
  cfg.seed = 13;
  const auto ds = generate_dataset(cfg);
  int low = 0, mid = 0, high = 0;
  for (const auto& inst : ds) {
    const double s = *inst.true_score;
    if (s >= 1.0 && s <= 1.5) ++low;
    if (s >= 2.75 && s <= 3.25) ++mid;
    if (s >= 4.5 && s <= 5.0) ++high;
  }
  CHECK(low < mid);
  CHECK(high < mid);
}

TEST_CASE("label shift: identity, arithmetic, monotonicity") {
  SyntheticConfig cfg;
  cfg.n = 50;
  cfg.seed = 3;
  const auto ds = generate_dataset(cfg);

  const auto same = apply_label_shift(ds, 1.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(same[i].mean_score == doctest::Approx(ds[i].mean_score).epsilon(1e-15));
    CHECK(same[i].features == ds[i].features);
    CHECK_FALSE(same[i].has_ratings());  // ratings no longer match the score
  }

  std::vector<RatedInstance> one(1);
  one[0].mean_score = 3.0;
  one[0].true_score = 3.0;
  const auto shifted = apply_label_shift(one, 2.0);
  CHECK(shifted[0].mean_score == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(*shifted[0].true_score == doctest::Approx(2.0).epsilon(1e-15));

  const auto g2 = apply_label_shift(ds, 2.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = i + 1; j < ds.size(); ++j) {
      const double d0 = ds[i].mean_score - ds[j].mean_score;
      const double d1 = g2[i].mean_score - g2[j].mean_score;
      if (d0 > 0.0) CHECK(d1 > 0.0);
      if (d0 < 0.0) CHECK(d1 < 0.0);
    }
  }

  CHECK_THROWS_AS(apply_label_shift(ds, 0.0), InvalidArgument);
  CHECK_THROWS_AS(apply_label_shift(ds, -1.0), InvalidArgument);
}

TEST_CASE("score bins are half-open with 5.0 folded into the last") {
  CHECK(bin_count(0.1) == 40);
  CHECK(bin_count(0.5) == 8);
  CHECK(bin_count(1.0) == 4);
  CHECK(bin_count(0.3) == 14);  // ceil(4 / 0.3)

  CHECK(bin_index(1.0) == 0);
  CHECK(bin_index(1.05) == 0);
  CHECK(bin_index(1.10) == 1);
  CHECK(bin_index(4.999) == 39);
  CHECK(bin_index(5.0) == 39);
  CHECK(bin_index(5.0, 0.5) == 7);
  CHECK_THROWS_AS(bin_index(0.99), InvalidArgument);
  CHECK_THROWS_AS(bin_index(5.01), InvalidArgument);
}

}  // TEST_SUITE
