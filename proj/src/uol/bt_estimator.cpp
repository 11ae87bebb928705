#include "uol/bt_estimator.hpp"

#include <algorithm>
#include <cmath>

#include "uol/error.hpp"

namespace uol {

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void validate(const BTConfig& cfg) {
  if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta))
    throw InvalidArgument("bt: delta must be finite and > 0");
  if (!(cfg.k > 0.0) || !std::isfinite(cfg.k))
    throw InvalidArgument("bt: k must be finite and > 0");
  if (!(cfg.search_lo < cfg.search_hi))
    throw InvalidArgument("bt: empty search interval");
  if (!(cfg.search_tol > 0.0)) throw InvalidArgument("bt: search tolerance must be > 0");
}

}  // namespace

ReferenceSet build_reference_set(std::span<const RatedInstance> instances,
                                 std::span<const GaussianEmbedding> embeddings,
                                 int cap, double width, Rng& rng) {
  if (instances.empty()) throw InvalidArgument("build_reference_set: empty training set");
  if (instances.size() != embeddings.size())
    throw InvalidArgument("build_reference_set: instances and embeddings differ in length");
  if (cap < 1) throw InvalidArgument("build_reference_set: cap must be >= 1");

  const int bins = bin_count(width);
  std::vector<std::vector<int>> by_bin(static_cast<std::size_t>(bins));
  for (std::size_t i = 0; i < instances.size(); ++i) {
    by_bin[static_cast<std::size_t>(bin_index(instances[i].mean_score, width))].push_back(
        static_cast<int>(i));
  }

  ReferenceSet out;
  out.bin_width = width;
  out.bin_counts.assign(static_cast<std::size_t>(bins), 0);
  for (std::size_t b = 0; b < by_bin.size(); ++b) {
    std::vector<int>& ids = by_bin[b];
    const int take = std::min<int>(static_cast<int>(ids.size()), cap);
    if (take < static_cast<int>(ids.size())) {
      // Partial Fisher-Yates: the first `take` slots end up a uniform sample.
      for (int k = 0; k < take; ++k) {
        const std::size_t pick = k + rng.index(ids.size() - static_cast<std::size_t>(k));
        std::swap(ids[static_cast<std::size_t>(k)], ids[pick]);
      }
    }
    out.bin_counts[b] = take;
    for (int k = 0; k < take; ++k) {
      const int idx = ids[static_cast<std::size_t>(k)];
      out.entries.push_back(
          {embeddings[static_cast<std::size_t>(idx)], instances[static_cast<std::size_t>(idx)].mean_score});
    }
  }
  return out;
}

double bt_prob(OrderRelation relation, double s_ref, double s_t, const BTConfig& cfg) {
  validate(cfg);
  // Cumulative logits over the ordinal less < approx < greater. Note the
  // offset enters negated: a test score far above the reference pushes all
  // cumulative probabilities down, leaving the mass on "greater".
  const double u = cfg.k * (s_t - s_ref);
  const double c0 = logistic(-cfg.delta - u);
  const double c1 = logistic(cfg.delta - u);
  switch (relation) {
    case OrderRelation::less: return c0;
    case OrderRelation::approx: return c1 - c0;
    case OrderRelation::greater: return 1.0 - c1;
  }
  throw InvalidArgument("bt_prob: bad relation");
}

double bt_log_likelihood(std::span<const ComparisonRecord> records, double s_t,
                         const BTConfig& cfg) {
  validate(cfg);
  double sum = 0.0;
  for (const ComparisonRecord& r : records) {
    sum += std::log(bt_prob(r.relation, r.reference_score, s_t, cfg));
  }
  return sum;  // -inf when any record has zero probability
}

double estimate_from_records(std::span<const ComparisonRecord> records,
                             const BTConfig& cfg) {
  validate(cfg);
  if (records.empty()) throw InvalidArgument("estimate_from_records: no records");

  constexpr double kInvPhi = 0.6180339887498948482;
  double a = cfg.search_lo;
  double b = cfg.search_hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = bt_log_likelihood(records, c, cfg);
  double fd = bt_log_likelihood(records, d, cfg);
  while (b - a > cfg.search_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = bt_log_likelihood(records, c, cfg);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = bt_log_likelihood(records, d, cfg);
    }
  }
  return 0.5 * (a + b);
}

double estimate_score(const Mlp& comparator, const GaussianEmbedding& test,
                      const ReferenceSet& refs, const BTConfig& cfg, CompareMode mode,
                      int draws_per_reference, Rng& rng) {
  validate(cfg);
  if (refs.entries.empty()) throw InvalidArgument("estimate_score: empty reference set");
  if (mode == CompareMode::sampled && draws_per_reference < 1)
    throw InvalidArgument("estimate_score: need at least one draw per reference");

  std::vector<ComparisonRecord> records;
  records.reserve(refs.entries.size());
  for (const ReferenceEntry& ref : refs.entries) {
    if (mode == CompareMode::point) {
      const OrderLogits y = compare_points(comparator, test.mu, ref.embedding.mu);
      records.push_back({ref.score, relation_from_logits(y)});
    } else {
      // Every Monte-Carlo draw contributes its own verdict. Near-threshold
      // references then enter the likelihood as graded relation frequencies
      // instead of one winner-take-all relation; collapsing the draws to a
      // single averaged verdict measurably degrades score recovery.
      const SampleNoise noise = SampleNoise::draw(draws_per_reference, test.dim(), rng);
      for (int t = 0; t < draws_per_reference; ++t) {
        const Vec s1 = reparam_sample(test, noise.eps1[static_cast<std::size_t>(t)]);
        const Vec s2 = reparam_sample(ref.embedding, noise.eps2[static_cast<std::size_t>(t)]);
        const OrderLogits y = compare_points(comparator, s1, s2);
        records.push_back({ref.score, relation_from_logits(y)});
      }
    }
  }
  return estimate_from_records(records, cfg);
}

}  // namespace uol
