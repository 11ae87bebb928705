#pragma once

#include <span>
#include <vector>

#include "uol/distribution.hpp"
#include "uol/networks.hpp"
#include "uol/ordering.hpp"
#include "uol/rng.hpp"
#include "uol/synth_data.hpp"

namespace uol {

struct ReferenceEntry {
  GaussianEmbedding embedding;
  double score = 0.0;
};

struct ReferenceSet {
  std::vector<ReferenceEntry> entries;
  double bin_width = 0.1;
  std::vector<int> bin_counts;  // selected count per bin; empty bins stay 0
};

struct BTConfig {
  double delta = 0.8;
  double k = 4.0;
  double search_lo = 1.0;
  double search_hi = 5.0;
  double search_tol = 1e-4;
};

// One pairwise verdict against a reference of known score.
struct ComparisonRecord {
  double reference_score = 0.0;
  OrderRelation relation = OrderRelation::approx;
};

// Caps each score bin at `cap` entries chosen uniformly at random; bins with
// fewer instances contribute everything they have.
ReferenceSet build_reference_set(std::span<const RatedInstance> instances,
                                 std::span<const GaussianEmbedding> embeddings,
                                 int cap, double width, Rng& rng);

// Cumulative-logit order model. The thresholds are -delta, +delta, +inf on
// the scale k*(test - reference), oriented so P(greater) grows as the test
// score climbs past the reference.
double bt_prob(OrderRelation relation, double s_ref, double s_t, const BTConfig& cfg);

double bt_log_likelihood(std::span<const ComparisonRecord> records, double s_t,
                         const BTConfig& cfg);

// Maximum-likelihood score for a set of verdicts, found by golden-section
// search over [search_lo, search_hi]. The log likelihood is unimodal in s_t
// for this model, so the search converges to the global maximum.
double estimate_from_records(std::span<const ComparisonRecord> records,
                             const BTConfig& cfg);

enum class CompareMode {
  point,    // one verdict per reference from the mean embeddings
  sampled,  // one verdict per Monte-Carlo draw, both embeddings resampled
};

// Full estimation pipeline: compare the test embedding against every
// reference, collect the verdicts, and maximize the Bradley-Terry likelihood.
double estimate_score(const Mlp& comparator, const GaussianEmbedding& test,
                      const ReferenceSet& refs, const BTConfig& cfg, CompareMode mode,
                      int draws_per_reference, Rng& rng);

}  // namespace uol
