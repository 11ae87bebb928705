#pragma once

#include <span>

namespace uol {

struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  double pc = 0.0;            // Pearson correlation
  double pairwise_acc = 0.0;  // order agreement over unequal-target pairs
};

// Pearson correlation. Undefined cases (under two points, zero variance on
// either side) raise instead of returning NaN.
double pearson(std::span<const double> a, std::span<const double> b);

// Spearman rank correlation; average ranks on ties.
double spearman(std::span<const double> a, std::span<const double> b);

// Fraction of index pairs (a, b) with unequal targets whose prediction
// difference has the same sign as the target difference.
double pairwise_accuracy(std::span<const double> predictions,
                         std::span<const double> targets);

MetricsReport compute_metrics(std::span<const double> predictions,
                              std::span<const double> targets);

}  // namespace uol
