#include "uol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "uol/error.hpp"

namespace uol {

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("pearson: size mismatch");
  const std::size_t n = a.size();
  if (n < 2) throw InvalidArgument("pearson: undefined for fewer than 2 points");

  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);

  double saa = 0.0;
  double sbb = 0.0;
  double sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa <= 0.0 || sbb <= 0.0)
    throw InvalidArgument("pearson: undefined for a constant input");
  return sab / std::sqrt(saa * sbb);
}

namespace {

// Average ranks, ties sharing the mean of their positions.
std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  std::vector<double> r(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double mean_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = mean_rank;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("spearman: size mismatch");
  const std::vector<double> ra = ranks(a);
  const std::vector<double> rb = ranks(b);
  return pearson(ra, rb);
}

double pairwise_accuracy(std::span<const double> predictions,
                         std::span<const double> targets) {
  if (predictions.size() != targets.size())
    throw InvalidArgument("pairwise_accuracy: size mismatch");
  long long total = 0;
  long long correct = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i] == targets[j]) continue;
      ++total;
      const bool target_up = targets[i] < targets[j];
      const bool pred_up = predictions[i] < predictions[j];
      if (target_up == pred_up && predictions[i] != predictions[j]) ++correct;
    }
  }
  if (total == 0)
    throw InvalidArgument("pairwise_accuracy: undefined when all targets are equal");
  return static_cast<double>(correct) / static_cast<double>(total);
}

MetricsReport compute_metrics(std::span<const double> predictions,
                              std::span<const double> targets) {
  if (predictions.size() != targets.size())
    throw InvalidArgument("compute_metrics: size mismatch");
  if (predictions.empty()) throw InvalidArgument("compute_metrics: empty input");

  MetricsReport rep;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
  }
  rep.mae = abs_sum / static_cast<double>(predictions.size());
  rep.rmse = std::sqrt(sq_sum / static_cast<double>(predictions.size()));
  rep.pc = pearson(predictions, targets);
  rep.pairwise_acc = pairwise_accuracy(predictions, targets);
  return rep;
}

}  // namespace uol
