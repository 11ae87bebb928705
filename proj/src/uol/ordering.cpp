#include "uol/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uol/error.hpp"

namespace uol {

int onehot_index(OrderRelation r) {
  switch (r) {
    case OrderRelation::approx: return 0;
    case OrderRelation::less: return 1;
    case OrderRelation::greater: return 2;
  }
  throw InvalidArgument("onehot_index: bad relation");
}

int bt_ordinal(OrderRelation r) {
  switch (r) {
    case OrderRelation::less: return 0;
    case OrderRelation::approx: return 1;
    case OrderRelation::greater: return 2;
  }
  throw InvalidArgument("bt_ordinal: bad relation");
}

OrderRelation relation_from_onehot_index(int idx) {
  switch (idx) {
    case 0: return OrderRelation::approx;
    case 1: return OrderRelation::less;
    case 2: return OrderRelation::greater;
  }
  throw InvalidArgument("relation_from_onehot_index: index out of range");
}

OrderRelation relation_from_bt_ordinal(int ordinal) {
  switch (ordinal) {
    case 0: return OrderRelation::less;
    case 1: return OrderRelation::approx;
    case 2: return OrderRelation::greater;
  }
  throw InvalidArgument("relation_from_bt_ordinal: ordinal out of range");
}

OrderRelation relation_from_logits(const OrderLogits& logits) {
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (logits[k] > logits[best]) best = k;
  }
  return relation_from_onehot_index(best);
}

std::string to_string(OrderRelation r) {
  switch (r) {
    case OrderRelation::less: return "less";
    case OrderRelation::approx: return "approx";
    case OrderRelation::greater: return "greater";
  }
  throw InvalidArgument("to_string: bad relation");
}

OrderRelation encode_order(double y_i, double y_j, double theta) {
  if (!std::isfinite(y_i) || !std::isfinite(y_j))
    throw InvalidArgument("encode_order: non-finite score");
  if (!(theta > 0.0)) throw InvalidArgument("encode_order: theta must be > 0");
  const double d = y_i - y_j;
  if (std::abs(d) <= theta) return OrderRelation::approx;
  return d < 0.0 ? OrderRelation::less : OrderRelation::greater;
}

TripletSelection select_hard_triplets(std::span<const double> scores) {
  const int m_count = static_cast<int>(scores.size());
  if (m_count < 3) throw InvalidArgument("select_hard_triplets: need at least 3 scores");

  TripletSelection out;
  out.triplets.reserve(scores.size());
  for (int i = 0; i < m_count; ++i) {
    const int l = i;
    const int m = (i + 1) % m_count;
    const double gap_lm = std::abs(scores[l] - scores[m]);

    int n = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m_count; ++j) {
      if (j == l || j == m) continue;
      const double tmp = std::abs(gap_lm - std::abs(scores[l] - scores[j]));
      if (tmp != 0.0 && tmp < best) {
        best = tmp;
        n = j;
      }
    }
    if (n < 0) {
      ++out.dropped;
      continue;
    }
    // Keep the nearer partner in the middle slot.
    if (std::abs(scores[l] - scores[n]) < gap_lm) {
      out.triplets.push_back({l, n, m});
    } else {
      out.triplets.push_back({l, m, n});
    }
  }
  return out;
}

std::vector<Pair> select_balanced_pairs(std::span<const double> scores, int n_cap,
                                        double theta, Rng& rng) {
  const int m_count = static_cast<int>(scores.size());
  if (m_count < 2) throw InvalidArgument("select_balanced_pairs: need at least 2 scores");
  if (n_cap < 1) throw InvalidArgument("select_balanced_pairs: cap must be >= 1");
  if (!(theta > 0.0)) throw InvalidArgument("select_balanced_pairs: theta must be > 0");

  std::vector<std::vector<int>> flag(scores.size());
  std::vector<Pair> pairs;
  std::vector<int> cand;
  std::vector<double> weights;
  for (int i = 0; i < m_count; ++i) {
    cand.clear();
    for (int j = 0; j < m_count; ++j) {
      if (j == i) continue;
      if (std::find(flag[i].begin(), flag[i].end(), j) != flag[i].end()) continue;
      if (static_cast<int>(flag[j].size()) > n_cap) continue;
      cand.push_back(j);
    }

    while (static_cast<int>(flag[i].size()) < n_cap && !cand.empty()) {
      int sim = 0;
      for (int j : cand) {
        if (std::abs(scores[i] - scores[j]) < theta) ++sim;
      }
      const int unsim = static_cast<int>(cand.size()) - sim;

      weights.clear();
      for (int j : cand) {
        const bool is_sim = std::abs(scores[i] - scores[j]) < theta;
        if (is_sim) {
          weights.push_back(unsim > 0 ? 1.0 / (3.0 * sim) : 1.0 / sim);
        } else {
          weights.push_back(sim > 0 ? 2.0 / (3.0 * unsim) : 1.0 / unsim);
        }
      }

      const std::size_t pick = rng.weighted_index(weights);
      const int r = cand[pick];
      flag[i].push_back(r);
      flag[r].push_back(i);
      pairs.push_back({i, r, encode_order(scores[i], scores[r], theta)});
      cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }
  return pairs;
}

}  // namespace uol
