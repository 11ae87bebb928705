#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uol/rng.hpp"

namespace uol {

enum class OrderRelation { less, approx, greater };

// Comparator logits, indexed approx=0, less=1, greater=2. The same order is
// used for the cross-entropy target one-hots.
struct OrderLogits {
  std::array<double, 3> v{};
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

// Position of a relation in the logit/one-hot layout.
int onehot_index(OrderRelation r);

// Ordinal used by the Bradley-Terry stage: less=0, approx=1, greater=2.
int bt_ordinal(OrderRelation r);

OrderRelation relation_from_onehot_index(int idx);
OrderRelation relation_from_bt_ordinal(int ordinal);

// Argmax over logits; exact ties resolve toward approx, then less.
OrderRelation relation_from_logits(const OrderLogits& logits);

std::string to_string(OrderRelation r);

// Ternary order label: approx when |y_i - y_j| <= theta, otherwise less or
// greater by the sign of the difference.
OrderRelation encode_order(double y_i, double y_j, double theta = 0.2);

struct Pair {
  int i = 0;
  int j = 0;
  OrderRelation relation = OrderRelation::approx;
};

struct Triplet {
  int l = 0;
  int m = 0;
  int n = 0;  // |y_l - y_m| < |y_l - y_n| always holds on emitted triplets
};

struct TripletSelection {
  std::vector<Triplet> triplets;
  int dropped = 0;  // anchors where every candidate tied the (l,m) gap
};

// Hard-triplet mining: anchor l=i pairs with its successor m=i+1 (mod M) and
// the n whose score gap most nearly ties |y_l - y_m| without equalling it.
// Ties keep the lowest index. m and n are swapped when needed so the emitted
// triplet always has the nearer partner second.
TripletSelection select_hard_triplets(std::span<const double> scores);

// Balanced pair sampling: each anchor draws partners until it holds N pairs
// or runs out of candidates, spending 1/3 of the probability mass on
// same-score candidates (|dif| < theta) and 2/3 on the rest. When one group
// is empty all mass collapses onto the other. Pairing is recorded
// symmetrically and saturated instances (already in more than N pairs) are
// skipped as candidates, which caps any flag list at N+1.
std::vector<Pair> select_balanced_pairs(std::span<const double> scores, int n_cap,
                                        double theta, Rng& rng);

}  // namespace uol
