#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "uol/error.hpp"
#include "uol/ordering.hpp"
#include "uol/rng.hpp"

using namespace uol;

namespace {

// Independent restatement of the ternary rule, kept deliberately branchy so
// the production table lookup is checked against something else.
OrderRelation order_oracle(double yi, double yj, double theta) {
  const double d = yi - yj;
  if (d > theta) return OrderRelation::greater;
  if (-d > theta) return OrderRelation::less;
  return OrderRelation::approx;
}

// Brute-force re-derivation of hard-triplet mining: scan every candidate,
// keep the first strict minimizer, then orient so m is the nearer partner.
TripletSelection triplet_oracle(const std::vector<double>& y) {
  const int m_count = static_cast<int>(y.size());
  TripletSelection out;
  for (int i = 0; i < m_count; ++i) {
    const int succ = (i + 1) % m_count;
    const double gap = std::abs(y[i] - y[succ]);
    int best = -1;
    double best_tmp = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m_count; ++j) {
      if (j == i || j == succ) continue;
      const double tmp = std::abs(gap - std::abs(y[i] - y[j]));
      if (tmp != 0.0 && tmp < best_tmp) {
        best_tmp = tmp;
        best = j;
      }
    }
    if (best < 0) {
      ++out.dropped;
      continue;
    }
    Triplet t{i, succ, best};
    if (std::abs(y[i] - y[best]) < gap) std::swap(t.m, t.n);
    out.triplets.push_back(t);
  }
  return out;
}

}  // namespace

TEST_SUITE("ordering") {

TEST_CASE("relation index layouts and round trips") {
  CHECK(onehot_index(OrderRelation::approx) == 0);
  CHECK(onehot_index(OrderRelation::less) == 1);
  CHECK(onehot_index(OrderRelation::greater) == 2);

  CHECK(bt_ordinal(OrderRelation::less) == 0);
  CHECK(bt_ordinal(OrderRelation::approx) == 1);
  CHECK(bt_ordinal(OrderRelation::greater) == 2);

  for (auto r : {OrderRelation::less, OrderRelation::approx, OrderRelation::greater}) {
    CHECK(relation_from_onehot_index(onehot_index(r)) == r);
    CHECK(relation_from_bt_ordinal(bt_ordinal(r)) == r);
  }
  CHECK_THROWS_AS(relation_from_onehot_index(3), InvalidArgument);
  CHECK_THROWS_AS(relation_from_bt_ordinal(-1), InvalidArgument);
}

TEST_CASE("argmax over logits resolves ties toward approx, then less") {
  CHECK(relation_from_logits({{0.1, 0.0, -0.2}}) == OrderRelation::approx);
  CHECK(relation_from_logits({{0.0, 0.4, 0.1}}) == OrderRelation::less);
  CHECK(relation_from_logits({{0.0, 0.1, 0.4}}) == OrderRelation::greater);
  CHECK(relation_from_logits({{1.0, 1.0, 0.0}}) == OrderRelation::approx);
  CHECK(relation_from_logits({{0.0, 1.0, 1.0}}) == OrderRelation::less);
  CHECK(relation_from_logits({{1.0, 1.0, 1.0}}) == OrderRelation::approx);
}

TEST_CASE("encode_order: pinned examples") {
  CHECK(encode_order(3.0, 3.1, 0.2) == OrderRelation::approx);
  CHECK(encode_order(2.0, 3.0, 0.2) == OrderRelation::less);
  CHECK(encode_order(3.5, 3.0, 0.2) == OrderRelation::greater);
  // The boundary is inclusive: |d| == theta counts as approx. Probing that
  // needs an exactly representable gap; 3.25 - 3.0 is exactly 0.25, whereas
  // 3.2 - 3.0 rounds to slightly above 0.2 and lands on greater.
  CHECK(encode_order(3.25, 3.0, 0.25) == OrderRelation::approx);
  CHECK(encode_order(3.0, 3.25, 0.25) == OrderRelation::approx);
  CHECK(encode_order(3.2, 3.0, 0.2) == OrderRelation::greater);
}

TEST_CASE("encode_order: invalid inputs") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(encode_order(nan, 3.0, 0.2), InvalidArgument);
  CHECK_THROWS_AS(encode_order(3.0, inf, 0.2), InvalidArgument);
  CHECK_THROWS_AS(encode_order(3.0, 3.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(encode_order(3.0, 3.0, -0.2), InvalidArgument);
}

TEST_CASE("encode_order agrees with a direct restatement on a grid") {
  for (double yi = 1.0; yi <= 5.0; yi += 0.05) {
    for (double yj = 1.0; yj <= 5.0; yj += 0.05) {
      CHECK(encode_order(yi, yj, 0.2) == order_oracle(yi, yj, 0.2));
    }
  }
}

TEST_CASE("hard triplets: hand-traced example") {
  // Anchor 1.0 pairs with successor 2.0 (gap 1.0); candidate 3.0 scores
  // tmp = |1.0 - 2.0| = 1.0 and candidate 4.5 scores tmp = |1.0 - 3.5| = 2.5,
  // so 3.0 wins and lands in the far slot.
  const std::vector<double> y{1.0, 2.0, 3.0, 4.5};
  const auto sel = select_hard_triplets(y);
  REQUIRE(sel.triplets.size() == 4);
  CHECK(sel.dropped == 0);
  CHECK(sel.triplets[0].l == 0);
  CHECK(sel.triplets[0].m == 1);
  CHECK(sel.triplets[0].n == 2);
}

TEST_CASE("hard triplets: emitted triplets satisfy the gap invariant") {
  Rng rng(51);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> y(16);
    for (auto& v : y) v = rng.uniform(1.0, 5.0);
    const auto sel = select_hard_triplets(y);
    CHECK(sel.triplets.size() + static_cast<std::size_t>(sel.dropped) == y.size());
    for (const auto& t : sel.triplets) {
      CHECK(t.l != t.m);
      CHECK(t.l != t.n);
      CHECK(t.m != t.n);
      CHECK(std::abs(y[t.l] - y[t.m]) < std::abs(y[t.l] - y[t.n]));
    }
  }
}

TEST_CASE("hard triplets: equal scores drop every anchor") {
  const std::vector<double> y{2.0, 2.0, 2.0, 2.0, 2.0};
  const auto sel = select_hard_triplets(y);
  CHECK(sel.triplets.empty());
  CHECK(sel.dropped == 5);
}

TEST_CASE("hard triplets: too few scores") {
  CHECK_THROWS_AS(select_hard_triplets(std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST_CASE("hard triplets match the brute-force oracle") {
  Rng rng(97);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<double> y(16);
    for (auto& v : y) v = rng.uniform(1.0, 5.0);
    if (rep % 4 == 0) y[3] = y[7];  // inject exact ties now and then
    const auto got = select_hard_triplets(y);
    const auto want = triplet_oracle(y);
    REQUIRE(got.triplets.size() == want.triplets.size());
    CHECK(got.dropped == want.dropped);
    for (std::size_t i = 0; i < got.triplets.size(); ++i) {
      CHECK(got.triplets[i].l == want.triplets[i].l);
      CHECK(got.triplets[i].m == want.triplets[i].m);
      CHECK(got.triplets[i].n == want.triplets[i].n);
    }
  }
}

TEST_CASE("balanced pairs: labels, symmetry bound, no duplicates") {
  Rng rng(7);
  std::vector<double> y(64);
  for (auto& v : y) v = rng.uniform(1.0, 5.0);
  const int cap = 4;
  const auto pairs = select_balanced_pairs(y, cap, 0.2, rng);
  CHECK(!pairs.empty());

  std::map<int, int> degree;
  std::set<std::pair<int, int>> seen;
  for (const auto& p : pairs) {
    CHECK(p.i != p.j);
    CHECK(p.relation == encode_order(y[static_cast<std::size_t>(p.i)],
                                     y[static_cast<std::size_t>(p.j)], 0.2));
    ++degree[p.i];
    ++degree[p.j];
    const auto key = std::minmax(p.i, p.j);
    CHECK(seen.insert({key.first, key.second}).second);
  }
  // The literal algorithm admits candidates up to cap pairs deep, so a
  // partner can end one past its quota but never further.
  for (const auto& [idx, d] : degree) {
    (void)idx;
    CHECK(d <= cap + 1);
  }
}

TEST_CASE("balanced pairs: equal scores stay approx and terminate") {
  Rng rng(3);
  const std::vector<double> y(32, 2.5);
  const auto pairs = select_balanced_pairs(y, 4, 0.2, rng);
  CHECK(!pairs.empty());
  std::map<int, int> degree;
  for (const auto& p : pairs) {
    CHECK(p.relation == OrderRelation::approx);
    ++degree[p.i];
    ++degree[p.j];
  }
  for (const auto& [idx, d] : degree) {
    (void)idx;
    CHECK(d <= 5);
  }
}

TEST_CASE("balanced pairs: approx mass lands near one third") {
  double frac_sum = 0.0;
  const int seeds = 30;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(100 + s));
    std::vector<double> y(64);
    for (auto& v : y) v = rng.uniform(1.0, 5.0);
    const auto pairs = select_balanced_pairs(y, 4, 0.2, rng);
    REQUIRE(!pairs.empty());
    int approx = 0;
    for (const auto& p : pairs) {
      if (p.relation == OrderRelation::approx) ++approx;
    }
    frac_sum += approx / static_cast<double>(pairs.size());
  }
  const double frac = frac_sum / seeds;
  CHECK(frac > 1.0 / 3.0 - 0.1);
  CHECK(frac < 1.0 / 3.0 + 0.1);
}

TEST_CASE("balanced pairs: one group empty collapses mass onto the other") {
  Rng rng(11);
  // Scores far apart: no approx candidates anywhere.
  const std::vector<double> y{1.0, 2.0, 3.0, 4.0, 5.0};
  const auto pairs = select_balanced_pairs(y, 2, 0.2, rng);
  CHECK(!pairs.empty());
  for (const auto& p : pairs) CHECK(p.relation != OrderRelation::approx);
}

TEST_CASE("balanced pairs: input validation") {
  Rng rng(1);
  CHECK_THROWS_AS(select_balanced_pairs(std::vector<double>{1.0}, 4, 0.2, rng),
                  InvalidArgument);
  CHECK_THROWS_AS(select_balanced_pairs(std::vector<double>{1.0, 2.0}, 0, 0.2, rng),
                  InvalidArgument);
}

}  // TEST_SUITE
