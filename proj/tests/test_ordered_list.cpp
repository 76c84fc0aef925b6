#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "dynseq/order_list.hpp"
#include "dynseq/prefix_index.hpp"

using namespace dynseq;

TEST(OrderedList, ChainAndEquality) {
  OrderedList l;
  const Handle a = l.push_back();
  const Handle b = l.insert_after(a);
  const Handle c = l.insert_after(b);
  EXPECT_EQ(l.compare(a, b), Order::Before);
  EXPECT_EQ(l.compare(c, b), Order::After);
  EXPECT_EQ(l.compare(b, b), Order::Equal);
  const Handle d = l.insert_after(c);
  EXPECT_EQ(l.back(), d);
  l.erase(b);
  EXPECT_THROW(l.compare(a, b), InvalidHandleError);
  EXPECT_EQ(l.compare(a, c), Order::Before);
}

TEST(OrderedList, RandomInsertsAgreeWithShadow) {
  std::mt19937_64 rng(3);
  OrderedList l(8);
  std::vector<Handle> shadow;
  for (int k = 0; k < 10000; ++k) {
    const std::size_t pos = rng() % (shadow.size() + 1);  // insert after shadow[pos-1]
    const Handle h = l.insert_after(pos == 0 ? kNullHandle : shadow[pos - 1]);
    shadow.insert(shadow.begin() + pos, h);
    if (k % 7 == 3 && shadow.size() > 10) {
      const std::size_t d = rng() % shadow.size();
      l.erase(shadow[d]);
      shadow.erase(shadow.begin() + d);
    }
  }
  l.validate();
  for (int t = 0; t < 100000; ++t) {
    const std::size_t i = rng() % shadow.size(), j = rng() % shadow.size();
    const Order want = i < j ? Order::Before : (i == j ? Order::Equal : Order::After);
    ASSERT_EQ(l.compare(shadow[i], shadow[j]), want);
  }
  // Sampled transitivity.
  for (int t = 0; t < 1000; ++t) {
    Handle x = shadow[rng() % shadow.size()], y = shadow[rng() % shadow.size()], z = shadow[rng() % shadow.size()];
    if (l.before(x, y) && l.before(y, z)) {
      ASSERT_TRUE(l.before(x, z));
    }
  }
}

TEST(OrderedList, AdversarialSameGapInserts) {
  OrderedList l(4);
  Handle a = l.push_back();
  l.insert_after(a);
  // Always inserting right after the first entry exhausts gaps and forces relabels.
  std::vector<Handle> order{a};
  for (int k = 0; k < 20000; ++k) order.insert(order.begin() + 1, l.insert_after(a));
  l.validate();
  for (std::size_t i = 1; i < order.size(); ++i) ASSERT_TRUE(l.before(order[i - 1], order[i]));
  std::ostringstream os;
  l.dump(os);
  EXPECT_FALSE(os.str().empty());
}

TEST(PrefixIndex, HandExamples) {
  PrefixIndex<int> p;
  const Handle a = p.push_back(1);
  EXPECT_EQ(p.rank(a), 1u);
  const Handle b = p.insert_after(a, 2);
  const Handle c = p.insert_after(b, 3);
  EXPECT_EQ(p.rank(c), 3u);
  p.erase(b);
  EXPECT_EQ(p.rank(c), 2u);
  EXPECT_EQ(p.select(2), c);
  const Handle f = p.insert_at(1, 0);
  EXPECT_EQ(p.rank(f), 1u);
  EXPECT_THROW(p.select(4), RangeError);
  EXPECT_THROW(p.rank(b), InvalidHandleError);
}

TEST(PrefixIndex, RandomReplayAgainstShadow) {
  std::mt19937_64 rng(5);
  PrefixIndex<u64> p(32);
  std::vector<Handle> shadow;
  for (int k = 0; k < 10000; ++k) {
    if (shadow.empty() || rng() % 3 != 0) {
      const std::size_t pos = rng() % (shadow.size() + 1);
      const Handle h = p.insert_at(pos + 1, static_cast<u64>(k));
      shadow.insert(shadow.begin() + pos, h);
    } else {
      const std::size_t d = rng() % shadow.size();
      p.erase(shadow[d]);
      shadow.erase(shadow.begin() + d);
    }
    if (k % 1000 == 0) p.validate();
  }
  p.validate();
  for (std::size_t i = 0; i < shadow.size(); ++i) {
    ASSERT_EQ(p.rank(shadow[i]), i + 1);
    ASSERT_EQ(p.select(i + 1), shadow[i]);
  }
  const double m = static_cast<double>(p.size());
  EXPECT_LE(p.height() - 1, std::max(1.0, 4 * std::log2(m) / std::log2(32.0)));
  // Delete everything, then the index is empty again.
  for (const Handle h : shadow) p.erase(h);
  EXPECT_EQ(p.size(), 0u);
  p.validate();
}
