#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dynseq/colored_list.hpp"

using namespace dynseq;

namespace {

struct Shadow {
  std::vector<Handle> h;
  std::vector<u32> c;
};

// Left scan from position i for color a.
Handle scan_pred(const Shadow& s, std::size_t i, u32 a) {
  for (std::size_t k = i + 1; k-- > 0;)
    if (s.c[k] == a) return s.h[k];
  return kNullHandle;
}

void replay(u32 sigma, u64 block, int ops, u64 seed) {
  std::mt19937_64 rng(seed);
  ColoredListConfig cfg;
  cfg.block = block;
  ColoredList l(sigma, cfg);
  Shadow s;
  for (int k = 0; k < ops; ++k) {
    if (s.h.empty() || rng() % 4 != 0) {
      const std::size_t pos = rng() % (s.h.size() + 1);
      // Skewed colors so that some lists get many blocks.
      const u32 a = static_cast<u32>(rng() % 3 == 0 ? rng() % sigma + 1 : rng() % std::min<u32>(sigma, 3) + 1);
      const Handle h = l.insert_after(pos == 0 ? kNullHandle : s.h[pos - 1], a);
      s.h.insert(s.h.begin() + pos, h);
      s.c.insert(s.c.begin() + pos, a);
    } else {
      const std::size_t d = rng() % s.h.size();
      l.erase(s.h[d]);
      s.h.erase(s.h.begin() + d);
      s.c.erase(s.c.begin() + d);
    }
    if (k % 100 == 99) l.validate();
    if (!s.h.empty()) {
      const std::size_t i = rng() % s.h.size();
      const u32 a = static_cast<u32>(rng() % 2 ? s.c[rng() % s.c.size()] : rng() % sigma + 1);
      ASSERT_EQ(l.pred(s.h[i], a), scan_pred(s, i, a)) << "op " << k;
    }
  }
  l.validate();
  for (std::size_t i = 0; i < s.h.size(); ++i)
    for (u32 a = 1; a <= std::min<u32>(sigma, 4); ++a) ASSERT_EQ(l.pred(s.h[i], a), scan_pred(s, i, a));
}

}  // namespace

TEST(ColoredList, HandExample) {
  // <a, b, a, c> with a=1, b=2, c=3.
  ColoredList l(3);
  const Handle e1 = l.push_back(1);
  const Handle e2 = l.push_back(2);
  const Handle e3 = l.push_back(1);
  const Handle e4 = l.push_back(3);
  EXPECT_EQ(l.pred(e4, 1), e3);
  EXPECT_EQ(l.pred(e2, 1), e1);
  EXPECT_EQ(l.pred(e3, 1), e3);
  EXPECT_EQ(l.pred(e3, 3), kNullHandle);
  EXPECT_EQ(l.pred(e1, 2), kNullHandle);
  EXPECT_EQ(l.pred(e4, 2), e2);
  l.erase(e3);
  EXPECT_EQ(l.pred(e4, 1), e1);
  EXPECT_THROW(l.pred(e3, 1), InvalidHandleError);
  EXPECT_THROW(l.pred(e4, 4), ValidationError);
  EXPECT_THROW(l.insert_after(e4, 0), ValidationError);
  l.validate();
}

TEST(ColoredList, TwoColors) { replay(2, 4, 20000, 11); }
TEST(ColoredList, ByteAlphabet) { replay(256, 4, 20000, 12); }
TEST(ColoredList, LargeAlphabet) { replay(10000, 6, 20000, 13); }
TEST(ColoredList, DefaultBlockParameter) { replay(16, 0, 20000, 14); }

TEST(ColoredList, BlockHeadsBoundL1) {
  ColoredListConfig cfg;
  cfg.block = 8;
  ColoredList l(2, cfg);
  for (int k = 0; k < 5000; ++k) l.push_back(1 + (k % 7 == 0));
  l.validate();
  // Each color list has at most ceil(n_a / (K/2)) blocks.
  EXPECT_LE(l.l1_size(), 5000 / 4 + 2);
  EXPECT_EQ(l.count_of(1) + l.count_of(2), 5000u);
}
