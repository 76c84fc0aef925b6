#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "dynseq/list_string.hpp"

using namespace dynseq;

namespace {

u64 naive_rank(const std::vector<u32>& s, u32 a, u64 i) {
  u64 r = 0;
  for (u64 k = 0; k < i; ++k) r += s[k] == a;
  return r;
}

u64 naive_select(const std::vector<u32>& s, u32 a, u64 j) {
  for (u64 k = 0; k < s.size(); ++k)
    if (s[k] == a && --j == 0) return k + 1;
  return 0;
}

}  // namespace

TEST(ListString, Abracadabra) {
  ListString s(256);
  for (char ch : std::string("abracadabra")) s.push_back(static_cast<u8>(ch));
  EXPECT_EQ(s.rank('a', 5), 2u);
  EXPECT_EQ(s.select('a', 4), 8u);
  EXPECT_EQ(s.access(5), u32('c'));
  EXPECT_EQ(s.rank('b', 0), 0u);
  EXPECT_THROW(s.select('z', 1), NotFoundError);
  EXPECT_THROW(s.access(12), RangeError);
  s.validate();
}

TEST(ListString, InsertIntoEmptyAndDeleteLast) {
  ListString s(4);
  s.insert(1, 3);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s.access(1), 3u);
  EXPECT_EQ(s.erase(1), 3u);
  EXPECT_EQ(s.size(), 0u);
  EXPECT_EQ(s.rank(3, 0), 0u);
  EXPECT_THROW(s.select(3, 1), NotFoundError);
  s.validate();
}

TEST(ListString, RandomEditsAgainstNaive) {
  for (u32 sigma : {2u, 16u, 300u}) {
    std::mt19937_64 rng(sigma);
    ListString s(sigma, 4096);
    std::vector<u32> ref;
    for (int k = 0; k < 10000; ++k) {
      if (ref.empty() || rng() % 3 != 0) {
        const u64 i = rng() % (ref.size() + 1) + 1;
        const u32 a = static_cast<u32>(rng() % sigma) + 1;
        s.insert(i, a);
        ref.insert(ref.begin() + (i - 1), a);
      } else {
        const u64 i = rng() % ref.size() + 1;
        ASSERT_EQ(s.erase(i), ref[i - 1]);
        ref.erase(ref.begin() + (i - 1));
      }
      if (k % 500 == 0) s.validate();
      const u64 i = rng() % (ref.size() + 1);
      const u32 a = static_cast<u32>(rng() % sigma) + 1;
      ASSERT_EQ(s.rank(a, i), naive_rank(ref, a, i));
      if (i > 0) {
        ASSERT_EQ(s.access(i), ref[i - 1]);
      }
      const u64 c = naive_rank(ref, a, ref.size());
      if (c > 0) {
        const u64 j = rng() % c + 1;
        ASSERT_EQ(s.select(a, j), naive_select(ref, a, j));
      }
    }
    s.validate();
    EXPECT_EQ(s.to_vector(), ref);
  }
}
