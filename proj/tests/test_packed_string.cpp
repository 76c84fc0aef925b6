#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dynseq/packed_string.hpp"

using namespace dynseq;

namespace {

u64 naive_rank(const std::vector<u32>& s, u32 a, u64 i) {
  u64 r = 0;
  for (u64 k = 0; k < i; ++k) r += s[k] == a;
  return r;
}

}  // namespace

TEST(PackedString, OracleCampaignAcrossWidths) {
  for (u32 sigma : {1u, 2u, 3u, 7u, 16u, 26u, 255u, 1000u, 70000u}) {
    std::mt19937_64 rng(sigma);
    PackedString p(sigma);
    std::vector<u32> ref;
    for (int k = 0; k < 4000; ++k) {
      if (ref.empty() || rng() % 5 < 3) {
        const u64 i = rng() % (ref.size() + 1) + 1;
        const u32 a = static_cast<u32>(rng() % sigma) + 1;
        p.insert(i, a);
        ref.insert(ref.begin() + (i - 1), a);
      } else {
        const u64 i = rng() % ref.size() + 1;
        ASSERT_EQ(p.erase(i), ref[i - 1]) << "sigma " << sigma;
        ref.erase(ref.begin() + (i - 1));
      }
      ASSERT_EQ(p.size(), ref.size());
      const u64 i = rng() % (ref.size() + 1);
      const u32 a = i > 0 && rng() % 2 ? ref[i - 1] : static_cast<u32>(rng() % sigma) + 1;
      ASSERT_EQ(p.rank(a, i), naive_rank(ref, a, i)) << "sigma " << sigma << " op " << k;
      if (i > 0) {
        ASSERT_EQ(p.access(i), ref[i - 1]);
        const u64 j = naive_rank(ref, ref[i - 1], i);
        ASSERT_EQ(p.select(ref[i - 1], j), i);
      }
      if (k % 200 == 0) {
        ASSERT_NO_THROW(p.validate());
        ASSERT_EQ(p.to_vector(), ref);
        ASSERT_EQ(p.count(a), naive_rank(ref, a, ref.size()));
      }
    }
  }
}

TEST(PackedString, EdgesAndErrors) {
  PackedString p(4);
  EXPECT_EQ(p.rank(1, 0), 0u);
  EXPECT_THROW(p.access(1), RangeError);
  EXPECT_THROW(p.insert(1, 5), ValidationError);
  EXPECT_THROW(p.select(1, 1), NotFoundError);
  for (int k = 0; k < 64; ++k) p.push_back(4);
  EXPECT_EQ(p.count(4), 64u);
  EXPECT_EQ(p.select(4, 64), 64u);
  EXPECT_THROW(p.select(4, 65), NotFoundError);
  while (p.size()) p.erase(1);
  p.validate();
  EXPECT_EQ(p.count(4), 0u);
}
