#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

#include "dynseq/dyn_bitseq.hpp"

using namespace dynseq;

namespace {

// Plain vector oracle, positions 1-based like the structure under test.
struct NaiveBits {
  std::vector<bool> v;
  u64 rank(bool b, u64 i) const {
    u64 r = 0;
    for (u64 k = 0; k < i; ++k) r += v[k] == b;
    return r;
  }
  u64 select(bool b, u64 j) const {
    for (u64 k = 0; k < v.size(); ++k)
      if (v[k] == b && --j == 0) return k + 1;
    return 0;
  }
};

void check_all(const DynBitSeq& s, const NaiveBits& o) {
  ASSERT_EQ(s.size(), o.v.size());
  u64 r1 = 0;
  for (u64 i = 1; i <= s.size(); ++i) {
    ASSERT_EQ(s.access(i), o.v[i - 1]) << i;
    r1 += o.v[i - 1];
    ASSERT_EQ(s.rank1(i), r1) << i;
    if (o.v[i - 1])
      ASSERT_EQ(s.select1(r1), i);
    else
      ASSERT_EQ(s.select0(i - r1), i);
  }
}

}  // namespace

TEST(DynBitSeq, EmptyAndBasics) {
  DynBitSeq s;
  EXPECT_EQ(s.size(), 0u);
  EXPECT_EQ(s.rank1(0), 0u);
  EXPECT_THROW(s.select1(1), NotFoundError);
  EXPECT_THROW(s.access(1), RangeError);
  s.insert(1, true);
  s.insert(1, false);
  s.insert(3, true);
  EXPECT_EQ(s.to_string(), "011");
  EXPECT_EQ(s.select0(1), 1u);
  EXPECT_EQ(s.select1(2), 3u);
  EXPECT_THROW(s.select1(3), NotFoundError);
  EXPECT_THROW(s.insert(5, true), RangeError);
  EXPECT_EQ(s.erase(2), true);
  EXPECT_EQ(s.to_string(), "01");
}

TEST(DynBitSeq, RandomOpsAgainstOracleSmallLeaves) {
  std::mt19937_64 rng(7);
  DynBitSeq s(DynBitSeqConfig{64, 4});
  NaiveBits o;
  for (int step = 0; step < 20000; ++step) {
    const int op = rng() % 10;
    const u64 n = o.v.size();
    if (op < 5 || n == 0) {
      const u64 i = rng() % (n + 1) + 1;
      const bool b = rng() & 1;
      s.insert(i, b);
      o.v.insert(o.v.begin() + (i - 1), b);
    } else if (op < 8) {
      const u64 i = rng() % n + 1;
      const bool b = s.erase(i);
      ASSERT_EQ(b, o.v[i - 1]);
      o.v.erase(o.v.begin() + (i - 1));
    } else {
      const u64 i = rng() % n + 1;
      const bool b = rng() & 1;
      s.set(i, b);
      o.v[i - 1] = b;
    }
    if (step % 997 == 0) {
      s.validate();
      check_all(s, o);
    }
  }
  s.validate();
  check_all(s, o);
}

TEST(DynBitSeq, InitZerosThenSetOnes) {
  std::mt19937_64 rng(11);
  auto s = DynBitSeq::init_zeros(1'000'000);
  EXPECT_EQ(s.size(), 1'000'000u);
  EXPECT_EQ(s.height(), 1u);
  EXPECT_EQ(s.rank1(999'999), 0u);
  EXPECT_EQ(s.select0(123'456), 123'456u);
  std::vector<u64> pos;
  for (int k = 0; k < 500; ++k) {
    const u64 p = rng() % s.size() + 1;
    s.set(p, true);
    pos.push_back(p);
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  s.validate();
  ASSERT_EQ(s.ones(), pos.size());
  for (std::size_t k = 0; k < pos.size(); ++k) {
    ASSERT_EQ(s.select1(k + 1), pos[k]);
    ASSERT_EQ(s.rank1(pos[k]), k + 1);
    ASSERT_EQ(s.rank1(pos[k] - 1), k);
  }
  for (int k = 0; k < 1000; ++k) s.insert(rng() % s.size() + 1, false);
  for (int k = 0; k < 1000; ++k) s.erase(rng() % s.size() + 1);
  s.validate();
}

TEST(DynBitSeq, ExtractMatchesAccess) {
  std::mt19937_64 rng(3);
  std::string str;
  for (int k = 0; k < 30000; ++k) str.push_back(rng() % 3 == 0 ? '1' : '0');
  auto s = DynBitSeq::from_string(str, DynBitSeqConfig{256, 8});
  s.validate();
  for (int t = 0; t < 200; ++t) {
    const u64 i = rng() % str.size() + 1;
    const u64 len = rng() % (str.size() - i + 2);
    auto w = s.extract(i, len);
    for (u64 k = 0; k < len; ++k) ASSERT_EQ(bits::get(w, k), str[i - 1 + k] == '1');
  }
}

TEST(DynBitSeq, SerializeRoundTrip) {
  std::mt19937_64 rng(5);
  DynBitSeq s;
  for (int k = 0; k < 10000; ++k) s.insert(rng() % (s.size() + 1) + 1, rng() & 1);
  std::stringstream ss;
  s.save(ss);
  auto t = DynBitSeq::load(ss);
  EXPECT_EQ(t.to_string(), s.to_string());
  t.validate();
  std::stringstream bad("SDSX");
  EXPECT_THROW(DynBitSeq::load(bad), FormatError);
}

TEST(DynBitSeq, CopyIsDeep) {
  auto a = DynBitSeq::from_string("10110");
  DynBitSeq b = a;
  b.set(2, true);
  EXPECT_EQ(a.to_string(), "10110");
  EXPECT_EQ(b.to_string(), "11110");
}
