#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynseq/dyn_bitseq.hpp"
#include "dynseq/static_seq.hpp"

using namespace dynseq;

namespace {

struct Oracle {
  std::vector<std::vector<u64>> occ;
  explicit Oracle(const std::vector<u32>& s, u32 sigma) : occ(sigma + 1) {
    for (u64 i = 0; i < s.size(); ++i) occ[s[i]].push_back(i + 1);
  }
  u64 rank(u32 a, u64 i) const { return std::upper_bound(occ[a].begin(), occ[a].end(), i) - occ[a].begin(); }
};

std::vector<u32> random_seq(u64 n, u32 sigma, u64 seed, bool skew = false) {
  std::mt19937_64 rng(seed);
  std::vector<u32> s(n);
  for (auto& a : s) {
    if (skew) {
      // Geometric-ish: small symbols dominate.
      u32 c = 1;
      while (c < sigma && rng() % 3 == 0) ++c;
      a = c;
    } else {
      a = static_cast<u32>(rng() % sigma) + 1;
    }
  }
  return s;
}

void check_against_oracle(const StaticSeq& q, const std::vector<u32>& s, u32 sigma, int probes, u64 seed) {
  Oracle o(s, sigma);
  std::mt19937_64 rng(seed);
  for (int t = 0; t < probes; ++t) {
    const u64 i = rng() % (s.size() + 1);
    const u32 a = static_cast<u32>(rng() % sigma) + 1;
    ASSERT_EQ(q.rank(a, i), o.rank(a, i)) << "rank_" << a << "(" << i << ")";
    if (i > 0) {
      ASSERT_EQ(q.access(i), s[i - 1]);
      ASSERT_EQ(q.partial_rank(i), o.rank(s[i - 1], i));
    }
    if (!o.occ[a].empty()) {
      const u64 j = rng() % o.occ[a].size() + 1;
      ASSERT_EQ(q.select(a, j), o.occ[a][j - 1]);
    }
  }
}

}  // namespace

TEST(StaticSeq, SingleSymbolAlphabet) {
  const std::vector<u32> s(4, 1);
  const StaticSeq q = StaticSeq::build(s, 1);
  for (u64 i = 0; i <= 4; ++i) EXPECT_EQ(q.rank(1, i), i);
  EXPECT_EQ(q.select(1, 3), 3u);
  q.validate();
}

TEST(StaticSeq, EmptyAndErrors) {
  const StaticSeq q = StaticSeq::build(std::vector<u32>{}, 5);
  EXPECT_EQ(q.size(), 0u);
  EXPECT_EQ(q.rank(3, 0), 0u);
  EXPECT_THROW(q.select(3, 1), NotFoundError);
  EXPECT_THROW(q.access(1), RangeError);
  EXPECT_TRUE(q.extract(1, 0).empty());
  EXPECT_THROW(StaticSeq::build(std::vector<u32>{1, 6}, 5), ValidationError);
  std::stringstream ss;
  q.save(ss);
  EXPECT_EQ(StaticSeq::load(ss).size(), 0u);
}

TEST(StaticSeq, RandomLargeAlphabet) {
  const auto s = random_seq(100000, 300, 1);
  const StaticSeq q = StaticSeq::build(s, 300);
  EXPECT_EQ(q.t(), 1u);
  q.validate();
  check_against_oracle(q, s, 300, 10000, 2);
  EXPECT_EQ(q.extract(1, s.size()), s);
}

TEST(StaticSeq, SampledPathWithLargerT) {
  for (unsigned t : {2u, 3u, 8u}) {
    for (u32 sigma : {5u, 64u, 200u}) {
      const auto s = random_seq(20000, sigma, t * 1000 + sigma, sigma == 64);
      StaticSeqConfig cfg;
      cfg.t = t;
      const StaticSeq q = StaticSeq::build(s, sigma, cfg);
      EXPECT_EQ(q.t(), t);
      q.validate();
      check_against_oracle(q, s, sigma, 3000, t + sigma);
    }
  }
}

TEST(StaticSeq, PermutationsAreMutualInverses) {
  for (unsigned t : {1u, 4u}) {
    const auto s = random_seq(3 * 4096 + 17, 4096, 77);
    StaticSeqConfig cfg;
    cfg.t = t;
    const StaticSeq q = StaticSeq::build(s, 4096, cfg);
    for (u64 b = 0; b < q.blocks(); ++b)
      for (u64 i = 1; i <= q.block_len(b); ++i) ASSERT_EQ(q.perm_inv(b, q.perm(b, i)), i);
  }
}

TEST(StaticSeq, BinaryAgreesWithBitvector) {
  const auto s = random_seq(50000, 2, 5);
  std::string bits01;
  for (u32 a : s) bits01.push_back(a == 2 ? '1' : '0');
  const DynBitSeq b = DynBitSeq::from_string(bits01);
  const StaticSeq q = StaticSeq::build(s, 2);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 5000; ++t) {
    const u64 i = rng() % (s.size() + 1);
    ASSERT_EQ(q.rank(2, i), b.rank1(i));
    ASSERT_EQ(q.rank(1, i), b.rank0(i));
    const u64 j = rng() % b.ones() + 1;
    ASSERT_EQ(q.select(2, j), b.select1(j));
  }
}

TEST(StaticSeq, RarestSymbolAndRoundTrips) {
  auto s = random_seq(30000, 40, 8);
  s[12345] = 41;  // the rarest symbol occurs once
  const StaticSeq q = StaticSeq::build(s, 41);
  EXPECT_EQ(q.select(41, 1), 12346u);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 2000; ++t) {
    const u64 i = rng() % s.size() + 1;
    const u32 a = static_cast<u32>(rng() % 41) + 1;
    const u64 r = q.rank(a, i);
    if (r > 0) {
      ASSERT_LE(q.select(a, r), i);
    }
  }
  // Partial rank at first and last occurrence.
  for (u32 a = 1; a <= 40; ++a) {
    const u64 first = q.select(a, 1), last = q.select(a, q.count(a));
    EXPECT_EQ(q.partial_rank(first), 1u);
    EXPECT_EQ(q.partial_rank(last), q.count(a));
  }
  for (int t = 0; t < 200; ++t) {
    const u64 i = rng() % s.size() + 1;
    const u64 len = rng() % (s.size() - i + 2);
    const auto got = q.extract(i, len);
    ASSERT_TRUE(std::equal(got.begin(), got.end(), s.begin() + (i - 1)));
    ASSERT_EQ(got.size(), len);
  }
}

TEST(StaticSeq, EffectiveAlphabetMap) {
  std::mt19937_64 rng(10);
  std::vector<u32> s(20000);
  const u32 present[] = {3, 77, 1000, 65000};
  for (auto& a : s) a = present[rng() % 4];
  StaticSeqConfig cfg;
  cfg.use_map = true;
  const StaticSeq q = StaticSeq::build(s, 65536, cfg);
  EXPECT_EQ(q.effective_sigma(), 4u);
  EXPECT_EQ(q.count(5), 0u);
  EXPECT_EQ(q.rank(5, 100), 0u);
  EXPECT_THROW(q.select(5, 1), NotFoundError);
  check_against_oracle(q, s, 65536, 0, 1);
  Oracle o(s, 65536);
  for (u32 a : present)
    for (u64 i = 0; i <= s.size(); i += 997) ASSERT_EQ(q.rank(a, i), o.rank(a, i));
  EXPECT_EQ(q.extract(1, s.size()), s);
}

TEST(StaticSeq, SaveLoad) {
  for (unsigned t : {1u, 3u}) {
    const auto s = random_seq(20000, 100, 12, true);
    StaticSeqConfig cfg;
    cfg.t = t;
    cfg.use_map = t == 3;
    const StaticSeq q = StaticSeq::build(s, 100, cfg);
    std::stringstream ss;
    q.save(ss);
    const std::string blob = ss.str();
    const StaticSeq r = StaticSeq::load(ss);
    EXPECT_EQ(r.extract(1, s.size()), s);
    check_against_oracle(r, s, 100, 2000, 13);
    EXPECT_EQ(r.serialized_bits(), q.serialized_bits());
    std::stringstream cut(blob.substr(0, blob.size() / 2));
    EXPECT_THROW(StaticSeq::load(cut), FormatError);
    std::string bad = blob;
    bad[0] = 'X';
    std::stringstream bs(bad);
    EXPECT_THROW(StaticSeq::load(bs), FormatError);
  }
}

TEST(StaticSeq, CodedSizeNearEntropyOfMetaSymbols) {
  // Highly skewed source: Huffman on meta-symbols must beat plain log sigma by far.
  const auto s = random_seq(200000, 16, 14, true);
  const StaticSeq q = StaticSeq::build(s, 16);
  EXPECT_LT(q.coded_bits(), 4 * s.size() / 2);
}

TEST(StaticSeq, BuilderMatchesOneShotBuild) {
  const auto s = random_seq(20000, 50, 17, true);
  StaticSeqConfig cfg;
  cfg.use_map = true;
  StaticSeq::Builder b(s, 50, cfg);
  u64 steps = 0;
  {
    ops::Scope sc;
    while (!b.step()) ++steps;
    EXPECT_GT(sc.elapsed(), 0u);
  }
  EXPECT_GT(steps, 4u);
  EXPECT_TRUE(b.done());
  const auto q = b.take();
  const auto ref = StaticSeq::build(s, 50, cfg);
  std::ostringstream x, y;
  q.save(x);
  ref.save(y);
  EXPECT_EQ(x.str(), y.str());
  check_against_oracle(q, s, 50, 300, 3);
}

TEST(StaticSeq, BuilderReportsBadSymbols) {
  const std::vector<u32> s{1, 2, 9};
  StaticSeq::Builder b(s, 4);
  EXPECT_THROW(
      {
        while (!b.step()) {
        }
      },
      ValidationError);
}
