#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "dynseq/compressed_seq.hpp"

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

u32 draw(std::mt19937_64& rng, u32 sigma, bool skew) {
  if (!skew) return static_cast<u32>(rng() % sigma) + 1;
  u32 c = 1;
  while (c < sigma && rng() % 3 == 0) ++c;
  return c;
}

void probe(const CompressedSeq& q, const std::vector<u32>& ref, std::mt19937_64& rng, int op) {
  const u32 sigma = q.sigma();
  ASSERT_EQ(q.size(), ref.size()) << "op " << op;
  for (int t = 0; t < 3; ++t) {
    const u64 i = rng() % (ref.size() + 1);
    const u32 a = t == 0 && i > 0 ? ref[i - 1] : static_cast<u32>(rng() % sigma) + 1;
    ASSERT_EQ(q.rank(a, i), naive_rank(ref, a, i)) << "op " << op << " rank_" << a << "(" << i << ")";
    if (i > 0) {
      ASSERT_EQ(q.access(i), ref[i - 1]) << "op " << op << " access " << i;
    }
    const u64 cnt = q.count(a);
    ASSERT_EQ(cnt, naive_rank(ref, a, ref.size())) << "op " << op;
    if (cnt > 0) {
      const u64 j = t == 0 ? cnt : rng() % cnt + 1;
      ASSERT_EQ(q.select(a, j), naive_select(ref, a, j)) << "op " << op << " select_" << a << "(" << j << ")";
    }
  }
}

struct Campaign {
  u32 sigma;
  u64 r;
  u64 start;
  int ops;
  double p_insert;
  bool skew;
};

void run(const Campaign& c, u64 seed, CountChoice counts = CountChoice::Auto) {
  std::mt19937_64 rng(seed);
  std::vector<u32> ref(c.start);
  for (auto& a : ref) a = draw(rng, c.sigma, c.skew);
  CompressedConfig cfg;
  cfg.r = c.r;
  cfg.min_section = 16;
  cfg.counts = counts;
  auto q = CompressedSeq::from_symbols(ref, c.sigma, cfg);
  q.validate(true);
  for (int k = 0; k < c.ops; ++k) {
    if (ref.empty() || rng() % 1000 < c.p_insert * 1000) {
      const u64 i = rng() % (ref.size() + 1) + 1;
      const u32 a = draw(rng, c.sigma, c.skew);
      q.insert(i, a);
      ref.insert(ref.begin() + (i - 1), a);
    } else {
      const u64 i = rng() % ref.size() + 1;
      ASSERT_EQ(q.erase(i), ref[i - 1]) << "op " << k;
      ref.erase(ref.begin() + (i - 1));
    }
    probe(q, ref, rng, k);
    if (k % 97 == 0) {
      ASSERT_NO_THROW(q.validate(k % 970 == 0)) << "op " << k;
    }
  }
  q.validate(true);
  ASSERT_EQ(q.to_vector(), ref);
}

}  // namespace

class Campaigns : public ::testing::TestWithParam<std::tuple<u32, u64>> {};

TEST_P(Campaigns, MatchesVectorOracle) {
  const auto [sigma, r] = GetParam();
  run(Campaign{sigma, r, 600, 2500, 0.55, false}, sigma * 131 + r);
  run(Campaign{sigma, r, 300, 2000, 0.45, true}, sigma * 977 + r);
}

INSTANTIATE_TEST_SUITE_P(SigmaR, Campaigns,
                         ::testing::Combine(::testing::Values(2u, 26u, 1024u), ::testing::Values(u64{2}, u64{8}, u64{64})));

TEST(CompressedSeq, EmptyStartAndAutoParameters) {
  CompressedSeq q(5);
  std::vector<u32> ref;
  std::mt19937_64 rng(3);
  for (int k = 0; k < 3000; ++k) {
    const u64 i = rng() % (ref.size() + 1) + 1;
    const u32 a = static_cast<u32>(rng() % 5) + 1;
    q.insert(i, a);
    ref.insert(ref.begin() + (i - 1), a);
    if (k % 50 == 0) probe(q, ref, rng, k);
  }
  q.validate(true);
  EXPECT_EQ(q.to_vector(), ref);
  EXPECT_GE(q.r(), 2u);
  EXPECT_GT(q.sections(), 0u);
}

TEST(CompressedSeq, BoundsHoldUnderDefaultSchedule) {
  std::mt19937_64 rng(11);
  std::vector<u32> ref(4000);
  for (auto& a : ref) a = static_cast<u32>(rng() % 20) + 1;
  CompressedConfig cfg;
  cfg.r = 8;
  auto q = CompressedSeq::from_symbols(ref, 20, cfg);
  for (int k = 0; k < 6000; ++k) {
    if (rng() & 1) {
      q.insert(rng() % (q.size() + 1) + 1, static_cast<u32>(rng() % 20) + 1);
    } else {
      q.erase(rng() % q.size() + 1);
    }
    const auto a = q.audit();
    ASSERT_TRUE(a.within_bounds) << "op " << k << " s0=" << a.s0 << " deleted=" << a.deleted << " n/r=" << a.s0_bound;
  }
  EXPECT_GT(q.stats().migrations, 0u);
  EXPECT_GT(q.stats().purges, 0u);
  EXPECT_GT(q.stats().builds, 0u);
}

TEST(CompressedSeq, InsertDeletePingPong) {
  std::vector<u32> ref(500);
  std::mt19937_64 rng(5);
  for (auto& a : ref) a = static_cast<u32>(rng() % 7) + 1;
  CompressedConfig cfg;
  cfg.r = 4;
  cfg.min_section = 16;
  auto q = CompressedSeq::from_symbols(ref, 7, cfg);
  for (int k = 0; k < 3000; ++k) {
    const u64 i = rng() % (ref.size() + 1) + 1;
    q.insert(i, 3);
    ASSERT_EQ(q.erase(i), 3u);
    if (k % 100 == 0) probe(q, ref, rng, k);
  }
  q.validate(true);
  EXPECT_EQ(q.to_vector(), ref);
}

TEST(CompressedSeq, DeleteEverything) {
  std::vector<u32> ref(1500);
  std::mt19937_64 rng(9);
  for (auto& a : ref) a = static_cast<u32>(rng() % 30) + 1;
  CompressedConfig cfg;
  cfg.r = 6;
  cfg.min_section = 16;
  auto q = CompressedSeq::from_symbols(ref, 30, cfg);
  while (!ref.empty()) {
    const u64 i = rng() % ref.size() + 1;
    ASSERT_EQ(q.erase(i), ref[i - 1]);
    ref.erase(ref.begin() + (i - 1));
    if (ref.size() % 37 == 0) probe(q, ref, rng, static_cast<int>(ref.size()));
  }
  EXPECT_EQ(q.size(), 0u);
  EXPECT_THROW(q.access(1), RangeError);
  EXPECT_THROW(q.select(1, 1), NotFoundError);
  EXPECT_EQ(q.rank(1, 0), 0u);
  q.quiesce();
  q.validate(true);
  EXPECT_EQ(q.length(), 0u);
  q.insert(1, 4);
  EXPECT_EQ(q.access(1), 4u);
}

TEST(CompressedSeq, QuiesceReachesFixedPoint) {
  std::vector<u32> ref(800);
  std::mt19937_64 rng(21);
  for (auto& a : ref) a = static_cast<u32>(rng() % 12) + 1;
  CompressedConfig cfg;
  cfg.r = 4;
  cfg.min_section = 32;
  cfg.auto_maintain = false;
  auto q = CompressedSeq::from_symbols(ref, 12, cfg);
  for (int k = 0; k < 400; ++k) {
    const u64 i = rng() % (ref.size() + 1) + 1;
    const u32 a = static_cast<u32>(rng() % 12) + 1;
    q.insert(i, a);
    ref.insert(ref.begin() + (i - 1), a);
    const u64 e = rng() % ref.size() + 1;
    q.erase(e);
    ref.erase(ref.begin() + (e - 1));
  }
  EXPECT_GT(q.s0_size(), 0u);
  EXPECT_GT(q.deleted(), 0u);
  q.quiesce();
  EXPECT_EQ(q.s0_size(), 0u);
  EXPECT_EQ(q.deleted(), 0u);
  EXPECT_EQ(q.phase(), Phase::Idle);
  EXPECT_EQ(q.length(), q.size());
  q.validate(true);
  EXPECT_EQ(q.to_vector(), ref);
  std::ostringstream a, b;
  q.save(a);
  q.quiesce();
  q.save(b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(CompressedSeq, StepwiseMaintenanceKeepsInvariants) {
  std::vector<u32> ref(700);
  std::mt19937_64 rng(31);
  for (auto& a : ref) a = static_cast<u32>(rng() % 9) + 1;
  CompressedConfig cfg;
  cfg.r = 3;
  cfg.min_section = 16;
  cfg.step_budget = 5;
  cfg.audit_steps = true;
  auto q = CompressedSeq::from_symbols(ref, 9, cfg);
  for (int k = 0; k < 1500; ++k) {
    if (rng() % 2) {
      const u64 i = rng() % (ref.size() + 1) + 1;
      const u32 a = static_cast<u32>(rng() % 9) + 1;
      q.insert(i, a);
      ref.insert(ref.begin() + (i - 1), a);
    } else {
      const u64 i = rng() % ref.size() + 1;
      q.erase(i);
      ref.erase(ref.begin() + (i - 1));
    }
    if (q.phase() != Phase::Idle && k % 7 == 0) q.validate(true);
    probe(q, ref, rng, k);
  }
}

TEST(CompressedSeq, SelPrimeBracketsTheTarget) {
  std::vector<u32> ref(1200);
  std::mt19937_64 rng(41);
  for (auto& a : ref) a = draw(rng, 16, true);
  CompressedConfig cfg;
  cfg.r = 5;
  cfg.min_section = 16;
  auto q = CompressedSeq::from_symbols(ref, 16, cfg);
  for (int k = 0; k < 800; ++k) {
    const u64 i = rng() % (ref.size() + 1) + 1;
    const u32 a = draw(rng, 16, true);
    q.insert(i, a);
    ref.insert(ref.begin() + (i - 1), a);
    if (k % 3 == 0) {
      const u64 e = rng() % ref.size() + 1;
      q.erase(e);
      ref.erase(ref.begin() + (e - 1));
    }
    const u32 b = draw(rng, 16, true);
    const u64 c = q.count(b);
    if (c == 0) continue;
    const auto br = q.select_bracket(b, rng() % c + 1);
    ASSERT_LE(br.occ_first, br.target);
    ASSERT_GT(br.occ_last, br.target);
    ASSERT_LT(br.first, br.last);
  }
}

TEST(CompressedSeq, ExtractMatchesAccess) {
  std::vector<u32> ref(2000);
  std::mt19937_64 rng(51);
  for (auto& a : ref) a = static_cast<u32>(rng() % 40) + 1;
  CompressedConfig cfg;
  cfg.r = 4;
  cfg.min_section = 64;
  auto q = CompressedSeq::from_symbols(ref, 40, cfg);
  for (int k = 0; k < 1500; ++k) {
    if (rng() % 3) {
      const u64 i = rng() % (ref.size() + 1) + 1;
      const u32 a = static_cast<u32>(rng() % 40) + 1;
      q.insert(i, a);
      ref.insert(ref.begin() + (i - 1), a);
    } else {
      const u64 i = rng() % ref.size() + 1;
      q.erase(i);
      ref.erase(ref.begin() + (i - 1));
    }
    const u64 i = rng() % ref.size() + 1;
    const u64 len = std::min<u64>(rng() % 300, ref.size() - i + 1);
    const auto got = q.extract(i, len);
    ASSERT_EQ(got, std::vector<u32>(ref.begin() + (i - 1), ref.begin() + (i - 1 + len))) << "op " << k;
  }
  EXPECT_THROW(q.extract(ref.size(), 2), RangeError);
  EXPECT_TRUE(q.extract(1, 0).empty());
}

TEST(CompressedSeq, CountModesAgree) {
  for (auto mode : {CountChoice::Array, CountChoice::Bits}) run(Campaign{300, 4, 400, 1200, 0.5, false}, 61, mode);
  EXPECT_EQ(CompressedSeq(3000, {}).count_mode(), CountMode::Bits);
  CompressedConfig cfg;
  cfg.n_hint = 1u << 20;
  EXPECT_EQ(CompressedSeq(4, cfg).count_mode(), CountMode::Array);
}

TEST(CompressedSeq, RejectsBadInput) {
  EXPECT_THROW(CompressedSeq(0), ValidationError);
  CompressedSeq q(4);
  EXPECT_THROW(q.insert(1, 5), ValidationError);
  EXPECT_THROW(q.insert(1, 0), ValidationError);
  EXPECT_THROW(q.insert(2, 1), RangeError);
  EXPECT_THROW(q.erase(1), RangeError);
  q.insert(1, 2);
  EXPECT_THROW(q.rank(9, 1), ValidationError);
  EXPECT_THROW(q.rank(1, 2), RangeError);
  EXPECT_THROW(q.select(2, 2), NotFoundError);
  const std::vector<u32> bad{1, 9};
  EXPECT_THROW(CompressedSeq::from_symbols(bad, 4), ValidationError);
}

TEST(CompressedSeq, SaveLoadRoundTripMidPhase) {
  std::vector<u32> ref(900);
  std::mt19937_64 rng(71);
  for (auto& a : ref) a = static_cast<u32>(rng() % 11) + 1;
  CompressedConfig cfg;
  cfg.r = 4;
  cfg.min_section = 16;
  cfg.step_budget = 3;
  auto q = CompressedSeq::from_symbols(ref, 11, cfg);
  for (int k = 0; k < 700; ++k) {
    const u64 i = rng() % (ref.size() + 1) + 1;
    const u32 a = static_cast<u32>(rng() % 11) + 1;
    q.insert(i, a);
    ref.insert(ref.begin() + (i - 1), a);
    if (k % 2) {
      const u64 e = rng() % ref.size() + 1;
      q.erase(e);
      ref.erase(ref.begin() + (e - 1));
    }
  }
  std::stringstream ss;
  q.save(ss);
  auto p = CompressedSeq::load(ss, cfg);
  p.validate(true);
  EXPECT_EQ(p.to_vector(), ref);
  EXPECT_EQ(p.deleted(), q.deleted());
  EXPECT_EQ(p.s0_size(), q.s0_size());
  for (int k = 0; k < 200; ++k) probe(p, ref, rng, k);

  std::string blob = ss.str();
  blob[0] = 'X';
  std::istringstream bad(blob);
  EXPECT_THROW(CompressedSeq::load(bad), FormatError);
  std::istringstream cut(ss.str().substr(0, ss.str().size() / 2));
  EXPECT_THROW(CompressedSeq::load(cut), FormatError);
}

TEST(CompressedSeq, SpaceReportTracksEntropy) {
  std::vector<u32> s;
  for (int k = 0; k < 4000; ++k) s.push_back(k % 4 == 0 ? 2 : 1);
  auto q = CompressedSeq::from_symbols(s, 4);
  const auto rep = q.space_report(1);
  EXPECT_EQ(rep.n, 4000u);
  EXPECT_NEAR(rep.h0, entropy_h0(s), 1e-12);
  EXPECT_NEAR(rep.hk, entropy_hk(s, 1), 1e-12);
  u64 sum = 0;
  for (const auto& [name, b] : rep.bits_per_section) sum += b;
  EXPECT_LE(sum, rep.bits_total);
  EXPECT_GT(rep.static_coded_bits, 0u);
  EXPECT_THROW(q.space_report(4), ValidationError);
}

TEST(Entropy, KnownValues) {
  const std::vector<u32> even{1, 2, 1, 2, 1, 2, 1, 2};
  EXPECT_NEAR(entropy_h0(even), 1.0, 1e-12);
  EXPECT_NEAR(entropy_hk(even, 1), 0.0, 1e-12);
  const std::vector<u32> four{1, 2, 3, 4};
  EXPECT_NEAR(entropy_h0(four), 2.0, 1e-12);
  const std::vector<u32> one(10, 7);
  EXPECT_EQ(entropy_h0(one), 0.0);
  EXPECT_EQ(entropy_h0(std::vector<u32>{}), 0.0);
  // "abracadabra": counts a5 b2 r2 c1 d1.
  const std::vector<u32> abra{1, 2, 5, 1, 3, 1, 4, 1, 2, 5, 1};
  const double h = -(5 * std::log2(5.0 / 11) + 2 * 2 * std::log2(2.0 / 11) + 2 * std::log2(1.0 / 11)) / 11;
  EXPECT_NEAR(entropy_h0(abra), h, 1e-12);
  // After 'a': b, c, d, b -> 2,1,1 over 4 = 1.5 bits each; other contexts are deterministic.
  EXPECT_NEAR(entropy_hk(abra, 1), 4 * 1.5 / 11, 1e-12);
  EXPECT_LE(entropy_hk(abra, 2), entropy_hk(abra, 1));
}

TEST(SectionCounts, ModesAgreeWithMap) {
  for (auto mode : {CountMode::Array, CountMode::Bits}) {
    SectionCounts c(mode);
    std::map<u64, u64> ref;
    std::mt19937_64 rng(81);
    c.assign({{10, 3}, {20, 1}, {30, 5}});
    ref = {{10, 3}, {20, 1}, {30, 5}};
    for (int k = 0; k < 3000; ++k) {
      const u64 key = rng() % 50;
      if (rng() % 2 || ref[key] == 0) {
        c.add(key);
        ++ref[key];
      } else {
        c.sub(key);
        --ref[key];
      }
      if (ref[key] == 0) ref.erase(key);
      const u64 probe_key = rng() % 55;
      u64 before = 0, total = 0;
      for (const auto& [kk, v] : ref) {
        if (kk < probe_key) before += v;
        total += v;
      }
      ASSERT_EQ(c.before(probe_key), before);
      ASSERT_EQ(c.total(), total);
      ASSERT_EQ(c.entries(), ref.size());
      if (total) {
        const u64 q = rng() % total + 1;
        u64 acc = 0;
        for (const auto& [kk, v] : ref) {
          if (acc + v >= q) {
            const auto hit = c.find(q);
            ASSERT_EQ(hit.key, kk);
            ASSERT_EQ(hit.before, acc);
            break;
          }
          acc += v;
        }
      }
    }
    c.validate();
    EXPECT_THROW(c.sub(999), InvariantError);
    EXPECT_THROW(c.find(0), NotFoundError);
  }
}
