#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>

#include "dynseq/sector_set.hpp"

using namespace dynseq;

namespace {

std::string random_bits(std::mt19937_64& rng, std::size_t n) {
  std::string s;
  for (std::size_t k = 0; k < n; ++k) s.push_back(rng() & 1 ? '1' : '0');
  return s;
}

SectorSetConfig small_cfg() {
  SectorSetConfig c;
  c.bits = DynBitSeqConfig{128, 8};
  c.copy_unit_bits = 8;
  c.window = 40;
  return c;
}

// Applies one random update to both the set and the oracle string.
void random_update(std::mt19937_64& rng, SectorSet& s, std::string& o) {
  if (o.empty() || rng() % 2 == 0) {
    const u64 i = rng() % (o.size() + 1) + 1;
    const bool b = rng() & 1;
    s.insert(i, b);
    o.insert(o.begin() + (i - 1), b ? '1' : '0');
  } else {
    const u64 i = rng() % o.size() + 1;
    ASSERT_EQ(s.erase(i), o[i - 1] == '1');
    o.erase(o.begin() + (i - 1));
  }
}

}  // namespace

TEST(SectorSet, QueriesAcrossSectors) {
  std::mt19937_64 rng(1);
  std::string o = random_bits(rng, 5000);
  auto s = SectorSet::from_string(o, 7, small_cfg());
  s.validate();
  u64 r1 = 0, r0 = 0;
  for (u64 i = 1; i <= o.size(); ++i) {
    const bool b = o[i - 1] == '1';
    ASSERT_EQ(s.access(i), b);
    (b ? r1 : r0)++;
    ASSERT_EQ(s.rank(true, i), r1);
    ASSERT_EQ(s.select(b, b ? r1 : r0), i);
  }
  EXPECT_THROW(s.select(true, r1 + 1), NotFoundError);
}

TEST(SectorSet, CopyWithoutUpdatesIsIdentity) {
  std::mt19937_64 rng(2);
  std::string o = random_bits(rng, 3000);
  auto s = SectorSet::from_string(o, 4, small_cfg());
  s.copy_begin(2);
  EXPECT_THROW(s.copy_begin(1), StateError);
  EXPECT_THROW(s.replace(), StateError);
  while (s.copy_step() != CopyStage::Done) {
  }
  s.validate();
  s.replace();
  s.validate();
  EXPECT_EQ(s.to_string(), o);
  EXPECT_EQ(s.sectors(), 4u);
}

TEST(SectorSet, CopyWithInterleavedUpdates) {
  for (int seed = 0; seed < 30; ++seed) {
    std::mt19937_64 rng(100 + seed);
    std::string o = random_bits(rng, 2000);
    auto s = SectorSet::from_string(o, 3, small_cfg());
    const std::size_t target = rng() % 3;
    s.copy_begin(target);
    bool saw_sync = false;
    int updates = 0;
    while (true) {
      // Updates biased towards the sector being copied.
      for (int k = 0; k < 2; ++k) {
        random_update(rng, s, o);
        ++updates;
      }
      const CopyStage st = s.copy_step();
      saw_sync |= st == CopyStage::Synchronizing;
      if (updates % 17 == 0) s.validate();
      if (st == CopyStage::Done) break;
    }
    for (int k = 0; k < 50; ++k) random_update(rng, s, o);
    s.validate();
    s.replace();
    s.validate();
    ASSERT_EQ(s.to_string(), o) << seed;
    EXPECT_GE(updates, 50);
    EXPECT_TRUE(saw_sync);
  }
}

TEST(SectorSet, SplitAndMerge) {
  std::mt19937_64 rng(9);
  std::string o = random_bits(rng, 4000);
  auto s = SectorSet::from_string(o, 2, small_cfg());
  s.split_begin(0);
  while (s.copy_step() != CopyStage::Done) random_update(rng, s, o);
  s.replace();
  s.validate();
  ASSERT_EQ(s.sectors(), 3u);
  EXPECT_EQ(s.to_string(), o);
  EXPECT_NEAR(double(s.sector_size(0)), double(s.sector_size(1)), 0.3 * double(s.sector_size(0) + s.sector_size(1)));

  s.merge_begin(1);
  while (s.copy_step() != CopyStage::Done) random_update(rng, s, o);
  s.replace();
  s.validate();
  EXPECT_EQ(s.sectors(), 2u);
  EXPECT_EQ(s.to_string(), o);
}

TEST(SectorSet, SplitOfTwoMBitSector) {
  std::mt19937_64 rng(4);
  const std::string o = random_bits(rng, 2 * 1024);
  auto s = SectorSet::from_string(o, 1, small_cfg());
  s.split_begin(0);
  while (s.copy_step() != CopyStage::Done) {
  }
  s.replace();
  EXPECT_EQ(s.sector_size(0), 1024u);
  EXPECT_EQ(s.sector_size(1), 1024u);
  EXPECT_EQ(s.to_string(), o);
}

TEST(SectorSet, SerializeRoundTrip) {
  std::mt19937_64 rng(5);
  std::string o = random_bits(rng, 3000);
  auto s = SectorSet::from_string(o, 5);
  std::stringstream ss;
  s.save(ss);
  auto t = SectorSet::load(ss);
  t.validate();
  EXPECT_EQ(t.to_string(), o);
  EXPECT_EQ(t.sectors(), 5u);
}
