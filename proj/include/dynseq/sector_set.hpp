#pragma once

// A bit sequence cut into sectors, each its own DynBitSeq, with per-sector
// sizes and 0/1 counts in G, G0, G1. One sector (or a pair, for merges) can
// be rebuilt in the background:
//
//   stage 1  copy the source left to right; updates landing in the copied
//            prefix are logged in U, T, Bn, Ud
//   stage 2  replay the log on the copy, oldest position first; new updates
//            behind the replay cursor go straight to the copy
//   done     the copy equals the live sector(s) and can replace them
//
// Log layout. E is the copied prefix extended with every element deleted
// from it. Ud has one bit per E element (1 = deleted), U one bit per E element
// (1 = touched by a logged update), T one bit per logged update in E order
// (1 = insertion), Bn the value of every logged insertion in E order.

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "dynseq/bits.hpp"
#include "dynseq/dyn_bitseq.hpp"
#include "dynseq/error.hpp"
#include "dynseq/fenwick.hpp"

namespace dynseq {

struct SectorSetConfig {
  DynBitSeqConfig bits{};
  u64 copy_unit_bits = 4096;  ///< bits copied per unit of stage-1 work
  u64 window = 0;             ///< updates a copy should span; 0 picks s/(r*lambda)
};

enum class CopyStage { CopyingStructure, Synchronizing, Done };
enum class CopyKind { Copy, Split, Merge };

/// Background rebuild of sectors [lo, lo + nsrc).
struct CopyState {
  CopyKind kind = CopyKind::Copy;
  std::size_t target = 0;
  std::size_t nsrc = 1;
  CopyStage stage = CopyStage::CopyingStructure;
  DynBitSeq U, T, Bn, Ud;
  std::vector<DynBitSeq> parts;  // the copy; two parts for a split
  u64 split_at = 0;              // split: source elements routed to parts[0]
  u64 frontier = 0;              // source elements copied so far (live coordinates)
  u64 cursor = 0;                // stage 2: E elements already replayed
  u64 budget_per_update = 1;
  u64 updates_seen = 0;

  u64 copy_size() const {
    u64 s = 0;
    for (const auto& p : parts) s += p.size();
    return s;
  }
};

class SectorSet {
 public:
  SectorSet() = default;
  explicit SectorSet(SectorSetConfig cfg) : cfg_(cfg) {}

  /// Splits bits into r sectors of near-equal size.
  static SectorSet from_bits(std::span<const u64> words, u64 nbits, std::size_t r, SectorSetConfig cfg = {}) {
    SectorSet s(cfg);
    r = std::max<std::size_t>(1, r);
    std::vector<u64> sz, g0, g1;
    u64 pos = 0;
    for (std::size_t k = 0; k < r; ++k) {
      const u64 len = nbits / r + (k < nbits % r ? 1 : 0);
      std::vector<u64> w(bits::words_for(len) + 1, 0);
      for (u64 q = 0; q < len; q += 64) {
        const unsigned l = static_cast<unsigned>(std::min<u64>(64, len - q));
        w[q / 64] = bits::read(words, pos + q, l);
      }
      s.sectors_.push_back(DynBitSeq::from_words(w, len, cfg.bits));
      pos += len;
    }
    s.rebuild_counts();
    return s;
  }
  static SectorSet from_string(std::string_view b01, std::size_t r, SectorSetConfig cfg = {}) {
    auto tmp = DynBitSeq::from_string(b01);
    auto w = tmp.extract(1, tmp.size());
    return from_bits(w, tmp.size(), r, cfg);
  }

  u64 size() const { return g_.total(); }
  u64 ones() const { return g1_.total(); }
  std::size_t sectors() const { return sectors_.size(); }
  const DynBitSeq& sector(std::size_t k) const { return sectors_[k]; }
  u64 sector_size(std::size_t k) const { return g_.get(k); }
  const Fenwick& G() const { return g_; }
  const Fenwick& G0() const { return g0_; }
  const Fenwick& G1() const { return g1_; }

  bool access(u64 i) const {
    detail::check_range(i >= 1 && i <= size(), "SectorSet::access position out of range");
    const auto [k, off] = locate(i);
    return sectors_[k].access(off);
  }
  u64 rank(bool b, u64 i) const {
    detail::check_range(i <= size(), "SectorSet::rank position out of range");
    if (i == 0) return 0;
    const auto [k, off] = locate(i);
    return (b ? g1_ : g0_).prefix(k) + sectors_[k].rank(b, off);
  }
  u64 select(bool b, u64 j) const {
    const Fenwick& g = b ? g1_ : g0_;
    if (j == 0 || j > g.total()) throw NotFoundError("SectorSet::select rank exceeds available bits");
    const std::size_t k = g.find(j);
    return g_.prefix(k) + sectors_[k].select(b, j - g.prefix(k));
  }

  void insert(u64 i, bool b) {
    detail::check_range(i >= 1 && i <= size() + 1, "SectorSet::insert position out of range");
    if (sectors_.empty()) {
      sectors_.emplace_back(cfg_.bits);
      rebuild_counts();
    }
    // Position size()+1 lands at the end of the last sector.
    std::size_t k;
    u64 off;
    if (i == size() + 1) {
      k = sectors_.size() - 1;
      off = sectors_[k].size() + 1;
    } else {
      std::tie(k, off) = locate(i);
    }
    sectors_[k].insert(off, b);
    g_.add(k, 1);
    (b ? g1_ : g0_).add(k, 1);
    if (job_ && in_job(k)) job_insert(src_offset(k) + off, b);
  }

  bool erase(u64 i) {
    detail::check_range(i >= 1 && i <= size(), "SectorSet::erase position out of range");
    const auto [k, off] = locate(i);
    const bool b = sectors_[k].erase(off);
    g_.sub(k, 1);
    (b ? g1_ : g0_).sub(k, 1);
    if (job_ && in_job(k)) job_erase(src_offset(k) + off);
    return b;
  }

  // ---- background rebuild ----
  void copy_begin(std::size_t idx) { begin(CopyKind::Copy, idx, 1); }
  void split_begin(std::size_t idx) { begin(CopyKind::Split, idx, 1); }
  void merge_begin(std::size_t idx) { begin(CopyKind::Merge, idx, 2); }

  bool copy_pending() const { return job_.has_value(); }
  const CopyState* pending() const { return job_ ? &*job_ : nullptr; }

  /// One update's worth of background work.
  CopyStage copy_step() {
    if (!job_) throw StateError("no copy in progress");
    CopyState& j = *job_;
    ++j.updates_seen;
    for (u64 u = 0; u < j.budget_per_update && j.stage == CopyStage::CopyingStructure; ++u) copy_unit();
    // Replay one entry more than updates can add, so stage 2 always drains.
    for (u64 u = 0; u <= j.budget_per_update && j.stage == CopyStage::Synchronizing; ++u) replay_one();
    return j.stage;
  }

  /// Swaps the finished copy in; queries are unchanged.
  void replace() {
    if (!job_) throw StateError("no copy in progress");
    if (job_->stage != CopyStage::Done) throw StateError("replace before the copy is done");
    CopyState j = std::move(*job_);
    job_.reset();
    sectors_.erase(sectors_.begin() + j.target, sectors_.begin() + j.target + j.nsrc);
    sectors_.insert(sectors_.begin() + j.target, std::make_move_iterator(j.parts.begin()),
                    std::make_move_iterator(j.parts.end()));
    rebuild_counts();
  }

  std::string to_string() const {
    std::string s;
    for (const auto& x : sectors_) s += x.to_string();
    return s;
  }

  void validate() const {
    if (g_.size() != sectors_.size()) throw InvariantError("G arity");
    for (std::size_t k = 0; k < sectors_.size(); ++k) {
      sectors_[k].validate();
      if (g_.get(k) != sectors_[k].size() || g1_.get(k) != sectors_[k].ones() || g0_.get(k) != sectors_[k].zeros())
        throw InvariantError("G/G0/G1 out of sync with sector contents");
    }
    if (!job_) return;
    const CopyState& j = *job_;
    if (j.U.ones() != j.T.size()) throw InvariantError("U ones != |T|");
    if (j.Bn.size() != j.T.ones()) throw InvariantError("|Bn| != insertions in T");
    if (j.U.size() != j.Ud.size()) throw InvariantError("|U| != |Ud|");
    if (j.stage == CopyStage::Done) {
      std::string live, cp;
      for (std::size_t k = 0; k < j.nsrc; ++k) live += sectors_[j.target + k].to_string();
      for (const auto& p : j.parts) cp += p.to_string();
      if (live != cp) throw InvariantError("finished copy differs from live sectors");
    }
  }

  // ---- serialization: "SDSE", version u8, sector count u64, then each sector in SDSB form ----
  void save(std::ostream& os) const {
    io::put_magic(os, "SDSE");
    io::put<u8>(os, 1);
    io::put<u64>(os, sectors_.size());
    for (const auto& s : sectors_) s.save(os);
  }
  static SectorSet load(std::istream& is, SectorSetConfig cfg = {}) {
    io::expect_magic(is, "SDSE");
    if (io::get<u8>(is) != 1) throw FormatError("SDSE: unsupported version");
    const u64 r = io::get<u64>(is);
    if (r > (u64{1} << 32)) throw FormatError("SDSE: too many sectors");
    SectorSet s(cfg);
    for (u64 k = 0; k < r; ++k) s.sectors_.push_back(DynBitSeq::load(is, cfg.bits));
    s.rebuild_counts();
    return s;
  }

 private:
  void rebuild_counts() {
    std::vector<u64> a, z, o;
    for (const auto& s : sectors_) {
      a.push_back(s.size());
      z.push_back(s.zeros());
      o.push_back(s.ones());
    }
    g_.assign(a);
    g0_.assign(z);
    g1_.assign(o);
  }

  std::pair<std::size_t, u64> locate(u64 i) const {
    const std::size_t k = g_.find(i);
    return {k, i - g_.prefix(k)};
  }

  bool in_job(std::size_t k) const { return k >= job_->target && k < job_->target + job_->nsrc; }
  u64 src_offset(std::size_t k) const { return g_.prefix(k) - g_.prefix(job_->target); }
  u64 src_size() const { return g_.prefix(job_->target + job_->nsrc) - g_.prefix(job_->target); }

  void begin(CopyKind kind, std::size_t idx, std::size_t nsrc) {
    if (job_) throw StateError("a sector copy is already pending");
    detail::check_range(idx + nsrc <= sectors_.size(), "SectorSet: sector index out of range");
    CopyState j;
    j.kind = kind;
    j.target = idx;
    j.nsrc = nsrc;
    j.parts.assign(kind == CopyKind::Split ? 2 : 1, DynBitSeq(cfg_.bits));
    job_ = std::move(j);
    const u64 len = src_size();
    job_->split_at = (len + 1) / 2;
    const u64 units = (len + cfg_.copy_unit_bits - 1) / cfg_.copy_unit_bits + 1;
    u64 window = cfg_.window;
    if (window == 0) {
      const double s = std::max<double>(4, double(size()));
      const double lambda = std::max(1.0, std::log2(s) / std::log2(std::log2(s)));
      window = std::max<u64>(1, static_cast<u64>(s / (double(sectors_.size()) * lambda * std::log2(s))));
    }
    job_->budget_per_update = std::max<u64>(1, (units + window - 1) / window);
  }

  // Bits [p, p+len) of the source (0-based, concatenated sectors), len <= 64.
  u64 read_src(u64 p, unsigned len) const {
    u64 v = 0;
    unsigned got = 0;
    while (got < len) {
      const std::size_t k = g_.find(g_.prefix(job_->target) + p + got + 1);
      const u64 off = g_.prefix(job_->target) + p + got - g_.prefix(k);
      const unsigned take = static_cast<unsigned>(std::min<u64>(len - got, sectors_[k].size() - off));
      auto w = sectors_[k].extract(off + 1, take);
      v |= (w[0] & bits::low_mask(take)) << got;
      got += take;
    }
    return v;
  }

  void copy_unit() {
    CopyState& j = *job_;
    const u64 total = src_size();
    const u64 take = std::min(cfg_.copy_unit_bits, total - j.frontier);
    for (u64 q = 0; q < take;) {
      unsigned l = static_cast<unsigned>(std::min<u64>(64, take - q));
      const u64 at = j.frontier + q;
      std::size_t part = 0;
      if (j.kind == CopyKind::Split) {
        const u64 copied = j.copy_size();
        // Route by how many elements the copy already holds.
        if (copied < j.split_at)
          l = static_cast<unsigned>(std::min<u64>(l, j.split_at - copied));
        else
          part = 1;
      }
      const u64 w = read_src(at, l);
      j.parts[part].append_words(std::span<const u64>(&w, 1), l);
      q += l;
    }
    std::vector<u64> zeros(bits::words_for(take) + 1, 0);
    j.U.append_words(zeros, take);
    j.Ud.append_words(zeros, take);
    j.frontier += take;
    if (j.frontier == total) j.stage = CopyStage::Synchronizing;
  }

  // Copy-side edits, position in the concatenated parts.
  void part_insert(u64 p, bool b) {
    CopyState& j = *job_;
    if (j.parts.size() == 2 && p > j.parts[0].size())
      j.parts[1].insert(p - j.parts[0].size(), b);
    else
      j.parts[0].insert(p, b);
  }
  void part_erase(u64 p) {
    CopyState& j = *job_;
    if (j.parts.size() == 2 && p > j.parts[0].size())
      j.parts[1].erase(p - j.parts[0].size());
    else
      j.parts[0].erase(p);
  }

  u64 alive_in_E() const { return job_->Ud.zeros(); }

  void log_insert(u64 ed, bool b) {
    CopyState& j = *job_;
    j.Ud.insert(ed, false);
    j.U.insert(ed, true);
    const u64 t = j.U.rank1(ed);  // index in T
    j.T.insert(t, true);
    j.Bn.insert(j.T.rank1(t), b);
  }

  void log_erase(u64 ed) {
    CopyState& j = *job_;
    j.Ud.set(ed, true);
    if (!j.U.access(ed)) {
      j.U.set(ed, true);
      j.T.insert(j.U.rank1(ed), false);
    }
    // An element inserted after the copy started just turns into a no-op.
  }

  // i is a 1-based position within the source sectors.
  void job_insert(u64 i, bool b) {
    CopyState& j = *job_;
    if (j.stage == CopyStage::Done) {
      part_insert(i, b);
      return;
    }
    const bool copied_all = j.stage == CopyStage::Synchronizing;
    if (!copied_all && i > j.frontier) return;  // copied later
    const u64 ed = i <= alive_in_E() ? j.Ud.select0(i) : j.Ud.size() + 1;
    if (j.stage == CopyStage::Synchronizing && ed <= j.cursor) {
      // Behind the replay cursor the copy already mirrors the live prefix.
      part_insert(i, b);
      j.Ud.insert(ed, false);
      j.U.insert(ed, false);
      ++j.cursor;
    } else {
      log_insert(ed, b);
    }
    if (!copied_all) ++j.frontier;
  }

  void job_erase(u64 i) {
    CopyState& j = *job_;
    if (j.stage == CopyStage::Done) {
      part_erase(i);
      return;
    }
    const bool copied_all = j.stage == CopyStage::Synchronizing;
    if (!copied_all && i > j.frontier) return;
    const u64 ed = j.Ud.select0(i);
    if (j.stage == CopyStage::Synchronizing && ed <= j.cursor) {
      part_erase(i);
      j.Ud.set(ed, true);
    } else {
      log_erase(ed);
    }
    if (!copied_all) --j.frontier;
  }

  void replay_one() {
    CopyState& j = *job_;
    const u64 done = j.U.rank1(j.cursor);
    if (done == j.U.ones()) {
      j.stage = CopyStage::Done;
      j.U = DynBitSeq();
      j.T = DynBitSeq();
      j.Bn = DynBitSeq();
      j.Ud = DynBitSeq();
      return;
    }
    const u64 p = j.U.select1(done + 1);
    const u64 pos = p - j.Ud.rank1(j.cursor);  // copy position of E element p
    const bool ins = j.T.access(done + 1);
    if (ins) {
      if (!j.Ud.access(p)) part_insert(pos, j.Bn.access(j.T.rank1(done + 1)));
    } else {
      part_erase(pos);
    }
    j.cursor = p;
  }

  SectorSetConfig cfg_;
  std::vector<DynBitSeq> sectors_;
  Fenwick g_, g0_, g1_;
  std::optional<CopyState> job_;
};

}  // namespace dynseq
