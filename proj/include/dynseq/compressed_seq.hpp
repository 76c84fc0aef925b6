#pragma once

// Fully dynamic compressed sequence. New symbols go to a dynamic part S_0;
// everything else lives in static entropy-coded sections S_1..S_r, which are
// substrings of S with S_0 removed. Deletions from a section are lazy (a 0 in
// M and in D_a). R tells S_0 elements from section elements.
//
// Select starts from the sampled sequence ~S (all of S_0 plus about every r-th
// section occurrence of each symbol); W~_a encodes per occurrence of a whether
// it is sampled, which gives sel' with one select and one rank.
//
// Two background processes keep S_0 and the lazy deletions below n/r: Migrate
// moves S_0 into the sections and Purge drops deleted elements. Both sweep S
// left to right: elements behind the frontier are appended to an open section
// (queried from a plain array), old sections are consumed from the front, and
// a closed section is compiled into its static form in slices.

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynseq/chunked_string.hpp"
#include "dynseq/dyn_bitseq.hpp"
#include "dynseq/entropy.hpp"
#include "dynseq/fenwick.hpp"
#include "dynseq/op_counter.hpp"
#include "dynseq/section_counts.hpp"
#include "dynseq/static_seq.hpp"

namespace dynseq {

enum class CountChoice : u8 { Auto, Array, Bits };

struct CompressedConfig {
  u64 r = 0;                 ///< section count; 0 picks log n / log log n (at least 2)
  u64 step_budget = 0;       ///< sweep units per update; 0 spreads a phase over n/4r updates
  u64 min_section = 64;      ///< smallest target section length
  u64 n_hint = 0;            ///< length used to pick r and the count mode when starting small
  CountChoice counts = CountChoice::Auto;
  bool auto_maintain = true; ///< run background work after every update
  bool audit_steps = false;  ///< validate after every maintenance step (test hook)
  ChunkedConfig s0{};
  ChunkedConfig sampled{};
  StaticSeqConfig sections{0, 64, true};
};

enum class Phase : u8 { Idle, Migrate, Purge };

struct MaintProgress {
  Phase phase = Phase::Idle;
  u64 frontier = 0;  ///< positions (live and deleted) already swept
  u64 length = 0;    ///< live plus deleted length
  u64 pending_builds = 0;
};

struct CompressedStats {
  u64 n = 0, deleted = 0, s0 = 0, sampled = 0, sections = 0;
  u64 r = 0, section_target = 0;
  u64 migrations = 0, purges = 0, builds = 0;
  Phase phase = Phase::Idle;
  CountMode count_mode = CountMode::Array;
};

struct SpaceReport {
  u64 n = 0;
  u64 bits_total = 0;
  std::vector<std::pair<std::string, u64>> bits_per_section;
  double h0 = 0.0;
  unsigned k = 0;
  double hk = 0.0;
  u64 static_coded_bits = 0;  ///< Huffman payload of all sections
};

/// sel' bracket for the j-th live a: first/last are positions in M (0 and
/// length+1 stand for the ends), occ_* their indexes among all a-occurrences.
struct SelectBracket {
  u64 target = 0;
  u64 first = 0, last = 0;
  u64 occ_first = 0, occ_last = 0;
};

class CompressedSeq {
 public:
  explicit CompressedSeq(u32 sigma, CompressedConfig cfg = {})
      : sigma_(sigma), cfg_(cfg), s0_(check_sigma(sigma), cfg.s0), ts_(sigma, cfg.sampled) {
    w_ = std::max(1u, bits::ceil_log2(sigma_));
    d_.resize(sigma_ + 1);
    tw_.resize(sigma_ + 1);
    cnt_.resize(sigma_ + 1);
    gap_.assign(sigma_ + 1, Gap{});
    mode_ = pick_mode(std::max<u64>(cfg_.n_hint, 0));
    calibrate(std::max<u64>(cfg_.n_hint, 1));
  }

  static CompressedSeq from_symbols(std::span<const u32> s, u32 sigma, CompressedConfig cfg = {}) {
    CompressedSeq q(sigma, cfg);
    for (u32 a : s) q.check_symbol(a);
    q.mode_ = q.pick_mode(std::max<u64>(cfg.n_hint, s.size()));
    q.assign(s);
    return q;
  }

  u64 size() const { return n_; }
  u32 sigma() const { return sigma_; }
  u64 deleted() const { return deleted_; }
  u64 length() const { return m_.size(); }
  u64 s0_size() const { return s0_.size(); }
  u64 sections() const { return secs_.size(); }
  u64 r() const { return r_; }
  Phase phase() const { return phase_; }
  CountMode count_mode() const { return mode_; }
  const CompressedConfig& config() const { return cfg_; }

  u64 count(u32 a) const {
    check_symbol(a);
    return d_[a] ? d_[a]->ones() : 0;
  }

  CompressedStats stats() const {
    CompressedStats s = stats_;
    s.n = n_;
    s.deleted = deleted_;
    s.s0 = s0_.size();
    s.sampled = ts_.size();
    s.sections = secs_.size();
    s.r = r_;
    s.section_target = target_;
    s.phase = phase_;
    s.count_mode = mode_;
    return s;
  }

  // ---------------------------------------------------------------- queries

  u32 access(u64 i) const {
    detail::check_range(i >= 1 && i <= n_, "CompressedSeq::access position out of range");
    return symbol_at(m_.select1(i));
  }

  /// Occurrences of a among positions 1..i.
  u64 rank(u32 a, u64 i) const {
    detail::check_range(i <= n_, "CompressedSeq::rank position out of range");
    check_symbol(a);
    if (i == 0 || !d_[a]) return 0;
    return d_[a]->rank1(rank_all(a, m_.select1(i)));
  }

  /// Position of the j-th a.
  u64 select(u32 a, u64 j) const {
    check_symbol(a);
    if (!d_[a] || j == 0 || j > d_[a]->ones()) throw NotFoundError("CompressedSeq::select no such occurrence");
    const u64 ip = d_[a]->select1(j);
    const u64 p = sel_prime_raw(a, ip);
    const u64 first = p ? te_.select1(p) : 0;
    u64 x = first;
    if (!first || rank_all(a, first) != ip) {
      // Between first and the answer there is no S_0 occurrence of a.
      const u64 i0 = first ? s0_rank(a, rb_.rank0(first)) : 0;
      const auto hit = cnt_[a]->find(ip - i0);
      const std::size_t t = index_of(hit.key);
      const u64 v1 = secs_[t]->select(a, ip - i0 - hit.before);
      x = rb_.select1(v1 + sizes_.prefix(t));
    }
    return m_.rank1(x);
  }

  /// sel'_a(i', ~S): position in ~S of the last sampled a-occurrence among the
  /// first i' occurrences of a (live or deleted); 0 if none.
  u64 sel_prime(u32 a, u64 ip) const {
    check_symbol(a);
    if (!tw_[a] || ip == 0 || ip > d_[a]->size()) throw RangeError("CompressedSeq::sel_prime occurrence out of range");
    return sel_prime_raw(a, ip);
  }

  SelectBracket select_bracket(u32 a, u64 j) const {
    check_symbol(a);
    if (!d_[a] || j == 0 || j > d_[a]->ones()) throw NotFoundError("CompressedSeq::select_bracket no such occurrence");
    SelectBracket b;
    b.target = d_[a]->select1(j);
    const u64 f = tw_[a]->rank1(tw_[a]->select0(b.target));
    b.first = f ? te_.select1(ts_.select(a, f)) : 0;
    b.last = f < ts_.count(a) ? te_.select1(ts_.select(a, f + 1)) : m_.size() + 1;
    b.occ_first = b.first ? rank_all(a, b.first) : 0;
    b.occ_last = b.last <= m_.size() ? rank_all(a, b.last) : d_[a]->size() + 1;
    return b;
  }

  /// S[i..i+len-1].
  std::vector<u32> extract(u64 i, u64 len) const {
    std::vector<u32> out;
    if (len == 0) return out;
    detail::check_range(i >= 1 && len <= n_ && i <= n_ - len + 1, "CompressedSeq::extract range out of bounds");
    out.reserve(len);
    const u64 x0 = m_.select1(i), x1 = m_.select1(i + len - 1);
    const u64 span = x1 - x0 + 1;
    const auto R = rb_.extract(x0, span);
    const auto M = m_.extract(x0, span);
    const u64 ones = bits::rank_prefix(R, span);
    const u64 z0 = x0 == 1 ? 0 : rb_.rank0(x0 - 1);
    std::vector<u32> str0 = s0_symbols(z0 + 1, span - ones);
    std::vector<u32> str1;
    str1.reserve(ones);
    static_symbols((x0 - 1 - z0) + 1, ones, str1);
    std::size_t p0 = 0, p1 = 0;
    for (u64 base = 0; base < span; base += 64) {
      const unsigned cnt = static_cast<unsigned>(std::min<u64>(64, span - base));
      const u64 mask = bits::low_mask(cnt);
      const u64 r = R[base >> 6] & mask, m = M[base >> 6] & mask;
      if (r == mask && m == mask) {
        out.insert(out.end(), str1.begin() + p1, str1.begin() + p1 + cnt);
        p1 += cnt;
        continue;
      }
      if (r == 0) {
        out.insert(out.end(), str0.begin() + p0, str0.begin() + p0 + cnt);
        p0 += cnt;
        continue;
      }
      for (unsigned k = 0; k < cnt; ++k) {
        if (!((r >> k) & 1))
          out.push_back(str0[p0++]);
        else if ((m >> k) & 1)
          out.push_back(str1[p1++]);
        else
          ++p1;
      }
    }
    return out;
  }

  std::vector<u32> to_vector() const { return n_ ? extract(1, n_) : std::vector<u32>{}; }

  // ---------------------------------------------------------------- updates

  void insert(u64 i, u32 a) {
    detail::check_range(i >= 1 && i <= n_ + 1, "CompressedSeq::insert position out of range");
    check_symbol(a);
    ensure_symbol(a);
    const u64 x = i <= n_ ? m_.select1(i) : m_.size() + 1;
    const u64 k = rank_all(a, x - 1) + 1;
    const u64 z = x == 1 ? 0 : rb_.rank0(x - 1);
    s0_.insert(z + 1, a);
    sw_insert(z + 1, a);
    rb_.insert(x, false);
    m_.insert(x, true);
    d_[a]->insert(k, true);
    const u64 ps = (x == 1 ? 0 : te_.rank1(x - 1)) + 1;
    te_.insert(x, true);
    ts_.insert(ps, a);
    tb_.insert(ps, false);
    const u64 w0 = occ_start(a, k);
    tw_[a]->insert(w0, false);
    tw_[a]->insert(w0, true);
    ++n_;
    if (phase_ != Phase::Idle && x <= frontier_) ++frontier_;
    after_update();
  }
  void push_back(u32 a) { insert(n_ + 1, a); }

  /// Removes position i and returns its symbol.
  u32 erase(u64 i) {
    detail::check_range(i >= 1 && i <= n_, "CompressedSeq::erase position out of range");
    const u64 x = m_.select1(i);
    u32 a;
    if (rb_.access(x)) {
      a = symbol_at(x);
      const u64 k = rank_all(a, x);
      m_.set(x, false);
      d_[a]->set(k, false);
      ++deleted_;
    } else {
      const u64 z = rb_.rank0(x);
      a = s0_.access(z);
      const u64 k = rank_all(a, x);
      s0_.erase(z);
      sw_erase(z);
      const u64 ps = te_.rank1(x);
      ts_.erase(ps);
      tb_.erase(ps);
      te_.erase(x);
      const u64 w0 = occ_start(a, k);
      tw_[a]->erase(w0);
      tw_[a]->erase(w0);
      d_[a]->erase(k);
      rb_.erase(x);
      m_.erase(x);
      if (phase_ != Phase::Idle && x <= frontier_) --frontier_;
    }
    --n_;
    after_update();
    return a;
  }

  // ------------------------------------------------------------ maintenance

  /// Advances the active phase by budget units (0 = the per-update budget).
  MaintProgress maintenance_step(u64 budget = 0) {
    if (phase_ == Phase::Idle) maybe_start_phase();
    if (phase_ != Phase::Idle) {
      u64 left = budget ? budget : budget_;
      while (left > 0 && phase_ != Phase::Idle) {
        if (!building_.empty() && (sweep_done_ || build_turn_)) {
          build_slice();
          left -= std::min<u64>(left, kBuildCost);
          build_turn_ = false;
        } else if (!sweep_done_) {
          left -= std::min(left, sweep_slice(left));
          build_turn_ = true;
        }
        if (sweep_done_ && building_.empty()) finish_phase();
      }
      spent_ += (budget ? budget : budget_) - left;
      if (cfg_.audit_steps) validate();
    }
    return progress();
  }

  MaintProgress progress() const { return MaintProgress{phase_, frontier_, m_.size(), static_cast<u64>(building_.size())}; }

  /// Starts a phase by hand; ignored while another one runs.
  void start(Phase p) {
    if (phase_ == Phase::Idle && p != Phase::Idle) start_phase(p);
  }

  /// Runs background work until S_0 is empty, nothing is marked deleted and
  /// no phase is active.
  void quiesce() {
    for (;;) {
      while (phase_ != Phase::Idle) maintenance_step(u64{1} << 40);
      if (s0_.size() > 0)
        start_phase(Phase::Migrate);
      else if (deleted_ > 0)
        start_phase(Phase::Purge);
      else
        break;
    }
    s0_.quiesce();
    ts_.quiesce();
  }

  // ------------------------------------------------------------ inspection

  struct Audit {
    u64 n, deleted, s0, r;
    u64 s0_bound;       ///< n / r
    bool within_bounds; ///< s0 and deleted both within n / r plus one phase of slack
  };
  Audit audit() const {
    Audit a{n_, deleted_, s0_.size(), r_, n_ / r_, true};
    const u64 slack = 16;
    a.within_bounds = a.s0 <= a.s0_bound + slack && a.deleted <= a.s0_bound + slack;
    return a;
  }

  /// Structural audit; deep also decodes everything and cross-checks.
  void validate(bool deep = false) const {
    auto fail = [](const char* m) { throw InvariantError(std::string("CompressedSeq: ") + m); };
    const u64 N = m_.size();
    if (rb_.size() != N || te_.size() != N) fail("M, R and ~E lengths differ");
    if (m_.ones() != n_ || m_.zeros() != deleted_) fail("M counts");
    if (rb_.zeros() != s0_.size()) fail("R zeros differ from |S_0|");
    if (sw_.size() != s0_.size() * w_) fail("S_w length");
    if (tb_.size() != ts_.size() || te_.ones() != ts_.size()) fail("~S, ~B and ~E disagree");
    if (tb_.zeros() != s0_.size()) fail("~B zeros differ from |S_0|");
    u64 total = 0;
    for (std::size_t t = 0; t < secs_.size(); ++t) {
      if (t && secs_[t - 1]->key >= secs_[t]->key) fail("section keys out of order");
      if (sizes_.get(t) != secs_[t]->size()) fail("section size table");
      total += secs_[t]->size();
    }
    if (total != rb_.ones()) fail("sections do not cover the R ones");
    u64 dz = 0;
    for (u32 a = 1; a <= sigma_; ++a) {
      if (!d_[a]) continue;
      cnt_[a]->validate();
      if (d_[a]->size() != s0_.count(a) + cnt_[a]->total()) fail("D_a length");
      if (tw_[a]->zeros() != d_[a]->size() || tw_[a]->ones() != ts_.count(a)) fail("W~_a counts");
      dz += d_[a]->zeros();
    }
    if (dz != deleted_) fail("D_a zeros differ from the deleted count");
    if (phase_ != Phase::Idle) {
      if (frontier_ > N) fail("frontier past the end");
      u64 fresh = 0;
      for (std::size_t t = 0; t < old_idx_; ++t) fresh += secs_[t]->size();
      if (fresh != rb_.rank1(frontier_)) fail("swept prefix differs from the new sections");
    }
    s0_.validate();
    ts_.validate();
    if (!deep) return;
    // Decode every element, deleted ones included.
    std::vector<u32> all(N);
    {
      auto z = s0_symbols(1, s0_.size());
      std::vector<u32> st;
      static_symbols(1, rb_.ones(), st);
      std::size_t p0 = 0, p1 = 0;
      for (u64 x = 1; x <= N; ++x) all[x - 1] = rb_.access(x) ? st[p1++] : z[p0++];
      if (z != s0_.to_vector()) fail("S_w differs from S_0");
    }
    std::vector<u64> occ(sigma_ + 1, 0);
    std::vector<u32> sampled;
    std::vector<bool> sampled_b;
    for (u64 x = 1; x <= N; ++x) {
      const u32 a = all[x - 1];
      const u64 k = ++occ[a];
      if (!d_[a] || k > d_[a]->size()) fail("occurrence missing from D_a");
      if (d_[a]->access(k) != m_.access(x)) fail("D_a bit differs from M");
      const bool e = te_.access(x);
      if (!rb_.access(x) && !e) fail("S_0 element missing from ~S");
      if (tw_[a]->access(occ_start(a, k)) != e) fail("W~_a disagrees with ~E");
      if (e) {
        sampled.push_back(a);
        sampled_b.push_back(rb_.access(x));
      }
    }
    for (u32 a = 1; a <= sigma_; ++a)
      if (d_[a] && d_[a]->size() != occ[a]) fail("D_a has extra occurrences");
    if (sampled != ts_.to_vector()) fail("~S content");
    for (u64 p = 0; p < sampled_b.size(); ++p)
      if (tb_.access(p + 1) != sampled_b[p]) fail("~B content");
  }

  // ---------------------------------------------------------- serialization

  void save(std::ostream& os) const {
    const auto blobs = components();
    io::put_magic(os, "SDSQ");
    io::put<u8>(os, 1);
    io::put<u32>(os, static_cast<u32>(blobs.size()));
    u64 off = 0;
    for (const auto& [id, b] : blobs) {
      io::put<u32>(os, id);
      io::put<u64>(os, off);
      io::put<u64>(os, 8 * static_cast<u64>(b.size()));
      off += b.size();
    }
    for (const auto& [id, b] : blobs) os.write(b.data(), static_cast<std::streamsize>(b.size()));
  }

  static CompressedSeq load(std::istream& is, CompressedConfig cfg = {}) {
    io::expect_magic(is, "SDSQ");
    if (io::get<u8>(is) != 1) throw FormatError("SDSQ: unsupported version");
    const u32 m = io::get<u32>(is);
    if (m > 64) throw FormatError("SDSQ: too many components");
    struct Ent {
      u32 id;
      u64 off, bits;
    };
    std::vector<Ent> tab(m);
    for (auto& e : tab) {
      e.id = io::get<u32>(is);
      e.off = io::get<u64>(is);
      e.bits = io::get<u64>(is);
      if (e.bits % 8 || e.bits / 8 > (u64{1} << 40)) throw FormatError("SDSQ: bad component length");
    }
    std::unordered_map<u32, std::string> blob;
    u64 off = 0;
    for (const auto& e : tab) {
      if (e.off != off) throw FormatError("SDSQ: component offsets not contiguous");
      std::string b(e.bits / 8, '\0');
      is.read(b.data(), static_cast<std::streamsize>(b.size()));
      if (!is) throw FormatError("SDSQ: truncated component");
      blob[e.id] = std::move(b);
      off += e.bits / 8;
    }
    auto part = [&](u32 id) {
      auto it = blob.find(id);
      if (it == blob.end()) throw FormatError("SDSQ: missing component " + std::to_string(id));
      return std::istringstream(it->second);
    };
    try {
      auto hs = part(kHeader);
      const u32 sigma = io::get<u32>(hs);
      if (sigma == 0) throw FormatError("SDSQ: empty alphabet");
      CompressedSeq q(sigma, cfg);
      q.n_ = io::get<u64>(hs);
      q.deleted_ = io::get<u64>(hs);
      q.r_ = std::max<u64>(1, io::get<u64>(hs));
      q.target_ = std::max<u64>(1, io::get<u64>(hs));
      q.mode_ = io::get<u8>(hs) ? CountMode::Bits : CountMode::Array;
      {
        auto s = part(kS0);
        q.s0_ = ChunkedString::load(s, cfg.s0);
        auto t = part(kSampled);
        q.ts_ = ChunkedString::load(t, cfg.sampled);
      }
      auto bit = [&](u32 id) {
        auto s = part(id);
        return DynBitSeq::load(s);
      };
      q.m_ = bit(kM);
      q.rb_ = bit(kR);
      q.te_ = bit(kE);
      q.tb_ = bit(kB);
      {
        auto ds = part(kD);
        auto ws = part(kW);
        const u32 present = io::get<u32>(ds);
        if (io::get<u32>(ws) != present) throw FormatError("SDSQ: D and W~ symbol sets differ");
        for (u32 t = 0; t < present; ++t) {
          const u32 a = io::get<u32>(ds);
          if (a < 1 || a > sigma || io::get<u32>(ws) != a) throw FormatError("SDSQ: bad symbol in D/W~");
          q.ensure_symbol(a);
          *q.d_[a] = DynBitSeq::load(ds);
          *q.tw_[a] = DynBitSeq::load(ws);
        }
      }
      {
        auto ss = part(kSections);
        const u64 cnt = io::get<u64>(ss);
        if (cnt > (u64{1} << 32)) throw FormatError("SDSQ: too many sections");
        std::vector<std::vector<std::pair<u64, u64>>> per(sigma + 1);
        std::vector<u64> sz;
        for (u64 t = 0; t < cnt; ++t) {
          auto sec = std::make_unique<Section>();
          sec->key = make_key(0, t);
          sec->st = std::make_unique<StaticSeq>(StaticSeq::load(ss));
          if (sec->st->sigma() != sigma) throw FormatError("SDSQ: section alphabet differs");
          for (u32 a = 1; a <= sigma; ++a) {
            const u64 c = sec->st->count(a);
            if (c) per[a].emplace_back(sec->key, c);
          }
          sz.push_back(sec->size());
          q.secs_.push_back(std::move(sec));
        }
        q.sizes_.assign(sz);
        for (u32 a = 1; a <= sigma; ++a) {
          if (per[a].empty()) continue;
          if (!q.cnt_[a]) throw FormatError("SDSQ: section symbol without D_a");
          q.cnt_[a]->assign(per[a]);
        }
      }
      {
        auto v = q.s0_.to_vector();
        q.sw_ = DynBitSeq();
        q.sw_append(v);
      }
      q.validate();
      return q;
    } catch (const InvariantError& e) {
      throw FormatError(std::string("SDSQ: inconsistent structure: ") + e.what());
    }
  }

  u64 serialized_bits() const {
    std::ostringstream os;
    save(os);
    return 8 * static_cast<u64>(os.str().size());
  }

  /// Serialized bits per component plus the empirical entropies of the live string.
  SpaceReport space_report(unsigned k = 2) const {
    if (k > 3) throw ValidationError("CompressedSeq::space_report context length above 3");
    SpaceReport rep;
    rep.n = n_;
    rep.k = k;
    std::ostringstream os;
    save(os);
    rep.bits_total = 8 * static_cast<u64>(os.str().size());
    for (const auto& [id, b] : components()) rep.bits_per_section.emplace_back(component_name(id), 8 * static_cast<u64>(b.size()));
    const auto v = to_vector();
    rep.h0 = entropy_h0(v);
    rep.hk = entropy_hk(v, k);
    for (const auto& s : secs_)
      if (s->st) rep.static_coded_bits += s->st->coded_bits();
    return rep;
  }

 private:
  struct Gap {
    u32 epoch = 0;
    u32 run = 0;
  };

  // A static section, or an open/closed one still held as a plain array while
  // its static form is compiled.
  struct Section {
    u64 key = 0;
    std::unique_ptr<StaticSeq> st;
    u64 skip = 0;  ///< leading symbols of st already swept away
    std::vector<u32> sym;
    std::unordered_map<u32, std::vector<u32>> occ;
    std::unique_ptr<StaticSeq::Builder> builder;

    u64 size() const { return st ? st->size() - skip : sym.size(); }
    u32 access(u64 p) const { return st ? st->access(skip + p) : sym[p - 1]; }
    u64 rank(u32 a, u64 p) const {
      if (st) return st->rank(a, skip + p) - (skip ? st->rank(a, skip) : 0);
      auto it = occ.find(a);
      if (it == occ.end()) return 0;
      return std::upper_bound(it->second.begin(), it->second.end(), p) - it->second.begin();
    }
    u64 select(u32 a, u64 j) const {
      if (st) return st->select(a, (skip ? st->rank(a, skip) : 0) + j) - skip;
      return occ.at(a).at(j - 1);
    }
    void extract_into(u64 p, u64 len, std::vector<u32>& out) const {
      if (st) {
        st->extract_into(skip + p, len, out);
      } else {
        ops::charge(1 + len / 64);
        out.insert(out.end(), sym.begin() + (p - 1), sym.begin() + (p - 1 + len));
      }
    }
    void append(u32 a) {
      sym.push_back(a);
      occ[a].push_back(static_cast<u32>(sym.size()));
    }
  };

  enum : u32 { kHeader = 1, kS0 = 2, kM = 3, kR = 4, kE = 5, kB = 6, kSampled = 7, kD = 8, kW = 9, kSections = 10 };
  static const char* component_name(u32 id) {
    switch (id) {
      case kHeader: return "header";
      case kS0: return "s0";
      case kM: return "m";
      case kR: return "r";
      case kE: return "tilde_e";
      case kB: return "tilde_b";
      case kSampled: return "tilde_s";
      case kD: return "d";
      case kW: return "tilde_w";
      case kSections: return "sections";
    }
    return "?";
  }

  // Sweep cost units: one per static element moved, more for edits that touch
  // the dynamic structures, a build slice per StaticSeq::kSlice symbol visits.
  static constexpr u64 kHeavyCost = 8;
  static constexpr u64 kBuildCost = 64;
  static constexpr u64 kWindow = 256;

  static u32 check_sigma(u32 sigma) {
    if (sigma == 0) throw ValidationError("CompressedSeq: empty alphabet");
    return sigma;
  }
  void check_symbol(u32 a) const {
    if (a < 1 || a > sigma_) throw ValidationError("CompressedSeq: symbol out of range");
  }

  static u64 make_key(u64 epoch, u64 seq) { return ((u64{0xFFFFFFFF} - (epoch & 0xFFFFFFFF)) << 32) | (seq & 0xFFFFFFFF); }

  static u64 auto_r(u64 n) {
    const double lg = std::log2(std::max<double>(n, 16));
    return std::max<u64>(2, static_cast<u64>(std::llround(lg / std::log2(lg))));
  }
  CountMode pick_mode(u64 n) const {
    if (cfg_.counts == CountChoice::Array) return CountMode::Array;
    if (cfg_.counts == CountChoice::Bits) return CountMode::Bits;
    const double lg = std::log2(std::max<double>(n, 16));
    return static_cast<double>(sigma_) > static_cast<double>(std::max<u64>(n, 16)) / (lg * lg * lg) ? CountMode::Bits : CountMode::Array;
  }
  void calibrate(u64 n) {
    r_ = cfg_.r ? cfg_.r : auto_r(n);
    target_ = std::max<u64>(std::max<u64>(cfg_.min_section, 1), (n + r_ - 1) / r_);
  }
  u64 threshold() const { return std::max<u64>(1, n_ / (4 * r_)); }

  void ensure_symbol(u32 a) {
    if (d_[a]) return;
    d_[a] = std::make_unique<DynBitSeq>(DynBitSeqConfig{1024, 16});
    tw_[a] = std::make_unique<DynBitSeq>(DynBitSeqConfig{1024, 16});
    cnt_[a] = std::make_unique<SectionCounts>(mode_);
  }

  std::size_t index_of(u64 key) const {
    auto it = std::lower_bound(secs_.begin(), secs_.end(), key, [](const auto& s, u64 k) { return s->key < k; });
    if (it == secs_.end() || (*it)->key != key) throw InvariantError("CompressedSeq: unknown section key");
    return static_cast<std::size_t>(it - secs_.begin());
  }

  // Section and local offset of the j-th section element.
  std::pair<std::size_t, u64> locate(u64 j) const {
    const std::size_t t = sizes_.find(j);
    return {t, j - sizes_.prefix(t)};
  }

  u64 s0_rank(u32 a, u64 z) const { return z ? s0_.rank(a, z) : 0; }

  // Occurrences of a among the first j section elements.
  u64 static_rank(u32 a, u64 j) const {
    if (j == 0 || !cnt_[a]) return 0;
    const auto [t, local] = locate(j);
    return cnt_[a]->before(secs_[t]->key) + secs_[t]->rank(a, local);
  }

  // Occurrences of a (live or deleted) among M positions 1..x.
  u64 rank_all(u32 a, u64 x) const {
    if (x == 0) return 0;
    const u64 z = rb_.rank0(x);
    return s0_rank(a, z) + static_rank(a, x - z);
  }

  u32 symbol_at(u64 x) const {
    if (!rb_.access(x)) return s0_.access(rb_.rank0(x));
    const auto [t, local] = locate(rb_.rank1(x));
    return secs_[t]->access(local);
  }

  u64 sel_prime_raw(u32 a, u64 ip) const {
    const u64 f = tw_[a]->rank1(tw_[a]->select0(ip));
    return f ? ts_.select(a, f) : 0;
  }

  // Start of the k-th occurrence's code in W~_a (one past the end for k = count + 1).
  u64 occ_start(u32 a, u64 k) const { return k == 1 ? 1 : tw_[a]->select0(k - 1) + 1; }

  // ---- S_w: symbols of S_0 packed w bits each ----
  void sw_insert(u64 z, u32 a) {
    const u64 p = (z - 1) * w_ + 1;
    for (unsigned b = w_; b-- > 0;) sw_.insert(p, ((a - 1) >> b) & 1);
  }
  void sw_erase(u64 z) {
    const u64 p = (z - 1) * w_ + 1;
    for (unsigned b = 0; b < w_; ++b) sw_.erase(p);
  }
  void sw_append(const std::vector<u32>& v) {
    bits::BitWriter bw;
    for (u32 a : v) bw.put(a - 1, w_);
    const u64 len = bw.size();
    sw_.append_words(bw.finish(), len);
  }
  std::vector<u32> s0_symbols(u64 z, u64 cnt) const {
    std::vector<u32> out;
    if (cnt == 0) return out;
    out.reserve(cnt);
    const auto w = sw_.extract((z - 1) * w_ + 1, cnt * w_);
    for (u64 t = 0; t < cnt; ++t) out.push_back(static_cast<u32>(bits::read(w, t * w_, w_)) + 1);
    return out;
  }
  void static_symbols(u64 j, u64 cnt, std::vector<u32>& out) const {
    if (cnt == 0) return;
    auto [t, local] = locate(j);
    while (cnt > 0) {
      const u64 take = std::min(cnt, secs_[t]->size() - local + 1);
      secs_[t]->extract_into(local, take, out);
      cnt -= take;
      ++t;
      local = 1;
    }
  }

  // ---- bulk construction ----
  void assign(std::span<const u32> s) {
    const u64 n = s.size();
    calibrate(n);
    n_ = n;
    deleted_ = 0;
    std::vector<u64> ones(bits::words_for(n) + 1, ~u64{0});
    m_ = DynBitSeq::from_words(ones, n);
    rb_ = DynBitSeq::from_words(ones, n);
    std::vector<std::vector<std::pair<u64, u64>>> per(sigma_ + 1);
    std::vector<u64> sz;
    std::vector<u64> c(sigma_ + 1, 0);
    for (u64 b = 0, t = 0; b < n; b += target_, ++t) {
      const u64 e = std::min(n, b + target_);
      auto sec = std::make_unique<Section>();
      sec->key = make_key(epoch_, t);
      sec->st = std::make_unique<StaticSeq>(StaticSeq::build(s.subspan(b, e - b), sigma_, cfg_.sections));
      for (u64 i = b; i < e; ++i) ++c[s[i]];
      for (u64 i = b; i < e; ++i)
        if (c[s[i]]) {
          per[s[i]].emplace_back(sec->key, c[s[i]]);
          c[s[i]] = 0;
        }
      sz.push_back(e - b);
      secs_.push_back(std::move(sec));
    }
    sizes_.assign(sz);
    // Sampling: every r-th occurrence of each symbol.
    std::vector<u64> run(sigma_ + 1, 0);
    std::vector<bits::BitWriter> tw(sigma_ + 1);
    bits::BitWriter e;
    std::vector<u32> samp;
    for (u64 i = 0; i < n; ++i) {
      const u32 a = s[i];
      const bool take = ++run[a] >= r_;
      if (take) {
        run[a] = 0;
        samp.push_back(a);
        tw[a].put_bit(true);
      }
      tw[a].put_bit(false);
      e.put_bit(take);
    }
    {
      const u64 len = e.size();
      te_ = DynBitSeq::from_words(e.finish(), len);
    }
    ts_ = ChunkedString::from_symbols(samp, sigma_, cfg_.sampled);
    std::vector<u64> all1(bits::words_for(samp.size()) + 1, ~u64{0});
    tb_ = DynBitSeq::from_words(all1, samp.size());
    for (u32 a = 1; a <= sigma_; ++a) {
      if (per[a].empty()) continue;
      ensure_symbol(a);
      cnt_[a]->assign(per[a]);
      const u64 occ = cnt_[a]->total();
      std::vector<u64> w1(bits::words_for(occ) + 1, ~u64{0});
      *d_[a] = DynBitSeq::from_words(w1, occ, d_[a]->config());
      const u64 len = tw[a].size();
      *tw_[a] = DynBitSeq::from_words(tw[a].finish(), len, tw_[a]->config());
    }
  }

  // ---- background phases ----
  void after_update() {
    if (!cfg_.auto_maintain) return;
    maybe_start_phase();
    if (phase_ == Phase::Idle) return;
    ++phase_updates_;
    maintenance_step(cfg_.step_budget ? cfg_.step_budget : paced_budget());
  }

  // Spreads what is left of the phase over the updates left before its
  // deadline, using the cost per swept position observed so far.
  u64 paced_budget() const {
    constexpr double kPrior = 1024;
    const double rate = (static_cast<double>(spent_) + prior_rate_ * kPrior) / (static_cast<double>(frontier_) + kPrior);
    const double rest = static_cast<double>(m_.size() - std::min(frontier_, m_.size())) * rate + static_cast<double>(kBuildCost * (building_.size() + 1));
    const u64 left = phase_len_ > phase_updates_ ? phase_len_ - phase_updates_ : 1;
    const u64 b = static_cast<u64>(std::ceil(rest / static_cast<double>(left)));
    return std::clamp<u64>(b, 16, budget_);
  }

  void maybe_start_phase() {
    if (phase_ != Phase::Idle) return;
    const u64 thr = threshold();
    const bool mig = s0_.size() >= thr, pur = deleted_ >= thr;
    if (mig && pur)
      start_phase(last_ == Phase::Migrate ? Phase::Purge : Phase::Migrate);
    else if (mig)
      start_phase(Phase::Migrate);
    else if (pur)
      start_phase(Phase::Purge);
  }

  void start_phase(Phase p) {
    phase_ = p;
    ++epoch_;
    seq_ = 0;
    frontier_ = 0;
    old_idx_ = 0;
    sweep_done_ = false;
    build_turn_ = false;
    buf_.clear();
    buf_pos_ = 0;
    const u64 N = m_.size();
    const u64 heavy = p == Phase::Migrate ? s0_.size() : deleted_;
    const u64 kept = rb_.ones() + (p == Phase::Migrate ? s0_.size() : 0) - (p == Phase::Purge ? deleted_ : 0);
    calibrate(std::max<u64>(n_, 1));
    target_ = std::max<u64>(std::max<u64>(cfg_.min_section, 1), (kept + r_ - 1) / r_);
    const u64 work = N + kHeavyCost * (heavy + 2 * kept / r_) + kBuildCost * (4 * kept / StaticSeq::kSlice + secs_.size() + 2 * r_);
    const u64 len = std::max<u64>(1, n_ / (4 * r_));
    budget_ = cfg_.step_budget ? cfg_.step_budget : (work + len - 1) / len + kBuildCost;
    prior_rate_ = static_cast<double>(N + kHeavyCost * heavy + kBuildCost * (4 * kept / StaticSeq::kSlice)) / static_cast<double>(std::max<u64>(N, 1));
    phase_len_ = len;
    phase_updates_ = 0;
    spent_ = 0;
    if (p == Phase::Migrate)
      ++stats_.migrations;
    else
      ++stats_.purges;
  }

  void finish_phase() {
    last_ = phase_;
    phase_ = Phase::Idle;
    open_ = nullptr;
    old_idx_ = 0;
    buf_.clear();
    buf_pos_ = 0;
  }

  Gap& gap(u32 a) {
    Gap& g = gap_[a];
    if (g.epoch != static_cast<u32>(epoch_)) g = Gap{static_cast<u32>(epoch_), 0};
    return g;
  }

  // One window of the sweep; returns the units spent.
  u64 sweep_slice(u64 left) {
    const u64 N = m_.size();
    if (frontier_ >= N) {
      close_open();
      sweep_done_ = true;
      return 1;
    }
    const u64 y = frontier_ + 1;
    const u64 win = std::min<u64>({left, N - frontier_, kWindow});
    const auto R = rb_.extract(y, win);
    const auto M = m_.extract(y, win);
    const auto E = te_.extract(y, win);
    u64 used = 0;
    for (u64 q = 0; q < win && used < left; ++q) {
      const u64 x = y + q;
      if (!bits::get(R, q)) {
        if (phase_ == Phase::Migrate) {
          migrate_s0(x);
          used += kHeavyCost;
        } else {
          used += 1;
        }
        frontier_ = x;
        continue;
      }
      if (phase_ == Phase::Purge && !bits::get(M, q)) {
        purge_ghost(x);
        return used + kHeavyCost;  // positions after x moved
      }
      used += move_static(x, bits::get(E, q));
      frontier_ = x;
    }
    return std::max<u64>(used, 1);
  }

  Section& old_section() { return *secs_[old_idx_]; }

  // Next unswept symbol of the first old section.
  u32 peek_old() {
    if (buf_pos_ == buf_.size()) {
      Section& s = old_section();
      buf_.clear();
      buf_pos_ = 0;
      s.extract_into(1, std::min<u64>(s.size(), 4096), buf_);
    }
    return buf_[buf_pos_];
  }
  void consume_old(u32 a) {
    Section& s = old_section();
    ++s.skip;
    ++buf_pos_;
    cnt_[a]->sub(s.key);
    sizes_.sub(old_idx_, 1);
    if (s.size() == 0) {
      secs_.erase(secs_.begin() + static_cast<std::ptrdiff_t>(old_idx_));
      sizes_.erase(old_idx_);
      buf_.clear();
      buf_pos_ = 0;
    }
  }

  Section& open_section() {
    if (open_ && open_->sym.size() >= target_) close_open();
    if (!open_) {
      auto sec = std::make_unique<Section>();
      sec->key = make_key(epoch_, seq_++);
      open_ = sec.get();
      secs_.insert(secs_.begin() + static_cast<std::ptrdiff_t>(old_idx_), std::move(sec));
      sizes_.insert(old_idx_, 0);
      ++old_idx_;
    }
    return *open_;
  }
  void append_open(u32 a) {
    Section& s = open_section();
    s.append(a);
    cnt_[a]->add(s.key);
    sizes_.add(old_idx_ - 1, 1);
  }

  void close_open() {
    if (!open_) return;
    Section* s = open_;
    open_ = nullptr;
    if (s->sym.empty()) {
      --old_idx_;
      secs_.erase(secs_.begin() + static_cast<std::ptrdiff_t>(old_idx_));
      sizes_.erase(old_idx_);
      return;
    }
    s->builder = std::make_unique<StaticSeq::Builder>(std::span<const u32>(s->sym), sigma_, cfg_.sections);
    building_.push_back(s);
  }

  void build_slice() {
    Section* s = building_.front();
    if (!s->builder->step()) return;
    s->st = std::make_unique<StaticSeq>(s->builder->take());
    s->builder.reset();
    s->skip = 0;
    s->sym = {};
    s->occ = {};
    building_.pop_front();
    ++stats_.builds;
  }

  // Static element at x: moves from the old section to the open one.
  u64 move_static(u64 x, bool sampled) {
    const u32 a = peek_old();
    Gap& g = gap(a);
    const bool keep = ++g.run >= r_;
    if (keep) g.run = 0;
    if (keep && !sampled)
      add_sample(x, a);
    else if (!keep && sampled)
      drop_sample(x, a);
    consume_old(a);
    append_open(a);
    return keep != sampled ? kHeavyCost : 1;
  }

  void add_sample(u64 x, u32 a) {
    const u64 k = rank_all(a, x);
    const u64 ps = te_.rank1(x) + 1;
    te_.set(x, true);
    ts_.insert(ps, a);
    tb_.insert(ps, true);
    tw_[a]->insert(occ_start(a, k), true);
  }

  void drop_sample(u64 x, u32 a) {
    const u64 k = rank_all(a, x);
    const u64 ps = te_.rank1(x);
    ts_.erase(ps);
    tb_.erase(ps);
    te_.set(x, false);
    tw_[a]->erase(occ_start(a, k));
  }

  void migrate_s0(u64 x) {
    const u64 z = rb_.rank0(x);
    const u32 a = s0_.access(z);
    const u64 k = rank_all(a, x);
    const u64 ps = te_.rank1(x);
    Gap& g = gap(a);
    if (++g.run >= r_) {
      g.run = 0;
      tb_.set(ps, true);
    } else {
      ts_.erase(ps);
      tb_.erase(ps);
      te_.set(x, false);
      tw_[a]->erase(occ_start(a, k));
    }
    s0_.erase(z);
    sw_erase(z);
    rb_.set(x, true);
    append_open(a);
  }

  void purge_ghost(u64 x) {
    const u32 a = peek_old();
    const u64 k = rank_all(a, x);
    const u64 w0 = occ_start(a, k);
    if (te_.access(x)) {
      const u64 ps = te_.rank1(x);
      ts_.erase(ps);
      tb_.erase(ps);
      tw_[a]->erase(w0);
    }
    tw_[a]->erase(w0);
    te_.erase(x);
    d_[a]->erase(k);
    m_.erase(x);
    rb_.erase(x);
    --deleted_;
    consume_old(a);
  }

  // ---- serialization helpers ----
  std::vector<std::pair<u32, std::string>> components() const {
    std::vector<std::pair<u32, std::string>> out;
    auto add = [&](u32 id, auto&& fn) {
      std::ostringstream os;
      fn(os);
      out.emplace_back(id, os.str());
    };
    add(kHeader, [&](std::ostream& os) {
      io::put<u32>(os, sigma_);
      io::put<u64>(os, n_);
      io::put<u64>(os, deleted_);
      io::put<u64>(os, r_);
      io::put<u64>(os, target_);
      io::put<u8>(os, mode_ == CountMode::Bits);
    });
    add(kS0, [&](std::ostream& os) { s0_.save(os); });
    add(kM, [&](std::ostream& os) { m_.save(os); });
    add(kR, [&](std::ostream& os) { rb_.save(os); });
    add(kE, [&](std::ostream& os) { te_.save(os); });
    add(kB, [&](std::ostream& os) { tb_.save(os); });
    add(kSampled, [&](std::ostream& os) { ts_.save(os); });
    u32 present = 0;
    for (u32 a = 1; a <= sigma_; ++a) present += d_[a] != nullptr;
    add(kD, [&](std::ostream& os) {
      io::put<u32>(os, present);
      for (u32 a = 1; a <= sigma_; ++a)
        if (d_[a]) {
          io::put<u32>(os, a);
          d_[a]->save(os);
        }
    });
    add(kW, [&](std::ostream& os) {
      io::put<u32>(os, present);
      for (u32 a = 1; a <= sigma_; ++a)
        if (tw_[a]) {
          io::put<u32>(os, a);
          tw_[a]->save(os);
        }
    });
    add(kSections, [&](std::ostream& os) {
      u64 cnt = 0;
      for (const auto& s : secs_) cnt += s->size() > 0;
      io::put<u64>(os, cnt);
      for (const auto& s : secs_) {
        if (s->size() == 0) continue;
        if (s->st && s->skip == 0) {
          s->st->save(os);
        } else {
          std::vector<u32> v;
          s->extract_into(1, s->size(), v);
          StaticSeq::build(v, sigma_, cfg_.sections).save(os);
        }
      }
    });
    return out;
  }

  u32 sigma_;
  CompressedConfig cfg_;
  unsigned w_ = 1;
  u64 n_ = 0, deleted_ = 0;
  u64 r_ = 2, target_ = 64;
  CountMode mode_ = CountMode::Array;

  ChunkedString s0_;
  DynBitSeq sw_;
  DynBitSeq m_, rb_, te_, tb_;
  ChunkedString ts_;
  std::vector<std::unique_ptr<DynBitSeq>> d_, tw_;
  std::vector<std::unique_ptr<SectionCounts>> cnt_;
  std::vector<std::unique_ptr<Section>> secs_;
  Fenwick sizes_;

  Phase phase_ = Phase::Idle, last_ = Phase::Idle;
  u64 epoch_ = 0, seq_ = 0;
  u64 frontier_ = 0;
  std::size_t old_idx_ = 0;
  bool sweep_done_ = false, build_turn_ = false;
  u64 budget_ = 1;  // per-update ceiling of the active phase
  u64 phase_len_ = 1, phase_updates_ = 0, spent_ = 0;
  double prior_rate_ = 1.0;
  Section* open_ = nullptr;
  std::deque<Section*> building_;
  std::vector<Gap> gap_;
  std::vector<u32> buf_;
  std::size_t buf_pos_ = 0;
  CompressedStats stats_;
};

}  // namespace dynseq
