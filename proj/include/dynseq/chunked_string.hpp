#pragma once

// Dynamic string in O(n log sigma) bits. The string is cut into chunks of
// Theta(sigma) symbols, each a ListString (or, for alphabets up to 256, a
// PackedString of a few words). B_t = 1^{n_1} 0 1^{n_2} 0 ... holds
// the chunk sizes and B_a = 1^{d_1} 0 1^{d_2} 0 ... the number of a's per chunk.
//
// A chunk that reaches 2*unit symbols is copied into two halves C', C'' over
// the following updates of that chunk. Copied chunks wait in L_d; a background
// iteration then inserts the separating 0 into every B_a in increasing symbol
// order (lastsym is the last one done) and finally into B_t, at which point
// the chunk is replaced by its halves.
//
// Once too many chunks are small, a fresh copy is assembled in the background
// from whole chunks of unit symbols; edits that land in the copied prefix are
// applied to it as well, and it replaces the original when complete.

#include <algorithm>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <tuple>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "dynseq/dyn_bitseq.hpp"
#include "dynseq/list_string.hpp"
#include "dynseq/op_counter.hpp"
#include "dynseq/packed_string.hpp"

namespace dynseq {

enum class ChunkKind : u8 { Auto, List, Packed };

struct ChunkedConfig {
  u64 unit = 0;                  ///< target chunk size; 0 means max(sigma, 64)
  unsigned step_budget = 8;      ///< background B_a/B_t insertions per update
  unsigned copy_per_update = 4;  ///< symbols copied into C'/C'' per update of a copying chunk
  DynBitSeqConfig bits{};
  ChunkKind kind = ChunkKind::Auto;  ///< Auto packs chunks when sigma <= 256
};

// One chunk: a ListString or a PackedString behind the same interface.
class ChunkSeq {
 public:
  ChunkSeq(u32 sigma, bool packed, u64 capacity) {
    if (packed)
      pk_ = std::make_unique<PackedString>(sigma);
    else
      ls_ = std::make_unique<ListString>(sigma, capacity);
  }
  u64 size() const { return pk_ ? pk_->size() : ls_->size(); }
  u64 count(u32 a) const { return pk_ ? pk_->count(a) : ls_->count(a); }
  u32 access(u64 i) const { return pk_ ? pk_->access(i) : ls_->access(i); }
  u64 rank(u32 a, u64 i) const { return pk_ ? pk_->rank(a, i) : ls_->rank(a, i); }
  u64 select(u32 a, u64 j) const { return pk_ ? pk_->select(a, j) : ls_->select(a, j); }
  void insert(u64 i, u32 a) { pk_ ? pk_->insert(i, a) : ls_->insert(i, a); }
  void push_back(u32 a) { pk_ ? pk_->push_back(a) : ls_->push_back(a); }
  u32 erase(u64 i) { return pk_ ? pk_->erase(i) : ls_->erase(i); }
  std::vector<u32> to_vector() const { return pk_ ? pk_->to_vector() : ls_->to_vector(); }
  void validate() const { pk_ ? pk_->validate() : ls_->validate(); }

 private:
  std::unique_ptr<PackedString> pk_;
  std::unique_ptr<ListString> ls_;
};

struct ChunkedStats {
  u64 chunks = 0;
  u64 small_chunks = 0;
  u64 copying = 0;
  u64 ld_depth = 0;
  u64 splits = 0;
  u64 global_rebuilds = 0;
  u64 max_chunk = 0;
};

class ChunkedString {
 public:
  explicit ChunkedString(u32 sigma, ChunkedConfig cfg = {}) : sigma_(sigma), cfg_(cfg) {
    if (sigma_ == 0) throw ValidationError("ChunkedString: empty alphabet");
    if (cfg_.unit == 0) cfg_.unit = std::max<u64>(sigma_, 64);
    cfg_.unit = std::max<u64>(cfg_.unit, 2);
    cfg_.copy_per_update = std::max(1u, cfg_.copy_per_update);
    cfg_.step_budget = std::max(1u, cfg_.step_budget);
    ba_.resize(sigma_ + 1);
    rebuild_from({});
  }

  static ChunkedString from_symbols(std::span<const u32> s, u32 sigma, ChunkedConfig cfg = {}) {
    ChunkedString c(sigma, cfg);
    for (u32 a : s) c.check_symbol(a);
    c.rebuild_from(s);
    return c;
  }

  u64 size() const { return n_; }
  u32 sigma() const { return sigma_; }
  u64 unit() const { return cfg_.unit; }
  u64 chunks() const { return chunks_.size(); }
  u64 count(u32 a) const {
    check_symbol(a);
    return ba_[a] ? ba_[a]->ones() : 0;
  }
  bool rebuilding() const { return active_ != nullptr; }
  bool compacting() const { return shadow_ != nullptr; }
  u32 lastsym() const { return lastsym_; }

  ChunkedStats stats() const {
    ChunkedStats s = stats_;
    s.chunks = chunks_.size();
    s.small_chunks = small_;
    s.ld_depth = ld_.size();
    s.copying = 0;
    s.max_chunk = 0;
    for (const auto& c : chunks_) {
      s.copying += c->st == St::Copying;
      s.max_chunk = std::max(s.max_chunk, c->s->size());
    }
    return s;
  }

  std::vector<u64> chunk_sizes() const {
    std::vector<u64> v;
    for (const auto& c : chunks_) v.push_back(c->s->size());
    return v;
  }

  u32 access(u64 i) const {
    detail::check_range(i >= 1 && i <= n_, "ChunkedString::access position out of range");
    const auto [idx, local] = locate(i);
    return chunks_[idx - 1]->s->access(local);
  }

  /// Occurrences of a in positions 1..i.
  u64 rank(u32 a, u64 i) const {
    detail::check_range(i <= n_, "ChunkedString::rank position out of range");
    check_symbol(a);
    if (i == 0 || !ba_[a]) return 0;
    const DynBitSeq& B = *ba_[a];
    const u64 j1 = bt_.rank0(bt_.select1(i));
    const u64 i2 = j1 + 1;
    const u64 i1 = i - ones_before(bt_, j1);
    // While B_a is already split, chunks after k sit one run further right.
    const u64 ja = (splitting(a) && j1 >= k_) ? j1 + 1 : j1;
    const u64 v1 = ones_before(B, ja);
    const u64 v2 = chunks_[i2 - 1]->s->rank(a, i1);
    return v1 + v2;
  }

  /// Position of the j-th a.
  u64 select(u32 a, u64 j) const {
    check_symbol(a);
    if (!ba_[a] || j == 0 || j > ba_[a]->ones()) throw NotFoundError("ChunkedString::select no such occurrence");
    const DynBitSeq& B = *ba_[a];
    const u64 i2a = B.rank0(B.select1(j)) + 1;  // run index in B_a
    u64 i2 = i2a, before = i2a - 1;
    if (splitting(a)) {
      if (i2a > k_ + 1) {
        i2 = i2a - 1;
      } else if (i2a >= k_) {
        i2 = k_;
        before = k_ - 1;
      }
    }
    const u64 i1 = ones_before(B, before);
    const u64 va = chunks_[i2 - 1]->s->select(a, j - i1);
    return va + ones_before(bt_, i2 - 1);
  }

  void insert(u64 i, u32 a) {
    detail::check_range(i >= 1 && i <= n_ + 1, "ChunkedString::insert position out of range");
    check_symbol(a);
    u64 idx, local;
    if (i <= n_) {
      std::tie(idx, local) = locate(i);
    } else {
      idx = chunks_.size();
      local = chunks_.back()->s->size() + 1;
    }
    Chunk& c = *chunks_[idx - 1];
    const bool was_small = is_small(c);
    bt_.insert(run_start(bt_, idx), true);
    c.s->insert(local, a);
    const int part = mirror_insert(c, local, a);
    if (!ba_[a]) ba_[a] = std::make_unique<DynBitSeq>(DynBitSeq::init_zeros(chunks_.size() + (splitting(a) ? 1 : 0), cfg_.bits));
    ba_[a]->insert(run_start(*ba_[a], ba_index(a, idx, part)), true);
    ++n_;
    if (shadow_ && i <= shadow_pos_) {
      if (i <= shadow_->n_)
        shadow_->insert(i, a);
      else
        shadow_buf_.insert(shadow_buf_.begin() + (i - shadow_->n_ - 1), a);
      ++shadow_pos_;
    }
    after_update(c, was_small);
  }
  void push_back(u32 a) { insert(n_ + 1, a); }

  /// Removes position i and returns its symbol.
  u32 erase(u64 i) {
    detail::check_range(i >= 1 && i <= n_, "ChunkedString::erase position out of range");
    const auto [idx, local] = locate(i);
    Chunk& c = *chunks_[idx - 1];
    const bool was_small = is_small(c);
    const u32 a = c.s->erase(local);
    const int part = mirror_erase(c, local);
    bt_.erase(run_start(bt_, idx));
    ba_[a]->erase(run_start(*ba_[a], ba_index(a, idx, part)));
    --n_;
    if (shadow_ && i <= shadow_pos_) {
      if (i <= shadow_->n_)
        shadow_->erase(i);
      else
        shadow_buf_.erase(shadow_buf_.begin() + (i - shadow_->n_ - 1));
      --shadow_pos_;
    }
    after_update(c, was_small);
    return a;
  }

  std::vector<u32> to_vector() const {
    std::vector<u32> out;
    out.reserve(n_);
    for (const auto& c : chunks_) {
      auto v = c->s->to_vector();
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }

  /// Runs background work until no split or compaction is pending.
  void quiesce() {
    while (shadow_) compact_step(u64{1} << 40);
    while (active_ || !ld_.empty()) step(1u << 30);
  }

  void validate(bool deep = false) const {
    if (bt_.ones() != n_ || bt_.zeros() != chunks_.size()) throw InvariantError("ChunkedString: B_t totals");
    for (u64 idx = 1; idx <= chunks_.size(); ++idx) {
      const Chunk& c = *chunks_[idx - 1];
      if (run_length(bt_, idx) != c.s->size()) throw InvariantError("ChunkedString: B_t run differs from chunk size");
      if (c.s->size() > hard_cap()) throw InvariantError("ChunkedString: chunk over hard cap");
      if (deep) c.s->validate();
      if (c.st != St::Plain) {
        const u64 got = c.c1->size() + c.c2->size();
        if (got != c.cp || (c.st == St::Copied && c.cp != c.s->size()))
          throw InvariantError("ChunkedString: copy progress");
        if (deep) {
          auto v = c.s->to_vector();
          auto p = c.c1->to_vector();
          auto q = c.c2->to_vector();
          p.insert(p.end(), q.begin(), q.end());
          if (!std::equal(p.begin(), p.end(), v.begin())) throw InvariantError("ChunkedString: C'C'' is not a prefix of C");
        }
      }
    }
    u64 copied = 0;
    for (const auto& c : chunks_) copied += c->st == St::Copied;
    if (copied != ld_.size() + (active_ ? 1 : 0)) throw InvariantError("ChunkedString: L_d differs from copied chunks");
    for (u32 a = 1; a <= sigma_; ++a) {
      if (!ba_[a]) continue;
      const DynBitSeq& B = *ba_[a];
      const bool sp = splitting(a);
      if (B.zeros() != chunks_.size() + (sp ? 1 : 0)) throw InvariantError("ChunkedString: B_a run count");
      u64 run = 1;
      for (u64 idx = 1; idx <= chunks_.size(); ++idx) {
        const Chunk& c = *chunks_[idx - 1];
        if (sp && idx == k_) {
          if (run_length(B, run++) != c.c1->count(a) || run_length(B, run++) != c.c2->count(a))
            throw InvariantError("ChunkedString: split B_a runs");
        } else if (run_length(B, run++) != c.s->count(a)) {
          throw InvariantError("ChunkedString: B_a run differs from chunk count");
        }
      }
    }
    u64 sm = 0;
    for (const auto& c : chunks_) sm += is_small(*c);
    if (sm != small_) throw InvariantError("ChunkedString: small chunk counter");
    if (shadow_) {
      if (shadow_pos_ != shadow_->n_ + shadow_buf_.size() || shadow_pos_ > n_)
        throw InvariantError("ChunkedString: compaction progress");
      shadow_->validate(deep);
      if (deep) {
        auto v = to_vector();
        auto w = shadow_->to_vector();
        w.insert(w.end(), shadow_buf_.begin(), shadow_buf_.end());
        if (!std::equal(w.begin(), w.end(), v.begin())) throw InvariantError("ChunkedString: compacted copy is not a prefix");
      }
    }
  }

  void save(std::ostream& os) const {
    io::put_magic(os, "SDSC");
    io::put<u8>(os, 1);
    io::put<u32>(os, sigma_);
    io::put<u64>(os, cfg_.unit);
    io::put<u64>(os, n_);
    const unsigned w = bits::width_for(sigma_);
    bits::BitWriter bw;
    for (const auto& c : chunks_)
      for (u32 a : c->s->to_vector()) bw.put(a, w);
    auto payload = bw.finish();
    payload.resize(bits::words_for(n_ * w));
    io::put_words(os, payload);
    bt_.save(os);
    u32 present = 0;
    for (u32 a = 1; a <= sigma_; ++a) present += ba_[a] != nullptr;
    io::put<u32>(os, present);
    for (u32 a = 1; a <= sigma_; ++a) {
      if (!ba_[a]) continue;
      io::put<u32>(os, a);
      // Mid-split B_a are written in their unsplit form.
      if (splitting(a))
        canonical_ba(a).save(os);
      else
        ba_[a]->save(os);
    }
  }

  static ChunkedString load(std::istream& is, ChunkedConfig cfg = {}) {
    io::expect_magic(is, "SDSC");
    if (io::get<u8>(is) != 1) throw FormatError("ChunkedString: unsupported version");
    const u32 sigma = io::get<u32>(is);
    cfg.unit = io::get<u64>(is);
    const u64 n = io::get<u64>(is);
    if (sigma == 0 || cfg.unit == 0) throw FormatError("ChunkedString: bad header");
    auto words = io::get_words(is);
    const unsigned w = bits::width_for(sigma);
    if (words.size() != bits::words_for(n * w)) throw FormatError("ChunkedString: symbol payload length");
    words.push_back(0);
    ChunkedString c(sigma, cfg);
    c.bt_ = DynBitSeq::load(is, cfg.bits);
    if (c.bt_.ones() != n || c.bt_.zeros() == 0) throw FormatError("ChunkedString: B_t totals");
    c.chunks_.clear();
    c.n_ = n;
    u64 pos = 0;
    for (u64 idx = 1; idx <= c.bt_.zeros(); ++idx) {
      const u64 len = run_length(c.bt_, idx);
      auto ch = c.make_chunk();
      for (u64 t = 0; t < len; ++t, ++pos) {
        const u32 a = static_cast<u32>(bits::read(words, pos * w, w));
        if (a < 1 || a > sigma) throw FormatError("ChunkedString: symbol out of range");
        ch->s->push_back(a);
      }
      c.chunks_.push_back(std::move(ch));
    }
    const u32 present = io::get<u32>(is);
    for (u32 t = 0; t < present; ++t) {
      const u32 a = io::get<u32>(is);
      if (a < 1 || a > sigma || c.ba_[a]) throw FormatError("ChunkedString: bad B_a symbol");
      c.ba_[a] = std::make_unique<DynBitSeq>(DynBitSeq::load(is, cfg.bits));
    }
    c.small_ = 0;
    for (const auto& ch : c.chunks_) c.small_ += c.is_small(*ch);
    try {
      c.validate();
    } catch (const InvariantError& e) {
      throw FormatError(std::string("ChunkedString: inconsistent data: ") + e.what());
    }
    for (u32 a = 1; a <= sigma; ++a)
      if (!c.ba_[a] && c.count_in_chunks(a) != 0) throw FormatError("ChunkedString: missing B_a");
    return c;
  }

  u64 serialized_bits() const {
    std::ostringstream os;
    save(os);
    return 8 * static_cast<u64>(os.str().size());
  }

 private:
  enum class St : u8 { Plain, Copying, Copied };
  struct Chunk {
    std::unique_ptr<ChunkSeq> s, c1, c2;
    St st = St::Plain;
    u64 cp = 0, target = 0;
  };

  void check_symbol(u32 a) const {
    if (a < 1 || a > sigma_) throw ValidationError("ChunkedString: symbol out of range");
  }

  u64 hard_cap() const { return 4 * cfg_.unit * std::max<u64>(1, bits::ceil_log2(std::max<u64>(n_, 2))); }
  bool is_small(const Chunk& c) const { return c.s->size() < cfg_.unit / 2; }
  bool splitting(u32 a) const { return active_ != nullptr && a <= lastsym_; }

  std::unique_ptr<ChunkSeq> new_seq() const {
    const bool packed = cfg_.kind == ChunkKind::Packed || (cfg_.kind == ChunkKind::Auto && sigma_ <= 256);
    return std::make_unique<ChunkSeq>(sigma_, packed, 8 * cfg_.unit);
  }

  std::unique_ptr<Chunk> make_chunk() const {
    auto c = std::make_unique<Chunk>();
    c->s = new_seq();
    return c;
  }

  // Ones before run j (runs are 1-based, j = 0 gives 0).
  static u64 ones_before(const DynBitSeq& B, u64 j) { return j == 0 ? 0 : B.select0(j) - j; }
  static u64 run_start(const DynBitSeq& B, u64 j) { return j <= 1 ? 1 : B.select0(j - 1) + 1; }
  static u64 run_length(const DynBitSeq& B, u64 j) { return B.select0(j) - run_start(B, j); }

  // Chunk index and offset of position i (1 <= i <= n).
  std::pair<u64, u64> locate(u64 i) const {
    const u64 j1 = bt_.rank0(bt_.select1(i));
    return {j1 + 1, i - ones_before(bt_, j1)};
  }

  // Run of chunk idx inside B_a; part selects C'' of the chunk being split.
  u64 ba_index(u32 a, u64 idx, int part) const {
    if (!splitting(a) || idx < k_) return idx;
    if (idx == k_) return k_ + (part == 1 ? 1 : 0);
    return idx + 1;
  }

  // Returns 0/1 when the edit was mirrored into C'/C'', -1 otherwise.
  static int mirror_insert(Chunk& c, u64 j, u32 a) {
    if (c.st == St::Plain || (c.st == St::Copying && j > c.cp)) return -1;
    ++c.cp;
    const u64 l1 = c.c1->size();
    if (j <= l1) {
      c.c1->insert(j, a);
      return 0;
    }
    c.c2->insert(j - l1, a);
    return 1;
  }
  static int mirror_erase(Chunk& c, u64 j) {
    if (c.st == St::Plain || (c.st == St::Copying && j > c.cp)) return -1;
    --c.cp;
    const u64 l1 = c.c1->size();
    if (j <= l1) {
      c.c1->erase(j);
      return 0;
    }
    c.c2->erase(j - l1);
    return 1;
  }

  void after_update(Chunk& c, bool was_small) {
    small_ += is_small(c);
    small_ -= was_small;
    if (c.s->size() > hard_cap()) throw InvariantError("ChunkedString: chunk exceeded the hard size cap");
    if (c.st == St::Plain && c.s->size() >= 2 * cfg_.unit) {
      c.st = St::Copying;
      c.cp = 0;
      c.target = c.s->size() / 2;
      c.c1 = new_seq();
      c.c2 = new_seq();
    }
    if (c.st == St::Copying) {
      for (unsigned t = 0; t < cfg_.copy_per_update && c.cp < c.s->size(); ++t) {
        const u32 a = c.s->access(c.cp + 1);
        if (c.c2->size() == 0 && c.c1->size() < c.target)
          c.c1->push_back(a);
        else
          c.c2->push_back(a);
        ++c.cp;
      }
      if (c.cp == c.s->size()) {
        c.st = St::Copied;
        ld_.push_back(&c);
      }
    }
    step(cfg_.step_budget);
    if (shadow_)
      compact_step(2 * cfg_.unit);
    else if (!is_shadow_ && chunks_.size() > 1 && small_ >= std::max<u64>(1, n_ / (2 * cfg_.unit)))
      start_compaction();
  }

  void start_compaction() {
    shadow_ = std::make_unique<ChunkedString>(sigma_, cfg_);
    shadow_->is_shadow_ = true;
    shadow_->chunks_.clear();
    shadow_->bt_ = DynBitSeq(cfg_.bits);
    shadow_->small_ = 0;
    shadow_pos_ = 0;
    shadow_buf_.clear();
  }

  // Copies at least `quota` symbols (or eight chunks) into the shadow.
  void compact_step(u64 quota) {
    u64 copied = 0;
    for (int visits = 0; visits < 8 && copied < quota && shadow_pos_ < n_; ++visits) {
      const auto [idx, local] = locate(shadow_pos_ + 1);
      const auto v = chunks_[idx - 1]->s->to_vector();
      ops::charge(1 + v.size() / 64);
      shadow_buf_.insert(shadow_buf_.end(), v.begin() + (local - 1), v.end());
      const u64 took = v.size() - (local - 1);
      shadow_pos_ += took;
      copied += took;
      while (shadow_buf_.size() >= cfg_.unit) {
        shadow_->append_chunk(std::span<const u32>(shadow_buf_).first(cfg_.unit));
        shadow_buf_.erase(shadow_buf_.begin(), shadow_buf_.begin() + cfg_.unit);
      }
    }
    if (shadow_pos_ < n_) return;
    if (!shadow_buf_.empty() || shadow_->chunks_.empty()) shadow_->append_chunk(shadow_buf_);
    ChunkedString& sh = *shadow_;
    chunks_ = std::move(sh.chunks_);
    bt_ = std::move(sh.bt_);
    ba_ = std::move(sh.ba_);
    ld_ = std::move(sh.ld_);
    active_ = sh.active_;
    k_ = sh.k_;
    lastsym_ = sh.lastsym_;
    small_ = sh.small_;
    stats_.splits += sh.stats_.splits;
    ++stats_.global_rebuilds;
    shadow_.reset();
    shadow_buf_.clear();
    shadow_pos_ = 0;
  }

  // Appends one chunk holding s (shadow construction).
  void append_chunk(std::span<const u32> s) {
    auto ch = make_chunk();
    std::unordered_map<u32, u64> cnt;
    for (u32 a : s) {
      ch->s->push_back(a);
      ++cnt[a];
    }
    bits::BitWriter w;
    put_run(w, s.size());
    const u64 wl = w.size();
    bt_.append_words(w.finish(), wl);
    for (u32 a = 1; a <= sigma_; ++a) {
      auto it = cnt.find(a);
      if (!ba_[a]) {
        if (it == cnt.end()) continue;
        ba_[a] = std::make_unique<DynBitSeq>(DynBitSeq::init_zeros(chunks_.size() + (splitting(a) ? 1 : 0), cfg_.bits));
      }
      bits::BitWriter r;
      put_run(r, it == cnt.end() ? 0 : it->second);
      const u64 rl = r.size();
      ba_[a]->append_words(r.finish(), rl);
    }
    ops::charge(1 + sigma_ / 8);
    n_ += s.size();
    chunks_.push_back(std::move(ch));
    small_ += is_small(*chunks_.back());
  }

  // One slice of the background split iteration.
  void step(u64 budget) {
    while (budget > 0) {
      if (!active_) {
        if (ld_.empty()) return;
        auto it = std::max_element(ld_.begin(), ld_.end(), [](const Chunk* x, const Chunk* y) { return x->s->size() < y->s->size(); });
        active_ = *it;
        ld_.erase(it);
        lastsym_ = 0;
        k_ = 0;
        while (chunks_[k_].get() != active_) ++k_;
        ++k_;
      }
      if (lastsym_ < sigma_) {
        const u32 a = lastsym_ + 1;
        if (ba_[a]) {
          ba_[a]->insert(run_start(*ba_[a], k_) + active_->c1->count(a), false);
          --budget;
        } else if ((a & 63) == 0) {
          --budget;
        }
        lastsym_ = a;
        continue;
      }
      finish_split();
      --budget;
    }
  }

  void finish_split() {
    Chunk& c = *active_;
    bt_.insert(run_start(bt_, k_) + c.c1->size(), false);
    small_ -= is_small(c);
    auto left = std::make_unique<Chunk>();
    auto right = std::make_unique<Chunk>();
    left->s = std::move(c.c1);
    right->s = std::move(c.c2);
    small_ += is_small(*left) + is_small(*right);
    chunks_[k_ - 1] = std::move(left);
    chunks_.insert(chunks_.begin() + k_, std::move(right));
    active_ = nullptr;
    lastsym_ = 0;
    k_ = 0;
    ++stats_.splits;
  }

  // Redistributes s into chunks of about unit symbols; drops all pending work.
  void rebuild_from(std::span<const u32> s) {
    shadow_.reset();
    shadow_buf_.clear();
    shadow_pos_ = 0;
    active_ = nullptr;
    ld_.clear();
    lastsym_ = 0;
    k_ = 0;
    n_ = s.size();
    const u64 q = std::max<u64>(1, n_ / cfg_.unit);
    chunks_.clear();
    bits::BitWriter bt;
    std::unordered_map<u32, bits::BitWriter> bw;
    std::unordered_map<u32, u64> cnt;
    u64 pos = 0;
    for (u64 t = 0; t < q; ++t) {
      const u64 len = n_ / q + (t < n_ % q ? 1 : 0);
      auto ch = make_chunk();
      cnt.clear();
      for (u64 r = 0; r < len; ++r) {
        const u32 a = s[pos++];
        ch->s->push_back(a);
        ++cnt[a];
      }
      put_run(bt, len);
      for (auto& [a, d] : cnt) {
        auto [it, fresh] = bw.try_emplace(a);
        if (fresh) put_run(it->second, 0, t);  // chunks before the first occurrence
        put_run(it->second, d);
      }
      for (auto& [a, w] : bw)
        if (!cnt.count(a)) w.put_bit(false);
      chunks_.push_back(std::move(ch));
    }
    const u64 btn = bt.size();
    bt_ = DynBitSeq::from_words(bt.finish(), btn, cfg_.bits);
    for (auto& p : ba_) p.reset();
    for (auto& [a, w] : bw) {
      const u64 len = w.size();
      ba_[a] = std::make_unique<DynBitSeq>(DynBitSeq::from_words(w.finish(), len, cfg_.bits));
    }
    small_ = 0;
    for (const auto& c : chunks_) small_ += is_small(*c);
  }

  // Appends 1^d 0, repeated `times` times.
  static void put_run(bits::BitWriter& w, u64 d, u64 times = 1) {
    for (u64 t = 0; t < times; ++t) {
      for (u64 r = d; r > 0;) {
        const unsigned k = static_cast<unsigned>(std::min<u64>(r, 64));
        w.put(bits::low_mask(k), k);
        r -= k;
      }
      w.put_bit(false);
    }
  }

  DynBitSeq canonical_ba(u32 a) const {
    bits::BitWriter w;
    for (const auto& c : chunks_) put_run(w, c->s->count(a));
    const u64 len = w.size();
    return DynBitSeq::from_words(w.finish(), len, cfg_.bits);
  }

  u64 count_in_chunks(u32 a) const {
    u64 s = 0;
    for (const auto& c : chunks_) s += c->s->count(a);
    return s;
  }

  u32 sigma_;
  ChunkedConfig cfg_;
  u64 n_ = 0;
  std::vector<std::unique_ptr<Chunk>> chunks_;
  DynBitSeq bt_;
  std::vector<std::unique_ptr<DynBitSeq>> ba_;
  std::vector<Chunk*> ld_;
  Chunk* active_ = nullptr;
  u64 k_ = 0;  // 1-based index of the chunk being split
  u32 lastsym_ = 0;
  u64 small_ = 0;
  ChunkedStats stats_;
  std::unique_ptr<ChunkedString> shadow_;
  std::vector<u32> shadow_buf_;
  u64 shadow_pos_ = 0;  // prefix of this string mirrored by shadow_ plus shadow_buf_
  bool is_shadow_ = false;
};

}  // namespace dynseq
