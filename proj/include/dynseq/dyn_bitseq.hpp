#pragma once

// Dynamic bit sequence: a B-tree of bit-packed leaves with per-child
// (bit-count, one-count) summaries. Leaves that contain only zeros and were
// created by init_zeros() are kept as bare run lengths, so a logical all-zero
// sequence of any length costs one node.
//
// Positions in the public interface are 1-based; rank(b, i) counts positions
// 1..i, select(b, j) returns the position of the j-th b.

#include <algorithm>
#include <cassert>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynseq/bits.hpp"
#include "dynseq/error.hpp"
#include "dynseq/op_counter.hpp"

namespace dynseq {

struct DynBitSeqConfig {
  u64 leaf_bits = 2048;  ///< W; leaves hold between W/2 and 2W bits
  unsigned fanout = 32;  ///< max children per internal node
};

class DynBitSeq {
 public:
  DynBitSeq() : DynBitSeq(DynBitSeqConfig{}) {}
  explicit DynBitSeq(DynBitSeqConfig cfg) : cfg_(cfg) { normalize_cfg(); }

  DynBitSeq(const DynBitSeq& o) : cfg_(o.cfg_), len_(o.len_), ones_(o.ones_), root_(o.root_ ? clone(*o.root_) : nullptr) {}
  DynBitSeq& operator=(const DynBitSeq& o) {
    if (this != &o) {
      DynBitSeq t(o);
      *this = std::move(t);
    }
    return *this;
  }
  DynBitSeq(DynBitSeq&&) noexcept = default;
  DynBitSeq& operator=(DynBitSeq&&) noexcept = default;

  /// Logical all-zero sequence of length m in constant work.
  static DynBitSeq init_zeros(u64 m, DynBitSeqConfig cfg = {}) {
    DynBitSeq s(cfg);
    if (m > 0) {
      auto leaf = std::make_unique<Leaf>();
      leaf->zero_run = true;
      leaf->size = m;
      s.root_ = std::move(leaf);
      s.len_ = m;
    }
    return s;
  }

  /// Bulk construction from packed bits (bit k of the sequence is bit k%64 of words[k/64]).
  static DynBitSeq from_words(std::span<const u64> words, u64 nbits, DynBitSeqConfig cfg = {}) {
    DynBitSeq s(cfg);
    s.append_words(words, nbits);
    return s;
  }

  static DynBitSeq from_string(std::string_view bits01, DynBitSeqConfig cfg = {}) {
    std::vector<u64> w(bits::words_for(bits01.size()) + 1, 0);
    for (std::size_t i = 0; i < bits01.size(); ++i) {
      if (bits01[i] != '0' && bits01[i] != '1') throw ValidationError("bit string must contain only 0/1");
      if (bits01[i] == '1') bits::set(w, i, true);
    }
    return from_words(w, bits01.size(), cfg);
  }

  u64 size() const { return len_; }
  bool empty() const { return len_ == 0; }
  u64 ones() const { return ones_; }
  u64 zeros() const { return len_ - ones_; }
  u64 count(bool b) const { return b ? ones_ : len_ - ones_; }
  const DynBitSeqConfig& config() const { return cfg_; }

  bool access(u64 i) const {
    ops::charge();
    detail::check_range(i >= 1 && i <= len_, "DynBitSeq::access position out of range");
    const Node* n = root_.get();
    u64 p = i - 1;
    while (!n->leaf) {
      const auto& in = static_cast<const Inner&>(*n);
      std::size_t k = 0;
      while (p >= in.sz[k]) p -= in.sz[k++];
      n = in.kids[k].get();
    }
    const auto& lf = static_cast<const Leaf&>(*n);
    return lf.zero_run ? false : bits::get(lf.words, p);
  }
  bool operator[](u64 i) const { return access(i); }

  /// Number of b-bits among positions 1..i.
  u64 rank(bool b, u64 i) const {
    ops::charge();
    detail::check_range(i <= len_, "DynBitSeq::rank position out of range");
    const u64 r1 = rank1_prefix(i);
    return b ? r1 : i - r1;
  }
  u64 rank1(u64 i) const { return rank(true, i); }
  u64 rank0(u64 i) const { return rank(false, i); }

  /// Position of the j-th b-bit.
  u64 select(bool b, u64 j) const {
    ops::charge();
    if (j == 0 || j > count(b)) throw NotFoundError("DynBitSeq::select rank exceeds available bits");
    const Node* n = root_.get();
    u64 k = j - 1;  // 0-based occurrence
    u64 base = 0;
    while (!n->leaf) {
      const auto& in = static_cast<const Inner&>(*n);
      std::size_t c = 0;
      for (;; ++c) {
        const u64 cnt = b ? in.on[c] : in.sz[c] - in.on[c];
        if (k < cnt) break;
        k -= cnt;
        base += in.sz[c];
      }
      n = in.kids[c].get();
    }
    const auto& lf = static_cast<const Leaf&>(*n);
    if (lf.zero_run) return base + k + 1;  // only zeros here
    return base + leaf_select(lf, b, k) + 1;
  }
  u64 select1(u64 j) const { return select(true, j); }
  u64 select0(u64 j) const { return select(false, j); }

  void insert(u64 i, bool b) {
    ops::charge();
    detail::check_range(i >= 1 && i <= len_ + 1, "DynBitSeq::insert position out of range");
    if (!root_) {
      auto lf = std::make_unique<Leaf>();
      root_ = std::move(lf);
    }
    auto extra = insert_rec(*root_, i - 1, b);
    grow_root(std::move(extra));
    ++len_;
    ones_ += b;
  }
  void push_back(bool b) { insert(len_ + 1, b); }

  /// Removes and returns bit i.
  bool erase(u64 i) {
    ops::charge();
    detail::check_range(i >= 1 && i <= len_, "DynBitSeq::erase position out of range");
    const bool b = erase_rec(*root_, i - 1);
    --len_;
    ones_ -= b;
    shrink_root();
    return b;
  }

  /// Overwrites bit i; returns the previous value.
  bool set(u64 i, bool b) {
    ops::charge();
    detail::check_range(i >= 1 && i <= len_, "DynBitSeq::set position out of range");
    const bool old = access(i);
    if (old == b) return old;
    if (set_rec(*root_, i - 1, b)) {
      ones_ += b ? 1 : u64(-1);
    } else {
      erase(i);
      insert(i, b);
    }
    return old;
  }

  /// Bits i..i+len-1 packed into words (bit 0 of word 0 = position i).
  std::vector<u64> extract(u64 i, u64 len) const {
    detail::check_range(i >= 1 && (len == 0 || i + len - 1 <= len_), "DynBitSeq::extract range out of bounds");
    std::vector<u64> out(bits::words_for(len) + 1, 0);
    if (len == 0) return out;
    u64 written = 0;
    extract_rec(*root_, i - 1, len, out, written);
    return out;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(len_);
    auto w = extract(1, len_);
    for (u64 k = 0; k < len_; ++k) s.push_back(bits::get(w, k) ? '1' : '0');
    return s;
  }

  /// Appends nbits bits from words at the end.
  void append_words(std::span<const u64> words, u64 nbits) {
    u64 done = 0;
    while (done < nbits) {
      const u64 take = std::min<u64>(cfg_.leaf_bits, nbits - done);
      auto lf = std::make_unique<Leaf>();
      lf->words.assign(bits::words_for(take) + 1, 0);
      for (u64 k = 0; k < take; k += 64) {
        const unsigned l = static_cast<unsigned>(std::min<u64>(64, take - k));
        lf->words[k / 64] = bits::read(words, done + k, l);
      }
      lf->size = take;
      lf->ones = bits::rank_prefix(lf->words, take);
      len_ += take;
      ones_ += lf->ones;
      push_back_leaf(std::move(lf));
      done += take;
    }
  }

  /// Concatenates o at the end (o is left empty).
  void append(DynBitSeq&& o) {
    if (o.len_ == 0) return;
    auto w = o.extract(1, o.len_);
    append_words(w, o.len_);
    o = DynBitSeq(o.cfg_);
  }

  /// Height of the summary tree (a lone leaf has height 1).
  unsigned height() const {
    unsigned h = 0;
    for (const Node* n = root_.get(); n; ++h) n = n->leaf ? nullptr : static_cast<const Inner*>(n)->kids.front().get();
    return h;
  }

  /// Structural audit; throws InvariantError on violation.
  void validate() const {
    if (!root_) {
      if (len_ || ones_) throw InvariantError("empty root with nonzero counts");
      return;
    }
    u64 sz = 0, on = 0;
    validate_rec(*root_, sz, on);
    if (sz != len_ || on != ones_) throw InvariantError("root counts mismatch");
  }

  // ---- serialization: "SDSB", version u8, length u64, ones u64, payload words ----
  void save(std::ostream& os) const {
    io::put_magic(os, "SDSB");
    io::put<u8>(os, 1);
    io::put<u64>(os, len_);
    io::put<u64>(os, ones_);
    auto w = extract(1, len_);
    w.resize(bits::words_for(len_));
    for (u64 x : w) io::put<u64>(os, x);
  }
  static DynBitSeq load(std::istream& is, DynBitSeqConfig cfg = {}) {
    io::expect_magic(is, "SDSB");
    if (io::get<u8>(is) != 1) throw FormatError("SDSB: unsupported version");
    const u64 len = io::get<u64>(is);
    const u64 ones = io::get<u64>(is);
    if (len > (u64{1} << 46)) throw FormatError("SDSB: length too large");
    std::vector<u64> w(bits::words_for(len) + 1, 0);
    for (u64 k = 0; k < bits::words_for(len); ++k) w[k] = io::get<u64>(is);
    auto s = from_words(w, len, cfg);
    if (s.ones() != ones) throw FormatError("SDSB: ones count mismatch");
    return s;
  }
  /// Size in bits of the serialized form.
  u64 serialized_bits() const { return 8 * (4 + 1 + 8 + 8) + 64 * bits::words_for(len_); }

 private:
  struct Node {
    bool leaf = true;
    u64 size = 0;
    u64 ones = 0;
    virtual ~Node() = default;
  };
  struct Leaf final : Node {
    Leaf() { leaf = true; }
    bool zero_run = false;
    std::vector<u64> words;
  };
  struct Inner final : Node {
    Inner() { leaf = false; }
    std::vector<std::unique_ptr<Node>> kids;
    std::vector<u64> sz, on;
  };
  using Extra = std::vector<std::unique_ptr<Node>>;

  void normalize_cfg() {
    cfg_.leaf_bits = std::max<u64>(64, cfg_.leaf_bits / 64 * 64);
    cfg_.fanout = std::max(4u, cfg_.fanout);
  }

  static std::unique_ptr<Node> clone(const Node& n) {
    if (n.leaf) return std::make_unique<Leaf>(static_cast<const Leaf&>(n));
    const auto& in = static_cast<const Inner&>(n);
    auto c = std::make_unique<Inner>();
    c->size = in.size;
    c->ones = in.ones;
    c->sz = in.sz;
    c->on = in.on;
    for (const auto& k : in.kids) c->kids.push_back(clone(*k));
    return c;
  }

  u64 rank1_prefix(u64 i) const {
    if (i == 0) return 0;
    const Node* n = root_.get();
    u64 p = i, r = 0;
    while (!n->leaf) {
      const auto& in = static_cast<const Inner&>(*n);
      std::size_t k = 0;
      while (p > in.sz[k]) {
        p -= in.sz[k];
        r += in.on[k++];
      }
      n = in.kids[k].get();
    }
    const auto& lf = static_cast<const Leaf&>(*n);
    return lf.zero_run ? r : r + bits::rank_prefix(lf.words, p);
  }

  static u64 leaf_select(const Leaf& lf, bool b, u64 k) {
    const u64 nw = bits::words_for(lf.size);
    for (u64 w = 0; w < nw; ++w) {
      u64 x = b ? lf.words[w] : ~lf.words[w];
      if (w == nw - 1 && (lf.size & 63)) x &= bits::low_mask(lf.size & 63);
      const u64 c = std::popcount(x);
      if (k < c) return w * 64 + bits::select_in_word(x, static_cast<unsigned>(k));
      k -= c;
    }
    assert(false);
    return lf.size;
  }

  static void leaf_insert_bit(Leaf& lf, u64 pos, bool b) {
    if (lf.words.size() * 64 < lf.size + 1 + 64) lf.words.resize(bits::words_for(lf.size + 1) + 1, 0);
    const u64 k = pos >> 6;
    const unsigned off = pos & 63;
    const u64 last = bits::words_for(lf.size + 1);
    u64 w = lf.words[k];
    u64 carry = w >> 63;
    const u64 lo = w & bits::low_mask(off);
    const u64 hi = off == 64 ? 0 : (w & ~bits::low_mask(off)) << 1;
    lf.words[k] = lo | hi | (u64(b) << off);
    for (u64 j = k + 1; j < last; ++j) {
      const u64 c2 = lf.words[j] >> 63;
      lf.words[j] = (lf.words[j] << 1) | carry;
      carry = c2;
    }
    ++lf.size;
    lf.ones += b;
  }

  static bool leaf_erase_bit(Leaf& lf, u64 pos) {
    const u64 k = pos >> 6;
    const unsigned off = pos & 63;
    const u64 last = bits::words_for(lf.size);
    const bool b = (lf.words[k] >> off) & 1;
    u64 w = lf.words[k];
    const u64 lo = w & bits::low_mask(off);
    const u64 hi = off == 63 ? 0 : (w >> (off + 1)) << off;
    lf.words[k] = lo | hi;
    for (u64 j = k + 1; j < last; ++j) {
      lf.words[j - 1] |= (lf.words[j] & 1) << 63;
      lf.words[j] >>= 1;
    }
    --lf.size;
    lf.ones -= b;
    if (lf.size & 63) lf.words[bits::words_for(lf.size) - 1] &= bits::low_mask(lf.size & 63);
    if (bits::words_for(lf.size) < lf.words.size()) lf.words[bits::words_for(lf.size)] = 0;
    return b;
  }

  std::unique_ptr<Leaf> make_zero_run(u64 m) const {
    auto z = std::make_unique<Leaf>();
    z->zero_run = true;
    z->size = m;
    return z;
  }

  std::unique_ptr<Leaf> make_zero_leaf(u64 m) const {
    auto z = std::make_unique<Leaf>();
    z->size = m;
    z->words.assign(bits::words_for(m) + 1, 0);
    return z;
  }

  std::unique_ptr<Leaf> split_leaf(Leaf& lf) const {
    const u64 h = (lf.size / 2) / 64 * 64;
    auto r = std::make_unique<Leaf>();
    r->size = lf.size - h;
    r->words.assign(lf.words.begin() + h / 64, lf.words.begin() + bits::words_for(lf.size));
    r->words.push_back(0);
    r->ones = bits::rank_prefix(r->words, r->size);
    lf.size = h;
    lf.ones -= r->ones;
    lf.words.resize(h / 64 + 1);
    lf.words.back() = 0;
    return r;
  }

  // Inserting at pos within node n; returns new right siblings created by splits.
  Extra insert_rec(Node& n, u64 pos, bool b) {
    Extra out;
    if (n.leaf) {
      auto& lf = static_cast<Leaf&>(n);
      if (lf.zero_run) {
        if (!b) {
          ++lf.size;
          return out;
        }
        // Materialize a window around pos; flanking zeros stay as runs.
        const u64 half = cfg_.leaf_bits / 2;
        const u64 left = pos, right = lf.size - pos;
        const u64 wl = std::min(left, half), wr = std::min(right, half);
        auto mid = make_zero_leaf(wl + wr);
        leaf_insert_bit(*mid, wl, true);
        const u64 left_rest = left - wl, right_rest = right - wr;
        // Reuse n for the leftmost piece.
        std::vector<std::unique_ptr<Leaf>> pieces;
        if (left_rest) pieces.push_back(make_zero_run(left_rest));
        pieces.push_back(std::move(mid));
        if (right_rest) pieces.push_back(make_zero_run(right_rest));
        lf = std::move(*pieces.front());
        for (std::size_t k = 1; k < pieces.size(); ++k) out.push_back(std::move(pieces[k]));
        return out;
      }
      leaf_insert_bit(lf, pos, b);
      if (lf.size > 2 * cfg_.leaf_bits) out.push_back(split_leaf(lf));
      return out;
    }
    auto& in = static_cast<Inner&>(n);
    std::size_t k = 0;
    while (k + 1 < in.kids.size() && pos > in.sz[k]) pos -= in.sz[k++];
    auto extra = insert_rec(*in.kids[k], pos, b);
    in.size += 1;
    in.ones += b;
    if (extra.empty()) {
      in.sz[k] += 1;
      in.on[k] += b;
    } else {
      in.sz[k] = in.kids[k]->size;
      in.on[k] = in.kids[k]->ones;
      for (std::size_t e = 0; e < extra.size(); ++e) {
        const std::size_t at = k + 1 + e;
        in.sz.insert(in.sz.begin() + at, extra[e]->size);
        in.on.insert(in.on.begin() + at, extra[e]->ones);
        in.kids.insert(in.kids.begin() + at, std::move(extra[e]));
      }
      if (in.kids.size() > cfg_.fanout) out.push_back(split_inner(in));
    }
    return out;
  }

  static std::unique_ptr<Inner> split_inner(Inner& in) {
    const std::size_t h = in.kids.size() / 2;
    auto r = std::make_unique<Inner>();
    for (std::size_t k = h; k < in.kids.size(); ++k) {
      r->sz.push_back(in.sz[k]);
      r->on.push_back(in.on[k]);
      r->size += in.sz[k];
      r->ones += in.on[k];
      r->kids.push_back(std::move(in.kids[k]));
    }
    in.kids.resize(h);
    in.sz.resize(h);
    in.on.resize(h);
    in.size -= r->size;
    in.ones -= r->ones;
    return r;
  }

  void grow_root(Extra extra) {
    if (extra.empty()) return;
    auto nr = std::make_unique<Inner>();
    auto push = [&](std::unique_ptr<Node> c) {
      nr->sz.push_back(c->size);
      nr->on.push_back(c->ones);
      nr->size += c->size;
      nr->ones += c->ones;
      nr->kids.push_back(std::move(c));
    };
    push(std::move(root_));
    for (auto& e : extra) push(std::move(e));
    root_ = std::move(nr);
    if (static_cast<Inner&>(*root_).kids.size() > cfg_.fanout) {
      auto& r = static_cast<Inner&>(*root_);
      Extra more;
      more.push_back(split_inner(r));
      grow_root(std::move(more));
    }
  }

  void shrink_root() {
    while (root_ && !root_->leaf && static_cast<Inner&>(*root_).kids.size() == 1) {
      auto child = std::move(static_cast<Inner&>(*root_).kids[0]);
      root_ = std::move(child);
    }
    if (root_ && root_->leaf && root_->size == 0) root_.reset();
  }

  bool erase_rec(Node& n, u64 pos) {
    if (n.leaf) {
      auto& lf = static_cast<Leaf&>(n);
      if (lf.zero_run) {
        --lf.size;
        return false;
      }
      return leaf_erase_bit(lf, pos);
    }
    auto& in = static_cast<Inner&>(n);
    std::size_t k = 0;
    while (pos >= in.sz[k]) pos -= in.sz[k++];
    const bool b = erase_rec(*in.kids[k], pos);
    in.sz[k] -= 1;
    in.on[k] -= b;
    in.size -= 1;
    in.ones -= b;
    fix_child(in, k);
    return b;
  }

  void remove_kid(Inner& in, std::size_t k) {
    in.kids.erase(in.kids.begin() + k);
    in.sz.erase(in.sz.begin() + k);
    in.on.erase(in.on.begin() + k);
  }

  // Restores size bounds of child k after an erase.
  void fix_child(Inner& in, std::size_t k) {
    Node& c = *in.kids[k];
    if (c.size == 0 && in.kids.size() > 1) {
      remove_kid(in, k);
      return;
    }
    if (c.leaf) {
      auto& lf = static_cast<Leaf&>(c);
      if (lf.zero_run || lf.size >= cfg_.leaf_bits / 2) return;
      std::size_t nb = k + 1 < in.kids.size() ? k + 1 : (k > 0 ? k - 1 : k);
      if (nb == k || !in.kids[nb]->leaf || static_cast<Leaf&>(*in.kids[nb]).zero_run) return;
      const std::size_t l = std::min(k, nb), r = std::max(k, nb);
      auto& a = static_cast<Leaf&>(*in.kids[l]);
      auto& bl = static_cast<Leaf&>(*in.kids[r]);
      concat_leaf(a, bl);
      remove_kid(in, r);
      in.sz[l] = a.size;
      in.on[l] = a.ones;
      if (a.size > 2 * cfg_.leaf_bits) {
        auto right = split_leaf(a);
        in.sz[l] = a.size;
        in.on[l] = a.ones;
        in.sz.insert(in.sz.begin() + l + 1, right->size);
        in.on.insert(in.on.begin() + l + 1, right->ones);
        in.kids.insert(in.kids.begin() + l + 1, std::move(right));
      }
      return;
    }
    auto& ci = static_cast<Inner&>(c);
    if (ci.kids.size() >= cfg_.fanout / 4 || in.kids.size() == 1) return;
    std::size_t nb = k + 1 < in.kids.size() ? k + 1 : k - 1;
    const std::size_t l = std::min(k, nb), r = std::max(k, nb);
    auto& a = static_cast<Inner&>(*in.kids[l]);
    auto& bi = static_cast<Inner&>(*in.kids[r]);
    for (std::size_t j = 0; j < bi.kids.size(); ++j) {
      a.sz.push_back(bi.sz[j]);
      a.on.push_back(bi.on[j]);
      a.kids.push_back(std::move(bi.kids[j]));
    }
    a.size += bi.size;
    a.ones += bi.ones;
    remove_kid(in, r);
    in.sz[l] = a.size;
    in.on[l] = a.ones;
    if (a.kids.size() > cfg_.fanout) {
      auto right = split_inner(a);
      in.sz[l] = a.size;
      in.on[l] = a.ones;
      in.sz.insert(in.sz.begin() + l + 1, right->size);
      in.on.insert(in.on.begin() + l + 1, right->ones);
      in.kids.insert(in.kids.begin() + l + 1, std::move(right));
    }
  }

  static void concat_leaf(Leaf& a, const Leaf& b) {
    const u64 total = a.size + b.size;
    a.words.resize(bits::words_for(total) + 1, 0);
    for (u64 k = 0; k < b.size; k += 64) {
      const unsigned l = static_cast<unsigned>(std::min<u64>(64, b.size - k));
      bits::write(a.words, a.size + k, l, bits::read(b.words, k, l));
    }
    a.size = total;
    a.ones += b.ones;
  }

  // Returns false when the bit lies in a zero run (caller falls back to erase+insert).
  bool set_rec(Node& n, u64 pos, bool b) {
    if (n.leaf) {
      auto& lf = static_cast<Leaf&>(n);
      if (lf.zero_run) return false;
      bits::set(lf.words, pos, b);
      lf.ones += b ? 1 : u64(-1);
      return true;
    }
    auto& in = static_cast<Inner&>(n);
    std::size_t k = 0;
    while (pos >= in.sz[k]) pos -= in.sz[k++];
    if (!set_rec(*in.kids[k], pos, b)) return false;
    in.on[k] += b ? 1 : u64(-1);
    in.ones += b ? 1 : u64(-1);
    return true;
  }

  void extract_rec(const Node& n, u64 pos, u64 len, std::vector<u64>& out, u64& written) const {
    if (n.leaf) {
      const auto& lf = static_cast<const Leaf&>(n);
      const u64 take = std::min(len, lf.size - pos);
      if (!lf.zero_run) {
        for (u64 k = 0; k < take; k += 64) {
          const unsigned l = static_cast<unsigned>(std::min<u64>(64, take - k));
          bits::write(out, written + k, l, bits::read(lf.words, pos + k, l));
        }
      }
      written += take;
      return;
    }
    const auto& in = static_cast<const Inner&>(n);
    std::size_t k = 0;
    while (pos >= in.sz[k]) pos -= in.sz[k++];
    u64 remaining = len;
    for (; k < in.kids.size() && remaining > 0; ++k) {
      const u64 take = std::min(remaining, in.sz[k] - pos);
      extract_rec(*in.kids[k], pos, take, out, written);
      remaining -= take;
      pos = 0;
    }
  }

  void push_back_leaf(std::unique_ptr<Leaf> lf) {
    if (!root_) {
      root_ = std::move(lf);
      return;
    }
    if (root_->leaf) {
      auto& r = static_cast<Leaf&>(*root_);
      if (r.size == 0) {
        root_ = std::move(lf);
        return;
      }
      if (!r.zero_run && r.size + lf->size <= 2 * cfg_.leaf_bits && !lf->zero_run) {
        concat_leaf(r, *lf);
        return;
      }
      Extra e;
      e.push_back(std::move(lf));
      grow_root(std::move(e));
      return;
    }
    auto extra = push_back_rec(static_cast<Inner&>(*root_), std::move(lf));
    grow_root(std::move(extra));
  }

  Extra push_back_rec(Inner& in, std::unique_ptr<Leaf> lf) {
    Extra out;
    in.size += lf->size;
    in.ones += lf->ones;
    Node& last = *in.kids.back();
    if (last.leaf) {
      in.sz.push_back(lf->size);
      in.on.push_back(lf->ones);
      in.kids.push_back(std::move(lf));
    } else {
      auto extra = push_back_rec(static_cast<Inner&>(last), std::move(lf));
      in.sz.back() = last.size;
      in.on.back() = last.ones;
      for (auto& e : extra) {
        in.sz.push_back(e->size);
        in.on.push_back(e->ones);
        in.kids.push_back(std::move(e));
      }
    }
    if (in.kids.size() > cfg_.fanout) out.push_back(split_inner(in));
    return out;
  }

  void validate_rec(const Node& n, u64& sz, u64& on) const {
    if (n.leaf) {
      const auto& lf = static_cast<const Leaf&>(n);
      if (!lf.zero_run) {
        if (lf.size > 2 * cfg_.leaf_bits) throw InvariantError("leaf above 2W bits");
        if (bits::rank_prefix(lf.words, lf.size) != lf.ones) throw InvariantError("leaf ones mismatch");
      } else if (lf.ones != 0) {
        throw InvariantError("zero run with ones");
      }
      sz = lf.size;
      on = lf.ones;
      return;
    }
    const auto& in = static_cast<const Inner&>(n);
    if (in.kids.empty() || in.kids.size() > cfg_.fanout) throw InvariantError("bad fanout");
    if (in.sz.size() != in.kids.size() || in.on.size() != in.kids.size()) throw InvariantError("summary arity");
    u64 ts = 0, to = 0;
    for (std::size_t k = 0; k < in.kids.size(); ++k) {
      u64 cs = 0, co = 0;
      validate_rec(*in.kids[k], cs, co);
      if (cs != in.sz[k] || co != in.on[k]) throw InvariantError("child summary mismatch");
      ts += cs;
      to += co;
    }
    if (ts != in.size || to != in.ones) throw InvariantError("inner totals mismatch");
    sz = ts;
    on = to;
  }

  DynBitSeqConfig cfg_;
  u64 len_ = 0;
  u64 ones_ = 0;
  std::unique_ptr<Node> root_;
};

}  // namespace dynseq
