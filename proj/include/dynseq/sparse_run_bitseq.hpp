#pragma once

// Run-length coded bit sequence for inputs with few zeros.
//
// The bits are cut into codes. A terminated code (v, 1) stands for 1^v 0 and a
// continuation code (v, 0) for 1^v with no terminator; v never exceeds the run
// cap, so a long run of ones becomes several continuation codes followed by a
// terminated one. Ones after the last code are kept in a counter.
//
// Codes are Elias-delta coded and packed into small blocks. Three dynamic bit
// sequences index them:
//   A  - every code as 1^(len-1) 0, len = bits it covers; position -> code
//   Z  - one bit per code, 1 when terminated; zero-rank support
//   A' - every block as 1^(codes in block) 0; code -> block

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "dynseq/bits.hpp"
#include "dynseq/dyn_bitseq.hpp"
#include "dynseq/error.hpp"

namespace dynseq {

struct SparseRunConfig {
  u64 run_cap = 2048;           ///< 2 log^2 n for n = 2^32
  unsigned block_max_codes = 16;  ///< w/4 for w = 64
  unsigned block_max_bits = 32;   ///< w/2
};

class SparseRunBitSeq {
 public:
  struct Code {
    u64 v = 0;
    bool term = true;
    u64 span() const { return v + (term ? 1 : 0); }
    bool operator==(const Code&) const = default;
  };

  SparseRunBitSeq() = default;
  explicit SparseRunBitSeq(SparseRunConfig cfg) : cfg_(cfg) {
    if (cfg_.run_cap < 1 || cfg_.block_max_codes < 1 || delta_len(code_value({cfg_.run_cap, false})) > cfg_.block_max_bits)
      throw ValidationError("SparseRunBitSeq: run cap does not fit a block");
  }

  static SparseRunBitSeq from_words(std::span<const u64> w, u64 nbits, SparseRunConfig cfg = {}) {
    SparseRunBitSeq s(cfg);
    std::vector<Code> codes;
    u64 ones = 0;
    for (u64 p = 0; p < nbits; ++p) {
      if (bits::get(w, p)) {
        if (++ones > cfg.run_cap) {
          codes.push_back({cfg.run_cap, false});
          ones = 1;
        }
      } else {
        codes.push_back({ones, true});
        ones = 0;
      }
    }
    while (!codes.empty() && !codes.back().term) {
      ones += codes.back().v;
      codes.pop_back();
    }
    s.tail_ = ones;
    s.rebuild_from_codes(codes);
    return s;
  }

  static SparseRunBitSeq from_string(std::string_view b01, SparseRunConfig cfg = {}) {
    std::vector<u64> w(bits::words_for(b01.size()) + 1, 0);
    for (std::size_t i = 0; i < b01.size(); ++i) {
      if (b01[i] != '0' && b01[i] != '1') throw ValidationError("bit string must contain only 0/1");
      if (b01[i] == '1') bits::set(w, i, true);
    }
    return from_words(w, b01.size(), cfg);
  }

  u64 size() const { return a_.size() + tail_; }
  u64 zeros() const { return z_.ones(); }
  u64 ones() const { return size() - zeros(); }
  u64 num_codes() const { return z_.size(); }
  u64 num_blocks() const { return blocks_.size(); }

  bool access(u64 i) const {
    detail::check_range(i >= 1 && i <= size(), "SparseRunBitSeq::access position out of range");
    if (i > a_.size()) return true;
    if (a_.access(i)) return true;
    return !z_.access(a_.rank0(i));
  }

  u64 rank0(u64 i) const {
    detail::check_range(i <= size(), "SparseRunBitSeq::rank position out of range");
    if (i >= a_.size()) return z_.ones();
    return z_.rank1(a_.rank0(i));
  }
  u64 rank1(u64 i) const { return i - rank0(i); }
  u64 rank(bool b, u64 i) const { return b ? rank1(i) : rank0(i); }

  u64 select0(u64 j) const {
    if (j == 0 || j > zeros()) throw NotFoundError("SparseRunBitSeq::select0 rank exceeds zeros");
    return a_.select0(z_.select1(j));
  }
  u64 select1(u64 j) const {
    if (j == 0 || j > ones()) throw NotFoundError("SparseRunBitSeq::select1 rank exceeds ones");
    // Largest k with (ones before the k-th zero) < j.
    u64 lo = 0, hi = zeros();
    while (lo < hi) {
      const u64 mid = (lo + hi + 1) / 2;
      if (select0(mid) - mid < j)
        lo = mid;
      else
        hi = mid - 1;
    }
    return j + lo;
  }
  u64 select(bool b, u64 j) const { return b ? select1(j) : select0(j); }

  void insert(u64 i, bool b) {
    detail::check_range(i >= 1 && i <= size() + 1, "SparseRunBitSeq::insert position out of range");
    if (i > a_.size()) {
      const u64 o = i - a_.size() - 1;  // offset inside the tail
      if (b) {
        ++tail_;
        return;
      }
      // Tail ones before the new zero become terminated/continuation codes.
      std::vector<Code> add = split_run(o);
      tail_ -= o;
      append_codes(add);
      return;
    }
    const u64 c = a_.rank0(i - 1) + 1;  // code containing position i
    const u64 start = c == 1 ? 1 : a_.select0(c - 1) + 1;
    const u64 o = i - start;
    const Code old = code_at(c);
    Code cur = old;
    std::vector<Code> rep;
    if (b) {
      ++cur.v;
      if (cur.v > cfg_.run_cap) {
        rep.push_back({cfg_.run_cap, false});
        rep.push_back({cur.v - cfg_.run_cap, cur.term});
      } else {
        rep.push_back(cur);
      }
    } else {
      rep.push_back({o, true});
      if (cur.v - o > 0 || cur.term) rep.push_back({cur.v - o, cur.term});
    }
    replace_code(c, start, old, rep);
  }

  bool erase(u64 i) {
    detail::check_range(i >= 1 && i <= size(), "SparseRunBitSeq::erase position out of range");
    if (i > a_.size()) {
      --tail_;
      return true;
    }
    const u64 c = a_.rank0(i - 1) + 1;
    const u64 start = c == 1 ? 1 : a_.select0(c - 1) + 1;
    const u64 o = i - start;
    Code cur = code_at(c);
    std::vector<Code> rep;
    bool bit;
    if (o < cur.v) {
      bit = true;
      if (cur.v - 1 > 0 || cur.term) rep.push_back({cur.v - 1, cur.term});
    } else {
      bit = false;
      if (cur.v > 0) rep.push_back({cur.v, false});
    }
    replace_code(c, start, cur, rep);
    fold_tail();
    return bit;
  }

  /// Bits i..i+len-1, packed.
  std::vector<u64> extract(u64 i, u64 len) const {
    detail::check_range(i >= 1 && (len == 0 || i + len - 1 <= size()), "SparseRunBitSeq::extract range out of bounds");
    std::vector<u64> out(bits::words_for(len) + 1, 0);
    u64 w = 0;
    auto put_ones = [&](u64 cnt) {
      while (cnt > 0) {
        const unsigned k = static_cast<unsigned>(std::min<u64>(64, cnt));
        bits::write(out, w, k, bits::low_mask(k));
        w += k;
        cnt -= k;
      }
    };
    if (i <= a_.size() && len > 0) {
      const u64 c = a_.rank0(i - 1) + 1;
      const u64 start = c == 1 ? 1 : a_.select0(c - 1) + 1;
      u64 skip = i - start;
      u64 b = block_of(c);
      u64 off = c - 1 - first_code_of(b);
      std::vector<Code> codes;
      for (; b < blocks_.size() && w < len; ++b, off = 0) {
        decode_block(blocks_[b], codes);
        for (u64 k = off; k < codes.size() && w < len; ++k) {
          const Code& cd = codes[k];
          u64 ones = cd.v, zero = cd.term ? 1 : 0;
          const u64 s1 = std::min(skip, ones);
          ones -= s1;
          skip -= s1;
          const u64 s0 = std::min(skip, zero);
          zero -= s0;
          skip -= s0;
          put_ones(std::min(ones, len - w));
          if (zero && w < len) ++w;  // the zero bit is already 0
        }
      }
    }
    if (w < len) put_ones(len - w);
    return out;
  }

  std::string to_string() const {
    auto w = extract(1, size());
    std::string s;
    for (u64 k = 0; k < size(); ++k) s.push_back(bits::get(w, k) ? '1' : '0');
    return s;
  }

  void validate() const {
    a_.validate();
    z_.validate();
    ap_.validate();
    if (ap_.zeros() != blocks_.size()) throw InvariantError("A' block count mismatch");
    if (ap_.ones() != z_.size()) throw InvariantError("A' code count mismatch");
    if (a_.zeros() != z_.size()) throw InvariantError("A code count mismatch");
    std::vector<Code> codes;
    u64 c = 0, apos = 1;
    for (u64 b = 0; b < blocks_.size(); ++b) {
      decode_block(blocks_[b], codes);
      if (codes.empty() || codes.size() > cfg_.block_max_codes) throw InvariantError("block code count out of bounds");
      if (blocks_[b].nbits > cfg_.block_max_bits) throw InvariantError("block too long");
      for (const Code& cd : codes) {
        ++c;
        if (cd.v > cfg_.run_cap || (!cd.term && cd.v == 0)) throw InvariantError("bad code");
        if (z_.access(c) != cd.term) throw InvariantError("Z mismatch");
        apos += cd.span();
        if (a_.access(apos - 1)) throw InvariantError("A boundary mismatch");
      }
    }
    if (c != z_.size()) throw InvariantError("block code total mismatch");
    if (c > 0 && !z_.access(c)) throw InvariantError("trailing continuation code");
  }

  // ---- serialization: "SDSR", version u8, run cap u64, tail u64, code count u64, bit length u64, code stream ----
  void save(std::ostream& os) const {
    io::put_magic(os, "SDSR");
    io::put<u8>(os, 1);
    io::put<u64>(os, cfg_.run_cap);
    io::put<u64>(os, tail_);
    bits::BitWriter bw;
    std::vector<Code> codes;
    for (const Block& b : blocks_) bw.put(b.bits, b.nbits);
    io::put<u64>(os, num_codes());
    const u64 nb = bw.size();
    io::put<u64>(os, nb);
    auto w = bw.finish();
    for (u64 k = 0; k < bits::words_for(nb); ++k) io::put<u64>(os, w[k]);
  }
  static SparseRunBitSeq load(std::istream& is, SparseRunConfig cfg = {}) {
    io::expect_magic(is, "SDSR");
    if (io::get<u8>(is) != 1) throw FormatError("SDSR: unsupported version");
    cfg.run_cap = io::get<u64>(is);
    SparseRunBitSeq s(cfg);
    s.tail_ = io::get<u64>(is);
    const u64 ncodes = io::get<u64>(is);
    const u64 nb = io::get<u64>(is);
    if (nb > (u64{1} << 40) || ncodes > nb) throw FormatError("SDSR: bad sizes");
    std::vector<u64> w(bits::words_for(nb) + 2, 0);
    for (u64 k = 0; k < bits::words_for(nb); ++k) w[k] = io::get<u64>(is);
    std::vector<Code> codes;
    u64 p = 0;
    for (u64 k = 0; k < ncodes; ++k) {
      if (p >= nb) throw FormatError("SDSR: truncated code stream");
      codes.push_back(s.value_code(delta_decode(w, p)));
    }
    if (p != nb) throw FormatError("SDSR: trailing bits in code stream");
    s.rebuild_from_codes(codes);
    return s;
  }
  /// Bits of the serialized form (header plus code stream).
  u64 serialized_bits() const {
    u64 nb = 0;
    for (const Block& b : blocks_) nb += b.nbits;
    return 8 * (4 + 1 + 8 + 8 + 8 + 8) + 64 * bits::words_for(nb);
  }
  /// Bits of the code stream alone.
  u64 payload_bits() const {
    u64 nb = 0;
    for (const Block& b : blocks_) nb += b.nbits;
    return nb;
  }

 private:
  struct Block {
    u64 bits = 0;
    u8 nbits = 0;
  };

  static u64 code_value(Code c) { return 2 * c.v + (c.term ? 0 : 1) + 1; }
  Code value_code(u64 x) const {
    --x;
    return Code{x / 2, (x & 1) == 0};
  }

  static unsigned delta_len(u64 x) {
    const unsigned l = bits::width_for(x);
    const unsigned ll = bits::width_for(l);
    return 2 * ll - 1 + (l - 1);
  }
  static void delta_put(bits::BitWriter& bw, u64 x) {
    const unsigned l = bits::width_for(x);
    const unsigned ll = bits::width_for(l);
    bw.put(0, ll - 1);
    // Gamma of l, most significant bit first.
    for (int k = static_cast<int>(ll) - 1; k >= 0; --k) bw.put_bit((l >> k) & 1);
    for (int k = static_cast<int>(l) - 2; k >= 0; --k) bw.put_bit((x >> k) & 1);
  }
  static u64 delta_decode(std::span<const u64> w, u64& p) {
    unsigned z = 0;
    while (!bits::get(w, p)) {
      ++z;
      ++p;
      if (z > 7) throw FormatError("bad delta code");
    }
    u64 l = 0;
    for (unsigned k = 0; k <= z; ++k) l = (l << 1) | bits::get(w, p++);
    if (l == 0 || l > 64) throw FormatError("bad delta code");
    u64 x = 1;
    for (u64 k = 1; k < l; ++k) x = (x << 1) | bits::get(w, p++);
    return x;
  }

  void decode_block(const Block& b, std::vector<Code>& out) const {
    out.clear();
    const u64 w[2] = {b.bits, 0};
    u64 p = 0;
    while (p < b.nbits) out.push_back(value_code(delta_decode(w, p)));
  }

  // Greedy packing of codes into blocks within the configured bounds.
  std::vector<Block> pack(std::span<const Code> codes) const {
    std::vector<Block> out;
    bits::BitWriter bw;
    unsigned k = 0;
    auto flush = [&] {
      if (k == 0) return;
      Block b;
      b.nbits = static_cast<u8>(bw.size());
      auto w = bw.finish();
      b.bits = w.empty() ? 0 : w[0];
      out.push_back(b);
      bw = bits::BitWriter();
      k = 0;
    };
    for (const Code& c : codes) {
      const unsigned len = delta_len(code_value(c));
      if (k == cfg_.block_max_codes || bw.size() + len > cfg_.block_max_bits) flush();
      delta_put(bw, code_value(c));
      ++k;
    }
    flush();
    return out;
  }

  void rebuild_from_codes(const std::vector<Code>& codes) {
    blocks_ = pack(codes);
    u64 alen = 0;
    for (const Code& c : codes) alen += c.span();
    std::vector<u64> aw(bits::words_for(alen) + 1, ~u64{0});
    std::vector<u64> zw(bits::words_for(codes.size()) + 1, 0);
    u64 p = 0;
    for (u64 k = 0; k < codes.size(); ++k) {
      p += codes[k].span();
      bits::set(aw, p - 1, false);
      if (codes[k].term) bits::set(zw, k, true);
    }
    a_ = DynBitSeq::from_words(aw, alen);
    z_ = DynBitSeq::from_words(zw, codes.size());
    std::vector<Code> tmp;
    std::vector<u64> apw(bits::words_for(codes.size() + blocks_.size()) + 1, 0);
    u64 q = 0;
    for (const Block& b : blocks_) {
      decode_block(b, tmp);
      for (std::size_t k = 0; k < tmp.size(); ++k) bits::set(apw, q++, true);
      ++q;
    }
    ap_ = DynBitSeq::from_words(apw, q);
  }

  // Runs of o ones followed by a zero, split at the cap.
  std::vector<Code> split_run(u64 o) const {
    std::vector<Code> r;
    while (o > cfg_.run_cap) {
      r.push_back({cfg_.run_cap, false});
      o -= cfg_.run_cap;
    }
    r.push_back({o, true});
    return r;
  }

  u64 block_of(u64 c) const { return ap_.select1(c) - c; }
  u64 first_code_of(u64 b) const { return b == 0 ? 0 : ap_.select0(b) - b; }

  Code code_at(u64 c) const {
    const u64 b = block_of(c);
    std::vector<Code> codes;
    decode_block(blocks_[b], codes);
    return codes[c - 1 - first_code_of(b)];
  }

  void append_codes(const std::vector<Code>& add) {
    for (const Code& cd : add) {
      const u64 c = num_codes() + 1;
      for (u64 k = 1; k < cd.span(); ++k) a_.push_back(true);
      a_.push_back(false);
      z_.push_back(cd.term);
      if (!blocks_.empty()) {
        std::vector<Code> codes;
        const u64 b = blocks_.size() - 1;
        decode_block(blocks_[b], codes);
        codes.push_back(cd);
        replace_block(b, codes);
      } else {
        auto nb = pack(std::span<const Code>(&cd, 1));
        blocks_ = nb;
        ap_.push_back(true);
        ap_.push_back(false);
      }
      (void)c;
    }
  }

  // Replaces block b by the packing of codes and fixes A'.
  void replace_block(u64 b, const std::vector<Code>& codes) {
    std::vector<Code> old;
    decode_block(blocks_[b], old);
    auto nb = pack(codes);
    const u64 s = b == 0 ? 1 : ap_.select0(b) + 1;  // first A' bit of block b
    for (u64 k = 0; k <= old.size(); ++k) ap_.erase(s);
    blocks_.erase(blocks_.begin() + b);
    blocks_.insert(blocks_.begin() + b, nb.begin(), nb.end());
    u64 p = s;
    std::vector<Code> tmp;
    for (const Block& x : nb) {
      decode_block(x, tmp);
      for (std::size_t k = 0; k < tmp.size(); ++k) ap_.insert(p++, true);
      ap_.insert(p++, false);
    }
  }

  // Replaces code c (starting at A position start) by rep.
  void replace_code(u64 c, u64 start, Code old, const std::vector<Code>& rep) {
    // A: the old span 1^(L-1) 0 becomes the concatenation of rep spans.
    const u64 L = old.span();
    u64 nl = 0;
    for (const Code& r : rep) nl += r.span();
    if (nl == L + 1) {
      a_.insert(start, true);
      a_.set(start + L, true);
    } else if (nl + 1 == L) {
      a_.erase(start + L - 1);
      if (nl > 0) a_.set(start + nl - 1, true);
    } else if (nl == L) {
      a_.set(start + L - 1, true);
    } else {
      throw InvariantError("replace_code span mismatch");
    }
    u64 q = start;
    for (const Code& r : rep) {
      q += r.span();
      a_.set(q - 1, false);
    }
    // Z.
    z_.erase(c);
    for (std::size_t k = 0; k < rep.size(); ++k) z_.insert(c + k, rep[k].term);
    // Blocks.
    const u64 b = block_of_after_erase(c);
    std::vector<Code> codes;
    decode_block(blocks_[b], codes);
    const u64 off = c - 1 - first_code_of(b);
    codes.erase(codes.begin() + off);
    codes.insert(codes.begin() + off, rep.begin(), rep.end());
    if (codes.empty()) {
      const u64 s = b == 0 ? 1 : ap_.select0(b) + 1;
      ap_.erase(s);  // the lone code's 1
      ap_.erase(s);  // block terminator
      blocks_.erase(blocks_.begin() + b);
    } else {
      replace_block(b, codes);
    }
  }

  // Block holding code c; A' still describes the pre-edit codes.
  u64 block_of_after_erase(u64 c) const { return block_of(c); }

  // Trailing continuation codes move into the tail counter.
  void fold_tail() {
    while (num_codes() > 0 && !z_.access(num_codes())) {
      const u64 c = num_codes();
      const u64 start = c == 1 ? 1 : a_.select0(c - 1) + 1;
      const Code cur = code_at(c);
      for (u64 k = 0; k < cur.span(); ++k) a_.erase(start);
      z_.erase(c);
      const u64 b = blocks_.size() - 1;
      std::vector<Code> codes;
      decode_block(blocks_[b], codes);
      codes.pop_back();
      if (codes.empty()) {
        const u64 s = b == 0 ? 1 : ap_.select0(b) + 1;
        ap_.erase(s);
        ap_.erase(s);
        blocks_.pop_back();
      } else {
        replace_block(b, codes);
      }
      tail_ += cur.v;
    }
  }

  SparseRunConfig cfg_;
  std::vector<Block> blocks_;
  DynBitSeq a_, z_, ap_;
  u64 tail_ = 0;
};

}  // namespace dynseq
