#pragma once

// Short dynamic string stored as fixed-width fields, 64 / w fields per word
// (fields never straddle words). Rank and select compare a whole word against
// the broadcast symbol at once, so every operation costs O(n w / 64) word
// operations. Used for the chunks of ChunkedString when the alphabet is small.

#include <bit>
#include <vector>

#include "dynseq/bits.hpp"
#include "dynseq/error.hpp"
#include "dynseq/op_counter.hpp"

namespace dynseq {

class PackedString {
 public:
  explicit PackedString(u32 sigma = 1) : sigma_(sigma) {
    if (sigma_ == 0) throw ValidationError("PackedString: empty alphabet");
    w_ = bits::width_for(sigma_);
    per_ = 64 / w_;
    u64 low = 0, high = 0;
    for (unsigned f = 0; f < per_; ++f) {
      low |= u64{1} << (f * w_);
      high |= u64{1} << (f * w_ + w_ - 1);
    }
    high_ = high;
    body_ = (high >> (w_ - 1)) * bits::low_mask(w_ - 1);
    low_ = low;
  }

  u64 size() const { return n_; }
  u32 sigma() const { return sigma_; }
  unsigned width() const { return w_; }

  u32 access(u64 i) const {
    ops::charge();
    detail::check_range(i >= 1 && i <= n_, "PackedString::access position out of range");
    return get(i - 1);
  }

  /// Occurrences of a among positions 1..i.
  u64 rank(u32 a, u64 i) const {
    ops::charge();
    detail::check_range(i <= n_, "PackedString::rank position out of range");
    check_symbol(a);
    const u64 full = i / per_;
    u64 r = 0;
    for (u64 k = 0; k < full; ++k) r += std::popcount(matches(k, a));
    const unsigned rest = static_cast<unsigned>(i % per_);
    if (rest) r += std::popcount(matches(full, a) & bits::low_mask(rest * w_));
    return r;
  }

  u64 count(u32 a) const {
    if (a < 1 || a > sigma_) return 0;
    u64 r = 0;
    for (u64 k = 0; k < words(); ++k) r += std::popcount(matches(k, a));
    return r;
  }

  /// Position of the j-th a.
  u64 select(u32 a, u64 j) const {
    ops::charge();
    check_symbol(a);
    if (j == 0) throw NotFoundError("PackedString::select no such occurrence");
    for (u64 k = 0; k < words(); ++k) {
      const u64 m = matches(k, a);
      const u64 c = std::popcount(m);
      if (j <= c) return k * per_ + bits::select_in_word(m, static_cast<unsigned>(j - 1)) / w_ + 1;
      j -= c;
    }
    throw NotFoundError("PackedString::select no such occurrence");
  }

  void insert(u64 i, u32 a) {
    ops::charge();
    detail::check_range(i >= 1 && i <= n_ + 1, "PackedString::insert position out of range");
    check_symbol(a);
    if (n_ == words() * per_) w_words_.push_back(0);
    const u64 p = i - 1;
    u64 k = p / per_;
    unsigned f = static_cast<unsigned>(p % per_);
    u64 carry = a;
    const u64 fm = bits::low_mask(w_);
    const unsigned top = (per_ - 1) * w_;
    for (const u64 last = n_ / per_; k <= last; ++k, f = 0) {
      u64& x = w_words_[k];
      const u64 out = (x >> top) & fm;
      const u64 lo = x & bits::low_mask(f * w_);
      const u64 hi = (x & ~bits::low_mask(f * w_) & bits::low_mask(top)) << w_;
      x = lo | (carry << (f * w_)) | hi;
      carry = out;
    }
    ++n_;
  }
  void push_back(u32 a) { insert(n_ + 1, a); }

  /// Removes position i and returns its symbol.
  u32 erase(u64 i) {
    ops::charge();
    detail::check_range(i >= 1 && i <= n_, "PackedString::erase position out of range");
    const u64 p = i - 1;
    const u32 a = get(p);
    const u64 last = (n_ - 1) / per_;
    u64 k = p / per_;
    unsigned f = static_cast<unsigned>(p % per_);
    const unsigned top = (per_ - 1) * w_;
    for (; k <= last; ++k, f = 0) {
      u64& x = w_words_[k];
      const u64 in = k < last ? (w_words_[k + 1] & bits::low_mask(w_)) : 0;
      const u64 lo = x & bits::low_mask(f * w_);
      const u64 hi = f + 1 < per_ ? ((x >> ((f + 1) * w_)) << (f * w_)) & bits::low_mask(top) : 0;
      x = lo | (hi & ~bits::low_mask(f * w_)) | (in << top);
    }
    --n_;
    if (n_ == 0 || (n_ - 1) / per_ + 1 < w_words_.size()) w_words_.resize(n_ == 0 ? 0 : (n_ - 1) / per_ + 1);
    return a;
  }

  std::vector<u32> to_vector() const {
    std::vector<u32> v(n_);
    for (u64 p = 0; p < n_; ++p) v[p] = get(p);
    return v;
  }

  void validate() const {
    if (w_words_.size() != (n_ == 0 ? 0 : (n_ - 1) / per_ + 1)) throw InvariantError("PackedString: word count");
    for (u64 p = 0; p < n_; ++p)
      if (get(p) < 1 || get(p) > sigma_) throw InvariantError("PackedString: symbol out of range");
    if (n_ % per_) {
      const u64 tail = w_words_.back() >> ((n_ % per_) * w_);
      if (tail) throw InvariantError("PackedString: garbage past the end");
    }
  }

 private:
  void check_symbol(u32 a) const {
    if (a < 1 || a > sigma_) throw ValidationError("PackedString: symbol out of range");
  }
  u64 words() const { return w_words_.size(); }
  u32 get(u64 p) const { return static_cast<u32>((w_words_[p / per_] >> ((p % per_) * w_)) & bits::low_mask(w_)); }

  // Top bit of every field of word k that equals a (unused fields never match).
  u64 matches(u64 k, u32 a) const {
    const u64 x = w_words_[k] ^ (low_ * a);
    const u64 nz = (((x & body_) + body_) | x) & high_;
    u64 m = ~nz & high_;
    const u64 used = std::min<u64>(per_, n_ - k * per_);
    if (used < per_) m &= bits::low_mask(static_cast<unsigned>(used) * w_);
    return m;
  }

  u32 sigma_;
  unsigned w_ = 1, per_ = 64;
  u64 low_ = 0, high_ = 0, body_ = 0;
  u64 n_ = 0;
  std::vector<u64> w_words_;
};

}  // namespace dynseq
