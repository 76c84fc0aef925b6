#pragma once

// Immutable bit sequence with rank/select: one cumulative count per 512 bits,
// select by binary search over the counts and a word scan.

#include <algorithm>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "dynseq/bits.hpp"

namespace dynseq {

class StaticBits {
 public:
  StaticBits() = default;
  StaticBits(std::vector<u64> words, u64 nbits) : n_(nbits), w_(std::move(words)) {
    w_.resize(bits::words_for(n_) + 1, 0);
    if (n_ & 63) w_[n_ >> 6] &= bits::low_mask(n_ & 63);
    for (std::size_t i = bits::words_for(n_); i < w_.size(); ++i) w_[i] = 0;
    index();
  }

  u64 size() const { return n_; }
  u64 ones() const { return ones_; }
  u64 zeros() const { return n_ - ones_; }

  bool access(u64 i) const { return bits::get(w_, i - 1); }

  /// Ones among positions 1..i.
  u64 rank1(u64 i) const {
    const u64 s = i >> 9;
    u64 r = sb_[s];
    for (u64 k = s << 3; k < (i >> 6); ++k) r += std::popcount(w_[k]);
    if (i & 63) r += std::popcount(w_[i >> 6] & bits::low_mask(i & 63));
    return r;
  }
  u64 rank0(u64 i) const { return i - rank1(i); }

  /// Position of the j-th one / zero (1-based). j must be in range.
  u64 select1(u64 j) const { return select_impl<true>(j); }
  u64 select0(u64 j) const { return select_impl<false>(j); }

  const std::vector<u64>& words() const { return w_; }
  u64 bit_size() const { return 64 * (w_.size() + sb_.size()); }

  void save(std::ostream& os) const {
    io::put<u64>(os, n_);
    io::put_words(os, std::span<const u64>(w_.data(), bits::words_for(n_)));
  }
  static StaticBits load(std::istream& is) {
    const u64 n = io::get<u64>(is);
    auto w = io::get_words(is);
    if (w.size() != bits::words_for(n)) throw FormatError("StaticBits: payload length");
    return StaticBits(std::move(w), n);
  }

 private:
  void index() {
    const u64 nsb = (n_ >> 9) + 2;
    sb_.assign(nsb, 0);
    u64 r = 0;
    for (u64 s = 0; s < nsb; ++s) {
      sb_[s] = r;
      for (u64 k = s << 3; k < std::min<u64>((s + 1) << 3, w_.size()); ++k) r += std::popcount(w_[k]);
    }
    ones_ = bits::rank_prefix(w_, n_);
  }

  template <bool B>
  u64 select_impl(u64 j) const {
    auto cnt = [&](u64 s) { return B ? sb_[s] : (s << 9) - sb_[s]; };
    // Largest superblock with fewer than j matching bits before it.
    u64 lo = 0, hi = sb_.size() - 1;
    while (lo < hi) {
      const u64 mid = (lo + hi + 1) / 2;
      if ((mid << 9) <= n_ && cnt(mid) < j)
        lo = mid;
      else
        hi = mid - 1;
    }
    u64 k = j - cnt(lo);
    for (u64 wi = lo << 3;; ++wi) {
      const u64 x = B ? w_[wi] : ~w_[wi];
      const u64 c = std::popcount(x);
      if (k <= c) return (wi << 6) + bits::select_in_word(x, static_cast<unsigned>(k - 1)) + 1;
      k -= c;
    }
  }

  u64 n_ = 0, ones_ = 0;
  std::vector<u64> w_{0};
  std::vector<u64> sb_{0, 0};
};

}  // namespace dynseq
