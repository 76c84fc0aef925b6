#pragma once

// Occurrence counts of one symbol across the ordered static sections. Only
// sections holding the symbol get an entry, so creating or retiring a section
// touches just the symbols it contains. Entries are ordered by section key.
//
// Array mode keeps the counts in a vector and sums prefixes directly; Bits
// mode keeps 1^{c_1} 0 1^{c_2} 0 ... in a dynamic bit sequence (for alphabets
// too large to afford a counter per section and symbol).

#include <algorithm>
#include <vector>

#include "dynseq/dyn_bitseq.hpp"

namespace dynseq {

enum class CountMode : u8 { Array, Bits };

class SectionCounts {
 public:
  explicit SectionCounts(CountMode mode = CountMode::Array) : mode_(mode) {
    if (mode_ == CountMode::Bits) unary_ = DynBitSeq(DynBitSeqConfig{512, 16});
  }

  CountMode mode() const { return mode_; }
  u64 total() const { return total_; }
  std::size_t entries() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }

  u64 at(u64 key) const {
    const std::size_t e = lower(key);
    return (e < keys_.size() && keys_[e] == key) ? count(e) : 0;
  }

  /// Replaces all entries; keys must be increasing and counts positive.
  void assign(const std::vector<std::pair<u64, u64>>& entries) {
    keys_.clear();
    cnt_.clear();
    total_ = 0;
    bits::BitWriter w;
    for (const auto& [k, c] : entries) {
      keys_.push_back(k);
      total_ += c;
      if (mode_ == CountMode::Array) {
        cnt_.push_back(c);
      } else {
        for (u64 d = c; d > 0;) {
          const unsigned take = static_cast<unsigned>(std::min<u64>(d, 64));
          w.put(bits::low_mask(take), take);
          d -= take;
        }
        w.put_bit(false);
      }
    }
    if (mode_ == CountMode::Bits) {
      const u64 len = w.size();
      unary_ = DynBitSeq::from_words(w.finish(), len, unary_.config());
    }
  }

  void add(u64 key, u64 delta = 1) {
    if (delta == 0) return;
    std::size_t e = lower(key);
    if (e == keys_.size() || keys_[e] != key) {
      keys_.insert(keys_.begin() + e, key);
      if (mode_ == CountMode::Array)
        cnt_.insert(cnt_.begin() + e, 0);
      else
        unary_.insert(run_start(e), false);
    }
    if (mode_ == CountMode::Array)
      cnt_[e] += delta;
    else
      for (u64 k = 0; k < delta; ++k) unary_.insert(run_start(e), true);
    total_ += delta;
  }

  void sub(u64 key, u64 delta = 1) {
    if (delta == 0) return;
    const std::size_t e = lower(key);
    if (e == keys_.size() || keys_[e] != key || count(e) < delta) throw InvariantError("SectionCounts: count underflow");
    if (mode_ == CountMode::Array)
      cnt_[e] -= delta;
    else
      for (u64 k = 0; k < delta; ++k) unary_.erase(run_start(e));
    total_ -= delta;
    if (count(e) == 0) {
      keys_.erase(keys_.begin() + e);
      if (mode_ == CountMode::Array)
        cnt_.erase(cnt_.begin() + e);
      else
        unary_.erase(run_start(e));
    }
  }

  /// Sum over sections ordered before key.
  u64 before(u64 key) const { return prefix(lower(key)); }

  struct Hit {
    u64 key;
    u64 before;  ///< occurrences in earlier sections
  };
  /// Section holding the q-th occurrence (1 <= q <= total()).
  Hit find(u64 q) const {
    if (q == 0 || q > total_) throw NotFoundError("SectionCounts: occurrence out of range");
    if (mode_ == CountMode::Array) {
      u64 acc = 0;
      for (std::size_t e = 0;; ++e) {
        if (acc + cnt_[e] >= q) return {keys_[e], acc};
        acc += cnt_[e];
      }
    }
    const std::size_t e = unary_.rank0(unary_.select1(q));
    return {keys_[e], prefix(e)};
  }

  void validate() const {
    if (!std::is_sorted(keys_.begin(), keys_.end()) || std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end())
      throw InvariantError("SectionCounts: keys out of order");
    u64 s = 0;
    for (std::size_t e = 0; e < keys_.size(); ++e) {
      if (count(e) == 0) throw InvariantError("SectionCounts: empty entry kept");
      s += count(e);
    }
    if (s != total_) throw InvariantError("SectionCounts: total mismatch");
    if (mode_ == CountMode::Bits && (unary_.zeros() != keys_.size() || unary_.ones() != total_))
      throw InvariantError("SectionCounts: unary encoding mismatch");
  }

 private:
  std::size_t lower(u64 key) const { return std::lower_bound(keys_.begin(), keys_.end(), key) - keys_.begin(); }
  u64 run_start(std::size_t e) const { return e == 0 ? 1 : unary_.select0(e) + 1; }
  u64 prefix(std::size_t e) const {
    if (e == 0) return 0;
    if (mode_ == CountMode::Array) {
      u64 s = 0;
      for (std::size_t k = 0; k < e; ++k) s += cnt_[k];
      return s;
    }
    return unary_.select0(e) - e;
  }
  u64 count(std::size_t e) const {
    if (mode_ == CountMode::Array) return cnt_[e];
    const u64 end = unary_.select0(e + 1);
    return end - run_start(e);
  }

  CountMode mode_;
  std::vector<u64> keys_;
  std::vector<u64> cnt_;
  DynBitSeq unary_;
  u64 total_ = 0;
};

}  // namespace dynseq
