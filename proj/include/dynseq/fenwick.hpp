#pragma once

// Fenwick tree over a short array of counters (sector sizes, per-section
// counts). Insertion or removal of an entry rebuilds in O(r).

#include <vector>

#include "dynseq/bits.hpp"

namespace dynseq {

class Fenwick {
 public:
  Fenwick() = default;
  explicit Fenwick(std::vector<u64> v) { assign(std::move(v)); }

  void assign(std::vector<u64> v) {
    vals_ = std::move(v);
    tree_.assign(vals_.size() + 1, 0);
    for (std::size_t i = 0; i < vals_.size(); ++i) {
      tree_[i + 1] += vals_[i];
      const std::size_t p = (i + 1) + ((i + 1) & -(i + 1));
      if (p <= vals_.size()) tree_[p] += tree_[i + 1];
    }
  }

  std::size_t size() const { return vals_.size(); }
  u64 get(std::size_t i) const { return vals_[i]; }
  const std::vector<u64>& values() const { return vals_; }

  void add(std::size_t i, u64 delta) {
    vals_[i] += delta;
    for (std::size_t p = i + 1; p < tree_.size(); p += p & -p) tree_[p] += delta;
  }
  void sub(std::size_t i, u64 delta) { add(i, u64(0) - delta); }
  void set(std::size_t i, u64 v) { add(i, v - vals_[i]); }

  /// Sum of entries [0, i).
  u64 prefix(std::size_t i) const {
    u64 s = 0;
    for (std::size_t p = i; p > 0; p -= p & -p) s += tree_[p];
    return s;
  }
  u64 total() const { return prefix(vals_.size()); }

  /// Smallest i with prefix(i + 1) >= k (k >= 1); size() when none.
  std::size_t find(u64 k) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] < k) {
        pos += step;
        k -= tree_[pos];
      }
    }
    return pos;
  }

  void insert(std::size_t i, u64 v) {
    auto t = vals_;
    t.insert(t.begin() + i, v);
    assign(std::move(t));
  }
  void erase(std::size_t i) {
    auto t = vals_;
    t.erase(t.begin() + i);
    assign(std::move(t));
  }

 private:
  std::vector<u64> vals_;
  std::vector<u64> tree_;
};

}  // namespace dynseq
