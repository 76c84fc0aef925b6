#pragma once

// Empirical entropies in bits per symbol. H_k sums |S_A| H_0(S_A) over the
// length-k contexts A, where S_A holds the symbols that follow A, divided by n.

#include <algorithm>
#include <cmath>
#include <span>
#include <unordered_map>
#include <vector>

#include "dynseq/bits.hpp"

namespace dynseq {

namespace detail {

inline double h0_of_counts(const std::vector<u64>& c, u64 total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (u64 x : c)
    if (x) h -= static_cast<double>(x) * std::log2(static_cast<double>(x) / static_cast<double>(total));
  return h;  // total bits, not per symbol
}

}  // namespace detail

inline double entropy_h0(std::span<const u32> s) {
  if (s.empty()) return 0.0;
  std::unordered_map<u32, u64> f;
  for (u32 a : s) ++f[a];
  std::vector<u64> c;
  c.reserve(f.size());
  for (const auto& [a, x] : f) c.push_back(x);
  return detail::h0_of_counts(c, s.size()) / static_cast<double>(s.size());
}

/// Order-k empirical entropy; k = 0 gives H_0.
inline double entropy_hk(std::span<const u32> s, unsigned k) {
  if (k == 0) return entropy_h0(s);
  if (s.size() <= k) return 0.0;
  // Contexts are hashed as the k preceding symbols; collisions are resolved by
  // keeping the exact context alongside.
  struct Ctx {
    std::vector<u32> key;
    std::unordered_map<u32, u64> next;
    u64 total = 0;
  };
  std::unordered_map<u64, std::vector<Ctx>> ctx;
  for (std::size_t i = k; i < s.size(); ++i) {
    u64 h = 1469598103934665603ull;
    for (std::size_t j = i - k; j < i; ++j) h = (h ^ s[j]) * 1099511628211ull;
    auto& bucket = ctx[h];
    Ctx* c = nullptr;
    for (auto& e : bucket)
      if (std::equal(e.key.begin(), e.key.end(), s.begin() + (i - k))) c = &e;
    if (!c) {
      bucket.push_back(Ctx{std::vector<u32>(s.begin() + (i - k), s.begin() + i), {}, 0});
      c = &bucket.back();
    }
    ++c->next[s[i]];
    ++c->total;
  }
  double bits = 0.0;
  std::vector<u64> cnt;
  for (const auto& [h, bucket] : ctx)
    for (const auto& c : bucket) {
      cnt.clear();
      for (const auto& [a, x] : c.next) cnt.push_back(x);
      bits += detail::h0_of_counts(cnt, c.total);
    }
  return bits / static_cast<double>(s.size());
}

}  // namespace dynseq
