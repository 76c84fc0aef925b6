#pragma once

// Canonical Huffman code over u64 symbols. Codes are written most significant
// bit first into an LSB-first bit stream; decoding walks code lengths.

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <span>
#include <unordered_map>
#include <vector>

#include "dynseq/bits.hpp"

namespace dynseq {

class HuffmanCode {
 public:
  HuffmanCode() = default;

  /// Code from (symbol, frequency) pairs; frequencies must be positive.
  static HuffmanCode build(const std::vector<std::pair<u64, u64>>& freq) {
    HuffmanCode h;
    const std::size_t m = freq.size();
    if (m == 0) return h;
    std::vector<unsigned> len(m, 0);
    if (m == 1) {
      len[0] = 1;
    } else {
      // Repeatedly merge the two lightest nodes; depth comes from parent links.
      struct Item {
        u64 w;
        u32 node;
        bool operator>(const Item& o) const { return w > o.w || (w == o.w && node > o.node); }
      };
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      std::vector<u32> parent(2 * m, 0);
      for (std::size_t i = 0; i < m; ++i) pq.push({freq[i].second, static_cast<u32>(i)});
      u32 next = static_cast<u32>(m);
      while (pq.size() > 1) {
        const Item a = pq.top();
        pq.pop();
        const Item b = pq.top();
        pq.pop();
        parent[a.node] = parent[b.node] = next;
        pq.push({a.w + b.w, next++});
      }
      const u32 root = next - 1;
      std::vector<unsigned> depth(next, 0);
      for (u32 v = root; v-- > 0;) depth[v] = depth[parent[v]] + 1;
      for (std::size_t i = 0; i < m; ++i) len[i] = depth[i];
    }
    std::vector<std::pair<unsigned, u64>> by_len(m);
    for (std::size_t i = 0; i < m; ++i) by_len[i] = {len[i], freq[i].first};
    h.assign(std::move(by_len));
    return h;
  }

  std::size_t symbols() const { return sym_.size(); }
  unsigned max_len() const { return static_cast<unsigned>(count_.size()) - 1; }

  /// Code length of a symbol in the code, 0 if absent.
  unsigned length(u64 s) const {
    auto it = enc_.find(s);
    return it == enc_.end() ? 0 : it->second.len;
  }

  void encode(bits::BitWriter& w, u64 s) const {
    const Enc e = enc_.at(s);
    // Reverse so that the first bit read is the code's top bit.
    u64 r = 0;
    for (unsigned k = 0; k < e.len; ++k) r |= ((e.code >> k) & 1) << (e.len - 1 - k);
    w.put(r, e.len);
  }

  /// Decodes one symbol starting at bit pos; advances pos.
  u64 decode(std::span<const u64> words, u64& pos) const {
    u64 v = 0;
    for (unsigned l = 1; l < count_.size(); ++l) {
      v = (v << 1) | static_cast<u64>(bits::get(words, pos++));
      if (count_[l] && v - first_[l] < count_[l]) return sym_[offset_[l] + (v - first_[l])];
    }
    throw FormatError("HuffmanCode: invalid code word");
  }

  /// Table size in bits as serialized.
  u64 table_bits() const { return 64 + sym_.size() * (64 + 8); }

  void save(std::ostream& os) const {
    io::put<u64>(os, sym_.size());
    for (std::size_t l = 1, k = 0; l < count_.size(); ++l)
      for (u64 c = 0; c < count_[l]; ++c, ++k) {
        io::put<u64>(os, sym_[k]);
        io::put<u8>(os, static_cast<u8>(l));
      }
  }
  static HuffmanCode load(std::istream& is) {
    const u64 m = io::get<u64>(is);
    if (m > (u64{1} << 32)) throw FormatError("HuffmanCode: too many symbols");
    std::vector<std::pair<unsigned, u64>> by_len(m);
    for (auto& p : by_len) {
      p.second = io::get<u64>(is);
      p.first = io::get<u8>(is);
      if (p.first == 0 || p.first > 64) throw FormatError("HuffmanCode: bad code length");
    }
    HuffmanCode h;
    h.assign(std::move(by_len));
    // Kraft check: a valid prefix code never oversubscribes.
    long double k = 0;
    for (unsigned l = 1; l < h.count_.size(); ++l) k += std::ldexp(static_cast<long double>(h.count_[l]), -static_cast<int>(l));
    if (k > 1.0L + 1e-12L) throw FormatError("HuffmanCode: lengths violate the Kraft inequality");
    return h;
  }

 private:
  struct Enc {
    u64 code;
    unsigned len;
  };

  void assign(std::vector<std::pair<unsigned, u64>> by_len) {
    std::sort(by_len.begin(), by_len.end());
    const unsigned maxl = by_len.empty() ? 0 : by_len.back().first;
    if (maxl > 64) throw StateError("HuffmanCode: code longer than 64 bits");
    count_.assign(maxl + 1, 0);
    first_.assign(maxl + 1, 0);
    offset_.assign(maxl + 1, 0);
    sym_.clear();
    enc_.clear();
    for (const auto& [l, s] : by_len) {
      ++count_[l];
      sym_.push_back(s);
    }
    u64 code = 0, off = 0;
    for (unsigned l = 1; l <= maxl; ++l) {
      first_[l] = code;
      offset_[l] = off;
      code = (code + count_[l]) << 1;
      off += count_[l];
    }
    for (std::size_t k = 0; k < by_len.size(); ++k) {
      const unsigned l = by_len[k].first;
      enc_[by_len[k].second] = Enc{first_[l] + (k - offset_[l]), l};
    }
  }

  std::vector<u64> count_{0}, first_{0}, offset_{0};
  std::vector<u64> sym_;
  std::unordered_map<u64, Enc> enc_;
};

}  // namespace dynseq
