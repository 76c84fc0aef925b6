#pragma once

// Deterministic synthetic inputs. Everything is driven by std::mt19937_64 and
// an explicit inverse-CDF sampler, so a seed gives the same data with any
// standard library.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dynseq/bits.hpp"
#include "dynseq/error.hpp"

namespace dynseq::workload {

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Samples an index with probability proportional to the given weights.
class Sampler {
 public:
  Sampler() = default;
  explicit Sampler(const std::vector<double>& w) : cdf_(w.size()) {
    double s = 0;
    for (std::size_t k = 0; k < w.size(); ++k) cdf_[k] = s += w[k];
    for (double& c : cdf_) c /= s;
  }
  std::size_t operator()(std::mt19937_64& rng) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), unit(rng));
    return std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

/// n symbols drawn uniformly from 1..sigma.
inline std::vector<u32> uniform(u64 n, u32 sigma, u64 seed) {
  std::mt19937_64 rng(seed);
  std::vector<u32> s(n);
  for (auto& a : s) a = static_cast<u32>(rng() % sigma) + 1;
  return s;
}

/// Order-2 Markov source over 1..sigma. Each context gets its own skewed
/// distribution (weights u^4 for uniform u), so H_2 sits well below H_0.
inline std::vector<u32> markov2(u64 n, u32 sigma, u64 seed) {
  std::mt19937_64 rng(seed);
  std::vector<Sampler> next;
  next.reserve(u64{sigma} * sigma);
  for (u64 c = 0; c < u64{sigma} * sigma; ++c) {
    std::vector<double> w(sigma);
    for (auto& x : w) x = std::pow(unit(rng), 4) + 1e-9;
    next.emplace_back(w);
  }
  std::vector<u32> s(n);
  for (u64 i = 0; i < n; ++i) {
    if (i < 2) {
      s[i] = static_cast<u32>(rng() % sigma) + 1;
      continue;
    }
    s[i] = static_cast<u32>(next[u64{s[i - 2] - 1} * sigma + (s[i - 1] - 1)](rng)) + 1;
  }
  return s;
}

/// English-like text: Zipf-distributed words over a synthetic vocabulary whose
/// letters follow English letter frequencies, with sentence capitalisation,
/// punctuation and line breaks. Used where a natural-language corpus is wanted
/// and none is available offline.
inline std::string english_like(u64 bytes, u64 seed) {
  static const double freq[26] = {8.2, 1.5, 2.8, 4.3, 12.7, 2.2, 2.0, 6.1, 7.0, 0.15, 0.77, 4.0, 2.4,
                                  6.7, 7.5, 1.9,  0.095, 6.0, 6.3, 9.1, 2.8, 0.98, 2.4, 0.15, 2.0, 0.074};
  std::mt19937_64 rng(seed);
  const Sampler letter(std::vector<double>(freq, freq + 26));
  // Word lengths roughly as in English prose.
  const Sampler len(std::vector<double>{3, 17, 21, 16, 11, 9, 8, 6, 4, 3, 1.5, 0.5});
  const std::size_t vocab = 20000;
  std::vector<std::string> words(vocab);
  for (auto& w : words) {
    const std::size_t l = len(rng) + 1;
    for (std::size_t k = 0; k < l; ++k) w += static_cast<char>('a' + letter(rng));
  }
  std::vector<double> zipf(vocab);
  for (std::size_t k = 0; k < vocab; ++k) zipf[k] = 1.0 / static_cast<double>(k + 1);
  const Sampler word(zipf);

  std::string out;
  out.reserve(bytes + 32);
  bool cap = true;
  u64 line = 0;
  while (out.size() < bytes) {
    std::string w = words[word(rng)];
    if (cap) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    cap = false;
    out += w;
    line += w.size();
    const double u = unit(rng);
    if (u < 0.07) {
      out += '.';
      cap = true;
    } else if (u < 0.12) {
      out += ',';
    }
    if (line > 70) {
      out += '\n';
      line = 0;
    } else {
      out += ' ';
      ++line;
    }
  }
  out.resize(bytes);
  return out;
}

/// DNA-like bytes over ACGT.
inline std::string dna(u64 bytes, u64 seed) {
  std::mt19937_64 rng(seed);
  std::string s(bytes, 'A');
  for (auto& c : s) c = "ACGT"[rng() & 3];
  return s;
}

}  // namespace dynseq::workload
