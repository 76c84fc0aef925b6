#pragma once

// Reference space budgets the reports compare against. Logarithms are base 2.

#include <algorithm>
#include <cmath>

#include "dynseq/bits.hpp"

namespace dynseq::bounds {

/// Lower-order allowance 0.25 n log(sigma) (log log n / log n) * 64 bits.
inline double slack_bits(u64 n, u32 sigma) {
  if (n < 4) return 0.0;
  const double lg = std::log2(static_cast<double>(n));
  return 0.25 * n * std::log2(std::max<double>(2, sigma)) * (std::log2(lg) / lg) * 64;
}

/// Meta-symbol length ceil(log_sigma(n) / 2), at least 1.
inline double meta_len(u64 n, u32 sigma) {
  if (n < 2 || sigma < 2) return 1;
  return std::max(1.0, std::ceil(std::log2(static_cast<double>(n)) / std::log2(static_cast<double>(sigma)) / 2));
}

/// Budget for the whole structure against order-0 entropy h0 (bits/symbol).
inline double order0_total(u64 n, u32 sigma, double h0) { return 1.35 * n * h0 + slack_bits(n, sigma); }

/// Budget for the entropy-coded payload of static sections against order-k
/// entropy hk: n H_k + (n / l) 2 log sigma + 2 n / l.
inline double orderk_coded(u64 n, u32 sigma, double hk) {
  const double l = meta_len(n, sigma);
  return n * hk + n / l * 2 * std::log2(std::max<double>(2, sigma)) + 2 * n / l;
}

/// Budget for the whole structure against order-k entropy.
inline double orderk_total(u64 n, u32 sigma, double hk) { return 1.35 * orderk_coded(n, sigma, hk) + slack_bits(n, sigma); }

}  // namespace dynseq::bounds
