#pragma once

// Per-thread tally of basic-structure operations. Substructures charge one
// unit per public primitive; bulk symbol work is charged per 64 symbols.

#include "dynseq/bits.hpp"

namespace dynseq::ops {

inline thread_local u64 g_count = 0;

inline void charge(u64 k = 1) { g_count += k; }
inline u64 count() { return g_count; }

/// Units charged since construction.
class Scope {
 public:
  Scope() : start_(g_count) {}
  u64 elapsed() const { return g_count - start_; }

 private:
  u64 start_;
};

}  // namespace dynseq::ops
