#pragma once

// Word-level helpers shared by every structure: popcount/select inside a
// machine word, packed bit arrays, and little-endian stream I/O.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dynseq/error.hpp"

namespace dynseq {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;

namespace bits {

inline constexpr u64 kWordBits = 64;

/// Select table: kSelectInByte[b][k] = position of the (k+1)-th set bit of
/// byte b, or 8 when absent. Process-wide, built at compile time.
inline constexpr auto kSelectInByte = [] {
  std::array<std::array<u8, 8>, 256> t{};
  for (int b = 0; b < 256; ++b) {
    int k = 0;
    for (int p = 0; p < 8; ++p) t[b][p] = 8;
    for (int p = 0; p < 8; ++p)
      if (b >> p & 1) t[b][k++] = static_cast<u8>(p);
  }
  return t;
}();

inline int popcount(u64 w) { return std::popcount(w); }

/// Position (0-based) of the k-th (0-based) set bit of w. Requires k < popcount(w).
inline int select_in_word(u64 w, unsigned k) {
  for (int byte = 0; byte < 8; ++byte) {
    const unsigned b = static_cast<unsigned>(w >> (byte * 8)) & 0xFFu;
    const unsigned c = static_cast<unsigned>(std::popcount(b));
    if (k < c) return byte * 8 + kSelectInByte[b][k];
    k -= c;
  }
  return 64;
}

/// Mask with the low n bits set (n in [0, 64]).
inline u64 low_mask(unsigned n) { return n >= 64 ? ~u64{0} : ((u64{1} << n) - 1); }

inline u64 words_for(u64 nbits) { return (nbits + 63) / 64; }

inline bool get(std::span<const u64> w, u64 pos) { return (w[pos >> 6] >> (pos & 63)) & 1; }

inline void set(std::span<u64> w, u64 pos, bool b) {
  const u64 m = u64{1} << (pos & 63);
  if (b)
    w[pos >> 6] |= m;
  else
    w[pos >> 6] &= ~m;
}

/// Reads `len` (<= 64) bits starting at bit `pos`.
inline u64 read(std::span<const u64> w, u64 pos, unsigned len) {
  if (len == 0) return 0;
  const u64 idx = pos >> 6;
  const unsigned off = pos & 63;
  u64 v = w[idx] >> off;
  if (off + len > 64) v |= w[idx + 1] << (64 - off);
  return v & low_mask(len);
}

/// Writes the low `len` (<= 64) bits of v at bit `pos`.
inline void write(std::span<u64> w, u64 pos, unsigned len, u64 v) {
  if (len == 0) return;
  v &= low_mask(len);
  const u64 idx = pos >> 6;
  const unsigned off = pos & 63;
  w[idx] = (w[idx] & ~(low_mask(len) << off)) | (v << off);
  if (off + len > 64) {
    const unsigned hi = off + len - 64;
    w[idx + 1] = (w[idx + 1] & ~low_mask(hi)) | (v >> (64 - off));
  }
}

/// Number of set bits in [0, nbits).
inline u64 rank_prefix(std::span<const u64> w, u64 nbits) {
  u64 r = 0;
  const u64 full = nbits >> 6;
  for (u64 i = 0; i < full; ++i) r += std::popcount(w[i]);
  if (nbits & 63) r += std::popcount(w[full] & low_mask(nbits & 63));
  return r;
}

/// ceil(log2(x)) for x >= 1; 0 for x <= 1.
inline unsigned ceil_log2(u64 x) { return x <= 1 ? 0 : 64 - std::countl_zero(x - 1); }

/// Bits needed to store values in [0, x].
inline unsigned width_for(u64 x) { return x == 0 ? 1 : 64 - std::countl_zero(x); }

/// Fixed-width packed unsigned array.
class PackedArray {
 public:
  PackedArray() = default;
  PackedArray(u64 n, unsigned width) : n_(n), width_(width), words_(words_for(n * width) + 1, 0) {}

  u64 size() const { return n_; }
  unsigned width() const { return width_; }
  u64 get(u64 i) const { return width_ == 0 ? 0 : read(words_, i * width_, width_); }
  void set(u64 i, u64 v) {
    if (width_ != 0) write(words_, i * width_, width_, v);
  }
  u64 bit_size() const { return n_ * width_; }
  const std::vector<u64>& words() const { return words_; }
  std::vector<u64>& words() { return words_; }

 private:
  u64 n_ = 0;
  unsigned width_ = 0;
  std::vector<u64> words_;
};

/// Appending bit writer over a growable word buffer.
class BitWriter {
 public:
  void put(u64 v, unsigned len) {
    if (len == 0) return;
    if (words_.size() * 64 < pos_ + len + 64) words_.resize(words_.size() * 2 + 4, 0);
    write(words_, pos_, len, v);
    pos_ += len;
  }
  void put_bit(bool b) { put(b ? 1 : 0, 1); }
  u64 size() const { return pos_; }
  std::vector<u64> finish() {
    words_.resize(words_for(pos_) + 1);
    return std::move(words_);
  }

 private:
  std::vector<u64> words_;
  u64 pos_ = 0;
};

}  // namespace bits

// Little-endian binary I/O for the serialization formats.
namespace io {

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::is_integral_v<T>);
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(static_cast<u64>(v) >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  static_assert(std::is_integral_v<T>);
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw FormatError("unexpected end of stream");
  u64 v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<u64>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

inline void put_magic(std::ostream& os, const char (&m)[5]) { os.write(m, 4); }

inline void expect_magic(std::istream& is, const char (&m)[5]) {
  char buf[4];
  if (!is.read(buf, 4) || std::memcmp(buf, m, 4) != 0)
    throw FormatError(std::string("bad magic, expected ") + m);
}

inline void put_words(std::ostream& os, std::span<const u64> w) {
  put<u64>(os, w.size());
  for (u64 x : w) put<u64>(os, x);
}

inline std::vector<u64> get_words(std::istream& is) {
  const u64 n = get<u64>(is);
  if (n > (u64{1} << 40)) throw FormatError("word count too large");
  std::vector<u64> w(n);
  for (auto& x : w) x = get<u64>(is);
  return w;
}

template <class T>
void put_vec(std::ostream& os, const std::vector<T>& v) {
  put<u64>(os, v.size());
  for (const T& x : v) put<T>(os, x);
}

template <class T>
std::vector<T> get_vec(std::istream& is) {
  const u64 n = get<u64>(is);
  if (n > (u64{1} << 40)) throw FormatError("vector too large");
  std::vector<T> v(n);
  for (auto& x : v) x = get<T>(is);
  return v;
}

}  // namespace io
}  // namespace dynseq
