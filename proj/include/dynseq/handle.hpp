#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dynseq/error.hpp"

namespace dynseq {

/// Stable reference to a pooled entry. The generation counter makes a handle
/// to an erased slot detectable after the slot is reused.
struct Handle {
  std::uint32_t idx = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t gen = 0;

  bool null() const { return idx == std::numeric_limits<std::uint32_t>::max(); }
  explicit operator bool() const { return !null(); }
  bool operator==(const Handle&) const = default;
};

inline constexpr Handle kNullHandle{};

namespace detail {

/// Slot pool with free list and generation counters.
template <class T>
class Pool {
 public:
  Handle alloc(T v) {
    std::uint32_t i;
    if (!free_.empty()) {
      i = free_.back();
      free_.pop_back();
      slots_[i].val = std::move(v);
    } else {
      i = static_cast<std::uint32_t>(slots_.size());
      slots_.push_back(Slot{std::move(v), 0, false});
    }
    slots_[i].alive = true;
    ++live_;
    return Handle{i, slots_[i].gen};
  }
  void release(Handle h) {
    check(h);
    slots_[h.idx].alive = false;
    ++slots_[h.idx].gen;
    free_.push_back(h.idx);
    --live_;
  }
  bool valid(Handle h) const { return h.idx < slots_.size() && slots_[h.idx].alive && slots_[h.idx].gen == h.gen; }
  void check(Handle h) const {
    if (!valid(h)) throw InvalidHandleError("stale or invalid handle");
  }
  T& operator[](std::uint32_t i) { return slots_[i].val; }
  const T& operator[](std::uint32_t i) const { return slots_[i].val; }
  T& at(Handle h) {
    check(h);
    return slots_[h.idx].val;
  }
  const T& at(Handle h) const {
    check(h);
    return slots_[h.idx].val;
  }
  Handle handle_of(std::uint32_t i) const { return Handle{i, slots_[i].gen}; }
  std::size_t live() const { return live_; }
  std::size_t capacity() const { return slots_.size(); }
  bool alive(std::uint32_t i) const { return i < slots_.size() && slots_[i].alive; }
  void clear() {
    slots_.clear();
    free_.clear();
    live_ = 0;
  }

 private:
  struct Slot {
    T val;
    std::uint32_t gen;
    bool alive;
  };
  std::vector<Slot> slots_;
  std::vector<std::uint32_t> free_;
  std::size_t live_ = 0;
};

}  // namespace detail
}  // namespace dynseq
