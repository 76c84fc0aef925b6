#pragma once

// Order-maintenance list with two-level tags. Entries live in buckets of at
// most `bucket_cap` entries; a bucket carries a 64-bit global tag and each
// entry a 64-bit local tag. Order is (bucket tag, local tag).
//
// Global tags are relabeled over the smallest enclosing power-of-two range
// whose density is below tau^-k (k = log of the range size).

#include <ostream>
#include <vector>

#include "dynseq/bits.hpp"
#include "dynseq/handle.hpp"

namespace dynseq {

enum class Order { Before, Equal, After };

class OrderedList {
 public:
  explicit OrderedList(unsigned bucket_cap = 64) : cap_(std::max(2u, bucket_cap)) {}

  std::size_t size() const { return ents_.live(); }
  bool valid(Handle h) const { return ents_.valid(h); }

  Handle front() const { return head_ == kNil ? kNullHandle : ents_.handle_of(head_); }
  Handle back() const { return tail_ == kNil ? kNullHandle : ents_.handle_of(tail_); }
  Handle next(Handle h) const {
    const u32 n = ents_.at(h).next;
    return n == kNil ? kNullHandle : ents_.handle_of(n);
  }
  Handle prev(Handle h) const {
    const u32 p = ents_.at(h).prev;
    return p == kNil ? kNullHandle : ents_.handle_of(p);
  }
  /// Current handle of a live slot.
  Handle handle_at(u32 slot) const { return ents_.handle_of(slot); }

  /// Inserts after h; a null h inserts at the front.
  Handle insert_after(Handle h) {
    if (!h.null()) ents_.check(h);
    const Handle nh = ents_.alloc(Entry{});
    Entry& e = ents_[nh.idx];
    if (size() == 1) {
      const u32 b = new_bucket(kNil, u64{1} << 63);
      link_after_in_list(nh.idx, kNil);
      attach(b, nh.idx, kNil);
      ents_[nh.idx].tag = u64{1} << 63;
      return nh;
    }
    (void)e;
    u32 b;
    u32 after_in_bucket;  // entry in bucket b after which to attach, or kNil for bucket front
    if (h.null()) {
      b = ents_[head_].bucket;
      after_in_bucket = kNil;
    } else {
      b = ents_[h.idx].bucket;
      after_in_bucket = h.idx;
    }
    link_after_in_list(nh.idx, h.null() ? kNil : h.idx);
    attach(b, nh.idx, after_in_bucket);
    if (!assign_local_tag(nh.idx)) relabel_bucket(b);
    if (buckets_[b].count > cap_) split_bucket(b);
    return nh;
  }
  Handle push_front() { return insert_after(kNullHandle); }
  Handle push_back() { return insert_after(back()); }
  Handle insert_before(Handle h) { return insert_after(prev(h)); }

  void erase(Handle h) {
    ents_.check(h);
    Entry& e = ents_[h.idx];
    // Unlink from the global list.
    if (e.prev != kNil)
      ents_[e.prev].next = e.next;
    else
      head_ = e.next;
    if (e.next != kNil)
      ents_[e.next].prev = e.prev;
    else
      tail_ = e.prev;
    Bucket& b = buckets_[e.bucket];
    if (b.first == h.idx) b.first = (b.count > 1) ? e.next : kNil;
    if (b.last == h.idx) b.last = (b.count > 1) ? e.prev : kNil;
    if (--b.count == 0) drop_bucket(e.bucket);
    ents_.release(h);
  }

  Order compare(Handle a, Handle b) const {
    ents_.check(a);
    ents_.check(b);
    const auto ka = key(a.idx), kb = key(b.idx);
    if (ka < kb) return Order::Before;
    if (kb < ka) return Order::After;
    return Order::Equal;
  }
  bool before(Handle a, Handle b) const { return compare(a, b) == Order::Before; }
  /// a precedes b or is b.
  bool before_eq(Handle a, Handle b) const { return compare(a, b) != Order::After; }

  std::size_t buckets() const { return bucket_live_; }

  /// One line per entry: handle id, bucket tag, local tag.
  void dump(std::ostream& os) const {
    for (u32 i = head_; i != kNil; i = ents_[i].next)
      os << i << ' ' << buckets_[ents_[i].bucket].tag << ':' << ents_[i].tag << '\n';
  }

  void validate() const {
    std::size_t n = 0;
    u32 prev = kNil;
    for (u32 i = head_; i != kNil; prev = i, i = ents_[i].next) {
      ++n;
      if (ents_[i].prev != prev) throw InvariantError("OrderedList: broken back link");
      if (prev != kNil && !(key(prev) < key(i))) throw InvariantError("OrderedList: tags not increasing");
      if (buckets_[ents_[i].bucket].count > cap_) throw InvariantError("OrderedList: bucket over capacity");
    }
    if (n != size()) throw InvariantError("OrderedList: size mismatch");
  }

 private:
  static constexpr u32 kNil = 0xFFFFFFFFu;
  struct Entry {
    u32 prev = kNil, next = kNil;
    u32 bucket = kNil;
    u64 tag = 0;
  };
  struct Bucket {
    u32 first = kNil, last = kNil;
    u32 count = 0;
    u32 prev = kNil, next = kNil;
    u64 tag = 0;
  };
  using u128 = unsigned __int128;

  std::pair<u64, u64> key(u32 i) const { return {buckets_[ents_[i].bucket].tag, ents_[i].tag}; }

  void link_after_in_list(u32 x, u32 after) {
    Entry& e = ents_[x];
    e.prev = after;
    e.next = after == kNil ? head_ : ents_[after].next;
    if (e.next != kNil)
      ents_[e.next].prev = x;
    else
      tail_ = x;
    if (after != kNil)
      ents_[after].next = x;
    else
      head_ = x;
  }

  void attach(u32 b, u32 x, u32 after_in_bucket) {
    Bucket& bk = buckets_[b];
    ents_[x].bucket = b;
    if (bk.count == 0) {
      bk.first = bk.last = x;
    } else if (after_in_bucket == kNil) {
      bk.first = x;
    } else if (bk.last == after_in_bucket) {
      bk.last = x;
    }
    ++bk.count;
  }

  // Midpoint between neighbours inside the bucket; false when there is no room.
  bool assign_local_tag(u32 x) {
    const Entry& e = ents_[x];
    const Bucket& b = buckets_[e.bucket];
    const u128 lo = (e.prev != kNil && ents_[e.prev].bucket == e.bucket) ? u128(ents_[e.prev].tag) + 1 : 0;
    const u128 hi = (x != b.last) ? u128(ents_[e.next].tag) : (u128(1) << 64);
    if (hi <= lo) return false;
    ents_[x].tag = static_cast<u64>(lo + (hi - lo) / 2);
    return true;
  }

  void relabel_bucket(u32 b) {
    const Bucket& bk = buckets_[b];
    const u128 step = (u128(1) << 64) / (bk.count + 1);
    u128 t = step;
    for (u32 i = bk.first;; i = ents_[i].next) {
      ents_[i].tag = static_cast<u64>(t);
      t += step;
      if (i == bk.last) break;
    }
  }

  u32 new_bucket(u32 after, u64 tag) {
    u32 b;
    if (!free_buckets_.empty()) {
      b = free_buckets_.back();
      free_buckets_.pop_back();
      buckets_[b] = Bucket{};
    } else {
      b = static_cast<u32>(buckets_.size());
      buckets_.push_back(Bucket{});
    }
    Bucket& bk = buckets_[b];
    bk.tag = tag;
    bk.prev = after;
    bk.next = after == kNil ? bhead_ : buckets_[after].next;
    if (bk.next != kNil) buckets_[bk.next].prev = b;
    if (after != kNil)
      buckets_[after].next = b;
    else
      bhead_ = b;
    ++bucket_live_;
    return b;
  }

  void drop_bucket(u32 b) {
    Bucket& bk = buckets_[b];
    if (bk.prev != kNil)
      buckets_[bk.prev].next = bk.next;
    else
      bhead_ = bk.next;
    if (bk.next != kNil) buckets_[bk.next].prev = bk.prev;
    free_buckets_.push_back(b);
    --bucket_live_;
  }

  void split_bucket(u32 b) {
    const u32 half = buckets_[b].count / 2;
    u32 mid = buckets_[b].first;
    for (u32 k = 0; k < half; ++k) mid = ents_[mid].next;
    const u64 tag = global_tag_after(b);
    const u32 nb = new_bucket(b, tag);
    Bucket& old = buckets_[b];
    Bucket& nw = buckets_[nb];
    nw.first = mid;
    nw.last = old.last;
    nw.count = old.count - half;
    old.last = ents_[mid].prev;
    old.count = half;
    for (u32 i = mid;; i = ents_[i].next) {
      ents_[i].bucket = nb;
      if (i == nw.last) break;
    }
    relabel_bucket(b);
    relabel_bucket(nb);
  }

  // A free global tag between bucket b and its successor, relabeling if needed.
  u64 global_tag_after(u32 b) {
    const u32 nx = buckets_[b].next;
    const u128 lo = u128(buckets_[b].tag) + 1;
    const u128 hi = nx == kNil ? (u128(1) << 64) : u128(buckets_[nx].tag);
    if (hi > lo) return static_cast<u64>(lo + (hi - lo) / 2);
    relabel_global(b);
    const u32 nx2 = buckets_[b].next;
    const u128 lo2 = u128(buckets_[b].tag) + 1;
    const u128 hi2 = nx2 == kNil ? (u128(1) << 64) : u128(buckets_[nx2].tag);
    return static_cast<u64>(lo2 + (hi2 - lo2) / 2);
  }

  void relabel_global(u32 b) {
    constexpr double tau = 1.5;
    double thresh = 1.0;
    for (unsigned k = 1; k <= 64; ++k) {
      thresh *= 2.0 / tau;
      const u128 size = u128(1) << k;
      const u128 base = (u128(buckets_[b].tag) >> k) << k;
      // Collect the buckets whose tag lies in [base, base + size).
      u32 first = b, last = b;
      u64 count = 1;
      while (buckets_[first].prev != kNil && u128(buckets_[buckets_[first].prev].tag) >= base) {
        first = buckets_[first].prev;
        ++count;
      }
      while (buckets_[last].next != kNil && u128(buckets_[buckets_[last].next].tag) < base + size) {
        last = buckets_[last].next;
        ++count;
      }
      // One extra slot for the bucket about to be created.
      if (double(count + 1) <= thresh && u128(count + 1) * 2 <= size) {
        const u128 step = size / (count + 1);
        u128 t = base;
        for (u32 x = first;; x = buckets_[x].next) {
          buckets_[x].tag = static_cast<u64>(t);
          t += step;
          if (x == last) break;
        }
        return;
      }
    }
    throw StateError("OrderedList: tag universe exhausted");
  }

  unsigned cap_;
  detail::Pool<Entry> ents_;
  std::vector<Bucket> buckets_;
  std::vector<u32> free_buckets_;
  u32 head_ = kNil, tail_ = kNil, bhead_ = kNil;
  std::size_t bucket_live_ = 0;
};

}  // namespace dynseq
