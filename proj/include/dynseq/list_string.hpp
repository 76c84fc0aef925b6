#pragma once

// Dynamic string in O(m log m) bits for small m. Positions are entries of a
// colored list L (color = symbol); D(L) and one D(L_a) per symbol count
// entries so that rank and select reduce to colored predecessor plus a
// positional lookup.

#include <memory>
#include <unordered_map>
#include <vector>

#include "dynseq/colored_list.hpp"
#include "dynseq/op_counter.hpp"
#include "dynseq/prefix_index.hpp"

namespace dynseq {

class ListString {
 public:
  explicit ListString(u32 sigma, u64 capacity_hint = u64{1} << 16)
      : sigma_(sigma), cl_(sigma, ColoredListConfig{capacity_hint, 0, 8}) {}

  u64 size() const { return dl_.size(); }
  u32 sigma() const { return sigma_; }
  u64 count(u32 a) const {
    auto it = la_.find(a);
    return it == la_.end() ? 0 : it->second.size();
  }

  u32 access(u64 i) const {
    ops::charge();
    detail::check_range(i >= 1 && i <= size(), "ListString::access position out of range");
    return cl_.color(dl_[dl_.select(i)]);
  }

  /// Occurrences of a among positions 1..i.
  u64 rank(u32 a, u64 i) const {
    ops::charge();
    detail::check_range(i <= size(), "ListString::rank position out of range");
    check_symbol(a);
    if (i == 0) return 0;
    auto it = la_.find(a);
    if (it == la_.end()) return 0;
    const Handle e = dl_[dl_.select(i)];
    const Handle ea = cl_.pred(e, a);
    if (ea.null()) return 0;
    return it->second.rank(side_[ea.idx].la);
  }

  /// Position of the j-th a.
  u64 select(u32 a, u64 j) const {
    ops::charge();
    check_symbol(a);
    auto it = la_.find(a);
    if (it == la_.end() || j == 0 || j > it->second.size()) throw NotFoundError("ListString::select no such occurrence");
    const Handle e = it->second[it->second.select(j)];
    return dl_.rank(side_[e.idx].dl);
  }

  void insert(u64 i, u32 a) {
    ops::charge();
    detail::check_range(i >= 1 && i <= size() + 1, "ListString::insert position out of range");
    check_symbol(a);
    const Handle after = i == 1 ? kNullHandle : dl_[dl_.select(i - 1)];
    const Handle x = cl_.insert_after(after, a);
    if (x.idx >= side_.size()) side_.resize(std::max<std::size_t>(x.idx + 1, side_.size() * 2));
    side_[x.idx].dl = dl_.insert_at(i, x);
    auto& la = la_.try_emplace(a, 16u).first->second;
    const Handle p = after.null() ? kNullHandle : cl_.pred(after, a);
    side_[x.idx].la = la.insert_after(p.null() ? kNullHandle : side_[p.idx].la, x);
  }
  void push_back(u32 a) { insert(size() + 1, a); }

  /// Removes position i and returns its symbol.
  u32 erase(u64 i) {
    ops::charge();
    detail::check_range(i >= 1 && i <= size(), "ListString::erase position out of range");
    const Handle dh = dl_.select(i);
    const Handle x = dl_[dh];
    const u32 a = cl_.color(x);
    auto it = la_.find(a);
    it->second.erase(side_[x.idx].la);
    if (it->second.empty()) la_.erase(it);
    dl_.erase(dh);
    cl_.erase(x);
    return a;
  }

  std::vector<u32> to_vector() const {
    std::vector<u32> out;
    out.reserve(size());
    dl_.for_each([&](Handle, const Handle& e) { out.push_back(cl_.color(e)); });
    return out;
  }

  void validate() const {
    cl_.validate();
    dl_.validate();
    if (cl_.size() != dl_.size()) throw InvariantError("ListString: |L| differs from D(L)");
    u64 total = 0;
    for (const auto& [a, idx] : la_) {
      idx.validate();
      total += idx.size();
      if (idx.size() != cl_.count_of(a)) throw InvariantError("ListString: D(L_a) size");
      Handle prev = kNullHandle;
      idx.for_each([&](Handle, const Handle& e) {
        if (cl_.color(e) != a) throw InvariantError("ListString: entry in wrong L_a");
        if (!prev.null() && !cl_.order().before(prev, e)) throw InvariantError("ListString: L_a out of order");
        prev = e;
      });
    }
    if (total != size()) throw InvariantError("ListString: sum of |L_a| differs from |L|");
  }

 private:
  struct Side {
    Handle dl, la;
  };

  void check_symbol(u32 a) const {
    if (a < 1 || a > sigma_) throw ValidationError("ListString: symbol out of range");
  }

  u32 sigma_;
  ColoredList cl_;
  PrefixIndex<Handle> dl_{16};
  std::unordered_map<u32, PrefixIndex<Handle>> la_;
  std::vector<Side> side_;
};

}  // namespace dynseq
