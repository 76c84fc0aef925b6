#pragma once

// Counted B-tree over list entries: the i-th entry, the rank of an entry, and
// insertion/deletion at a handle, all in O(B log m / log B). Each internal node
// keeps Pref(u), the subtree sizes n(u_i) of its children, scanned linearly.
// Ranks are 1-based and an entry counts itself.

#include <ostream>
#include <vector>

#include "dynseq/bits.hpp"
#include "dynseq/handle.hpp"

namespace dynseq {

template <class T>
class PrefixIndex {
 public:
  explicit PrefixIndex(unsigned degree = 32) : max_(2 * std::max(4u, degree)), min_(std::max(4u, degree) / 2) {}

  std::size_t size() const { return items_.live(); }
  bool empty() const { return size() == 0; }
  bool valid(Handle h) const { return items_.valid(h); }

  T& operator[](Handle h) { return items_.at(h).val; }
  const T& operator[](Handle h) const { return items_.at(h).val; }

  /// New entry at position i (1 <= i <= size()+1).
  Handle insert_at(u64 i, T v) {
    detail::check_range(i >= 1 && i <= size() + 1, "PrefixIndex::insert_at position out of range");
    if (root_ == kNil) root_ = new_node(true);
    u32 u = root_;
    u64 p = i - 1;
    while (!nodes_[u].leaf) {
      Node& n = nodes_[u];
      std::size_t k = 0;
      while (k + 1 < n.kids.size() && p > n.cnt[k]) p -= n.cnt[k++];
      n.cnt[k] += 1;
      u = n.kids[k];
    }
    const Handle h = items_.alloc(Item{std::move(v), u});
    nodes_[u].kids.insert(nodes_[u].kids.begin() + p, h.idx);
    fix_overflow(u);
    return h;
  }
  /// Inserts right after h (null h: at the front).
  Handle insert_after(Handle h, T v) { return insert_at(h.null() ? 1 : rank(h) + 1, std::move(v)); }
  Handle insert_before(Handle h, T v) { return insert_at(rank(h), std::move(v)); }
  Handle push_back(T v) { return insert_at(size() + 1, std::move(v)); }

  void erase(Handle h) {
    items_.check(h);
    u32 u = items_[h.idx].leaf;
    auto& kids = nodes_[u].kids;
    kids.erase(std::find(kids.begin(), kids.end(), h.idx));
    items_.release(h);
    for (u32 c = u, p = nodes_[u].parent; p != kNil; c = p, p = nodes_[p].parent) nodes_[p].cnt[child_index(p, c)] -= 1;
    fix_underflow(u);
  }

  /// 1-based position of h.
  u64 rank(Handle h) const {
    items_.check(h);
    const u32 u = items_[h.idx].leaf;
    const auto& kids = nodes_[u].kids;
    u64 r = static_cast<u64>(std::find(kids.begin(), kids.end(), h.idx) - kids.begin()) + 1;
    for (u32 c = u, p = nodes_[u].parent; p != kNil; c = p, p = nodes_[p].parent) {
      const Node& n = nodes_[p];
      for (std::size_t k = 0; n.kids[k] != c; ++k) r += n.cnt[k];
    }
    return r;
  }

  Handle select(u64 i) const {
    detail::check_range(i >= 1 && i <= size(), "PrefixIndex::select position out of range");
    u32 u = root_;
    u64 p = i - 1;
    while (!nodes_[u].leaf) {
      const Node& n = nodes_[u];
      std::size_t k = 0;
      while (p >= n.cnt[k]) p -= n.cnt[k++];
      u = n.kids[k];
    }
    return items_.handle_of(nodes_[u].kids[p]);
  }

  Handle front() const { return empty() ? kNullHandle : select(1); }
  Handle back() const { return empty() ? kNullHandle : select(size()); }

  /// Number of node levels (a lone leaf is height 1).
  unsigned height() const {
    if (root_ == kNil) return 0;
    unsigned h = 1;
    for (u32 u = root_; !nodes_[u].leaf; u = nodes_[u].kids[0]) ++h;
    return h;
  }

  template <class F>
  void for_each(F&& f) const {
    if (root_ != kNil) walk(root_, f);
  }

  void validate() const {
    if (root_ == kNil) {
      if (size() != 0) throw InvariantError("PrefixIndex: empty root with items");
      return;
    }
    if (validate_rec(root_, kNil) != size()) throw InvariantError("PrefixIndex: root count mismatch");
  }

 private:
  static constexpr u32 kNil = 0xFFFFFFFFu;
  struct Node {
    bool leaf = true;
    u32 parent = kNil;
    std::vector<u32> kids;  // item slots in a leaf, node ids otherwise
    std::vector<u64> cnt;   // Pref(u): n(u_i) per child (internal nodes)
  };
  struct Item {
    T val;
    u32 leaf;
  };

  u32 new_node(bool leaf) {
    u32 id;
    if (!free_nodes_.empty()) {
      id = free_nodes_.back();
      free_nodes_.pop_back();
      nodes_[id] = Node{};
    } else {
      id = static_cast<u32>(nodes_.size());
      nodes_.emplace_back();
    }
    nodes_[id].leaf = leaf;
    return id;
  }

  u64 count(u32 u) const {
    const Node& n = nodes_[u];
    if (n.leaf) return n.kids.size();
    u64 s = 0;
    for (u64 c : n.cnt) s += c;
    return s;
  }

  std::size_t child_index(u32 p, u32 c) const {
    const auto& k = nodes_[p].kids;
    return static_cast<std::size_t>(std::find(k.begin(), k.end(), c) - k.begin());
  }

  void adopt(u32 u) {
    Node& n = nodes_[u];
    if (n.leaf)
      for (u32 it : n.kids) items_[it].leaf = u;
    else
      for (u32 c : n.kids) nodes_[c].parent = u;
  }

  void fix_overflow(u32 u) {
    while (nodes_[u].kids.size() > max_) {
      const u32 v = new_node(nodes_[u].leaf);
      Node& a = nodes_[u];
      Node& b = nodes_[v];
      const std::size_t h = a.kids.size() / 2;
      b.kids.assign(a.kids.begin() + h, a.kids.end());
      a.kids.resize(h);
      if (!a.leaf) {
        b.cnt.assign(a.cnt.begin() + h, a.cnt.end());
        a.cnt.resize(h);
      }
      adopt(v);
      u32 p = nodes_[u].parent;
      if (p == kNil) {
        p = new_node(false);
        nodes_[p].kids = {u};
        nodes_[p].cnt = {count(u) + count(v)};
        nodes_[u].parent = p;
        root_ = p;
      }
      nodes_[v].parent = p;
      const std::size_t k = child_index(p, u);
      const u64 cv = count(v);
      nodes_[p].cnt[k] -= cv;
      nodes_[p].kids.insert(nodes_[p].kids.begin() + k + 1, v);
      nodes_[p].cnt.insert(nodes_[p].cnt.begin() + k + 1, cv);
      u = p;
    }
  }

  void release_node(u32 u) {
    nodes_[u].kids.clear();
    nodes_[u].cnt.clear();
    free_nodes_.push_back(u);
  }

  void fix_underflow(u32 u) {
    while (true) {
      const u32 p = nodes_[u].parent;
      if (p == kNil) {
        // Root: collapse single-child chains, drop an empty leaf.
        if (!nodes_[u].leaf && nodes_[u].kids.size() == 1) {
          root_ = nodes_[u].kids[0];
          nodes_[root_].parent = kNil;
          release_node(u);
        } else if (nodes_[u].leaf && nodes_[u].kids.empty()) {
          release_node(u);
          root_ = kNil;
        }
        return;
      }
      if (nodes_[u].kids.size() >= min_) return;
      const std::size_t k = child_index(p, u);
      const std::size_t l = k + 1 < nodes_[p].kids.size() ? k : k - 1;
      const u32 a = nodes_[p].kids[l], b = nodes_[p].kids[l + 1];
      // Merge b into a.
      Node& na = nodes_[a];
      Node& nb = nodes_[b];
      na.kids.insert(na.kids.end(), nb.kids.begin(), nb.kids.end());
      if (!na.leaf) na.cnt.insert(na.cnt.end(), nb.cnt.begin(), nb.cnt.end());
      adopt(a);
      nodes_[p].cnt[l] += nodes_[p].cnt[l + 1];
      nodes_[p].kids.erase(nodes_[p].kids.begin() + l + 1);
      nodes_[p].cnt.erase(nodes_[p].cnt.begin() + l + 1);
      release_node(b);
      fix_overflow(a);
      u = nodes_[a].parent;
      if (u == kNil) return;
    }
  }

  template <class F>
  void walk(u32 u, F& f) const {
    const Node& n = nodes_[u];
    if (n.leaf) {
      for (u32 it : n.kids) f(items_.handle_of(it), items_[it].val);
    } else {
      for (u32 c : n.kids) walk(c, f);
    }
  }

  u64 validate_rec(u32 u, u32 parent) const {
    const Node& n = nodes_[u];
    if (n.parent != parent) throw InvariantError("PrefixIndex: parent link");
    if (n.kids.size() > max_) throw InvariantError("PrefixIndex: node over capacity");
    if (parent != kNil && n.kids.size() < min_) throw InvariantError("PrefixIndex: node under capacity");
    if (n.leaf) {
      for (u32 it : n.kids)
        if (items_[it].leaf != u) throw InvariantError("PrefixIndex: item leaf link");
      return n.kids.size();
    }
    u64 s = 0;
    for (std::size_t k = 0; k < n.kids.size(); ++k) {
      const u64 c = validate_rec(n.kids[k], u);
      if (c != n.cnt[k]) throw InvariantError("PrefixIndex: Pref(u) entry differs from child count");
      s += c;
    }
    return s;
  }

  unsigned max_, min_;
  detail::Pool<Item> items_;
  std::vector<Node> nodes_;
  std::vector<u32> free_nodes_;
  u32 root_ = kNil;
};

}  // namespace dynseq
