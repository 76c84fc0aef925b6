#pragma once

// Colored predecessor on a dynamic list: pred(e, a) is the rightmost entry of
// color a at or before e.
//
// Every color list L_a is cut into blocks of K/2..2K consecutive entries
// (K ~ log^2 m). The first entry of every block is also kept in L_1, which is
// stored in a B-tree T_L ordered by list order. Every T_L node u keeps Col(u):
// the colors below u, each with the leftmost and rightmost such entry.
//
// A query finds the last L_1 entry e' <= e by descending T_L, climbs from e'
// to the first left sibling whose Col contains a to get the last a-block head
// <= e', then binary searches that block.

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "dynseq/bits.hpp"
#include "dynseq/handle.hpp"
#include "dynseq/order_list.hpp"

namespace dynseq {

struct ColoredListConfig {
  u64 capacity = u64{1} << 20;  ///< expected maximum size; fixes K = ceil(log2 capacity)^2
  u64 block = 0;                ///< overrides K when nonzero
  unsigned fanout = 8;          ///< T_L nodes hold fanout/2..2*fanout children
};

class ColoredList {
 public:
  explicit ColoredList(u32 sigma, ColoredListConfig cfg = {}) : sigma_(sigma), cfg_(cfg) {
    if (sigma_ == 0) throw ValidationError("ColoredList: empty alphabet");
    if (cfg_.block == 0) {
      const u64 lg = std::max<u64>(2, bits::ceil_log2(std::max<u64>(cfg_.capacity, 4)));
      cfg_.block = lg * lg;
    }
    cfg_.block = std::max<u64>(2, cfg_.block);
    fmax_ = 2 * std::max(2u, cfg_.fanout);
    fmin_ = std::max(2u, cfg_.fanout) / 2;
  }

  std::size_t size() const { return ol_.size(); }
  u32 sigma() const { return sigma_; }
  u64 block_param() const { return cfg_.block; }
  const OrderedList& order() const { return ol_; }
  bool valid(Handle h) const { return ol_.valid(h); }
  Order compare(Handle a, Handle b) const { return ol_.compare(a, b); }
  u32 color(Handle h) const {
    ol_.at_check(h);
    return color_[h.idx];
  }
  Handle next(Handle h) const { return ol_.next(h); }
  Handle prev(Handle h) const { return ol_.prev(h); }
  Handle front() const { return ol_.front(); }
  Handle back() const { return ol_.back(); }
  std::size_t l1_size() const { return l1_count_; }

  /// New entry of color a right after `after` (null: at the front).
  Handle insert_after(Handle after, u32 a) {
    check_color(a);
    const Handle x = ol_.insert_after(after);
    grow(x.idx);
    color_[x.idx] = a;
    auto it = colors_.find(a);
    if (it == colors_.end()) {
      const u32 b = new_block(a);
      blocks_[b].ents.push_back(x.idx);
      block_of_[x.idx] = b;
      colors_[a] = ColorInfo{b, 1, 1};
      tl_insert(x.idx);
      return x;
    }
    ColorInfo& ci = it->second;
    ++ci.count;
    const Handle p = pred_excluding(x, a);
    u32 b;
    std::size_t pos;
    if (p.null()) {
      b = ci.first_block;
      pos = 0;
    } else {
      b = block_of_[p.idx];
      pos = index_in_block(b, p.idx) + 1;
    }
    Block& bk = blocks_[b];
    const bool new_head = pos == 0;
    const u32 old_head = bk.ents.front();
    bk.ents.insert(bk.ents.begin() + pos, x.idx);
    block_of_[x.idx] = b;
    if (new_head) {
      tl_erase(old_head);
      tl_insert(x.idx);
    }
    if (bk.ents.size() > 2 * cfg_.block) split_block(b);
    return x;
  }
  Handle push_back(u32 a) { return insert_after(back(), a); }

  void erase(Handle h) {
    ol_.at_check(h);
    const u32 x = h.idx;
    const u32 a = color_[x];
    const u32 b = block_of_[x];
    Block& bk = blocks_[b];
    const std::size_t pos = index_in_block(b, x);
    ColorInfo& ci = colors_.at(a);
    --ci.count;
    if (pos == 0) tl_erase(x);
    bk.ents.erase(bk.ents.begin() + pos);
    if (bk.ents.empty()) {
      unlink_block(b, ci);
      if (ci.blocks == 0) colors_.erase(a);
    } else {
      if (pos == 0) tl_insert(bk.ents.front());
      if (ci.blocks > 1 && bk.ents.size() < cfg_.block / 2) rebalance_block(b, ci);
    }
    ol_.erase(h);
  }

  /// Rightmost entry of color a at or before h; null when none.
  Handle pred(Handle h, u32 a) const {
    ol_.at_check(h);
    check_color(a);
    if (colors_.find(a) == colors_.end()) return kNullHandle;
    return pred_impl(h, a);
  }

  /// Leftmost / rightmost entry of color a.
  Handle first_of(u32 a) const {
    auto it = colors_.find(a);
    if (it == colors_.end()) return kNullHandle;
    return ol_.handle_of(blocks_[it->second.first_block].ents.front());
  }
  u64 count_of(u32 a) const {
    auto it = colors_.find(a);
    return it == colors_.end() ? 0 : it->second.count;
  }

  void validate() const {
    ol_.validate();
    // Blocks: membership, order, sizes, heads in L_1.
    std::size_t heads = 0, total = 0;
    for (const auto& [a, ci] : colors_) {
      u64 cnt = 0, nb = 0;
      u32 prev_last = kNil;
      for (u32 b = ci.first_block; b != kNil; b = blocks_[b].next) {
        const Block& bk = blocks_[b];
        ++nb;
        if (bk.color != a || bk.ents.empty()) throw InvariantError("ColoredList: bad block");
        if (ci.blocks > 1 && (bk.ents.size() < cfg_.block / 2 || bk.ents.size() > 2 * cfg_.block))
          throw InvariantError("ColoredList: block size out of bounds");
        for (std::size_t k = 0; k < bk.ents.size(); ++k) {
          const u32 e = bk.ents[k];
          if (color_[e] != a || block_of_[e] != b) throw InvariantError("ColoredList: entry/block link");
          const u32 before = k ? bk.ents[k - 1] : prev_last;
          if (before != kNil && !ol_.before(ol_.handle_of(before), ol_.handle_of(e)))
            throw InvariantError("ColoredList: L_a out of list order");
        }
        if (tl_node_[bk.ents.front()] == kNil) throw InvariantError("ColoredList: block head missing from L_1");
        prev_last = bk.ents.back();
        cnt += bk.ents.size();
        ++heads;
      }
      if (cnt != ci.count || nb != ci.blocks) throw InvariantError("ColoredList: color counts");
      total += cnt;
    }
    if (total != size()) throw InvariantError("ColoredList: entries missing from color lists");
    if (heads != l1_count_) throw InvariantError("ColoredList: L_1 size");
    if (tl_root_ != kNil) {
      std::vector<ColEntry> col;
      u32 last = kNil;
      tl_validate(tl_root_, kNil, col, last);
    }
  }

 private:
  static constexpr u32 kNil = 0xFFFFFFFFu;

  struct OL : OrderedList {
    Handle handle_of(u32 i) const { return handle_at(i); }
    void at_check(Handle h) const {
      if (!valid(h)) throw InvalidHandleError("stale or invalid handle");
    }
  };

  struct ColorInfo {
    u32 first_block = kNil;
    u64 blocks = 0;
    u64 count = 0;
  };
  struct Block {
    u32 color = 0;
    std::vector<u32> ents;
    u32 prev = kNil, next = kNil;
  };
  struct ColEntry {
    u32 color;
    u32 min, max;  // entry slots
    bool operator==(const ColEntry&) const = default;
  };
  struct TNode {
    bool bottom = true;
    u32 parent = kNil;
    std::vector<u32> kids;  // entry slots at the bottom level, node ids above
    std::vector<ColEntry> col;
    u32 first = kNil;  // leftmost entry below
  };

  void check_color(u32 a) const {
    if (a < 1 || a > sigma_) throw ValidationError("ColoredList: color out of range");
  }

  void grow(u32 i) {
    if (i >= color_.size()) {
      const std::size_t n = std::max<std::size_t>(i + 1, color_.size() * 2);
      color_.resize(n, 0);
      block_of_.resize(n, kNil);
      tl_node_.resize(n, kNil);
    }
    tl_node_[i] = kNil;
  }

  Handle h_of(u32 i) const { return ol_.handle_of(i); }
  bool le(u32 x, u32 y) const { return ol_.before_eq(h_of(x), h_of(y)); }

  // Position of entry x in block b (x must be there).
  std::size_t index_in_block(u32 b, u32 x) const {
    const auto& e = blocks_[b].ents;
    auto it = std::lower_bound(e.begin(), e.end(), x, [&](u32 p, u32 q) { return ol_.before(h_of(p), h_of(q)); });
    return static_cast<std::size_t>(it - e.begin());
  }

  // Last entry of block b at or before h.
  u32 last_le_in_block(u32 b, Handle h) const {
    const auto& e = blocks_[b].ents;
    auto it = std::upper_bound(e.begin(), e.end(), h, [&](Handle q, u32 p) { return ol_.before(q, h_of(p)); });
    return it == e.begin() ? kNil : *(it - 1);
  }

  Handle pred_impl(Handle h, u32 a) const {
    const u32 head = l1_pred(h, a);
    if (head == kNil) return kNullHandle;
    const u32 e = last_le_in_block(block_of_[head], h);
    return e == kNil ? kNullHandle : h_of(e);
  }

  // x is in the list but not yet in its color list.
  Handle pred_excluding(Handle x, u32 a) const { return pred_impl(x, a); }

  // ---- blocks ----
  u32 new_block(u32 a) {
    u32 b;
    if (!free_blocks_.empty()) {
      b = free_blocks_.back();
      free_blocks_.pop_back();
      blocks_[b] = Block{};
    } else {
      b = static_cast<u32>(blocks_.size());
      blocks_.emplace_back();
    }
    blocks_[b].color = a;
    return b;
  }

  void unlink_block(u32 b, ColorInfo& ci) {
    Block& bk = blocks_[b];
    if (bk.prev != kNil)
      blocks_[bk.prev].next = bk.next;
    else
      ci.first_block = bk.next;
    if (bk.next != kNil) blocks_[bk.next].prev = bk.prev;
    --ci.blocks;
    bk.ents.clear();
    free_blocks_.push_back(b);
  }

  void split_block(u32 b) {
    ColorInfo& ci = colors_.at(blocks_[b].color);
    const u32 nb = new_block(blocks_[b].color);
    Block& bk = blocks_[b];
    Block& nw = blocks_[nb];
    const std::size_t h = bk.ents.size() / 2;
    nw.ents.assign(bk.ents.begin() + h, bk.ents.end());
    bk.ents.resize(h);
    for (u32 e : nw.ents) block_of_[e] = nb;
    nw.prev = b;
    nw.next = bk.next;
    if (bk.next != kNil) blocks_[bk.next].prev = nb;
    bk.next = nb;
    ++ci.blocks;
    tl_insert(nw.ents.front());
  }

  // Block b is undersized and its color has another block: merge with a neighbour.
  void rebalance_block(u32 b, ColorInfo& ci) {
    const u32 l = blocks_[b].next != kNil ? b : blocks_[b].prev;
    const u32 r = blocks_[l].next;
    Block& L = blocks_[l];
    Block& R = blocks_[r];
    tl_erase(R.ents.front());
    for (u32 e : R.ents) block_of_[e] = l;
    L.ents.insert(L.ents.end(), R.ents.begin(), R.ents.end());
    unlink_block(r, ci);
    if (L.ents.size() > 2 * cfg_.block) split_block(l);
  }

  // ---- T_L over L_1 ----
  u32 new_tnode(bool bottom) {
    u32 id;
    if (!free_tnodes_.empty()) {
      id = free_tnodes_.back();
      free_tnodes_.pop_back();
      tn_[id] = TNode{};
    } else {
      id = static_cast<u32>(tn_.size());
      tn_.emplace_back();
    }
    tn_[id].bottom = bottom;
    return id;
  }
  void free_tnode(u32 u) {
    tn_[u].kids.clear();
    tn_[u].col.clear();
    free_tnodes_.push_back(u);
  }

  u32 first_below(u32 u) const { return tn_[u].first; }
  u32 kid_first(u32 u, std::size_t k) const { return tn_[u].bottom ? tn_[u].kids[k] : tn_[tn_[u].kids[k]].first; }

  static const ColEntry* col_find(const std::vector<ColEntry>& c, u32 a) {
    auto it = std::lower_bound(c.begin(), c.end(), a, [](const ColEntry& x, u32 v) { return x.color < v; });
    return it != c.end() && it->color == a ? &*it : nullptr;
  }

  // Recomputes Col(u) for one color from u's children.
  void col_refresh(u32 u, u32 a) {
    TNode& n = tn_[u];
    u32 mn = kNil, mx = kNil;
    for (u32 k : n.kids) {
      u32 cmin, cmax;
      if (n.bottom) {
        if (color_[k] != a) continue;
        cmin = cmax = k;
      } else {
        const ColEntry* c = col_find(tn_[k].col, a);
        if (!c) continue;
        cmin = c->min;
        cmax = c->max;
      }
      if (mn == kNil) mn = cmin;
      mx = cmax;  // children are in list order
    }
    auto it = std::lower_bound(n.col.begin(), n.col.end(), a, [](const ColEntry& x, u32 v) { return x.color < v; });
    const bool present = it != n.col.end() && it->color == a;
    if (mn == kNil) {
      if (present) n.col.erase(it);
    } else if (present) {
      it->min = mn;
      it->max = mx;
    } else {
      n.col.insert(it, ColEntry{a, mn, mx});
    }
  }

  // Rebuilds Col(u) and first(u) entirely from the children.
  void col_rebuild(u32 u) {
    TNode& n = tn_[u];
    n.col.clear();
    std::unordered_map<u32, std::size_t> at;
    std::vector<ColEntry> acc;
    auto add = [&](u32 a, u32 mn, u32 mx) {
      auto f = at.find(a);
      if (f == at.end()) {
        at.emplace(a, acc.size());
        acc.push_back(ColEntry{a, mn, mx});
      } else {
        acc[f->second].max = mx;
      }
    };
    for (u32 k : n.kids) {
      if (n.bottom)
        add(color_[k], k, k);
      else
        for (const ColEntry& c : tn_[k].col) add(c.color, c.min, c.max);
    }
    std::sort(acc.begin(), acc.end(), [](const ColEntry& x, const ColEntry& y) { return x.color < y.color; });
    n.col = std::move(acc);
    n.first = n.kids.empty() ? kNil : kid_first(u, 0);
  }

  void adopt(u32 u) {
    TNode& n = tn_[u];
    if (n.bottom)
      for (u32 e : n.kids) tl_node_[e] = u;
    else
      for (u32 c : n.kids) tn_[c].parent = u;
  }

  std::size_t child_index(u32 p, u32 c) const {
    const auto& k = tn_[p].kids;
    return static_cast<std::size_t>(std::find(k.begin(), k.end(), c) - k.begin());
  }

  // Walks from u to the root refreshing color a and the first pointers.
  void refresh_path(u32 u, u32 a) {
    for (; u != kNil; u = tn_[u].parent) {
      col_refresh(u, a);
      tn_[u].first = tn_[u].kids.empty() ? kNil : kid_first(u, 0);
    }
  }

  void tl_insert(u32 x) {
    ++l1_count_;
    if (tl_root_ == kNil) {
      tl_root_ = new_tnode(true);
    }
    const Handle hx = h_of(x);
    u32 u = tl_root_;
    while (!tn_[u].bottom) {
      const TNode& n = tn_[u];
      std::size_t k = 0;
      while (k + 1 < n.kids.size() && ol_.before_eq(h_of(tn_[n.kids[k + 1]].first), hx)) ++k;
      u = n.kids[k];
    }
    auto& kids = tn_[u].kids;
    std::size_t pos = 0;
    while (pos < kids.size() && ol_.before(h_of(kids[pos]), hx)) ++pos;
    kids.insert(kids.begin() + pos, x);
    tl_node_[x] = u;
    refresh_path(u, color_[x]);
    tl_overflow(u);
  }

  void tl_erase(u32 x) {
    --l1_count_;
    const u32 u = tl_node_[x];
    auto& kids = tn_[u].kids;
    kids.erase(std::find(kids.begin(), kids.end(), x));
    tl_node_[x] = kNil;
    refresh_path(u, color_[x]);
    tl_underflow(u);
  }

  void tl_overflow(u32 u) {
    while (tn_[u].kids.size() > fmax_) {
      const u32 v = new_tnode(tn_[u].bottom);
      TNode& a = tn_[u];
      TNode& b = tn_[v];
      const std::size_t h = a.kids.size() / 2;
      b.kids.assign(a.kids.begin() + h, a.kids.end());
      a.kids.resize(h);
      adopt(v);
      col_rebuild(u);
      col_rebuild(v);
      u32 p = tn_[u].parent;
      if (p == kNil) {
        p = new_tnode(false);
        tn_[p].kids = {u};
        tn_[u].parent = p;
        tl_root_ = p;
      }
      tn_[v].parent = p;
      auto& pk = tn_[p].kids;
      pk.insert(pk.begin() + child_index(p, u) + 1, v);
      col_rebuild(p);
      u = p;
    }
  }

  void tl_underflow(u32 u) {
    while (true) {
      const u32 p = tn_[u].parent;
      if (p == kNil) {
        if (!tn_[u].bottom && tn_[u].kids.size() == 1) {
          tl_root_ = tn_[u].kids[0];
          tn_[tl_root_].parent = kNil;
          free_tnode(u);
        } else if (tn_[u].bottom && tn_[u].kids.empty()) {
          free_tnode(u);
          tl_root_ = kNil;
        }
        return;
      }
      if (tn_[u].kids.size() >= fmin_) return;
      const std::size_t k = child_index(p, u);
      const std::size_t l = k + 1 < tn_[p].kids.size() ? k : k - 1;
      const u32 a = tn_[p].kids[l], b = tn_[p].kids[l + 1];
      tn_[a].kids.insert(tn_[a].kids.end(), tn_[b].kids.begin(), tn_[b].kids.end());
      adopt(a);
      tn_[p].kids.erase(tn_[p].kids.begin() + l + 1);
      free_tnode(b);
      col_rebuild(a);
      col_rebuild(p);
      tl_overflow(a);
      u = tn_[a].parent;
      if (u == kNil) return;
    }
  }

  // Last a-colored L_1 entry at or before h.
  u32 l1_pred(Handle h, u32 a) const {
    if (tl_root_ == kNil || ol_.before(h, h_of(tn_[tl_root_].first))) return kNil;
    // Descend to e' = last L_1 entry <= h.
    u32 u = tl_root_;
    while (!tn_[u].bottom) {
      const TNode& n = tn_[u];
      std::size_t k = 0;
      while (k + 1 < n.kids.size() && ol_.before_eq(h_of(tn_[n.kids[k + 1]].first), h)) ++k;
      u = n.kids[k];
    }
    const auto& kids = tn_[u].kids;
    std::size_t c = 0;
    while (c + 1 < kids.size() && ol_.before_eq(h_of(kids[c + 1]), h)) ++c;
    for (std::size_t j = c + 1; j-- > 0;)
      if (color_[kids[j]] == a) return kids[j];
    // Climb: the first left sibling holding a gives a.max of that subtree.
    for (u32 child = u, p = tn_[u].parent; p != kNil; child = p, p = tn_[p].parent) {
      const auto& pk = tn_[p].kids;
      for (std::size_t j = child_index(p, child); j-- > 0;)
        if (const ColEntry* ce = col_find(tn_[pk[j]].col, a)) return ce->max;
    }
    return kNil;
  }

  void tl_validate(u32 u, u32 parent, std::vector<ColEntry>& col, u32& last) const {
    const TNode& n = tn_[u];
    if (n.parent != parent) throw InvariantError("T_L: parent link");
    if (n.kids.size() > fmax_ || (parent != kNil && n.kids.size() < fmin_)) throw InvariantError("T_L: node size");
    std::vector<ColEntry> acc;
    auto merge = [&](const std::vector<ColEntry>& c) {
      for (const ColEntry& e : c) {
        auto it = std::find_if(acc.begin(), acc.end(), [&](const ColEntry& x) { return x.color == e.color; });
        if (it == acc.end())
          acc.push_back(e);
        else
          it->max = e.max;
      }
    };
    for (u32 k : n.kids) {
      if (n.bottom) {
        if (tl_node_[k] != u) throw InvariantError("T_L: entry node link");
        if (last != kNil && !ol_.before(h_of(last), h_of(k))) throw InvariantError("T_L: order");
        last = k;
        merge({ColEntry{color_[k], k, k}});
      } else {
        std::vector<ColEntry> c;
        tl_validate(k, u, c, last);
        merge(c);
      }
    }
    std::sort(acc.begin(), acc.end(), [](const ColEntry& x, const ColEntry& y) { return x.color < y.color; });
    if (acc != n.col) throw InvariantError("T_L: Col(u) differs from recomputed set");
    if (n.first != (n.kids.empty() ? kNil : kid_first(u, 0))) throw InvariantError("T_L: first pointer");
    col = std::move(acc);
  }

  u32 sigma_;
  ColoredListConfig cfg_;
  unsigned fmax_, fmin_;
  OL ol_;
  std::vector<u32> color_, block_of_, tl_node_;
  std::unordered_map<u32, ColorInfo> colors_;
  std::vector<Block> blocks_;
  std::vector<u32> free_blocks_;
  std::vector<TNode> tn_;
  std::vector<u32> free_tnodes_;
  u32 tl_root_ = kNil;
  std::size_t l1_count_ = 0;
};

}  // namespace dynseq
