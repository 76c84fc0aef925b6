#pragma once

// Immutable compressed sequence. Symbols are grouped into meta-symbols of ell
// symbols each and Huffman coded, which brings the payload close to n H_k.
// Rank and select work on blocks of sigma symbols: inside a block, pi maps a
// position to its place in the stable sorted order, select is pi^{-1} and rank
// is a predecessor search on the sampled occurrences F_a followed by a binary
// search with select. B_a = 1^{s_1} 0 1^{s_2} 0 ... counts a per block.
//
// With t = 1 (every practical alphabet) F_a, the rank remainders and the
// cycle marks collapse into one array holding pi^{-1}.

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "dynseq/huffman.hpp"
#include "dynseq/op_counter.hpp"
#include "dynseq/static_bits.hpp"
#include "dynseq/stepper.hpp"

namespace dynseq {

struct StaticSeqConfig {
  unsigned t = 0;         ///< sampling rate; 0 picks log sigma / (log log sigma)^3 clamped to [1, 64]
  unsigned sample = 64;   ///< meta-symbols between decode entry points
  bool use_map = false;   ///< remap to the symbols that occur (effective alphabet)
};

class StaticSeq {
 public:
  StaticSeq() = default;

  class Builder;

  static StaticSeq build(std::span<const u32> s, u32 sigma, StaticSeqConfig cfg = {});

  static unsigned default_t(u32 sigma) {
    // Below sigma = 16 the (log log sigma)^3 term is at most 1 and the formula
    // overshoots; per-block offsets would then outweigh the payload.
    if (sigma < 16) return 1;
    const double ls = std::log2(std::max<double>(sigma, 2));
    const double lls = std::log2(std::max(ls, 2.0));
    const double t = ls / (lls * lls * lls);
    return static_cast<unsigned>(std::clamp(std::floor(t), 1.0, 64.0));
  }

  u64 size() const { return n_; }
  u32 sigma() const { return sigma_; }
  u32 effective_sigma() const { return sig_; }
  unsigned ell() const { return ell_; }
  unsigned t() const { return t_; }
  u64 blocks() const { return nb_; }
  u64 block_size() const { return sig_; }

  u64 count(u32 a) const {
    const u32 c = to_internal(a);
    return c ? count_int(c) : 0;
  }

  u32 access(u64 i) const {
    ops::charge();
    detail::check_range(i >= 1 && i <= n_, "StaticSeq::access position out of range");
    return to_external(access_int(i));
  }

  /// Occurrences of a in 1..i.
  u64 rank(u32 a, u64 i) const {
    ops::charge();
    detail::check_range(i <= n_, "StaticSeq::rank position out of range");
    const u32 c = to_internal(a);
    if (c == 0 || i == 0) return 0;
    const u64 b = (i - 1) / sig_;
    return ones_before_block(c, b) + block_rank(b, c, i - b * sig_);
  }

  /// rank_{S[i]}(i).
  u64 partial_rank(u64 i) const {
    ops::charge();
    detail::check_range(i >= 1 && i <= n_, "StaticSeq::partial_rank position out of range");
    const u32 c = access_int(i);
    const u64 b = (i - 1) / sig_;
    return ones_before_block(c, b) + block_partial_rank(b, c, i - b * sig_);
  }

  /// Position of the j-th a.
  u64 select(u32 a, u64 j) const {
    ops::charge();
    const u32 c = to_internal(a);
    if (c == 0 || j == 0 || j > count_int(c)) throw NotFoundError("StaticSeq::select no such occurrence");
    const u64 zb = u64(c - 1) * nb_;
    const u64 g = ba_.select1(ba_off_[c] - zb + j);
    const u64 b = ba_.rank0(g) - zb;
    return b * sig_ + block_select(b, c, j - ones_before_block(c, b));
  }

  std::vector<u32> extract(u64 i, u64 len) const {
    std::vector<u32> out;
    extract_into(i, len, out);
    return out;
  }
  void extract_into(u64 i, u64 len, std::vector<u32>& out) const {
    if (len == 0) return;
    ops::charge(1 + len / 64);
    detail::check_range(i >= 1 && len <= n_ && i <= n_ - len + 1, "StaticSeq::extract range out of bounds");
    out.reserve(out.size() + len);
    u64 m = (i - 1) / ell_;
    unsigned k = static_cast<unsigned>((i - 1) % ell_);
    u64 pos = seek(m);
    while (len > 0) {
      const u64 v = code_.decode(sm_, pos);
      for (; k < ell_ && len > 0; ++k, --len) out.push_back(to_external(static_cast<u32>((v >> (k * w_)) & bits::low_mask(w_)) + 1));
      k = 0;
    }
  }

  /// pi and pi^{-1} of block b (positions 1-based inside the block).
  u64 perm(u64 b, u64 i) const { return pi(b, i); }
  u64 perm_inv(u64 b, u64 j) const { return pi_inv(b, j); }
  u64 block_len(u64 b) const { return std::min<u64>(sig_, n_ - b * sig_); }

  /// Bits of the coded meta-symbol stream alone.
  u64 coded_bits() const { return sm_bits_; }

  /// Bits of the in-memory representation.
  u64 size_bits() const {
    u64 s = sm_bits_ + samp_.bit_size() + code_.table_bits() + p_.bit_size() + r_.bit_size() + fq_.bit_size() + pt_.bit_size();
    s += v_.bit_size() + vf_.bit_size() + mk_.bit_size() + ba_.bit_size() + map_.bit_size();
    s += 64 * ba_off_.size() + fq_off_.bit_size() + vf_off_.bit_size();
    return s;
  }

  u64 serialized_bits() const {
    std::ostringstream os;
    save(os);
    return 8 * static_cast<u64>(os.str().size());
  }

  void save(std::ostream& os) const {
    io::put_magic(os, "SDSS");
    io::put<u8>(os, 1);
    io::put<u64>(os, n_);
    io::put<u32>(os, sigma_);
    io::put<u32>(os, sig_);
    io::put<u8>(os, static_cast<u8>(ell_));
    io::put<u8>(os, static_cast<u8>(t_));
    io::put<u32>(os, sample_);
    io::put<u8>(os, use_map_);
    if (use_map_) map_.save(os);
    code_.save(os);
    io::put<u64>(os, sm_bits_);
    io::put_words(os, std::span<const u64>(sm_.data(), bits::words_for(sm_bits_)));
    put_packed(os, samp_);
    v_.save(os);
    ba_.save(os);
    if (t_ == 1) {
      put_packed(os, p_);
    } else {
      put_packed(os, r_);
      put_packed(os, fq_);
      vf_.save(os);
      put_packed(os, fq_off_);
      put_packed(os, vf_off_);
      mk_.save(os);
      put_packed(os, pt_);
    }
  }

  static StaticSeq load(std::istream& is) {
    io::expect_magic(is, "SDSS");
    if (io::get<u8>(is) != 1) throw FormatError("SDSS: unsupported version");
    StaticSeq q;
    q.n_ = io::get<u64>(is);
    q.sigma_ = io::get<u32>(is);
    q.sig_ = io::get<u32>(is);
    q.ell_ = io::get<u8>(is);
    q.t_ = io::get<u8>(is);
    q.sample_ = io::get<u32>(is);
    q.use_map_ = io::get<u8>(is) != 0;
    if (q.sigma_ == 0 || q.sig_ == 0 || q.sig_ > q.sigma_ || q.ell_ == 0 || q.t_ == 0 || q.t_ > 64 || q.sample_ == 0 || q.n_ > (u64{1} << 40))
      throw FormatError("SDSS: bad header");
    q.w_ = sym_width(q.sig_);
    if (u64(q.ell_) * q.w_ > 64) throw FormatError("SDSS: meta-symbol too wide");
    if (q.use_map_) {
      q.map_ = StaticBits::load(is);
      if (q.map_.size() != q.sigma_ || std::max<u64>(1, q.map_.ones()) != q.sig_) throw FormatError("SDSS: bad symbol map");
    }
    q.code_ = HuffmanCode::load(is);
    q.sm_bits_ = io::get<u64>(is);
    q.sm_ = io::get_words(is);
    if (q.sm_.size() != bits::words_for(q.sm_bits_)) throw FormatError("SDSS: payload length");
    q.sm_.resize(q.sm_.size() + 2, 0);  // a corrupt code word may read past the end
    q.samp_ = get_packed(is);
    q.v_ = StaticBits::load(is);
    q.ba_ = StaticBits::load(is);
    if (q.t_ == 1) {
      q.p_ = get_packed(is);
    } else {
      q.r_ = get_packed(is);
      q.fq_ = get_packed(is);
      q.vf_ = StaticBits::load(is);
      q.fq_off_ = get_packed(is);
      q.vf_off_ = get_packed(is);
      q.mk_ = StaticBits::load(is);
      q.pt_ = get_packed(is);
    }
    q.nb_ = (q.n_ + q.sig_ - 1) / q.sig_;
    q.meta_ = (q.n_ + q.ell_ - 1) / q.ell_;
    if (q.ba_.zeros() != u64(q.sig_) * q.nb_ || q.ba_.ones() != q.n_ || q.samp_.size() != (q.meta_ + q.sample_ - 1) / q.sample_)
      throw FormatError("SDSS: inconsistent section sizes");
    const u64 nmarks = q.t_ == 1 ? 0 : q.mk_.ones();
    if (q.v_.size() != q.n_ + u64(q.sig_) * q.nb_ || (q.t_ == 1 && q.p_.size() != q.n_) ||
        (q.t_ != 1 && (q.r_.size() != q.n_ || q.mk_.size() != q.n_ || q.pt_.size() != nmarks || q.fq_off_.size() != q.nb_ + 1 ||
                       q.vf_off_.size() != q.nb_ + 1 || q.fq_off_.get(q.nb_) != q.fq_.size() || q.vf_off_.get(q.nb_) != q.vf_.size())))
      throw FormatError("SDSS: inconsistent block sections");
    q.set_ba_offsets();
    try {
      q.validate();
    } catch (const InvariantError& e) {
      throw FormatError(std::string("SDSS: ") + e.what());
    } catch (const std::out_of_range& e) {
      throw FormatError(std::string("SDSS: ") + e.what());
    }
    return q;
  }

  /// Decodes everything once and checks every block structure against it.
  void validate() const {
    if (n_ == 0) return;
    std::vector<u32> s;
    {
      u64 pos = 0;
      for (u64 m = 0; m < meta_ && s.size() < n_; ++m) {
        if (m % sample_ == 0 && samp_.get(m / sample_) != pos) throw InvariantError("StaticSeq: decode sample offset");
        const u64 v = code_.decode(sm_, pos);
        for (unsigned k = 0; k < ell_ && s.size() < n_; ++k) s.push_back(static_cast<u32>((v >> (k * w_)) & bits::low_mask(w_)) + 1);
        if (pos > sm_bits_) throw InvariantError("StaticSeq: meta stream overrun");
      }
      if (pos != sm_bits_) throw InvariantError("StaticSeq: meta stream length");
    }
    for (u32 c : s)
      if (c < 1 || c > sig_) throw InvariantError("StaticSeq: decoded symbol out of range");
    std::vector<u64> tot(sig_ + 1, 0);
    for (u64 b = 0; b < nb_; ++b) {
      const u64 len = block_len(b);
      std::vector<u64> cnt(sig_ + 1, 0);
      for (u64 i = 1; i <= len; ++i) {
        const u32 c = s[b * sig_ + i - 1];
        ++cnt[c];
        const u64 want = before_in_block(b, c) + cnt[c];
        if (pi(b, i) != want) throw InvariantError("StaticSeq: pi differs from stable sort order");
        if (pi_inv(b, want) != i) throw InvariantError("StaticSeq: pi^{-1}(pi(i)) != i");
      }
      for (u32 c = 1; c <= sig_; ++c) {
        if (ones_before_block(c, b) != tot[c]) throw InvariantError("StaticSeq: B_a differs from block counts");
        tot[c] += cnt[c];
      }
    }
    for (u32 c = 1; c <= sig_; ++c)
      if (count_int(c) != tot[c]) throw InvariantError("StaticSeq: B_a totals");
  }

  /// Symbol visits between suspension points of a Builder.
  static constexpr u64 kSlice = 4096;

 private:
  static unsigned sym_width(u32 sig) { return std::max(1u, bits::ceil_log2(sig)); }

  u32 to_internal(u32 a) const {
    if (a < 1 || a > sigma_) throw ValidationError("StaticSeq: symbol out of range");
    if (!use_map_) return a;
    return map_.access(a) ? static_cast<u32>(map_.rank1(a)) : 0;
  }
  u32 to_external(u32 c) const { return use_map_ ? static_cast<u32>(map_.select1(c)) : c; }

  u64 count_int(u32 c) const { return ba_off_[c + 1] - ba_off_[c] - nb_; }

  // Occurrences of internal symbol c in blocks 0..b-1.
  u64 ones_before_block(u32 c, u64 b) const {
    if (b == 0) return 0;
    const u64 g = ba_.select0(u64(c - 1) * nb_ + b);
    return g - ba_off_[c] - b;
  }


  Stepper build_job(std::span<const u32> s, u32 sigma, StaticSeqConfig cfg) {
    if (sigma == 0) throw ValidationError("StaticSeq: empty alphabet");
    for (u64 i = 0; i < s.size(); ++i) {
      if (s[i] < 1 || s[i] > sigma) throw ValidationError("StaticSeq: symbol out of range");
      if ((i + 1) % kSlice == 0) co_yield 0;
    }
    n_ = s.size();
    sigma_ = sigma;
    sample_ = std::max(1u, cfg.sample);
    use_map_ = cfg.use_map;
    std::vector<u32> internal;
    std::span<const u32> src = s;
    if (cfg.use_map) {
      std::vector<u64> mw(bits::words_for(sigma) + 1, 0);
      for (u32 a : s) bits::set(mw, a - 1, true);
      map_ = StaticBits(std::move(mw), sigma);
      sig_ = static_cast<u32>(std::max<u64>(1, map_.ones()));
      co_yield 0;
      internal.resize(s.size());
      for (u64 i = 0; i < s.size(); ++i) {
        internal[i] = static_cast<u32>(map_.rank1(s[i]));
        if ((i + 1) % kSlice == 0) co_yield 0;
      }
      src = internal;
    } else {
      sig_ = sigma;
    }
    t_ = cfg.t ? std::min(cfg.t, 64u) : default_t(sig_);
    for (auto j = build_meta(src); !j.resume();) co_yield 0;
    for (auto j = build_blocks(src); !j.resume();) co_yield 0;
  }

  // ---- meta-symbol stream ----
  Stepper build_meta(std::span<const u32> s) {
    w_ = sym_width(sig_);
    const double lg = std::log2(std::max<double>(n_, 2)) / std::log2(std::max<double>(sig_, 2));
    ell_ = static_cast<unsigned>(std::clamp(std::ceil(lg / 2), 1.0, double(64 / w_)));
    meta_ = (n_ + ell_ - 1) / ell_;
    auto meta_at = [&](u64 m) {
      u64 v = 0;
      for (unsigned k = 0; k < ell_ && m * ell_ + k < n_; ++k) v |= u64(s[m * ell_ + k] - 1) << (k * w_);
      return v;
    };
    const u64 slice = std::max<u64>(1, kSlice / ell_);
    std::unordered_map<u64, u64> freq;
    for (u64 m = 0; m < meta_; ++m) {
      ++freq[meta_at(m)];
      if ((m + 1) % slice == 0) co_yield 0;
    }
    std::vector<std::pair<u64, u64>> fv(freq.begin(), freq.end());
    std::sort(fv.begin(), fv.end());
    code_ = HuffmanCode::build(fv);
    co_yield 0;
    bits::BitWriter bw;
    std::vector<u64> offs;
    for (u64 m = 0; m < meta_; ++m) {
      if (m % sample_ == 0) offs.push_back(bw.size());
      code_.encode(bw, meta_at(m));
      if ((m + 1) % slice == 0) co_yield 0;
    }
    sm_bits_ = bw.size();
    sm_ = bw.finish();
    samp_ = bits::PackedArray(offs.size(), bits::width_for(sm_bits_));
    for (u64 k = 0; k < offs.size(); ++k) samp_.set(k, offs[k]);
  }

  // Bit offset of meta-symbol m.
  u64 seek(u64 m) const {
    u64 pos = samp_.get(m / sample_);
    for (u64 k = m - m % sample_; k < m; ++k) code_.decode(sm_, pos);
    return pos;
  }

  u32 access_int(u64 i) const {
    u64 pos = seek((i - 1) / ell_);
    const u64 v = code_.decode(sm_, pos);
    return static_cast<u32>((v >> (((i - 1) % ell_) * w_)) & bits::low_mask(w_)) + 1;
  }

  // ---- blocks ----
  Stepper build_blocks(std::span<const u32> s) {
    nb_ = (n_ + sig_ - 1) / sig_;
    const unsigned wp = bits::width_for(sig_ - 1);
    const unsigned wr = bits::ceil_log2(t_);
    std::vector<u64> fqo, vfo;
    if (t_ == 1) {
      p_ = bits::PackedArray(n_, wp);
    } else {
      r_ = bits::PackedArray(n_, wr);
      fqo.assign(nb_ + 1, 0);
      vfo.assign(nb_ + 1, 0);
    }
    bits::BitWriter vw, vfw, mkw;
    std::vector<bits::BitWriter> bw(sig_ + 1);
    std::vector<u64> fq, pt;
    std::vector<u32> cnt(sig_ + 2), start(sig_ + 2);
    std::vector<u32> order, piv;
    std::vector<u8> seen;
    u64 visited = 0;
    for (u64 b = 0; b < nb_; ++b) {
      visited += 4 * sig_;
      if (visited >= kSlice) {
        visited = 0;
        co_yield 0;
      }
      const u64 base = b * sig_;
      const u64 len = block_len(b);
      std::fill(cnt.begin(), cnt.end(), 0);
      for (u64 i = 0; i < len; ++i) ++cnt[s[base + i]];
      // Counting sort = stable sort of C'[i] = C[i] * sigma + i.
      start[1] = 0;
      for (u32 c = 1; c <= sig_; ++c) start[c + 1] = start[c] + cnt[c];
      order.assign(len, 0);
      piv.assign(len, 0);
      {
        std::vector<u32> fill(start.begin(), start.end());
        for (u64 i = 0; i < len; ++i) {
          const u32 c = s[base + i];
          order[fill[c]] = static_cast<u32>(i);
          piv[i] = fill[c]++;
        }
      }
      for (u32 c = 1; c <= sig_; ++c) {
        put_ones(vw, cnt[c]);
        vw.put_bit(false);
        put_ones(bw[c], cnt[c]);
        bw[c].put_bit(false);
      }
      if (t_ == 1) {
        for (u64 j = 0; j < len; ++j) p_.set(base + j, order[j]);
        continue;
      }
      // R, F_a.
      for (u32 c = 1; c <= sig_; ++c) {
        for (u32 r = 1; r <= cnt[c]; ++r) {
          const u32 i = order[start[c] + r - 1];
          r_.set(base + i, r % t_);
          if (r % t_ == 0) fq.push_back(i);
        }
        put_ones(vfw, cnt[c] / t_);
        vfw.put_bit(false);
      }
      fqo[b + 1] = fq.size();
      vfo[b + 1] = vfw.size();
      // Cycles of pi; every t-th element of a long cycle is marked with pi^{-t}.
      seen.assign(len, 0);
      std::vector<u32> cyc;
      std::vector<std::pair<u32, u32>> marks;
      for (u32 i0 = 0; i0 < len; ++i0) {
        if (seen[i0]) continue;
        cyc.clear();
        for (u32 x = i0; !seen[x]; x = piv[x]) {
          seen[x] = 1;
          cyc.push_back(x);
        }
        const u64 L = cyc.size();
        if (L < t_) continue;
        for (u64 k = 0; k < L; k += t_) marks.emplace_back(cyc[k], cyc[(k + L - t_) % L]);
      }
      std::sort(marks.begin(), marks.end());
      std::size_t mi = 0;
      for (u32 i = 0; i < len; ++i) {
        const bool m = mi < marks.size() && marks[mi].first == i;
        mkw.put_bit(m);
        if (m) pt.push_back(marks[mi++].second);
      }
    }
    {
      const u64 vn = vw.size();
      v_ = StaticBits(vw.finish(), vn);
    }
    co_yield 0;
    bits::BitWriter all;
    for (u32 c = 1; c <= sig_; ++c) {
      visited += bw[c].size() / 16;
      if (visited >= kSlice) {
        visited = 0;
        co_yield 0;
      }
      const u64 len = bw[c].size();
      auto words = bw[c].finish();
      for (u64 k = 0; k < len; k += 64) {
        const unsigned take = static_cast<unsigned>(std::min<u64>(64, len - k));
        all.put(bits::read(words, k, take), take);
      }
      bw[c] = bits::BitWriter{};
    }
    co_yield 0;
    {
      const u64 an = all.size();
      ba_ = StaticBits(all.finish(), an);
    }
    set_ba_offsets();
    co_yield 0;
    if (t_ != 1) {
      fq_ = bits::PackedArray(fq.size(), wp);
      for (u64 k = 0; k < fq.size(); ++k) fq_.set(k, fq[k]);
      const u64 vfn = vfw.size();
      vf_ = StaticBits(vfw.finish(), vfn);
      const u64 mn = mkw.size();
      mk_ = StaticBits(mkw.finish(), mn);
      pt_ = bits::PackedArray(pt.size(), wp);
      for (u64 k = 0; k < pt.size(); ++k) pt_.set(k, pt[k]);
      fq_off_ = pack(fqo);
      vf_off_ = pack(vfo);
    }
  }

  static bits::PackedArray pack(const std::vector<u64>& v) {
    bits::PackedArray a(v.size(), bits::width_for(v.empty() ? 0 : *std::max_element(v.begin(), v.end())));
    for (u64 k = 0; k < v.size(); ++k) a.set(k, v[k]);
    return a;
  }

  void set_ba_offsets() {
    ba_off_.assign(sig_ + 2, 0);
    for (u32 c = 1; c <= sig_; ++c) ba_off_[c + 1] = (c == sig_ || nb_ == 0) ? (c == sig_ ? ba_.size() : 0) : ba_.select0(u64(c) * nb_);
  }

  static void put_ones(bits::BitWriter& w, u64 d) {
    for (; d >= 64; d -= 64) w.put(~u64{0}, 64);
    if (d) w.put(bits::low_mask(static_cast<unsigned>(d)), static_cast<unsigned>(d));
  }

  // Occurrences of symbols < c in block b.
  u64 before_in_block(u64 b, u32 c) const {
    if (c == 1) return 0;
    const u64 off = b * 2 * sig_;  // every block except the last has 2*sigma bits in V
    return v_.select0(b * sig_ + c - 1) - off - (c - 1);
  }
  u64 last_count(u64 b) const { return block_len(b) - before_in_block(b, sig_); }
  u64 count_in_block(u64 b, u32 c) const { return c == sig_ ? last_count(b) : before_in_block(b, c + 1) - before_in_block(b, c); }

  // Number of sampled occurrences of symbols < c in block b, and of c itself.
  u64 f_before(u64 b, u32 c) const {
    if (c == 1) return 0;
    return vf_.select0(b * sig_ + c - 1) - vf_off_.get(b) - (c - 1);
  }

  // pi^{-1}(j): the position of the j-th element in stable sorted order.
  u64 pi_inv(u64 b, u64 j) const {
    if (t_ == 1) return p_.get(b * sig_ + j - 1) + 1;
    // Walk forward until a marked element or back to j.
    u64 cur = j;
    for (unsigned steps = 0;; ++steps) {
      if (mk_.access(b * sig_ + cur)) {
        u64 w = pt_.get(mk_.rank1(b * sig_ + cur) - 1) + 1;
        for (;;) {
          const u64 nx = pi(b, w);
          if (nx == j) return w;
          w = nx;
        }
      }
      const u64 nx = pi(b, cur);
      if (nx == j) return cur;
      cur = nx;
      if (steps > 2 * t_ + 2) throw InvariantError("StaticSeq: pi^{-1} walk exceeded t steps");
    }
  }

  u64 pi(u64 b, u64 i) const {
    const u32 c = access_int(b * sig_ + i);
    return before_in_block(b, c) + block_partial_rank(b, c, i);
  }

  // rank_c(i) inside block b where C[i] = c.
  u64 block_partial_rank(u64 b, u32 c, u64 i) const {
    if (t_ == 1) {
      const u64 lo = b * sig_ + before_in_block(b, c);
      const u64 hi = lo + count_in_block(b, c);
      return search_p(lo, hi, i) - lo;
    }
    const u64 fl = fq_off_.get(b) + f_before(b, c);
    const u64 fh = fq_off_.get(b) + f_before(b, c) + count_in_block(b, c) / t_;
    const u64 k = search_fq(fl, fh, i) - fl;
    return r_.get(b * sig_ + i - 1) + k * t_;
  }

  // rank_c(i) inside block b for any c.
  u64 block_rank(u64 b, u32 c, u64 i) const {
    if (t_ == 1) {
      const u64 lo = b * sig_ + before_in_block(b, c);
      const u64 hi = lo + count_in_block(b, c);
      return search_p(lo, hi, i) - lo;
    }
    const u64 nc = count_in_block(b, c);
    const u64 fl = fq_off_.get(b) + f_before(b, c);
    const u64 k = search_fq(fl, fl + nc / t_, i) - fl;
    // The answer lies in [k t, min(k t + t - 1, n_c)]; binary search with select.
    u64 lo = k * t_, hi = std::min<u64>(k * t_ + t_ - 1, nc);
    while (lo < hi) {
      const u64 mid = (lo + hi + 1) / 2;
      if (block_select(b, c, mid) <= i)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  u64 block_select(u64 b, u32 c, u64 j) const { return pi_inv(b, before_in_block(b, c) + j); }

  // First index in p_[lo, hi) whose position (1-based) exceeds i.
  u64 search_p(u64 lo, u64 hi, u64 i) const {
    while (lo < hi) {
      const u64 mid = (lo + hi) / 2;
      if (p_.get(mid) + 1 <= i)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }
  u64 search_fq(u64 lo, u64 hi, u64 i) const {
    while (lo < hi) {
      const u64 mid = (lo + hi) / 2;
      if (fq_.get(mid) + 1 <= i)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  static void put_packed(std::ostream& os, const bits::PackedArray& p) {
    io::put<u64>(os, p.size());
    io::put<u8>(os, static_cast<u8>(p.width()));
    io::put_words(os, std::span<const u64>(p.words().data(), bits::words_for(p.bit_size())));
  }
  static bits::PackedArray get_packed(std::istream& is) {
    const u64 n = io::get<u64>(is);
    const unsigned w = io::get<u8>(is);
    if (w > 64 || n > (u64{1} << 40)) throw FormatError("SDSS: bad packed array header");
    bits::PackedArray p(n, w);
    auto words = io::get_words(is);
    if (words.size() != bits::words_for(n * w)) throw FormatError("SDSS: packed array length");
    std::copy(words.begin(), words.end(), p.words().begin());
    return p;
  }

  u64 n_ = 0;
  u32 sigma_ = 1, sig_ = 1;
  unsigned ell_ = 1, t_ = 1, w_ = 1, sample_ = 64;
  bool use_map_ = false;
  u64 nb_ = 0, meta_ = 0;
  StaticBits map_;
  HuffmanCode code_;
  std::vector<u64> sm_{0};
  u64 sm_bits_ = 0;
  bits::PackedArray samp_;
  StaticBits v_;   // per block 1^{n_1} 0 ... 1^{n_sigma} 0
  StaticBits ba_;  // B_1 B_2 ... concatenated
  std::vector<u64> ba_off_{0, 0};
  bits::PackedArray p_;   // t = 1: pi^{-1}
  bits::PackedArray r_;   // rank mod t
  bits::PackedArray fq_;  // F_a positions, per block and symbol
  StaticBits vf_;         // per block 1^{|F_1|} 0 ... 1^{|F_sigma|} 0
  bits::PackedArray fq_off_, vf_off_;  // per block offsets into fq_ and vf_
  StaticBits mk_;         // marked cycle positions
  bits::PackedArray pt_;  // pi^{-t} of marked positions
};

/// Construction in slices of about StaticSeq::kSlice symbol visits. The input
/// must stay alive and unchanged until done() is true.
class StaticSeq::Builder {
 public:
  Builder(std::span<const u32> s, u32 sigma, StaticSeqConfig cfg = {}) : q_(std::make_unique<StaticSeq>()) {
    job_ = q_->build_job(s, sigma, cfg);
  }

  bool done() const { return job_.done(); }
  /// Runs one slice; true once the sequence is complete.
  bool step() {
    ops::charge(kSlice / 64);
    return job_.resume();
  }
  StaticSeq take() {
    job_.finish();
    job_ = Stepper();
    return std::move(*q_);
  }

 private:
  std::unique_ptr<StaticSeq> q_;
  Stepper job_;
};

inline StaticSeq StaticSeq::build(std::span<const u32> s, u32 sigma, StaticSeqConfig cfg) {
  Builder b(s, sigma, cfg);
  return b.take();
}

}  // namespace dynseq
