#pragma once

// Timing harness for CompressedSeq: mixed operation streams with per-operation
// latency percentiles, a rank-latency scaling table over doubling n, and an
// extract-versus-access comparison. Operands are drawn outside the timed
// region; each timed region covers exactly one public call.

#include <algorithm>
#include <chrono>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynseq/alphabet.hpp"
#include "dynseq/compressed_seq.hpp"
#include "dynseq/edit_script.hpp"
#include "dynseq/workload.hpp"

namespace dynseq::bench {

using Clock = std::chrono::steady_clock;

inline double ns_since(Clock::time_point t) { return std::chrono::duration<double, std::nano>(Clock::now() - t).count(); }

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

/// Relative weights of I, D, R, S, A, X operations.
struct OpMix {
  double w[6] = {1, 1, 4, 2, 2, 0};
  static constexpr char kOps[6] = {'I', 'D', 'R', 'S', 'A', 'X'};

  /// Parses "I=1,D=1,R=4" style lists; unnamed operations get weight 0.
  static OpMix parse(const std::string& s) {
    OpMix m;
    std::fill(std::begin(m.w), std::end(m.w), 0.0);
    std::istringstream in(s);
    for (std::string item; std::getline(in, item, ',');) {
      const auto eq = item.find('=');
      const std::string key = item.substr(0, eq);
      const char* op = key.size() == 1 ? std::find(kOps, kOps + 6, key[0]) : kOps + 6;
      double v = -1;
      if (eq != std::string::npos) {
        try {
          std::size_t used = 0;
          v = std::stod(item.substr(eq + 1), &used);
          if (used != item.size() - eq - 1) v = -1;
        } catch (const std::exception&) {
          v = -1;
        }
      }
      if (op == kOps + 6 || !(v >= 0)) throw ValidationError("bad mix entry '" + item + "'");
      m.w[op - kOps] = v;
    }
    if (std::all_of(std::begin(m.w), std::end(m.w), [](double x) { return x == 0; }))
      throw ValidationError("mix has no positive weight");
    return m;
  }
};

struct Latency {
  u64 count = 0;
  double mean = 0, p50 = 0, p90 = 0, p99 = 0, max = 0;  // nanoseconds

  static Latency of(std::vector<double> v) {
    Latency l;
    l.count = v.size();
    if (v.empty()) return l;
    std::sort(v.begin(), v.end());
    double s = 0;
    for (double x : v) s += x;
    auto pct = [&](double q) { return v[std::min<std::size_t>(v.size() - 1, static_cast<std::size_t>(q * v.size()))]; };
    l.mean = s / v.size();
    l.p50 = pct(0.50);
    l.p90 = pct(0.90);
    l.p99 = pct(0.99);
    l.max = v.back();
    return l;
  }
};

struct MixReport {
  u64 n_start = 0, n_end = 0, ops = 0;
  double seconds = 0;  ///< sum of timed regions
  std::map<char, Latency> per_op;
  Latency all;
  double throughput() const { return seconds > 0 ? ops / seconds : 0.0; }
};

/// Runs ops operations drawn from mix against seq. Inserted symbols and the
/// symbols queried by R and S are copied from random positions, so the
/// symbol distribution stays that of the input.
inline MixReport run_mix(CompressedSeq& seq, u64 ops, const OpMix& mix, u64 seed, u64 xlen = 64) {
  MixReport rep;
  rep.n_start = seq.size();
  std::mt19937_64 rng(seed);
  const workload::Sampler pick(std::vector<double>(std::begin(mix.w), std::end(mix.w)));
  std::map<char, std::vector<double>> lat;
  std::vector<double> all;
  all.reserve(ops);
  u64 sink = 0;
  auto some_symbol = [&] { return seq.size() ? seq.access(rng() % seq.size() + 1) : static_cast<u32>(rng() % seq.sigma()) + 1; };
  for (u64 k = 0; k < ops; ++k) {
    char op = OpMix::kOps[pick(rng)];
    const u64 n = seq.size();
    if (n == 0 && op != 'I') op = 'I';
    double t = 0;
    switch (op) {
      case 'I': {
        const u64 i = rng() % (n + 1) + 1;
        const u32 a = some_symbol();
        const auto t0 = Clock::now();
        seq.insert(i, a);
        t = ns_since(t0);
        break;
      }
      case 'D': {
        const u64 i = rng() % n + 1;
        const auto t0 = Clock::now();
        sink += seq.erase(i);
        t = ns_since(t0);
        break;
      }
      case 'R': {
        const u64 i = rng() % n + 1;
        const u32 a = some_symbol();
        const auto t0 = Clock::now();
        sink += seq.rank(a, i);
        t = ns_since(t0);
        break;
      }
      case 'S': {
        const u32 a = some_symbol();
        const u64 j = rng() % seq.count(a) + 1;
        const auto t0 = Clock::now();
        sink += seq.select(a, j);
        t = ns_since(t0);
        break;
      }
      case 'A': {
        const u64 i = rng() % n + 1;
        const auto t0 = Clock::now();
        sink += seq.access(i);
        t = ns_since(t0);
        break;
      }
      default: {
        const u64 len = std::min(xlen, n);
        const u64 i = rng() % (n - len + 1) + 1;
        const auto t0 = Clock::now();
        sink += seq.extract(i, len).size();
        t = ns_since(t0);
        break;
      }
    }
    lat[op].push_back(t);
    all.push_back(t);
    rep.seconds += t * 1e-9;
  }
  rep.ops = ops;
  rep.n_end = seq.size();
  for (auto& [op, v] : lat) rep.per_op[op] = Latency::of(std::move(v));
  rep.all = Latency::of(std::move(all));
  if (sink == 0xdeadbeefcafef00dull) rep.seconds += 1e-12;  // keeps the calls observable
  return rep;
}

/// A named synthetic input: english (bytes of English-like text), markov
/// (order-2 Markov over sigma) or uniform (iid over sigma).
struct Synthetic {
  std::string kind = "english";
  u64 n = 1 << 20;
  u32 sigma = 64;
  u64 seed = 1;

  /// Parses "kind" or "kind:n=..,sigma=..,seed=..".
  static Synthetic parse(const std::string& spec) {
    Synthetic s;
    const auto colon = spec.find(':');
    s.kind = spec.substr(0, colon);
    if (s.kind != "english" && s.kind != "markov" && s.kind != "uniform")
      throw ValidationError("unknown synthetic kind '" + s.kind + "'");
    if (colon != std::string::npos) {
      std::istringstream in(spec.substr(colon + 1));
      for (std::string item; std::getline(in, item, ',');) {
        const auto eq = item.find('=');
        u64 v = 0;
        if (eq == std::string::npos || !detail::parse_u64(item.substr(eq + 1), v))
          throw ValidationError("bad synthetic parameter '" + item + "'");
        const std::string key = item.substr(0, eq);
        if (key == "n") {
          s.n = v;
        } else if (key == "sigma") {
          if (v < 1 || v > (u64{1} << 24)) throw ValidationError("synthetic sigma out of range");
          s.sigma = static_cast<u32>(v);
        } else if (key == "seed") {
          s.seed = v;
        } else {
          throw ValidationError("unknown synthetic parameter '" + key + "'");
        }
      }
    }
    return s;
  }

  struct Data {
    Alphabet alphabet;
    std::vector<u32> symbols;
  };
  Data make() const {
    Data d;
    if (kind == "english") {
      const std::string text = workload::english_like(n, seed);
      d.alphabet = Alphabet::of_text(text, TokenMode::Bytes);
      d.symbols = d.alphabet.encode(text);
      return d;
    }
    d.alphabet = Alphabet::of_tokens({}, TokenMode::Bytes, sigma);
    d.symbols = kind == "markov" ? workload::markov2(n, sigma, seed) : workload::uniform(n, sigma, seed);
    return d;
  }
};

struct ScalingRow {
  u64 n = 0;
  std::vector<double> rank_ns;  ///< mean rank latency of each run
  double median_ns() const { return median(rank_ns); }
};

/// Mean rank latency at each n (sizes ascending), runs times. The runs are
/// interleaved over the sizes so a slow spell of the machine hits every size.
inline std::vector<ScalingRow> rank_scaling(const Synthetic& base, const std::vector<u64>& sizes, u64 ops,
                                            const OpMix& mix, int runs, CompressedConfig cfg = {}) {
  std::vector<ScalingRow> rows(sizes.size());
  for (std::size_t k = 0; k < sizes.size(); ++k) rows[k].n = sizes[k];
  for (int r = 0; r < runs; ++r)
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      Synthetic s = base;
      s.n = sizes[k];
      const auto d = s.make();
      auto seq = CompressedSeq::from_symbols(d.symbols, d.alphabet.sigma(), cfg);
      const auto rep = run_mix(seq, ops, mix, base.seed + 1000 * k + r);
      const auto it = rep.per_op.find('R');
      rows[k].rank_ns.push_back(it == rep.per_op.end() ? 0.0 : it->second.mean);
    }
  return rows;
}

struct ExtractResult {
  std::vector<double> ratios;  ///< access-loop time over extract time, per run
  double extract_ns = 0, access_ns = 0;  ///< medians of per-run totals
  double median_ratio() const { return median(ratios); }
};

/// Time to extract len symbols against len access calls over the same
/// positions, at random offsets, runs times.
inline ExtractResult extract_vs_access(const CompressedSeq& seq, u64 len, int runs, u64 seed, int reps = 20) {
  ExtractResult res;
  if (seq.size() < len || len == 0) return res;
  std::mt19937_64 rng(seed);
  std::vector<double> ex, ac;
  u64 sink = 0;
  for (int r = 0; r < runs; ++r) {
    double te = 0, ta = 0;
    for (int q = 0; q < reps; ++q) {
      const u64 i = rng() % (seq.size() - len + 1) + 1;
      auto t0 = Clock::now();
      const auto v = seq.extract(i, len);
      te += ns_since(t0);
      sink += v[len / 2];
      t0 = Clock::now();
      for (u64 p = i; p < i + len; ++p) sink += seq.access(p);
      ta += ns_since(t0);
    }
    ex.push_back(te);
    ac.push_back(ta);
    res.ratios.push_back(ta / te);
  }
  res.extract_ns = median(ex) / reps;
  res.access_ns = median(ac) / reps;
  if (sink == 0xdeadbeefcafef00dull) res.ratios.push_back(0);
  return res;
}

}  // namespace dynseq::bench
