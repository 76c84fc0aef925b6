#pragma once

// Differential fuzzing of CompressedSeq against ArraySeq. Operations are
// generated as script lines, run on both sides, and the printed results
// compared line by line; structural audits run along the way. A divergence is
// shrunk to a short script that still reproduces it.

#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "dynseq/compressed_seq.hpp"
#include "dynseq/edit_script.hpp"

namespace dynseq::fuzz {

struct Options {
  u64 seed = 1;
  u64 ops = 10000;
  u32 sigma = 26;
  CompressedConfig cfg;
  u64 audit_every = 0;  ///< deep validate() period in operations, 0 = auto
  /// Test hook: when set, rank answers are off by one whenever the prefix is
  /// the whole sequence and holds at least this many symbols.
  u64 fault_min_n = 0;
};

/// CompressedSeq as seen by the interpreter, with an optional planted bug.
class Subject {
 public:
  Subject(u32 sigma, const Options& o) : seq_(sigma, o.cfg), fault_(o.fault_min_n) {}
  u64 size() const { return seq_.size(); }
  u32 access(u64 i) const { return seq_.access(i); }
  u64 rank(u32 a, u64 i) const {
    const u64 r = seq_.rank(a, i);
    return fault_ && i == seq_.size() && i >= fault_ ? r + 1 : r;
  }
  u64 select(u32 a, u64 j) const { return seq_.select(a, j); }
  std::vector<u32> extract(u64 i, u64 len) const { return seq_.extract(i, len); }
  void insert(u64 i, u32 a) { seq_.insert(i, a); }
  u32 erase(u64 i) { return seq_.erase(i); }
  const CompressedSeq& seq() const { return seq_; }

 private:
  CompressedSeq seq_;
  u64 fault_;
};

struct Divergence {
  u64 op_index = 0;  ///< 0-based index of the first diverging operation
  std::string op, expected, got;
};

/// Generates the next operation given the current oracle contents. About one
/// in twenty operations is deliberately out of range.
inline ScriptOp next_op(std::mt19937_64& rng, const ArraySeq& ref, const Alphabet& al) {
  ScriptOp o;
  const u64 n = ref.size();
  const bool bad = rng() % 20 == 0;
  auto pos = [&](u64 hi) { return bad ? hi + 1 + rng() % 3 : rng() % hi + 1; };
  auto sym = [&] { return al.show(n && rng() % 2 ? ref.data()[rng() % n] : static_cast<u32>(rng() % al.sigma()) + 1); };
  const u64 pick = n == 0 ? 0 : rng() % 100;
  if (pick < 30) {
    o.op = 'I';
    o.x = pos(n + 1);
    o.sym = sym();
  } else if (pick < 50) {
    o.op = 'D';
    o.x = pos(n);
  } else if (pick < 65) {
    o.op = 'R';
    o.sym = sym();
    o.x = bad ? n + 1 : rng() % (n + 1);
  } else if (pick < 80) {
    o.op = 'S';
    o.sym = sym();
    const u32 a = *al.parse(o.sym);
    o.x = bad ? ref.rank(a, n) + 1 : rng() % std::max<u64>(1, ref.rank(a, n)) + 1;
  } else if (pick < 95) {
    o.op = 'A';
    o.x = pos(n);
  } else {
    o.op = 'X';
    o.y = rng() % std::min<u64>(n, 300) + 1;
    o.x = bad ? n : rng() % (n - o.y + 1) + 1;
  }
  return o;
}

namespace detail {

inline std::string run_one(const ScriptOp& o, auto& seq, const Alphabet& al) {
  std::ostringstream out;
  run_script(std::vector<ScriptOp>{o}, seq, al, out, true);
  return out.str();
}

// Replays ops on fresh subjects; returns the first divergence, if any.
inline std::optional<Divergence> replay(const std::vector<ScriptOp>& ops, const Options& opt, const Alphabet& al,
                                        u64 audit_every) {
  Subject s(opt.sigma, opt);
  ArraySeq ref(opt.sigma);
  for (u64 k = 0; k < ops.size(); ++k) {
    std::string got;
    try {
      got = run_one(ops[k], s, al);
      if (audit_every && (k + 1) % audit_every == 0) s.seq().validate(true);
    } catch (const std::exception& e) {
      got = std::string("exception: ") + e.what() + "\n";
    }
    const std::string want = run_one(ops[k], ref, al);
    if (got != want) return Divergence{k, format_op(ops[k]), want, got};
  }
  return std::nullopt;
}

}  // namespace detail

/// Removes chunks of operations while the divergence persists (ddmin style),
/// then single operations with later positions shifted to match, then shrinks
/// numeric arguments, until nothing shrinks further.
inline std::vector<ScriptOp> minimize(std::vector<ScriptOp> ops, const Options& opt, const Alphabet& al) {
  auto fails = [&](const std::vector<ScriptOp>& v) { return detail::replay(v, opt, al, 1).has_value(); };
  if (auto d = detail::replay(ops, opt, al, 1)) ops.resize(d->op_index + 1);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t chunk = std::max<std::size_t>(1, ops.size() / 2);; chunk /= 2) {
      for (std::size_t at = 0; at < ops.size();) {
        std::vector<ScriptOp> trial(ops.begin(), ops.begin() + at);
        trial.insert(trial.end(), ops.begin() + std::min(ops.size(), at + chunk), ops.end());
        if (!trial.empty() && fails(trial)) {
          ops = std::move(trial);
          changed = true;
          continue;
        }
        // A removed insert shifts later positions; try following it.
        if (chunk == 1 && !trial.empty()) {
          for (std::size_t k = at; k < trial.size(); ++k)
            if (trial[k].op != 'R' && trial[k].op != 'S' ? trial[k].x > 1 : trial[k].op == 'R' && trial[k].x > 0)
              --trial[k].x;
          if (fails(trial)) {
            ops = std::move(trial);
            changed = true;
            continue;
          }
        }
        at += chunk;
      }
      if (chunk == 1) break;
    }
    for (std::size_t k = 0; k < ops.size(); ++k)
      for (u64 ScriptOp::*f : {&ScriptOp::x, &ScriptOp::y})
        for (bool again = true; again;) {
          again = false;
          const u64 v = ops[k].*f;
          for (u64 c : {u64{0}, u64{1}, v / 2, v - 1}) {
            if (v == 0 || c >= v) continue;
            ops[k].*f = c;
            if (fails(ops)) {
              again = changed = true;
              break;
            }
            ops[k].*f = v;
          }
        }
  }
  u64 line = 1;
  for (auto& o : ops) o.line = line++;
  return ops;
}

struct Outcome {
  u64 executed = 0;
  std::optional<Divergence> divergence;
  std::vector<ScriptOp> repro;  ///< minimized, when diverged
};

inline Outcome run(const Options& opt) {
  const Alphabet al = Alphabet::of_tokens({}, TokenMode::Bytes, opt.sigma);
  const u64 audit = opt.audit_every ? opt.audit_every : std::max<u64>(64, opt.ops / 64);
  std::mt19937_64 rng(opt.seed);
  Subject s(opt.sigma, opt);
  ArraySeq ref(opt.sigma);
  std::vector<ScriptOp> ops;
  Outcome out;
  for (u64 k = 0; k < opt.ops; ++k) {
    ScriptOp o = next_op(rng, ref, al);
    o.line = k + 1;
    ops.push_back(o);
    std::string got;
    try {
      got = detail::run_one(o, s, al);
      if ((k + 1) % audit == 0) s.seq().validate(true);
    } catch (const std::exception& e) {
      got = std::string("exception: ") + e.what() + "\n";
    }
    const std::string want = detail::run_one(o, ref, al);
    ++out.executed;
    if (got != want) {
      out.divergence = Divergence{k, format_op(o), want, got};
      out.repro = minimize(std::move(ops), opt, al);
      return out;
    }
  }
  try {
    s.seq().validate(true);
  } catch (const std::exception& e) {
    out.divergence = Divergence{opt.ops, "final audit", "", e.what()};
  }
  return out;
}

/// Script text of a repro, with the settings needed to replay it.
inline std::string repro_text(const Options& opt, const std::vector<ScriptOp>& ops) {
  std::string s = "# fuzz repro: start from an empty sequence with sigma=" + std::to_string(opt.sigma) +
                  " r=" + std::to_string(opt.cfg.r) + " step_budget=" + std::to_string(opt.cfg.step_budget) +
                  " seed=" + std::to_string(opt.seed) + "\n";
  for (const auto& o : ops) s += format_op(o) + "\n";
  return s;
}

}  // namespace dynseq::fuzz
