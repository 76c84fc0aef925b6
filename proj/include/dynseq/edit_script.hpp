#pragma once

// Edit and query scripts, one operation per line:
//
//   I <pos> <sym>   insert sym so that it lands at pos
//   D <pos>         delete position pos
//   R <sym> <pos>   rank of sym in positions 1..pos
//   S <sym> <k>     position of the k-th sym
//   A <pos>         symbol at pos
//   X <pos> <len>   len symbols starting at pos
//
// Blank lines and lines starting with '#' are skipped. Symbols are written as
// Alphabet::show prints them. Each query prints one line; a failing operation
// prints "error line <n>: <reason>" instead.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dynseq/alphabet.hpp"

namespace dynseq {

struct ScriptOp {
  char op = 'A';
  u64 line = 0;
  std::string sym;  ///< I, R, S
  u64 x = 0;        ///< position, or k for S
  u64 y = 0;        ///< len for X
};

namespace detail {

inline bool parse_u64(const std::string& s, u64& v) {
  if (s.empty() || s[0] == '+' || s[0] == '-') return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace detail

/// Throws FormatError naming the first malformed line.
inline std::vector<ScriptOp> parse_script(std::istream& in) {
  std::vector<ScriptOp> ops;
  std::string text;
  for (u64 line = 1; std::getline(in, text); ++line) {
    if (!text.empty() && text.back() == '\r') text.pop_back();
    std::istringstream ls(text);
    std::vector<std::string> f;
    for (std::string w; ls >> w;) f.push_back(w);
    if (f.empty() || f[0][0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw FormatError("line " + std::to_string(line) + ": " + why + ": '" + text + "'");
    };
    if (f[0].size() != 1) fail("unknown operation");
    ScriptOp o;
    o.op = f[0][0];
    o.line = line;
    auto num = [&](std::size_t k, u64& v) {
      if (!detail::parse_u64(f[k], v)) fail("expected a non-negative integer");
    };
    switch (o.op) {
      case 'I':
        if (f.size() != 3) fail("I takes <pos> <sym>");
        num(1, o.x);
        o.sym = f[2];
        break;
      case 'D':
      case 'A':
        if (f.size() != 2) fail(std::string(1, o.op) + " takes <pos>");
        num(1, o.x);
        break;
      case 'R':
      case 'S':
        if (f.size() != 3) fail(std::string(1, o.op) + (o.op == 'R' ? " takes <sym> <pos>" : " takes <sym> <k>"));
        o.sym = f[1];
        num(2, o.x);
        break;
      case 'X':
        if (f.size() != 3) fail("X takes <pos> <len>");
        num(1, o.x);
        num(2, o.y);
        break;
      default:
        fail("unknown operation");
    }
    ops.push_back(std::move(o));
  }
  return ops;
}

inline std::vector<ScriptOp> parse_script(const std::string& text) {
  std::istringstream in(text);
  return parse_script(in);
}

inline std::string format_op(const ScriptOp& o) {
  switch (o.op) {
    case 'I': return "I " + std::to_string(o.x) + " " + o.sym;
    case 'D': return "D " + std::to_string(o.x);
    case 'A': return "A " + std::to_string(o.x);
    case 'R': return "R " + o.sym + " " + std::to_string(o.x);
    case 'S': return "S " + o.sym + " " + std::to_string(o.x);
    default: return "X " + std::to_string(o.x) + " " + std::to_string(o.y);
  }
}

/// Plain array with the query semantics (and exceptions) of the dynamic
/// sequences; the reference every other interpreter is compared against.
class ArraySeq {
 public:
  explicit ArraySeq(u32 sigma, std::vector<u32> s = {}) : sigma_(sigma), s_(std::move(s)) {}

  u64 size() const { return s_.size(); }
  u32 sigma() const { return sigma_; }
  const std::vector<u32>& data() const { return s_; }

  u32 access(u64 i) const {
    detail::check_range(i >= 1 && i <= s_.size(), "position out of range");
    return s_[i - 1];
  }
  u64 rank(u32 a, u64 i) const {
    detail::check_range(i <= s_.size(), "position out of range");
    u64 r = 0;
    for (u64 k = 0; k < i; ++k) r += s_[k] == a;
    return r;
  }
  u64 select(u32 a, u64 j) const {
    if (j > 0)
      for (u64 k = 0; k < s_.size(); ++k)
        if (s_[k] == a && --j == 0) return k + 1;
    throw NotFoundError("no such occurrence");
  }
  std::vector<u32> extract(u64 i, u64 len) const {
    if (len == 0) return {};
    detail::check_range(i >= 1 && len <= s_.size() && i <= s_.size() - len + 1, "range out of bounds");
    return std::vector<u32>(s_.begin() + (i - 1), s_.begin() + (i - 1 + len));
  }
  void insert(u64 i, u32 a) {
    detail::check_range(i >= 1 && i <= s_.size() + 1, "position out of range");
    if (a < 1 || a > sigma_) throw ValidationError("symbol out of range");
    s_.insert(s_.begin() + (i - 1), a);
  }
  u32 erase(u64 i) {
    detail::check_range(i >= 1 && i <= s_.size(), "position out of range");
    const u32 a = s_[i - 1];
    s_.erase(s_.begin() + (i - 1));
    return a;
  }

 private:
  u32 sigma_;
  std::vector<u32> s_;
};

struct ScriptResult {
  u64 executed = 0;
  u64 errors = 0;
  bool aborted = false;  ///< stopped at the first error
};

/// Runs ops against seq, writing one line per query and per error. Without
/// keep_going the run stops after the first error line.
template <class Seq>
ScriptResult run_script(const std::vector<ScriptOp>& ops, Seq& seq, const Alphabet& al, std::ostream& out,
                        bool keep_going = false) {
  ScriptResult res;
  std::string buf;
  for (const ScriptOp& o : ops) {
    const char* why = nullptr;
    try {
      u32 a = 0;
      if (o.op == 'I' || o.op == 'R' || o.op == 'S') {
        const auto id = al.parse(o.sym);
        if (!id) throw ValidationError("unknown symbol");
        a = *id;
      }
      switch (o.op) {
        case 'I': seq.insert(o.x, a); break;
        case 'D': seq.erase(o.x); break;
        case 'R': out << seq.rank(a, o.x) << '\n'; break;
        case 'S': out << seq.select(a, o.x) << '\n'; break;
        case 'A': out << al.show(seq.access(o.x)) << '\n'; break;
        case 'X': {
          buf.clear();
          const auto v = seq.extract(o.x, o.y);
          for (std::size_t k = 0; k < v.size(); ++k) {
            if (k && al.mode() == TokenMode::Words) buf += ' ';
            buf += al.show(v[k]);
          }
          out << buf << '\n';
          break;
        }
      }
    } catch (const RangeError&) {
      why = "position out of range";
    } catch (const NotFoundError&) {
      why = "no such occurrence";
    } catch (const ValidationError&) {
      why = "unknown symbol";
    }
    ++res.executed;
    if (why) {
      ++res.errors;
      out << "error line " << o.line << ": " << why << '\n';
      if (!keep_going) {
        res.aborted = true;
        break;
      }
    }
  }
  return res;
}

}  // namespace dynseq
