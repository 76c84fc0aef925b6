#pragma once

// Mapping between external tokens and symbols 1..sigma. Byte mode maps each
// byte of a text; word mode maps whitespace-delimited tokens. Symbols are
// assigned in sorted token order, so the mapping depends only on the set of
// tokens seen.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynseq/bits.hpp"
#include "dynseq/error.hpp"

namespace dynseq {

enum class TokenMode : u8 { Bytes, Words };

class Alphabet {
 public:
  Alphabet() = default;

  /// Alphabet of the tokens in text. sigma = 0 means "as many symbols as
  /// distinct tokens" (at least 1); a larger value leaves unnamed symbols at
  /// the top of the range.
  static Alphabet of_text(std::string_view text, TokenMode mode, u32 sigma = 0) {
    std::vector<std::string> toks = split(text, mode);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    return of_tokens(std::move(toks), mode, sigma);
  }

  /// Tokens must be distinct; they are sorted here.
  static Alphabet of_tokens(std::vector<std::string> toks, TokenMode mode, u32 sigma = 0) {
    std::sort(toks.begin(), toks.end());
    if (std::adjacent_find(toks.begin(), toks.end()) != toks.end()) throw ValidationError("Alphabet: repeated token");
    if (sigma != 0 && toks.size() > sigma)
      throw ValidationError("input has " + std::to_string(toks.size()) + " distinct symbols, more than sigma = " +
                            std::to_string(sigma));
    Alphabet al;
    al.mode_ = mode;
    al.sigma_ = sigma ? sigma : std::max<u32>(1, static_cast<u32>(toks.size()));
    al.names_ = std::move(toks);
    for (std::size_t k = 0; k < al.names_.size(); ++k) al.ids_.emplace(al.names_[k], static_cast<u32>(k + 1));
    return al;
  }

  static std::vector<std::string> split(std::string_view text, TokenMode mode) {
    std::vector<std::string> out;
    if (mode == TokenMode::Bytes) {
      out.reserve(text.size());
      for (char c : text) out.emplace_back(1, c);
      return out;
    }
    std::size_t p = 0;
    while (p < text.size()) {
      while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
      const std::size_t q = p;
      while (p < text.size() && !std::isspace(static_cast<unsigned char>(text[p]))) ++p;
      if (p > q) out.emplace_back(text.substr(q, p - q));
    }
    return out;
  }

  TokenMode mode() const { return mode_; }
  u32 sigma() const { return sigma_; }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<u32> id(const std::string& tok) const {
    auto it = ids_.find(tok);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Symbols of text; throws ValidationError on a token outside the alphabet.
  std::vector<u32> encode(std::string_view text) const {
    std::vector<u32> s;
    if (mode_ == TokenMode::Bytes) {
      std::vector<u32> byte(256, 0);
      for (const auto& [t, a] : ids_) byte[static_cast<unsigned char>(t[0])] = a;
      s.reserve(text.size());
      for (char c : text) {
        const u32 a = byte[static_cast<unsigned char>(c)];
        if (!a) throw ValidationError("byte " + std::to_string(static_cast<unsigned char>(c)) + " outside the alphabet");
        s.push_back(a);
      }
      return s;
    }
    for (const auto& t : split(text, mode_)) {
      const auto a = id(t);
      if (!a) throw ValidationError("token '" + t + "' outside the alphabet");
      s.push_back(*a);
    }
    return s;
  }

  /// Raw token of symbol a (empty for unnamed symbols).
  std::string raw(u32 a) const { return a >= 1 && a <= names_.size() ? names_[a - 1] : std::string(); }

  /// Printable form of symbol a for script output. Bytes that are not
  /// printable, or are whitespace or a backslash, are written as \xHH; unnamed
  /// symbols are written as #a.
  std::string show(u32 a) const {
    if (a < 1 || a > names_.size()) return "#" + std::to_string(a);
    if (mode_ == TokenMode::Words) return names_[a - 1];
    const auto c = static_cast<unsigned char>(names_[a - 1][0]);
    if (std::isgraph(c) && c != '\\') return std::string(1, static_cast<char>(c));
    static const char* hex = "0123456789abcdef";
    return std::string{'\\', 'x', hex[c >> 4], hex[c & 15]};
  }

  /// Inverse of show for a script token. An exact token wins over the escapes.
  std::optional<u32> parse(const std::string& tok) const {
    if (auto a = id(tok)) return a;
    if (tok.size() > 1 && tok.size() <= 11 && tok[0] == '#' &&
        std::all_of(tok.begin() + 1, tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const unsigned long long a = std::stoull(tok.substr(1));
      if (a >= 1 && a <= sigma_) return static_cast<u32>(a);
      return std::nullopt;
    }
    if (mode_ == TokenMode::Bytes && tok.size() == 4 && tok[0] == '\\' && tok[1] == 'x' &&
        std::isxdigit(static_cast<unsigned char>(tok[2])) && std::isxdigit(static_cast<unsigned char>(tok[3])))
      return id(std::string(1, static_cast<char>(std::stoi(tok.substr(2), nullptr, 16))));
    return std::nullopt;
  }

 private:
  TokenMode mode_ = TokenMode::Bytes;
  u32 sigma_ = 1;
  std::vector<std::string> names_;
  std::map<std::string, u32> ids_;
};

}  // namespace dynseq
