#pragma once

// On-disk index: a small "DSQX" header (token mode, alphabet, context length
// for reports, build time) followed by the "SDSQ" container of the sequence.

#include <fstream>
#include <string>

#include "dynseq/alphabet.hpp"
#include "dynseq/compressed_seq.hpp"

namespace dynseq {

struct IndexFile {
  Alphabet alphabet;
  CompressedSeq seq{1};
  u32 k = 2;       ///< context length used by space reports
  u64 built = 0;   ///< seconds since the epoch

  void save(std::ostream& os) const {
    io::put_magic(os, "DSQX");
    io::put<u8>(os, 1);
    io::put<u8>(os, static_cast<u8>(alphabet.mode()));
    io::put<u32>(os, alphabet.sigma());
    io::put<u32>(os, k);
    io::put<u64>(os, built);
    io::put<u64>(os, alphabet.names().size());
    for (const auto& t : alphabet.names()) {
      io::put<u32>(os, static_cast<u32>(t.size()));
      os.write(t.data(), static_cast<std::streamsize>(t.size()));
    }
    seq.save(os);
  }

  static IndexFile load(std::istream& is, CompressedConfig cfg = {}) {
    io::expect_magic(is, "DSQX");
    if (io::get<u8>(is) != 1) throw FormatError("DSQX: unsupported version");
    const u8 mode = io::get<u8>(is);
    if (mode > 1) throw FormatError("DSQX: bad token mode");
    const u32 sigma = io::get<u32>(is);
    IndexFile f;
    f.k = io::get<u32>(is);
    f.built = io::get<u64>(is);
    const u64 m = io::get<u64>(is);
    if (m > sigma) throw FormatError("DSQX: more tokens than symbols");
    std::vector<std::string> toks(m);
    for (auto& t : toks) {
      const u32 len = io::get<u32>(is);
      if (len > (1u << 20)) throw FormatError("DSQX: token too long");
      t.resize(len);
      if (!is.read(t.data(), len)) throw FormatError("unexpected end of stream");
    }
    try {
      f.alphabet = Alphabet::of_tokens(std::move(toks), static_cast<TokenMode>(mode), sigma);
    } catch (const ValidationError& e) {
      throw FormatError(std::string("DSQX: ") + e.what());
    }
    f.seq = CompressedSeq::load(is, cfg);
    if (f.seq.sigma() != sigma) throw FormatError("DSQX: alphabet and sequence disagree on sigma");
    return f;
  }

  void save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    save(os);
    if (!os.flush()) throw std::runtime_error("write to " + path + " failed");
  }

  static IndexFile load_file(const std::string& path, CompressedConfig cfg = {}) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return load(is, cfg);
  }
};

}  // namespace dynseq
