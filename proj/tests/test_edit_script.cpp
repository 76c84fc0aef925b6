#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "dynseq/edit_script.hpp"
#include "dynseq/fuzz.hpp"
#include "dynseq/index_file.hpp"
#include "dynseq/workload.hpp"

using namespace dynseq;

namespace {

std::string run(const std::string& script, auto& seq, const Alphabet& al, bool keep_going = true) {
  std::ostringstream out;
  run_script(parse_script(script), seq, al, out, keep_going);
  return out.str();
}

// Random script over the alphabet, mostly valid, with some out-of-range and
// unknown-symbol operations mixed in.
std::string random_script(std::mt19937_64& rng, const Alphabet& al, u64 n, int ops) {
  std::string s;
  auto sym = [&] { return rng() % 50 == 0 ? std::string("#999999") : al.show(static_cast<u32>(rng() % al.sigma()) + 1); };
  for (int k = 0; k < ops; ++k) {
    const u64 pos = rng() % (n + 3);
    switch (rng() % 6) {
      case 0:
        s += "I " + std::to_string(pos) + " " + sym() + "\n";
        if (pos >= 1 && pos <= n + 1) ++n;
        break;
      case 1:
        s += "D " + std::to_string(pos) + "\n";
        if (pos >= 1 && pos <= n) --n;
        break;
      case 2: s += "R " + sym() + " " + std::to_string(pos) + "\n"; break;
      case 3: s += "S " + sym() + " " + std::to_string(rng() % (n / 2 + 3)) + "\n"; break;
      case 4: s += "A " + std::to_string(pos) + "\n"; break;
      default: s += "X " + std::to_string(pos) + " " + std::to_string(rng() % 40) + "\n"; break;
    }
    if (rng() % 40 == 0) s += "# comment\n\n";
  }
  return s;
}

}  // namespace

TEST(Alphabet, BytesInSortedOrder) {
  const auto al = Alphabet::of_text("banana", TokenMode::Bytes);
  EXPECT_EQ(al.sigma(), 3u);
  EXPECT_EQ(al.encode("banana"), (std::vector<u32>{2, 1, 3, 1, 3, 1}));
  EXPECT_THROW(al.encode("bananas"), ValidationError);
  EXPECT_THROW(Alphabet::of_text("banana", TokenMode::Bytes, 2), ValidationError);
  EXPECT_EQ(Alphabet::of_text("", TokenMode::Bytes).sigma(), 1u);
}

TEST(Alphabet, WordsSplitOnWhitespace) {
  const auto al = Alphabet::of_text("  to be\tor\nnot to  be ", TokenMode::Words);
  EXPECT_EQ(al.names(), (std::vector<std::string>{"be", "not", "or", "to"}));
  EXPECT_EQ(al.encode("to be or not"), (std::vector<u32>{4, 1, 3, 2}));
}

TEST(Alphabet, ShowAndParseAreInverseForEveryByte) {
  std::string all;
  for (int c = 0; c < 256; ++c) all += static_cast<char>(c);
  const auto al = Alphabet::of_text(all, TokenMode::Bytes);
  ASSERT_EQ(al.sigma(), 256u);
  for (u32 a = 1; a <= 256; ++a) {
    const std::string t = al.show(a);
    EXPECT_EQ(t.find_first_of(" \t\r\n"), std::string::npos);
    EXPECT_EQ(al.parse(t), a) << t;
  }
  const auto padded = Alphabet::of_text("ab", TokenMode::Bytes, 5);
  EXPECT_EQ(padded.show(4), "#4");
  EXPECT_EQ(padded.parse("#4"), 4u);
  EXPECT_EQ(padded.parse("#6"), std::nullopt);
}

TEST(EditScript, ParseErrorsNameTheLine) {
  EXPECT_TRUE(parse_script("").empty());
  EXPECT_EQ(parse_script("# only a comment\n\n   \n").size(), 0u);
  const auto ops = parse_script("I 1 a\r\nD 2\n\nR a 0\nS a 1\nA 3\nX 1 5\n");
  ASSERT_EQ(ops.size(), 6u);
  EXPECT_EQ(ops[2].line, 4u);
  EXPECT_EQ(format_op(ops[5]), "X 1 5");
  for (const char* bad : {"Q 1", "I 1", "D x", "R a -1", "A 1 2", "X 1", "II 1 a", "S a +3"}) {
    try {
      parse_script(std::string("A 1\n") + bad + "\n");
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const FormatError& e) {
      EXPECT_EQ(std::string(e.what()).rfind("line 2: ", 0), 0u) << e.what();
    }
  }
}

TEST(EditScript, SmallCases) {
  const auto al = Alphabet::of_text("x", TokenMode::Bytes);
  auto seq = CompressedSeq::from_symbols(al.encode("x"), al.sigma());
  EXPECT_EQ(run("", seq, al), "");
  EXPECT_EQ(run("A 1\n", seq, al), "x\n");
  EXPECT_EQ(run("A 2\nA 1\n", seq, al, false), "error line 1: position out of range\n");
  EXPECT_EQ(run("A 2\nA 1\n", seq, al, true), "error line 1: position out of range\nx\n");
  EXPECT_EQ(run("I 1 y\nS x 2\n", seq, al), "error line 1: unknown symbol\nerror line 2: no such occurrence\n");
}

TEST(EditScript, WordScript) {
  const std::string text = "the cat saw the dog";
  const auto al = Alphabet::of_text(text, TokenMode::Words);
  auto seq = CompressedSeq::from_symbols(al.encode(text), al.sigma());
  EXPECT_EQ(run("R the 5\nS the 2\nX 2 3\nI 1 dog\nA 1\nD 1\nX 1 5\n", seq, al),
            "2\n4\ncat saw the\ndog\nthe cat saw the dog\n");
}

TEST(EditScript, CompressedSeqMatchesReferenceInterpreter) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 12; ++round) {
    const bool words = round % 3 == 2;
    const std::string text = words ? workload::english_like(3000, round) : workload::english_like(600 + 400 * round, round);
    const auto al = Alphabet::of_text(text, words ? TokenMode::Words : TokenMode::Bytes, round % 4 == 1 && !words ? 300 : 0);
    const auto sym = al.encode(text);
    CompressedConfig cfg;
    cfg.r = 2 + round % 5;
    if (round % 2) cfg.step_budget = 1;
    auto seq = CompressedSeq::from_symbols(sym, al.sigma(), cfg);
    ArraySeq ref(al.sigma(), sym);
    const std::string script = random_script(rng, al, sym.size(), 3000);
    const std::string got = run(script, seq, al);
    EXPECT_EQ(got, run(script, ref, al)) << "round " << round;
    EXPECT_EQ(seq.to_vector(), ref.data());
    seq.validate(true);
  }
}

TEST(IndexFile, RoundTripAnswersIdentically) {
  for (TokenMode mode : {TokenMode::Bytes, TokenMode::Words}) {
    const std::string text = workload::english_like(20000, 3);
    IndexFile f;
    f.alphabet = Alphabet::of_text(text, mode);
    f.seq = CompressedSeq::from_symbols(f.alphabet.encode(text), f.alphabet.sigma(), CompressedConfig{.r = 4});
    f.k = 1;
    f.built = 1700000000;
    std::mt19937_64 rng(5);
    std::ostringstream sink;
    const auto edits = random_script(rng, f.alphabet, f.seq.size(), 500);
    run_script(parse_script(edits), f.seq, f.alphabet, sink, true);

    std::stringstream buf;
    f.save(buf);
    auto g = IndexFile::load(buf);
    EXPECT_EQ(g.k, 1u);
    EXPECT_EQ(g.built, 1700000000u);
    EXPECT_EQ(g.alphabet.names(), f.alphabet.names());
    const auto queries = random_script(rng, f.alphabet, f.seq.size(), 2000);
    EXPECT_EQ(run(queries, g.seq, g.alphabet), run(queries, f.seq, f.alphabet));
  }
}

TEST(IndexFile, RejectsCorruptHeaders) {
  IndexFile f;
  f.alphabet = Alphabet::of_text("abc", TokenMode::Bytes);
  f.seq = CompressedSeq::from_symbols(f.alphabet.encode("abcabc"), 3);
  std::stringstream buf;
  f.save(buf);
  const std::string good = buf.str();
  for (std::size_t cut : {0ul, 3ul, 10ul, 30ul, good.size() - 1}) {
    std::istringstream in(good.substr(0, cut));
    EXPECT_THROW(IndexFile::load(in), FormatError) << "cut at " << cut;
  }
  std::string bad = good;
  bad[5] = 7;  // token mode
  std::istringstream in(bad);
  EXPECT_THROW(IndexFile::load(in), FormatError);
}

TEST(Fuzz, FixedSeedsPass) {
  for (u64 seed : {1u, 2u, 3u}) {
    fuzz::Options o;
    o.seed = seed;
    o.ops = 4000;
    o.sigma = seed == 2 ? 300 : 5;
    o.cfg.r = 2 + seed;
    o.cfg.step_budget = seed == 3 ? 1 : 0;
    const auto out = fuzz::run(o);
    EXPECT_FALSE(out.divergence.has_value()) << out.divergence->op << " want " << out.divergence->expected << " got "
                                             << out.divergence->got;
    EXPECT_EQ(out.executed, 4000u);
  }
  fuzz::Options none;
  none.ops = 0;
  EXPECT_FALSE(fuzz::run(none).divergence.has_value());
}

TEST(Fuzz, InjectedFaultIsCaughtAndMinimized) {
  fuzz::Options o;
  o.seed = 9;
  o.ops = 3000;
  o.sigma = 4;
  o.fault_min_n = 3;
  const auto out = fuzz::run(o);
  ASSERT_TRUE(out.divergence.has_value());
  EXPECT_EQ(out.divergence->op.substr(0, 1), "R");
  // Three inserts and the rank query are the least that can show the fault.
  EXPECT_LE(out.repro.size(), 6u);
  EXPECT_GE(out.repro.size(), 4u);
  const auto text = fuzz::repro_text(o, out.repro);
  const auto replayed = parse_script(text);
  EXPECT_EQ(replayed.size(), out.repro.size());
  // The repro still diverges when replayed from its text.
  fuzz::Subject s(o.sigma, o);
  ArraySeq ref(o.sigma);
  const auto al = Alphabet::of_tokens({}, TokenMode::Bytes, o.sigma);
  std::ostringstream a, b;
  run_script(replayed, s, al, a, true);
  run_script(replayed, ref, al, b, true);
  EXPECT_NE(a.str(), b.str());
}
