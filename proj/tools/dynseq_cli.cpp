// dynseq: build, edit, query, benchmark and fuzz compressed dynamic sequences.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 divergence found by fuzz.

#include <CLI11.hpp>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifdef __linux__
#include <sched.h>
#endif

#include "dynseq/bench.hpp"
#include "dynseq/edit_script.hpp"
#include "dynseq/fuzz.hpp"
#include "dynseq/index_file.hpp"
#include "dynseq/space_bounds.hpp"

using namespace dynseq;

namespace {

constexpr int kOk = 0, kUsage = 1, kData = 2, kDiverged = 3;

// Failures attributable to the input data rather than the command line.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixed(double x, int digits = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << x;
  return ss.str();
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (w.size() <= c) w.push_back(0);
      w[c] = std::max(w[c], r[c].size());
    }
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string pad(w[c] - r[c].size(), ' ');
      line += c == 0 ? r[c] + pad : "  " + pad + r[c];
    }
    std::cout << line << '\n';
  }
}

void print_space_report(const IndexFile& f) {
  const auto& q = f.seq;
  const auto rep = q.space_report(f.k);
  const u64 n = rep.n;
  const double per = n ? 1.0 / n : 0.0;
  const double b0 = bounds::order0_total(n, q.sigma(), rep.h0);
  const double bk = bounds::orderk_coded(n, q.sigma(), rep.hk);
  std::cout << "n=" << n << '\n'
            << "sigma=" << q.sigma() << '\n'
            << "r=" << q.r() << '\n'
            << "k=" << rep.k << '\n'
            << "bits_total=" << rep.bits_total << '\n'
            << "bits_per_symbol=" << fixed(rep.bits_total * per) << '\n'
            << "h0=" << fixed(rep.h0) << '\n'
            << "h" << rep.k << "=" << fixed(rep.hk) << '\n'
            << "static_coded_bits=" << rep.static_coded_bits << '\n'
            << "static_coded_bits_per_symbol=" << fixed(rep.static_coded_bits * per) << '\n'
            << "order0_budget_bits=" << fixed(b0, 0) << '\n'
            << "order0_within=" << (rep.bits_total <= b0 ? "yes" : "no") << '\n'
            << "order" << rep.k << "_coded_budget_bits=" << fixed(bk, 0) << '\n'
            << "order" << rep.k << "_coded_within=" << (rep.static_coded_bits <= bk ? "yes" : "no") << '\n';
  std::vector<std::vector<std::string>> rows{{"component", "bits", "bits/sym", "share"}};
  for (const auto& [name, bits] : rep.bits_per_section)
    rows.push_back({name, std::to_string(bits), fixed(bits * per, 3),
                    fixed(rep.bits_total ? 100.0 * bits / rep.bits_total : 0.0, 1) + "%"});
  std::cout << '\n';
  print_table(rows);
}

TokenMode token_mode(const std::string& s) { return s == "words" ? TokenMode::Words : TokenMode::Bytes; }

u32 parse_sigma(const std::string& s) {
  if (s == "auto") return 0;
  u64 v = 0;
  if (!detail::parse_u64(s, v) || v < 1 || v > (u64{1} << 30)) throw CLI::ValidationError("--sigma", "expected auto or a positive integer");
  return static_cast<u32>(v);
}

// ---------------------------------------------------------------- build

struct BuildArgs {
  std::string input, out, sigma = "auto", tokenize = "bytes";
  u64 r = 0;
  unsigned k = 2;
};

int cmd_build(const BuildArgs& a) {
  const std::string text = read_file(a.input);
  const u32 sigma = parse_sigma(a.sigma);
  IndexFile f;
  try {
    f.alphabet = Alphabet::of_text(text, token_mode(a.tokenize), sigma);
  } catch (const ValidationError& e) {
    throw DataError(e.what());
  }
  CompressedConfig cfg;
  cfg.r = a.r;
  f.seq = CompressedSeq::from_symbols(f.alphabet.encode(text), f.alphabet.sigma(), cfg);
  f.k = a.k;
  f.built = static_cast<u64>(std::time(nullptr));
  const std::string out = a.out.empty() ? a.input + ".dsq" : a.out;
  f.save_file(out);
  std::cout << "index=" << out << '\n';
  print_space_report(f);
  return kOk;
}

// ---------------------------------------------------------------- query

struct QueryArgs {
  std::string index, script, out;
  bool keep_going = false, save = false;
};

int cmd_query(const QueryArgs& a) {
  IndexFile f = IndexFile::load_file(a.index);
  std::vector<ScriptOp> ops;
  try {
    std::istringstream in(read_file(a.script));
    ops = parse_script(in);
  } catch (const FormatError& e) {
    throw DataError(a.script + ": " + e.what());
  }
  std::ostringstream out;
  const auto res = run_script(ops, f.seq, f.alphabet, out, a.keep_going);
  std::cout << out.str() << std::flush;
  if (res.aborted) {
    std::cerr << "stopped at the first failing operation (use --keep-going to continue)\n";
    return kData;
  }
  if (a.save || !a.out.empty()) f.save_file(a.out.empty() ? a.index : a.out);
  return kOk;
}

// ---------------------------------------------------------------- extract

int cmd_extract(const std::string& index, u64 pos, u64 len, bool all) {
  const IndexFile f = IndexFile::load_file(index);
  if (all) {
    pos = 1;
    len = f.seq.size();
  }
  std::vector<u32> v;
  try {
    v = f.seq.extract(pos, len);
  } catch (const RangeError&) {
    throw DataError("range " + std::to_string(pos) + "+" + std::to_string(len) + " outside a sequence of length " +
                    std::to_string(f.seq.size()));
  }
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k && f.alphabet.mode() == TokenMode::Words) s += ' ';
    s += f.alphabet.raw(v[k]);
  }
  if (f.alphabet.mode() == TokenMode::Words && !s.empty()) s += '\n';
  std::cout << s << std::flush;
  return kOk;
}

int cmd_report(const std::string& index, int k) {
  IndexFile f = IndexFile::load_file(index);
  if (k >= 0) f.k = static_cast<u32>(k);
  std::cout << "index=" << index << '\n' << "built=" << f.built << '\n' << "tokens=" << (f.alphabet.mode() == TokenMode::Words ? "words" : "bytes") << '\n';
  print_space_report(f);
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string index, synthetic = "english", mix = "I=1,D=1,R=4,S=2,A=2,X=1";
  u64 ops = 100000, scaling_ops = 100000, extract_len = 10000, seed = 1;
  unsigned scaling_max_lg = 20;
  int runs = 3;
  bool no_scaling = false;
};

void pin_to_one_cpu() {
#ifdef __linux__
  cpu_set_t set;
  CPU_ZERO(&set);
  const int cpu = sched_getcpu();
  CPU_SET(cpu < 0 ? 0 : cpu, &set);
  sched_setaffinity(0, sizeof(set), &set);
#endif
}

void print_latency(const std::string& prefix, const bench::Latency& l) {
  std::cout << prefix << ".count=" << l.count << '\n'
            << prefix << ".mean_ns=" << fixed(l.mean, 1) << '\n'
            << prefix << ".p50_ns=" << fixed(l.p50, 1) << '\n'
            << prefix << ".p90_ns=" << fixed(l.p90, 1) << '\n'
            << prefix << ".p99_ns=" << fixed(l.p99, 1) << '\n'
            << prefix << ".max_ns=" << fixed(l.max, 1) << '\n';
}

int cmd_bench(const BenchArgs& a) {
  pin_to_one_cpu();
  std::cout << "ops=" << a.ops << '\n';
  if (a.ops == 0) return kOk;
  const auto mix = bench::OpMix::parse(a.mix);
  bench::Synthetic syn = bench::Synthetic::parse(a.synthetic);
  CompressedSeq seq(1);
  if (!a.index.empty()) {
    seq = IndexFile::load_file(a.index).seq;
    std::cout << "source=" << a.index << '\n';
  } else {
    const auto d = syn.make();
    seq = CompressedSeq::from_symbols(d.symbols, d.alphabet.sigma());
    std::cout << "source=" << a.synthetic << '\n';
  }
  std::cout << "sigma=" << seq.sigma() << '\n';

  // Extraction is compared on the structure as loaded, before the mixed run.
  const auto ex = bench::extract_vs_access(seq, a.extract_len, a.runs, a.seed);
  if (!ex.ratios.empty())
    std::cout << "extract.len=" << a.extract_len << '\n'
              << "extract.ns=" << fixed(ex.extract_ns, 0) << '\n'
              << "access_loop.ns=" << fixed(ex.access_ns, 0) << '\n'
              << "extract.speedup=" << fixed(ex.median_ratio(), 2) << '\n';

  const auto rep = bench::run_mix(seq, a.ops, mix, a.seed);
  std::cout << "n_start=" << rep.n_start << '\n'
            << "n_end=" << rep.n_end << '\n'
            << "seconds=" << fixed(rep.seconds, 4) << '\n'
            << "throughput_ops_per_s=" << fixed(rep.throughput(), 0) << '\n';
  print_latency("all", rep.all);
  for (const auto& [op, l] : rep.per_op) print_latency(std::string("op.") + op, l);

  std::vector<bench::ScalingRow> rows;
  if (!a.no_scaling) {
    std::vector<u64> sizes;
    for (unsigned lg = 16; lg <= a.scaling_max_lg; lg += 2) sizes.push_back(u64{1} << lg);
    rows = bench::rank_scaling(syn, sizes, a.scaling_ops, mix, a.runs);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::string p = "scaling." + std::to_string(rows[k].n);
      std::cout << p << ".rank_ns=" << fixed(rows[k].median_ns(), 1) << '\n';
      if (k) std::cout << p << ".ratio=" << fixed(rows[k].median_ns() / rows[k - 1].median_ns(), 3) << '\n';
    }
  }

  std::cout << '\n';
  std::vector<std::vector<std::string>> t{{"op", "count", "mean_ns", "p50", "p90", "p99", "max"}};
  for (const auto& [op, l] : rep.per_op)
    t.push_back({std::string(1, op), std::to_string(l.count), fixed(l.mean, 0), fixed(l.p50, 0), fixed(l.p90, 0),
                 fixed(l.p99, 0), fixed(l.max, 0)});
  print_table(t);
  if (!rows.empty()) {
    std::cout << '\n';
    std::vector<std::vector<std::string>> s{{"n", "rank_ns(median)", "runs", "x prev"}};
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::string runs;
      for (double x : rows[k].rank_ns) runs += (runs.empty() ? "" : " ") + fixed(x, 0);
      s.push_back({std::to_string(rows[k].n), fixed(rows[k].median_ns(), 0), runs,
                   k ? fixed(rows[k].median_ns() / rows[k - 1].median_ns(), 2) : "-"});
    }
    print_table(s);
  }
  return kOk;
}

// ---------------------------------------------------------------- fuzz

struct FuzzArgs {
  u64 seed = 1, ops = 10000, r = 0, budget = 0, fault = 0;
  u32 sigma = 26;
  std::string repro;
};

int cmd_fuzz(const FuzzArgs& a) {
  fuzz::Options o;
  o.seed = a.seed;
  o.ops = a.ops;
  o.sigma = a.sigma;
  o.cfg.r = a.r;
  o.cfg.step_budget = a.budget;
  o.fault_min_n = a.fault;
  const auto out = fuzz::run(o);
  std::cout << "seed=" << a.seed << '\n' << "ops=" << out.executed << '\n';
  if (!out.divergence) {
    std::cout << "result=pass\n";
    return kOk;
  }
  const auto& d = *out.divergence;
  const std::string path = a.repro.empty() ? "fuzz_repro_" + std::to_string(a.seed) + ".txt" : a.repro;
  std::ofstream(path) << fuzz::repro_text(o, out.repro);
  std::cout << "result=diverged\n"
            << "op_index=" << d.op_index << '\n'
            << "op=" << d.op << '\n'
            << "expected=" << d.expected.substr(0, d.expected.find('\n')) << '\n'
            << "got=" << d.got.substr(0, d.got.find('\n')) << '\n'
            << "repro_ops=" << out.repro.size() << '\n'
            << "repro=" << path << '\n';
  return kDiverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed dynamic sequences: build indexes, run edit/query scripts, benchmark, fuzz."};
  app.require_subcommand(1);

  BuildArgs ba;
  auto* build = app.add_subcommand("build", "Build an index from a text file and print its space report");
  build->add_option("input", ba.input, "Input file ('-' for stdin)")->required();
  build->add_option("--sigma", ba.sigma, "Alphabet size: auto or N")->capture_default_str();
  build->add_option("--r", ba.r, "Sampling rate r (0 = automatic)")->capture_default_str();
  build->add_option("--k", ba.k, "Context length for the order-k report")->check(CLI::Range(0, 3))->capture_default_str();
  build->add_option("--out", ba.out, "Index path (default: <input>.dsq)");
  build->add_option("--tokenize", ba.tokenize, "Symbol model")->check(CLI::IsMember({"bytes", "words"}))->capture_default_str();

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "Run an edit/query script against an index");
  query->add_option("index", qa.index, "Index file")->required()->check(CLI::ExistingFile);
  query->add_option("script", qa.script, "Script file ('-' for stdin)")->required();
  query->add_flag("--keep-going", qa.keep_going, "Report failing operations and continue");
  query->add_flag("--save", qa.save, "Write the edited index back");
  query->add_option("--out", qa.out, "Write the edited index here instead");

  std::string xindex;
  u64 xpos = 1, xlen = 0;
  auto* extract = app.add_subcommand("extract", "Print symbols pos..pos+len-1 (whole sequence by default)");
  extract->add_option("index", xindex, "Index file")->required()->check(CLI::ExistingFile);
  auto* xp = extract->add_option("pos", xpos, "First position (1-based)");
  extract->add_option("len", xlen, "Number of symbols")->needs(xp);

  std::string rindex;
  int rk = -1;
  auto* report = app.add_subcommand("report", "Print the space report of an index");
  report->add_option("index", rindex, "Index file")->required()->check(CLI::ExistingFile);
  report->add_option("--k", rk, "Context length (default: the one stored)")->check(CLI::Range(0, 3));

  BenchArgs bea;
  auto* benchc = app.add_subcommand("bench", "Latency, throughput, extraction and rank-scaling report");
  benchc->add_option("index", bea.index, "Index to run on (default: the synthetic input)")->check(CLI::ExistingFile);
  benchc->add_option("--synthetic", bea.synthetic, "english|markov|uniform[:n=N,sigma=S,seed=X]")->capture_default_str();
  benchc->add_option("--ops", bea.ops, "Operations in the mixed run")->capture_default_str();
  benchc->add_option("--mix", bea.mix, "Operation weights")->capture_default_str();
  benchc->add_option("--runs", bea.runs, "Runs per timed comparison (median reported)")->check(CLI::Range(1, 99))->capture_default_str();
  benchc->add_option("--extract-len", bea.extract_len, "Length for extract vs access")->capture_default_str();
  benchc->add_option("--scaling-max-lg", bea.scaling_max_lg, "Largest n of the scaling table, as log2")->check(CLI::Range(16, 26))->capture_default_str();
  benchc->add_option("--scaling-ops", bea.scaling_ops, "Operations per scaling run")->capture_default_str();
  benchc->add_flag("--no-scaling", bea.no_scaling, "Skip the scaling table");
  benchc->add_option("--seed", bea.seed, "Random seed")->capture_default_str();

  FuzzArgs fa;
  auto* fuzzc = app.add_subcommand("fuzz", "Random operations against a plain-array oracle");
  fuzzc->add_option("--seed", fa.seed, "Random seed")->capture_default_str();
  fuzzc->add_option("--ops", fa.ops, "Operations")->capture_default_str();
  fuzzc->add_option("--sigma", fa.sigma, "Alphabet size")->check(CLI::Range(1u, 1u << 24))->capture_default_str();
  fuzzc->add_option("--r", fa.r, "Sampling rate r (0 = automatic)")->capture_default_str();
  fuzzc->add_option("--budget", fa.budget, "Maintenance steps per update (0 = paced)")->capture_default_str();
  fuzzc->add_option("--repro", fa.repro, "Where to write a reproduction script");
  fuzzc->add_option("--inject-fault", fa.fault, "Plant a rank bug once n reaches this size (harness check)")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*build) return cmd_build(ba);
    if (*query) return cmd_query(qa);
    if (*extract) return cmd_extract(xindex, xpos, xlen, xp->count() == 0);
    if (*report) return cmd_report(rindex, rk);
    if (*benchc) return cmd_bench(bea);
    if (*fuzzc) return cmd_fuzz(fa);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
