#!/usr/bin/env python3
"""End-to-end checks of the dynseq command-line tool.

Query output is compared byte for byte with a reference interpreter written
here over a plain Python list.

usage: cli_check.py PATH_TO_DYNSEQ
"""

import os
import random
import re
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
TMP = tempfile.mkdtemp(prefix="dynseq_cli_")
failures = []


def run(*args, stdin=None):
    p = subprocess.run([BIN, *args], input=stdin, capture_output=True)
    return p.returncode, p.stdout, p.stderr


def check(name, cond, info=""):
    if not cond:
        failures.append(f"{name}: {info}")
        print(f"FAIL {name} {info}")
    else:
        print(f"ok   {name}")


def path(name):
    return os.path.join(TMP, name)


def write(name, data):
    with open(path(name), "wb") as f:
        f.write(data)
    return path(name)


# ---------------------------------------------------------------- reference


class Ref:
    def __init__(self, text, words=False, sigma=0):
        toks = text.split() if words else [bytes([c]) for c in text]
        self.names = sorted(set(toks))
        self.words = words
        self.sigma = sigma or max(1, len(self.names))
        self.ids = {t: k + 1 for k, t in enumerate(self.names)}
        self.seq = [self.ids[t] for t in toks]

    def show(self, a):
        if a > len(self.names):
            return b"#%d" % a
        t = self.names[a - 1]
        if self.words:
            return t
        c = t[0]
        if 0x21 <= c <= 0x7E and c != 0x5C:
            return t
        return b"\\x%02x" % c

    def parse(self, tok):
        if tok in self.ids:
            return self.ids[tok]
        if re.fullmatch(rb"#[0-9]{1,10}", tok):
            a = int(tok[1:])
            return a if 1 <= a <= self.sigma else None
        if not self.words and re.fullmatch(rb"\\x[0-9a-fA-F]{2}", tok):
            return self.ids.get(bytes([int(tok[2:], 16)]))
        return None

    def run(self, script, keep_going):
        out = []
        for lineno, line in enumerate(script.split(b"\n"), 1):
            f = line.rstrip(b"\r").split()
            if not f or f[0].startswith(b"#"):
                continue
            op = f[0]
            s = self.seq
            n = len(s)
            why = None
            a = None
            if op in (b"I", b"R", b"S"):
                a = self.parse(f[2] if op == b"I" else f[1])
                if a is None:
                    why = "unknown symbol"
            if why is None:
                if op == b"I":
                    i = int(f[1])
                    if 1 <= i <= n + 1:
                        s.insert(i - 1, a)
                    else:
                        why = "position out of range"
                elif op == b"D":
                    i = int(f[1])
                    if 1 <= i <= n:
                        del s[i - 1]
                    else:
                        why = "position out of range"
                elif op == b"R":
                    i = int(f[2])
                    if i <= n:
                        out.append(b"%d" % s[:i].count(a))
                    else:
                        why = "position out of range"
                elif op == b"S":
                    k = int(f[2])
                    pos = [p + 1 for p, x in enumerate(s) if x == a]
                    if 1 <= k <= len(pos):
                        out.append(b"%d" % pos[k - 1])
                    else:
                        why = "no such occurrence"
                elif op == b"A":
                    i = int(f[1])
                    if 1 <= i <= n:
                        out.append(self.show(s[i - 1]))
                    else:
                        why = "position out of range"
                elif op == b"X":
                    i, ln = int(f[1]), int(f[2])
                    if ln == 0:
                        out.append(b"")
                    elif i >= 1 and ln <= n and i <= n - ln + 1:
                        sep = b" " if self.words else b""
                        out.append(sep.join(self.show(x) for x in s[i - 1 : i - 1 + ln]))
                    else:
                        why = "position out of range"
            if why:
                out.append(b"error line %d: %s" % (lineno, why.encode()))
                if not keep_going:
                    break
        return b"".join(x + b"\n" for x in out)


def random_script(rng, ref, ops):
    n = len(ref.seq)
    lines = []

    def sym():
        if rng.random() < 0.03:
            return b"#999"
        return ref.show(rng.randrange(ref.sigma) + 1)

    for _ in range(ops):
        k = rng.randrange(6)
        pos = rng.randrange(n + 3)
        if k == 0:
            lines.append(b"I %d %s" % (pos, sym()))
            if 1 <= pos <= n + 1:
                n += 1
        elif k == 1:
            lines.append(b"D %d" % pos)
            if 1 <= pos <= n:
                n -= 1
        elif k == 2:
            lines.append(b"R %s %d" % (sym(), pos))
        elif k == 3:
            lines.append(b"S %s %d" % (sym(), rng.randrange(n // 3 + 3)))
        elif k == 4:
            lines.append(b"A %d" % pos)
        else:
            lines.append(b"X %d %d" % (pos, rng.randrange(30)))
        if rng.random() < 0.02:
            lines.append(b"# note")
    return b"\n".join(lines) + b"\n"


# ---------------------------------------------------------------- checks

rng = random.Random(5)

# Trivial cases.
write("x.txt", b"x")
code, out, _ = run("build", path("x.txt"))
check("build single symbol", code == 0 and b"n=1\n" in out, out)
check("query A 1", run("query", path("x.txt.dsq"), "-", stdin=b"A 1\n")[:2] == (0, b"x\n"))
check("empty script", run("query", path("x.txt.dsq"), "-", stdin=b"")[:2] == (0, b""))

write("empty.txt", b"")
code, out, _ = run("build", path("empty.txt"))
check("empty file builds", code == 0 and b"n=0\n" in out, out)
check("empty index extracts nothing", run("extract", path("empty.txt.dsq"))[:2] == (0, b""))

# DNA with --sigma 4 round-trips through extract.
dna = bytes(rng.choice(b"ACGT") for _ in range(50000))
write("dna.txt", dna)
code, out, _ = run("build", path("dna.txt"), "--sigma", "4", "--out", path("dna.dsq"))
check("dna build", code == 0 and b"sigma=4\n" in out, out)
check("dna round trip", run("extract", path("dna.dsq"))[1] == dna)
check("symbol overflow is a data error", run("build", path("dna.txt"), "--sigma", "3")[0] == 2)
check("unreadable input is a data error", run("build", path("missing.txt"))[0] == 2)
check("missing argument is a usage error", run("build")[0] == 1)
check("bad --sigma is a usage error", run("build", path("dna.txt"), "--sigma", "lots")[0] == 1)
check("unknown subcommand is a usage error", run("frobnicate")[0] == 1)

# Script errors.
code, out, err = run("query", path("dna.dsq"), "-", stdin=b"A 1\nA\n")
check("malformed line is a numbered parse error", code == 2 and out == b"" and b"line 2" in err, err)
code, out, _ = run("query", path("dna.dsq"), "-", stdin=b"A 0\nA 1\n")
check("failing op aborts without --keep-going", code == 2 and out == b"error line 1: position out of range\n", out)
code, out, _ = run("query", path("dna.dsq"), "-", "--keep-going", stdin=b"A 0\nA 1\n")
check("--keep-going continues", code == 0 and out == b"error line 1: position out of range\n" + dna[:1] + b"\n", out)

# Random scripts against the reference, bytes and words, with --save.
prose = b" ".join(rng.choice([b"alpha", b"beta", b"gamma", b"delta", b"x", b"y\tz", b"\\q", b"#3"]) for _ in range(3000))
samples = [
    ("bytes", bytes(rng.randrange(256) for _ in range(3000)), False, 0),
    ("text", prose, False, 0),
    ("padded", dna[:2000], False, 9),
    ("words", prose, True, 0),
]
for name, data, words, sigma in samples:
    src = write(name + ".txt", data)
    args = ["build", src, "--out", path(name + ".dsq")]
    if words:
        args += ["--tokenize", "words"]
    if sigma:
        args += ["--sigma", str(sigma)]
    code, out, err = run(*args)
    check(f"{name}: build", code == 0, err)
    ref = Ref(data, words, sigma)
    for round_ in range(3):
        script = random_script(rng, ref, 600)
        want = ref.run(script, keep_going=True)
        code, out, err = run("query", path(name + ".dsq"), "-", "--keep-going", "--save", stdin=script)
        check(f"{name}: script {round_} matches reference", code == 0 and out == want,
              f"exit {code}, first difference at byte "
              f"{next((k for k in range(min(len(out), len(want))) if out[k] != want[k]), min(len(out), len(want)))}")
    # Edits persisted through --save: a whole-sequence extract agrees.
    n = len(ref.seq)
    if n:
        _, out, _ = run("query", path(name + ".dsq"), "-", stdin=b"X 1 %d\n" % n)
        check(f"{name}: saved edits persist", out == ref.run(b"X 1 %d\n" % n, True))

# Determinism of the report.
a = run("build", path("dna.txt"), "--out", path("d1.dsq"))[1]
b = run("build", path("dna.txt"), "--out", path("d1.dsq"))[1]
check("build report is deterministic", a == b)

# bench
code, out, _ = run("bench", "--ops", "0")
check("bench with zero ops is empty", code == 0 and out == b"ops=0\n", out)
code, out, _ = run("bench", "--synthetic", "markov:n=20000,sigma=16", "--ops", "2000", "--scaling-max-lg", "18",
                   "--scaling-ops", "2000", "--extract-len", "1000", "--runs", "1")
rows = [int(m) for m in re.findall(rb"^scaling\.(\d+)\.rank_ns=", out, re.M)]
check("bench report", code == 0 and b"throughput_ops_per_s=" in out and b"op.R.p99_ns=" in out
      and b"extract.speedup=" in out, out[:400])
check("scaling rows increase in n", len(rows) == 2 and rows == sorted(rows) and rows[0] < rows[1], rows)
check("bad mix is a usage error", run("bench", "--mix", "Q=1")[0] == 1)
code, out, _ = run("bench", path("dna.dsq"), "--ops", "500", "--no-scaling", "--extract-len", "100", "--runs", "1")
check("bench on an index", code == 0 and b"n_start=50000" in out, out[:300])

# fuzz
code, out, _ = run("fuzz", "--seed", "3", "--ops", "3000", "--sigma", "7", "--r", "3")
check("fuzz fixed seed passes", code == 0 and b"result=pass" in out, out)
check("fuzz with zero ops passes", run("fuzz", "--ops", "0")[0] == 0)
repro = path("repro.txt")
code, out, _ = run("fuzz", "--seed", "4", "--ops", "3000", "--sigma", "5", "--inject-fault", "4", "--repro", repro)
check("injected fault diverges", code == 3 and b"result=diverged" in out, out)
ops = [l for l in open(repro, "rb").read().split(b"\n") if l and not l.startswith(b"#")] if os.path.exists(repro) else []
check("repro is short and replayable", 0 < len(ops) <= 8, ops)
# The repro replays on an empty index with the same alphabet size.
write("none.txt", b"")
run("build", path("none.txt"), "--sigma", "5", "--out", path("none.dsq"))
code, out, _ = run("query", path("none.dsq"), repro, "--keep-going")
ref = Ref(b"", False, 5)
check("repro replays through query", code == 0 and out == ref.run(open(repro, "rb").read(), True), out)

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
