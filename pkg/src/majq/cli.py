"""Command line entry point: ``majq <subcommand> ...``.

Exit codes: 0 success, 1 a verification or Monte Carlo check failed,
2 usage error, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from majq import exact, mc, stats
from majq.qnum import Permutation, maj, prob_mass, q_factorial
from majq.sampler import geometric_words, make_rng, map_blocks
from majq.walks import permuton_segments, walk_family

DEFAULT_SEED = 20240601
SEED_ENV = "MAJQ_SEED"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    n: int | None = None
    q: Fraction | float | None = None
    q_text: str | None = None
    count: int | None = None
    seed: int = DEFAULT_SEED
    fmt: str | None = None
    output: str | None = None
    threads: int = 1
    extra: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


def parse_q(text: str, exact_only: bool = False) -> Fraction:
    """Parse ``"p/r"`` or a decimal string into an exact positive Fraction."""
    text = text.strip()
    if exact_only and "." in text:
        raise argparse.ArgumentTypeError(f"exact commands need q as p/r, got {text!r}")
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"malformed q {text!r}") from None
    if q <= 0:
        raise argparse.ArgumentTypeError(f"q must be positive, got {text!r}")
    return q


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    return int(env) if env else DEFAULT_SEED


def _qs(text: str) -> list[Fraction]:
    return [parse_q(t, exact_only=True) for t in text.split(",") if t.strip()]


SCHEMAS = {
    "sample": "json: one array per line (perm or word) or {\"word\": [...], \"perm\": [...]} "
              "for --emit both; csv: header p1..pn / g1..gn / g1..gn,p1..pn, or i,pi for "
              "--emit points; txt: space-separated values, word and perm joined by ' | '.",
    "stats": "csv with header 'sample,...': lambda_1..lambda_m (zero padded), "
             "c_1..c_m cycle counts, count (pattern), lis, or maj.",
    "walks": "csv: walk,y,x rows tracing each walk (x = walk value, y = word index); "
             "json: {n, q, seed, word, walks: [{level, points: [[x, y], ...]}]}.",
    "permuton": "csv: x0,y0,x1,y1 per limit segment; json: list of {start, end}.",
    "verify": "text table 'suite n q result'; exits 1 if any row fails.",
    "mc": "json: {test, params, estimate, target, tolerance, pass}; exits 1 if pass is false.",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majq", description="Major-index permutation sampler and checks.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, fmt_choices, count_flag=None):
        p.add_argument("--seed", type=_seed, default=None,
                       help=f"RNG seed (default ${SEED_ENV} or {DEFAULT_SEED})")
        if fmt_choices:
            p.add_argument("--format", dest="fmt", choices=fmt_choices, default=fmt_choices[0])
        p.add_argument("--output", "-o", default=None, help="output file (default stdout)")
        p.add_argument("--threads", type=_positive_int, default=1)

    p = sub.add_parser("sample", help="draw permutations", description=SCHEMAS["sample"])
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--q", type=parse_q, required=True)
    p.add_argument("--count", type=_positive_int, default=1)
    p.add_argument("--emit", choices=["perm", "word", "both", "points"], default="perm")
    common(p, ["json", "csv", "txt"])

    p = sub.add_parser("stats", help="statistics of sampled permutations", description=SCHEMAS["stats"])
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--q", type=parse_q, required=True)
    p.add_argument("--count", type=_positive_int, default=1)
    p.add_argument("--emit", required=True, help="lambda, cycles, lis, maj or pattern:SIGMA")
    common(p, ["csv"])

    p = sub.add_parser("walks", help="lattice walks of one sampled word", description=SCHEMAS["walks"])
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--q", type=parse_q, required=True)
    common(p, ["json", "csv"])

    p = sub.add_parser("permuton", help="limit-shape segments", description=SCHEMAS["permuton"])
    p.add_argument("--q", type=parse_q, required=True)
    p.add_argument("--count", type=_positive_int, default=8)
    common(p, ["csv", "json"])

    p = sub.add_parser("verify", help="exact identity suites", description=SCHEMAS["verify"])
    p.add_argument("--suite", choices=["massfn", "fp", "shuffle", "patterns", "cycles", "all"],
                   default="all")
    p.add_argument("--qs", type=_qs, default=_qs("1/3,1/2,2/3"))
    p.add_argument("--nmax", type=_positive_int, default=7)
    common(p, None)

    p = sub.add_parser("mc", help="seeded Monte Carlo checks", description=SCHEMAS["mc"])
    p.add_argument("--test", required=True,
                   help="gof, c1, c2, lambda, pattern:SIGMA or normality:SIGMA")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--q", type=parse_q, required=True)
    p.add_argument("--samples", type=_positive_int, required=True)
    common(p, ["json"])
    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse argv into a RunConfig; argparse exits with status 2 on bad input."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    seed = ns.seed if ns.seed is not None else _default_seed()
    cfg = RunConfig(ns.subcommand, seed=seed, output=ns.output, threads=ns.threads,
                    fmt=getattr(ns, "fmt", None))
    cfg.n = getattr(ns, "n", None)
    if getattr(ns, "q", None) is not None:
        cfg.q = ns.q
    cfg.count = getattr(ns, "count", None) or getattr(ns, "samples", None)
    for key in ("emit", "suite", "qs", "nmax", "test"):
        if hasattr(ns, key):
            cfg.extra[key] = getattr(ns, key)
    if cfg.subcommand == "stats":
        emit = cfg.extra["emit"]
        if emit not in ("lambda", "cycles", "lis", "maj") and not emit.startswith("pattern:"):
            parser.error(f"unknown --emit {emit!r}")
        if emit.startswith("pattern:"):
            try:
                Permutation.parse(emit.split(":", 1)[1])
            except ValueError as e:
                parser.error(str(e))
    if cfg.subcommand == "mc":
        test = cfg.extra["test"]
        head, _, sigma = test.partition(":")
        if head not in ("gof", "c1", "c2", "lambda", "pattern", "normality") or \
                (head in ("pattern", "normality")) != bool(sigma):
            parser.error(f"unknown --test {test!r}")
        if sigma:
            try:
                Permutation.parse(sigma)
            except ValueError as e:
                parser.error(str(e))
    if cfg.subcommand == "permuton" and not cfg.q < 1:
        parser.error("permuton needs 0 < q < 1")
    return cfg


# -- subcommand bodies -------------------------------------------------------------

def _rows(v) -> list[int]:
    return [int(x) for x in v]


def _run_sample(cfg: RunConfig, out) -> int:
    n, q, emit, fmt = cfg.n, float(cfg.q), cfg.extra["emit"], cfg.fmt
    blocks = map_blocks(lambda p, w: (p, w), n, q, cfg.count, cfg.seed, cfg.threads)
    writer = csv.writer(out, lineterminator="\n") if fmt == "csv" else None
    if writer:
        if emit == "points":
            writer.writerow(["i", "pi"])
        else:
            head = []
            if emit in ("word", "both"):
                head += [f"g{i}" for i in range(1, n + 1)]
            if emit in ("perm", "both"):
                head += [f"p{i}" for i in range(1, n + 1)]
            writer.writerow(head)
    for perms, words in blocks:
        if words is None and emit in ("word", "both"):
            raise UsageError("q = 1 samples have no geometric word")
        for r in range(perms.shape[0]):
            perm = _rows(perms[r])
            word = _rows(words[r]) if words is not None else None
            if emit == "points":
                if writer:
                    writer.writerows([i, v] for i, v in enumerate(perm, start=1))
                elif fmt == "json":
                    out.write(json.dumps([[i, v] for i, v in enumerate(perm, start=1)]) + "\n")
                else:
                    out.write(" ".join(f"{i},{v}" for i, v in enumerate(perm, start=1)) + "\n")
                continue
            if writer:
                row = (word if emit in ("word", "both") else []) + (perm if emit in ("perm", "both") else [])
                writer.writerow(row)
            elif fmt == "json":
                rec = {"word": word, "perm": perm} if emit == "both" else (word if emit == "word" else perm)
                out.write(json.dumps(rec) + "\n")
            else:
                parts = {"perm": [perm], "word": [word], "both": [word, perm]}[emit]
                out.write(" | ".join(" ".join(map(str, x)) for x in parts) + "\n")
    return EXIT_OK


def _run_stats(cfg: RunConfig, out) -> int:
    emit = cfg.extra["emit"]
    perms = np.concatenate(map_blocks(lambda p, w: p, cfg.n, float(cfg.q), cfg.count,
                                      cfg.seed, cfg.threads))
    rows = [list(map(int, r)) for r in perms]
    writer = csv.writer(out, lineterminator="\n")
    if emit in ("lambda", "cycles"):
        if emit == "lambda":
            data = [stats.rsk_shape(r) for r in rows]
            width = max(len(d) for d in data)
            writer.writerow(["sample"] + [f"lambda_{i}" for i in range(1, width + 1)])
        else:
            counts = [stats.cycle_counts(r) for r in rows]
            width = max(max(c) for c in counts)
            data = [[c.get(k, 0) for k in range(1, width + 1)] for c in counts]
            writer.writerow(["sample"] + [f"c_{k}" for k in range(1, width + 1)])
        for s, d in enumerate(data):
            writer.writerow([s] + list(d) + [0] * (width - len(d)))
        return EXIT_OK
    if emit.startswith("pattern:"):
        sigma = Permutation.parse(emit.split(":", 1)[1])
        fn, head = (lambda r: stats.count_pattern(r, sigma)), "count"
    else:
        fn, head = {"lis": stats.lis, "maj": maj}[emit], emit
    writer.writerow(["sample", head])
    for s, r in enumerate(rows):
        writer.writerow([s, fn(r)])
    return EXIT_OK


def _run_walks(cfg: RunConfig, out) -> int:
    q = float(cfg.q)
    if not 0 < q < 1:
        raise UsageError("walks need 0 < q < 1")
    word = geometric_words(cfg.n, q, 1, make_rng(cfg.seed))[0]
    fam = walk_family(word)
    if cfg.fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["walk", "y", "x"])
        for i in range(fam.truncation):
            for y, x in enumerate(fam.walks[i]):
                writer.writerow([i, y, int(x)])
    else:
        doc = {"n": cfg.n, "q": q, "seed": cfg.seed, "word": _rows(word),
               "walks": [{"level": i, "points": [[int(x), y] for y, x in enumerate(fam.walks[i])]}
                         for i in range(fam.truncation)]}
        out.write(json.dumps(doc) + "\n")
    return EXIT_OK


def _run_permuton(cfg: RunConfig, out) -> int:
    segs = permuton_segments(float(cfg.q), cfg.count)
    if cfg.fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["x0", "y0", "x1", "y1"])
        for s in segs:
            writer.writerow([repr(s.start[0]), repr(s.start[1]), repr(s.end[0]), repr(s.end[1])])
    else:
        out.write(json.dumps([{"start": list(s.start), "end": list(s.end)} for s in segs]) + "\n")
    return EXIT_OK


def _verify_rows(suite: str, qs: list[Fraction], nmax: int):
    """Yield ``(suite, n, q, ok)`` rows for the exact suites."""
    if suite in ("massfn", "all"):
        for n in range(1, nmax + 1):
            dist = exact.enumerate_maj(n)
            yield "massfn", n, "poly", dist.total_weight() == q_factorial(n)
            for q in qs:
                yield "massfn", n, q, sum(prob_mass(p, q) for p in dist.perms) == 1
    if suite in ("fp", "all"):
        report = exact.verify_fp_recurrence(min(nmax, 8))
        for n, ok in report.passed.items():
            yield "fp", n, "poly", ok
    if suite in ("shuffle", "all"):
        for total in range(1, min(nmax, 6) + 1):
            ok = all(exact.verify_shuffle_identity(a, b).ok for a, b in exact.all_shuffle_pairs(total))
            yield "shuffle", total, "poly", ok
        rng = random.Random(0)
        for total in range(7, min(nmax, 8) + 1):
            ok = all(exact.verify_shuffle_identity(*exact.random_shuffle_pair(total, rng)).ok
                     for _ in range(100))
            yield "shuffle", total, "poly", ok
    if suite in ("patterns", "all"):
        for n in range(2, nmax + 1):
            for q in qs:
                yield "patterns", n, q, exact.verify_pattern_law(n, q).ok
    if suite in ("cycles", "all"):
        for n in range(1, nmax + 1):
            c1 = exact.generating_polynomial(n, lambda p: stats.count_k_cycles(p, 1))
            c2 = exact.generating_polynomial(n, lambda p: stats.count_k_cycles(p, 2))
            for q in qs:
                norm = q_factorial(n)(q)
                ok = (Fraction(c1(q)) / norm == exact.closed_form_e_c1(n, q)
                      and Fraction(c2(q)) / norm == exact.closed_form_e_c2(n, q))
                yield "cycles", n, q, ok


def _run_verify(cfg: RunConfig, out) -> int:
    nmax = cfg.extra["nmax"]
    if nmax > exact.MAX_ENUM_N:
        raise UsageError(f"--nmax must be <= {exact.MAX_ENUM_N}")
    failed = False
    out.write(f"{'suite':<10} {'n':>3} {'q':>6}  result\n")
    for suite, n, q, ok in _verify_rows(cfg.extra["suite"], cfg.extra["qs"], nmax):
        failed |= not ok
        out.write(f"{suite:<10} {n:>3} {str(q):>6}  {'pass' if ok else 'FAIL'}\n")
    return EXIT_FAIL if failed else EXIT_OK


def _run_mc(cfg: RunConfig, out) -> int:
    test = cfg.extra["test"]
    head, _, sigma_text = test.partition(":")
    n, qf, N, seed = cfg.n, float(cfg.q), cfg.count, cfg.seed
    params = {"n": n, "q": str(cfg.q), "samples": N, "seed": seed}
    if head == "gof":
        r = mc.gof_chi_square(n, qf, N, seed, threads=cfg.threads)
        doc = {"estimate": r.chi_square, "target": {"df": r.df, "percentile": r.percentile},
               "tolerance": r.threshold, "pass": r.passed}
    elif head in ("c1", "c2", "pattern"):
        if head == "pattern":
            sigma = Permutation.parse(sigma_text)
            r = mc.estimate("pattern:" + " ".join(map(str, sigma)), n, qf, N, seed, cfg.threads)
            target = stats.expected_pattern_count(n, sigma, cfg.q)
        else:
            r = mc.estimate(head, n, qf, N, seed, cfg.threads)
            target = (exact.closed_form_e_c1 if head == "c1" else exact.closed_form_e_c2)(n, cfg.q)
        tol = mc.TOLERANCE_SIGMAS * r.se
        doc = {"estimate": {"mean": r.mean, "variance": r.variance, "se": r.se},
               "target": float(target), "tolerance": tol, "pass": abs(r.mean - float(target)) <= tol}
    elif head == "lambda":
        r = mc.clt_lambda_check(2, n, qf, N, seed, cfg.threads)
        doc = {"estimate": {c.name: c.estimate for c in r.checks},
               "target": {c.name: c.target for c in r.checks},
               "tolerance": {c.name: c.tolerance for c in r.checks}, "pass": r.passed}
    else:
        sigma = Permutation.parse(sigma_text)
        x = mc.pattern_samples(sigma, n, qf, N, seed, cfg.threads)
        r = mc.normality_diagnostic(x)
        doc = {"estimate": {"skewness": r.skewness, "excess_kurtosis": r.excess_kurtosis,
                            "scaled_variance": r.variance / n ** (2 * len(sigma) - 1)},
               "target": {"skewness": 0.0, "excess_kurtosis": 0.0},
               "tolerance": {"skewness": r.max_abs_skew, "excess_kurtosis": r.max_abs_kurtosis},
               "pass": r.passed}
    doc = {"test": test, "params": params, **doc}
    out.write(json.dumps(doc) + "\n")
    return EXIT_OK if doc["pass"] else EXIT_FAIL


RUNNERS = {
    "sample": _run_sample, "stats": _run_stats, "walks": _run_walks,
    "permuton": _run_permuton, "verify": _run_verify, "mc": _run_mc,
}


def run(cfg: RunConfig) -> int:
    try:
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
                return RUNNERS[cfg.subcommand](cfg, fh)
        return RUNNERS[cfg.subcommand](cfg, sys.stdout)
    except UsageError as e:
        print(f"majq: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"majq: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"majq: I/O error: {e}", file=sys.stderr)
        return EXIT_IO


def main(argv: Sequence[str] | None = None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
