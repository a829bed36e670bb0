"""Command-line entry point: construct, verify, identity-check, gapvec, search, falsify, replay.

Exit codes: 0 success, 1 mathematical failure, 2 usage, 3 I/O or parse error.
Each run emits one JSON manifest, written to --manifest when given and to
standard error otherwise.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from pathlib import Path
from typing import Callable

from . import __version__
from . import scoeffs
from .gapvec import (
    GapVectorRefusal,
    SpanState,
    check_gap_vector,
    gap_vector_bruteforce,
    gap_vector_constructive,
)
from .geometry import GeometryError, build_arc, denniston_arc, verify_maximal_arc
from .gf2m import FieldSpec, field_pair, find_modulus
from .io import FormatError, read_arc, read_json, read_pqmap, write_arc, write_json, write_jsonl
from .pqmaps import PqMap, TraceConditionError, check_trace_condition, closed_set_from_pq, flip_constant_trace
from .search import SearchConfig, SearchRangeError, falsify_theorem_p1, falsify_theorem_pq, search_p1, search_pq
from .subspaces import DualRep, rank as f2_rank, span, subgroup_from_mus

EXIT_OK, EXIT_MATH, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Run:
    """Collects what a command did, for the manifest and --json output."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.args = args
        self.argv = argv
        self.field: FieldSpec | None = None
        self.outcome: dict = {}
        self.outputs: list[str] = []
        self.json_mode = args.json

    def say(self, text: str) -> None:
        if not self.json_mode:
            print(text)

    def output(self, path: str | Path) -> None:
        self.outputs.append(str(path))


def _hex_list(s: str) -> list[int]:
    try:
        return [int(h, 16) for h in s.split(",") if h.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated hex values: {s!r}") from exc


def _hex(s: str) -> int:
    try:
        return int(s, 16)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a hex value: {s!r}") from exc


def _int_range(s: str) -> tuple[int, int]:
    try:
        lo, _, hi = s.partition(":")
        lo_i = int(lo)
        hi_i = int(hi) if hi else lo_i
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {s!r}") from exc
    if lo_i > hi_i:
        raise argparse.ArgumentTypeError(f"empty range {s!r}")
    return lo_i, hi_i


def _field(args) -> FieldSpec:
    try:
        if getattr(args, "modulus", None) is not None:
            return FieldSpec(args.m, args.modulus)
        return find_modulus(args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# construct / verify
# ---------------------------------------------------------------------------

def cmd_construct(run: Run) -> int:
    args = run.args
    if args.kind == "mathon":
        pq = read_pqmap(args.map)
        run.field = pq.field
        try:
            cs = closed_set_from_pq(pq)
        except TraceConditionError as exc:
            run.outcome = {"error": "trace condition fails", "witness": f"{exc.witness:x}"}
            print(f"invalid map: trace condition fails at lambda={exc.witness:x}", file=sys.stderr)
            return EXIT_MATH
        arc = build_arc(cs, pq.field)
    else:
        f = _field(args)
        run.field = f
        if args.subgroup is not None:
            A = span(f, args.subgroup)
        elif args.d is not None:
            if not 0 <= args.d <= f.m:
                raise UsageError(f"--d must be in [0, {f.m}]")
            A = span(f, [1 << i for i in range(args.d)])
        else:
            raise UsageError("construct denniston needs --subgroup or --d")
        a, h = args.a, args.h
        b = args.b
        if b is None:
            # smallest b making a x^2 + h x y + b y^2 irreducible
            b = next(
                (v for v in range(1, f.q) if h and a and f.trace(f.div(f.mul(a, v), f.sq(h)))),
                None,
            )
            if b is None:
                raise UsageError("no b gives an irreducible form for these a, h")
        try:
            arc = denniston_arc(a, h, b, A, f)
        except GeometryError as exc:
            raise UsageError(str(exc)) from exc
    write_arc(arc, args.out)
    run.output(args.out)
    run.outcome = {"points": len(arc), "degree": arc.degree_claim}
    run.say(f"wrote {args.out}: {len(arc)} points, degree {arc.degree_claim}")
    return EXIT_OK


def cmd_verify(run: Run) -> int:
    arc = read_arc(run.args.arc)
    run.field = arc.field
    try:
        rep = verify_maximal_arc(arc)
    except GeometryError as exc:
        raise UsageError(str(exc)) from exc
    run.outcome = rep.to_json() | {"histogram_text": rep.histogram_text()}
    run.say(f"points: {rep.size}")
    run.say(f"histogram: {rep.histogram_text()}")
    run.say(f"is_max: {str(rep.is_max).lower()}  degree: {rep.degree}")
    if rep.is_max and rep.degree != arc.degree_claim:
        run.say(f"note: header claims n={arc.degree_claim}")
    return EXIT_OK if rep.is_max else EXIT_MATH


# ---------------------------------------------------------------------------
# identity-check
# ---------------------------------------------------------------------------

IDENTITIES = ("coeff-product", "delta", "squaring-shift", "moore-expansion", "cramer", "congruence")


def _random_mus(f: FieldSpec, r: int, rng: random.Random, dependent: bool) -> tuple[int, ...]:
    while True:
        mus = [rng.randrange(1, f.q) for _ in range(r)]
        if f2_rank(mus) == r:
            break
    if dependent and r >= 2:
        mus[-1] = mus[0] if r == 2 else mus[0] ^ mus[1]
    return tuple(mus)


def _rebase(f: FieldSpec, mus: tuple[int, ...], rng: random.Random) -> tuple[int, ...]:
    """Another basis of the same span: a random invertible F_2 combination."""
    r = len(mus)
    while True:
        rows = [rng.randrange(1, 1 << r) for _ in range(r)]
        if f2_rank(rows) == r:
            break
    out = []
    for row in rows:
        v = 0
        for j in range(r):
            if (row >> j) & 1:
                v ^= mus[j]
        out.append(v)
    return tuple(out)


def _check_identity(name: str, d: DualRep, rng: random.Random) -> tuple[str, str]:
    """(status, detail) for one identity on one instance."""
    f, r, m = d.field, d.r, d.field.m
    dependent = f2_rank(d.mus) != r
    if name == "coeff-product":
        if r < 2 or r > m - 1:
            return "SKIP", "needs 2 <= r <= m-1"
        if dependent:
            base = scoeffs.coeff_c(d, tuple(range(r - 1, -1, -1)))
            return "DEGENERATE", f"consecutive determinant = {base:x}"
        alt = DualRep(f, _rebase(f, d.mus, rng))
        method = "expansion" if r <= scoeffs.S_POLY_MAX_R and m <= scoeffs.S_POLY_MAX_M else "determinant"
        ok = scoeffs.coefficient_product_check(d, method) and scoeffs.coefficient_product_check(alt, method)
        return ("PASS" if ok else "FAIL"), "two mu-bases"
    if name == "delta":
        if m < r + 2:
            return "SKIP", "needs m >= r+2"
        val = scoeffs.delta(d)
        if dependent:
            return "DEGENERATE", f"delta = {val:x}"
        return ("PASS" if val else "FAIL"), f"delta = {val:x}"
    if name in ("squaring-shift", "moore-expansion", "congruence"):
        if r > scoeffs.S_POLY_MAX_R or m > scoeffs.S_POLY_MAX_M:
            return "SKIP", "S(x) expansion out of range"
        if name == "congruence" and m > 12:
            return "SKIP", "congruence limited to m <= 12"
        s = scoeffs.s_poly(d)
    if name == "squaring-shift":
        bad = 0
        for size in range(1, r + 1):
            for idx in scoeffs.index_sets(m, size):
                c = scoeffs.coeff_c(s, idx)
                if f.sq(c) != scoeffs.coeff_c(s, scoeffs.shift_index_set(idx, m)):
                    bad += 1
        return ("PASS" if not bad else "FAIL"), f"{bad} mismatches"
    if name == "moore-expansion":
        bad = zero = 0
        for idx in scoeffs.index_sets(m, r):
            det = scoeffs.moore_det(scoeffs.MooreMatrix(f, d.mus, idx))
            zero += det == 0
            bad += det != scoeffs.coeff_c(s, idx)
        if dependent:
            return "DEGENERATE", f"{zero} zero determinants, {bad} mismatches"
        return ("PASS" if not bad else "FAIL"), f"{bad} mismatches"
    if name == "cramer":
        if r < 2:
            return "SKIP", "needs r >= 2"
        if dependent:
            return "DEGENERATE", "Moore system singular"
        b1 = scoeffs.cramer_b1(d)
        c = scoeffs.coeff_c(d, tuple(range(r - 1, 0, -1)))
        lhs = scoeffs.coeff_c(d, tuple(range(r, 1, -1)) + (0,)) if r <= m - 1 else None
        base = scoeffs.coeff_c(d, tuple(range(r - 1, -1, -1)))
        ok = b1 == c and (lhs is None or lhs == f.mul(b1, base))
        return ("PASS" if ok else "FAIL"), f"b1 = {b1:x}"
    if name == "congruence":
        if dependent:
            return "DEGENERATE", "subgroup undefined"
        A = subgroup_from_mus(d)
        if A.dim < 2:
            return "SKIP", "needs dim A >= 2"
        # trace(a_1 lam) vanishes on A exactly when a_1 lies in the span of the mu's
        combo = rng.randrange(1 << r)
        a1 = 0
        for j in range(r):
            if (combo >> j) & 1:
                a1 ^= d.mus[j]
        a0 = rng.randrange(1, f.q)
        while not f.trace(a0):
            a0 = rng.randrange(1, f.q)
        pq = PqMap.p1(f, (a0, a1), A)
        ok = scoeffs.product_congruence_check(pq, d)
        ok = ok and scoeffs.product_congruence_check(flip_constant_trace(pq), d)
        bad_a1 = next(v for v in range(1, f.q) if v not in span(f, d.mus))
        neg = PqMap.p1(f, (a0, bad_a1), A)
        ok = ok and scoeffs.product_congruence_check(neg, d) == check_trace_condition(neg).ok
        return ("PASS" if ok else "FAIL"), "valid, shifted and invalid maps"
    raise ValueError(name)


def cmd_identity_check(run: Run) -> int:
    args = run.args
    (m_lo, m_hi), (r_lo, r_hi) = args.m_range, args.r_range
    if m_lo < 2 or m_hi > 24 or r_lo < 1:
        raise UsageError("need 2 <= m <= 24 and r >= 1")
    pairs = [(m, r) for m in range(m_lo, m_hi + 1) for r in range(r_lo, r_hi + 1) if r < m]
    if not pairs:
        raise UsageError("no (m, r) pair with r < m in the given ranges")
    names = args.only or list(IDENTITIES)
    rng = random.Random(args.seed)
    rows = []
    counts = {"PASS": 0, "FAIL": 0, "SKIP": 0, "DEGENERATE": 0}
    for sample in range(args.samples):
        m, r = rng.choice(pairs)
        f = field_pair(m)[sample % 2]
        dependent = args.allow_dependent and sample % 2 == 1
        d = DualRep(f, _random_mus(f, r, rng, dependent))
        for name in names:
            status, detail = _check_identity(name, d, rng)
            counts[status] += 1
            row = {
                "identity": name, "m": m, "r": r, "modulus": f"{f.modulus:x}",
                "sample": sample, "status": status, "detail": detail,
            }
            rows.append(row)
            run.say(f"{name:<15} m={m:<2} r={r} modulus={f.modulus:x} sample={sample:<4} {status}  {detail}")
    run.outcome = {"counts": counts, "rows": rows if run.json_mode else len(rows)}
    run.say("summary: " + " ".join(f"{k}={v}" for k, v in counts.items()))
    return EXIT_OK if counts["FAIL"] == 0 else EXIT_MATH


# ---------------------------------------------------------------------------
# gapvec
# ---------------------------------------------------------------------------

def cmd_gapvec(run: Run) -> int:
    args = run.args
    f = _field(args)
    run.field = f
    if args.mus:
        mus = tuple(args.mus)
    else:
        r = args.r if args.r is not None else (f.m - 3) // 2
        rng = random.Random(args.seed)
        mus = _random_mus(f, r, rng, False)
    if args.r is not None and args.r != len(mus):
        raise UsageError(f"--r={args.r} but {len(mus)} mu's given")
    try:
        st = SpanState(f, mus)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    t = args.t
    out: dict = {"m": f.m, "r": len(mus), "t": t, "mus": [f"{v:x}" for v in mus]}
    try:
        bf = gap_vector_bruteforce(st, t)
    except (ValueError, OverflowError) as exc:
        raise UsageError(str(exc)) from exc
    out["bruteforce"] = None if bf is None else str(bf)
    try:
        w = gap_vector_constructive(st, t)
    except GapVectorRefusal as exc:
        out |= {"constructive": None, "valid": False, "refused": str(exc)}
        run.outcome = out
        run.say(json.dumps(out, sort_keys=True))
        return EXIT_USAGE
    valid = check_gap_vector(st, t, w) and bf is not None
    out |= {"constructive": str(w), "branch": w.branch, "valid": valid}
    run.outcome = out
    run.say(json.dumps(out, sort_keys=True))
    return EXIT_OK if valid else EXIT_MATH


# ---------------------------------------------------------------------------
# search / falsify
# ---------------------------------------------------------------------------

def _stable(summary: dict) -> dict:
    """Summary fields that do not vary between reruns; wall time stays in the manifest."""
    return {k: v for k, v in summary.items() if k != "wall_time"}


def cmd_search(run: Run) -> int:
    args = run.args
    f = _field(args)
    run.field = f
    A = span(f, args.subgroup) if args.subgroup else None
    cfg = SearchConfig(
        m=f.m, d=args.d, mode=args.mode, strategy=args.strategy, trials=args.trials,
        seed=args.seed, domain=args.domain, linear_only=args.linear_only, subgroup=A,
        modulus=f.modulus, workers=args.workers, max_hits=args.max_hits,
    )
    try:
        res = search_p1(cfg) if args.mode == "p1" else search_pq(cfg)
    except SearchRangeError as exc:
        raise UsageError(str(exc)) from exc
    summary = res.summary()
    status = EXIT_OK
    if args.verify:
        bad = 0
        for pq in res.hits:
            rep = verify_maximal_arc(build_arc(closed_set_from_pq(pq), f))
            bad += not (rep.is_max and rep.degree == 1 << pq.d)
        summary["verified"] = len(res.hits) - bad
        summary["verify_failures"] = bad
        if bad:
            status = EXIT_MATH
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "hits.jsonl", "w") as fh:
            write_jsonl(
                (pq.to_json() | {"denniston_form": den} for pq, den in zip(res.hits, res.denniston)), fh
            )
        write_json(_stable(summary), out / "summary.json")
        run.output(out / "hits.jsonl")
        run.output(out / "summary.json")
    run.outcome = summary
    run.say(" ".join(f"{k}={v}" for k, v in summary.items()))
    return status


def cmd_falsify(run: Run) -> int:
    args = run.args
    f = _field(args)
    run.field = f
    fn = falsify_theorem_p1 if args.mode == "p1" else falsify_theorem_pq
    try:
        res = fn(f.m, args.d, args.trials, args.seed, method=args.method,
                 workers=args.workers, modulus=f.modulus)
    except SearchRangeError as exc:
        raise UsageError(str(exc)) from exc
    summary = res.summary()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(_stable(summary), out / "summary.json")
        run.output(out / "summary.json")
        if res.counterexample is not None:
            write_json(res.counterexample.to_json(), out / "counterexample.pqmap")
            run.output(out / "counterexample.pqmap")
    run.outcome = summary
    run.say(" ".join(f"{k}={v}" for k, v in summary.items()))
    return EXIT_OK if res.counterexample is None else EXIT_MATH


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def cmd_replay(run: Run) -> int:
    man = read_json(run.args.manifest)
    if not isinstance(man, dict) or "argv" not in man:
        raise FormatError("not a run manifest", None, run.args.manifest)
    argv = list(man["argv"])
    if "replay" in argv[:1]:
        raise UsageError("refusing to replay a replay")
    code = main(argv, emit_manifest=False)
    mismatched = [
        p for p, h in man.get("outputs", {}).items() if not Path(p).exists() or _sha256(p) != h
    ]
    run.outcome = {"replayed": argv, "exit_code": code, "mismatched_outputs": mismatched}
    run.say(f"replayed {' '.join(argv)}: exit {code}, {len(mismatched)} output mismatches")
    if code != man.get("exit_code", code):
        return EXIT_MATH
    return EXIT_OK if not mismatched else EXIT_MATH


# ---------------------------------------------------------------------------
# Parser and driver
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--manifest", help="write the run manifest here instead of stderr")

    ap = argparse.ArgumentParser(prog="maxarc", description="Maximal arcs in PG(2, 2^m).")
    ap.add_argument("--version", action="version", version=f"maxarc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def field_args(p, required=True):
        p.add_argument("--m", type=int, required=required, help="extension degree")
        p.add_argument("--modulus", type=_hex, help="irreducible modulus (hex); default smallest")

    p = sub.add_parser("construct", parents=[common], help="build an arc file")
    csub = p.add_subparsers(dest="kind", required=True)
    pd = csub.add_parser("denniston", parents=[common], help="{(x,y,1) : a x^2 + h x y + b y^2 in A}")
    field_args(pd)
    pd.add_argument("--d", type=int, help="use A = span(1, x, ..., x^(d-1))")
    pd.add_argument("--subgroup", type=_hex_list, help="basis of A (hex, comma-separated)")
    pd.add_argument("--a", type=_hex, default=1)
    pd.add_argument("--h", type=_hex, default=1)
    pd.add_argument("--b", type=_hex, help="default: smallest b with an irreducible form")
    pd.add_argument("--out", required=True)
    pm = csub.add_parser("mathon", parents=[common], help="arc of a {p,q}-map file")
    pm.add_argument("--map", required=True)
    pm.add_argument("--out", required=True)

    p = sub.add_parser("verify", parents=[common], help="line-intersection check of an arc file")
    p.add_argument("arc")

    p = sub.add_parser("identity-check", parents=[common], help="batch-check coefficient identities")
    p.add_argument("--m-range", type=_int_range, default=(5, 12))
    p.add_argument("--r-range", type=_int_range, default=(2, 5))
    p.add_argument("--samples", type=int, default=100, help="number of random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", action="append", choices=IDENTITIES)
    p.add_argument("--allow-dependent", action="store_true",
                   help="make every second instance use dependent mu's")

    p = sub.add_parser("gapvec", parents=[common], help="index vectors with short runs")
    field_args(p)
    p.add_argument("--r", type=int)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--mus", type=_hex_list)
    p.add_argument("--seed", type=int, default=0)

    for name, helptext in (("search", "search for {p,q}-maps"), ("falsify", "random counterexample hunt")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("mode", choices=("p1", "pq"))
        field_args(p)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--trials", type=int, default=10_000 if name == "search" else 100_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        if name == "search":
            p.add_argument("--strategy", choices=("exhaustive", "random"), default="exhaustive")
            p.add_argument("--domain", choices=("field", "binary"), default="field")
            p.add_argument("--subgroup", type=_hex_list)
            p.add_argument("--linear-only", action="store_true")
            p.add_argument("--max-hits", type=int)
            p.add_argument("--verify", action="store_true", help="build and verify every hit's arc")
        else:
            p.add_argument("--method", choices=("fiber", "plain"), default="fiber")

    p = sub.add_parser("replay", parents=[common], help="rerun a manifest and compare outputs")
    p.add_argument("manifest")
    return ap


COMMANDS: dict[str, Callable[[Run], int]] = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "identity-check": cmd_identity_check,
    "gapvec": cmd_gapvec,
    "search": cmd_search,
    "falsify": cmd_falsify,
    "replay": cmd_replay,
}


def main(argv: list[str] | None = None, emit_manifest: bool = True) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = Run(args, argv)
    t0 = time.perf_counter()
    try:
        code = COMMANDS[args.command](run)
    except UsageError as exc:
        print(f"maxarc: error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except FormatError as exc:
        print(f"maxarc: parse error: {exc}", file=sys.stderr)
        code = EXIT_IO
    except OSError as exc:
        print(f"maxarc: I/O error: {exc}", file=sys.stderr)
        code = EXIT_IO
    wall = time.perf_counter() - t0
    if run.json_mode:
        print(json.dumps(run.outcome, sort_keys=True))
    if emit_manifest:
        manifest = {
            "command": args.command,
            "argv": argv,
            "args": {k: v for k, v in vars(args).items() if _jsonable(v)},
            "seed": getattr(args, "seed", None),
            "field": run.field.to_json() if run.field else None,
            "version": __version__,
            "wall_time": round(wall, 3),
            "exit_code": code,
            "outcome": run.outcome,
            "outputs": {p: _sha256(p) for p in run.outputs if Path(p).exists()},
        }
        text = json.dumps(manifest, sort_keys=True)
        if args.manifest:
            try:
                Path(args.manifest).write_text(text + "\n")
            except OSError as exc:
                print(f"maxarc: I/O error: {exc}", file=sys.stderr)
                return EXIT_IO
        else:
            print(text, file=sys.stderr)
    return code


def _jsonable(v) -> bool:
    try:
        json.dumps(v)
        return True
    except TypeError:
        return False
