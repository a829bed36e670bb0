"""Exhaustive and randomized searches for {p,q}-maps, and falsification runs.

Randomness comes from numpy's SeedSequence: trial chunk ``c`` of a run with
seed ``s`` draws from ``default_rng(SeedSequence(s, spawn_key=(c,)))``.  The
chunk size is fixed, so results do not depend on the number of workers.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import product
from typing import Callable, Iterator, Sequence

import numpy as np

from .gf2m import FieldSpec, find_modulus
from .pqmaps import PqMap, check_trace_condition, is_denniston_form
from .subspaces import Subspace, enumerate_subspaces, rref

CHUNK = 1024
EXHAUSTIVE_COST_LIMIT = 10**10
SUBSPACE_ENUM_MAX_M = 6


class SearchRangeError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    m: int
    d: int
    mode: str = "p1"  # "p1" or "pq"
    strategy: str = "exhaustive"  # "exhaustive" or "random"
    trials: int = 0
    seed: int = 0
    domain: str = "field"  # coefficient values: "field" or "binary" ({0, 1})
    linear_only: bool = False  # only a_0, a_1 (and b_0, b_1) may be nonzero
    subgroup: Subspace | None = None  # fixed A instead of all / random subgroups
    modulus: int | None = None
    workers: int = 1
    max_hits: int | None = None

    def field(self) -> FieldSpec:
        if self.modulus is None:
            return find_modulus(self.m)
        return FieldSpec(self.m, self.modulus)


@dataclass
class SearchResult:
    hits: list[PqMap] = dc_field(default_factory=list)
    denniston: list[bool] = dc_field(default_factory=list)
    trials: int = 0
    subgroups: int = 0
    counterexample: PqMap | None = None
    wall_time: float = 0.0
    truncated: bool = False

    @property
    def non_denniston(self) -> list[PqMap]:
        return [h for h, den in zip(self.hits, self.denniston) if not den]

    def summary(self) -> dict:
        return {
            "trials": self.trials,
            "subgroups": self.subgroups,
            "hits": len(self.hits),
            "non_denniston_hits": len(self.non_denniston),
            "counterexamples": 0 if self.counterexample is None else 1,
            "truncated": self.truncated,
            "wall_time": round(self.wall_time, 3),
        }


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def gaussian_binomial(m: int, d: int) -> int:
    """Number of d-dimensional subspaces of F_2^m."""
    if not 0 <= d <= m:
        return 0
    num = den = 1
    for i in range(d):
        num *= (1 << (m - i)) - 1
        den *= (1 << (i + 1)) - 1
    return num // den


def _domain(f: FieldSpec, kind: str) -> range:
    if kind == "field":
        return range(f.q)
    if kind == "binary":
        return range(2)
    raise ValueError(f"unknown coefficient domain {kind!r}")


def exhaustive_cost(cfg: SearchConfig) -> int:
    f_q = 1 << cfg.m
    dom = f_q if cfg.domain == "field" else 2
    subs = 1 if cfg.subgroup is not None else gaussian_binomial(cfg.m, cfg.d)
    per_map = dom ** (cfg.d if cfg.mode == "p1" else 2 * cfg.d)
    return subs * per_map * (1 << cfg.d)


def _check_config(cfg: SearchConfig, mode: str) -> None:
    if cfg.mode != mode:
        raise SearchRangeError(f"config mode {cfg.mode!r} does not match {mode!r}")
    if not 1 <= cfg.d <= cfg.m:
        raise SearchRangeError(f"need 1 <= d <= m (m={cfg.m}, d={cfg.d})")
    if cfg.subgroup is not None and cfg.subgroup.dim != cfg.d:
        raise SearchRangeError("fixed subgroup has the wrong dimension")
    if cfg.strategy not in ("exhaustive", "random"):
        raise SearchRangeError(f"unknown strategy {cfg.strategy!r}")


def _subgroups(cfg: SearchConfig, f: FieldSpec) -> Iterator[Subspace]:
    if cfg.subgroup is not None:
        yield cfg.subgroup
        return
    if cfg.m > SUBSPACE_ENUM_MAX_M:
        raise SearchRangeError(
            f"exhaustive subgroup enumeration limited to m <= {SUBSPACE_ENUM_MAX_M}; fix a subgroup"
        )
    yield from enumerate_subspaces(f, cfg.d)


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def _run_chunks(fn: Callable, args: tuple, n_chunks: int, workers: int) -> list:
    if workers <= 1 or n_chunks <= 1:
        return [fn(*args, c) for c in range(n_chunks)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(fn, *args, c) for c in range(n_chunks)]
        return [fu.result() for fu in futs]


def _chunk_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _random_subgroup(f: FieldSpec, d: int, rng: np.random.Generator) -> Subspace:
    basis: list[int] = []
    while len(basis) < d:
        v = int(rng.integers(1, f.q))
        cand = rref(basis + [v])
        if len(cand) > len(basis):
            basis = cand
    return Subspace(f, tuple(basis))


class _Arith:
    """Plain-list log/exp tables for tight scalar loops."""

    def __init__(self, f: FieldSpec):
        self.log, self.exp = f._logexp
        self.mask = f.trace_mask
        self.m = f.m
        self.order = f.order
        # tr_vec[c] has bit j = trace(c x^j), so trace(c y) = parity(tr_vec[c] & y)
        self.tr_vec = [0] * f.q
        for c in range(1, f.q):
            w = 0
            for j in range(f.m):
                w |= ((f.mul(c, 1 << j) & self.mask).bit_count() & 1) << j
            self.tr_vec[c] = w

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        return self.exp[self.log[a] + self.log[b]]


@lru_cache(maxsize=16)
def _arith(f: FieldSpec) -> _Arith:
    return _Arith(f)


# ---------------------------------------------------------------------------
# {p,1}-map search
# ---------------------------------------------------------------------------

def _p1_exhaustive_subgroup(f: FieldSpec, A: Subspace, dom: Sequence[int], linear_only: bool):
    """All {p,1}-maps on A with coefficients in dom, via per-lambda trace bitmasks.

    trace(p(lam)) is additive in each a_i, so with
    mask_i(v) = {lam : trace(v lam^(2^i - 1)) = 1} a choice of a_1..a_{d-1}
    works iff the xor of its masks is 0 (then trace(a_0) = 1 is needed) or
    all ones (then trace(a_0) = 0).
    """
    ar = _arith(f)
    d = A.dim
    lams = A.nonzero_members()
    full = (1 << len(lams)) - 1
    masks: list[dict[int, int]] = []
    for i in range(1, d):
        e = (1 << i) - 1
        powers = [f.pow(lam, e) for lam in lams]
        col = {}
        for v in dom:
            w = 0
            for s, pw in enumerate(powers):
                w |= ((ar.mul(v, pw) & ar.mask).bit_count() & 1) << s
            col[v] = w
        masks.append(col)
    a0_by_trace = {0: [], 1: []}
    for v in dom:
        a0_by_trace[f.trace(v)].append(v)
    ranges = [
        (dom if (not linear_only or i == 1) else [0]) for i in range(1, d)
    ]
    for combo in product(*ranges):
        acc = 0
        for col, v in zip(masks, combo):
            acc ^= col[v]
        if acc == 0:
            a0s = a0_by_trace[1]
        elif acc == full:
            a0s = a0_by_trace[0]
        else:
            continue
        for a0 in a0s:
            yield PqMap.p1(f, (a0,) + combo, A)


def search_p1(cfg: SearchConfig) -> SearchResult:
    _check_config(cfg, "p1")
    f = cfg.field()
    dom = _domain(f, cfg.domain)
    res = SearchResult()
    t0 = time.perf_counter()
    if cfg.strategy == "exhaustive":
        cost = exhaustive_cost(cfg)
        if cost > EXHAUSTIVE_COST_LIMIT:
            raise SearchRangeError(f"exhaustive cost {cost:.3g} exceeds {EXHAUSTIVE_COST_LIMIT:.0e}")
        for A in _subgroups(cfg, f):
            res.subgroups += 1
            res.trials += len(dom) ** A.dim if not cfg.linear_only else len(dom) ** min(2, A.dim)
            for pq in _p1_exhaustive_subgroup(f, A, dom, cfg.linear_only):
                _add_hit(res, pq)
                if cfg.max_hits is not None and len(res.hits) >= cfg.max_hits:
                    res.truncated = True
                    res.wall_time = time.perf_counter() - t0
                    return res
    else:
        _random_search(cfg, f, res)
    res.wall_time = time.perf_counter() - t0
    return res


def _add_hit(res: SearchResult, pq: PqMap) -> None:
    res.hits.append(pq)
    res.denniston.append(is_denniston_form(pq))


def _random_chunk(cfg: SearchConfig, size: int, chunk: int) -> list[PqMap]:
    f = cfg.field()
    rng = chunk_rng(cfg.seed, chunk)
    dom_hi = f.q if cfg.domain == "field" else 2
    out = []
    d = cfg.d
    for _ in range(size):
        A = cfg.subgroup or _random_subgroup(f, d, rng)
        a = [int(v) for v in rng.integers(0, dom_hi, size=d)]
        if cfg.mode == "p1":
            b = [1] + [0] * (d - 1)
        else:
            b = [int(v) for v in rng.integers(0, dom_hi, size=d)]
        if cfg.linear_only:
            a[2:] = [0] * (d - 2) if d > 2 else []
            b[2:] = [0] * (d - 2) if d > 2 else []
        pq = PqMap(f, tuple(a), tuple(b), A)
        if check_trace_condition(pq).ok:
            out.append(pq)
    return out


def _random_search(cfg: SearchConfig, f: FieldSpec, res: SearchResult) -> None:
    sizes = _chunk_sizes(cfg.trials)
    chunks = _run_chunks(_random_chunk_sized, (cfg, sizes), len(sizes), cfg.workers)
    for hits in chunks:
        for pq in hits:
            _add_hit(res, pq)
    res.trials = cfg.trials
    res.subgroups = cfg.trials if cfg.subgroup is None else 1


def _random_chunk_sized(cfg: SearchConfig, sizes: list[int], chunk: int) -> list[PqMap]:
    return _random_chunk(cfg, sizes[chunk], chunk)


# ---------------------------------------------------------------------------
# {p,q}-map search
# ---------------------------------------------------------------------------

def search_pq(cfg: SearchConfig) -> SearchResult:
    _check_config(cfg, "pq")
    f = cfg.field()
    res = SearchResult()
    t0 = time.perf_counter()
    if cfg.strategy == "exhaustive":
        cost = exhaustive_cost(cfg)
        if cost > EXHAUSTIVE_COST_LIMIT:
            raise SearchRangeError(
                f"exhaustive cost {cost:.3g} exceeds {EXHAUSTIVE_COST_LIMIT:.0e}; use the random strategy"
            )
        dom = _domain(f, cfg.domain)
        d = cfg.d
        for A in _subgroups(cfg, f):
            res.subgroups += 1
            rng_ = [dom if (not cfg.linear_only or i < 2) else [0] for i in range(d)]
            for a in product(*rng_):
                for b in product(*rng_):
                    res.trials += 1
                    pq = PqMap(f, a, b, A)
                    if check_trace_condition(pq).ok:
                        _add_hit(res, pq)
    else:
        _random_search(cfg, f, res)
    res.wall_time = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# Falsification
# ---------------------------------------------------------------------------

def _check_falsify_range(m: int, d: int, mode: str) -> None:
    lo_m, slack = (5, 2) if mode == "p1" else (7, 4)
    if m < lo_m:
        raise SearchRangeError(f"m={m} below {lo_m}")
    if m == 9:
        raise SearchRangeError("m = 9 is excluded: non-linear maps exist there")
    # m > d > m/2 + slack/2, in integers: 2d > m + slack
    if not (m > d and 2 * d > m + slack):
        bound = "m/2 + 1" if mode == "p1" else "m/2 + 2"
        raise SearchRangeError(f"need m > d > {bound} (m={m}, d={d})")


def _fiber_trial(
    f: FieldSpec, ar: _Arith, A: Subspace, high_a: Sequence[int], b: Sequence[int]
) -> tuple[int, int] | None:
    """(a_0, a_1) completing the map to one passing the trace condition, if any.

    With everything else fixed, trace(p(lam) q(lam)) = 1 is an affine F_2
    condition on the 2m bits of (a_0, a_1):
        trace(a_0 q) + trace(a_1 lam q) = 1 + trace(g(lam) q),
    where g collects the a_i with i >= 2.  Rows are eliminated as they come,
    stopping at the first inconsistency.
    """
    m = f.m
    log, exp = ar.log, ar.exp
    tr_vec, tmask = ar.tr_vec, ar.mask
    piv: list[tuple[int, int, int]] = []  # (pivot bit, mask, rhs), decreasing pivot
    d_b = len(b)
    d_a = len(high_a) + 2
    q_one = d_b == 1 or (b[0] == 1 and not any(b[1:]))
    it = A.iter_members()
    next(it)
    for lam in it:
        ll = log[lam]
        # powers lam^(2^i - 1) via logs
        if q_one:
            qv = 1
        else:
            qv = b[0]
            for i in range(1, d_b):
                bi = b[i]
                if bi:
                    qv ^= exp[log[bi] + (ll * ((1 << i) - 1)) % ar.order]
        if not qv:
            return None  # trace(p q) = 0 at this lambda whatever a_0, a_1 are
        g = 0
        for i in range(2, d_a):
            ai = high_a[i - 2]
            if ai:
                g ^= exp[log[ai] + (ll * ((1 << i) - 1)) % ar.order]
        lq = exp[ll + log[qv]]
        rhs = 1 ^ (((exp[log[g] + log[qv]] if g else 0) & tmask).bit_count() & 1)
        mask = tr_vec[qv] | (tr_vec[lq] << m)
        for p, pm, pr in piv:
            if (mask >> p) & 1:
                mask ^= pm
                rhs ^= pr
        if mask:
            top = mask.bit_length() - 1
            piv.append((top, mask, rhs))
            piv.sort(reverse=True)
        elif rhs:
            return None
    # consistent: back-substitute with free bits set to 0
    x = 0
    for p, pm, pr in sorted(piv):
        val = pr ^ ((pm & x & ~(1 << p)).bit_count() & 1)
        if val:
            x |= 1 << p
    return x & ((1 << m) - 1), x >> m


def _falsify_chunk(
    m: int, modulus: int, d: int, mode: str, method: str, seed: int, sizes: list[int], chunk: int
) -> tuple[int, dict | None]:
    f = FieldSpec(m, modulus)
    ar = _arith(f)
    rng = chunk_rng(seed, chunk)
    n = sizes[chunk]
    for _ in range(n):
        A = _random_subgroup(f, d, rng)
        while True:
            high_a = [int(v) for v in rng.integers(0, f.q, size=d - 2)]
            if mode == "p1":
                b = [1] + [0] * (d - 1)
                if any(high_a):
                    break
            else:
                b = [int(v) for v in rng.integers(0, f.q, size=d)]
                if any(high_a) or any(b[2:]):
                    break
        if method == "fiber":
            sol = _fiber_trial(f, ar, A, high_a, b)
            if sol is None:
                continue
            a = (sol[0], sol[1], *high_a)
        else:
            a = (int(rng.integers(0, f.q)), int(rng.integers(0, f.q)), *high_a)
        pq = PqMap(f, a, tuple(b), A)
        if check_trace_condition(pq).ok and not is_denniston_form(pq):
            return n, pq.to_json()
    return n, None


@dataclass
class FalsifyResult:
    m: int
    d: int
    mode: str
    trials: int
    seed: int
    method: str
    counterexample: PqMap | None
    wall_time: float

    def summary(self) -> dict:
        return {
            "mode": self.mode,
            "m": self.m,
            "d": self.d,
            "trials": self.trials,
            "seed": self.seed,
            "method": self.method,
            "counterexamples": 0 if self.counterexample is None else 1,
            "wall_time": round(self.wall_time, 3),
        }


def _falsify(m: int, d: int, trials: int, seed: int, mode: str, method: str,
             workers: int, modulus: int | None) -> FalsifyResult:
    _check_falsify_range(m, d, mode)
    if method not in ("fiber", "plain"):
        raise ValueError(f"unknown method {method!r}")
    f = find_modulus(m) if modulus is None else FieldSpec(m, modulus)
    t0 = time.perf_counter()
    sizes = _chunk_sizes(trials)
    outs = _run_chunks(_falsify_chunk, (m, f.modulus, d, mode, method, seed, sizes), len(sizes), workers)
    cex = next((PqMap.from_json(o) for _, o in outs if o is not None), None)
    return FalsifyResult(m, d, mode, trials, seed, method, cex, time.perf_counter() - t0)


def falsify_theorem_p1(m: int, d: int, trials: int, seed: int, *, method: str = "fiber",
                       workers: int = 1, modulus: int | None = None) -> FalsifyResult:
    """Look for a {p,1}-map with some a_i != 0 (i >= 2) passing the trace condition.

    The "fiber" method samples A and a_2..a_{d-1} and then decides, by
    solving an F_2 linear system, whether any of the 2^(2m) choices of
    (a_0, a_1) completes a valid map.  "plain" samples every coefficient.
    """
    return _falsify(m, d, trials, seed, "p1", method, workers, modulus)


def falsify_theorem_pq(m: int, d: int, trials: int, seed: int, *, method: str = "fiber",
                       workers: int = 1, modulus: int | None = None) -> FalsifyResult:
    """As ``falsify_theorem_p1`` with q sampled too; nonlinearity may sit in p or q."""
    return _falsify(m, d, trials, seed, "pq", method, workers, modulus)
