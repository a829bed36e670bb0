"""Index sets with nonzero Moore-type determinant and short runs of consecutive indices.

Given independent mu_1..mu_r in GF(2^m) write v_i = (mu_1^(2^i), ..., mu_r^(2^i)),
indices read modulo m.  A binary vector w selects {v_i : w_i = 1}; Lambda(w)
is their GF(2^m)-span.  We look for w whose selected vectors span
V = GF(2^m)^r, with no more than t - 1 consecutive ones and short length.

Two procedures are provided: an exhaustive lexicographic search, and a
constructive procedure that walks a fixed case tree built from the nested
spans Lambda(a * u^(k+i)) (see ``gap_vector_constructive``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Sequence

from . import linalg
from .gf2m import FieldSpec
from .subspaces import rank as f2_rank

log = logging.getLogger(__name__)

BRUTEFORCE_CAP = 5_000_000


class GapVectorError(AssertionError):
    """A step of the constructive procedure produced an invalid vector."""


class GapVectorRefusal(ValueError):
    """Parameters outside the range where a vector is guaranteed."""


@dataclass(frozen=True)
class GapVector:
    bits: tuple[int, ...]
    branch: str = dc_field(default="", compare=False)

    @classmethod
    def from_indices(cls, idx: Sequence[int], branch: str = "") -> "GapVector":
        n = max(idx) + 1 if idx else 0
        bits = [0] * n
        for i in idx:
            bits[i] = 1
        return cls(tuple(bits), branch)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.bits) if b)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def consecutive_run_max(w: GapVector | Sequence[int]) -> int:
    bits = w.bits if isinstance(w, GapVector) else w
    best = cur = 0
    for b in bits:
        cur = cur + 1 if b else 0
        best = max(best, cur)
    return best


class SpanState:
    """The vectors v_i for fixed mu's, with rank queries over GF(2^m)."""

    def __init__(self, field: FieldSpec, mus: Sequence[int]):
        self.field = field
        self.mus = tuple(mus)
        if f2_rank(self.mus) != len(self.mus):
            raise ValueError("mu's are linearly dependent over F_2")

    @property
    def r(self) -> int:
        return len(self.mus)

    @property
    def m(self) -> int:
        return self.field.m

    @cached_property
    def _vectors(self) -> list[list[int]]:
        f = self.field
        return [[f.frob(mu, i) for mu in self.mus] for i in range(f.m)]

    def v(self, i: int) -> list[int]:
        return self._vectors[i % self.m]

    def rank(self, indices: Sequence[int]) -> int:
        if not self.r:
            return 0
        return linalg.rank(self.field, [self.v(i) for i in indices])

    def in_span(self, j: int, indices: Sequence[int]) -> bool:
        return self.rank(list(indices) + [j]) == self.rank(indices)

    def coordinates(self, j: int, indices: Sequence[int]) -> list[int]:
        """c with v_j = sum c_s v_{indices[s]}, the selected vectors being independent."""
        f = self.field
        cols = [self.v(i) for i in indices]
        n = len(indices)
        # least-squares free: pick n independent rows of the r x n system
        rows = [[cols[s][row] for s in range(n)] for row in range(self.r)]
        rhs = [self.v(j)[row] for row in range(self.r)]
        chosen: list[int] = []
        for row in range(self.r):
            if linalg.rank(f, [rows[c] for c in chosen] + [rows[row]]) > len(chosen):
                chosen.append(row)
            if len(chosen) == n:
                break
        if len(chosen) != n:
            raise GapVectorError("selected vectors are not independent")
        c = linalg.solve(f, [rows[i] for i in chosen], [rhs[i] for i in chosen])
        for row in range(self.r):
            acc = 0
            for s in range(n):
                acc ^= f.mul(rows[row][s], c[s])
            if acc != rhs[row]:
                raise GapVectorError(f"v_{j} is not in the given span")
        return c

    def det(self, indices: Sequence[int]) -> int:
        return linalg.det(self.field, [self.v(i) for i in indices])


def lambda_dim(st: SpanState, w: GapVector | Sequence[int]) -> int:
    bits = w.bits if isinstance(w, GapVector) else tuple(w)
    return st.rank([i for i, b in enumerate(bits) if b])


# ---------------------------------------------------------------------------
# Exhaustive search
# ---------------------------------------------------------------------------

def _check_params(st: SpanState, t: int) -> None:
    if t < 3:
        raise ValueError("run bound t must be at least 3")
    if t > st.r:
        raise ValueError(f"run bound t={t} exceeds r={st.r}")


def _runs_ok(idx: Sequence[int], t: int) -> bool:
    run = 1
    for x, y in zip(idx, idx[1:]):
        run = run + 1 if y == x + 1 else 1
        if run > t - 1:
            return False
    return True


def gap_vector_bruteforce(st: SpanState, t: int, cap: int = BRUTEFORCE_CAP) -> GapVector | None:
    """Lexicographically smallest 0 = i_1 < ... < i_r <= m - t - 3 with short runs and det != 0."""
    _check_params(st, t)
    r, m = st.r, st.m
    top = m - t - 3
    if top < r - 1:
        return None
    n_cand = comb(top, r - 1)
    if n_cand > cap:
        raise OverflowError(f"{n_cand} candidate index sets exceed the cap {cap}")
    for rest in combinations(range(1, top + 1), r - 1):
        idx = (0,) + rest
        if _runs_ok(idx, t) and st.det(idx):
            return GapVector.from_indices(idx, "bruteforce")
    return None


# ---------------------------------------------------------------------------
# Constructive procedure
# ---------------------------------------------------------------------------

def _ones(n: int) -> tuple[int, ...]:
    return (1,) * n


def _u(t: int) -> tuple[int, ...]:
    return (0,) + _ones(t - 1)


def _ubar(t: int) -> tuple[int, ...]:
    return (1,) + (0,) * (t - 1)


def _strip(bits: Sequence[int]) -> tuple[int, ...]:
    """Drop leading and trailing zeros; a shift leaves the span's dimension unchanged."""
    idx = [i for i, b in enumerate(bits) if b]
    if not idx:
        return ()
    return tuple(bits[idx[0]: idx[-1] + 1])


def nested_sequence_probe(st: SpanState, t: int, k: int, a: int, steps: int | None = None) -> list[int]:
    """dim Lambda(a * u^(k+i)) for i = 0..steps (default k)."""
    steps = k if steps is None else steps
    base = _ones(a)
    out = []
    for i in range(steps + 1):
        out.append(lambda_dim(st, base + _u(t) * (k + i)))
    return out


def _select_r(st: SpanState, bits: Sequence[int]) -> tuple[int, ...]:
    """Greedy choice of r selected positions with independent vectors, shifted to start at 0."""
    chosen: list[int] = []
    for i, b in enumerate(bits):
        if b and st.rank(chosen + [i]) > len(chosen):
            chosen.append(i)
            if len(chosen) == st.r:
                break
    if len(chosen) != st.r:
        raise GapVectorError("vector does not span V")
    return tuple(i - chosen[0] for i in chosen)


def _validate(st: SpanState, t: int, idx: Sequence[int], branch: str) -> GapVector:
    w = GapVector.from_indices(idx, branch)
    m = st.m
    problems = []
    if idx[0] != 0:
        problems.append("first index is not 0")
    if len(w) > m - (t + 2):
        problems.append(f"length {len(w)} > {m - t - 2}")
    if len(idx) != st.r or st.det(idx) == 0:
        problems.append("selected vectors do not form a basis")
    if consecutive_run_max(w) > t - 1:
        problems.append(f"run of {consecutive_run_max(w)} ones")
    if problems:
        raise GapVectorError(f"branch {branch}: " + "; ".join(problems) + f" (w={w})")
    return w


def _full_rank_vector(st: SpanState, t: int) -> tuple[tuple[int, ...], str]:
    """The case tree for r = floor((m - 3) / 2); returns (raw vector, branch tag)."""
    r = st.r
    k, a = divmod(r, t)
    av = _ones(a)
    u, ub = _u(t), _ubar(t)

    def lam(bits):
        return lambda_dim(st, bits)

    dims = nested_sequence_probe(st, t, k, a)
    reach = next((i for i, dim in enumerate(dims) if dim == r), None)

    if reach is not None:
        b = reach
        if b < k:
            return av + u * (k + b), "B:b<k"
        # every step adds exactly one dimension; j marks the first new vector
        base = [i for i, bit in enumerate(av + u * k) if bit]
        j = next(j for j in range(1, t) if not st.in_span(r + j, base))
        if j <= a:
            return av + u * (2 * k - 1) + (0,) * j + (1,), "B:b=k,j<=a"
        head = (0,) * j + _ones(t + a - j)
        return head + u * (2 * k - 2) + (0,) + _ones(j), "B:b=k,j>a"

    # the spans stop growing before reaching V
    b = max((i for i in range(1, len(dims)) if dims[i] > dims[i - 1]), default=0)
    if dims[b] > r - k + b:
        return av + u * (k + b) + (0,) * t + ub * (k - b - 1), "A:dim>r-k+b"
    if b > 0:
        prev = [i for i, bit in enumerate(av + u * (k + b - 1)) if bit]
        i = next(i for i in range(1, t) if not st.in_span(r + (b - 1) * t + i, prev))
        ui = tuple(1 if s == i else 0 for s in range(t))
        return av + u * (k + b - 1) + ui + ub * (k - b), "A:b>0"
    if 1 <= a <= t - 2:
        mid = (0,) + _ones(t - 2) + (0,)
        return (1,) + av + u * (k - 1) + mid + ub * (k - 1) + (1,), "A:b=0,a>=1"
    if a == 0 and t in (3, 4):
        basis = [i for i, bit in enumerate(u * k) if bit]
        c = st.coordinates(r + 1, basis)
        coef = dict(zip(basis, c))
        h = max((i for i in range(k) if coef.get(1 + t * i)), default=None)
        if h is None:
            raise GapVectorError("v_{r+1} has no component on v_{1+ti}")
        if h != k - 1:
            if t == 3:
                tail = (0, 0, 1) + ub * (k - h - 1) + (1, 1, 0) + ub * h
            else:
                tail = (0, 0, 1, 1) + ub * (k - h - 1) + (1, 1, 0, 0) + ub * h
            return u * (k - 1) + tail, "A:b=0,a=0,h<k-1"
        if t == 3:
            tail = (0, 1, 0) + (1, 0, 1) + ub * (k - 1)
        else:
            tail = (0, 1, 0, 1) + (1, 0, 1, 0) + ub * (k - 1)
        return u * (k - 1) + tail, "A:b=0,a=0,h=k-1"
    raise GapVectorError(f"no branch applies (t={t}, k={k}, a={a}, dims={dims})")


def _extend_mus(f: FieldSpec, mus: Sequence[int], R: int) -> tuple[int, ...]:
    out = list(mus)
    cand = 1
    while len(out) < R:
        if f2_rank(out + [cand]) > len(out):
            out.append(cand)
        cand += 1
    return tuple(out)


def gap_vector_constructive(st: SpanState, t: int) -> GapVector:
    """Vector built by the nested-span case analysis, reduced to exactly r indices.

    Requires m >= 10 and 3 <= t <= r <= floor((m - 3) / 2).  For smaller r
    the mu's are extended to R = floor((m - 3) / 2) independent elements,
    the full construction is run there, and r positions whose truncated
    vectors stay independent are kept.
    """
    m, r = st.m, st.r
    if m < 10:
        raise GapVectorRefusal(
            f"m={m}: a vector is only guaranteed for m >= 10 (m = 9 admits configurations without one)"
        )
    R = (m - 3) // 2
    _check_params(st, t)
    if r > R:
        raise GapVectorRefusal(f"r={r} exceeds floor((m-3)/2)={R}")
    full = st if r == R else SpanState(st.field, _extend_mus(st.field, st.mus, R))
    raw, branch = _full_rank_vector(full, t)
    raw = _strip(raw)
    if lambda_dim(full, raw) != R:
        raise GapVectorError(f"branch {branch}: raw vector {raw} does not span V")
    if len(raw) > m - (t + 2) or consecutive_run_max(raw) > t - 1:
        raise GapVectorError(f"branch {branch}: raw vector {raw} violates length or run bound")
    if r < R:
        branch += ",projected"
    idx = _select_r(st, raw)
    log.debug("gap vector m=%d r=%d t=%d branch=%s raw=%s", m, r, t, branch, raw)
    return _validate(st, t, idx, branch)


def check_gap_vector(st: SpanState, t: int, w: GapVector) -> bool:
    """The three conditions: starts at 0 with max index <= m - t - 3, basis, short runs."""
    idx = w.indices
    return (
        bool(idx)
        and idx[0] == 0
        and idx[-1] <= st.m - t - 3
        and len(idx) == st.r
        and st.det(idx) != 0
        and consecutive_run_max(w) <= t - 1
    )
