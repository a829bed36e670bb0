"""Coefficient calculus for the indicator polynomial of a subgroup.

For a subgroup A = {x : trace(mu_i x) = 0, i = 1..r} the polynomial

    S(x) = prod_i (1 + trace(mu_i x))   mod x^(2^m) - x

evaluates to 1 on A and 0 elsewhere.  ``c(i_1, ..., i_s)`` denotes the
coefficient of x^(2^i_1 + ... + 2^i_s) in S.  This module expands S
sparsely, reads its coefficients, computes Moore determinants and checks
the identities relating them, and builds the trace polynomial T(x) of a
{p,q}-map whose product with S vanishes exactly when the map satisfies the
trace condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

from . import linalg
from .gf2m import FieldSpec
from .subspaces import DualRep, rank as f2_rank

S_POLY_MAX_R = 6
S_POLY_MAX_M = 14


def reduce_exponent(e: int, m: int) -> int:
    """Canonical exponent modulo x^(2^m) = x: 0 stays 0, others land in [1, 2^m - 1]."""
    if e < 0:
        raise ValueError("negative exponent")
    if e == 0:
        return 0
    n = (1 << m) - 1
    return (e - 1) % n + 1


def rotate_exponent(e: int, m: int, k: int = 1) -> int:
    """Exponent of x^e raised to the 2^k-th power, reduced."""
    return reduce_exponent(e << (k % m), m)


# ---------------------------------------------------------------------------
# Reduced polynomials
# ---------------------------------------------------------------------------

class ReducedPoly:
    """Sparse polynomial of degree <= 2^m - 1 over GF(2^m)."""

    __slots__ = ("field", "_terms")

    def __init__(self, field: FieldSpec, terms: Mapping[int, int] | None = None):
        self.field = field
        clean: dict[int, int] = {}
        for e, c in (terms or {}).items():
            if c:
                e = reduce_exponent(e, field.m)
                v = clean.get(e, 0) ^ c
                if v:
                    clean[e] = v
                else:
                    clean.pop(e, None)
        self._terms = clean

    @classmethod
    def _raw(cls, field: FieldSpec, terms: dict[int, int]) -> "ReducedPoly":
        obj = cls.__new__(cls)
        obj.field = field
        obj._terms = terms
        return obj

    @property
    def terms(self) -> Mapping[int, int]:
        return MappingProxyType(self._terms)

    def coeff(self, e: int) -> int:
        return self._terms.get(e, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReducedPoly):
            return NotImplemented
        return self.field == other.field and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.field, frozenset(self._terms.items())))

    def __add__(self, other: "ReducedPoly") -> "ReducedPoly":
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) ^ c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return ReducedPoly._raw(self.field, out)

    def __mul__(self, other: "ReducedPoly") -> "ReducedPoly":
        f = self.field
        n = f.order
        top = f.q
        mul = f.mul
        out: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                if e >= top:
                    e -= n
                v = out.get(e, 0) ^ mul(c1, c2)
                if v:
                    out[e] = v
                else:
                    del out[e]
        return ReducedPoly._raw(f, out)

    def frobenius(self, k: int = 1) -> "ReducedPoly":
        """P(x)^(2^k)."""
        f = self.field
        return ReducedPoly._raw(
            f,
            {rotate_exponent(e, f.m, k): f.frob(c, k) for e, c in self._terms.items()},
        )

    def evaluate(self, x: int) -> int:
        f = self.field
        if x == 0:
            return self._terms.get(0, 0)
        acc = 0
        for e, c in self._terms.items():
            acc ^= f.mul(c, f.pow(x, e))
        return acc

    def to_json(self) -> list[dict]:
        return [{"exponent": e, "coeff": f"{c:x}"} for e, c in sorted(self._terms.items())]

    def __repr__(self) -> str:
        return f"ReducedPoly(m={self.field.m}, terms={len(self._terms)})"


def constant(field: FieldSpec, c: int) -> ReducedPoly:
    return ReducedPoly(field, {0: c})


def trace_of(poly: ReducedPoly) -> ReducedPoly:
    """The polynomial sum_s P(x)^(2^s) for s < m."""
    out = ReducedPoly(poly.field)
    cur = poly
    for _ in range(poly.field.m):
        out = out + cur
        cur = cur.frobenius(1)
    return out


def trace_linear(field: FieldSpec, mu: int) -> ReducedPoly:
    """trace(mu x) = sum_j mu^(2^j) x^(2^j)."""
    return ReducedPoly(field, {1 << j: field.frob(mu, j) for j in range(field.m)})


def delta_at_zero(field: FieldSpec) -> ReducedPoly:
    """x^(2^m - 1) - 1, the indicator of {0}."""
    return ReducedPoly(field, {0: 1, field.order: 1})


# ---------------------------------------------------------------------------
# S(x) and its coefficients
# ---------------------------------------------------------------------------

def s_poly(d: DualRep) -> ReducedPoly:
    f = d.field
    if d.r > S_POLY_MAX_R or f.m > S_POLY_MAX_M:
        raise ValueError(
            f"S(x) expansion limited to r <= {S_POLY_MAX_R}, m <= {S_POLY_MAX_M} "
            f"(got r={d.r}, m={f.m})"
        )
    out = constant(f, 1)
    for mu in d.mus:
        out = out * (constant(f, 1) + trace_linear(f, mu))
    return out


def index_exponent(idx: Sequence[int], m: int) -> int:
    """Exponent 2^i_1 + ... + 2^i_s of a strictly decreasing index set."""
    check_index_set(idx, m)
    return sum(1 << i for i in idx)


def check_index_set(idx: Sequence[int], m: int) -> None:
    if not idx:
        raise ValueError("index set must be non-empty")
    if any(not 0 <= i < m for i in idx):
        raise ValueError(f"indices must lie in [0, {m - 1}]: {tuple(idx)}")
    if any(a <= b for a, b in zip(idx, idx[1:])):
        raise ValueError(f"indices must be strictly decreasing: {tuple(idx)}")


def index_sets(m: int, size: int) -> Iterator[tuple[int, ...]]:
    for combo in combinations(range(m - 1, -1, -1), size):
        yield combo


def shift_index_set(idx: Sequence[int], m: int) -> tuple[int, ...]:
    """Index set whose coefficient is the square of c(idx)."""
    if idx[0] < m - 1:
        return tuple(i + 1 for i in idx)
    return tuple(i + 1 for i in idx[1:]) + (0,)


@dataclass(frozen=True)
class MooreMatrix:
    """Rows are v_i = (mu_1^(2^i), ..., mu_r^(2^i)) for i in ``shifts``."""

    field: FieldSpec
    mus: tuple[int, ...]
    shifts: tuple[int, ...]

    def rows(self) -> list[list[int]]:
        f = self.field
        return [[f.frob(mu, i) for mu in self.mus] for i in self.shifts]


def moore_det(mm: MooreMatrix) -> int:
    if len(mm.shifts) != len(mm.mus):
        raise ValueError("Moore matrix must be square")
    return linalg.det(mm.field, mm.rows())


def coeff_c(s: ReducedPoly | DualRep, idx: Sequence[int]) -> int:
    """c(i_1, ..., i_s).

    From a DualRep the coefficient is read without expanding S when possible:
    zero beyond r indices, a Moore determinant at exactly r indices.
    """
    idx = tuple(idx)
    m = s.field.m
    e = index_exponent(idx, m)
    if isinstance(s, ReducedPoly):
        return s.coeff(e)
    if len(idx) > s.r:
        return 0
    if len(idx) == s.r:
        return moore_det(MooreMatrix(s.field, s.mus, idx))
    return s_poly(s).coeff(e)


def _require_independent(d: DualRep) -> None:
    if f2_rank(d.mus) != d.r:
        raise ValueError("mu's are linearly dependent over F_2")


def coefficient_product_check(d: DualRep, method: str = "expansion") -> bool:
    """c(r, r-1, ..., 2, 0) == c(r-1, ..., 1, 0) * c(r-1, ..., 2, 1)."""
    r, m = d.r, d.field.m
    if r < 2:
        raise ValueError("identity needs r >= 2")
    if r >= m:
        raise ValueError("identity needs r <= m - 1 so that index r exists")
    lhs_idx = tuple(range(r, 1, -1)) + (0,)
    base_idx = tuple(range(r - 1, -1, -1))
    mid_idx = tuple(range(r - 1, 0, -1))
    if method == "expansion":
        src: ReducedPoly | DualRep = s_poly(d)
    elif method == "determinant":
        src = d
    else:
        raise ValueError(f"unknown method {method!r}")
    f = d.field
    return coeff_c(src, lhs_idx) == f.mul(coeff_c(src, base_idx), coeff_c(src, mid_idx))


def moore_system_solution(d: DualRep) -> list[int]:
    """b with sum_j mu_t^(2^j) b_j = mu_t^(2^r) for every t."""
    _require_independent(d)
    f, r = d.field, d.r
    mat = [[f.frob(mu, j) for j in range(r)] for mu in d.mus]
    rhs = [f.frob(mu, r) for mu in d.mus]
    try:
        return linalg.solve(f, mat, rhs)
    except linalg.SingularMatrixError as exc:  # independent mu's never land here
        raise AssertionError("Moore system singular for independent mu's") from exc


def cramer_b1(d: DualRep) -> int:
    if d.r < 2:
        raise ValueError("b_1 needs r >= 2")
    return moore_system_solution(d)[1]


def _c_det(d: DualRep, idx: list[int]) -> int:
    if len(idx) > d.r:
        return 0
    return moore_det(MooreMatrix(d.field, d.mus, tuple(idx)))


def delta(d: DualRep) -> int:
    """c(m-1..m-r+1, m-r-1) c(m-2..m-r, 0) + c(m-2..m-r+1, m-r-1, 0) c(m-1..m-r)."""
    r, m = d.r, d.field.m
    if r < 1 or m < r + 2:
        raise ValueError(f"need r >= 1 and m >= r + 2 (m={m}, r={r})")
    f = d.field
    c1 = _c_det(d, list(range(m - 1, m - r, -1)) + [m - r - 1])
    c2 = _c_det(d, list(range(m - 2, m - r - 1, -1)) + [0])
    c3 = _c_det(d, list(range(m - 2, m - r, -1)) + [m - r - 1, 0])
    c4 = _c_det(d, list(range(m - 1, m - r - 1, -1)))
    return f.mul(c1, c2) ^ f.mul(c3, c4)


# ---------------------------------------------------------------------------
# T(x) and the product congruences
# ---------------------------------------------------------------------------

def pq_product_poly(field: FieldSpec, a: Sequence[int], b: Sequence[int]) -> ReducedPoly:
    """p(x) q(x) for p = sum a_i x^(2^i - 1), q = sum b_i x^(2^i - 1)."""
    terms: dict[int, int] = {}
    m = field.m
    for j, aj in enumerate(a):
        if not aj:
            continue
        for k, bk in enumerate(b):
            if not bk:
                continue
            e = reduce_exponent((1 << j) - 1 + (1 << k) - 1, m)
            v = terms.get(e, 0) ^ field.mul(aj, bk)
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
    return ReducedPoly._raw(field, terms)


def t_poly(pq) -> ReducedPoly:
    """T(x) = trace(p(x) q(x) + a_0 b_0) as a reduced polynomial."""
    f = pq.field
    a0 = pq.a[0] if pq.a else 0
    b0 = pq.b[0] if pq.b else 0
    inner = pq_product_poly(f, pq.a, pq.b) + constant(f, f.mul(a0, b0))
    return trace_of(inner)


def product_congruence(pq, d: DualRep) -> tuple[str, ReducedPoly, ReducedPoly]:
    """(variant, product, expected) for the congruence selected by trace(a_0 b_0).

    trace(a_0 b_0) = 1: T(x) S(x) must vanish.
    trace(a_0 b_0) = 0: (1 + T(x)) S(x) must equal x^(2^m-1) - 1.
    """
    f = pq.field
    a0 = pq.a[0] if pq.a else 0
    b0 = pq.b[0] if pq.b else 0
    t = t_poly(pq)
    s = s_poly(d)
    if f.trace(f.mul(a0, b0)):
        return "vanishing", t * s, ReducedPoly(f)
    return "delta", (constant(f, 1) + t) * s, delta_at_zero(f)


def product_congruence_check(pq, d: DualRep) -> bool:
    _, prod, expected = product_congruence(pq, d)
    return prod == expected


# ---------------------------------------------------------------------------
# Digit weights
# ---------------------------------------------------------------------------

def digit_weight(a: int, m: int) -> int:
    """Number of binary ones of a reduced into [1, 2^m - 1]."""
    n = (1 << m) - 1
    if a % n == 0:
        raise ValueError(f"{a} is divisible by 2^{m} - 1")
    return bin(reduce_exponent(a, m)).count("1")


def carry_count(a: int, b: int, m: int) -> int:
    """Carries in the cyclic addition a + b: w(a) + w(b) - w(a + b)."""
    return digit_weight(a, m) + digit_weight(b, m) - digit_weight(a + b, m)
