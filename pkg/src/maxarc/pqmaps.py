"""{p,q}-maps over an additive subgroup A, and linearized polynomials modulo A.

A map is given by p(x) = sum a_i x^(2^i - 1) and q(x) = sum b_i x^(2^i - 1).
When trace(p(lam) q(lam)) = 1 for every nonzero lam in A, the conics
F(p(lam), q(lam), lam) form a closed set.  Since lam p(lam) is a linearized
polynomial, coefficient vectors are only meaningful modulo the subspace
polynomial of A; ``PqMap.reduced`` picks the representative with d
coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from . import linalg
from .geometry import Conic, is_closed
from .gf2m import FieldSpec
from .subspaces import DualRep, Subspace, rref, span

MAX_SUBSPACE_POLY_DIM = 16


class TraceConditionError(ValueError):
    def __init__(self, witness: int):
        super().__init__(f"trace(p(lam) q(lam)) != 1 at lam = {witness:x}")
        self.witness = witness


# ---------------------------------------------------------------------------
# Linearized polynomials
# ---------------------------------------------------------------------------

def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and not c[-1]:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class LinearizedPoly:
    """sum_i coeffs[i] x^(2^i); trailing zero coefficients are dropped."""

    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def length(self) -> int:
        return len(self.coeffs)

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if i < len(self.coeffs) else 0

    def __call__(self, x: int) -> int:
        f = self.field
        acc = 0
        xp = x
        for c in self.coeffs:
            if c:
                acc ^= f.mul(c, xp)
            xp = f.mul(xp, xp)
        return acc

    def __add__(self, other: "LinearizedPoly") -> "LinearizedPoly":
        n = max(self.length, other.length)
        return LinearizedPoly(self.field, tuple(self.coeff(i) ^ other.coeff(i) for i in range(n)))

    def scale(self, c: int) -> "LinearizedPoly":
        return LinearizedPoly(self.field, tuple(self.field.mul(c, v) for v in self.coeffs))

    def frobenius(self, s: int) -> "LinearizedPoly":
        """L(x)^(2^s), still linearized: coefficients squared and shifted."""
        f = self.field
        return LinearizedPoly(f, (0,) * s + tuple(f.frob(c, s) for c in self.coeffs))

    def folded(self) -> "LinearizedPoly":
        """Same function on GF(2^m) with at most m coefficients (x^(2^m) = x)."""
        m = self.field.m
        if self.length <= m:
            return self
        out = [0] * m
        for i, c in enumerate(self.coeffs):
            out[i % m] ^= c
        return LinearizedPoly(self.field, tuple(out))


def subspace_polynomial(A: Subspace) -> LinearizedPoly:
    """prod_{a in A} (x - a), built one basis vector at a time."""
    if A.dim > MAX_SUBSPACE_POLY_DIM:
        raise ValueError(f"subspace polynomial limited to dim <= {MAX_SUBSPACE_POLY_DIM}")
    f = A.field
    poly = [1]
    for b in A.basis:
        # P'(x) = P(x) (P(x) + P(b)) = P(x)^2 + P(b) P(x)
        pb = LinearizedPoly(f, tuple(poly))(b)
        sq = [0] + [f.sq(c) for c in poly]
        poly = [sq[i] ^ (f.mul(pb, poly[i]) if i < len(poly) else 0) for i in range(len(sq))]
    return LinearizedPoly(f, tuple(poly))


def reduce_mod_subspace(L: LinearizedPoly, A: Subspace) -> LinearizedPoly:
    """Remainder of L on division by the subspace polynomial of A.

    The result has coefficients only for x^(2^i), i < dim A, and agrees with
    L on every member of A.
    """
    f = A.field
    d = A.dim
    P = subspace_polynomial(A)
    rem = list(L.folded().coeffs)
    for k in range(len(rem) - 1, d - 1, -1):
        c = rem[k]
        if not c:
            continue
        # c * P(x)^(2^(k-d)) has leading term c x^(2^k) and vanishes on A
        s = k - d
        for j, pj in enumerate(P.coeffs):
            if pj:
                rem[j + s] ^= f.mul(c, f.frob(pj, s))
        assert rem[k] == 0
    return LinearizedPoly(f, tuple(rem[:d]))


# ---------------------------------------------------------------------------
# {p,q}-maps
# ---------------------------------------------------------------------------

def eval_coeffs(f: FieldSpec, coeffs: Sequence[int], lam: int) -> int:
    """sum_i c_i lam^(2^i - 1)."""
    if not coeffs:
        return 0
    if lam == 0:
        return coeffs[0]
    acc = 0
    power = 1  # lam^(2^i - 1)
    for c in coeffs:
        if c:
            acc ^= f.mul(c, power)
        # lam^(2^(i+1) - 1) = (lam^(2^i - 1))^2 * lam
        power = f.mul(f.sq(power), lam)
    return acc


@dataclass(frozen=True)
class PqMap:
    """Coefficients of p and q together with the subgroup A they act on.

    The lists may be longer than d = dim A; ``reduced`` returns the
    d-coefficient representative taking the same values on A.
    """

    field: FieldSpec
    a: tuple[int, ...]
    b: tuple[int, ...]
    subgroup: Subspace

    def __post_init__(self) -> None:
        if self.subgroup.field != self.field:
            raise ValueError("subgroup lives in a different field")
        if self.subgroup.dim < 1:
            raise ValueError("subgroup must be non-trivial")
        if not self.a or not self.b:
            raise ValueError("coefficient lists must be non-empty")
        for v in self.a + self.b:
            self.field.check(v)
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))

    @classmethod
    def p1(cls, field: FieldSpec, a: Sequence[int], subgroup: Subspace) -> "PqMap":
        """A map with q = 1."""
        b = (1,) + (0,) * (max(len(a), subgroup.dim) - 1)
        return cls(field, tuple(a), b, subgroup)

    @property
    def d(self) -> int:
        return self.subgroup.dim

    def p(self, lam: int) -> int:
        return eval_coeffs(self.field, self.a, lam)

    def q(self, lam: int) -> int:
        return eval_coeffs(self.field, self.b, lam)

    def linearized_p(self) -> LinearizedPoly:
        return LinearizedPoly(self.field, self.a)

    def linearized_q(self) -> LinearizedPoly:
        return LinearizedPoly(self.field, self.b)

    def is_q_one(self) -> bool:
        return self.b[0] == 1 and not any(self.b[1:])

    def reduced(self) -> "PqMap":
        A = self.subgroup
        d = A.dim

        def red(coeffs):
            c = reduce_mod_subspace(LinearizedPoly(self.field, coeffs), A).coeffs
            return tuple(c) + (0,) * (d - len(c))

        return PqMap(self.field, red(self.a), red(self.b), A)

    def same_function(self, other: "PqMap") -> bool:
        """Equal p and q values on every nonzero member of A."""
        if self.subgroup != other.subgroup:
            return False
        return all(
            self.p(x) == other.p(x) and self.q(x) == other.q(x)
            for x in self.subgroup.nonzero_members()
        )

    def to_json(self) -> dict:
        return {
            **self.field.to_json(),
            "d": self.d,
            "a": [f"{v:x}" for v in self.a],
            "b": [f"{v:x}" for v in self.b],
            "subgroup_basis": [f"{v:x}" for v in self.subgroup.basis],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "PqMap":
        f = FieldSpec.from_json(obj)
        A = span(f, [int(h, 16) for h in obj["subgroup_basis"]])
        if "d" in obj and int(obj["d"]) != A.dim:
            raise ValueError(f"d={obj['d']} but the subgroup basis has dimension {A.dim}")
        return cls(f, tuple(int(h, 16) for h in obj["a"]), tuple(int(h, 16) for h in obj["b"]), A)


def eval_p(pq: PqMap, lam: int) -> int:
    return pq.p(lam)


def eval_q(pq: PqMap, lam: int) -> int:
    return pq.q(lam)


@dataclass(frozen=True)
class TraceCheck:
    ok: bool
    witness: int | None = None


def check_trace_condition(pq: PqMap) -> TraceCheck:
    f = pq.field
    for lam in pq.subgroup.nonzero_members():
        if not f.trace(f.mul(pq.p(lam), pq.q(lam))):
            return TraceCheck(False, lam)
    return TraceCheck(True)


def closed_set_from_pq(pq: PqMap) -> list[Conic]:
    chk = check_trace_condition(pq)
    if not chk.ok:
        raise TraceConditionError(chk.witness)
    return [Conic(pq.p(lam), pq.q(lam), lam) for lam in pq.subgroup.nonzero_members()]


def _interpolate(f: FieldSpec, A: Subspace, values: Mapping[int, int]) -> tuple[int, ...]:
    """Coefficients c_0..c_{d-1} with sum c_i x^(2^i) = values[x] on the basis of A."""
    basis = A.basis
    mat = [[f.frob(v, i) for i in range(A.dim)] for v in basis]
    coeffs = linalg.solve(f, mat, [values[v] for v in basis])
    L = LinearizedPoly(f, tuple(coeffs))
    for lam, val in values.items():
        if L(lam) != val:
            raise ValueError(f"values are not linear on A (fails at {lam:x})")
    return tuple(coeffs)


def pq_from_closed_set(cs: Sequence[Conic], f: FieldSpec) -> PqMap:
    cs = list(cs)
    if not cs:
        raise ValueError("empty closed set")
    lams = [c.lam for c in cs]
    A = span(f, lams)
    if A.size - 1 != len(cs) or set(lams) != set(A.nonzero_members()):
        raise ValueError("lambdas together with 0 do not form an additive subgroup")
    if not is_closed(cs, f):
        raise ValueError("conic set is not closed under composition")
    a = _interpolate(f, A, {c.lam: f.mul(c.lam, c.alpha) for c in cs})
    b = _interpolate(f, A, {c.lam: f.mul(c.lam, c.beta) for c in cs})
    return PqMap(f, a, b, A)


def is_denniston_form(pq: PqMap) -> bool:
    r = pq.reduced()
    return not any(r.a[2:]) and not any(r.b[2:])


# ---------------------------------------------------------------------------
# Specific constructions
# ---------------------------------------------------------------------------

def relative_trace_kernel(f: FieldSpec, k: int) -> Subspace:
    """{x : trace from GF(2^m) to GF(2^k) of x is 0}."""
    # rows (image | unit vector); rows whose image part reduces to 0 span the kernel
    rows = rref((f.trace_rel(1 << i, k) << f.m) | (1 << i) for i in range(f.m))
    return span(f, [r for r in rows if r >> f.m == 0])


def subfield_dual(f: FieldSpec, k: int) -> DualRep:
    """mu_i = b^i (i < k) with b = g^((2^m - 1)/(2^k - 1)) generating GF(2^k)*.

    These cut out the kernel of the relative trace to GF(2^k).
    """
    if k <= 0 or f.m % k:
        raise ValueError(f"{k} does not divide {f.m}")
    b = f.pow(f.generator, f.order // ((1 << k) - 1))
    return DualRep(f, tuple(f.pow(b, i) for i in range(k)))


def subfield_kernel_map(m: int = 9, k: int = 3) -> PqMap:
    """p(x) = x^(2^k - 1) + 1, q = 1 on the kernel of the relative trace to GF(2^k)."""
    from .gf2m import find_modulus

    f = find_modulus(m)
    A = relative_trace_kernel(f, k)
    a = [0] * A.dim
    a[0] = 1
    a[k] = 1
    return PqMap.p1(f, a, A)


def add_vanishing_term(pq: PqMap, kappa: int, on: str = "a") -> PqMap:
    """Add kappa * P_A(x) / x to p (or q); values on nonzero members of A are unchanged."""
    P = subspace_polynomial(pq.subgroup)
    f = pq.field
    extra = [f.mul(kappa, c) for c in P.coeffs]
    src = pq.a if on == "a" else pq.b
    n = max(len(src), len(extra))
    new = tuple((src[i] if i < len(src) else 0) ^ (extra[i] if i < len(extra) else 0) for i in range(n))
    if on == "a":
        return PqMap(f, new, pq.b, pq.subgroup)
    return PqMap(f, pq.a, new, pq.subgroup)


def flip_constant_trace(pq: PqMap) -> PqMap:
    """Equivalent map on A whose a_0 b_0 has the opposite trace.

    The constant coefficient of P_A(x)/x is the product of the nonzero
    members of A, hence nonzero, so a suitable kappa always exists.
    """
    f = pq.field
    s0 = subspace_polynomial(pq.subgroup).coeffs[0]
    b0 = pq.b[0]
    if not b0:
        raise ValueError("b_0 = 0: the trace of a_0 b_0 cannot be changed through p")
    target = f.mul(s0, b0)
    kappa = next(k for k in range(1, f.q) if f.trace(f.mul(k, target)))
    return add_vanishing_term(pq, kappa, "a")
