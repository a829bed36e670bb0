"""F_2-subspaces of GF(2^m), trace-hyperplane duals and quadratic-form radicals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .gf2m import FieldSpec

MAX_ENUM_DIM = 20


# ---------------------------------------------------------------------------
# F_2 linear algebra on int bitsets
# ---------------------------------------------------------------------------

def rref(rows: Iterable[int]) -> list[int]:
    """Fully reduced echelon basis, sorted by decreasing leading bit."""
    basis: list[int] = []
    for v in rows:
        for b in basis:
            if v ^ b < v:
                v ^= b
        if v:
            top = v.bit_length() - 1
            basis = [b ^ v if (b >> top) & 1 else b for b in basis]
            basis.append(v)
    basis.sort(reverse=True)
    return basis


def reduce_vec(v: int, basis: Sequence[int]) -> int:
    """Residue of v modulo an rref basis."""
    for b in basis:
        if v ^ b < v:
            v ^= b
    return v


def rank(rows: Iterable[int]) -> int:
    return len(rref(rows))


def nullspace(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis (rref) of {x in F_2^ncols : popcount(row & x) even for every row}."""
    piv_rows = rref(rows)
    pivots = {r.bit_length() - 1: r for r in piv_rows}
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        x = 1 << fc
        for p, r in pivots.items():
            # pivot variable p is determined by the free bits of row r
            if (r >> fc) & 1:
                x |= 1 << p
        out.append(x)
    return rref(out)


def solve_affine(rows: Sequence[tuple[int, int]], ncols: int) -> int | None:
    """One solution x of {parity(row & x) = rhs}, or None when inconsistent.

    Rows are (mask, rhs) pairs; the returned solution sets free variables to 0.
    """
    piv: dict[int, tuple[int, int]] = {}
    for mask, rhs in rows:
        for p in sorted(piv, reverse=True):
            if (mask >> p) & 1:
                pm, pr = piv[p]
                mask ^= pm
                rhs ^= pr
        if mask:
            piv[mask.bit_length() - 1] = (mask, rhs)
        elif rhs:
            return None
    x = 0
    for p in sorted(piv):
        pm, pr = piv[p]
        val = pr ^ ((pm & x & ~(1 << p)).bit_count() & 1)
        if val:
            x |= 1 << p
    return x


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """F_2-subspace of GF(2^m) held as a canonical rref basis."""

    field: FieldSpec
    basis: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return 1 << len(self.basis)

    def __contains__(self, x: int) -> bool:
        return reduce_vec(x, self.basis) == 0

    def iter_members(self) -> Iterator[int]:
        """Members in increasing integer order, zero first.

        With a fully reduced basis the member selected by coefficient bits c
        (bit k <-> k-th smallest pivot) has its pivot bits equal to c, so
        counting c upward enumerates members in sorted order.
        """
        rows = self.basis[::-1]
        for c in range(1 << len(rows)):
            cur = 0
            k = 0
            while c:
                if c & 1:
                    cur ^= rows[k]
                c >>= 1
                k += 1
            yield cur

    def members(self) -> list[int]:
        if self.dim > MAX_ENUM_DIM:
            raise ValueError(f"refusing to enumerate a subspace of dimension {self.dim}")
        rows = self.basis[::-1]
        out = [0]
        for r in rows:
            out += [x ^ r for x in out]
        out.sort()
        return out

    def nonzero_members(self) -> list[int]:
        return self.members()[1:]

    def to_json(self) -> dict:
        return {**self.field.to_json(), "basis": [f"{b:x}" for b in self.basis]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Subspace":
        f = FieldSpec.from_json(obj)
        return span(f, [int(h, 16) for h in obj["basis"]])


def span(field: FieldSpec, gens: Iterable[int]) -> Subspace:
    return Subspace(field, tuple(rref(field.check(g) for g in gens)))


def full_space(field: FieldSpec) -> Subspace:
    return span(field, [1 << i for i in range(field.m)])


def complement_basis(s: Subspace) -> list[int]:
    """Standard basis vectors completing s to the whole field."""
    pivots = {b.bit_length() - 1 for b in s.basis}
    return [1 << i for i in range(s.field.m) if i not in pivots]


def enumerate_subspaces(field: FieldSpec, d: int) -> Iterator[Subspace]:
    """Every d-dimensional subspace, one canonical basis each.

    Walks pivot patterns and free entries of the reduced echelon form; the
    count is the Gaussian binomial [m choose d]_2.
    """
    from itertools import combinations, product

    m = field.m
    for pivots in combinations(range(m), d):
        pset = set(pivots)
        free_slots = []
        for p in pivots:
            free_slots.append([c for c in range(p) if c not in pset])
        nfree = sum(len(s) for s in free_slots)
        for bits in product((0, 1), repeat=nfree):
            it = iter(bits)
            rows = []
            for p, slots in zip(pivots, free_slots):
                v = 1 << p
                for c in slots:
                    if next(it):
                        v |= 1 << c
                rows.append(v)
            yield Subspace(field, tuple(sorted(rows, reverse=True)))


# ---------------------------------------------------------------------------
# Trace duals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualRep:
    """A = {x : trace(mu_i x) = 0 for all i}."""

    field: FieldSpec
    mus: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.mus)

    def to_json(self) -> dict:
        return {**self.field.to_json(), "mus": [f"{u:x}" for u in self.mus]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "DualRep":
        return cls(FieldSpec.from_json(obj), tuple(int(h, 16) for h in obj["mus"]))


def trace_functional(field: FieldSpec, mu: int) -> int:
    """Bitmask w with trace(mu * x) = parity(w & x)."""
    w = 0
    for j in range(field.m):
        w |= field.trace(field.mul(mu, 1 << j)) << j
    return w


def dual_mus(s: Subspace) -> DualRep:
    """Independent mu's cutting out s, as the rref basis of its trace annihilator."""
    f = s.field
    # trace(mu * s_k) is linear in the bits of mu; row k holds that functional
    rows = [trace_functional(f, b) for b in s.basis]
    return DualRep(f, tuple(nullspace(rows, f.m)))


def subgroup_from_mus(d: DualRep) -> Subspace:
    f = d.field
    if rank(d.mus) != len(d.mus):
        raise ValueError("mu's are linearly dependent over F_2")
    rows = [trace_functional(f, mu) for mu in d.mus]
    return Subspace(f, tuple(nullspace(rows, f.m)))


# ---------------------------------------------------------------------------
# Quadratic forms
# ---------------------------------------------------------------------------

class QuadForm:
    """An F_2-valued quadratic form on GF(2^m).

    Either built from coefficients, Q(x) = trace(sum_i c_i x^(2^i+1) + c x),
    or wrapped around an arbitrary evaluator.
    """

    def __init__(self, field: FieldSpec, evaluator: Callable[[int], int], label: str = ""):
        self.field = field
        self.evaluate = evaluator
        self.label = label

    @classmethod
    def from_coeffs(cls, field: FieldSpec, quad: Mapping[int, int], lin: int = 0) -> "QuadForm":
        f = field
        terms = {i: c for i, c in quad.items() if c}

        def q(x: int) -> int:
            acc = f.mul(lin, x)
            for i, c in terms.items():
                acc ^= f.mul(c, f.mul(f.frob(x, i), x))
            return f.trace(acc)

        desc = " + ".join(f"{c:x}*x^{(1 << i) + 1}" for i, c in sorted(terms.items()))
        return cls(f, q, label=f"trace({desc or '0'} + {lin:x}*x)")

    def __call__(self, x: int) -> int:
        return self.evaluate(x)

    def bilinear(self, x: int, y: int) -> int:
        return self.evaluate(x ^ y) ^ self.evaluate(x) ^ self.evaluate(y)

    def gram_rows(self) -> list[int]:
        """Row i, bit j = B(x^i, x^j)."""
        m = self.field.m
        rows = []
        for i in range(m):
            r = 0
            for j in range(m):
                r |= self.bilinear(1 << i, 1 << j) << j
            rows.append(r)
        return rows

    def __repr__(self) -> str:
        return f"QuadForm({self.label or 'black-box'})"


def radical(qf: QuadForm) -> tuple[Subspace, Subspace]:
    """(rad V, V0) where V0 is the zero set of Q inside rad V."""
    f = qf.field
    rad = Subspace(f, tuple(nullspace(qf.gram_rows(), f.m)))
    # Q is additive on rad V, so its zero set there is a hyperplane or all of it
    vals = [qf(b) for b in rad.basis[::-1]]
    basis = rad.basis[::-1]
    kernel_gens = []
    pivot = None
    for b, v in zip(basis, vals):
        if not v:
            kernel_gens.append(b)
        elif pivot is None:
            pivot = b
        else:
            kernel_gens.append(b ^ pivot)
    return rad, span(f, kernel_gens)


def max_singular_bound(qf: QuadForm) -> int:
    """floor((m + dim V0) / 2): no subspace on which Q vanishes is larger."""
    _, v0 = radical(qf)
    return (qf.field.m + v0.dim) // 2


def max_singular_dim_bruteforce(qf: QuadForm) -> int:
    """Largest dimension of a subspace on which Q vanishes, by exhaustive growth."""
    f = qf.field
    zeros = [x for x in f.elements() if x and not qf(x)]
    level = {()}
    best = 0
    while level:
        nxt = set()
        for basis in level:
            members = Subspace(f, basis).members() if basis else [0]
            mset = set(members)
            for v in zeros:
                if v in mset:
                    continue
                if all(not qf(v ^ s) for s in members):
                    nxt.add(tuple(rref(basis + (v,))))
        if nxt:
            best += 1
        level = nxt
    return best
