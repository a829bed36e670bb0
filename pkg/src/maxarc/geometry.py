"""Points, lines and the conic family of PG(2, 2^m); arc construction and verification.

The family consists of the conics

    F(alpha, beta, lam) : alpha x^2 + x y + beta y^2 + lam z^2 = 0

with trace(alpha beta) = 1, all sharing the nucleus (0, 0, 1).  Two members
with distinct lam compose into a third; a set closed under composition,
together with the nucleus, is a maximal arc.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .gf2m import FieldSpec
from .subspaces import Subspace

VERIFY_MAX_M = 10
_GRID_CELLS = 1 << 20


class GeometryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Points and lines
# ---------------------------------------------------------------------------

def _normalize(f: FieldSpec, x: int, y: int, z: int) -> tuple[int, int, int]:
    """Scale so that the last nonzero coordinate is 1."""
    last = z or y or x
    if not last:
        raise GeometryError("(0, 0, 0) is not a projective point")
    if last == 1:
        return x, y, z
    s = f.inv(last)
    return f.mul(x, s), f.mul(y, s), f.mul(z, s)


class ProjPoint(NamedTuple):
    x: int
    y: int
    z: int

    @classmethod
    def of(cls, f: FieldSpec, x: int, y: int, z: int) -> "ProjPoint":
        return cls(*_normalize(f, x, y, z))

    def __str__(self) -> str:
        return f"{self.x:x} {self.y:x} {self.z:x}"


class ProjLine(NamedTuple):
    """The line a x + b y + c z = 0."""

    a: int
    b: int
    c: int

    @classmethod
    def of(cls, f: FieldSpec, a: int, b: int, c: int) -> "ProjLine":
        return cls(*_normalize(f, a, b, c))

    def contains(self, f: FieldSpec, p: Sequence[int]) -> bool:
        return not (f.mul(self.a, p[0]) ^ f.mul(self.b, p[1]) ^ f.mul(self.c, p[2]))


NUCLEUS = ProjPoint(0, 0, 1)


# ---------------------------------------------------------------------------
# Conics
# ---------------------------------------------------------------------------

class _Infinity:
    """Tag for the lambda of the line at infinity; never a field value."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


@dataclass(frozen=True)
class Conic:
    alpha: int
    beta: int
    lam: int | _Infinity

    def is_nondegenerate(self, f: FieldSpec) -> bool:
        return (
            self.lam is not INF
            and self.alpha != 0
            and self.beta != 0
            and f.trace(f.mul(self.alpha, self.beta)) == 1
        )

    def __lt__(self, other: "Conic") -> bool:  # INF sorts last
        return _conic_key(self) < _conic_key(other)


def _conic_key(c: Conic) -> tuple:
    lam = (1, 0) if c.lam is INF else (0, c.lam)
    return (lam, c.alpha, c.beta)


def _require_proper(c: Conic, f: FieldSpec) -> None:
    if c.lam is INF:
        raise GeometryError("lambda = INF is the line at infinity, not a conic of the family")
    if c.lam == 0:
        raise GeometryError("lambda = 0 degenerates to the nucleus")
    if not c.is_nondegenerate(f):
        raise GeometryError(f"degenerate conic: trace(alpha*beta) != 1 for {c}")


def _xy_grid_rows(f: FieldSpec):
    """Yield (xs, xy) blocks where xy[i, j] = xs[i] * j."""
    t = f.np_tables
    q = f.q
    step = max(1, _GRID_CELLS // q)
    ys = np.arange(q, dtype=np.int64)
    for start in range(0, q, step):
        xs = np.arange(start, min(q, start + step), dtype=np.int64)
        yield xs, t.exp[t.log[xs][:, None] + t.log[ys][None, :]]


def conic_points(c: Conic, f: FieldSpec) -> list[ProjPoint]:
    """The q + 1 affine points of a nondegenerate conic, sorted."""
    _require_proper(c, f)
    t = f.np_tables
    q = f.q
    ys = np.arange(q, dtype=np.int64)
    beta_y2 = t.mul(c.beta, t.sq[ys])
    out: list[ProjPoint] = []
    for xs, xy in _xy_grid_rows(f):
        alpha_x2 = t.mul(c.alpha, t.sq[xs])
        val = alpha_x2[:, None] ^ xy ^ beta_y2[None, :] ^ c.lam
        ix, iy = np.nonzero(val == 0)
        out.extend(ProjPoint(int(xs[i]), int(y), 1) for i, y in zip(ix, iy))
    if len(out) != q + 1:
        raise AssertionError(f"conic has {len(out)} points, expected {q + 1}")
    return out


def compose(c1: Conic, c2: Conic, f: FieldSpec) -> Conic:
    """The lambda-weighted combination of two conics with distinct lambda."""
    for c in (c1, c2):
        if c.lam is INF or c.lam == 0:
            raise GeometryError("composition needs finite nonzero lambdas")
    if c1.lam == c2.lam:
        raise GeometryError("composition is undefined for equal lambdas")
    lam = c1.lam ^ c2.lam
    den = f.inv(lam)
    alpha = f.mul(f.mul(c1.alpha, c1.lam) ^ f.mul(c2.alpha, c2.lam), den)
    beta = f.mul(f.mul(c1.beta, c1.lam) ^ f.mul(c2.beta, c2.lam), den)
    return Conic(alpha, beta, lam)


def is_closed(cs: Iterable[Conic], f: FieldSpec) -> bool:
    cs = list(cs)
    by_lam: dict[int, Conic] = {}
    for c in cs:
        _require_proper(c, f)
        if c.lam in by_lam:
            raise GeometryError(f"duplicate lambda {c.lam:x}")
        by_lam[c.lam] = c
    for i, c1 in enumerate(cs):
        for c2 in cs[i + 1:]:
            c3 = compose(c1, c2, f)
            if by_lam.get(c3.lam) != c3:
                return False
    n = len(cs) + 1
    if n & (n - 1):
        raise AssertionError(f"closed set of size {len(cs)} is not 2^d - 1")
    return True


# ---------------------------------------------------------------------------
# Arcs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Arc:
    field: FieldSpec
    points: tuple[ProjPoint, ...]
    degree_claim: int

    @classmethod
    def from_points(cls, field: FieldSpec, pts: Iterable[Sequence[int]], n: int) -> "Arc":
        norm = [ProjPoint.of(field, *p) for p in pts]
        uniq = sorted(set(norm))
        if len(uniq) != len(norm):
            raise GeometryError("duplicate points in arc")
        return cls(field, tuple(uniq), n)

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64).reshape(-1, 3)


def arc_size(m: int, d: int) -> int:
    return (1 << (m + d)) - (1 << m) + (1 << d)


def build_arc(cs: Iterable[Conic], f: FieldSpec) -> Arc:
    cs = sorted(cs)
    if not cs or not is_closed(cs, f):
        raise GeometryError("build_arc needs a non-empty closed set")
    n = len(cs) + 1
    d = n.bit_length() - 1
    pts = {NUCLEUS}
    for c in cs:
        pts.update(conic_points(c, f))
    if len(pts) != arc_size(f.m, d):
        raise AssertionError(f"arc has {len(pts)} points, expected {arc_size(f.m, d)}")
    return Arc(f, tuple(sorted(pts)), n)


def denniston_pencil(a: int, h: int, b: int, A: Subspace, f: FieldSpec) -> list[Conic]:
    hinv = f.inv(h)
    ah, bh = f.mul(a, hinv), f.mul(b, hinv)
    return [Conic(ah, bh, f.mul(lam, hinv)) for lam in A.nonzero_members()]


def denniston_arc(a: int, h: int, b: int, A: Subspace, f: FieldSpec) -> Arc:
    """{(x, y, 1) : a x^2 + h x y + b y^2 in A}."""
    if not h or f.trace(f.div(f.mul(a, b), f.sq(h))) != 1:
        raise GeometryError("a x^2 + h x y + b y^2 is reducible: need trace(a b / h^2) = 1")
    t = f.np_tables
    q = f.q
    member = np.zeros(q, dtype=bool)
    member[A.members()] = True
    ys = np.arange(q, dtype=np.int64)
    b_y2 = t.mul(b, t.sq[ys])
    pts: list[ProjPoint] = []
    for xs, xy in _xy_grid_rows(f):
        val = t.mul(a, t.sq[xs])[:, None] ^ t.mul(h, xy) ^ b_y2[None, :]
        ix, iy = np.nonzero(member[val])
        pts.extend(ProjPoint(int(xs[i]), int(y), 1) for i, y in zip(ix, iy))
    pts.sort()
    expected = q * (A.size - 1) + A.size
    if len(pts) != expected:
        raise AssertionError(f"Denniston arc has {len(pts)} points, expected {expected}")
    return Arc(f, tuple(pts), A.size)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArcReport:
    is_max: bool
    degree: int
    size: int
    line_histogram: dict[int, int]  # intersection size -> number of lines

    def histogram_text(self) -> str:
        return " ".join(f"{cnt}@{size}" for size, cnt in sorted(self.line_histogram.items()))

    def to_json(self) -> dict:
        return {
            "is_max": self.is_max,
            "degree": self.degree,
            "size": self.size,
            "histogram": {str(k): v for k, v in sorted(self.line_histogram.items())},
        }


def line_counts(arc: Arc) -> np.ndarray:
    """Number of arc points on every line of PG(2, q).

    Lines are indexed as: (a, b, 1) -> a q + b; (a, 1, 0) -> q^2 + a;
    (1, 0, 0) -> q^2 + q.
    """
    f = arc.field
    if f.m > VERIFY_MAX_M:
        raise GeometryError(f"line verification limited to m <= {VERIFY_MAX_M}")
    t = f.np_tables
    q = f.q
    nlines = q * q + q + 1
    pts = arc.as_array()
    counts = np.zeros(nlines, dtype=np.int64)
    if not len(pts):
        return counts
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    a_all = np.arange(q, dtype=np.int64)

    # y != 0: for each a, the line (a, b, 1) through the point has b = (a x + z) / y
    sel = y != 0
    if sel.any():
        xs, ys_, zs = x[sel], y[sel], z[sel]
        yinv = t.inv[ys_]
        ax = t.exp[t.log[a_all][None, :] + t.log[xs][:, None]]
        bvals = t.mul((ax ^ zs[:, None]), yinv[:, None])
        counts += np.bincount((a_all[None, :] * q + bvals).ravel(), minlength=nlines)
        # point on the line (a, 1, 0) iff a x + y = 0, i.e. a = y / x (x != 0)
        nz = xs != 0
        if nz.any():
            a_inf = t.mul(ys_[nz], t.inv[xs[nz]])
            counts += np.bincount(q * q + a_inf, minlength=nlines)
        # x = 0: on the line (1, 0, 0)
        counts[q * q + q] += int(np.count_nonzero(xs == 0))

    # y == 0, x != 0: a x + z = 0 fixes a = z / x, any b; plus the line (0, 1, 0)
    sel = (y == 0) & (x != 0)
    if sel.any():
        a_fix = t.mul(z[sel], t.inv[x[sel]])
        rows = np.bincount(a_fix, minlength=q)
        counts[: q * q] += np.repeat(rows, q)
        counts[q * q] += int(np.count_nonzero(sel))

    # (0, 0, 1): lines with c = 0
    sel = (y == 0) & (x == 0)
    k = int(np.count_nonzero(sel))
    if k:
        counts[q * q:] += k
    return counts


def verify_maximal_arc(arc: Arc) -> ArcReport:
    q = arc.field.q
    counts = line_counts(arc)
    sizes, freq = np.unique(counts, return_counts=True)
    hist = {int(s): int(c) for s, c in zip(sizes, freq)}
    k = len(arc)
    support = set(hist) - {0}
    n = max(support) if support else 0
    is_max = len(support) == 1 and k == q * (n - 1) + n
    return ArcReport(is_max, n, k, hist)
