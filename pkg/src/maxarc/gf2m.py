"""Arithmetic in GF(2^m) with elements packed into Python ints.

Bit i of an element is the coefficient of x^i in the polynomial basis
determined by the field's modulus.  Scalar operations go through log/exp
tables when m <= 16 and fall back to carry-less multiplication otherwise.
Vectorised (numpy) variants are provided for the geometry and search code.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

MAX_DEGREE = 24
TABLE_DEGREE = 16


# ---------------------------------------------------------------------------
# Polynomials over F_2 packed into ints
# ---------------------------------------------------------------------------

def clmul(a: int, b: int) -> int:
    """Carry-less product of two F_2[x] polynomials."""
    if a < b:
        a, b = b, a
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def polymod(a: int, mod: int) -> int:
    dm = mod.bit_length()
    while a.bit_length() >= dm:
        a ^= mod << (a.bit_length() - dm)
    return a


def polygcd(a: int, b: int) -> int:
    while b:
        a, b = b, polymod(a, b)
    return a


def is_irreducible(poly: int) -> bool:
    """Ben-Or test: gcd(x^(2^k) - x, f) = 1 for every k <= deg(f)/2."""
    m = poly.bit_length() - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if not poly & 1:
        return False
    xk = 2  # x
    for _ in range(m // 2):
        xk = polymod(clmul(xk, xk), poly)
        if polygcd(poly, xk ^ 2) != 1:
            return False
    return True


def irreducible_moduli(m: int) -> Iterator[int]:
    """All irreducible degree-m moduli in increasing integer order."""
    _check_degree(m)
    for cand in range(2**m + 1, 2 ** (m + 1), 2):
        if is_irreducible(cand):
            yield cand


def _check_degree(m: int) -> None:
    if not 1 <= m <= MAX_DEGREE:
        raise ValueError(f"extension degree must be in [1, {MAX_DEGREE}], got {m}")


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# Field specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """GF(2^m) = F_2[x] / (modulus)."""

    m: int
    modulus: int

    def __post_init__(self) -> None:
        _check_degree(self.m)
        if self.modulus.bit_length() - 1 != self.m:
            raise ValueError(f"modulus {self.modulus:x} does not have degree {self.m}")
        if not self.modulus & 1:
            raise ValueError("modulus must have a nonzero constant term")
        if not is_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:x} is reducible")

    @property
    def q(self) -> int:
        return 1 << self.m

    @property
    def order(self) -> int:
        """Size of the multiplicative group."""
        return (1 << self.m) - 1

    def elements(self) -> range:
        return range(1 << self.m)

    def check(self, a: int) -> int:
        if not 0 <= a < (1 << self.m):
            raise ValueError(f"{a:#x} is not an element of GF(2^{self.m})")
        return a

    # -- tables ------------------------------------------------------------

    @cached_property
    def _reduce_rows(self) -> tuple[int, ...]:
        # x^(m+i) mod modulus for i < m, used by the slow path
        rows = []
        cur = self.modulus ^ (1 << self.m)
        for _ in range(self.m):
            rows.append(cur)
            cur <<= 1
            if cur >> self.m:
                cur ^= self.modulus
        return tuple(rows)

    def _slow_mul(self, a: int, b: int) -> int:
        prod = clmul(a, b)
        low = prod & (self.q - 1)
        high = prod >> self.m
        i = 0
        while high:
            if high & 1:
                low ^= self._reduce_rows[i]
            high >>= 1
            i += 1
        return low

    def _slow_pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self._slow_mul(out, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return out

    @cached_property
    def generator(self) -> int:
        """Smallest primitive element (as an integer)."""
        if self.m == 1:
            return 1
        n = self.order
        cofactors = [n // p for p in _prime_factors(n)]
        for g in range(2, self.q):
            if all(self._slow_pow(g, c) != 1 for c in cofactors):
                return g
        raise AssertionError("no primitive element found")

    @cached_property
    def _logexp(self) -> tuple[list[int], list[int]]:
        n = self.order
        exp = [0] * (2 * n)
        log = [0] * self.q
        g = self.generator
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._slow_mul(x, g)
        exp[n:] = exp[:n]
        return log, exp

    @property
    def has_tables(self) -> bool:
        return self.m <= TABLE_DEGREE

    @cached_property
    def trace_mask(self) -> int:
        """Bit i set iff trace(x^i) = 1; trace(a) = parity(a & mask)."""
        mask = 0
        for i in range(self.m):
            t = 0
            y = 1 << i
            for _ in range(self.m):
                t ^= y
                y = self._slow_mul(y, y)
            assert t in (0, 1)
            mask |= t << i
        return mask

    # -- scalar arithmetic -------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        if self.has_tables:
            log, exp = self._logexp
            return exp[log[a] + log[b]]
        return self._slow_mul(a, b)

    def sq(self, a: int) -> int:
        return self.mul(a, a)

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if not a:
            return 0
        if e < 0:
            a = self.inv(a)
            e = -e
        if self.has_tables:
            log, exp = self._logexp
            return exp[(log[a] * e) % self.order]
        return self._slow_pow(a, e)

    def inv(self, a: int) -> int:
        if not a:
            raise ZeroDivisionError("inverse of zero in GF(2^m)")
        if self.has_tables:
            log, exp = self._logexp
            return exp[(self.order - log[a]) % self.order]
        return self._slow_pow(a, self.order - 1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frob(self, a: int, j: int = 1) -> int:
        """a^(2^j), with j read modulo m."""
        j %= self.m
        if not a or j == 0:
            return a
        if self.has_tables:
            log, exp = self._logexp
            return exp[(log[a] << j) % self.order]
        for _ in range(j):
            a = self._slow_mul(a, a)
        return a

    def trace(self, a: int) -> int:
        return (a & self.trace_mask).bit_count() & 1

    def trace_rel(self, a: int, k: int) -> int:
        """Relative trace to the subfield GF(2^k)."""
        if k <= 0 or self.m % k:
            raise ValueError(f"subfield degree {k} does not divide {self.m}")
        out = 0
        for j in range(self.m // k):
            out ^= self.frob(a, k * j)
        return out

    # -- vectorised arithmetic --------------------------------------------

    @cached_property
    def np_tables(self) -> "_NumpyTables":
        if not self.has_tables:
            raise ValueError(f"numpy tables unavailable for m={self.m} > {TABLE_DEGREE}")
        return _NumpyTables(self)

    def vmul(self, a, b) -> np.ndarray:
        return self.np_tables.mul(a, b)

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        return {"m": self.m, "modulus": f"{self.modulus:x}"}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldSpec":
        return cls(int(obj["m"]), int(obj["modulus"], 16))

    def __repr__(self) -> str:
        return f"FieldSpec(m={self.m}, modulus=0x{self.modulus:x})"


class _NumpyTables:
    """log/exp arrays arranged so that zero products need no branching."""

    def __init__(self, f: FieldSpec):
        log, exp = f._logexp
        n = f.order
        q = f.q
        self.q = q
        self.n = n
        self.log = np.array(log, dtype=np.int64)
        self.log[0] = 2 * q  # any sum involving log(0) lands in the zero region
        self.exp = np.zeros(4 * q + 1, dtype=np.int64)
        self.exp[: 2 * n] = np.array(exp, dtype=np.int64)
        elems = np.arange(q, dtype=np.int64)
        self.sq = self.mul(elems, elems)
        self.inv = np.zeros(q, dtype=np.int64)
        self.inv[1:] = self.exp[(n - self.log[1:]) % n]
        self.trace = np.array(
            [bin(int(v) & f.trace_mask).count("1") & 1 for v in range(q)], dtype=np.int64
        )

    def mul(self, a, b) -> np.ndarray:
        return self.exp[self.log[a] + self.log[b]]

    def pow(self, a, e: int) -> np.ndarray:
        """Elementwise a^e for e >= 1 (zero stays zero)."""
        a = np.asarray(a)
        out = self.exp[(self.log[a] * e) % self.n]
        return np.where(a == 0, 0, out)


# ---------------------------------------------------------------------------
# Module-level functional interface
# ---------------------------------------------------------------------------

def find_modulus(m: int) -> FieldSpec:
    """Field whose modulus is the smallest irreducible degree-m polynomial."""
    return FieldSpec(m, next(irreducible_moduli(m)))


def field_pair(m: int) -> tuple[FieldSpec, FieldSpec]:
    """The two smallest-modulus fields of degree m (m >= 2)."""
    it = irreducible_moduli(m)
    first = FieldSpec(m, next(it))
    try:
        second = FieldSpec(m, next(it))
    except StopIteration:
        second = first
    return first, second


def mul(a: int, b: int, f: FieldSpec) -> int:
    return f.mul(a, b)


def inv(a: int, f: FieldSpec) -> int:
    return f.inv(a)


def frob(a: int, j: int, f: FieldSpec) -> int:
    if j < 0:
        raise ValueError("Frobenius shift must be non-negative")
    return f.frob(a, j)


def trace_abs(a: int, f: FieldSpec) -> int:
    return f.trace(a)


def trace_rel(a: int, k: int, f: FieldSpec) -> int:
    return f.trace_rel(a, k)


def to_hex(a: int) -> str:
    return f"{a:x}"


def from_hex(s: str) -> int:
    return int(s, 16)
