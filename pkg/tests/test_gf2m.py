from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from maxarc.gf2m import (
    FieldSpec, field_pair, find_modulus, frob, from_hex, inv, is_irreducible,
    mul, to_hex, trace_abs, trace_rel,
)


def naive_mul(a: int, b: int, mod: int) -> int:
    m = mod.bit_length() - 1
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a >> m & 1:
            a ^= mod
    return acc


def naive_irreducible(poly: int) -> bool:
    deg = poly.bit_length() - 1
    for g in range(2, 1 << (deg // 2 + 1)):
        r = poly
        gd = g.bit_length() - 1
        while r.bit_length() - 1 >= gd:
            r ^= g << (r.bit_length() - 1 - gd)
        if r == 0:
            return False
    return True


def test_small_moduli():
    assert find_modulus(1).modulus == 0b11
    assert find_modulus(2).modulus == 0b111
    assert find_modulus(3).modulus == 0b1011


@pytest.mark.parametrize("m", range(2, 13))
def test_modulus_is_smallest_irreducible(m):
    f = find_modulus(m)
    first = next(p for p in range(1 << m, 1 << (m + 1)) if p & 1 and naive_irreducible(p))
    assert f.modulus == first


def test_irreducibility_agrees_with_trial_division():
    for p in range(2, 1 << 11):
        assert is_irreducible(p) == naive_irreducible(p), hex(p)


def test_field_pair_distinct():
    for m in range(3, 13):
        a, b = field_pair(m)
        assert a.modulus < b.modulus


def test_rejects_bad_modulus():
    with pytest.raises(ValueError):
        FieldSpec(4, 0b10101)  # (x^2+x+1)^2
    with pytest.raises(ValueError):
        FieldSpec(4, 0b1011)   # wrong degree
    with pytest.raises(ValueError):
        find_modulus(5).check(32)


def test_gf8_examples():
    f = FieldSpec(3, 0b1011)
    assert mul(0b10, 0b100, f) == 0b11
    assert inv(0b10, f) == 0b101
    assert inv(1, f) == 1
    assert mul(0, 5, f) == 0 and mul(1, 5, f) == 5


def test_trace_counts():
    f = find_modulus(5)
    assert sum(1 for x in f.elements() if trace_abs(x, f) == 0) == 16
    for m in range(2, 10):
        g = find_modulus(m)
        assert trace_abs(0, g) == 0
        assert trace_abs(1, g) == m % 2


def test_relative_trace_m9():
    f = find_modulus(9)
    kernel = [x for x in f.elements() if trace_rel(x, 3, f) == 0]
    assert len(kernel) == 64
    for a in range(0, 512, 7):
        t = trace_rel(a, 3, f)
        assert frob(t, 3, f) == t


@pytest.mark.parametrize("m", [3, 5, 8, 9, 12, 17])
def test_two_moduli_agree_with_naive(m):
    for f in field_pair(m):
        rng = np.random.default_rng(m)
        for a, b in rng.integers(0, f.q, size=(200, 2)).tolist():
            assert f.mul(a, b) == naive_mul(a, b, f.modulus)
            if a:
                assert f.mul(a, f.inv(a)) == 1


@given(st.integers(2, 14).flatmap(lambda m: st.tuples(
    st.just(m), st.integers(0, (1 << m) - 1), st.integers(0, (1 << m) - 1), st.integers(0, 3 * m))))
def test_frobenius_laws(args):
    m, a, b, j = args
    f = find_modulus(m)
    assert frob(a ^ b, j, f) == frob(a, j, f) ^ frob(b, j, f)
    assert frob(a, m, f) == a and frob(a, 0, f) == a
    chain = a
    for _ in range(j % m):
        chain = naive_mul(chain, chain, f.modulus)
    assert frob(a, j, f) == chain
    assert f.trace(a ^ b) == f.trace(a) ^ f.trace(b)
    assert f.trace(f.sq(a)) == f.trace(a)


@given(st.integers(1, 12).flatmap(lambda m: st.tuples(
    st.just(m), st.integers(0, (1 << m) - 1), st.integers(0, 5000))))
def test_pow_matches_repeated_mul(args):
    m, a, e = args
    f = find_modulus(m)
    acc = 1
    for _ in range(e % 40):
        acc = f.mul(acc, a)
    assert f.pow(a, e % 40) == acc


def test_large_degree_without_tables():
    f = find_modulus(20)
    assert not f.has_tables
    a, b = 0xABCDE, 0x12345
    assert f.mul(a, b) == naive_mul(a, b, f.modulus)
    assert f.mul(a, f.inv(a)) == 1


def test_vectorized_mul_matches_scalar():
    f = find_modulus(7)
    a = np.arange(f.q)
    b = (a * 37 + 11) % f.q
    got = f.vmul(a, b)
    assert [int(v) for v in got] == [f.mul(int(x), int(y)) for x, y in zip(a, b)]


def test_hex_round_trip():
    assert from_hex(to_hex(0x1f3)) == 0x1f3
    f = find_modulus(9)
    assert FieldSpec.from_json(f.to_json()) == f
