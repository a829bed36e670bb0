from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from maxarc import scoeffs as sc
from maxarc.gf2m import field_pair, find_modulus
from maxarc.linalg import SingularMatrixError, det, in_span, rank as lrank, solve
from maxarc.pqmaps import PqMap, check_trace_condition, flip_constant_trace, subfield_dual
from maxarc.subspaces import DualRep, dual_mus, rank, span, subgroup_from_mus


def random_mus(f, r, rng):
    while True:
        mus = tuple(rng.randrange(1, f.q) for _ in range(r))
        if rank(mus) == r:
            return mus


def leibniz_det(f, mat):
    n = len(mat)
    out = 0
    for perm in itertools.permutations(range(n)):
        term = 1
        for i, j in enumerate(perm):
            term = f.mul(term, mat[i][j])
        out ^= term
    return out


# -- linear algebra over GF(2^m) ---------------------------------------------

@given(st.integers(0, 2**31))
def test_det_matches_leibniz(seed):
    rng = random.Random(seed)
    f = find_modulus(rng.randrange(2, 9))
    n = rng.randrange(1, 5)
    mat = [[rng.randrange(f.q) for _ in range(n)] for _ in range(n)]
    assert det(f, mat) == leibniz_det(f, mat)


@given(st.integers(0, 2**31))
def test_solve_and_span(seed):
    rng = random.Random(seed)
    f = find_modulus(6)
    n = rng.randrange(1, 5)
    mat = [[rng.randrange(f.q) for _ in range(n)] for _ in range(n)]
    rhs = [rng.randrange(f.q) for _ in range(n)]
    if det(f, mat) == 0:
        assert lrank(f, mat) < n
        with pytest.raises(SingularMatrixError):
            solve(f, mat, rhs)
        return
    x = solve(f, mat, rhs)
    for row, b in zip(mat, rhs):
        acc = 0
        for a, xi in zip(row, x):
            acc ^= f.mul(a, xi)
        assert acc == b
    assert in_span(f, mat, mat[0]) and lrank(f, mat) == n


# -- reduced polynomials -------------------------------------------------------

def test_exponent_reduction():
    assert sc.reduce_exponent(0, 4) == 0
    assert sc.reduce_exponent(15, 4) == 15
    assert sc.reduce_exponent(16, 4) == 1
    assert sc.reduce_exponent(30, 4) == 15


@given(st.integers(0, 2**31))
def test_poly_arithmetic_matches_evaluation(seed):
    rng = random.Random(seed)
    f = find_modulus(rng.randrange(2, 7))
    a = sc.ReducedPoly(f, {rng.randrange(3 * f.q): rng.randrange(f.q) for _ in range(4)})
    b = sc.ReducedPoly(f, {rng.randrange(3 * f.q): rng.randrange(f.q) for _ in range(4)})
    k = rng.randrange(f.m)
    for x in f.elements():
        assert (a + b).evaluate(x) == a.evaluate(x) ^ b.evaluate(x)
        assert (a * b).evaluate(x) == f.mul(a.evaluate(x), b.evaluate(x))
        assert a.frobenius(k).evaluate(x) == f.frob(a.evaluate(x), k)
    assert all(c for c in (a * b).terms.values())


def test_delta_at_zero_is_indicator():
    f = find_modulus(5)
    d0 = sc.delta_at_zero(f)
    assert [d0.evaluate(x) for x in range(4)] == [1, 0, 0, 0]


# -- S(x) -------------------------------------------------------------------------

def test_s_poly_small_cases():
    f = find_modulus(7)
    assert sc.s_poly(DualRep(f, ())) == sc.constant(f, 1)
    mu = 0x35
    s = sc.s_poly(DualRep(f, (mu,)))
    for i in range(7):
        assert sc.coeff_c(s, (i,)) == f.frob(mu, i)


@pytest.mark.parametrize("seed", range(4))
def test_s_poly_is_subgroup_indicator(seed):
    f = find_modulus(6)
    rng = random.Random(seed)
    d = DualRep(f, random_mus(f, 2, rng))
    A = set(subgroup_from_mus(d).members())
    assert len(A) == 16
    s = sc.s_poly(d)
    assert [s.evaluate(x) for x in f.elements()] == [int(x in A) for x in f.elements()]


def test_coefficient_vanishes_beyond_r():
    f = find_modulus(7)
    d = DualRep(f, random_mus(f, 2, random.Random(1)))
    s = sc.s_poly(d)
    for idx in sc.index_sets(7, 3):
        assert sc.coeff_c(s, idx) == 0 and sc.coeff_c(d, idx) == 0


@pytest.mark.parametrize("m,r", [(5, 2), (7, 3), (9, 3), (10, 4)])
def test_expansion_equals_moore_det(m, r):
    f = find_modulus(m)
    d = DualRep(f, random_mus(f, r, random.Random(m * r)))
    s = sc.s_poly(d)
    for idx in itertools.islice(sc.index_sets(m, r), 60):
        assert sc.coeff_c(s, idx) == sc.moore_det(sc.MooreMatrix(f, d.mus, idx))


@given(st.integers(0, 2**31))
def test_squaring_shift(seed):
    rng = random.Random(seed)
    m = rng.randrange(3, 9)
    f = find_modulus(m)
    r = rng.randrange(1, min(4, m))
    s = sc.s_poly(DualRep(f, random_mus(f, r, rng)))
    assert s * s == s
    for size in range(1, r + 1):
        idx = next(itertools.islice(sc.index_sets(m, size), rng.randrange(3), None))
        c = sc.coeff_c(s, idx)
        assert f.sq(c) == sc.coeff_c(s, sc.shift_index_set(idx, m))


def test_index_set_validation():
    with pytest.raises(ValueError):
        sc.check_index_set((1, 2), 5)
    with pytest.raises(ValueError):
        sc.check_index_set((5,), 5)
    with pytest.raises(ValueError):
        sc.check_index_set((), 5)
    assert sc.shift_index_set((4, 2, 0), 5) == (3, 1, 0)
    assert sc.shift_index_set((3, 1), 5) == (4, 2)


def test_moore_det_basics():
    f = find_modulus(6)
    assert sc.moore_det(sc.MooreMatrix(f, (0x17,), (0,))) == 0x17
    assert sc.moore_det(sc.MooreMatrix(f, (0x17, 0x17), (1, 0))) == 0
    with pytest.raises(ValueError):
        sc.moore_det(sc.MooreMatrix(f, (1, 2), (0,)))


def test_consecutive_moore_dets_nonzero():
    rng = random.Random(5)
    for _ in range(100):
        m = rng.randrange(4, 11)
        f = find_modulus(m)
        r = rng.randrange(1, min(4, m - 1) + 1)
        mus = random_mus(f, r, rng)
        i = rng.randrange(m)
        shifts = tuple((i + k) % m for k in range(r - 1, -1, -1))
        assert sc.moore_det(sc.MooreMatrix(f, mus, shifts)) != 0


# -- identities ---------------------------------------------------------------------

def test_coefficient_product_identity_examples():
    f = find_modulus(5)
    rng = random.Random(2)
    for _ in range(10):
        d = DualRep(f, random_mus(f, 2, rng))
        assert sc.coefficient_product_check(d)
        assert sc.coefficient_product_check(d, "determinant")
    assert sc.coefficient_product_check(subfield_dual(find_modulus(9), 3))
    with pytest.raises(ValueError):
        sc.coefficient_product_check(DualRep(f, (1,)))


@given(st.integers(0, 2**31))
def test_identity_under_both_moduli(seed):
    rng = random.Random(seed)
    m = rng.randrange(5, 10)
    r = rng.randrange(2, min(5, m - 1) + 1)
    for f in field_pair(m):
        d = DualRep(f, random_mus(f, r, rng))
        assert sc.coefficient_product_check(d, "determinant")


def test_cramer_b1_small_by_hand():
    f = find_modulus(4)
    mu1, mu2 = 0b0010, 0b0111
    # b0 mu + b1 mu^2 = mu^4 for mu in {mu1, mu2}
    a, b, c, dd = mu1, f.sq(mu1), mu2, f.sq(mu2)
    e1, e2 = f.frob(mu1, 2), f.frob(mu2, 2)
    b1 = f.div(f.mul(a, e2) ^ f.mul(c, e1), f.mul(a, dd) ^ f.mul(b, c))
    assert sc.cramer_b1(DualRep(f, (mu1, mu2))) == b1


def test_moore_solution_coefficients():
    rng = random.Random(11)
    for _ in range(100):
        m = rng.randrange(4, 11)
        f = find_modulus(m)
        r = rng.randrange(2, min(4, m - 1) + 1)
        d = DualRep(f, random_mus(f, r, rng))
        sol = sc.moore_system_solution(d)
        assert sc.cramer_b1(d) == sc.coeff_c(d, tuple(range(r - 1, 0, -1)))
        base = sc.coeff_c(d, tuple(range(r - 1, -1, -1)))
        for j in range(r):
            idx = tuple(i for i in range(r, -1, -1) if i != j)
            # b_j c(r-1..0) equals the determinant with row j replaced by row r
            assert f.mul(sol[j], base) == sc.moore_det(sc.MooreMatrix(f, d.mus, idx))


def test_delta_nonzero():
    rng = random.Random(4)
    f = find_modulus(6)
    for _ in range(100):
        assert sc.delta(DualRep(f, random_mus(f, 2, rng))) != 0
    for mu in range(1, 64):
        assert sc.delta(DualRep(f, (mu,))) != 0
    with pytest.raises(ValueError):
        sc.delta(DualRep(find_modulus(5), random_mus(find_modulus(5), 4, rng)))


# -- T(x) and product congruences ------------------------------------------------------

def test_t_poly_of_constants_is_zero():
    f = find_modulus(5)
    A = span(f, [1, 2])
    assert sc.t_poly(PqMap(f, (7,), (9,), A)).is_zero()


def test_t_poly_matches_pointwise_trace(m9_map):
    f = m9_map.field
    t = sc.t_poly(m9_map)
    a0b0 = f.mul(m9_map.a[0], m9_map.b[0])
    for x in range(1, f.q, 13):
        assert t.evaluate(x) == f.trace(f.mul(m9_map.p(x), m9_map.q(x)) ^ a0b0)
    m = f.m
    ones = {(1 << j) - 1 for j in range(m + 1)}
    for e in t.terms:
        assert any(sc.rotate_exponent(e, m, k) in ones for k in range(m))


def test_t_poly_exponent_shape_general_q():
    f = find_modulus(6)
    A = span(f, [1, 2, 4])
    pq = PqMap(f, (3, 5, 0x11), (1, 0x21, 7), A)
    m = f.m
    allowed = set()
    for j in range(3):
        for k in range(3):
            for s in range(m):
                allowed.add(sc.reduce_exponent(((1 << j) - 1 + (1 << k) - 1) << s, m))
    assert set(sc.t_poly(pq).terms) <= allowed


def test_congruence_on_known_map(m9_map, f9):
    d = subfield_dual(f9, 3)
    variant, prod, expected = sc.product_congruence(m9_map, d)
    assert variant == "vanishing" and prod.is_zero()
    flipped = flip_constant_trace(m9_map)
    variant, prod, expected = sc.product_congruence(flipped, d)
    assert variant == "delta" and prod == expected == sc.delta_at_zero(f9)


def test_congruence_fails_with_trace_condition():
    f = find_modulus(6)
    A = span(f, [1, 2, 4])
    d = dual_mus(A)
    a0 = next(v for v in range(1, f.q) if f.trace(v))
    for a1 in range(1, f.q):
        pq = PqMap.p1(f, (a0, a1), A)
        assert sc.product_congruence_check(pq, d) == check_trace_condition(pq).ok


def test_digit_weights():
    m = 6
    for i in range(m):
        assert sc.digit_weight(1 << i, m) == 1
    assert sc.digit_weight((1 << m) - 2, m) == m - 1
    assert sc.carry_count(3, 1, m) == 2
    with pytest.raises(ValueError):
        sc.carry_count(1, (1 << m) - 2, m)
