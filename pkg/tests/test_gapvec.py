from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from maxarc.gapvec import (
    GapVector, GapVectorRefusal, SpanState, check_gap_vector, consecutive_run_max,
    gap_vector_bruteforce, gap_vector_constructive, lambda_dim, nested_sequence_probe,
)
from maxarc.gf2m import find_modulus
from maxarc.pqmaps import subfield_dual
from maxarc.subspaces import rank


def random_state(m, r, rng):
    f = find_modulus(m)
    while True:
        mus = [rng.randrange(1, f.q) for _ in range(r)]
        if rank(mus) == r:
            return SpanState(f, mus)


def exhaustive_feasible(st, t):
    """Any 0 = i_1 < ... < i_r <= m - t - 3 with runs < t and independent vectors."""
    top = st.m - t - 3
    for rest in itertools.combinations(range(1, top + 1), st.r - 1):
        w = GapVector.from_indices((0,) + rest)
        if consecutive_run_max(w) <= t - 1 and st.rank(w.indices) == st.r:
            return True
    return False


def test_run_lengths():
    assert consecutive_run_max(()) == 0
    assert consecutive_run_max((0, 0, 0)) == 0
    assert consecutive_run_max((1, 1, 0, 1)) == 2
    t = 4
    assert consecutive_run_max((0, 1, 1, 1) * 3) == t - 1


def test_lambda_dim_basics():
    st_ = random_state(11, 4, random.Random(0))
    assert lambda_dim(st_, (1, 1, 1, 1)) == 4
    assert lambda_dim(st_, (0,) * 8) == 0
    # index m wraps to index 0
    assert lambda_dim(st_, [1] + [0] * 10 + [1]) == lambda_dim(st_, [1])
    assert st_.v(11) == st_.v(0)


def test_consecutive_vectors_independent():
    rng = random.Random(1)
    for _ in range(30):
        m = rng.randrange(8, 15)
        r = rng.randrange(2, 6)
        st_ = random_state(m, r, rng)
        i = rng.randrange(m)
        assert st_.rank(list(range(i, i + r))) == r


def test_dependent_mus_rejected():
    f = find_modulus(10)
    with pytest.raises(ValueError):
        SpanState(f, (3, 5, 6))


@pytest.mark.parametrize("m", [9, 11, 13])
def test_bruteforce_tight_case(m):
    r = (m - 3) // 2
    rng = random.Random(m)
    for _ in range(50):
        st_ = random_state(m, r, rng)
        w = gap_vector_bruteforce(st_, r)
        assert w is not None and check_gap_vector(st_, r, w)


def test_bruteforce_is_lexicographic_minimum():
    rng = random.Random(2)
    for _ in range(10):
        st_ = random_state(12, 4, rng)
        w = gap_vector_bruteforce(st_, 3)
        top = 12 - 3 - 3
        for rest in itertools.combinations(range(1, top + 1), 3):
            idx = (0,) + rest
            if idx == w.indices:
                break
            cand = GapVector.from_indices(idx)
            assert consecutive_run_max(cand) > 2 or st_.det(idx) == 0


def test_subfield_configuration_at_m9_has_no_vector():
    f = find_modulus(9)
    st_ = SpanState(f, subfield_dual(f, 3).mus)
    assert gap_vector_bruteforce(st_, 3) is None
    assert not exhaustive_feasible(st_, 3)
    with pytest.raises(GapVectorRefusal):
        gap_vector_constructive(st_, 3)


def test_subfield_configuration_at_m10_found():
    f = find_modulus(10)
    # mu's spanning GF(4) inside GF(2^10), completed by one more element
    mus = subfield_dual(f, 2).mus + (f.generator,)
    st_ = SpanState(f, mus)
    assert gap_vector_bruteforce(st_, 3) is not None
    assert check_gap_vector(st_, 3, gap_vector_constructive(st_, 3))


def test_run_bound_out_of_contract():
    st_ = random_state(12, 3, random.Random(3))
    with pytest.raises(ValueError):
        gap_vector_bruteforce(st_, 4)
    with pytest.raises(ValueError):
        gap_vector_bruteforce(st_, 2)


def test_bruteforce_cap():
    st_ = random_state(14, 5, random.Random(4))
    with pytest.raises(OverflowError):
        gap_vector_bruteforce(st_, 3, cap=10)


def test_constructive_m10():
    rng = random.Random(5)
    for _ in range(30):
        st_ = random_state(10, 3, rng)
        w = gap_vector_constructive(st_, 3)
        assert check_gap_vector(st_, 3, w)
        assert gap_vector_bruteforce(st_, 3) is not None


def test_constructive_subfield_orbit_m12():
    f = find_modulus(12)
    st_ = SpanState(f, subfield_dual(f, 4).mus)
    w = gap_vector_constructive(st_, 4)
    assert check_gap_vector(st_, 4, w)
    assert gap_vector_bruteforce(st_, 4) is not None


@pytest.mark.parametrize("m,r,t", [(12, 3, 3), (13, 4, 3), (14, 3, 3), (14, 4, 4)])
def test_constructive_projected(m, r, t):
    rng = random.Random(m * 10 + r)
    for _ in range(10):
        st_ = random_state(m, r, rng)
        w = gap_vector_constructive(st_, t)
        assert w.branch.endswith(",projected")
        assert check_gap_vector(st_, t, w)


def test_refusals():
    st_ = random_state(10, 4, random.Random(6))
    with pytest.raises(GapVectorRefusal):
        gap_vector_constructive(st_, 3)
    with pytest.raises(GapVectorRefusal):
        gap_vector_constructive(random_state(9, 3, random.Random(7)), 3)


def test_nested_probe_properties():
    rng = random.Random(8)
    for _ in range(100):
        m = rng.randrange(10, 15)
        R = (m - 3) // 2
        st_ = random_state(m, R, rng)
        t = rng.randrange(3, R + 1)
        k, a = divmod(R, t)
        dims = nested_sequence_probe(st_, t, k, a, steps=k + 2)
        assert dims[0] == R - k
        assert dims == sorted(dims) and dims[-1] <= R
        for i in range(len(dims) - 1):
            if dims[i] == dims[i + 1]:
                assert all(d == dims[i] for d in dims[i:])
                break


def test_single_increment_propagates():
    """A one-step increase is explained by one new vector of the next period."""
    rng = random.Random(9)
    checked = 0
    for _ in range(40):
        m = 12
        st_ = random_state(m, 4, rng)
        t, k, a = 3, 1, 1
        dims = nested_sequence_probe(st_, t, k, a, steps=2)
        for b in range(len(dims) - 1):
            if dims[b + 1] == dims[b] + 1:
                base = [i for i, bit in enumerate((1,) + (0, 1, 1) * (k + b)) if bit]
                new = [base[-1] + 1 + s for s in range(1, t)]
                gained = [j for j in new if not st_.in_span(j, base)]
                assert gained
                checked += 1
    assert checked


@given(st.integers(0, 2**31))
def test_constructive_matches_conditions(seed):
    rng = random.Random(seed)
    m = rng.randrange(10, 15)
    r = (m - 3) // 2
    t = rng.randrange(3, r + 1)
    st_ = random_state(m, r, rng)
    w = gap_vector_constructive(st_, t)
    assert check_gap_vector(st_, t, w)
    assert w.indices[0] == 0 and len(w.indices) == r


def test_check_rejects_bad_vectors():
    st_ = random_state(12, 4, random.Random(10))
    w = gap_vector_bruteforce(st_, 3)
    assert check_gap_vector(st_, 3, w)
    shifted = GapVector.from_indices(tuple(i + 1 for i in w.indices))
    assert not check_gap_vector(st_, 3, shifted)
    assert not check_gap_vector(st_, 3, GapVector.from_indices((0, 1, 2, 4)))
    assert not check_gap_vector(st_, 3, GapVector.from_indices((0, 2, 4)))
