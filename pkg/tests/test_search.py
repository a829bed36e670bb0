from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from maxarc.gf2m import find_modulus
from maxarc.pqmaps import PqMap, check_trace_condition, is_denniston_form, relative_trace_kernel
from maxarc.search import (
    SearchConfig, SearchRangeError, _arith, _fiber_trial, _random_subgroup,
    exhaustive_cost, falsify_theorem_p1, falsify_theorem_pq, gaussian_binomial,
    search_p1, search_pq,
)
from maxarc.subspaces import enumerate_subspaces, span


def test_gaussian_binomial():
    assert [gaussian_binomial(4, d) for d in range(5)] == [1, 15, 35, 15, 1]
    assert gaussian_binomial(5, 3) == 155
    assert gaussian_binomial(5, 7) == 0


def test_cost_gate():
    cfg = SearchConfig(m=5, d=4, mode="pq")
    assert exhaustive_cost(cfg) > 10**10
    with pytest.raises(SearchRangeError):
        search_pq(cfg)
    with pytest.raises(SearchRangeError):
        search_p1(SearchConfig(m=8, d=3))
    with pytest.raises(SearchRangeError):
        search_p1(SearchConfig(m=5, d=6))
    with pytest.raises(SearchRangeError):
        search_p1(SearchConfig(m=5, d=3, mode="pq"))


def test_m5_sweep_counts(m5_sweep):
    assert m5_sweep.subgroups == 155
    assert len(m5_sweep.hits) == 39680
    assert len(m5_sweep.non_denniston) == 29760
    s = m5_sweep.summary()
    assert s["hits"] == 39680 and s["counterexamples"] == 0


def test_sweep_hits_pass_trace_condition(m5_sweep):
    rng = random.Random(0)
    for pq in rng.sample(m5_sweep.hits, 500):
        assert check_trace_condition(pq).ok
    flags = dict(zip(map(id, m5_sweep.hits), m5_sweep.denniston))
    for pq in rng.sample(m5_sweep.hits, 200):
        assert flags[id(pq)] == is_denniston_form(pq)


def test_exhaustive_matches_brute_force_small():
    f = find_modulus(4)
    for A in enumerate_subspaces(f, 2):
        got = {pq.a for pq in search_p1(SearchConfig(m=4, d=2, subgroup=A)).hits}
        want = {
            (a0, a1) for a0, a1 in itertools.product(range(16), repeat=2)
            if check_trace_condition(PqMap.p1(f, (a0, a1), A)).ok
        }
        assert got == want


def test_whole_field_boundary():
    res = search_p1(SearchConfig(m=3, d=3))
    assert res.subgroups == 1
    for pq in res.hits:
        assert all(pq.field.trace(pq.p(x)) for x in range(1, 8))


def test_linear_only_hits_are_denniston():
    res = search_p1(SearchConfig(m=5, d=3, linear_only=True))
    assert res.hits and all(res.denniston)
    rnd = search_pq(SearchConfig(m=5, d=3, mode="pq", strategy="random", trials=3000,
                                 seed=2, linear_only=True))
    assert rnd.hits and all(rnd.denniston)


def test_m9_subgroup_binary_search():
    f = find_modulus(9)
    A = relative_trace_kernel(f, 3)
    res = search_p1(SearchConfig(m=9, d=6, subgroup=A, domain="binary"))
    assert (1, 0, 0, 1, 0, 0) in [pq.a for pq in res.hits]
    assert not all(res.denniston)


def test_pq_random_hits():
    f = find_modulus(5)
    A = span(f, [1, 2, 4])
    res = search_pq(SearchConfig(m=5, d=3, mode="pq", strategy="random", trials=3000,
                                 seed=1, subgroup=A))
    assert res.hits
    assert all(check_trace_condition(pq).ok for pq in res.hits)


def test_random_search_deterministic_across_workers():
    base = dict(m=5, d=3, mode="pq", strategy="random", trials=2500, seed=9)
    r1 = search_pq(SearchConfig(**base, workers=1))
    r2 = search_pq(SearchConfig(**base, workers=2))
    r3 = search_pq(SearchConfig(**base, workers=1))
    assert r1.hits == r2.hits == r3.hits
    other = search_pq(SearchConfig(**base | {"seed": 10}))
    assert other.hits != r1.hits


def test_max_hits_truncates():
    res = search_p1(SearchConfig(m=5, d=3, max_hits=10))
    assert len(res.hits) == 10 and res.truncated


def test_fiber_solver_matches_brute_force():
    f = find_modulus(5)
    ar = _arith(f)
    rng = np.random.default_rng(3)
    for trial in range(150):
        d = 3
        A = _random_subgroup(f, d, rng)
        high = [int(rng.integers(0, 32))]
        b = [1, 0, 0] if trial % 2 else [int(v) for v in rng.integers(0, 32, size=3)]
        sol = _fiber_trial(f, ar, A, high, b)
        brute = [
            (a0, a1) for a0 in range(32) for a1 in range(32)
            if check_trace_condition(PqMap(f, (a0, a1, *high), tuple(b), A)).ok
        ]
        if brute:
            assert sol is not None and sol in brute
        else:
            assert sol is None


def test_falsify_ranges():
    for m, d in [(4, 3), (9, 6), (7, 4), (7, 7)]:
        with pytest.raises(SearchRangeError):
            falsify_theorem_p1(m, d, 10, 0)
    for m, d in [(6, 5), (7, 5), (9, 8)]:
        with pytest.raises(SearchRangeError):
            falsify_theorem_pq(m, d, 10, 0)


@pytest.mark.parametrize("method", ["fiber", "plain"])
def test_falsify_small_budget(method):
    res = falsify_theorem_p1(6, 5, 10_000 if method == "fiber" else 3000, 0, method=method)
    assert res.counterexample is None
    assert res.summary()["counterexamples"] == 0


def test_falsify_detects_planted_counterexample_at_m9():
    """At m = 9 nonlinear maps exist, so the fiber solver must be able to find them."""
    f = find_modulus(9)
    A = relative_trace_kernel(f, 3)
    sol = _fiber_trial(f, _arith(f), A, [0, 1, 0, 0], [1, 0, 0, 0, 0, 0])
    assert sol is not None
    pq = PqMap.p1(f, (sol[0], sol[1], 0, 1, 0, 0), A)
    assert check_trace_condition(pq).ok and not is_denniston_form(pq)


def test_falsify_deterministic_across_workers():
    a = falsify_theorem_pq(7, 6, 3000, 5, workers=1)
    b = falsify_theorem_pq(7, 6, 3000, 5, workers=2)
    assert a.counterexample is None and b.counterexample is None
    assert a.summary() | {"wall_time": 0} == b.summary() | {"wall_time": 0}
