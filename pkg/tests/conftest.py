from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from maxarc.gf2m import find_modulus
from maxarc.pqmaps import subfield_kernel_map
from maxarc.search import SearchConfig, search_p1

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def f5():
    return find_modulus(5)


@pytest.fixture(scope="session")
def f9():
    return find_modulus(9)


@pytest.fixture(scope="session")
def m9_map():
    """p = x^7 + 1, q = 1 on the kernel of the relative trace to GF(8)."""
    return subfield_kernel_map(9, 3)


@pytest.fixture(scope="session")
def m5_sweep():
    """Every {p,1}-map hit over all 3-dimensional subgroups of GF(32)."""
    return search_p1(SearchConfig(m=5, d=3, strategy="exhaustive"))
