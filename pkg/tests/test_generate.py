from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coxdiag.coxeter import build_system
from coxdiag.generate import InflationPlan, corpus, inflate
from coxdiag.planar import canonical_code, validate
from coxdiag.reduce import reduce


@pytest.mark.parametrize("fam,n,size", [("A", 2, 10), ("A", 4, 18), ("I", 4, 30), ("BI", 5, 30)])
def test_sizes_stay_near_the_target(fam, n, size):
    ds = corpus(build_system(fam, n), 10, size, 4)
    for d in ds:
        assert 0.75 * size - 1 <= len(d.vertices) <= 1.25 * size + 1
        assert d.closed and validate(d) == []


def test_same_seed_same_corpus():
    sys = build_system("A", 3)
    a = [canonical_code(d) for d in corpus(sys, 5, 10, 99)]
    b = [canonical_code(d) for d in corpus(sys, 5, 10, 99)]
    assert a == b
    assert a != [canonical_code(d) for d in corpus(sys, 5, 10, 100)]


def test_size_zero_gives_empty_diagrams():
    ds = corpus(build_system("I", 3), 3, 0, 1)
    assert all(not d.vertices for d in ds)


def test_bad_plans_are_rejected():
    with pytest.raises(ValueError):
        InflationPlan(1, 10, {"bridge": 0.0})
    with pytest.raises(ValueError):
        InflationPlan(1, 10, {"bridge": -1.0, "insert_pair": 1.0})
    with pytest.raises(ValueError):
        corpus(build_system("A", 2), 0, 5, 1)


def test_oriented_inflation_skips_the_a3_move():
    d = inflate(build_system("BI", 3), InflationPlan(3, 40, {"zam_a3": 1.0, "insert_pair": 1.0}))
    assert validate(d) == []


@given(st.sampled_from([("A", 3), ("I", 6), ("BI", 3)]), st.integers(0, 2**32))
def test_inflated_diagrams_reduce(group, seed):
    sys = build_system(*group)
    d = inflate(sys, InflationPlan(seed, 12), max_vertices=14)
    assert validate(d) == []
    assert reduce(d).final.startswith("empty:")
