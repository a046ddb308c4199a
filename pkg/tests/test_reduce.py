from __future__ import annotations

import pytest

from coxdiag.coxeter import build_system
from coxdiag.io import parse
from coxdiag.planar import DiagramError, empty
from coxdiag.reduce import (BudgetExhausted, ReductionStuck, bfs_equivalence, choose_strategy,
                            find_adjacent_varied_angles, make_certificate, reduce, reduce_An,
                            reduce_braid_dihedral, reduce_dihedral, reduce_product)
from coxdiag.rules import cancel_create
from coxdiag.templates import commuting_template, product_a1_im
from coxdiag.trace import verify_trace

from conftest import cached_corpus
from test_planar import I3_PAIR, bi_pair


def test_empty_reduces_in_zero_steps():
    tr = reduce(empty(build_system("A", 3)))
    assert tr.steps == [] and tr.final == tr.initial


def test_open_patches_are_rejected():
    from test_planar import single_vertex_patch
    with pytest.raises(DiagramError):
        reduce(single_vertex_patch(build_system("A", 2)))


def test_closed_pair_is_one_iteration():
    tr = reduce_dihedral(parse(I3_PAIR))
    assert [s.rule for s in tr.steps] == ["delete_adjacent_pair"]


@pytest.mark.parametrize("m", [2, 3, 6, 10])
def test_dihedral_corpus(m):
    for d in cached_corpus("I", m, 8, 20, 1):
        tr = reduce_dihedral(d)
        assert tr.final.startswith("empty:")
        assert verify_trace(d, tr).ok


@pytest.mark.parametrize("m", [2, 3, 5, 8])
def test_braid_iterations_equal_half_the_vertices(m):
    for d in cached_corpus("BI", m, 8, 20, 1):
        V = len(d.vertices)
        tr = reduce_braid_dihedral(d)
        assert tr.count("delete_adjacent_pair", deep=False) == V // 2
        assert verify_trace(d, tr).ok


@pytest.mark.parametrize("m", [2, 3, 4, 6])
def test_varied_corners_exist_on_nonempty_braid_diagrams(m):
    for d in cached_corpus("BI", m, 10, 16, 6):
        assert find_adjacent_varied_angles(d) is not None


@pytest.mark.parametrize("n", [2, 3, 4])
def test_a_family_corpus(n):
    for d in cached_corpus("A", n, 6, 12, 8):
        tr = reduce_An(d)
        assert tr.final.startswith("empty:")
        assert verify_trace(d, tr).ok


def test_wrappers_check_their_systems():
    with pytest.raises(DiagramError):
        reduce_dihedral(bi_pair(3))
    with pytest.raises(DiagramError):
        reduce_braid_dihedral(parse(I3_PAIR))
    with pytest.raises(DiagramError):
        reduce_An(parse(I3_PAIR))


def test_product_reduction():
    t = commuting_template(4)
    from coxdiag.planar import glue
    g = glue(t.side1, t.side2)
    tr = reduce_product(g, {1, 2}, {3})
    assert verify_trace(g, tr).ok
    with pytest.raises(DiagramError):
        reduce_product(g, {1}, {2, 3})


def test_strategy_dispatch():
    assert choose_strategy(empty(build_system("A", 3))).name == "empty"
    assert choose_strategy(bi_pair(3)).name == "braid"
    assert choose_strategy(parse(I3_PAIR)).name == "dihedral"
    d = cancel_create(cancel_create(empty(build_system("A", 3)), 1, 2), 2, 3)
    assert choose_strategy(d).name == "achain"
    d = cancel_create(cancel_create(empty(product_a1_im(3)), 1, 2), 1, 3)
    assert choose_strategy(d).name == "free"


def test_budget_is_enforced():
    d = cached_corpus("A", 3, 3, 12, 8)[0]
    with pytest.raises(BudgetExhausted) as exc:
        reduce(d, budget=1)
    assert exc.value.partial is not None
    assert isinstance(exc.value, ReductionStuck)


def test_certificate_for_identical_patches():
    from test_planar import single_vertex_patch
    p = single_vertex_patch(build_system("A", 2))
    cert = make_certificate(p, p)
    from coxdiag.planar import glue
    assert verify_trace(glue(p, p), cert.trace).ok


def test_certificate_with_zero_budget_fails():
    t = commuting_template(3)
    with pytest.raises(ReductionStuck):
        from coxdiag.reduce import Budget
        make_certificate(t.side1, t.side2, Budget(0))


def test_bounded_search_finds_short_paths():
    d = cancel_create(empty(build_system("A", 3)), 1, 3)
    path = bfs_equivalence(d, lambda g: not g.vertices, budget=50)
    assert path == [("cancel_pair", (1, 2))]
    assert bfs_equivalence(parse(I3_PAIR), lambda g: False, budget=5) is None
