from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coxdiag.coxeter import (CoxeterError, all_words, alternating, braid_moves, build_system,
                             explicit_system, is_trivial_word, product_system, reduce_first_generator,
                             reduced_words, rex_graph, word_to_element)

from conftest import dihedral_of_word, oracle_trivial, perm_of_word_A


def words(n_gens: int, max_len: int):
    return st.lists(st.integers(1, n_gens), max_size=max_len).map(tuple)


def test_exponents_of_families():
    a4 = build_system("A", 4)
    assert a4.m(1, 2) == 3 and a4.m(1, 3) == 2 and a4.m(2, 2) == 1
    assert build_system("I", 7).m(1, 2) == 7
    bi = build_system("BI", 3)
    assert bi.oriented and bi.m(2, 1) == 3


@pytest.mark.parametrize("fam,n", [("A", 0), ("I", 1), ("Q", 3)])
def test_bad_families_are_rejected(fam, n):
    with pytest.raises(CoxeterError):
        build_system(fam, n)


def test_explicit_matrix_must_be_symmetric():
    with pytest.raises(CoxeterError):
        explicit_system([[1, 3], [2, 1]])


def test_group_orders():
    assert build_system("A", 3).order() == 24
    assert build_system("I", 5).order() == 10
    assert product_system(build_system("A", 1), build_system("I", 4)).order() == 16


@given(words(3, 10))
def test_triviality_matches_permutation_model(w):
    assert is_trivial_word(build_system("A", 3), w) == oracle_trivial(build_system("A", 3), w)


@given(st.integers(2, 10), words(2, 14))
def test_triviality_matches_dihedral_model(m, w):
    sys = build_system("I", m)
    assert is_trivial_word(sys, w) == (dihedral_of_word(m, w) == (0, 0))


@given(words(3, 8), words(3, 8))
def test_equal_elements_agree_with_model(u, v):
    sys = build_system("A", 3)
    same = word_to_element(sys, u) == word_to_element(sys, v)
    assert same == (perm_of_word_A(3, u) == perm_of_word_A(3, v))


def test_alternating_relation_is_trivial():
    for m in range(2, 9):
        sys = build_system("I", m)
        assert is_trivial_word(sys, alternating(1, 2, 2 * m))
        assert not is_trivial_word(sys, alternating(1, 2, 2 * m - 2))


def _brute_reduced_count(n: int) -> int:
    """Reduced words of the longest element of S_{n+1}: words of length n(n+1)/2 giving the reversal."""
    target = tuple(range(n, -1, -1))
    L = n * (n + 1) // 2
    return sum(1 for w in product(range(1, n + 1), repeat=L) if perm_of_word_A(n, w) == target)


@pytest.mark.parametrize("n", [2, 3])
def test_reduced_word_counts_of_longest_element(n):
    sys = build_system("A", n)
    got = reduced_words(sys, sys.longest_element)
    assert len(got) == _brute_reduced_count(n)


def test_rex_graphs_are_connected():
    for sys in (build_system("A", 2), build_system("A", 3), build_system("I", 5)):
        g = rex_graph(sys, sys.longest_element)
        assert g.is_connected()


def test_braid_moves_preserve_the_element():
    sys = build_system("A", 3)
    for w in reduced_words(sys, sys.longest_element):
        for w2, mv in braid_moves(sys, w):
            assert word_to_element(sys, w2) == word_to_element(sys, w)
            assert w2 != w


def test_all_words_counts():
    assert sum(1 for _ in all_words(build_system("A", 2), 3)) == 1 + 2 + 4 + 8


@pytest.mark.parametrize("n,max_len", [(3, 6), (4, 4)])
def test_first_generator_normal_form_small(n, max_len):
    sys = build_system("A", n)
    for w in all_words(sys, max_len):
        out = reduce_first_generator(sys, w)
        assert out.count(1) <= 1
        assert perm_of_word_A(n, out) == perm_of_word_A(n, w)


@given(words(4, 12))
def test_first_generator_normal_form_random(w):
    sys = build_system("A", 4)
    out = reduce_first_generator(sys, w)
    assert out.count(1) <= 1
    assert perm_of_word_A(4, out) == perm_of_word_A(4, w)
