from __future__ import annotations

import random

import pytest

from coxdiag.coxeter import build_system
from coxdiag.planar import canonical_code, glue, validate
from coxdiag.reduce import reduce
from coxdiag.rules import PRIMITIVES
from coxdiag.templates import commuting_template
from coxdiag.expand import double_reduction, extend_map
from coxdiag.trace import expand_macros, parse_trace, serialize_trace, verify_trace

from conftest import cached_corpus, hard_diagram


def _all_primitive(tr) -> bool:
    return all(st.rule in PRIMITIVES and not st.is_macro for st in tr.steps)


@pytest.mark.parametrize("fam,n", [("I", 5), ("BI", 4), ("A", 3), ("A", 4)])
def test_expanded_corpus_traces_verify(fam, n):
    for d in cached_corpus(fam, n, 5, 12, 30):
        flat = expand_macros(reduce(d), d)
        assert _all_primitive(flat)
        assert verify_trace(d, flat).ok
        assert verify_trace(d, parse_trace(serialize_trace(flat))).ok


@pytest.mark.parametrize("n,length,seed", [(4, 5, 2), (4, 6, 3), (5, 5, 4)])
def test_certificate_steps_expand(n, length, seed):
    rng = random.Random(seed)
    sys = build_system("A", n)
    found = 0
    for _ in range(6):
        d = hard_diagram(sys, length, rng)
        tr = reduce(d)
        found += any(st.certificate is not None for st in tr.steps)
        flat = expand_macros(tr, d)
        assert _all_primitive(flat)
        assert verify_trace(d, flat).ok
    assert found


def test_doubled_patch_reduces():
    t = commuting_template(3)
    stages, steps = double_reduction(t.side1)
    assert not stages[-1].vertices
    assert len(stages) == len(steps) + 1


def test_vertex_map_of_a_relabelled_diagram():
    d = cached_corpus("A", 3, 2, 10, 30)[0]
    from coxdiag.planar import relabel
    e = relabel(d, random.Random(1))
    phi = extend_map(d, e, {}, set(e.vertices))
    assert phi is not None and len(phi) == len(d.vertices)


def test_expansion_keeps_the_endpoints():
    t = commuting_template(4)
    g = glue(t.side1, t.side2)
    tr = reduce(g)
    flat = expand_macros(tr, g)
    assert flat.initial == canonical_code(g) and flat.final == tr.final
    assert validate(g) == []
