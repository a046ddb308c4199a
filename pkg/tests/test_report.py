from __future__ import annotations

from xml.etree import ElementTree

from coxdiag.coxeter import build_system
from coxdiag.io import parse
from coxdiag.planar import empty
from coxdiag.report import RenderSpec, render, stats

from conftest import cached_corpus
from test_planar import I3_PAIR, bi_pair


def test_stats_of_a_closed_braid_pair():
    rep = stats(bi_pair(3))
    assert (rep.V, rep.E) == (2, 6)
    assert rep.angles == {"uniform": 8, "varied": 4}
    assert rep.components[0].euler == 2 and rep.components[0].F == 6
    assert rep.vertex_types == {"1,2": 2}


def test_stats_dictionary():
    d = cached_corpus("A", 3, 1, 10, 3)[0]
    data = stats(d).as_dict()
    assert data["V"] == len(d.vertices) and data["E"] == d.num_edges()
    assert sum(data["vertex_types"].values()) == len(d.vertices)


def test_empty_stats_and_render():
    d = empty(build_system("A", 2))
    assert stats(d).V == 0
    ElementTree.fromstring(render(d))


def test_svg_is_well_formed():
    for d in (parse(I3_PAIR), bi_pair(4), cached_corpus("A", 4, 1, 12, 3)[0]):
        for layout in ("tutte", "force"):
            root = ElementTree.fromstring(render(d, RenderSpec(layout=layout)))
            assert root.tag.endswith("svg")


def test_dot_output():
    text = render(bi_pair(3), RenderSpec(format="dot")).decode()
    assert text.startswith("digraph") and text.count("->") == 6
    assert render(parse(I3_PAIR), RenderSpec(format="dot")).decode().count("--") == 6
