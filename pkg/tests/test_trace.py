from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coxdiag.coxeter import build_system
from coxdiag.io import parse
from coxdiag.planar import canonical_code, empty, glue
from coxdiag.reduce import reduce
from coxdiag.rules import delete_adjacent_pair
from coxdiag.trace import (Recorder, RewriteStep, Trace, TraceError, UnexpandableMacro, digest,
                           expand_macros, parse_trace, serialize_trace, verify_trace)

from conftest import cached_corpus

PATCH = ("group I 3\nvertex 1 1 2\nvertex 2 1 2\nedge 1.0 2.0\n"
         "boundary 1.1 1.2 1.3 1.4 1.5 2.1 2.2 2.3 2.4 2.5\n")


def resign(data: bytes) -> bytes:
    """Replace the digest line so only replay can catch an edit."""
    body = data[:data.rfind(b"digest ")]
    return body + f"digest {digest(body)}\n".encode()


@pytest.fixture(scope="module")
def pair_delete():
    g = glue(parse(PATCH), parse(PATCH))
    rec = Recorder(g)
    delete_adjacent_pair(rec, 1, 0, 2, 0)
    return g, rec.trace()


def test_empty_trace_on_empty_diagram():
    d = empty(build_system("A", 2))
    tr = Trace(canonical_code(d))
    assert verify_trace(d, tr).ok
    assert verify_trace(d, parse_trace(serialize_trace(tr))).ok


def test_single_delete_expands_to_five_bridges_and_a_cancel(pair_delete):
    g, tr = pair_delete
    flat = expand_macros(tr)
    assert [s.rule for s in flat.steps] == ["bridge"] * 5 + ["cancel_pair"]
    assert verify_trace(g, flat).ok


def test_primitive_traces_expand_to_themselves(pair_delete):
    g, tr = pair_delete
    flat = expand_macros(tr)
    assert [(s.rule, s.site) for s in expand_macros(flat).steps] == [(s.rule, s.site) for s in flat.steps]


@pytest.mark.parametrize("fam,n", [("A", 3), ("I", 5), ("BI", 3)])
def test_reducer_traces_round_trip(fam, n):
    for d in cached_corpus(fam, n, 5, 12, 4):
        tr = reduce(d)
        back = parse_trace(serialize_trace(tr))
        assert verify_trace(d, back).ok
        assert serialize_trace(back) == serialize_trace(tr)


def test_tampered_after_code_is_rejected_at_that_step():
    d = cached_corpus("I", 4, 3, 12, 4)[0]
    tr = reduce(d)
    k = len(tr.steps) // 2
    st = tr.steps[k]
    tr.steps[k] = RewriteStep(st.rule, st.site, st.before, "0" * len(st.after), st.expanded())
    res = verify_trace(d, tr)
    assert not res.ok and res.step.split("/")[0] == str(k)


def test_resigned_edit_is_caught_by_replay():
    d = cached_corpus("A", 3, 3, 10, 4)[0]
    text = serialize_trace(expand_macros(reduce(d), d)).decode().splitlines(keepends=True)
    k = next(n for n, line in enumerate(text) if line.startswith("step bridge"))
    toks = text[k].split(" ")
    toks[4] = "f" * len(toks[4].strip()) + "\n"
    text[k] = " ".join(toks)
    tr = parse_trace(resign("".join(text).encode()))
    assert not verify_trace(d, tr).ok


def test_digest_is_required():
    d = empty(build_system("A", 2))
    data = serialize_trace(Trace(canonical_code(d)))
    with pytest.raises(TraceError, match="missing digest"):
        parse_trace(data[:data.rfind(b"digest ")])
    with pytest.raises(TraceError, match="digest mismatch"):
        parse_trace(data.replace(b"trace empty", b"trace emptx"))


def test_non_utf8_is_rejected():
    with pytest.raises(TraceError):
        parse_trace(resign(b"trace \xff\xfe\nfinal x\ndigest 0\n"))


def test_malformed_lines_are_rejected():
    with pytest.raises(TraceError):
        parse_trace(resign(b"trace abc\nstep bridge [1,2\nfinal abc\ndigest 0\n"))
    with pytest.raises(TraceError):
        parse_trace(resign(b"trace abc\nfinal abc\nextra\ndigest 0\n"))


@pytest.fixture(scope="module")
def serialized_traces():
    out = []
    for fam, n in (("A", 3), ("I", 5), ("BI", 3)):
        for d in cached_corpus(fam, n, 4, 10, 12):
            out.append((d, serialize_trace(reduce(d))))
    return out


@given(st.integers(0, 10**9))
def test_single_byte_tampering_is_rejected(serialized_traces, seed):
    rng = random.Random(seed)
    d, data = rng.choice(serialized_traces)
    pos = rng.randrange(len(data))
    new = bytes([data[pos] ^ (1 << rng.randrange(8))])
    bad = data[:pos] + new + data[pos + 1:]
    try:
        tr = parse_trace(bad)
    except TraceError:
        return
    assert not verify_trace(d, tr).ok


def test_certificate_steps_need_the_initial_diagram():
    # a hand-made step whose certificate cannot be expanded without the host
    from coxdiag.reduce import make_certificate
    from coxdiag.templates import commuting_template
    t = commuting_template(2)
    cert = make_certificate(t.side1, t.side2)
    st = RewriteStep("patch_replace", ((1,), ()), "a", "b", certificate=cert)
    with pytest.raises(UnexpandableMacro):
        expand_macros(Trace("a", [st]))
