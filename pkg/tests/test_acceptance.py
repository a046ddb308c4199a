"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` (or ``python3 tests/test_acceptance.py``)
to see the lines as they are produced; a summary is also printed at the end
of every pytest session that ran them.
"""
from __future__ import annotations

import os
import random
import sys
import time
from itertools import product

sys.path.insert(0, os.path.dirname(__file__))

from coxdiag.coxeter import build_system, is_trivial_word, reduce_first_generator, reduced_words, rex_graph
from coxdiag.generate import corpus
from coxdiag.planar import boundary_word, classify_angles, cut_patch, euler_report, glue, validate
from coxdiag.reduce import find_adjacent_varied_angles, reduce, reduce_An, reduce_braid_dihedral, reduce_dihedral
from coxdiag.rules import template
from coxdiag.templates import commuting_template
from coxdiag.trace import TraceError, expand_macros, parse_trace, serialize_trace, verify_trace

from conftest import (INVOLUTIVE_RULES, PRIMITIVE_RULES, ZAM_WEIGHTS, grow_region, oracle_trivial,
                      perm_of_word_A, random_application, undo_exists)

RESULTS: dict[int, str] = {}

# I_m and BI_m diagrams go up to 40 vertices, A_n up to 24; targets allow +25%
WIDE_TARGETS = (8, 16, 24, 32)
A_TARGETS = (6, 12, 19)


def record(n: int, name: str, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS[n] = line
    print(line, flush=True)
    assert ok, line


def mixed_corpus(sys_, per: int, targets, seed: int, weights=None) -> list:
    out = []
    for k, t in enumerate(targets):
        share = per // len(targets) + (k < per % len(targets))
        out += corpus(sys_, share, t, seed + k, weights)
    return out


def run_family(fam: str, params, per: int, targets, fn, seed: int, extra=None):
    """(cases, failures, worst seconds including verification, max V)."""
    cases = fails = 0
    worst = 0.0
    maxv = 0
    for n in params:
        sys_ = build_system(fam, n)
        ds = mixed_corpus(sys_, per, targets, seed + 100 * n)
        for d in ds:
            cases += 1
            maxv = max(maxv, len(d.vertices))
            t = time.perf_counter()
            try:
                tr = fn(d)
                good = verify_trace(d, tr).ok and tr.final.startswith("empty:")
                if extra is not None:
                    good = good and extra(d, tr)
            except Exception:
                good = False
            worst = max(worst, time.perf_counter() - t)
            fails += not good
    return cases, fails, worst, maxv


# -- 1-3: reduction soundness -----------------------------------------------------------

def test_criterion_01_dihedral_soundness():
    cases, fails, worst, maxv = run_family("I", range(2, 11), 200, WIDE_TARGETS, reduce_dihedral, 1)
    record(1, "dihedral soundness", fails == 0 and worst < 1.0 and cases == 1800,
           f"{cases - fails}/{cases} reduced and verified, V<={maxv}, worst {worst:.3f}s (limit 1s)")


def test_criterion_02_a_family_soundness():
    cases = fails = certs = 0
    worst = 0.0
    maxv = 0
    for n in (2, 3, 4):
        sys_ = build_system("A", n)
        # half plain inflations, half rich in ZAM moves so certificate search is exercised
        ds = mixed_corpus(sys_, 50, A_TARGETS, 200 + n) + \
            mixed_corpus(sys_, 50, A_TARGETS, 300 + n, ZAM_WEIGHTS)
        for d in ds:
            cases += 1
            maxv = max(maxv, len(d.vertices))
            t = time.perf_counter()
            try:
                tr = reduce_An(d)
                good = verify_trace(d, tr).ok and tr.final.startswith("empty:")
                certs += any(st.certificate is not None for st in tr.steps)
            except Exception:
                good = False
            worst = max(worst, time.perf_counter() - t)
            fails += not good
    record(2, "A-family soundness", fails == 0 and worst < 30.0 and cases == 300 and maxv <= 24,
           f"{cases - fails}/{cases} reduced and verified ({certs} used certificates), V<={maxv}, "
           f"worst {worst:.3f}s (limit 30s)")


def test_criterion_03_braid_soundness():
    def halves(d, tr):
        return tr.count("delete_adjacent_pair", deep=False) == len(d.vertices) // 2

    cases, fails, worst, maxv = run_family("BI", range(2, 9), 200, WIDE_TARGETS, reduce_braid_dihedral,
                                           3, halves)
    record(3, "braid soundness", fails == 0 and worst < 1.0 and cases == 1400,
           f"{cases - fails}/{cases} reduced and verified with V/2 iterations, V<={maxv}, "
           f"worst {worst:.3f}s (limit 1s)")


# -- 4-5: oriented diagram facts -----------------------------------------------------------

def _bi_corpus():
    out = []
    for n in range(2, 9):
        out += [(n, d) for d in mixed_corpus(build_system("BI", n), 40, WIDE_TARGETS, 500 + n)]
    return out


def test_criterion_04_euler_identities():
    checked = bad = 0
    for n, d in _bi_corpus():
        checked += 1
        ok = True
        for rec in euler_report(d):
            ok &= rec.E == n * rec.V and rec.F == (n - 1) * rec.V + 2 and rec.chi == 2
        uniform = sum(1 for k in classify_angles(d).values() if k == "uniform")
        ok &= uniform == (2 * n - 2) * len(d.vertices)
        bad += not ok
    record(4, "Euler identities", bad == 0, f"{checked - bad}/{checked} diagrams satisfy E=nV, "
           f"F=(n-1)V+2 per component and uniform=(2n-2)V exactly")


def test_criterion_05_varied_angles():
    checked = found = 0
    for n, d in _bi_corpus():
        if not d.vertices:
            continue
        checked += 1
        found += find_adjacent_varied_angles(d) is not None
    record(5, "varied-angle existence", found == checked and checked > 0,
           f"adjacent varied corners found on {found}/{checked} nonempty diagrams")


# -- 6-7: word facts -------------------------------------------------------------------------

def test_criterion_06_first_generator():
    checked = bad = 0
    for n, max_len in ((3, 8), (4, 6)):
        sys_ = build_system("A", n)
        for L in range(max_len + 1):
            for w in product(range(1, n + 1), repeat=L):
                out = reduce_first_generator(sys_, w)
                checked += 1
                bad += out.count(1) > 1 or perm_of_word_A(n, out) != perm_of_word_A(n, w)
    record(6, "first-generator normal form", bad == 0,
           f"{checked - bad}/{checked} words (A3 up to length 8, A4 up to 6) correct")


def test_criterion_07_trivial_boundaries():
    rng = random.Random(7)
    pools = {(f, n): mixed_corpus(build_system(f, n), 30, (12, 20), 700 + n)
             for f, n in (("A", 3), ("A", 4), ("I", 5))}
    keys = sorted(pools)
    patches = bad = 0
    while patches < 500:
        d = rng.choice(pools[rng.choice(keys)])
        region = grow_region(d, rng, rng.randint(1, max(1, len(d.vertices) - 1)))
        if region is None:
            continue
        p = cut_patch(d, region)
        w = boundary_word(p)
        patches += 1
        bad += not (validate(p) == [] and oracle_trivial(d.system, w) and is_trivial_word(d.system, w))
    record(7, "trivial boundary words", bad == 0, f"{patches - bad}/{patches} cut patches have trivial boundary")


# -- 8-10: rules and templates ------------------------------------------------------------------

def test_criterion_08_rule_soundness():
    rng = random.Random(8)
    summary = []
    bad_total = 0
    for rule in PRIMITIVE_RULES:
        done = bad = 0
        while done < 1000:
            got = random_application(rng, rule)
            if got is None:
                continue
            d, site, out = got
            done += 1
            ok = validate(out) == [] and out.boundary_signature() == d.boundary_signature()
            if rule in INVOLUTIVE_RULES:
                ok = ok and undo_exists(d, out, rule, site)
            bad += not ok
        bad_total += bad
        summary.append(f"{rule} {done - bad}/{done}")
    record(8, "rule soundness", bad_total == 0, ", ".join(summary))


def test_criterion_09_template_soundness():
    lines = []
    ok = True
    pairs = [("A3", template(build_system("A", 3)))] + \
        [(f"A1xI{m}", commuting_template(m)) for m in range(2, 7)]
    for name, t in pairs:
        g = glue(t.side1, t.side2)
        try:
            tr = reduce(g)
            good = tr.final.startswith("empty:") and verify_trace(g, tr).ok
        except Exception:
            good = False
        ok &= good
        lines.append(f"{name} {'ok' if good else 'FAILED'}")
    record(9, "template soundness", ok, ", ".join(lines))


def test_criterion_10_rex_facts():
    a2, a3 = build_system("A", 2), build_system("A", 3)
    n2 = len(reduced_words(a2, a2.longest_element))
    n3 = len(reduced_words(a3, a3.longest_element))
    # brute force: all words of the right length mapping to the reversal
    brute = [sum(1 for w in product(range(1, n + 1), repeat=n * (n + 1) // 2)
                 if perm_of_word_A(n, w) == tuple(range(n, -1, -1))) for n in (2, 3)]
    connected = all(rex_graph(s, s.longest_element).is_connected()
                    for s in (a2, a3, build_system("A", 4), build_system("I", 7)))
    record(10, "rex-graph facts", (n2, n3) == (2, 16) == tuple(brute) and connected,
           f"A2 {n2} reduced words, A3 {n3} (brute force {brute[0]}, {brute[1]}); graphs connected: {connected}")


# -- 11: trace integrity --------------------------------------------------------------------------

def test_criterion_11_trace_integrity():
    rng = random.Random(11)
    jobs = []
    for fam, n, w in (("I", 5, None), ("BI", 4, None), ("A", 3, None), ("A", 4, ZAM_WEIGHTS)):
        jobs += corpus(build_system(fam, n), 25, 14, 1100 + n, w)
    verified = rejected = certs = 0
    for d in jobs:
        tr = reduce(d)
        certs += any(st.certificate is not None for st in tr.steps)
        flat = expand_macros(tr, d)
        data = serialize_trace(flat)
        verified += verify_trace(d, flat).ok and verify_trace(d, parse_trace(data)).ok
        pos = rng.randrange(len(data))
        bad = data[:pos] + bytes([data[pos] ^ (1 << rng.randrange(8))]) + data[pos + 1:]
        try:
            caught = not verify_trace(d, parse_trace(bad)).ok
        except TraceError:
            caught = True
        rejected += caught
    n = len(jobs)
    record(11, "trace integrity", verified == n and rejected == n and n == 100,
           f"{verified}/{n} expanded traces verify ({certs} with certificates), "
           f"{rejected}/{n} single-byte tampers rejected")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
