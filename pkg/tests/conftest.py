from __future__ import annotations

import os
import sys
from functools import lru_cache

from hypothesis import HealthCheck, settings

from coxdiag.coxeter import build_system
from coxdiag.generate import corpus

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# -- independent group oracles ----------------------------------------------------------
# These do not use coxdiag.coxeter; they act on explicit models of the groups.

def perm_of_word_A(n: int, word) -> tuple[int, ...]:
    """Generator i of A_n swaps positions i-1 and i of a list of n+1 items."""
    p = list(range(n + 1))
    for s in word:
        p[s - 1], p[s] = p[s], p[s - 1]
    return tuple(p)


def dihedral_of_word(m: int, word) -> tuple[int, int]:
    """Element of the dihedral group of order 2m as (rotation, reflected)."""
    rot, ref = 0, 0
    for s in word:
        # generator 1 is the reflection r0, generator 2 the reflection r1 = rotate . r0
        g = (0, 1) if s == 1 else (1, 1)
        # compose (rot, ref) * g
        if ref:
            rot, ref = (rot - g[0]) % m, ref ^ g[1]
        else:
            rot, ref = (rot + g[0]) % m, ref ^ g[1]
    return rot, ref


def oracle_trivial(sys, word) -> bool:
    if sys.family == "A":
        return perm_of_word_A(sys.rank, word) == tuple(range(sys.rank + 1))
    if sys.family == "I":
        return dihedral_of_word(sys.m(1, 2), word) == (0, 0)
    raise ValueError("no oracle for this family")


@lru_cache(maxsize=None)
def cached_corpus(family: str, n: int, count: int, size: int, seed: int):
    return tuple(corpus(build_system(family, n), count, size, seed))


def grow_region(d, rng, size: int):
    """A connected vertex set grown from a random seed; None when it is not a disc."""
    from coxdiag.planar import DiagramError, region_from_vertices
    if not d.vertices:
        return None
    start = rng.choice(sorted(d.vertices))
    S = {start}
    while len(S) < size:
        nbrs = sorted({d.alpha[x][0] for v in S for x in d.darts_of(v)} - S - {0})
        if not nbrs:
            break
        S.add(rng.choice(nbrs))
    try:
        return region_from_vertices(d, S)
    except DiagramError:
        return None


PRIMITIVE_RULES = ("circle_add", "circle_remove", "bridge", "cancel_pair", "cancel_create",
                   "zam_commuting", "zam_a3")
INVOLUTIVE_RULES = ("bridge", "zam_commuting", "zam_a3")
SOUNDNESS_POOLS = (("A", 3, 10), ("A", 4, 10), ("I", 5, 10), ("BI", 3, 10), ("BI", 4, 8))


ZAM_WEIGHTS = {"add_circle": 0.1, "insert_pair": 0.5, "bridge": 0.2,
               "zam_commuting": 0.2, "zam_a3": 0.2}


@lru_cache(maxsize=None)
def zam_hosts() -> tuple:
    """Diagrams rich in ZAM sites: template sides and ZAM-heavy inflations."""
    from coxdiag.planar import glue
    from coxdiag.rules import template
    from coxdiag.templates import commuting_template
    out = []
    for m in range(2, 6):
        t = commuting_template(m)
        out += [t.side1, t.side2, glue(t.side1, t.side1)]
    t = template(build_system("A", 3))
    out += [t.side1, glue(t.side1, t.side1)]
    for n in (3, 4):
        out += corpus(build_system("A", n), 15, 10, 5, weights=ZAM_WEIGHTS)
    out += [h for h in a3_hosts() if h.vertices]
    return tuple(out)


@lru_cache(maxsize=None)
def a3_hosts(count: int = 16) -> tuple:
    """Corpus diagrams joined by a few bridges to a closed copy of the small A3 side."""
    import random
    from coxdiag.planar import disjoint_union, glue
    from coxdiag.rules import apply_primitive, find_matches, template
    rng = random.Random(17)
    out = []
    for k in range(count):
        sys = build_system("A", 3 + k % 2)
        t = template(sys, rng.randrange(sys.rank - 2))
        d, _ = disjoint_union(rng.choice(cached_corpus("A", sys.rank, 30, 8, 21)),
                              glue(t.side1, t.side1))
        for _ in range(3):
            nxt = apply_primitive(d, "bridge", rng.choice(find_matches(d, "bridge")))
            if find_matches(nxt, "zam_a3"):
                d = nxt
        out.append(d)
    return tuple(out)


def random_host(rng, rule: str = "", patch_prob: float = 0.4):
    """A corpus diagram, or a disc cut out of one."""
    if rule == "zam_a3" and rng.random() < 0.7:
        d = rng.choice(a3_hosts())
    elif rule.startswith("zam") and rng.random() < 0.7:
        d = rng.choice(zam_hosts())
    else:
        fam, n, size = rng.choice(SOUNDNESS_POOLS)
        d = rng.choice(cached_corpus(fam, n, 30, size, 21))
    if rng.random() < patch_prob and len(d.vertices) > 2:
        from coxdiag.planar import cut_patch
        region = grow_region(d, rng, rng.randint(2, min(8, len(d.vertices) - 1)))
        if region is not None:
            return cut_patch(d, region)
    return d


def random_application(rng, rule: str, tries: int = 30):
    """(host, site, result) for one random application of ``rule``, or None."""
    from coxdiag.rules import apply_primitive, find_matches
    for _ in range(tries):
        d = random_host(rng, rule)
        if rule == "cancel_pair" and rng.random() < 0.7:
            # closed pairs rarely survive in the corpus; make one
            from coxdiag.rules import cancel_create
            kinds = (1, 2) if d.oriented else (0,)
            i, j = rng.choice([(i, j) for i in d.system.generators for j in d.system.generators
                               if i < j])
            d = cancel_create(d, i, j, rng.choice(kinds))
        sites = find_matches(d, rule)
        if not sites:
            continue
        site = rng.choice(sites)
        return d, site, apply_primitive(d, rule, site)
    return None


def undo_exists(before, after, rule: str, site: tuple = ()) -> bool:
    """Some application of ``rule`` to ``after`` gives back ``before``."""
    from coxdiag.planar import canonical_code
    from coxdiag.rules import RuleError, apply_primitive, find_matches
    goal = canonical_code(before)
    if rule == "zam_a3":
        return _undo_template(before, after, site, goal)
    for site in find_matches(after, rule):
        try:
            if canonical_code(apply_primitive(after, rule, site)) == goal:
                return True
        except RuleError:
            continue
    return False


def _undo_template(before, after, site, goal: str) -> bool:
    """Match the template on the vertices that replaced the forward site's inside."""
    from coxdiag.planar import canonical_code
    from coxdiag.rules import DiagramError, match_template, zam_a3
    outside = set(before.vertices) - set(site[3:])
    inside = tuple(sorted(set(after.vertices) - outside))
    try:
        hit = match_template(after, inside, site[0])
    except DiagramError:
        return False
    return bool(hit) and canonical_code(zam_a3(after, site[0], hit[0], hit[1], *inside)) == goal


def hard_diagram(sys, length: int, rng):
    """Closed diagram from two fillings of a trivial word; the greedy pass alone rarely finishes it."""
    from coxdiag.coxeter import braid_moves
    from coxdiag.patches import fill_word
    from coxdiag.planar import glue, rotate_ports
    u1 = tuple(rng.choice(list(sys.generators)) for _ in range(length))
    u2 = u1
    for _ in range(3 * length):
        r = rng.random()
        if r < 0.6:
            mv = braid_moves(sys, u2)
            if mv:
                u2 = rng.choice(mv)[0]
        elif r < 0.8:
            k = rng.randrange(len(u2) + 1)
            s = rng.choice(list(sys.generators))
            u2 = u2[:k] + (s, s) + u2[k:]
        else:
            ks = [k for k in range(len(u2) - 1) if u2[k] == u2[k + 1]]
            if ks:
                k = rng.choice(ks)
                u2 = u2[:k] + u2[k + 2:]
    w = u1 + u2[::-1]
    P, _ = fill_word(sys, w)
    r = rng.randrange(len(w))
    Q, _ = fill_word(sys, w[r:] + w[:r])
    return glue(P, rotate_ports(Q, -r))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
