"""Random closed diagrams that are trivial by construction.

Starting from the empty diagram we apply moves whose inverses the reducer
knows: add a circle, subdivide an edge (or consume a circle) with a
canceling pair, bridge, and ZAM moves.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .coxeter import CoxeterSystem
from .planar import BOUNDARY, Diagram, DiagramError, empty, face_index
from .rules import (ORIENT_CODES, RuleError, bridge_ok, bridge_site, insert_adjacent_pair,
                    insertion_choices, match_template, zam_commuting_sites)
from .trace import Recorder

DEFAULT_WEIGHTS = {"add_circle": 0.1, "insert_pair": 0.5, "bridge": 0.3,
                   "zam_commuting": 0.05, "zam_a3": 0.05}


@dataclass
class InflationPlan:
    seed: int
    steps: int
    weights: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        if not any(w > 0 for w in self.weights.values()):
            raise ValueError("weights must not all be zero")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be non-negative")


def vertex_types(sys: CoxeterSystem) -> list[tuple[int, int]]:
    return [(i, j) for i in sys.generators for j in sys.generators
            if i < j and sys.m(i, j) != 0]


def _circle_orient(sys: CoxeterSystem, rng: random.Random) -> int:
    return rng.choice((1, 2)) if sys.oriented else 0


def _try_move(rec: Recorder, move: str, rng: random.Random) -> bool:
    d = rec.d
    sys = d.system
    if move == "add_circle":
        rec.apply("circle_add", rng.choice(list(sys.generators)), _circle_orient(sys, rng))
        return True
    if move == "insert_pair":
        circles = [k for k, n in sorted(d.circles.items(), key=str) for _ in range(n)]
        edges = [x for x in sorted(d.alpha) if x[0] != BOUNDARY]
        pool = len(edges) // 2 + len(circles)
        if not pool:
            return False
        r = rng.randrange(pool)
        if r < len(circles):
            c, o = circles[r]
            x = (-c, ORIENT_CODES[o])
            color = c
        else:
            x = rng.choice(edges)
            color = d.color(x)
        types = [t for t in vertex_types(sys) if color in t]
        if not types:
            return False
        i, j = rng.choice(types)
        if x[0] < 0:
            kind = rng.choice((1, 2)) if sys.oriented else 0
            t = 0 if color == i else 1
            insert_adjacent_pair(rec, x, i, j, t, kind)
            return True
        choices = insertion_choices(d, x, i, j)
        if not choices:
            return False
        t, kind = rng.choice(choices)
        insert_adjacent_pair(rec, x, i, j, t, kind)
        return True
    if move == "bridge":
        darts = [x for x in sorted(d.alpha) if x[0] != BOUNDARY]
        if len(darts) < 2:
            return False
        x1 = rng.choice(darts)
        fidx = face_index(d)
        comp_of = {}
        for n, comp in enumerate(d.components()):
            for v in comp:
                comp_of[v] = n
        cands = [x3 for x3 in darts if x3 != x1 and x3 != d.alpha[x1]
                 and d.color(x3) == d.color(x1)
                 and (fidx[x3] == fidx[x1] or comp_of[x3[0]] != comp_of[x1[0]])
                 and (not d.oriented or d.is_out(x3) == d.is_out(x1))]
        if not cands:
            return False
        x3 = rng.choice(cands)
        if bridge_ok(d, x1, x3, fidx):
            return False
        try:
            rec.apply("bridge", *bridge_site(x1, x3))
        except RuleError:
            return False
        return True
    if move == "zam_commuting":
        if sys.oriented:
            return False
        sites = zam_commuting_sites(d)
        if not sites:
            return False
        rec.apply("zam_commuting", *rng.choice(sites))
        return True
    if move == "zam_a3":
        sites = zam_a3_sites(d, limit=1, rng=rng)
        if not sites:
            return False
        rec.apply("zam_a3", *sites[0])
        return True
    raise ValueError(f"unknown move {move}")


def zam_a3_sites(d: Diagram, limit: int | None = None, rng: random.Random | None = None) -> list[tuple]:
    """Sites where the A3 template's small side occurs (two nodes joined through a crossing)."""
    sys = d.system
    if sys.oriented or sys.family != "A" or sys.rank < 3:
        return []
    out = []
    verts = sorted(d.vertices)
    if rng is not None:
        rng.shuffle(verts)
    for shift in range(sys.rank - 2):
        lo = shift + 1
        for x in verts:
            if d.vertices[x].type != (lo, lo + 1):
                continue
            for k in range(0, 6, 2):
                c = d.alpha[(x, k)][0]
                if c in (BOUNDARY, x) or d.vertices[c].type != (lo, lo + 2):
                    continue
                f = d.alpha[(x, k)][1]
                y = d.alpha[(c, (f + 2) % 4)][0]
                if y in (BOUNDARY, x, c) or d.vertices[y].type != (lo, lo + 1):
                    continue
                inside = tuple(sorted((x, c, y)))
                hit = match_template(d, inside, shift)
                if hit and hit[0] == 0:
                    site = (shift, hit[0], hit[1]) + inside
                    if site not in out:
                        out.append(site)
                        if limit and len(out) >= limit:
                            return out
    return out


def inflate(sys: CoxeterSystem, plan: InflationPlan, max_vertices: int | None = None) -> Diagram:
    """Apply ``plan.steps`` random moves to the empty diagram."""
    rng = random.Random(plan.seed)
    rec = Recorder(empty(sys), record=False)
    moves = [m for m, w in plan.weights.items() if w > 0 and not (m == "zam_a3" and sys.oriented)]
    weights = [plan.weights[m] for m in moves]
    done = 0
    tries = 0
    while done < plan.steps and tries < 20 * plan.steps + 20:
        tries += 1
        move = rng.choices(moves, weights)[0]
        if move == "insert_pair" and max_vertices is not None and len(rec.d.vertices) + 2 > max_vertices:
            move = "bridge"
        try:
            ok = _try_move(rec, move, rng)
        except DiagramError:
            ok = False
        done += ok
    return rec.d


def corpus(sys: CoxeterSystem, count: int, size_target: int, seed: int,
           weights: dict[str, float] | None = None) -> list[Diagram]:
    """``count`` inflated diagrams whose vertex counts lie within 25% of ``size_target``."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = random.Random(seed)
    lo, hi = int(size_target * 0.75), int(size_target * 1.25 + 0.999)
    out = []
    while len(out) < count:
        if size_target == 0:
            out.append(empty(sys))
            continue
        w = dict(weights or DEFAULT_WEIGHTS)
        steps = max(1, int(size_target / (2 * w["insert_pair"] / sum(w.values()))))
        plan = InflationPlan(rng.getrandbits(64), steps + rng.randrange(steps // 2 + 1), w)
        d = inflate(sys, plan, max_vertices=hi)
        if lo <= len(d.vertices) <= hi:
            out.append(d)
    return out
