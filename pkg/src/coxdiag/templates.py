"""ZAM template pairs.

The rank-3 relation is read off the reduced expression graph of the longest
element: a cycle of braid moves that is not generated by squares of moves
on disjoint positions.  Each arc of the cycle compiles to a patch (one
vertex per move), and the two arcs between the same pair of words give the
two sides of the template.
"""
from __future__ import annotations

from functools import lru_cache

from .coxeter import (CoxeterError, CoxeterSystem, RexGraph, Word, braid_moves, build_system,
                      explicit_system, rex_graph)
from .patches import WordOp, build_patch
from .planar import BOUNDARY, Diagram, validate
from .rules import TemplatePair, zam_commuting


def _cycles(g: RexGraph, max_len: int = 16) -> list[list[Word]]:
    """Simple cycles (as node lists starting at their least node), shortest first."""
    nodes = sorted(g.nodes)
    found = set()
    out = []
    for root in nodes:
        stack = [(root, [root])]
        while stack:
            v, path = stack.pop()
            for w, _ in g.neighbours(v):
                if w == root and len(path) >= 3:
                    cyc = tuple(path)
                    key = frozenset(_edge_set(cyc))
                    if key not in found:
                        found.add(key)
                        out.append(list(cyc))
                elif w > root and w not in path and len(path) < max_len:
                    stack.append((w, path + [w]))
    out.sort(key=lambda c: (len(c), c))
    return out


def _edge_set(cyc) -> list[frozenset]:
    return [frozenset((cyc[k], cyc[(k + 1) % len(cyc)])) for k in range(len(cyc))]


def _move(sys: CoxeterSystem, a: Word, b: Word):
    for w2, mv in braid_moves(sys, a):
        if w2 == b:
            return mv
    raise CoxeterError(f"{a} and {b} are not one move apart")


def _is_disjoint_square(sys: CoxeterSystem, cyc: list[Word]) -> bool:
    if len(cyc) != 4:
        return False
    m1 = _move(sys, cyc[0], cyc[1])
    m2 = _move(sys, cyc[1], cyc[2])
    r1 = set(range(m1.position, m1.position + m1.m))
    r2 = set(range(m2.position, m2.position + m2.m))
    return not (r1 & r2)


def _span_contains(basis: list[int], vec: int) -> bool:
    """GF(2) membership test; ``basis`` is kept in reduced echelon form by ``_insert``."""
    for b in basis:
        vec = min(vec, vec ^ b)
    return vec == 0


def _insert(basis: list[int], vec: int) -> None:
    for b in basis:
        vec = min(vec, vec ^ b)
    if vec:
        basis.append(vec)
        basis.sort(reverse=True)


def zam_cycle(sys: CoxeterSystem, max_len: int = 16) -> list[Word]:
    """Shortest cycle of the longest element's rex graph outside the span of disjoint squares."""
    g = rex_graph(sys, sys.longest_element)
    edges = sorted({frozenset(e) for e in ((a, b) for a in g.nodes for b, _ in g.neighbours(a))},
                   key=lambda e: sorted(e))
    eidx = {e: k for k, e in enumerate(edges)}

    def vec(cyc):
        v = 0
        for e in _edge_set(cyc):
            v |= 1 << eidx[e]
        return v

    cycles = _cycles(g, max_len)
    basis: list[int] = []
    for cyc in cycles:
        if _is_disjoint_square(sys, cyc):
            _insert(basis, vec(cyc))
    for cyc in cycles:
        if not _is_disjoint_square(sys, cyc) and not _span_contains(basis, vec(cyc)):
            return cyc
    raise CoxeterError("no qualifying cycle")


def compile_path(sys: CoxeterSystem, path: list[Word], keep: set[int] | None = None) -> Diagram:
    """Patch for a path of braid moves: ports carry the first word, then the last one reversed.

    Strand positions never touched by a move are dropped unless listed in ``keep``.
    """
    ops = [WordOp("braid", mv.position, mv.m) for mv in
           (_move(sys, path[k], path[k + 1]) for k in range(len(path) - 1))]
    p, _ = build_patch(sys, path[0], ops)
    L = len(path[0])
    touched = touched_positions(sys, path)
    drop = [q for q in range(L) if q not in touched and not (keep and q in keep)]
    return _drop_positions(p, L, drop)


def touched_positions(sys: CoxeterSystem, path: list[Word]) -> set[int]:
    out: set[int] = set()
    for k in range(len(path) - 1):
        mv = _move(sys, path[k], path[k + 1])
        out.update(range(mv.position, mv.position + mv.m))
    return out


def _drop_positions(p: Diagram, L: int, drop: list[int]) -> Diagram:
    gone = set()
    for q in drop:
        top = 2 * L - 1 - q
        if p.alpha[(BOUNDARY, q)] != (BOUNDARY, top):
            raise CoxeterError("dropped position is not a through strand")
        gone |= {q, top}
    keep = [k for k in range(2 * L) if k not in gone]
    idx = {k: n for n, k in enumerate(keep)}
    out = Diagram(p.system, dict(p.vertices), {}, [p.ports[k] for k in keep])
    for a, b in p.alpha.items():
        if a[0] == BOUNDARY and a[1] in gone:
            continue
        na = (BOUNDARY, idx[a[1]]) if a[0] == BOUNDARY else a
        nb = (BOUNDARY, idx[b[1]]) if b[0] == BOUNDARY else b
        out.alpha[na] = nb
    return out


def _is_trick_side(p: Diagram) -> bool:
    """Two (i,i+1)-vertices joined through one crossing on an i-colored strand."""
    types = sorted(vx.type for vx in p.vertices.values())
    if len(types) != 3 or types[0] != types[1]:
        return False
    nodes = [v for v, vx in p.vertices.items() if vx.type == types[0]]
    cross = [v for v, vx in p.vertices.items() if vx.type != types[0]]
    if len(cross) != 1 or p.system.m(*p.vertices[cross[0]].type) != 2:
        return False
    c = cross[0]
    nbrs = sorted(p.alpha[x][0] for x in p.darts_of(c))
    return sorted(n for n in nbrs if n != BOUNDARY) == sorted(nodes)


def split_cycle(sys: CoxeterSystem, cyc: list[Word]) -> tuple[list[Word], list[Word]]:
    """The two arcs of ``cyc`` used as template sides.

    Side 1 is the shortest arc that compiles to two 6-valent vertices joined
    through one crossing; side 2 is the rest of the cycle between the same words.
    """
    n = len(cyc)
    best = None
    for length in range(2, n // 2 + 1):
        for start in range(n):
            for sgn in (1, -1):
                arc = [cyc[(start + sgn * k) % n] for k in range(length + 1)]
                p = compile_path(sys, arc)
                if not _is_trick_side(p):
                    continue
                key = (arc[0], arc[-1])
                if best is None or key < best[0]:
                    best = (key, arc, start, sgn, length)
        if best:
            break
    if best is None:
        raise CoxeterError("no arc of the cycle has the required shape")
    _, arc, start, sgn, length = best
    rest = [cyc[(start - sgn * k) % n] for k in range(n - length + 1)]
    return arc, rest


def derive_zam_template(sys: CoxeterSystem) -> TemplatePair:
    """Template pair for the rank-3 relation of ``sys`` (type A_3)."""
    if sys.rank < 3:
        raise CoxeterError("no qualifying cycle")
    cyc = zam_cycle(sys)
    a1, a2 = split_cycle(sys, cyc)
    keep = touched_positions(sys, a1) | touched_positions(sys, a2)
    p1 = compile_path(sys, a1, keep)
    p2 = compile_path(sys, a2, keep)
    for p in (p1, p2):
        errs = validate(p)
        if errs:
            raise CoxeterError("compiled template invalid: " + errs[0])
    if p1.boundary_signature() != p2.boundary_signature():
        raise CoxeterError("template sides disagree on the boundary")
    return TemplatePair("zam_a3", p1, p2)


@lru_cache(maxsize=None)
def builtin_a3() -> TemplatePair:
    return derive_zam_template(build_system("A", 3))


# -- commuting strand templates ---------------------------------------------------

def product_a1_im(m: int) -> CoxeterSystem:
    """Generators 1, 2 with exponent ``m`` and a third generator commuting with both."""
    return explicit_system([[1, m, 2], [m, 1, 2], [2, 2, 1]])


def commuting_template(m: int) -> TemplatePair:
    """Strand of color 3 passing a (1,2)-vertex on one side or the other."""
    sys = product_a1_im(m)
    d = Diagram(sys)
    w = d.add_vertex(1, 2)
    xs = [d.add_vertex(d.color((w, k)), 3) for k in range(m)]
    for k, x in enumerate(xs):
        d.pair((w, k), (x, 0))
    for k in range(m - 1):
        d.pair((xs[k], 3), (xs[k + 1], 1))
    free = [(xs[0], 1)] + [(x, 2) for x in xs] + [(xs[-1], 3)] + [(w, k) for k in range(m, 2 * m)]
    d.ports = [(d.color(x), None) for x in free]
    for k, x in enumerate(free):
        d.pair(x, (BOUNDARY, k))
    other = zam_commuting(d, w, 0)
    return TemplatePair(f"zam_commuting_{m}", d, other)
