"""Colored planar combinatorial maps.

A diagram is stored as a rotation system.  Every real vertex has darts
``(vid, slot)`` with slots running counterclockwise ``0 .. 2m-1``; even slots
carry the smaller generator of the vertex type, odd slots the larger one.
Unpaired ends of a patch are *ports* ``(0, k)``, listed counterclockwise
along the outer face; together they behave like one extra vertex whose
rotation runs through the ports in decreasing order.

Oriented vertices come in two kinds.  ``out``: slots ``0..m-1`` point away
from the vertex.  ``in``: the first outgoing dart carries the larger
generator, so slots ``1..m`` point away.
"""
from __future__ import annotations

import hashlib
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .coxeter import CoxeterSystem, INF

Dart = tuple[int, int]
BOUNDARY = 0


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Vertex:
    i: int
    j: int
    kind: str | None = None  # "out" / "in" on oriented systems

    @property
    def type(self) -> tuple[int, int]:
        return (self.i, self.j)


def out_slots(m: int, kind: str) -> range:
    return range(0, m) if kind == "out" else range(1, m + 1)


def normalize_block(m: int, outs: Iterable[int]) -> tuple[str, int]:
    """Kind and relabelling shift for a vertex whose outgoing slots are ``outs``.

    Returns ``(kind, shift)`` such that old slot ``k`` becomes ``(k - shift) % 2m``.
    """
    outs = set(outs)
    n = 2 * m
    start = next(k for k in range(n) if k in outs and (k - 1) % n not in outs)
    if start % 2 == 0:
        return "out", start
    return "in", start - 1


@dataclass
class Diagram:
    system: CoxeterSystem
    vertices: dict[int, Vertex] = field(default_factory=dict)
    alpha: dict[Dart, Dart] = field(default_factory=dict)
    ports: list[tuple[int, bool | None]] = field(default_factory=list)
    circles: Counter = field(default_factory=Counter)

    # -- basic structure --------------------------------------------------

    def copy(self) -> Diagram:
        return Diagram(self.system, dict(self.vertices), dict(self.alpha),
                       list(self.ports), Counter(self.circles))

    @property
    def oriented(self) -> bool:
        return self.system.oriented

    @property
    def closed(self) -> bool:
        return not self.ports

    def is_empty(self) -> bool:
        return not self.vertices and not self.ports and not +self.circles

    def m_of(self, v: int) -> int:
        vx = self.vertices[v]
        return self.system.m(vx.i, vx.j)

    def degree(self, v: int) -> int:
        if v == BOUNDARY:
            return len(self.ports)
        vx = self.vertices[v]
        return 2 * self.system.exponents[vx.i - 1][vx.j - 1]

    def darts_of(self, v: int) -> list[Dart]:
        return [(v, k) for k in range(self.degree(v))]

    def darts(self) -> Iterator[Dart]:
        for v in self.vertices:
            yield from self.darts_of(v)
        for k in range(len(self.ports)):
            yield (BOUNDARY, k)

    def num_edges(self) -> int:
        return len(self.alpha) // 2

    def edges(self) -> list[tuple[Dart, Dart]]:
        return sorted((a, b) for a, b in self.alpha.items() if a < b)

    def color(self, d: Dart) -> int:
        v, k = d
        if v == BOUNDARY:
            return self.ports[k][0]
        vx = self.vertices[v]
        return vx.i if k % 2 == 0 else vx.j

    def is_out(self, d: Dart) -> bool | None:
        v, k = d
        if v == BOUNDARY:
            return self.ports[k][1]
        vx = self.vertices[v]
        if vx.kind is None:
            return None
        m = self.system.m(vx.i, vx.j)
        return k in out_slots(m, vx.kind)

    def sigma(self, d: Dart, step: int = 1) -> Dart:
        """Next dart counterclockwise around the owner of ``d``."""
        v, k = d
        if v == BOUNDARY:
            return (v, (k - step) % len(self.ports))
        vx = self.vertices[v]
        return (v, (k + step) % (2 * self.system.exponents[vx.i - 1][vx.j - 1]))

    def phi(self, d: Dart) -> Dart:
        return self.sigma(self.alpha[d])

    def new_id(self) -> int:
        return max(self.vertices, default=0) + 1

    def add_vertex(self, i: int, j: int, kind: str | None = None, vid: int | None = None) -> int:
        if i > j:
            i, j = j, i
        if vid is None:
            vid = self.new_id()
        self.vertices[vid] = Vertex(i, j, kind)
        return vid

    def pair(self, a: Dart, b: Dart) -> None:
        self.alpha[a] = b
        self.alpha[b] = a

    def remove_vertex(self, v: int) -> None:
        for d in self.darts_of(v):
            e = self.alpha.pop(d, None)
            if e is not None and self.alpha.get(e) == d:
                del self.alpha[e]
        del self.vertices[v]

    def vertex_of(self, d: Dart) -> int:
        return d[0]

    def count_type(self, t: tuple[int, int]) -> int:
        return sum(1 for vx in self.vertices.values() if vx.type == t)

    def boundary_signature(self) -> tuple[tuple[int, bool | None], ...]:
        return tuple(self.ports)

    # -- components ---------------------------------------------------------

    def components(self) -> list[set[int]]:
        """Vertex sets of connected components (the boundary counts as vertex 0)."""
        owners = set(self.vertices)
        if self.ports:
            owners.add(BOUNDARY)
        seen: set[int] = set()
        comps = []
        for start in sorted(owners):
            if start in seen:
                continue
            comp, stack = set(), [start]
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.add(v)
                for d in self.darts_of(v):
                    w = self.alpha.get(d, d)[0]
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(comp)
        return comps

    def __repr__(self) -> str:
        return (f"Diagram({self.system.name}, V={len(self.vertices)}, E={self.num_edges()}, "
                f"ports={len(self.ports)}, circles={sum(self.circles.values())})")


def empty(system: CoxeterSystem) -> Diagram:
    return Diagram(system)


# -- validation --------------------------------------------------------------

def validate(d: Diagram) -> list[str]:
    """Return a list of axiom violations; empty means valid."""
    errs: list[str] = []
    sys = d.system
    for v, vx in d.vertices.items():
        if v <= 0:
            errs.append(f"vertex id {v} must be positive")
        if not (1 <= vx.i < vx.j <= sys.rank):
            errs.append(f"vertex {v}: bad type {vx.type}")
            continue
        if sys.m(vx.i, vx.j) == INF:
            errs.append(f"vertex {v}: infinite exponent")
        if sys.oriented and vx.kind not in ("out", "in"):
            errs.append(f"vertex {v}: orientation kind missing")
        if not sys.oriented and vx.kind is not None:
            errs.append(f"vertex {v}: orientation on unoriented system")
    if errs:
        return errs
    all_darts = set(d.darts())
    for a, b in d.alpha.items():
        if a not in all_darts or b not in all_darts:
            errs.append(f"dangling dart pairing {a}-{b}")
            continue
        if d.alpha.get(b) != a:
            errs.append(f"alpha not an involution at {a}")
        if a == b:
            errs.append(f"dart {a} paired with itself")
        if d.color(a) != d.color(b):
            errs.append(f"alternation: edge {a}-{b} joins colors {d.color(a)} and {d.color(b)}")
        if sys.oriented and d.is_out(a) == d.is_out(b):
            errs.append(f"orientation: edge {a}-{b} has no unique tail")
    for x in all_darts - set(d.alpha):
        errs.append(f"unpaired dart {x}")
    for c, s in d.circles.items():
        if s < 0 or not 1 <= c[0] <= sys.rank:
            errs.append(f"bad circle record {c}")
    if errs:
        return errs
    for rec in euler_report(d):
        if rec.chi != 2:
            errs.append(f"genus: component {sorted(rec.vertices)[:5]} has V-E+F={rec.chi}")
    return errs


def check(d: Diagram) -> Diagram:
    errs = validate(d)
    if errs:
        raise DiagramError("; ".join(errs[:5]))
    return d


# -- faces, Euler, angles ------------------------------------------------------

def faces(d: Diagram) -> list[list[Dart]]:
    """Orbits of ``phi``; each face lies to the right of its traversal."""
    seen: set[Dart] = set()
    out = []
    for x in sorted(d.alpha):
        if x in seen:
            continue
        orbit = []
        y = x
        while y not in seen:
            seen.add(y)
            orbit.append(y)
            y = d.phi(y)
        out.append(orbit)
    return out


def face_index(d: Diagram) -> dict[Dart, int]:
    idx = {}
    for n, f in enumerate(faces(d)):
        for x in f:
            idx[x] = n
    return idx


def face_size(face: list[Dart]) -> int:
    return sum(1 for x in face if x[0] != BOUNDARY)


@dataclass(frozen=True)
class EulerRecord:
    vertices: frozenset
    V: int
    E: int
    F: int
    chi: int
    has_boundary: bool


def euler_report(d: Diagram) -> list[EulerRecord]:
    fidx = face_index(d)
    out = []
    for comp in d.components():
        darts = [x for v in comp for x in d.darts_of(v)]
        if not darts:
            continue
        V = len(comp)
        E = sum(1 for x in darts if x in d.alpha) // 2
        F = len({fidx[x] for x in darts if x in fidx})
        nb = BOUNDARY in comp
        out.append(EulerRecord(frozenset(comp), V - nb, E, F, V - E + F, nb))
    return out


def classify_angles(d: Diagram) -> dict[Dart, str]:
    """Map each corner (named by its first dart ``x``, between ``x`` and ``sigma(x)``)."""
    if not d.oriented:
        raise DiagramError("angles are only classified on oriented diagrams")
    out = {}
    for v in d.vertices:
        for x in d.darts_of(v):
            out[x] = "varied" if d.is_out(x) != d.is_out(d.sigma(x)) else "uniform"
    return out


# -- boundary, mirror, glue ----------------------------------------------------

def boundary_word(d: Diagram) -> tuple[int, ...]:
    if not d.ports:
        raise DiagramError("closed diagram has no boundary")
    return tuple(c for c, _ in d.ports)


def _relabel_vertex(m: int, vx: Vertex, slot_map) -> tuple[Vertex, dict[int, int]]:
    """Apply ``slot_map`` (old slot -> provisional new slot) and renormalise the kind."""
    n = 2 * m
    if vx.kind is None:
        return vx, {k: slot_map(k) % n for k in range(n)}
    outs = [slot_map(k) % n for k in out_slots(m, vx.kind)]
    kind, shift = normalize_block(m, outs)
    return Vertex(vx.i, vx.j, kind), {k: (slot_map(k) - shift) % n for k in range(n)}


def _transform(d: Diagram, reflect: bool, flip: bool) -> Diagram:
    out = Diagram(d.system)
    maps: dict[int, dict[int, int]] = {}
    for v, vx in d.vertices.items():
        m = d.system.m(vx.i, vx.j)
        src = vx
        if flip and vx.kind is not None:
            # reversing every arrow turns the outgoing block into the incoming one
            outs = [k for k in range(2 * m) if k not in out_slots(m, vx.kind)]
            kind, shift = normalize_block(m, outs)
            src = Vertex(vx.i, vx.j, kind)
            base = {k: (k - shift) % (2 * m) for k in range(2 * m)}
        else:
            base = {k: k for k in range(2 * m)}
        if reflect:
            nv, mp = _relabel_vertex(m, src, lambda k: -k)
            maps[v] = {k: mp[base[k]] for k in range(2 * m)}
        else:
            nv = src
            maps[v] = base
        out.vertices[v] = nv
    L = len(d.ports)
    pmap = {k: ((-k) % L if reflect else k) for k in range(L)}
    out.ports = [None] * L  # type: ignore[list-item]
    for k, (c, o) in enumerate(d.ports):
        out.ports[pmap[k]] = (c, (not o) if (flip and o is not None) else o)

    def nd(x: Dart) -> Dart:
        if x[0] == BOUNDARY:
            return (BOUNDARY, pmap[x[1]])
        return (x[0], maps[x[0]][x[1]])

    for a, b in d.alpha.items():
        out.alpha[nd(a)] = nd(b)
    out.circles = Counter(d.circles)
    return out


def mirror(d: Diagram) -> Diagram:
    """Reflect the plane: reverse every rotation (port 0 stays fixed)."""
    return _transform(d, reflect=True, flip=False)


def reverse_arrows(d: Diagram) -> Diagram:
    return _transform(d, reflect=False, flip=True)


def inverse_patch(d: Diagram) -> Diagram:
    """The patch glued opposite ``d``: its mirror, with arrows reversed if oriented."""
    out = mirror(d)
    return reverse_arrows(out) if d.oriented else out


def disjoint_union(a: Diagram, b: Diagram) -> tuple[Diagram, dict[int, int]]:
    """Place closed ``b`` beside ``a``; returns the vertex id map for ``b``."""
    if b.ports:
        raise DiagramError("only closed diagrams can be placed side by side")
    out = a.copy()
    base = out.new_id()
    vmap = {v: base + n for n, v in enumerate(sorted(b.vertices))}
    for v, vx in b.vertices.items():
        out.vertices[vmap[v]] = vx
    for x, y in b.alpha.items():
        out.alpha[(vmap[x[0]], x[1])] = (vmap[y[0]], y[1])
    out.circles.update(b.circles)
    return out, vmap


def glue(d1: Diagram, d2: Diagram) -> Diagram:
    """Close up two patches with the same boundary: ``d2`` is placed outside ``d1``."""
    if d1.system != d2.system:
        raise DiagramError("boundary mismatch: different systems")
    if d1.boundary_signature() != d2.boundary_signature():
        raise DiagramError("boundary mismatch")
    inv = inverse_patch(d2)
    L = len(d1.ports)
    out = Diagram(d1.system)
    base = max(d1.vertices, default=0)
    vmap2 = {v: base + n + 1 for n, v in enumerate(sorted(inv.vertices))}
    for v, vx in d1.vertices.items():
        out.vertices[v] = vx
    for v, vx in inv.vertices.items():
        out.vertices[vmap2[v]] = vx
    # ports of d1 meet ports of inv at the reflected index
    match = {k: (-k) % L for k in range(L)} if L else {}

    def follow(side: int, x: Dart) -> tuple[int, Dart]:
        # walk through port-to-port arcs until a real dart appears
        seen = 0
        while x[0] == BOUNDARY:
            k = x[1]
            if side == 1:
                side, x = 2, inv.alpha[(BOUNDARY, match[k])]
            else:
                side, x = 1, d1.alpha[(BOUNDARY, match[k])]
            seen += 1
            if seen > 2 * L + 2:
                return side, x
        return side, x

    def real(side: int, x: Dart) -> Dart:
        return x if side == 1 else (vmap2[x[0]], x[1])

    for side, dd in ((1, d1), (2, inv)):
        for a, b in dd.alpha.items():
            if a[0] == BOUNDARY:
                continue
            s2, bb = (side, b) if b[0] != BOUNDARY else follow(side, b)
            out.alpha[real(side, a)] = real(s2, bb)
    # port cycles with no real dart become circles
    used: set[int] = set()
    for k in range(L):
        if k in used:
            continue
        x = d1.alpha[(BOUNDARY, k)]
        if x[0] != BOUNDARY:
            continue
        chain, side, cur = [], 1, (BOUNDARY, k)
        ok = True
        for _ in range(2 * L + 2):
            if side == 1:
                used.add(cur[1])
                nxt = d1.alpha[cur]
                if nxt[0] != BOUNDARY:
                    ok = False
                    break
                side, cur = 2, (BOUNDARY, match[nxt[1]])
                used.add(nxt[1])
            else:
                nxt = inv.alpha[cur]
                if nxt[0] != BOUNDARY:
                    ok = False
                    break
                side, cur = 1, (BOUNDARY, match[nxt[1]])
            chain.append(cur)
            if side == 1 and cur == (BOUNDARY, k):
                break
        if ok:
            out.circles[(d1.ports[k][0], None if not d1.oriented else "ccw")] += 1
    out.circles.update(d1.circles)
    out.circles.update(inv.circles)
    return out


# -- regions ---------------------------------------------------------------

@dataclass
class Region:
    """A disc in a host diagram.

    ``inside`` are the vertices removed by a replacement; ``attach`` are the
    host darts just outside the disc, counterclockwise as seen from inside.
    Two attachments paired with each other form an arc running through the disc.
    """
    inside: frozenset
    attach: list[Dart]


def region_from_vertices(d: Diagram, verts: Iterable[int]) -> Region:
    S = frozenset(verts)
    if not S or BOUNDARY in S or not S <= set(d.vertices):
        raise DiagramError("region must be a nonempty set of vertices")
    cut = [x for v in sorted(S) for x in d.darts_of(v) if d.alpha[x][0] not in S]
    if not cut:
        raise DiagramError("region is a whole closed component")
    order = []
    seen: set[Dart] = set()
    x = cut[0]
    while x not in seen:
        seen.add(x)
        order.append(x)
        y = d.sigma(x)
        guard = 0
        while d.alpha[y][0] in S:
            y = d.sigma(d.alpha[y])
            guard += 1
            if guard > 4 * len(d.alpha) + 4:
                raise DiagramError("region traversal did not close")
        x = y
    if len(order) != len(cut):
        raise DiagramError("region is not a disc")
    # internal connectivity
    comp, stack = {min(S)}, [min(S)]
    while stack:
        v = stack.pop()
        for y in d.darts_of(v):
            w = d.alpha[y][0]
            if w in S and w not in comp:
                comp.add(w)
                stack.append(w)
    if comp != S:
        raise DiagramError("region is not connected")
    return Region(S, [d.alpha[x] for x in order])


def cut_patch(d: Diagram, region: Region) -> Diagram:
    """The patch inside ``region``; port ``k`` faces ``region.attach[k]``."""
    p = Diagram(d.system)
    for v in region.inside:
        p.vertices[v] = d.vertices[v]
    apos = {a: k for k, a in enumerate(region.attach)}
    p.ports = [(d.color(a), d.is_out(a)) for a in region.attach]
    for v in region.inside:
        for x in d.darts_of(v):
            y = d.alpha[x]
            if y in apos:
                p.pair(x, (BOUNDARY, apos[y]))
            else:
                p.alpha[x] = y
    for a, k in apos.items():
        b = d.alpha[a]
        if b in apos:
            p.alpha[(BOUNDARY, k)] = (BOUNDARY, apos[b])
    return p


def replace_region(d: Diagram, region: Region, patch: Diagram) -> tuple[Diagram, dict[int, int]]:
    """Swap the inside of ``region`` for ``patch`` (same boundary signature)."""
    sig = tuple((d.color(a), d.is_out(a)) for a in region.attach)
    if sig != patch.boundary_signature():
        raise DiagramError("region boundary mismatch")
    out = d.copy()
    for v in region.inside:
        out.remove_vertex(v)
    for a in region.attach:
        out.alpha.pop(a, None)
    base = out.new_id()
    vmap = {v: base + n for n, v in enumerate(sorted(patch.vertices))}
    for v, vx in patch.vertices.items():
        out.vertices[vmap[v]] = vx

    def img(x: Dart) -> Dart:
        if x[0] == BOUNDARY:
            return region.attach[x[1]]
        return (vmap[x[0]], x[1])

    for x, y in patch.alpha.items():
        out.alpha[img(x)] = img(y)
    out.circles.update(patch.circles)
    return out, vmap


# -- color subgraphs -------------------------------------------------------

@dataclass
class Arc:
    start: Dart  # dart at a node (or port) where the arc begins
    end: Dart
    crossings: list[tuple[int, int]]  # (vertex, entry slot) in traversal order
    closed: bool = False


@dataclass
class ColorSubgraph:
    color: int
    nodes: list[int]
    arcs: list[Arc]

    def degree(self, v: int) -> int:
        return sum((a.start[0] == v) + (a.end[0] == v) for a in self.arcs if not a.closed)


def is_node(d: Diagram, v: int, c: int) -> bool:
    vx = d.vertices[v]
    return c in vx.type and d.system.m(vx.i, vx.j) >= 3


def trace_arc(d: Diagram, start: Dart, c: int) -> Arc:
    """Follow a ``c``-colored strand from ``start`` through commuting crossings."""
    crossings = []
    x = d.alpha[start]
    while x[0] != BOUNDARY and not is_node(d, x[0], c):
        crossings.append(x)
        nxt = (x[0], (x[1] + 2) % 4)
        if nxt == start:
            return Arc(start, start, crossings, closed=True)
        x = d.alpha[nxt]
        if nxt == start or x == start:
            return Arc(start, start, crossings, closed=True)
    return Arc(start, x, crossings)


def color_subgraph(d: Diagram, c: int) -> ColorSubgraph:
    nodes = sorted(v for v in d.vertices if is_node(d, v, c))
    arcs: list[Arc] = []
    used: set[Dart] = set()
    starts = [x for v in nodes for x in d.darts_of(v) if d.color(x) == c]
    starts += [(BOUNDARY, k) for k, (col, _) in enumerate(d.ports) if col == c]
    for s in starts:
        if s in used:
            continue
        arc = trace_arc(d, s, c)
        used.add(s)
        used.add(arc.end)
        arcs.append(arc)
    # closed strands made only of crossings
    for v, vx in sorted(d.vertices.items()):
        if c not in vx.type or is_node(d, v, c):
            continue
        s = (v, 0 if vx.i == c else 1)
        if s in used or (v, (s[1] + 2) % 4) in used:
            continue
        crossings = [s]
        used.add(s)
        used.add((v, (s[1] + 2) % 4))
        x = d.alpha[(v, (s[1] + 2) % 4)]
        while x[0] != BOUNDARY and not is_node(d, x[0], c) and x != s:
            used.add(x)
            used.add((x[0], (x[1] + 2) % 4))
            crossings.append(x)
            x = d.alpha[(x[0], (x[1] + 2) % 4)]
        if x == s:
            arcs.append(Arc(s, s, crossings, closed=True))
    return ColorSubgraph(c, nodes, arcs)


# -- canonical codes ---------------------------------------------------------

def _dart_labels(d: Diagram, darts: list[Dart], rounds: int = 64) -> dict[Dart, int]:
    lab: dict[Dart, tuple] = {}
    for x in darts:
        v = x[0]
        if v == BOUNDARY:
            lab[x] = (0, 0, "B", d.color(x), str(d.is_out(x)))
        else:
            vx = d.vertices[v]
            lab[x] = (vx.i, vx.j, str(vx.kind), d.color(x), str(d.is_out(x)))
    fsize: dict[Dart, int] = {}
    for x in darts:
        if x not in fsize:
            orbit = [x]
            y = d.phi(x)
            while y != x:
                orbit.append(y)
                y = d.phi(y)
            for y in orbit:
                fsize[y] = len(orbit)
    lab = {x: lab[x] + (fsize[x],) for x in darts}
    cur = _compress(lab)
    classes = len(set(cur.values()))
    for _ in range(rounds):
        nxt = {x: (cur[x], cur[d.alpha[x]], cur[d.sigma(x)]) for x in darts}
        cur = _compress(nxt)
        n = len(set(cur.values()))
        if n == classes:
            break
        classes = n
    return cur


def _compress(lab: dict) -> dict:
    keys = sorted(set(lab.values()))
    rank = {k: n for n, k in enumerate(keys)}
    return {x: rank[v] for x, v in lab.items()}


def _serialize_from(d: Diagram, root: Dart) -> tuple:
    index: dict[int, int] = {}
    entry: dict[int, Dart] = {}
    order: list[int] = []
    queue: deque[int] = deque()

    def visit(x: Dart) -> None:
        v = x[0]
        if v not in index:
            index[v] = len(order)
            order.append(v)
            entry[v] = (BOUNDARY, 0) if v == BOUNDARY else x
            queue.append(v)

    visit(root)
    out: list = []
    while queue:
        v = queue.popleft()
        e = entry[v]
        deg = d.degree(v)
        if v == BOUNDARY:
            head = ("B", deg, tuple(d.ports))
        else:
            vx = d.vertices[v]
            head = (vx.i, vx.j, str(vx.kind), d.color(e), str(d.is_out(e)))
        out.append(head)
        for t in range(deg):
            x = d.sigma(e, t)
            y = d.alpha[x]
            visit(y)
            ey = entry[y[0]]
            if y[0] == BOUNDARY:
                off = y[1]
            else:
                off = (y[1] - ey[1]) % d.degree(y[0])
            out.append((index[y[0]], off))
    return tuple(out)


_CODE_CACHE: dict[tuple, tuple] = {}


def _component_code(d: Diagram, comp: set[int]) -> tuple:
    if BOUNDARY in comp:
        return _serialize_from(d, (BOUNDARY, 0))
    # components untouched by a rewrite step keep their labels, so an exact
    # (label-dependent) key lets consecutive steps share the expensive part
    key = (d.system, tuple(sorted((v, d.vertices[v]) for v in comp)),
           tuple(sorted((x, d.alpha[x]) for v in comp for x in d.darts_of(v))))
    hit = _CODE_CACHE.get(key)
    if hit is None:
        if len(_CODE_CACHE) > 20000:
            _CODE_CACHE.clear()
        hit = _CODE_CACHE[key] = _component_code_uncached(d, comp)
    return hit


def _component_code_uncached(d: Diagram, comp: set[int]) -> tuple:
    darts = [x for v in comp for x in d.darts_of(v)]
    lab = _dart_labels(d, darts)
    counts = Counter(lab.values())
    best = min(counts, key=lambda c: (counts[c], c))
    roots = [x for x in darts if lab[x] == best]
    return min(_serialize_from(d, r) for r in roots)


def canonical_form(d: Diagram) -> tuple:
    comps = d.components()
    bcode = ()
    rest = []
    for comp in comps:
        code = _component_code(d, comp)
        if BOUNDARY in comp:
            bcode = code
        else:
            rest.append(code)
    circles = tuple(sorted((c, str(o), n) for (c, o), n in d.circles.items() if n))
    return (d.system.name, bcode, tuple(sorted(rest)), circles)


def canonical_code(d: Diagram) -> str:
    """Isomorphism-invariant digest of the diagram."""
    if not d.vertices and not d.ports and not +d.circles:
        return "empty:" + d.system.name
    return hashlib.sha256(repr(canonical_form(d)).encode()).hexdigest()[:32]


# -- misc ----------------------------------------------------------------------

def relabel(d: Diagram, rng: random.Random) -> Diagram:
    """Random vertex renumbering and color-preserving slot rotation."""
    ids = list(d.vertices)
    new_ids = rng.sample(range(1, 10 * len(ids) + 10), len(ids))
    vmap = dict(zip(ids, new_ids))
    rot = {v: 2 * rng.randrange(d.m_of(v)) for v in ids}
    out = Diagram(d.system, ports=list(d.ports), circles=Counter(d.circles))
    for v, vx in d.vertices.items():
        m = d.m_of(v)
        if vx.kind is None:
            out.vertices[vmap[v]] = vx
        else:
            outs = [(k + rot[v]) % (2 * m) for k in out_slots(m, vx.kind)]
            kind, shift = normalize_block(m, outs)
            rot[v] -= shift
            out.vertices[vmap[v]] = Vertex(vx.i, vx.j, kind)

    def nd(x: Dart) -> Dart:
        if x[0] == BOUNDARY:
            return x
        return (vmap[x[0]], (x[1] + rot[x[0]]) % d.degree(x[0]))

    for a, b in d.alpha.items():
        out.alpha[nd(a)] = nd(b)
    return out


def rotate_ports(p: Diagram, s: int) -> Diagram:
    """Relabel ports so that old port ``s`` becomes port 0."""
    L = len(p.ports)
    if not L:
        return p.copy()
    s %= L
    out = Diagram(p.system, dict(p.vertices), {}, [p.ports[(k + s) % L] for k in range(L)],
                  Counter(p.circles))

    def nd(x: Dart) -> Dart:
        return (BOUNDARY, (x[1] - s) % L) if x[0] == BOUNDARY else x

    for a, b in p.alpha.items():
        out.alpha[nd(a)] = nd(b)
    return out


def region_from_attach(d: Diagram, attach: list[Dart]) -> Region:
    """Region bounded by the host darts ``attach``, given counterclockwise as seen from inside.

    The inside is everything reachable from the attachments' partners without
    passing back through an attachment.  When it is empty the attachments are
    paired among themselves and must form a non-crossing matching.
    """
    A = list(attach)
    Aset = set(A)
    if len(Aset) != len(A):
        raise DiagramError("repeated attachment")
    inside: set[int] = set()
    stack = [d.alpha[a][0] for a in A if d.alpha[a] not in Aset]
    while stack:
        v = stack.pop()
        if v in inside:
            continue
        if v == BOUNDARY:
            raise DiagramError("region reaches the outer boundary")
        inside.add(v)
        for x in d.darts_of(v):
            y = d.alpha[x]
            if y not in Aset and y[0] not in inside:
                stack.append(y[0])
    if inside:
        reg = region_from_vertices(d, inside)
        if set(reg.attach) != Aset:
            raise DiagramError("attachments do not bound a disc")
        k = reg.attach.index(A[0])
        order = reg.attach[k:] + reg.attach[:k]
        if order != A:
            raise DiagramError("attachments out of order")
        return reg
    pos = {a: k for k, a in enumerate(A)}
    stack2: list[int] = []
    for k, a in enumerate(A):
        j = pos[d.alpha[a]]
        if j > k:
            stack2.append(j)
        else:
            if not stack2 or stack2.pop() != k:
                raise DiagramError("arcs through the region cross")
    return Region(frozenset(), A)
