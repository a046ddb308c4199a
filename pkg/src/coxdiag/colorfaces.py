"""Faces of the subgraph of one color.

For a color ``c`` the *nodes* are vertices of type (c, x) with m >= 3; the
other c-vertices are crossings that a c-strand passes straight through.
Walking a c-face keeps the face on the right: from a c-dart we cross the
edge and turn counterclockwise to the next c-dart, passing the corner's
other darts, which point into the face.

A face of the c-subgraph can be bounded by several boundary cycles (one per
c-component it touches).  Cycles are grouped into faces through the
c-free *zones* between them.  A face with a single boundary cycle is a disc
with no c-colored edge inside.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .planar import BOUNDARY, Dart, Diagram, Region, is_node


@dataclass
class Corner:
    vertex: int
    entry: int            # slot where the walk arrives
    leave: int            # slot where the walk continues
    inner: list[Dart]     # darts between them, pointing into the face
    node: bool


@dataclass
class BoundaryCycle:
    color: int
    corners: list[Corner]

    @property
    def nodes(self) -> list[Corner]:
        return [c for c in self.corners if c.node]

    @property
    def size(self) -> int:
        return len(self.nodes)

    def inner_darts(self) -> list[Dart]:
        return [x for c in self.corners for x in c.inner]


@dataclass
class FaceArc:
    """Stretch of a cycle from one node corner to the next."""
    start: Dart                    # dart at the first node where the arc leaves
    end: Dart                      # dart at the second node where it arrives
    crossings: list[Corner] = field(default_factory=list)

    def word(self, d: Diagram) -> tuple[int, ...]:
        return tuple(d.color(c.inner[0]) for c in self.crossings)


class _DSU:
    def __init__(self):
        self.p: dict = {}

    def find(self, x):
        self.p.setdefault(x, x)
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def boundary_cycles(d: Diagram, c: int) -> list[BoundaryCycle]:
    cdarts = sorted(x for v, vx in d.vertices.items() if c in vx.type
                    for x in d.darts_of(v) if d.color(x) == c)
    seen: set[Dart] = set()
    out = []
    for x0 in cdarts:
        if x0 in seen:
            continue
        corners = []
        x = x0
        while x not in seen:
            seen.add(x)
            y = d.alpha[x]
            if y[0] == BOUNDARY:
                raise ValueError("color faces are computed on closed diagrams")
            v = y[0]
            n = d.degree(v)
            inner = []
            k = 1
            while d.color((v, (y[1] + k) % n)) != c:
                inner.append((v, (y[1] + k) % n))
                k += 1
            nxt = (v, (y[1] + k) % n)
            corners.append(Corner(v, y[1], nxt[1], inner, is_node(d, v, c)))
            x = nxt
        out.append(BoundaryCycle(c, corners))
    return out


def zones(d: Diagram, c: int) -> _DSU:
    """Union-find over darts not of color c: same zone iff joined without crossing c."""
    dsu = _DSU()
    for v, vx in d.vertices.items():
        darts = [x for x in d.darts_of(v) if d.color(x) != c]
        if c not in vx.type:
            for x in darts[1:]:
                dsu.union(darts[0], x)
        for x in darts:
            dsu.find(x)
            dsu.union(x, d.alpha[x])
    return dsu


@dataclass
class ColorFace:
    cycles: list[BoundaryCycle]
    interior: set[int]            # vertices strictly inside (no c-dart)

    @property
    def is_disc(self) -> bool:
        return len(self.cycles) == 1


def color_faces(d: Diagram, c: int) -> list[ColorFace]:
    cycles = boundary_cycles(d, c)
    dsu = zones(d, c)
    owner: dict = {}
    link = _DSU()
    for n, cyc in enumerate(cycles):
        link.find(n)
        for x in cyc.inner_darts():
            z = dsu.find(x)
            if z in owner:
                link.union(owner[z], n)
            else:
                owner[z] = n
    groups: dict[int, list[int]] = {}
    for n in range(len(cycles)):
        groups.setdefault(link.find(n), []).append(n)
    zone_verts: dict = {}
    for v, vx in d.vertices.items():
        if c not in vx.type:
            zone_verts.setdefault(dsu.find((v, 0)), set()).add(v)
    out = []
    for root, members in sorted(groups.items()):
        inner = set()
        zs = {dsu.find(x) for n in members for x in cycles[n].inner_darts()}
        for z in zs:
            inner |= zone_verts.get(z, set())
        out.append(ColorFace([cycles[n] for n in members], inner))
    return out


def face_arcs(d: Diagram, cyc: BoundaryCycle) -> list[FaceArc]:
    """Arcs between consecutive node corners, starting at the least node corner."""
    cs = cyc.corners
    idx = [k for k, cr in enumerate(cs) if cr.node]
    if not idx:
        return []
    start = min(idx, key=lambda k: (cs[k].vertex, cs[k].entry))
    order = cs[start:] + cs[:start]
    arcs = []
    cur = None
    for cr in order + [order[0]]:
        if cr.node:
            if cur is not None:
                cur.end = (cr.vertex, cr.entry)
                arcs.append(cur)
            cur = FaceArc((cr.vertex, cr.leave), (0, 0))
        else:
            assert cur is not None
            cur.crossings.append(cr)
    return arcs


def disc_region(d: Diagram, cyc: BoundaryCycle, face: ColorFace, with_crossings: bool) -> Region:
    """The disc enclosed by a single-cycle face.

    With ``with_crossings`` the crossings on the cycle belong to the disc and
    the attachments are the node darts and the crossings' outer darts;
    otherwise the attachments are the darts pointing into the face.
    """
    walk: list[Dart] = []
    inside = set(face.interior)
    for cr in cyc.corners:
        if cr.node or not with_crossings:
            if cr.node and with_crossings:
                walk.append((cr.vertex, cr.entry))
                walk.extend(cr.inner)
                walk.append((cr.vertex, cr.leave))
            else:
                walk.extend(cr.inner)
        else:
            inside.add(cr.vertex)
            outer = (cr.vertex, (cr.entry + 3) % 4)
            walk.append(d.alpha[outer])
    if with_crossings and any(x[0] in inside for x in walk):
        # two crossings of the cycle joined outside the face: not a disc
        raise ValueError("crossings on the cycle are joined outside the face")
    return Region(frozenset(inside), walk[::-1])
