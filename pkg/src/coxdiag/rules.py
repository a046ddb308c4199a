"""Allowed moves on diagrams.

Every primitive is a pure function ``(diagram, *site) -> diagram``.  Sites
are tuples of integers so that a rewrite can be written down and replayed.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .planar import (BOUNDARY, Dart, Diagram, DiagramError, Vertex, canonical_code, cut_patch,
                     face_index, out_slots, region_from_vertices, replace_region, rotate_ports,
                     validate)


class RuleError(DiagramError):
    pass


ORIENT_CODES = {None: 0, "ccw": 1, "cw": 2}
ORIENT_NAMES = {v: k for k, v in ORIENT_CODES.items()}

PRIMITIVES = ("circle_add", "circle_remove", "bridge", "cancel_pair", "cancel_create",
              "zam_commuting", "zam_a3")
MACROS = ("delete_adjacent_pair", "insert_adjacent_pair", "patch_replace")


# -- circles ---------------------------------------------------------------------

def circle_add(d: Diagram, color: int, orient: int = 0) -> Diagram:
    if not 1 <= color <= d.system.rank:
        raise RuleError(f"bad circle color {color}")
    o = ORIENT_NAMES[orient]
    if d.oriented != (o is not None):
        raise RuleError("circle orientation must match the system")
    out = d.copy()
    out.circles[(color, o)] += 1
    return out


def circle_remove(d: Diagram, color: int, orient: int = 0) -> Diagram:
    key = (color, ORIENT_NAMES[orient])
    if d.circles.get(key, 0) <= 0:
        raise RuleError(f"no circle {key} to remove")
    out = d.copy()
    out.circles[key] -= 1
    if not out.circles[key]:
        del out.circles[key]
    return out


# -- bridge ------------------------------------------------------------------------

def _component_of(d: Diagram, v: int) -> set[int]:
    for comp in d.components():
        if v in comp:
            return comp
    raise RuleError(f"unknown vertex {v}")


def bridge_ok(d: Diagram, x1: Dart, x3: Dart, fidx: dict | None = None) -> str | None:
    """Reason why ``bridge(d, x1, x3)`` is not allowed, or None."""
    if x1 not in d.alpha or x3 not in d.alpha:
        return "unknown dart"
    x2 = d.alpha[x1]
    if x3 in (x1, x2):
        return "identical edge bound twice"
    if d.color(x1) != d.color(x3):
        return "colors differ"
    if d.oriented and d.is_out(x1) != d.is_out(x3):
        return "orientation clash"
    same = fidx[x1] == fidx[x3] if fidx is not None else _same_face(d, x1, x3)
    if not same and x3[0] in _component_of(d, x1[0]):
        return "edges not on a common face"
    return None


def _same_face(d: Diagram, x1: Dart, x3: Dart) -> bool:
    y = d.phi(x1)
    while y != x1:
        if y == x3:
            return True
        y = d.phi(y)
    return False


def bridge(d: Diagram, x1: Dart, x3: Dart) -> Diagram:
    """Edges ``x1-x2`` and ``x3-x4`` become ``x1-x4`` and ``x3-x2``.

    ``x1`` and ``x3`` name the two edge-sides: the face to the right of
    ``x1 -> alpha(x1)`` must be the face to the right of ``x3 -> alpha(x3)``.
    """
    why = bridge_ok(d, x1, x3)
    if why:
        raise RuleError(why)
    x2, x4 = d.alpha[x1], d.alpha[x3]
    out = d.copy()
    out.pair(x1, x4)
    out.pair(x3, x2)
    return out


def bridge_site(x1: Dart, x3: Dart) -> tuple:
    return (x1[0], x1[1], x3[0], x3[1])


# -- cancellation of pairs -----------------------------------------------------------

def closed_pair_offset(d: Diagram, u: int, v: int) -> int | None:
    """``c`` with ``alpha(u.k) = v.(c-k)`` for all k, if ``u, v`` form a full gluing."""
    if u == v or u not in d.vertices or v not in d.vertices:
        return None
    if d.vertices[u].type != d.vertices[v].type:
        return None
    n = d.degree(u)
    y = d.alpha.get((u, 0))
    if y is None or y[0] != v:
        return None
    c = y[1]
    for k in range(n):
        if d.alpha.get((u, k)) != (v, (c - k) % n):
            return None
    return c


def cancel_pair(d: Diagram, u: int, v: int) -> Diagram:
    if closed_pair_offset(d, u, v) is None:
        raise RuleError("pattern is not a closed 2-vertex full gluing")
    if d.oriented:
        if d.vertices[u].kind == d.vertices[v].kind and d.m_of(u) % 2 == 1:
            raise RuleError("oriented direction mismatch")
        if any(d.is_out(x) == d.is_out(d.alpha[x]) for x in d.darts_of(u)):
            raise RuleError("oriented direction mismatch")
    out = d.copy()
    out.remove_vertex(u)
    out.remove_vertex(v)
    return out


def cancel_create(d: Diagram, i: int, j: int, kind: int = 0) -> Diagram:
    """Create a closed full gluing ``u.k <-> v.(-k)`` of type (i, j).

    ``kind`` is 0 on unoriented systems; 1 makes ``u`` of kind ``out`` and 2 of kind ``in``.
    """
    i, j = min(i, j), max(i, j)
    if not (1 <= i < j <= d.system.rank) or d.system.m(i, j) == 0:
        raise RuleError(f"bad vertex type ({i},{j})")
    if d.oriented != (kind != 0):
        raise RuleError("orientation kind must match the system")
    ku = {0: None, 1: "out", 2: "in"}[kind]
    kv = {0: None, 1: "in", 2: "out"}[kind]
    out = d.copy()
    u = out.add_vertex(i, j, ku)
    v = out.add_vertex(i, j, kv)
    n = out.degree(u)
    for k in range(n):
        out.pair((u, k), (v, (-k) % n))
    return out


# -- ZAM for a commuting strand ------------------------------------------------------

@dataclass
class CommutingChain:
    w: int
    s: int
    c: int
    crossings: list[int]
    facing: list[int]  # slot of each crossing that faces w


def commuting_chain(d: Diagram, w: int, s: int) -> CommutingChain:
    """The strand chain bound by a ZAM site: vertex ``w`` and its block ``s..s+m-1``."""
    if w not in d.vertices:
        raise RuleError(f"unknown vertex {w}")
    vx = d.vertices[w]
    m = d.m_of(w)
    n = 2 * m
    xs, fs = [], []
    c = None
    for k in range(m):
        y = d.alpha[(w, (s + k) % n)]
        x = y[0]
        if x == BOUNDARY or x == w or d.degree(x) != 4:
            raise RuleError("chain not consecutive")
        cx = d.color((x, (y[1] + 1) % 4))
        if c is None:
            c = cx
        if cx != c or x in xs:
            raise RuleError("chain not consecutive")
        xs.append(x)
        fs.append(y[1])
    assert c is not None
    sysm = d.system.m
    if c in vx.type or sysm(c, vx.i) != 2 or sysm(c, vx.j) != 2:
        raise RuleError("strand color does not commute with the vertex type")
    for k in range(m - 1):
        if d.alpha[(xs[k], (fs[k] + 3) % 4)] != (xs[k + 1], (fs[k + 1] + 1) % 4):
            raise RuleError("chain not consecutive")
    return CommutingChain(w, s % n, c, xs, fs)


def zam_commuting(d: Diagram, w: int, s: int) -> Diagram:
    return zam_commuting_ids(d, w, s)[0]


def zam_commuting_ids(d: Diagram, w: int, s: int) -> tuple[Diagram, list[int]]:
    """Move the strand crossing edges ``s..s+m-1`` of ``w`` to the other side.

    Returns the new diagram and the new crossings in strand order, starting
    from the end that preceded the first old crossing.
    """
    if d.oriented:
        raise RuleError("no commuting ZAM on oriented systems")
    ch = commuting_chain(d, w, s)
    m = d.m_of(w)
    n = 2 * m
    xs, fs = ch.crossings, ch.facing
    gone = set(xs) | {w}
    P = d.alpha[(xs[0], (fs[0] + 1) % 4)]
    Q = d.alpha[(xs[-1], (fs[-1] + 3) % 4)]
    outer = [d.alpha[(x, (f + 2) % 4)] for x, f in zip(xs, fs)]
    opp = [d.alpha[(w, (ch.s + m + j) % n)] for j in range(m)]
    for z in [P, Q] + outer + opp:
        if z[0] in gone:
            raise RuleError("degenerate ZAM site")
    out = d.copy()
    for x in xs:
        out.remove_vertex(x)
    for k in range(m):
        out.pair((w, (ch.s + k) % n), outer[k])
    ys = []
    for j in range(m):
        e = (ch.s + m + j) % n
        a = d.color((w, e))
        y = out.add_vertex(a, ch.c)
        g = 0 if a < ch.c else 1
        out.pair((y, g), (w, e))
        out.pair((y, (g + 2) % 4), opp[j])
        ys.append((y, g))
    for j in range(m - 1):
        (y0, g0), (y1, g1) = ys[j], ys[j + 1]
        out.pair((y0, (g0 + 3) % 4), (y1, (g1 + 1) % 4))
    (yf, gf), (yl, gl) = ys[0], ys[-1]
    out.pair((yf, (gf + 1) % 4), Q)
    out.pair((yl, (gl + 3) % 4), P)
    return out, [y for y, _ in reversed(ys)]


def zam_commuting_sites(d: Diagram) -> list[tuple[int, int]]:
    out = []
    for w in sorted(d.vertices):
        m = d.m_of(w)
        for s in range(2 * m):
            try:
                commuting_chain(d, w, s)
                zam_commuting(d, w, s)
            except DiagramError:
                continue
            out.append((w, s))
    return out


# -- ZAM templates for A3 --------------------------------------------------------

@dataclass
class TemplatePair:
    name: str
    side1: Diagram
    side2: Diagram

    def codes(self) -> tuple[list[str], list[str]]:
        """Canonical codes of every port rotation of each side."""
        out = []
        for p in (self.side1, self.side2):
            out.append([canonical_code(rotate_ports(p, r)) for r in range(len(p.ports))])
        return out[0], out[1]


_TEMPLATES: dict[tuple[str, str, int], TemplatePair] = {}
_TEMPLATE_CODES: dict[tuple[str, str, int], tuple[list[str], list[str]]] = {}
_BASE: dict[str, TemplatePair] = {}


def register_template(t: TemplatePair) -> None:
    """Install a template pair (replacing any previous one of the same name)."""
    _BASE[t.name] = t
    for key in [k for k in _TEMPLATES if k[0] == t.name]:
        del _TEMPLATES[key]
        del _TEMPLATE_CODES[key]


def load_rules(path) -> list[TemplatePair]:
    """Read every ``*.tpl`` file in a directory and install the template pairs found."""
    import os
    from .io import parse_template
    sides: dict[str, dict[int, Diagram]] = {}
    for fn in sorted(os.listdir(path)):
        if not fn.endswith(".tpl"):
            continue
        with open(os.path.join(path, fn), "rb") as fh:
            name, side, d = parse_template(fh.read())
        if side in sides.setdefault(name, {}):
            raise RuleError(f"{fn}: template {name} side {side} given twice")
        sides[name][side] = d
    out = []
    for name, pair in sorted(sides.items()):
        if set(pair) != {1, 2}:
            raise RuleError(f"template {name} lacks a side")
        if pair[1].boundary_signature() != pair[2].boundary_signature():
            raise RuleError(f"template {name}: sides disagree on the boundary")
        for p in pair.values():
            errs = validate(p)
            if errs:
                raise RuleError(f"template {name}: {errs[0]}")
        t = TemplatePair(name, pair[1], pair[2])
        register_template(t)
        out.append(t)
    return out


def builtin_rules_dir() -> str:
    import os
    return os.path.join(os.path.dirname(__file__), "data")


def recolor(p: Diagram, system, shift: int) -> Diagram:
    """Copy of ``p`` over ``system`` with every color raised by ``shift``."""
    out = Diagram(system, {v: Vertex(vx.i + shift, vx.j + shift, vx.kind) for v, vx in p.vertices.items()},
                  dict(p.alpha), [(c + shift, o) for c, o in p.ports])
    for (c, o), n in p.circles.items():
        out.circles[(c + shift, o)] += n
    return out


def template(system, shift: int = 0, name: str = "zam_a3") -> TemplatePair:
    """The named template pair placed on generators ``1+shift, 2+shift, ...`` of ``system``."""
    key = (name, system.name, shift)
    if key not in _TEMPLATES:
        if name not in _BASE:
            load_rules(builtin_rules_dir())
        if name not in _BASE:
            raise RuleError(f"unknown template {name}")
        base = _BASE[name]
        n = base.side1.system.rank
        if shift < 0 or shift + n > system.rank:
            raise RuleError("template does not fit the system")
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if system.m(i + shift, j + shift) != base.side1.system.m(i, j):
                    raise RuleError("template does not fit the system")
        t = TemplatePair(name, recolor(base.side1, system, shift), recolor(base.side2, system, shift))
        _TEMPLATES[key] = t
        _TEMPLATE_CODES[key] = t.codes()
    return _TEMPLATES[key]


def match_template(d: Diagram, inside, shift: int = 0, name: str = "zam_a3") -> tuple[int, int] | None:
    """``(direction, rotation)`` if the region ``inside`` is a copy of a template side."""
    try:
        t = template(d.system, shift, name)
    except RuleError:
        return None
    c1, c2 = _TEMPLATE_CODES[(name, d.system.name, shift)]
    try:
        reg = region_from_vertices(d, inside)
    except DiagramError:
        return None
    code = None
    for direction, codes in ((0, c1), (1, c2)):
        side = (t.side1, t.side2)[direction]
        if len(inside) != len(side.vertices) or len(reg.attach) != len(side.ports):
            continue
        if code is None:
            code = canonical_code(cut_patch(d, reg))
        for r, c in enumerate(codes):
            if c == code:
                return direction, r
    return None


def zam_a3(d: Diagram, shift: int, direction: int, rotation: int, *inside: int) -> Diagram:
    """Replace a copy of one template side (ports rotated by ``rotation``) by the other side."""
    t = template(d.system, shift)
    src, dst = (t.side1, t.side2) if direction == 0 else (t.side2, t.side1)
    reg = region_from_vertices(d, inside)
    patch = cut_patch(d, reg)
    if canonical_code(patch) != canonical_code(rotate_ports(src, rotation)):
        raise RuleError("no embedding at site")
    out, _ = replace_region(d, reg, rotate_ports(dst, rotation))
    return out


# -- dispatch ------------------------------------------------------------------------

def apply_primitive(d: Diagram, rule: str, site: tuple) -> Diagram:
    if rule == "circle_add":
        return circle_add(d, *site)
    if rule == "circle_remove":
        return circle_remove(d, *site)
    if rule == "bridge":
        v1, s1, v3, s3 = site
        return bridge(d, (v1, s1), (v3, s3))
    if rule == "cancel_pair":
        return cancel_pair(d, *site)
    if rule == "cancel_create":
        return cancel_create(d, *site)
    if rule == "zam_commuting":
        return zam_commuting(d, *site)
    if rule == "zam_a3":
        return zam_a3(d, *site)
    raise RuleError(f"unknown primitive {rule}")


# -- macros ----------------------------------------------------------------------------

def delete_adjacent_pair(rec, u: int, a: int, v: int, b: int) -> None:
    """Delete ``u`` and ``v`` joined by the edge ``u.a - v.b``: bridge, then cancel.

    ``rec`` is a Recorder; the expansion is recorded as one macro step.
    """
    d = rec.d
    if u == v or u not in d.vertices or v not in d.vertices:
        raise RuleError("need two distinct vertices")
    if d.vertices[u].type != d.vertices[v].type:
        raise RuleError("vertices of different types")
    if d.alpha.get((u, a)) != (v, b):
        raise RuleError("vertices not joined at the given slots")
    n = d.degree(u)

    def body(sub) -> None:
        for k in range(1, n):
            du, dv = (u, (a - k) % n), (v, (b + k) % n)
            if sub.d.alpha[du] == dv:
                continue
            x1 = sub.d.alpha[du]
            why = bridge_ok(sub.d, x1, dv)
            if why:
                raise RuleError(f"bridging blocked: {why}")
            sub.apply("bridge", *bridge_site(x1, dv))
        sub.apply("cancel_pair", u, v)

    rec.macro("delete_adjacent_pair", (u, a, v, b), body)


def insert_adjacent_pair(rec, x: Dart, i: int, j: int, t: int, kind: int = 0) -> tuple[int, int]:
    """Subdivide the edge at ``x`` by a canceling pair of type (i, j).

    The new ``u`` meets ``x`` at slot ``t``.  With ``x = (-c, orient)`` (a
    negative vertex id) a circle of color ``c`` is consumed instead.
    """
    d = rec.d
    i, j = min(i, j), max(i, j)
    site = (x[0], x[1], i, j, t, kind)
    u = d.new_id()
    if x[0] < 0:
        c = -x[0]
        if c not in (i, j):
            raise RuleError("circle color not in vertex type")

        def on_circle(sub) -> None:
            sub.apply("circle_remove", c, x[1])
            sub.apply("cancel_create", i, j, kind)

        rec.macro("insert_adjacent_pair", site, on_circle)
        return u, u + 1
    if x not in d.alpha or x[0] == BOUNDARY:
        raise RuleError("unknown edge")
    c = d.color(x)
    if c not in (i, j):
        raise RuleError("color/type mismatch")
    if (i if t % 2 == 0 else j) != c:
        raise RuleError("color/type mismatch")

    def on_edge(sub) -> None:
        sub.apply("cancel_create", i, j, kind)
        n = sub.d.degree(u)
        target = (u + 1, (-t) % n)
        why = bridge_ok(sub.d, x, target)
        if why:
            raise RuleError(why)
        sub.apply("bridge", *bridge_site(x, target))

    rec.macro("insert_adjacent_pair", site, on_edge)
    return u, u + 1


def insertion_choices(d: Diagram, x: Dart, i: int, j: int) -> list[tuple[int, int]]:
    """Valid ``(t, kind)`` for inserting a pair of type (i, j) on the edge at ``x``."""
    i, j = min(i, j), max(i, j)
    c = d.color(x)
    m = d.system.m(i, j)
    out = []
    for kind in ((1, 2) if d.oriented else (0,)):
        ku = {0: None, 1: "out", 2: "in"}[kind]
        for t in range(2 * m):
            col = i if t % 2 == 0 else j
            if col != c:
                continue
            if d.oriented:
                v_out = not ((t in out_slots(m, ku)))
                if v_out != d.is_out(x):
                    continue
            out.append((t, kind))
    return out


def delete_sites(d: Diagram) -> list[tuple[int, int, int, int]]:
    """Edges joining two distinct vertices of the same type."""
    out = []
    for (p, q) in d.edges():
        if p[0] == BOUNDARY or q[0] == BOUNDARY or p[0] == q[0]:
            continue
        if d.vertices[p[0]].type == d.vertices[q[0]].type:
            out.append((p[0], p[1], q[0], q[1]))
    return out


# -- matching --------------------------------------------------------------------------

def _site_key(site: tuple) -> str:
    import json
    return json.dumps(site)


def find_matches(d: Diagram, rule: str) -> list[tuple]:
    """Every site where ``rule`` applies, in canonical serialization order.

    Creation rules (``circle_add``, ``cancel_create``) list one site per
    color or vertex type; ``insert_adjacent_pair`` is not enumerated.
    """
    sys = d.system
    kinds = (1, 2) if d.oriented else (0,)
    out: list[tuple] = []
    if rule == "circle_add":
        out = [(c, k) for c in sys.generators for k in kinds]
    elif rule == "circle_remove":
        out = [(c, ORIENT_CODES[o]) for (c, o), n in d.circles.items() for _ in range(n)]
    elif rule == "bridge":
        fidx = face_index(d)
        comp = {v: n for n, c in enumerate(d.components()) for v in c}
        darts = sorted(d.alpha)
        for x1 in darts:
            for x3 in darts:
                # separate components float in a common face
                near = fidx[x1] == fidx[x3] or comp[x1[0]] != comp[x3[0]]
                if x1 < x3 and near and not bridge_ok(d, x1, x3, fidx):
                    out.append(bridge_site(x1, x3))
    elif rule == "cancel_pair":
        for u in sorted(d.vertices):
            for v in sorted(d.vertices):
                if u < v and closed_pair_offset(d, u, v) is not None:
                    try:
                        cancel_pair(d, u, v)
                    except RuleError:
                        continue
                    out.append((u, v))
    elif rule == "cancel_create":
        out = [(i, j, k) for i in sys.generators for j in sys.generators
               if i < j and sys.m(i, j) != 0 for k in kinds]
    elif rule == "zam_commuting":
        out = zam_commuting_sites(d) if not d.oriented else []
    elif rule == "zam_a3":
        from .generate import zam_a3_sites
        out = zam_a3_sites(d)
        out += _reverse_a3_sites(d)
    elif rule == "delete_adjacent_pair":
        from .trace import Recorder
        for site in delete_sites(d):
            try:
                delete_adjacent_pair(Recorder(d, record=False), *site)
            except RuleError:
                continue
            out.append(site)
    else:
        raise RuleError(f"unknown rule {rule}")
    return sorted(set(out), key=_site_key)


def _reverse_a3_sites(d: Diagram, cap: int = 20000) -> list[tuple]:
    """Sites where the large side of the A3 template occurs.

    Connected vertex sets are grown breadth first; a growth step producing
    more than ``cap`` candidate sets is cut off, so on big diagrams this
    enumeration can miss sites.
    """
    sys = d.system
    if d.oriented or sys.family != "A" or sys.rank < 3:
        return []
    out = []
    for shift in range(sys.rank - 2):
        t = template(sys, shift)
        size = len(t.side2.vertices)
        types = sorted(vx.type for vx in t.side2.vertices.values())
        quota = Counter(types)
        if any(d.count_type(ty) < k for ty, k in quota.items()):
            continue
        for v in sorted(d.vertices):
            if d.vertices[v].type not in quota:
                continue
            # grow connected vertex sets of the right size from v, within the type quota
            frontier = [frozenset([v])]
            for _ in range(size - 1):
                nxt = set()
                for S in frontier:
                    used = Counter(d.vertices[w].type for w in S)
                    for w in S:
                        for x in d.darts_of(w):
                            y = d.alpha[x][0]
                            if y == BOUNDARY or y in S or y < v:
                                continue
                            ty = d.vertices[y].type
                            if used[ty] < quota[ty]:
                                nxt.add(S | {y})
                frontier = sorted(nxt, key=sorted)[:cap]
            for S in frontier:
                if sorted(d.vertices[w].type for w in S) != types:
                    continue
                hit = match_template(d, tuple(sorted(S)), shift)
                if hit and hit[0] == 1:
                    out.append((shift, 1, hit[1]) + tuple(sorted(S)))
    return out
