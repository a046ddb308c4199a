"""Statistics and drawings of diagrams."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .planar import BOUNDARY, Dart, Diagram, classify_angles, euler_report, faces

PALETTES = {
    "A": {1: "#1f5fd1", 2: "#d62728", 3: "#2ca02c", 4: "#e6b800"},
    "I": {1: "#1f5fd1", 2: "#2ca02c"},
    "BI": {1: "#1f5fd1", 2: "#2ca02c"},
}
FALLBACK = ["#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f"]


@dataclass
class ComponentStats:
    V: int
    E: int
    F: int
    euler: int
    has_boundary: bool


@dataclass
class StatsReport:
    components: list[ComponentStats] = field(default_factory=list)
    vertex_types: dict[str, int] = field(default_factory=dict)
    angles: dict[str, int] = field(default_factory=dict)
    circles: int = 0

    @property
    def V(self) -> int:
        return sum(c.V for c in self.components)

    @property
    def E(self) -> int:
        return sum(c.E for c in self.components)

    def as_dict(self) -> dict:
        return {"V": self.V, "E": self.E,
                "components": [c.__dict__ for c in self.components],
                "vertex_types": self.vertex_types, "angles": self.angles, "circles": self.circles}


def stats(d: Diagram) -> StatsReport:
    rep = StatsReport()
    for r in euler_report(d):
        rep.components.append(ComponentStats(r.V, r.E, r.F, r.chi, r.has_boundary))
    types = Counter(f"{vx.i},{vx.j}" for vx in d.vertices.values())
    rep.vertex_types = dict(sorted(types.items()))
    if d.oriented:
        ang = Counter(classify_angles(d).values())
        rep.angles = {"uniform": ang.get("uniform", 0), "varied": ang.get("varied", 0)}
    rep.circles = sum(d.circles.values())
    return rep


# -- rendering ------------------------------------------------------------------------

@dataclass
class RenderSpec:
    format: str = "svg"            # dot | svg
    layout: str = "tutte"          # tutte | force
    palette: dict[int, str] = field(default_factory=dict)
    arrowheads: bool = True

    def color(self, d: Diagram, c: int) -> str:
        if c in self.palette:
            return self.palette[c]
        pal = PALETTES.get(d.system.family, {})
        return pal.get(c, FALLBACK[(c - 1) % len(FALLBACK)])


def render(d: Diagram, spec: RenderSpec | None = None) -> bytes:
    spec = spec or RenderSpec()
    if spec.format == "dot":
        return _dot(d, spec)
    if spec.format == "svg":
        return _svg(d, spec)
    raise ValueError(f"unknown render format {spec.format}")


def _edges(d: Diagram) -> list[tuple[Dart, Dart]]:
    out = []
    for a, b in d.edges():
        if d.oriented and d.is_out(b):
            a, b = b, a
        out.append((a, b))
    return out


def _dot(d: Diagram, spec: RenderSpec) -> bytes:
    lines = ["digraph diagram {" if d.oriented else "graph diagram {", "  node [shape=circle];"]
    arrow = "->" if d.oriented else "--"
    for v in sorted(d.vertices):
        vx = d.vertices[v]
        lines.append(f'  v{v} [label="{vx.i}{vx.j}"];')
    for k in range(len(d.ports)):
        lines.append(f'  p{k} [shape=point, label=""];')
    for a, b in _edges(d):
        na = f"p{a[1]}" if a[0] == BOUNDARY else f"v{a[0]}"
        nb = f"p{b[1]}" if b[0] == BOUNDARY else f"v{b[0]}"
        c = d.color(a) if a[0] != BOUNDARY else d.color(b)
        lines.append(f'  {na} {arrow} {nb} [color="{spec.color(d, c)}"];')
    for (c, _), n in sorted(d.circles.items(), key=str):
        for k in range(n):
            lines.append(f'  circle{c}_{k} [shape=circle, label="", color="{spec.color(d, c)}"];')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode()


def _outer_face(d: Diagram) -> list[int]:
    """Vertices of the face pinned to the rim: the outer boundary, else the largest face."""
    if d.ports:
        return []
    fs = faces(d)
    if not fs:
        return []
    big = max(fs, key=len)
    seen: list[int] = []
    for x in big:
        if x[0] not in seen:
            seen.append(x[0])
    return seen


def layout(d: Diagram, method: str = "tutte", rounds: int = 400) -> dict:
    """Positions in the unit disc for vertices (ids) and ports (``("p", k)``)."""
    pos: dict = {}
    pinned: set = set()
    rim = [("p", k) for k in range(len(d.ports))] or _outer_face(d)
    for n, key in enumerate(rim):
        t = 2 * math.pi * n / max(1, len(rim))
        pos[key] = (math.cos(t), math.sin(t))
        pinned.add(key)
    nbrs: dict = {v: [] for v in d.vertices}
    for a, b in d.edges():
        ka = ("p", a[1]) if a[0] == BOUNDARY else a[0]
        kb = ("p", b[1]) if b[0] == BOUNDARY else b[0]
        for x, y in ((ka, kb), (kb, ka)):
            if x in nbrs:
                nbrs[x].append(y)
    free = sorted(v for v in d.vertices if v not in pinned)
    for n, v in enumerate(free):
        t = 2.399963 * n   # golden-angle spiral start
        r = 0.6 * math.sqrt((n + 0.5) / max(1, len(free)))
        pos[v] = (r * math.cos(t), r * math.sin(t))
    if method == "tutte" and pinned:
        for _ in range(rounds):
            for v in free:
                ns = [pos[w] for w in nbrs[v] if w in pos and w != v]
                if ns:
                    pos[v] = (sum(p[0] for p in ns) / len(ns), sum(p[1] for p in ns) / len(ns))
    else:
        _force(pos, free, nbrs, rounds)
    return pos


def _force(pos: dict, free: list, nbrs: dict, rounds: int) -> None:
    k = 1.0 / math.sqrt(max(1, len(pos)))
    for step in range(rounds):
        temp = 0.1 * (1 - step / rounds)
        for v in free:
            fx = fy = 0.0
            x, y = pos[v]
            for w, (wx, wy) in pos.items():
                if w == v:
                    continue
                dx, dy = x - wx, y - wy
                dist = math.hypot(dx, dy) or 1e-6
                rep = k * k / dist
                fx += dx / dist * rep
                fy += dy / dist * rep
            for w in nbrs[v]:
                if w in pos and w != v:
                    dx, dy = x - pos[w][0], y - pos[w][1]
                    dist = math.hypot(dx, dy) or 1e-6
                    att = dist * dist / k
                    fx -= dx / dist * att
                    fy -= dy / dist * att
            norm = math.hypot(fx, fy) or 1.0
            nx, ny = x + fx / norm * min(norm, temp), y + fy / norm * min(norm, temp)
            r = math.hypot(nx, ny)
            if r > 0.95:
                nx, ny = nx * 0.95 / r, ny * 0.95 / r
            pos[v] = (nx, ny)


def _svg(d: Diagram, spec: RenderSpec, size: int = 480) -> bytes:
    try:
        pos = layout(d, spec.layout)
    except (ValueError, ZeroDivisionError, KeyError):
        pos = layout(d, "force")
    half = size / 2

    def pt(key) -> tuple[float, float]:
        x, y = pos[key]
        return half + 0.85 * half * x, half - 0.85 * half * y

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    if d.oriented and spec.arrowheads:
        out.append('<defs><marker id="arr" viewBox="0 0 10 10" refX="14" refY="5" markerWidth="6" '
                   'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#333"/></marker></defs>')
    if d.ports:
        out.append(f'<circle cx="{half}" cy="{half}" r="{0.85 * half:.1f}" fill="none" '
                   f'stroke="#bbb" stroke-dasharray="4 3"/>')
    bend = Counter()
    for a, b in _edges(d):
        ka = ("p", a[1]) if a[0] == BOUNDARY else a[0]
        kb = ("p", b[1]) if b[0] == BOUNDARY else b[0]
        c = d.color(a) if a[0] != BOUNDARY else d.color(b)
        (x1, y1), (x2, y2) = pt(ka), pt(kb)
        key = tuple(sorted((str(ka), str(kb))))
        n = bend[key]
        bend[key] += 1
        off = (n + 1) // 2 * (1 if n % 2 else -1) * 14
        mx, my = (x1 + x2) / 2, (y1 + y2) / 2
        dx, dy = x2 - x1, y2 - y1
        ln = math.hypot(dx, dy) or 1.0
        if ka == kb:
            cx, cy = x1 + 30, y1 - 30 - off
        else:
            cx, cy = mx - dy / ln * off, my + dx / ln * off
        marker = ' marker-end="url(#arr)"' if d.oriented and spec.arrowheads else ""
        out.append(f'<path d="M{x1:.1f},{y1:.1f} Q{cx:.1f},{cy:.1f} {x2:.1f},{y2:.1f}" fill="none" '
                   f'stroke="{spec.color(d, c)}" stroke-width="2"{marker}/>')
    for v in sorted(d.vertices):
        x, y = pt(v)
        out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="5" fill="#222"/>')
    n = 0
    for (c, _), cnt in sorted(d.circles.items(), key=str):
        for _ in range(cnt):
            out.append(f'<circle cx="{20 + 24 * n}" cy="20" r="9" fill="none" '
                       f'stroke="{spec.color(d, c)}" stroke-width="2"/>')
            n += 1
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode()
