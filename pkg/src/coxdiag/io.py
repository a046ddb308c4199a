"""Text format for diagrams and templates.

::

    group A 3              # or I m / BI m
    vertex 1 1 2           # vertex id, type (i, j), optional out|in
    edge 1.0 2.5           # pair two darts; ``>`` marks the first as tail
    boundary 1.1 ~2 1.2 ~2 # ccw outer-face order of the unpaired darts
    arc 1 3                # boundary points 1 and 3 joined directly
    circle 1 [cw|ccw]

A boundary point that is joined straight to another boundary point has no
dart; it is written ``~<color>`` (``~<color>:out`` or ``:in`` on oriented
systems) and paired by an ``arc`` line.
"""
from __future__ import annotations

from .coxeter import CoxeterSystem, build_system, explicit_system
from .planar import BOUNDARY, Dart, Diagram, DiagramError, validate


class ParseError(DiagramError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def system_header(sys: CoxeterSystem) -> str:
    if sys.family == "A":
        return f"group A {sys.rank}"
    if sys.family == "I":
        return f"group I {sys.m(1, 2)}"
    if sys.family == "BI":
        return f"group BI {sys.m(1, 2)}"
    rows = ";".join(",".join(str(x) for x in row) for row in sys.exponents)
    return f"group X {rows}" + (" oriented" if sys.oriented else "")


def _parse_group(toks: list[str], lineno: int) -> CoxeterSystem:
    if len(toks) < 2:
        raise ParseError(lineno, "group needs a family and a parameter")
    fam = toks[0].upper()
    try:
        if fam == "X":
            rows = [[int(x) for x in r.split(",")] for r in toks[1].split(";")]
            return explicit_system(rows, oriented="oriented" in toks[2:])
        return build_system(fam, int(toks[1]))
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None


def parse(text: str | bytes, system: CoxeterSystem | None = None) -> Diagram:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    d: Diagram | None = Diagram(system) if system is not None else None
    tails: list[tuple[int, Dart, Dart]] = []
    boundary: list[Dart | tuple[int, bool | None]] | None = None
    arcs: list[tuple[int, str, str]] = []
    pending_edges: list[tuple[int, str, str, bool]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *toks = line.split()
        if key == "template":
            continue
        if key == "group":
            if d is not None and d.vertices:
                raise ParseError(lineno, "group header must come first")
            d = Diagram(_parse_group(toks, lineno))
            continue
        if d is None:
            raise ParseError(lineno, "missing group header")
        if key == "vertex":
            if len(toks) not in (3, 4):
                raise ParseError(lineno, "vertex <id> <i> <j> [out|in]")
            try:
                vid, i, j = int(toks[0]), int(toks[1]), int(toks[2])
            except ValueError:
                raise ParseError(lineno, "vertex fields must be integers") from None
            kind = toks[3] if len(toks) == 4 else None
            if kind not in (None, "out", "in"):
                raise ParseError(lineno, f"unknown orientation {kind!r}")
            if d.oriented != (kind is not None):
                raise ParseError(lineno, "orientation kind required exactly on BI systems")
            if vid in d.vertices or vid <= 0:
                raise ParseError(lineno, f"bad or repeated vertex id {vid}")
            if not (1 <= min(i, j) and max(i, j) <= d.system.rank and i != j):
                raise ParseError(lineno, f"bad vertex type ({i},{j})")
            d.add_vertex(i, j, kind, vid)
        elif key == "edge":
            if len(toks) not in (2, 3) or (len(toks) == 3 and toks[2] != ">"):
                raise ParseError(lineno, "edge <v>.<slot> <v>.<slot> [>]")
            pending_edges.append((lineno, toks[0], toks[1], len(toks) == 3))
        elif key == "boundary":
            if boundary is not None:
                raise ParseError(lineno, "repeated boundary line")
            boundary = []
            for t in toks:
                if t.startswith("~"):
                    boundary.append(_free_port(d, t, lineno))
                else:
                    boundary.append(_dart_tok(d, t, lineno))
        elif key == "arc":
            if len(toks) != 2:
                raise ParseError(lineno, "arc <k> <j>")
            arcs.append((lineno, toks[0], toks[1]))
        elif key == "circle":
            if not toks:
                raise ParseError(lineno, "circle <color> [cw|ccw]")
            c = int(toks[0])
            if not 1 <= c <= d.system.rank:
                raise ParseError(lineno, f"bad circle color {c}")
            o = toks[1] if len(toks) > 1 else None
            if o not in (None, "cw", "ccw"):
                raise ParseError(lineno, f"bad circle direction {o!r}")
            d.circles[(c, o)] += 1
        else:
            raise ParseError(lineno, f"unknown key {key!r}")
    if d is None:
        raise ParseError(0, "empty file")
    edge_line: dict[Dart, int] = {}
    for lineno, a, b, tail in pending_edges:
        x = _dart_tok(d, a, lineno)
        y = _dart_tok(d, b, lineno)
        for z in (x, y):
            if z in d.alpha:
                raise ParseError(lineno, f"dart {z} paired twice")
        if x == y:
            raise ParseError(lineno, "dart paired with itself")
        d.pair(x, y)
        edge_line[x] = lineno
        if tail:
            tails.append((lineno, x, y))
    if boundary is not None:
        d.ports = []
        free = set()
        for k, x in enumerate(boundary):
            if x[0] < 0:
                d.ports.append((-x[0], x[1]))
                free.add(k)
                continue
            if x in d.alpha:
                raise ParseError(0, f"boundary dart {x} is also paired")
            o = None if not d.oriented else not d.is_out(x)
            d.ports.append((d.color(x), o))
            d.pair(x, (BOUNDARY, k))
        for lineno, a, b in arcs:
            try:
                k, j = int(a), int(b)
            except ValueError:
                raise ParseError(lineno, "arc ends must be boundary positions") from None
            if k not in free or j not in free or k == j:
                raise ParseError(lineno, f"arc {k} {j} must join two free boundary points")
            if (BOUNDARY, k) in d.alpha or (BOUNDARY, j) in d.alpha:
                raise ParseError(lineno, "boundary point joined twice")
            if d.ports[k][0] != d.ports[j][0]:
                raise ParseError(lineno, "color mismatch on arc")
            d.pair((BOUNDARY, k), (BOUNDARY, j))
        for k in free:
            if (BOUNDARY, k) not in d.alpha:
                raise ParseError(0, f"free boundary point {k} has no arc")
    elif arcs:
        raise ParseError(arcs[0][0], "arc without boundary line")
    for lineno, x, y in tails:
        if d.is_out(x) is not True or d.is_out(y) is not False:
            raise ParseError(lineno, "orientation mismatch with '>' marker")
    for a, b in d.alpha.items():
        if a[0] != BOUNDARY and b[0] != BOUNDARY and d.color(a) != d.color(b):
            raise ParseError(edge_line.get(a, edge_line.get(b, 0)), f"color mismatch on edge {a}-{b}")
    errs = validate(d)
    if errs:
        raise ParseError(0, errs[0])
    return d


def _free_port(d: Diagram, tok: str, lineno: int) -> tuple[int, bool | None]:
    body, _, o = tok[1:].partition(":")
    try:
        c = int(body)
    except ValueError:
        raise ParseError(lineno, f"bad boundary point {tok!r}") from None
    if not 1 <= c <= d.system.rank:
        raise ParseError(lineno, f"bad color {c}")
    if d.oriented != bool(o) or o not in ("", "out", "in"):
        raise ParseError(lineno, "free boundary points carry out|in exactly on oriented systems")
    # negative first entry marks a free point until ports are built
    return (-c, None if not o else o == "out")


def _dart_tok(d: Diagram, tok: str, lineno: int) -> Dart:
    try:
        v, s = tok.split(".")
        vid, slot = int(v), int(s)
    except ValueError:
        raise ParseError(lineno, f"bad dart {tok!r}") from None
    if vid not in d.vertices:
        raise ParseError(lineno, f"unknown vertex {vid}")
    if not 0 <= slot < d.degree(vid):
        raise ParseError(lineno, f"slot {slot} out of range for vertex {vid}")
    return (vid, slot)


def serialize(d: Diagram) -> bytes:
    lines = [system_header(d.system)]
    for v in sorted(d.vertices):
        vx = d.vertices[v]
        kind = f" {vx.kind}" if vx.kind else ""
        lines.append(f"vertex {v} {vx.i} {vx.j}{kind}")
    for a, b in d.edges():
        if a[0] == BOUNDARY or b[0] == BOUNDARY:
            continue
        tail = ""
        if d.oriented:
            if d.is_out(b):
                a, b = b, a
            tail = " >"
        lines.append(f"edge {a[0]}.{a[1]} {b[0]}.{b[1]}{tail}")
    if d.ports:
        toks = []
        arcs = []
        for k, (c, o) in enumerate(d.ports):
            x = d.alpha[(BOUNDARY, k)]
            if x[0] == BOUNDARY:
                toks.append(f"~{c}" + ("" if o is None else (":out" if o else ":in")))
                if k < x[1]:
                    arcs.append(f"arc {k} {x[1]}")
            else:
                toks.append(f"{x[0]}.{x[1]}")
        lines.append("boundary " + " ".join(toks))
        lines.extend(arcs)
    for (c, o), n in sorted(d.circles.items(), key=lambda t: (t[0][0], str(t[0][1]))):
        for _ in range(n):
            lines.append(f"circle {c}" + (f" {o}" if o else ""))
    return ("\n".join(lines) + "\n").encode("utf-8")


def load(path) -> Diagram:
    with open(path, "rb") as fh:
        return parse(fh.read())


def write_atomic(path, data: bytes) -> None:
    """Write through a temporary file in the same directory, then rename."""
    import os
    import tempfile
    dirname = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save(d: Diagram, path) -> None:
    write_atomic(path, serialize(d))


# -- template rule files ----------------------------------------------------------------------

def template_bytes(name: str, side: int, patch: Diagram) -> bytes:
    """A template side: ``template <name> side <1|2>`` followed by the diagram."""
    if side not in (1, 2):
        raise ValueError("side must be 1 or 2")
    return f"template {name} side {side}\n".encode() + serialize(patch)


def parse_template(data: str | bytes) -> tuple[str, int, Diagram]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 4 or toks[0] != "template" or toks[2] != "side" or toks[3] not in ("1", "2"):
            raise ParseError(lineno, "expected 'template <name> side <1|2>'")
        d = parse(text)
        if not d.ports:
            raise ParseError(lineno, "a template side needs a boundary")
        return toks[1], int(toks[3]), d
    raise ParseError(1, "empty template file")
