"""Clearing the lowest color of an A-type chain of colors.

Call the lowest present color *blue* (``lo``) and the next one *red*.
Nodes are blue/red vertices; every other blue vertex is a crossing with a
color that commutes with blue.  Each step works on a face of the blue
subgraph that is a disc with no blue inside (one always exists):

* if the face is bounded by a closed curve without nodes, its inside is
  replaced by a sweepable filling of the curve's word and the curve is
  swept across it, one commuting ZAM or canceling pair at a time;
* otherwise an arc ``E`` between nodes ``X`` and ``Y`` is normalized to a
  single blue/green crossing or nothing (green is ``lo+2``): the other
  crossings are pushed off around ``X`` and ``Y`` by commuting ZAMs;
* an empty arc lets ``X`` and ``Y`` be deleted as an adjacent pair; a
  single crossing on a face of size at least 3 is removed by the A3
  template, which shrinks the face by one.

Patch replacements inside the disc are certified recursively: the gluing
of old and new patch has no nodes (or no blue at all), so its reduction
uses strictly less.
"""
from __future__ import annotations

from .colorfaces import BoundaryCycle, ColorFace, FaceArc, color_faces, disc_region, face_arcs
from .coxeter import CoxeterSystem, _rfg, compose, word_to_element
from .patches import build_patch, fill_word
from .planar import BOUNDARY, Dart, Diagram, DiagramError
from .rules import delete_adjacent_pair, match_template
from .trace import Recorder

Word = tuple[int, ...]


class FaceError(DiagramError):
    pass


# -- filling holes in a partial patch -----------------------------------------------

def stub_faces(q: Diagram) -> list[list[Dart]]:
    """Unpaired darts grouped by face, each list in face-walk order."""
    darts = list(q.darts())
    seen: set[Dart] = set()
    out = []
    for x0 in darts:
        if x0 in seen:
            continue
        stubs = []
        x = x0
        while x not in seen:
            seen.add(x)
            y = q.alpha.get(x)
            if y is None:
                stubs.append(x)
                y = x
            x = q.sigma(y)
        if stubs:
            out.append(stubs)
    return out


def paste(q: Diagram, stubs: list[Dart], p: Diagram) -> None:
    """Attach patch ``p`` so that its port ``k`` meets ``stubs[k]`` (in place)."""
    base = q.new_id()
    vmap = {v: base + n for n, v in enumerate(sorted(p.vertices))}
    for v, vx in p.vertices.items():
        q.vertices[vmap[v]] = vx

    def img(x: Dart) -> Dart:
        return stubs[x[1]] if x[0] == BOUNDARY else (vmap[x[0]], x[1])

    for x, y in p.alpha.items():
        q.alpha[img(x)] = img(y)


def complete(q: Diagram) -> Diagram:
    """Fill every face of a partial patch that has loose ends."""
    q = q.copy()
    for stubs in stub_faces(q):
        ccw = stubs[::-1]
        word = tuple(q.color(x) for x in ccw)
        p, _ = fill_word(q.system, word)
        paste(q, ccw, p)
    return q


# -- sweeping a closed curve across a filled disc -----------------------------------

def clear_curve(rec: Recorder, cyc: BoundaryCycle, face: ColorFace, budget) -> None:
    from .reduce import replace_certified
    d = rec.d
    region = disc_region(d, cyc, face, with_crossings=False)
    word = tuple(d.color(x) for x in region.attach)
    p, ops = fill_word(d.system, word)
    _, made = build_patch(d.system, word, ops)
    vmap = replace_certified(rec, region, p, budget)
    front = [x[0] for x in region.attach]
    for op, v in zip(ops, made):
        budget.spend()
        d = rec.d
        if op.kind == "braid":
            w = vmap[v]
            m = op.m
            n = 2 * m
            s = next(k for k in range(n)
                     if all(d.alpha[(w, (k + q) % n)][0] == front[op.pos + q] for q in range(m)))
            rec.apply("zam_commuting", w, s)
            d = rec.d
            front[op.pos:op.pos + m] = [d.alpha[(w, (s + 2 * m - 1 - q) % n)][0] for q in range(m)]
        else:
            a, b = front[op.pos], front[op.pos + 1]
            ia = next(k for k in range(4) if d.alpha[(a, k)][0] == b and d.color((a, k)) != cyc.color)
            delete_adjacent_pair(rec, a, ia, *d.alpha[(a, ia)])
            del front[op.pos:op.pos + 2]
    if front:
        raise FaceError("sweep left crossings behind")


# -- arc normalization -----------------------------------------------------------------

def _shortest(sys: CoxeterSystem, g) -> Word:
    """A reduced word for ``g``, found by peeling descents off the right."""
    out: list[int] = []
    while sys.length(g) > 0:
        for s in sys.generators:
            h = compose(g, sys.generator_perm(s))
            if sys.length(h) < sys.length(g):
                out.append(s)
                g = h
                break
    return tuple(reversed(out))


def decompose_arc(sys: CoxeterSystem, lo: int, hi: int, word: Word) -> tuple[Word, Word, Word]:
    """``(a, t, b)`` with ``word = a t b`` in the group, where ``t`` is empty or
    ``(lo+2,)`` and ``a, b`` avoid ``lo+2``.

    ``lo..hi`` is an A-type chain of colors; letters outside it commute with
    the whole chain and are collected into ``a``.
    """
    inner = tuple(c for c in word if lo + 2 <= c <= hi)
    rest = tuple(c for c in word if not lo + 2 <= c <= hi)
    w = _rfg(inner, lo + 2, hi) if inner else ()
    if lo + 2 in w:
        k = w.index(lo + 2)
        a, t, b = rest + w[:k], (lo + 2,), w[k + 1:]
    else:
        a, t, b = rest + w, (), ()
    a = _shortest(sys, word_to_element(sys, a))
    b = _shortest(sys, word_to_element(sys, b))
    return a, t, b


def _times(sys: CoxeterSystem, *words: Word) -> Word:
    return _shortest(sys, word_to_element(sys, tuple(c for w in words for c in w)))


# -- choosing a disc face ----------------------------------------------------------------

def _simple(cyc: BoundaryCycle) -> bool:
    """True if no vertex is visited twice by the walk."""
    vs = [cr.vertex for cr in cyc.corners]
    return len(vs) == len(set(vs))


def leaf_faces(d: Diagram, c: int) -> list[tuple[BoundaryCycle, ColorFace]]:
    """Disc faces of the ``c``-subgraph with a simple boundary, smallest first."""
    out = []
    for f in color_faces(d, c):
        if f.is_disc and _simple(f.cycles[0]):
            out.append((f.cycles[0], f))
    out.sort(key=lambda p: (p[0].size, len(p[0].corners), len(p[1].interior)))
    return out


def clear_free_color(rec: Recorder, c: int, budget) -> bool:
    """Sweep away one closed curve of a color that commutes with all others present."""
    for cyc, face in leaf_faces(rec.d, c):
        if cyc.size == 0:
            clear_curve(rec, cyc, face, budget)
            return True
    return False


def reduce_achain_step(rec: Recorder, lo: int, hi: int, budget) -> bool:
    leaves = leaf_faces(rec.d, lo)
    for cyc, face in leaves:
        if cyc.size == 0:
            clear_curve(rec, cyc, face, budget)
            return True
    for cyc, face in leaves:
        if face_step(rec, lo, hi, cyc, face, budget):
            return True
    return False


# -- faces with nodes --------------------------------------------------------------------

def face_step(rec: Recorder, lo: int, hi: int, cyc: BoundaryCycle, face: ColorFace, budget) -> bool:
    """Delete two nodes of the face or shrink it by one; False if neither applies."""
    d = rec.d
    sys = d.system
    arcs = face_arcs(d, cyc)
    k = len(arcs)
    if k < 2:
        return False
    parts = [decompose_arc(sys, lo, hi, arc.word(d)) for arc in arcs]
    usable = [i for i in range(k) if arcs[i].start[0] != arcs[i].end[0]]
    easy = [i for i in usable if not parts[i][1]]
    if easy:
        i = easy[0]
    elif k >= 3 and usable:
        i = usable[0]
    else:
        return False
    a, t, b = parts[i]
    if arcs[i].word(d) != t:
        try:
            region = disc_region(d, cyc, face, with_crossings=True)
        except ValueError:
            return False
        normalize_arc(rec, lo, cyc, face, arcs, i, (a, t, b), region, budget)
    d = rec.d
    X, sx = arcs[i].start
    if not t:
        Y, sy = d.alpha[(X, sx)]
        delete_adjacent_pair(rec, X, sx, Y, sy)
        return True
    C = d.alpha[(X, sx)][0]
    Y = d.alpha[(C, (d.alpha[(X, sx)][1] + 2) % 4)][0]
    inside = tuple(sorted((X, C, Y)))
    hit = match_template(d, inside, lo - 1)
    if hit is None or hit[0] != 0:
        raise FaceError(f"template does not match at {inside}")
    rec.apply("zam_a3", lo - 1, hit[0], hit[1], *inside)
    return True


def normalize_arc(rec: Recorder, lo: int, cyc: BoundaryCycle, face: ColorFace,
                  arcs: list[FaceArc], i: int, parts: tuple[Word, Word, Word], region, budget) -> None:
    """Rebuild the face so arc ``i`` reads ``a t b`` with ``a``, ``b`` routed around
    its end nodes, then move those strands off with commuting ZAMs."""
    from .reduce import replace_certified
    d = rec.d
    sys = d.system
    k = len(arcs)
    a, t, b = parts
    ip, inx = (i - 1) % k, (i + 1) % k
    words = [arc.word(d) for arc in arcs]
    new = list(words)
    new[i] = a + t + b
    if k == 2:
        new[ip] = b[::-1] + _times(sys, b, words[ip], a) + a[::-1]
    else:
        new[ip] = _times(sys, words[ip], a) + a[::-1]
        new[inx] = b[::-1] + _times(sys, b, words[inx])
    port = {x: n for n, x in enumerate(region.attach)}
    q = Diagram(sys, ports=[(d.color(x), d.is_out(x)) for x in region.attach])
    chains = []
    for arc, w in zip(arcs, new):
        xs = [q.add_vertex(lo, c) for c in w]
        ends = [(BOUNDARY, port[arc.start])] + [z for x in xs for z in ((x, 0), (x, 2))] \
            + [(BOUNDARY, port[arc.end])]
        for n in range(0, len(ends), 2):
            q.pair(ends[n], ends[n + 1])
        chains.append(xs)
    node_corner = {(cr.vertex, cr.leave): cr for cr in cyc.corners if cr.node}
    # strands of a around X: E side on slot 3, previous arc on slot 1
    X_red = node_corner[arcs[i].start].inner[0]
    _route(q, lo, (BOUNDARY, port[X_red]), a,
           [(x, 1) for x in chains[i][:len(a)]],
           [(x, 1) for x in reversed(chains[ip][len(chains[ip]) - len(a):])], 3, 1)
    Y_corner = node_corner[arcs[inx].start]
    Y_red = Y_corner.inner[0]
    nb = len(b)
    _route(q, lo, (BOUNDARY, port[Y_red]), b[::-1],
           [(x, 1) for x in reversed(chains[i][len(chains[i]) - nb:])],
           [(x, 1) for x in chains[inx][:nb]], 1, 3)
    Q = complete(q)
    replace_certified(rec, region, Q, budget)
    X, sX = arcs[i].start
    eX = node_corner[arcs[i].start].entry
    for _ in a:
        budget.spend()
        rec.apply("zam_commuting", X, eX)
    Y, sY = arcs[inx].start
    eY = Y_corner.entry
    for _ in b:
        budget.spend()
        rec.apply("zam_commuting", Y, eY)


def _route(q: Diagram, lo: int, red_port: Dart, colors: Word,
           side_e: list[Dart], side_o: list[Dart], e_slot: int, o_slot: int) -> None:
    """Crossings on the red strand leaving ``red_port``, the j-th joining
    ``side_e[j]`` (at slot ``e_slot``) and ``side_o[j]`` (at ``o_slot``)."""
    prev = red_port
    for c, de, do in zip(colors, side_e, side_o):
        r = q.add_vertex(lo + 1, c)
        q.pair(prev, (r, 0))
        q.pair((r, e_slot), de)
        q.pair((r, o_slot), do)
        prev = (r, 2)
