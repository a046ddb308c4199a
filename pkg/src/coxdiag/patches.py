"""Building patches from word rewriting sequences.

A word is laid out left to right along the bottom of a disc.  Each braid
move stacks one vertex on top of the strands it rewrites; each cancellation
joins two neighbouring strands by a cap.  Whatever is left at the end runs
out through the top of the disc.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .coxeter import CoxeterError, CoxeterSystem, Word, alternating, braid_moves, compose
from .planar import BOUNDARY, Dart, Diagram, DiagramError


@dataclass(frozen=True)
class WordOp:
    """``braid`` rewrites ``word[pos:pos+m]``; ``cancel`` deletes ``word[pos:pos+2]``."""
    kind: str
    pos: int
    m: int = 2

    def apply(self, word: Word) -> Word:
        p = self.pos
        if self.kind == "cancel":
            if word[p] != word[p + 1]:
                raise CoxeterError(f"no cancellation at {p} in {word}")
            return word[:p] + word[p + 2:]
        s, t = word[p], word[p + 1]
        if word[p:p + self.m] != alternating(s, t, self.m):
            raise CoxeterError(f"no braid move at {p} in {word}")
        return word[:p] + alternating(t, s, self.m) + word[p + self.m:]


def run_ops(word: Word, ops: list[WordOp]) -> Word:
    for op in ops:
        word = op.apply(word)
    return word


def build_patch(sys: CoxeterSystem, word: Word, ops: list[WordOp]) -> tuple[Diagram, list[int]]:
    """Compile ``ops`` into a patch.

    Ports ``0..len(word)-1`` carry ``word`` left to right; the final word
    follows, read right to left.  Also returns the vertex created by each op
    (0 for a cancellation).
    """
    if sys.oriented:
        raise DiagramError("word patches are built on unoriented systems")
    d = Diagram(sys)
    L = len(word)
    front: list[Dart] = [(BOUNDARY, k) for k in range(L)]
    cur = tuple(word)
    made = []
    for op in ops:
        nxt = op.apply(cur)
        p = op.pos
        if op.kind == "cancel":
            d.pair(front[p], front[p + 1])
            del front[p:p + 2]
            made.append(0)
        else:
            s, t = cur[p], cur[p + 1]
            m = op.m
            if sys.m(s, t) != m:
                raise CoxeterError(f"m({s},{t}) != {m}")
            v = d.add_vertex(s, t)
            k0 = 0 if s < t else 1
            for q in range(m):
                d.pair(front[p + q], (v, k0 + q))
            top = [(v, (k0 + 2 * m - 1 - q) % (2 * m)) for q in range(m)]
            front[p:p + m] = top
            made.append(v)
        cur = nxt
    n = len(front)
    # the remaining strands leave through the top, numbered right to left
    top_ports = {}
    for q, x in enumerate(front):
        top_ports[q] = L + (n - 1 - q)
    ports = [None] * (L + n)
    for k, c in enumerate(word):
        ports[k] = (c, None)
    for q, c in enumerate(cur):
        ports[top_ports[q]] = (c, None)
    d.ports = ports  # type: ignore[assignment]
    for q, x in enumerate(front):
        d.pair(x, (BOUNDARY, top_ports[q]))
    return d, made


def trim_through(p: Diagram) -> Diagram:
    """Drop strands that run straight from one port to another."""
    L = len(p.ports)
    drop = {k for k in range(L) if p.alpha[(BOUNDARY, k)][0] == BOUNDARY}
    keep = [k for k in range(L) if k not in drop]
    new_index = {k: n for n, k in enumerate(keep)}
    out = Diagram(p.system, dict(p.vertices), {}, [p.ports[k] for k in keep], p.circles.copy())
    for a, b in p.alpha.items():
        if a[0] == BOUNDARY and a[1] in drop:
            continue
        na = (BOUNDARY, new_index[a[1]]) if a[0] == BOUNDARY else a
        nb = (BOUNDARY, new_index[b[1]]) if b[0] == BOUNDARY else b
        out.alpha[na] = nb
    return out


# -- van Kampen fillings ---------------------------------------------------------

def _rex_path_to_suffix(sys: CoxeterSystem, word: Word, s: int) -> list[WordOp]:
    """Braid moves taking the reduced ``word`` to a reduced word ending in ``s``."""
    start = tuple(word)
    prev: dict[Word, tuple[Word, WordOp] | None] = {start: None}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        if w and w[-1] == s:
            path = []
            while prev[w] is not None:
                w0, op = prev[w]  # type: ignore[misc]
                path.append(op)
                w = w0
            return path[::-1]
        for w2, mv in braid_moves(sys, w):
            if w2 not in prev:
                prev[w2] = (w, WordOp("braid", mv.position, mv.m))
                queue.append(w2)
    raise CoxeterError(f"no reduced expression of {word} ends in {s}")


def reduction_ops(sys: CoxeterSystem, word: Word) -> list[WordOp]:
    """Braid moves and cancellations taking ``word`` to a reduced word.

    Repeatedly finds the first letter that makes the prefix non-reduced,
    rewrites the prefix to end in that letter, and cancels the pair.
    """
    word = tuple(word)
    ops: list[WordOp] = []
    while True:
        e = sys.identity
        cut = None
        for k, s in enumerate(word):
            e2 = compose(e, sys.generator_perm(s))
            if sys.length(e2) < k + 1:
                cut = k
                break
            e = e2
        if cut is None:
            return ops
        moves = _rex_path_to_suffix(sys, word[:cut], word[cut])
        for op in moves:
            word = op.apply(word)
            ops.append(op)
        op = WordOp("cancel", cut - 1)
        word = op.apply(word)
        ops.append(op)


def fill_word(sys: CoxeterSystem, word: Word) -> tuple[Diagram, list[WordOp]]:
    """A patch with boundary ``word`` (trivial in the group) and its build ops."""
    ops = reduction_ops(sys, word)
    if run_ops(tuple(word), ops):
        raise CoxeterError(f"word {word} is not trivial")
    p, _ = build_patch(sys, word, ops)
    return p, ops
