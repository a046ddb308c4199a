"""Coxeter systems, permutation representations and word-level rewriting.

Generators are 1-based integers.  A word is a tuple of generator indices read
left to right; elements of the finite groups in scope are permutations of a
small carrier set, stored as tuples in image notation.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

INF = 0  # exponent meaning "no relation"

Word = tuple[int, ...]
Perm = tuple[int, ...]

A_COLORS = ("blue", "red", "green", "yellow", "purple", "orange", "cyan", "magenta")
BRAID_COLORS = ("blue", "green")

DEFAULT_LENGTH_BOUND = 12


class CoxeterError(ValueError):
    pass


@dataclass(frozen=True)
class CoxeterSystem:
    family: str  # "A", "I", "BI" or "X" (explicit)
    rank: int
    exponents: tuple[tuple[int, ...], ...]
    oriented: bool = False
    colors: tuple[str, ...] = ()
    label: str = ""

    def __post_init__(self):
        n = self.rank
        if n < 1 or len(self.exponents) != n or any(len(r) != n for r in self.exponents):
            raise CoxeterError("exponent matrix must be square of size rank")
        for i in range(n):
            for j in range(n):
                if self.exponents[i][j] != self.exponents[j][i]:
                    raise CoxeterError("exponent matrix must be symmetric")
                if i != j and self.exponents[i][j] != INF and self.exponents[i][j] < 2:
                    raise CoxeterError(f"m[{i + 1},{j + 1}] must be >= 2")
        if not self.colors:
            palette = BRAID_COLORS if self.family == "BI" else A_COLORS
            cols = tuple(palette[k] if k < len(palette) else f"c{k + 1}" for k in range(n))
            object.__setattr__(self, "colors", cols)

    def __repr__(self) -> str:
        return f"CoxeterSystem({self.name})"

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.family == "A":
            return f"A{self.rank}"
        if self.family == "I":
            return f"I{self.m(1, 2)}"
        if self.family == "BI":
            return f"BI{self.m(1, 2)}"
        return "X" + str(self.exponents)

    @property
    def generators(self) -> range:
        return range(1, self.rank + 1)

    def m(self, i: int, j: int) -> int:
        if i == j:
            return 1
        return self.exponents[i - 1][j - 1]

    def commute(self, i: int, j: int) -> bool:
        return i != j and self.m(i, j) == 2

    def check_word(self, word: Iterable[int]) -> Word:
        w = tuple(word)
        for s in w:
            if not 1 <= s <= self.rank:
                raise CoxeterError(f"generator {s} not in {self.name}")
        return w

    # -- permutation representation -------------------------------------

    @cached_property
    def _rep(self) -> tuple[int, tuple[Perm, ...]]:
        if self.oriented:
            raise CoxeterError("word problem for braid systems is out of scope")
        return _faithful_rep(self)

    @property
    def degree(self) -> int:
        return self._rep[0]

    def generator_perm(self, s: int) -> Perm:
        return self._rep[1][s - 1]

    @cached_property
    def identity(self) -> Perm:
        return tuple(range(self.degree))

    @cached_property
    def _lengths(self) -> dict[Perm, int]:
        dist = {self.identity: 0}
        queue = deque([self.identity])
        while queue:
            p = queue.popleft()
            for s in self.generators:
                q = compose(p, self.generator_perm(s))
                if q not in dist:
                    dist[q] = dist[p] + 1
                    queue.append(q)
        return dist

    def length(self, element: Perm) -> int:
        return self._lengths[element]

    @cached_property
    def longest_element(self) -> Perm:
        return max(self._lengths, key=self._lengths.__getitem__)

    def order(self) -> int:
        return len(self._lengths)

    def restricted(self, gens: Sequence[int]) -> CoxeterSystem:
        """Parabolic subsystem on ``gens``, renumbered 1..len(gens) in the given order."""
        mat = tuple(tuple(1 if a == b else self.m(a, b) for b in gens) for a in gens)
        fam = "X"
        if _is_chain(mat):
            fam = "A"
        elif len(gens) == 2 and not self.oriented:
            fam = "I"
        elif len(gens) == 2:
            fam = "BI"
        return CoxeterSystem(fam, len(gens), mat, self.oriented,
                             tuple(self.colors[g - 1] for g in gens))


def _is_chain(mat) -> bool:
    n = len(mat)
    if n == 1:
        return True
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            want = 3 if abs(i - j) == 1 else 2
            if mat[i][j] != want:
                return False
    return True


def compose(p: Perm, q: Perm) -> Perm:
    """``p`` after ``q``: ``compose(p, q)[k] == p[q[k]]``."""
    return tuple(p[k] for k in q)


def _components(sys: CoxeterSystem) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for g in sys.generators:
        if g in seen:
            continue
        comp, stack = [], [g]
        seen.add(g)
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in sys.generators:
                if b not in seen and sys.m(a, b) != 2:
                    seen.add(b)
                    stack.append(b)
        comps.append(sorted(comp))
    return comps


def _chain_order(sys: CoxeterSystem, comp: list[int]) -> list[int] | None:
    """Order ``comp`` as a path with all links labelled 3, if it is one."""
    if len(comp) == 1:
        return comp
    nbrs = {a: [b for b in comp if b != a and sys.m(a, b) != 2] for a in comp}
    if any(sys.m(a, b) != 3 for a in comp for b in nbrs[a]):
        return None
    ends = [a for a in comp if len(nbrs[a]) == 1]
    if len(ends) != 2 or any(len(v) > 2 for v in nbrs.values()):
        return None
    path, prev = [ends[0]], None
    while len(path) < len(comp):
        nxt = [b for b in nbrs[path[-1]] if b != prev]
        prev = path[-1]
        path.append(nxt[0])
    return path


def _faithful_rep(sys: CoxeterSystem) -> tuple[int, tuple[Perm, ...]]:
    # Direct sum over irreducible components; each must be type A or dihedral.
    images: dict[int, dict[int, int]] = {g: {} for g in sys.generators}
    offset = 0
    for comp in _components(sys):
        chain = _chain_order(sys, comp)
        if chain is not None:
            for pos, g in enumerate(chain):
                images[g] = {offset + pos: offset + pos + 1, offset + pos + 1: offset + pos}
            offset += len(chain) + 1
        elif len(comp) == 2:
            a, b = comp
            m = sys.m(a, b)
            if m == INF:
                raise CoxeterError("infinite dihedral components are out of scope")
            # regular action on the 2m flags of an m-gon
            images[a] = {offset + k: offset + (k ^ 1) for k in range(2 * m)}
            images[b] = {offset + k: offset + ((k + 1) if k % 2 else (k - 1)) % (2 * m)
                         for k in range(2 * m)}
            offset += 2 * m
        else:
            raise CoxeterError(f"no permutation representation for component {comp}")
    gens = []
    for g in sys.generators:
        img = images[g]
        gens.append(tuple(img.get(k, k) for k in range(offset)))
    return offset, tuple(gens)


def build_system(family: str, rank_or_m: int) -> CoxeterSystem:
    """Construct A_n, I_m or the dihedral braid system BI_m.

    >>> build_system("A", 2).m(1, 2)
    3
    >>> build_system("BI", 3).oriented
    True
    """
    fam = family.upper()
    if fam in ("A",):
        n = rank_or_m
        if n < 1:
            raise CoxeterError("A_n needs n >= 1")
        mat = tuple(tuple(1 if i == j else (3 if abs(i - j) == 1 else 2) for j in range(n))
                    for i in range(n))
        return CoxeterSystem("A", n, mat)
    if fam in ("I", "BI", "BRAIDI"):
        m = rank_or_m
        if m < 2:
            raise CoxeterError("dihedral systems need m >= 2")
        oriented = fam != "I"
        return CoxeterSystem("BI" if oriented else "I", 2, ((1, m), (m, 1)), oriented)
    raise CoxeterError(f"unsupported family {family!r}")


def explicit_system(exponents: Sequence[Sequence[int]], oriented: bool = False) -> CoxeterSystem:
    mat = tuple(tuple(int(x) for x in row) for row in exponents)
    n = len(mat)
    mat = tuple(tuple(1 if i == j else mat[i][j] for j in range(n)) for i in range(n))
    return CoxeterSystem("X", n, mat, oriented)


def product_system(a: CoxeterSystem, b: CoxeterSystem) -> CoxeterSystem:
    """Direct product; generators of ``b`` are shifted past those of ``a``."""
    n = a.rank + b.rank
    mat = [[2] * n for _ in range(n)]
    for i in range(n):
        mat[i][i] = 1
    for i in range(a.rank):
        for j in range(a.rank):
            if i != j:
                mat[i][j] = a.exponents[i][j]
    for i in range(b.rank):
        for j in range(b.rank):
            if i != j:
                mat[a.rank + i][a.rank + j] = b.exponents[i][j]
    return CoxeterSystem("X", n, tuple(map(tuple, mat)), a.oriented or b.oriented,
                         a.colors + tuple(f"{c}'" for c in b.colors))


def word_to_element(sys: CoxeterSystem, word: Iterable[int]) -> Perm:
    w = sys.check_word(word)
    p = sys.identity
    for s in w:
        p = compose(p, sys.generator_perm(s))
    return p


def is_trivial_word(sys: CoxeterSystem, word: Iterable[int]) -> bool:
    return word_to_element(sys, word) == sys.identity


def parse_word(text: str) -> Word:
    return tuple(int(tok) for tok in text.split())


def format_word(word: Iterable[int]) -> str:
    return " ".join(str(s) for s in word)


def alternating(s: int, t: int, length: int) -> Word:
    return tuple(s if k % 2 == 0 else t for k in range(length))


# -- at most one occurrence of the first generator ------------------

def reduce_first_generator(sys: CoxeterSystem, word: Iterable[int]) -> Word:
    """Rewrite ``word`` in a type-A system so that ``1`` occurs at most once.

    Works leftmost-first: the first two occurrences ``1 u 1`` are rewritten
    after normalising ``u`` (a word in ``2..n``) recursively so that ``2``
    occurs at most once in it.  Then either ``u`` commutes with ``1`` and the
    two ``1`` cancel, or ``u = a 2 b`` and ``1 a 2 b 1 = a 2 1 2 b``.

    >>> reduce_first_generator(build_system("A", 2), (1, 2, 1))
    (2, 1, 2)
    """
    if sys.family != "A":
        raise CoxeterError("reduce_first_generator needs a type-A system")
    return _rfg(tuple(sys.check_word(word)), 1, sys.rank)


def _rfg(word: Word, lo: int, hi: int) -> Word:
    # ``word`` uses letters lo..hi of a chain; lo plays the role of g1.
    w = list(word)
    while True:
        pos = [k for k, s in enumerate(w) if s == lo]
        if len(pos) <= 1:
            return tuple(w)
        p, q = pos[0], pos[1]
        inner = _rfg(tuple(w[p + 1:q]), lo + 1, hi) if lo < hi else ()
        if lo + 1 not in inner:
            # inner commutes with lo
            w = w[:p] + list(inner) + w[q + 1:]
        else:
            k = inner.index(lo + 1)
            a, b = list(inner[:k]), list(inner[k + 1:])
            w = w[:p] + a + [lo + 1, lo, lo + 1] + b + w[q + 1:]


# -- reduced expressions and the rex graph ---------------------------------

def reduced_words(sys: CoxeterSystem, element: Perm, length: int | None = None,
                  bound: int = DEFAULT_LENGTH_BOUND) -> set[Word]:
    """All reduced expressions of ``element`` (of the given length, if any)."""
    ell = sys.length(element)
    if length is None:
        length = ell
    if length > bound:
        raise CoxeterError(f"length {length} exceeds bound {bound}")
    if length != ell:
        return set()
    out: set[Word] = set()

    # peel generators off the right end: w = w' s with l(w' ) = l(w) - 1
    def rec(p: Perm, suffix: Word):
        if sys.length(p) == 0:
            out.add(suffix)
            return
        for s in sys.generators:
            q = compose(p, sys.generator_perm(s))
            if sys.length(q) < sys.length(p):
                rec(q, (s,) + suffix)

    rec(element, ())
    return out


@dataclass(frozen=True)
class BraidMove:
    position: int
    s: int
    t: int
    m: int

    def __str__(self) -> str:
        return f"{self.position}:{self.s}{self.t}^{self.m}"


@dataclass
class RexGraph:
    system: CoxeterSystem
    nodes: list[Word]
    edges: list[tuple[Word, Word, BraidMove]] = field(default_factory=list)

    def neighbours(self, w: Word) -> list[tuple[Word, BraidMove]]:
        out = []
        for a, b, mv in self.edges:
            if a == w:
                out.append((b, mv))
            elif b == w:
                out.append((a, mv))
        return out

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        seen = {self.nodes[0]}
        stack = [self.nodes[0]]
        adj: dict[Word, list[Word]] = {w: [] for w in self.nodes}
        for a, b, _ in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        while stack:
            w = stack.pop()
            for v in adj[w]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self.nodes)


def braid_moves(sys: CoxeterSystem, word: Word) -> list[tuple[Word, BraidMove]]:
    """Words reachable from ``word`` by one braid move (st...)_m -> (ts...)_m."""
    out = []
    for p in range(len(word) - 1):
        s, t = word[p], word[p + 1]
        if s == t:
            continue
        m = sys.m(s, t)
        if m == INF or p + m > len(word):
            continue
        if word[p:p + m] == alternating(s, t, m):
            out.append((word[:p] + alternating(t, s, m) + word[p + m:], BraidMove(p, s, t, m)))
    return out


def rex_graph(sys: CoxeterSystem, element: Perm, bound: int = DEFAULT_LENGTH_BOUND) -> RexGraph:
    nodes = sorted(reduced_words(sys, element, bound=bound))
    node_set = set(nodes)
    g = RexGraph(sys, nodes)
    for w in nodes:
        for v, mv in braid_moves(sys, w):
            if v in node_set and w < v:
                g.edges.append((w, v, mv))
    return g


def all_words(sys: CoxeterSystem, max_len: int) -> Iterable[Word]:
    for n in range(max_len + 1):
        yield from itertools.product(sys.generators, repeat=n)
