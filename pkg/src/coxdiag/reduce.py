"""Reduction of closed diagrams to the empty diagram.

The entry point is :func:`reduce`.  It repeatedly removes circles and then
picks a strategy from the colors still present:

* dihedral types (two colors): delete adjacent pairs until nothing is left;
* braid-dihedral types: delete the two ends of an edge with varied corners;
* a color commuting with every other color present: clear its closed curves;
* an A-type chain of colors: clear the lowest color (see ``achain``).

Every step is recorded.  Patch replacements are justified by a certificate,
itself a trace reducing the gluing of the old and the new patch, computed
recursively with fewer colors or fewer nodes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .coxeter import CoxeterSystem
from .planar import BOUNDARY, Dart, Diagram, DiagramError, Region, canonical_code, cut_patch, glue, replace_region
from .rules import ORIENT_CODES, RuleError, delete_adjacent_pair, delete_sites
from .trace import Certificate, Recorder, Trace


class ReductionStuck(Exception):
    """No strategy applies, or the step budget ran out."""

    def __init__(self, msg: str, partial: Trace | None = None, diagram: Diagram | None = None):
        super().__init__(msg)
        self.partial = partial
        self.diagram = diagram


class BudgetExhausted(ReductionStuck):
    """The step budget ran out before the diagram was empty."""


@dataclass
class Budget:
    steps: int = 1_000_000
    used: int = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.steps:
            raise BudgetExhausted(f"step budget of {self.steps} exhausted")


@dataclass(order=True)
class ProgressMeasure:
    """Lexicographic size used to check that a strategy makes progress."""
    colors: int
    nodes: int
    vertices: int
    edges: int

    @classmethod
    def of(cls, d: Diagram, lo: int | None = None) -> ProgressMeasure:
        nodes = 0
        if lo is not None:
            nodes = sum(1 for vx in d.vertices.values() if lo in vx.type and d.system.m(vx.i, vx.j) >= 3)
        return cls(len(present_colors(d)), nodes, len(d.vertices), d.num_edges())


def present_colors(d: Diagram) -> set[int]:
    out: set[int] = set()
    for vx in d.vertices.values():
        out.update(vx.type)
    return out


# -- building blocks -----------------------------------------------------------------

def remove_circles(rec: Recorder, budget: Budget) -> None:
    for (c, o), n in sorted(rec.d.circles.items(), key=str):
        for _ in range(n):
            budget.spend()
            rec.apply("circle_remove", c, ORIENT_CODES[o])


def replace_certified(rec: Recorder, region: Region, new: Diagram, budget: Budget) -> dict[int, int]:
    """Swap a region for ``new``, proving the swap with a recursive reduction."""
    old = cut_patch(rec.d, region)
    out, vmap = replace_region(rec.d, region, new)
    cert = make_certificate(old, new, budget, rec.record)
    site = (tuple(sorted(region.inside)), tuple(region.attach))
    rec.certified("patch_replace", site, out, cert)
    return vmap


def make_certificate(old: Diagram, new: Diagram, budget: Budget | None = None,
                     record: bool = True) -> Certificate:
    g = glue(old, new)
    sub = Recorder(g, record=record)
    _run(sub, budget or Budget())
    return Certificate(old, new, sub.trace())


# -- dihedral ------------------------------------------------------------------------------

def reduce_dihedral_step(rec: Recorder) -> bool:
    sites = delete_sites(rec.d)
    for u, a, v, b in sites:
        try:
            delete_adjacent_pair(rec, u, a, v, b)
            return True
        except RuleError:
            continue
    return False


# -- braid dihedral --------------------------------------------------------------------

def _varied(d: Diagram, x: Dart, y: Dart) -> bool:
    return d.is_out(x) != d.is_out(y)


def find_adjacent_varied_angles(d: Diagram) -> tuple[int, int, int, int] | None:
    """An edge ``u.a - v.b`` (u != v) whose corners on one side are varied at both ends.

    The corner at ``u`` lies between ``u.a-1`` and ``u.a``, the one at ``v``
    between ``v.b`` and ``v.b+1``: consecutive corners of the face to the
    right of ``u.a -> v.b``.
    """
    for x in sorted(d.alpha):
        u, a = x
        if u == BOUNDARY:
            continue
        y = d.alpha[x]
        v, b = y
        if v in (BOUNDARY, u):
            continue
        if d.vertices[u].type != d.vertices[v].type:
            continue
        if _varied(d, d.sigma(x, -1), x) and _varied(d, y, d.sigma(y)):
            return u, a, v, b
    return None


def reduce_braid_step(rec: Recorder) -> bool:
    site = find_adjacent_varied_angles(rec.d)
    if site is None:
        return False
    delete_adjacent_pair(rec, *site)
    return True


# -- driver ------------------------------------------------------------------------------

@dataclass
class Strategy:
    name: str
    colors: tuple[int, ...] = field(default_factory=tuple)


def choose_strategy(d: Diagram) -> Strategy:
    sys = d.system
    cols = sorted(present_colors(d))
    if not cols:
        return Strategy("empty")
    if sys.oriented:
        return Strategy("braid", tuple(cols))
    if len(cols) == 2:
        return Strategy("dihedral", tuple(cols))
    for c in cols:
        if all(sys.m(c, o) == 2 for o in cols if o != c):
            return Strategy("free", (c,))
    comp = _component(sys, cols, cols[0])
    if _is_a_chain(sys, comp):
        return Strategy("achain", tuple(comp))
    return Strategy("generic", tuple(cols))


def _component(sys: CoxeterSystem, cols: list[int], c: int) -> list[int]:
    """Colors joined to ``c`` through non-commuting pairs."""
    seen = {c}
    stack = [c]
    while stack:
        a = stack.pop()
        for b in cols:
            if b not in seen and sys.m(a, b) != 2:
                seen.add(b)
                stack.append(b)
    return sorted(seen)


def _is_a_chain(sys: CoxeterSystem, cols: list[int]) -> bool:
    if cols != list(range(cols[0], cols[-1] + 1)) or len(cols) < 2:
        return False
    for a in cols:
        for b in cols:
            if a < b and sys.m(a, b) != (3 if b == a + 1 else 2):
                return False
    return True


def _run(rec: Recorder, budget: Budget) -> None:
    from .achain import clear_free_color, reduce_achain_step
    while True:
        remove_circles(rec, budget)
        d = rec.d
        if not d.vertices:
            return
        budget.spend()
        strat = choose_strategy(d)
        if strat.name == "braid":
            ok = reduce_braid_step(rec)
        elif strat.name == "free":
            ok = clear_free_color(rec, strat.colors[0], budget)
        elif strat.name in ("dihedral", "generic"):
            ok = reduce_dihedral_step(rec)
        else:
            ok = reduce_dihedral_step(rec) or reduce_achain_step(rec, strat.colors[0], strat.colors[-1], budget)
        if not ok:
            raise ReductionStuck(f"{strat.name} strategy found no move on {len(d.vertices)} vertices",
                                 diagram=d)


def reduce(d: Diagram, budget: int | None = None, record: bool = True) -> Trace:
    """Reduce a closed diagram to the empty diagram and return the trace.

    Raises ``ReductionStuck`` (carrying the partial trace) if no strategy
    applies or the budget of elementary steps runs out.
    """
    if not d.closed:
        raise DiagramError("only closed diagrams can be reduced")
    rec = Recorder(d.copy(), record=record)
    try:
        _run(rec, Budget(budget) if budget else Budget())
    except ReductionStuck as e:
        e.partial = rec.trace()
        if e.diagram is None:
            e.diagram = rec.d
        raise
    return rec.trace()


# -- family entry points ----------------------------------------------------------------

def reduce_dihedral(d: Diagram, budget: int | None = None) -> Trace:
    """Reduction over I_m: only adjacent pairs of the single vertex type are deleted."""
    if d.system.oriented or d.system.rank != 2:
        raise DiagramError("dihedral reduction needs an unoriented rank-2 system")
    return reduce(d, budget)


def reduce_braid_dihedral(d: Diagram, budget: int | None = None) -> Trace:
    """Reduction over the braid-dihedral systems: one varied-corner deletion per iteration."""
    if not d.system.oriented:
        raise DiagramError("braid reduction needs an oriented system")
    return reduce(d, budget)


def reduce_An(d: Diagram, budget: int | None = None) -> Trace:
    if d.system.family != "A" or d.system.rank < 2:
        raise DiagramError("A_n reduction needs a system of type A with n >= 2")
    return reduce(d, budget)


def reduce_product(d: Diagram, left: set[int], right: set[int], budget: int | None = None) -> Trace:
    """Reduction over a product: every ``left`` color must commute with every ``right`` color."""
    sys = d.system
    if left & right or left | right != set(sys.generators):
        raise DiagramError("the two color sets must partition the generators")
    if any(sys.m(a, b) != 2 for a in left for b in right):
        raise DiagramError("colors of the two factors must commute")
    return reduce(d, budget)


# -- bounded search --------------------------------------------------------------------

SEARCH_RULES = ("bridge", "cancel_pair", "zam_commuting", "zam_a3", "circle_remove")


def bfs_equivalence(start: Diagram, goal, budget: int = 2000,
                    rules: tuple[str, ...] = SEARCH_RULES) -> list[tuple[str, tuple]] | None:
    """Shortest sequence of rule applications from ``start`` to a diagram satisfying ``goal``.

    States are deduplicated by canonical code; at most ``budget`` states are
    expanded.  Creation rules are left out by default since they make the
    search space infinite.  Returns None when the budget runs out.
    """
    from collections import deque
    from .rules import apply_primitive, find_matches
    seen = {canonical_code(start)}
    queue = deque([(start, [])])
    expanded = 0
    while queue:
        d, path = queue.popleft()
        if goal(d):
            return path
        if expanded >= budget:
            return None
        expanded += 1
        for rule in rules:
            for site in find_matches(d, rule):
                try:
                    nd = apply_primitive(d, rule, site)
                except RuleError:
                    continue
                code = canonical_code(nd)
                if code not in seen:
                    seen.add(code)
                    queue.append((nd, path + [(rule, site)]))
    return None
