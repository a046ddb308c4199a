"""Expansion of traces into primitive steps only.

Macro steps already carry (or can regenerate) their primitive expansions.
Patch replacements carry a certificate instead, which is turned into
primitive steps by a doubling construction:

1. build ``glue(new, new)`` beside the host by running the reduction of the
   doubled patch (delete mirrored pairs across the seam) backwards;
2. bridge each boundary strand of the replaced region with the matching
   seam edge, which splits off ``glue(old, new)`` and leaves ``new`` in place;
3. replay the certificate's reduction on the split-off component.

Primitive rules create vertices with ids of their own choosing, so the
expanded steps cannot reuse the recorded sites verbatim.  Every step is
followed through a dart isomorphism between the recorded diagram and the
one actually rebuilt; see :class:`Follower`.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .planar import BOUNDARY, Dart, Diagram, canonical_code, glue, out_slots
from .rules import PRIMITIVES, RuleError, apply_primitive, bridge_ok, match_template
from .trace import RewriteStep, Trace, UnexpandableMacro

VMap = dict[int, tuple[int, int]]     # vertex -> (image vertex, slot rotation)


# -- isomorphisms ---------------------------------------------------------------------------

def _img(phi: VMap, x: Dart, deg: dict[int, int]) -> Dart:
    if x[0] == BOUNDARY:
        return x
    a, r = phi[x[0]]
    return (a, (x[1] + r) % deg[x[0]])


def _rotations(E: Diagram, v: int, A: Diagram, a: int) -> list[int]:
    ev, av = E.vertices[v], A.vertices[a]
    if ev.type != av.type:
        return []
    m = E.system.m(ev.i, ev.j)
    out = []
    for r in range(0, 2 * m, 2):
        if ev.kind is not None:
            outs = {(k + r) % (2 * m) for k in out_slots(m, ev.kind)}
            if outs != set(out_slots(m, av.kind)):
                continue
        out.append(r)
    return out


def _propagate(E: Diagram, A: Diagram, phi: VMap, used: set[int], queue: list[int],
               pool: set[int], deg: dict[int, int]) -> bool:
    while queue:
        v = queue.pop()
        for s in range(deg[v]):
            y = E.alpha[(v, s)]
            t = A.alpha.get(_img(phi, (v, s), deg))
            if t is None:
                return False
            if y[0] == BOUNDARY:
                if t != y:
                    return False
            elif y[0] in phi:
                if _img(phi, y, deg) != t:
                    return False
            else:
                if t[0] == BOUNDARY or t[0] in used or t[0] not in pool:
                    return False
                r = (t[1] - y[1]) % deg[y[0]]
                if r not in _rotations(E, y[0], A, t[0]):
                    return False
                phi[y[0]] = (t[0], r)
                used.add(t[0])
                queue.append(y[0])
    return True


def extend_map(E: Diagram, A: Diagram, phi: VMap, pool: set[int]) -> VMap | None:
    """Extend ``phi`` (restricted to vertices of ``E``) to an embedding of ``E`` into ``A``.

    New images are taken from ``pool``.  Returns None if no consistent
    extension exists.
    """
    deg = {v: E.degree(v) for v in E.vertices}
    phi = {v: phi[v] for v in phi if v in E.vertices}
    if any(a not in A.vertices or r not in _rotations(E, v, A, a) for v, (a, r) in phi.items()):
        return None
    used = {a for a, _ in phi.values()}
    if not _propagate(E, A, phi, used, list(phi), pool, deg):
        return None
    rest = sorted(v for v in E.vertices if v not in phi)
    while rest:
        v = rest[0]
        found = False
        for a in sorted(pool - used):
            for r in _rotations(E, v, A, a):
                trial, tused = dict(phi), used | {a}
                trial[v] = (a, r)
                if _propagate(E, A, trial, tused, [v], pool, deg):
                    phi, used, found = trial, tused, True
                    break
            if found:
                break
        if not found:
            return None
        rest = [w for w in rest if w not in phi]
    return phi


# -- following recorded steps ------------------------------------------------------------------

@dataclass
class Follower:
    """Rebuilds steps recorded on ``E`` as steps on the actual diagram ``A``.

    ``foreign`` are vertices of ``A`` outside the image of ``E`` that must
    never be matched (the rest of a larger host).
    """
    E: Diagram
    A: Diagram
    phi: VMap
    foreign: set[int] = field(default_factory=set)
    steps: list[RewriteStep] = field(default_factory=list)
    whole: bool = True              # E is all of A, so recorded codes carry over

    def pool(self, A: Diagram) -> set[int]:
        return set(A.vertices) - self.foreign

    def advance(self, E_next: Diagram, cands: list[tuple[str, tuple]],
                codes: tuple[str, str] | None = None) -> None:
        """Apply the first candidate step (given on ``E``) that turns ``A`` into a copy of ``E_next``."""
        for rule, site in cands:
            for sa in translate(rule, site, self.phi, self.E, self.A):
                try:
                    newA = apply_primitive(self.A, rule, sa)
                except (RuleError, KeyError, ValueError):
                    continue
                # ids can be reused by a step, so only untouched vertices seed the map
                seed = {v: self.phi[v] for v in self.phi if v in E_next.vertices
                        and all(self.E.alpha.get(x) == E_next.alpha.get(x) for x in E_next.darts_of(v))}
                phi = extend_map(E_next, newA, seed, self.pool(newA))
                if phi is None:
                    continue
                if codes and self.whole:
                    before, after = codes
                else:
                    before, after = canonical_code(self.A), canonical_code(newA)
                self.steps.append(RewriteStep(rule, sa, before, after))
                self.E, self.A, self.phi = E_next, newA, phi
                return
        raise UnexpandableMacro(f"could not rebuild a {cands[0][0] if cands else 'step'} step")

    def follow(self, st: RewriteStep) -> None:
        E_next = apply_primitive(self.E, st.rule, st.site)
        self.advance(E_next, [(st.rule, st.site)], (st.before, st.after))

    def direct(self, rule: str, site: tuple) -> None:
        """A step chosen on ``A`` itself (outside the image of ``E``)."""
        new = apply_primitive(self.A, rule, site)
        self.steps.append(RewriteStep(rule, site, canonical_code(self.A), canonical_code(new)))
        self.A = new


def translate(rule: str, site: tuple, phi: VMap, E: Diagram, A: Diagram) -> list[tuple]:
    """Candidate sites on ``A`` for a step at ``site`` on ``E``."""
    deg = {v: E.degree(v) for v in E.vertices}

    def dart(v, s):
        return _img(phi, (v, s), deg)

    if rule in ("circle_add", "circle_remove", "cancel_create"):
        return [site]
    if rule == "bridge":
        v1, s1, v3, s3 = site
        return [dart(v1, s1) + dart(v3, s3)]
    if rule == "cancel_pair":
        return [(phi[site[0]][0], phi[site[1]][0])]
    if rule == "zam_commuting":
        return [dart(*site)]
    if rule == "zam_a3":
        shift = site[0]
        inside = tuple(sorted(phi[v][0] for v in site[3:]))
        hit = match_template(A, inside, shift)
        first = [(shift,) + hit + inside] if hit else []
        nports = len(set(x for v in site[3:] for x in E.darts_of(v) if E.alpha[x][0] not in site[3:]))
        rest = [(shift, d, r) + inside for d in (0, 1) for r in range(nports)]
        return first + [s for s in rest if s not in first]
    raise UnexpandableMacro(f"cannot translate {rule}")


# -- whole traces ------------------------------------------------------------------------------

def _primitives(E: Diagram, st: RewriteStep) -> list[RewriteStep]:
    if st.rule in PRIMITIVES:
        return [st]
    exp = st.expanded()
    if exp is None:
        from .trace import Recorder, _macro_into
        r = Recorder(E)
        _macro_into(r, st)
        exp = r.steps
    out: list[RewriteStep] = []
    for sub in exp:
        if sub.rule not in PRIMITIVES:
            raise UnexpandableMacro(f"nested macro {sub.rule} inside {st.rule}")
        out.append(sub)
    return out


def expand_trace(trace: Trace, initial: Diagram) -> Trace:
    """``trace`` rewritten with primitive steps only, starting from ``initial``."""
    from .trace import _replay_step
    f = Follower(initial.copy(), initial.copy(), {v: (v, 0) for v in initial.vertices})
    for st in trace.steps:
        if st.certificate is not None:
            E_next = _replay_step(f.E, st, "")
            expand_certificate(f, st, E_next)
        else:
            for p in _primitives(f.E, st):
                f.follow(p)
    return Trace(trace.initial, f.steps, trace.final)


# -- certificates ------------------------------------------------------------------------------

def _kind_code(kind: str | None) -> int:
    return {None: 0, "out": 1, "in": 2}[kind]


def double_reduction(N: Diagram) -> tuple[list[Diagram], list[RewriteStep]]:
    """Primitive steps taking ``glue(N, N)`` to the empty diagram, and the diagrams passed.

    Each vertex is deleted together with its mirror image across the seam.
    """
    from .rules import ORIENT_CODES, delete_adjacent_pair
    from .trace import Recorder
    G = glue(N, N)
    base = max(N.vertices, default=0)
    twin = {v: base + n + 1 for n, v in enumerate(sorted(N.vertices))}
    rec = Recorder(G)
    while rec.d.vertices:
        done = False
        for v in sorted(N.vertices):
            if v not in rec.d.vertices:
                continue
            for s in range(rec.d.degree(v)):
                y = rec.d.alpha[(v, s)]
                if y[0] != twin[v]:
                    continue
                try:
                    delete_adjacent_pair(rec, v, s, y[0], y[1])
                except RuleError:
                    continue
                done = True
                break
            if done:
                break
        if not done:
            raise UnexpandableMacro("doubled patch has no deletable mirrored pair")
    for (c, o), n in sorted(rec.d.circles.items(), key=str):
        for _ in range(n):
            rec.apply("circle_remove", c, ORIENT_CODES[o])
    prims = [p for st in rec.steps for p in _primitives(None, st)]  # type: ignore[arg-type]
    ds = [G]
    for p in prims:
        ds.append(apply_primitive(ds[-1], p.rule, p.site))
    return ds, prims


def _inverse(before: Diagram, p: RewriteStep) -> list[tuple[str, tuple]]:
    """Candidate steps undoing ``p`` (sites on the diagram after ``p``)."""
    if p.rule == "circle_remove":
        return [("circle_add", p.site)]
    if p.rule == "circle_add":
        return [("circle_remove", p.site)]
    if p.rule == "bridge":
        v1, s1, v3, s3 = p.site
        x1, x3 = (v1, s1), (v3, s3)
        x2, x4 = before.alpha[x1], before.alpha[x3]
        return [("bridge", x4 + x2), ("bridge", x1 + x3), ("bridge", x2 + x4), ("bridge", x3 + x1)]
    if p.rule == "cancel_pair":
        vx = before.vertices[p.site[0]]
        return [("cancel_create", (vx.i, vx.j, _kind_code(vx.kind)))]
    raise UnexpandableMacro(f"no inverse for {p.rule}")


def _zip_bridge(f: Follower, cands: list[tuple[Dart, Dart]], want: tuple[Dart, Dart]) -> None:
    for x1, x3 in cands:
        if bridge_ok(f.A, x1, x3):
            continue
        new = apply_primitive(f.A, "bridge", x1 + x3)
        if new.alpha.get(want[0]) == want[1]:
            f.direct("bridge", x1 + x3)
            return
    raise UnexpandableMacro("seam strands could not be bridged")


def expand_certificate(f: Follower, st: RewriteStep, E_next: Diagram) -> None:
    """Primitive steps for a certified patch replacement, appended to ``f``."""
    cert = st.certificate
    inside, attach = st.site
    degE = {v: f.E.degree(v) for v in f.E.vertices}
    inside_A = {f.phi[v][0] for v in inside}
    attach_A = [_img(f.phi, tuple(x), degE) for x in attach]
    N = cert.new
    L = len(N.ports)
    if len(attach_A) != L:
        raise UnexpandableMacro("certificate boundary does not match the site")

    # 1. the doubled new patch, built from nothing beside the host
    ds, prims = double_reduction(N)
    g = Follower(ds[-1], f.A, {}, foreign=set(f.A.vertices), whole=False)
    g.steps = f.steps
    for k in reversed(range(len(prims))):
        g.advance(ds[k], _inverse(ds[k], prims[k]))
    phi_g = g.phi
    degG = {v: ds[0].degree(v) for v in ds[0].vertices}

    # 2. zip the region boundary with the seam
    for k in range(L):
        a_k = attach_A[k]
        y = N.alpha[(BOUNDARY, k)]
        if y[0] != BOUNDARY:
            n_k = _img(phi_g, y, degG)
            r_k = g.A.alpha[n_k]
            _zip_bridge(g, [(a_k, r_k), (g.A.alpha[a_k], n_k)], (a_k, n_k))
        else:
            l = y[1]
            a_l = attach_A[l]
            if l < k or g.A.alpha[a_k] == a_l:
                continue
            _zip_bridge(g, [(a_k, g.A.alpha[a_l]), (g.A.alpha[a_k], a_l)], (a_k, a_l))

    # 3. certificate on the split-off component
    C = glue(cert.old, cert.new)
    want = Counter(E_next.circles) + Counter(C.circles)
    have = Counter(g.A.circles)
    from .rules import ORIENT_CODES
    for key in sorted(set(want) | set(have), key=str):
        c, o = key
        for _ in range(have[key] - want[key]):
            g.direct("circle_remove", (c, ORIENT_CODES[o]))
        for _ in range(want[key] - have[key]):
            g.direct("circle_add", (c, ORIENT_CODES[o]))
    pool = inside_A | {phi_g[v][0] for v in phi_g if v not in N.vertices}
    phi_c = extend_map(C, g.A, {}, pool)
    if phi_c is None:
        raise UnexpandableMacro("split-off component is not the certificate's gluing")
    c = Follower(C, g.A, phi_c, foreign=set(g.A.vertices) - pool, whole=False)
    c.steps = g.steps
    for p in expand_trace(cert.trace, C).steps:
        c.follow(p)

    # replaced vertices' ids may be reused by the new patch
    keep = {v: f.phi[v] for v in f.phi if v in E_next.vertices and v not in inside}
    phi = extend_map(E_next, c.A, keep, set(c.A.vertices))
    if phi is None or +Counter(c.A.circles) != +Counter(E_next.circles):
        raise UnexpandableMacro("rebuilt diagram differs from the recorded one")
    f.E, f.A, f.phi = E_next, c.A, phi
