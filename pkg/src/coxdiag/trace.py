"""Replayable rewrite traces.

A trace is a list of steps, each naming a rule, its site, and the canonical
codes before and after.  Macro steps carry either the primitive steps they
stand for or a certificate: two patches with a common boundary together with
a trace that reduces their gluing to the empty diagram.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

from .planar import Diagram, DiagramError, canonical_code


@dataclass
class Certificate:
    old: Diagram       # patch being replaced
    new: Diagram       # replacement with the same boundary
    trace: Trace       # reduces glue(old, new) to the empty diagram


@dataclass
class RewriteStep:
    rule: str
    site: tuple
    before: str
    after: str
    expansion: list[RewriteStep] | None = None
    certificate: Certificate | None = None
    # rebuilds the expansion on demand; macros are deterministic given the site
    regen: Callable[[], list[RewriteStep]] | None = field(default=None, repr=False, compare=False)

    @property
    def is_macro(self) -> bool:
        return self.expansion is not None or self.certificate is not None or self.regen is not None

    def expanded(self) -> list[RewriteStep] | None:
        if self.expansion is None and self.regen is not None:
            self.expansion = self.regen()
            self.regen = None
        return self.expansion


@dataclass
class Trace:
    initial: str
    steps: list[RewriteStep] = field(default_factory=list)
    final: str = ""

    def __post_init__(self):
        if not self.final:
            self.final = self.steps[-1].after if self.steps else self.initial

    def __len__(self) -> int:
        return len(self.steps)

    def count(self, rule: str | None = None, deep: bool = True) -> int:
        """Number of steps (optionally of one rule), looking inside expansions."""
        n = 0
        for st in self.steps:
            n += rule is None or st.rule == rule
            if deep and st.is_macro and st.certificate is None:
                n += Trace("", st.expanded() or []).count(rule, deep)
        return n


class Recorder:
    """Applies moves to a current diagram and records them."""

    def __init__(self, d: Diagram, record: bool = True):
        self.d = d
        self.record = record
        self.steps: list[RewriteStep] = []
        self._code = canonical_code(d) if record else ""
        self.initial = self._code

    @property
    def code(self) -> str:
        return self._code

    def _push(self, rule: str, site: tuple, new: Diagram, certificate=None, regen=None) -> None:
        after = canonical_code(new) if self.record else ""
        if self.record:
            self.steps.append(RewriteStep(rule, tuple(site), self._code, after,
                                          certificate=certificate, regen=regen))
        self.d = new
        self._code = after

    def apply(self, rule: str, *site) -> Diagram:
        from .rules import apply_primitive
        new = apply_primitive(self.d, rule, tuple(site))
        self._push(rule, site, new)
        return new

    def macro(self, rule: str, site: tuple, body: Callable[[Recorder], object]):
        """Run ``body`` (a deterministic sequence of moves) as one step.

        The primitive steps are not coded now; the expansion is rebuilt from
        the diagram before the step when someone asks for it.
        """
        before = self.d
        sub = Recorder(before, record=False)
        result = body(sub)
        regen = None
        if self.record:
            def regen() -> list[RewriteStep]:
                r = Recorder(before)
                body(r)
                return r.steps
        self._push(rule, site, sub.d, regen=regen)
        return result

    def certified(self, rule: str, site: tuple, new: Diagram, cert: Certificate) -> None:
        self._push(rule, site, new, certificate=cert)

    def trace(self) -> Trace:
        return Trace(self.initial, list(self.steps), self._code)


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class TraceError(DiagramError):
    pass


# -- verification -------------------------------------------------------------------------

MACRO_RULES = ("delete_adjacent_pair", "insert_adjacent_pair")


@dataclass
class VerifyResult:
    ok: bool
    step: str | None = None    # "k" or "k/j/..." for nested steps
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class _Fail(Exception):
    def __init__(self, path: str, reason: str):
        super().__init__(reason)
        self.path = path
        self.reason = reason


def _run_macro(d: Diagram, rule: str, site: tuple) -> Diagram:
    from .rules import delete_adjacent_pair, insert_adjacent_pair
    rec = Recorder(d, record=False)
    if rule == "delete_adjacent_pair":
        delete_adjacent_pair(rec, *site)
    elif rule == "insert_adjacent_pair":
        x0, x1, i, j, t, kind = site
        insert_adjacent_pair(rec, (x0, x1), i, j, t, kind)
    else:
        raise TraceError(f"unknown macro {rule}")
    return rec.d


def _replay_step(d: Diagram, st: RewriteStep, path: str) -> Diagram:
    from .planar import Region, cut_patch, glue, replace_region, validate
    from .rules import PRIMITIVES, apply_primitive
    if st.rule in PRIMITIVES:
        if st.certificate is not None or st.expansion is not None:
            raise _Fail(path, "primitive step carries a certificate or expansion")
        return apply_primitive(d, st.rule, st.site)
    if st.rule in MACRO_RULES:
        if st.expansion is not None:
            return _replay(d, st.before, st.expansion, path + "/")[0]
        return _run_macro(d, st.rule, st.site)
    if st.rule == "patch_replace":
        cert = st.certificate
        if cert is None:
            raise _Fail(path, "patch replacement without certificate")
        inside, attach = st.site
        region = Region(frozenset(inside), [tuple(x) for x in attach])
        old = cut_patch(d, region)
        if validate(old):
            raise _Fail(path, "site is not a patch: " + validate(old)[0])
        if canonical_code(old) != canonical_code(cert.old):
            raise _Fail(path, "certificate does not match the replaced patch")
        g = glue(cert.old, cert.new)
        if canonical_code(g) != cert.trace.initial:
            raise _Fail(path, "certificate trace does not start at the gluing")
        res = _verify(g, cert.trace, path + "!")
        if not res.ok:
            raise _Fail(res.step or path, "certificate: " + res.reason)
        if not cert.trace.final.startswith("empty:"):
            raise _Fail(path, "certificate trace does not end empty")
        return replace_region(d, region, cert.new)[0]
    raise _Fail(path, f"unknown rule {st.rule}")


def _replay(d: Diagram, code: str, steps: list[RewriteStep], prefix: str) -> tuple[Diagram, str]:
    from .planar import validate
    for k, st in enumerate(steps):
        path = f"{prefix}{k}"
        if st.before != code:
            raise _Fail(path, "before code does not chain")
        sig = d.boundary_signature()
        try:
            new = _replay_step(d, st, path)
        except _Fail:
            raise
        except (DiagramError, KeyError, ValueError, TypeError, IndexError) as e:
            raise _Fail(path, f"{st.rule} not applicable: {e}") from None
        errs = validate(new)
        if errs:
            raise _Fail(path, "invalid result: " + errs[0])
        if new.boundary_signature() != sig:
            raise _Fail(path, "boundary changed")
        code = canonical_code(new)
        if code != st.after:
            raise _Fail(path, "after code mismatch")
        d = new
    return d, code


def _verify(d: Diagram, trace: Trace, prefix: str) -> VerifyResult:
    code = canonical_code(d)
    if code != trace.initial:
        return VerifyResult(False, prefix + "initial", "initial code mismatch")
    try:
        d, code = _replay(d, code, trace.steps, prefix)
    except _Fail as f:
        return VerifyResult(False, f.path, f.reason)
    if code != trace.final:
        return VerifyResult(False, prefix + "final", "final code mismatch")
    return VerifyResult(True)


def verify_trace(initial: Diagram, trace: Trace) -> VerifyResult:
    """Replay ``trace`` from ``initial``, checking every code, rule and certificate."""
    return _verify(initial, trace, "")


# -- macro expansion --------------------------------------------------------------------------

class UnexpandableMacro(TraceError):
    pass


def expand_macros(trace: Trace, initial: Diagram | None = None) -> Trace:
    """The same proof with every macro replaced by primitive steps.

    Without ``initial`` only macros carrying an expansion can be handled.
    With it, missing expansions are regenerated and certificate steps are
    rebuilt from their certificates (see ``expand``).
    """
    if initial is None:
        from .rules import PRIMITIVES
        out: list[RewriteStep] = []
        for st in trace.steps:
            if st.rule in PRIMITIVES:
                out.append(st)
                continue
            exp = st.expanded()
            if exp is None or st.certificate is not None:
                raise UnexpandableMacro(f"{st.rule} needs the initial diagram to expand")
            out.extend(exp)
        return Trace(trace.initial, out, trace.final)
    from .expand import expand_trace
    return expand_trace(trace, initial)


def _macro_into(rec: Recorder, st: RewriteStep) -> None:
    from .rules import delete_adjacent_pair, insert_adjacent_pair
    if st.rule == "delete_adjacent_pair":
        sub_fn = delete_adjacent_pair
        args = st.site
    else:
        x0, x1, i, j, t, kind = st.site
        sub_fn = insert_adjacent_pair
        args = ((x0, x1), i, j, t, kind)
    r = Recorder(rec.d, record=rec.record)
    sub_fn(r, *args)
    exp = r.steps[0].expanded() or []
    rec.steps.extend(exp)
    rec.d = r.d


# -- text format ------------------------------------------------------------------------------
#
#   trace <initial>
#   step <rule> <site> <before> <after>
#   begin-macro <rule> <site> <before> <after>
#     ...nested steps...
#   end-macro
#   begin-cert <rule> <site> <before> <after>
#     old <n>        followed by n diagram lines
#     new <n>        followed by n diagram lines
#     trace ...      nested trace
#   end-cert
#   final <code>
#   digest <sha256 of everything above>
#
# Sites are compact JSON; nesting is by two-space indentation.

def _site_text(site: tuple) -> str:
    import json
    return json.dumps(site, separators=(",", ":"))


def _tuplify(x):
    return tuple(_tuplify(y) for y in x) if isinstance(x, list) else x


def _site_parse(text: str) -> tuple:
    import json
    val = json.loads(text)
    if not isinstance(val, list):
        raise ValueError("site must be a list")
    return _tuplify(val)


def serialize_trace(trace: Trace, expansions: bool = True) -> bytes:
    """Text form; with ``expansions`` every macro's primitive steps are written out."""
    lines: list[str] = []
    _emit(trace, lines, "", expansions)
    body = ("\n".join(lines) + "\n").encode("utf-8")
    return body + f"digest {digest(body)}\n".encode()


def _emit(trace: Trace, lines: list[str], ind: str, expansions: bool) -> None:
    from .io import serialize
    lines.append(f"{ind}trace {trace.initial}")
    for st in trace.steps:
        head = f"{st.rule} {_site_text(st.site)} {st.before} {st.after}"
        if st.certificate is not None:
            c = st.certificate
            lines.append(f"{ind}begin-cert {head}")
            for tag, p in (("old", c.old), ("new", c.new)):
                body = serialize(p).decode().splitlines()
                lines.append(f"{ind}  {tag} {len(body)}")
                lines.extend(f"{ind}    {b}" for b in body)
            _emit(c.trace, lines, ind + "  ", expansions)
            lines.append(f"{ind}end-cert")
        elif st.is_macro and (expansions or st.expansion is not None):
            lines.append(f"{ind}begin-macro {head}")
            for sub in st.expanded() or []:
                _emit_step(sub, lines, ind + "  ")
            lines.append(f"{ind}end-macro")
        elif st.is_macro:
            lines.append(f"{ind}macro {head}")
        else:
            lines.append(f"{ind}step {head}")
    lines.append(f"{ind}final {trace.final}")


def _emit_step(st: RewriteStep, lines: list[str], ind: str) -> None:
    lines.append(f"{ind}step {st.rule} {_site_text(st.site)} {st.before} {st.after}")


class _Lines:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0

    def next(self, ind: str) -> list[str]:
        if self.pos >= len(self.lines):
            raise TraceError(f"line {self.pos + 1}: unexpected end of trace")
        raw = self.lines[self.pos]
        self.pos += 1
        if not raw.startswith(ind) or raw[len(ind):].startswith(" "):
            raise TraceError(f"line {self.pos}: bad indentation")
        return raw[len(ind):].split(" ")

    def raw(self, ind: str) -> str:
        raw = self.lines[self.pos] if self.pos < len(self.lines) else None
        self.pos += 1
        if raw is None or not raw.startswith(ind):
            raise TraceError(f"line {self.pos}: bad certificate block")
        return raw[len(ind):]


def parse_trace(data: bytes | str) -> Trace:
    raw = data if isinstance(data, bytes) else data.encode("utf-8")
    cut = raw.rfind(b"digest ", 0, len(raw) - 1)
    if cut < 0 or (cut and raw[cut - 1:cut] != b"\n"):
        raise TraceError("missing digest line")
    if raw[cut:] != f"digest {digest(raw[:cut])}\n".encode():
        raise TraceError("digest mismatch: the trace text was altered")
    try:
        text = raw[:cut].decode("utf-8")
    except UnicodeDecodeError as e:
        raise TraceError(f"not UTF-8: {e}") from None
    src = _Lines(text)
    tr = _parse_block(src, "")
    if src.pos != len(src.lines):
        raise TraceError(f"line {src.pos + 1}: trailing content")
    return tr


def _head(toks: list[str], lineno: int) -> tuple[str, tuple, str, str]:
    if len(toks) != 5:
        raise TraceError(f"line {lineno}: step needs rule, site and two codes")
    try:
        site = _site_parse(toks[2])
    except ValueError as e:
        raise TraceError(f"line {lineno}: bad site ({e})") from None
    return toks[1], site, toks[3], toks[4]


def _parse_block(src: _Lines, ind: str) -> Trace:
    from .io import parse
    toks = src.next(ind)
    if toks[0] != "trace" or len(toks) != 2:
        raise TraceError(f"line {src.pos}: expected 'trace <code>'")
    initial = toks[1]
    steps: list[RewriteStep] = []
    while True:
        toks = src.next(ind)
        key = toks[0]
        if key == "final":
            if len(toks) != 2:
                raise TraceError(f"line {src.pos}: expected 'final <code>'")
            return Trace(initial, steps, toks[1])
        if key in ("step", "macro"):
            rule, site, b, a = _head(toks, src.pos)
            steps.append(RewriteStep(rule, site, b, a))
            if key == "macro" and rule not in MACRO_RULES:
                raise TraceError(f"line {src.pos}: {rule} is not a macro")
        elif key == "begin-macro":
            rule, site, b, a = _head(toks, src.pos)
            sub = []
            while True:
                t2 = src.next(ind + "  ") if not src.lines[src.pos].startswith(ind + "end") else None
                if t2 is None:
                    end = src.next(ind)
                    if end != ["end-macro"]:
                        raise TraceError(f"line {src.pos}: expected end-macro")
                    break
                if t2[0] != "step":
                    raise TraceError(f"line {src.pos}: only primitive steps inside a macro")
                r2, s2, b2, a2 = _head(t2, src.pos)
                sub.append(RewriteStep(r2, s2, b2, a2))
            steps.append(RewriteStep(rule, site, b, a, expansion=sub))
        elif key == "begin-cert":
            rule, site, b, a = _head(toks, src.pos)
            pats = []
            for tag in ("old", "new"):
                t2 = src.next(ind + "  ")
                if len(t2) != 2 or t2[0] != tag or not t2[1].isdigit():
                    raise TraceError(f"line {src.pos}: expected '{tag} <lines>'")
                body = [src.raw(ind + "    ") for _ in range(int(t2[1]))]
                try:
                    pats.append(parse("\n".join(body) + "\n"))
                except DiagramError as e:
                    raise TraceError(f"line {src.pos}: bad certificate patch ({e})") from None
            sub_tr = _parse_block(src, ind + "  ")
            if src.next(ind) != ["end-cert"]:
                raise TraceError(f"line {src.pos}: expected end-cert")
            steps.append(RewriteStep(rule, site, b, a, certificate=Certificate(pats[0], pats[1], sub_tr)))
        else:
            raise TraceError(f"line {src.pos}: unknown key {key!r}")
