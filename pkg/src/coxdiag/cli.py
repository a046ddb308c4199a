"""Command line interface: ``coxdiag <command> ...``.

Exit codes: 0 success, 1 invalid input, 2 reduction stuck, 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor

from .coxeter import CoxeterError, CoxeterSystem, build_system, format_word, is_trivial_word, \
    reduce_first_generator, word_to_element
from .io import ParseError, load, serialize, template_bytes, write_atomic
from .planar import DiagramError, canonical_code, validate

OK, INVALID, STUCK, BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def parse_group(text: str) -> CoxeterSystem:
    """``A3``, ``I5``, ``BI4`` (an optional colon is accepted: ``A:3``)."""
    m = re.fullmatch(r"([A-Za-z]+):?(\d+)", text.strip())
    if not m:
        raise InputError(f"bad group {text!r}; expected e.g. A3, I5, BI4")
    try:
        return build_system(m.group(1), int(m.group(2)))
    except CoxeterError as e:
        raise InputError(str(e)) from None


def _load(path: str):
    try:
        d = load(path)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    except DiagramError as e:
        raise InputError(f"{path}: {e}") from None
    errs = validate(d)
    if errs:
        raise InputError(f"{path}: {errs[0]}")
    return d


def _out(path: str | None, data: bytes) -> None:
    if path in (None, "-"):
        sys.stdout.write(data.decode())
    else:
        write_atomic(path, data)


# -- commands ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    status = OK
    for path in args.files:
        try:
            d = load(path)
        except (OSError, DiagramError) as e:
            print(f"{path}: {e}")
            status = INVALID
            continue
        errs = validate(d)
        for e in errs:
            print(f"{path}: {e}")
        if errs:
            status = INVALID
        else:
            print(f"{path}: ok ({len(d.vertices)} vertices, code {canonical_code(d)})")
    return status


def _reduce_one(job: tuple) -> tuple[str, int, str, bytes | None]:
    path, budget, strategy, want_trace, expand, rules = job
    from .reduce import BudgetExhausted, ReductionStuck, reduce, reduce_An, reduce_braid_dihedral, \
        reduce_dihedral
    from .trace import TraceError, expand_macros, serialize_trace
    if rules:
        from .rules import load_rules
        load_rules(rules)
    try:
        d = _load(path)
    except InputError as e:
        return path, INVALID, str(e), None
    fn = {"auto": reduce, "dihedral": reduce_dihedral, "braid": reduce_braid_dihedral,
          "An": reduce_An}[strategy]
    try:
        tr = fn(d, budget)
    except BudgetExhausted as e:
        return path, BUDGET, str(e), None
    except ReductionStuck as e:
        return path, STUCK, str(e), None
    except DiagramError as e:
        return path, INVALID, str(e), None
    if expand:
        try:
            tr = expand_macros(tr, d)
        except TraceError as e:
            return path, STUCK, f"expansion failed: {e}", None
    msg = f"reduced to empty in {len(tr.steps)} steps ({tr.count()} counting expansions)"
    return path, OK, msg, serialize_trace(tr) if want_trace else None


def cmd_reduce(args) -> int:
    if args.trace and len(args.files) > 1 and not os.path.isdir(args.trace):
        raise InputError("--trace must be a directory when reducing several files")
    jobs = [(p, args.budget, args.strategy, bool(args.trace), args.expand, args.rules) for p in args.files]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_reduce_one, jobs))
    else:
        results = [_reduce_one(j) for j in jobs]
    status = OK
    for path, code, msg, data in results:
        print(f"{path}: {msg}")
        status = max(status, code)
        if data is not None:
            target = args.trace
            if os.path.isdir(target):
                target = os.path.join(target, os.path.basename(path) + ".trace")
            _out(target, data)
    return status


def cmd_generate(args) -> int:
    from .generate import corpus
    sys_ = parse_group(args.group)
    if args.count < 1 or args.size < 0:
        raise InputError("count must be positive and size non-negative")
    seed = args.sub_seed if args.sub_seed is not None else args.seed
    ds = corpus(sys_, args.count, args.size, seed)
    if args.out in (None, "-"):
        for d in ds:
            sys.stdout.write(serialize(d).decode() + "\n")
        return OK
    os.makedirs(args.out, exist_ok=True)
    for k, d in enumerate(ds):
        write_atomic(os.path.join(args.out, f"{sys_.name}_{seed}_{k:04d}.cxd"), serialize(d))
    print(f"wrote {len(ds)} diagrams to {args.out}")
    return OK


def cmd_verify(args) -> int:
    from .trace import TraceError, parse_trace, verify_trace
    d = _load(args.diagram)
    try:
        with open(args.trace, "rb") as fh:
            tr = parse_trace(fh.read())
    except OSError as e:
        raise InputError(f"{args.trace}: {e.strerror}") from None
    except TraceError as e:
        print(f"rejected: {e}")
        return INVALID
    res = verify_trace(d, tr)
    if res.ok:
        print("accepted")
        return OK
    print(f"rejected at step {res.step}: {res.reason}")
    return INVALID


def cmd_render(args) -> int:
    from .report import RenderSpec, render
    d = _load(args.file)
    spec = RenderSpec(format=args.format, layout=args.layout)
    _out(args.out, render(d, spec))
    return OK


def cmd_stats(args) -> int:
    from .report import stats
    d = _load(args.file)
    rep = stats(d)
    if args.json:
        print(json.dumps(rep.as_dict(), indent=2))
        return OK
    print(f"vertices {rep.V}  edges {rep.E}  circles {rep.circles}")
    for n, c in enumerate(rep.components):
        tag = " (boundary)" if c.has_boundary else ""
        print(f"component {n}{tag}: V={c.V} E={c.E} F={c.F} euler={c.euler}")
    for t, n in rep.vertex_types.items():
        print(f"type ({t}): {n}")
    for k, n in rep.angles.items():
        print(f"{k} angles: {n}")
    return OK


def cmd_word(args) -> int:
    sys_ = parse_group(args.group)
    try:
        w = tuple(int(t) for t in re.split(r"[\s,]+", " ".join(args.word).strip()) if t)
    except ValueError:
        raise InputError("a word is a list of generator numbers") from None
    if any(s not in sys_.generators for s in w):
        raise InputError(f"generators of {sys_.name} are {list(sys_.generators)}")
    g = word_to_element(sys_, w)
    print(f"word      {format_word(w)}")
    print(f"trivial   {is_trivial_word(sys_, w)}")
    print(f"length    {sys_.length(g)}")
    if sys_.family == "A" and not sys_.oriented:
        print(f"first-gen {format_word(reduce_first_generator(sys_, w))}")
    return OK


def cmd_derive_zam(args) -> int:
    from .planar import glue
    from .reduce import reduce
    from .templates import derive_zam_template
    from .trace import serialize_trace
    sys_ = parse_group(args.group)
    t = derive_zam_template(sys_)
    os.makedirs(args.out, exist_ok=True)
    for side, p in ((1, t.side1), (2, t.side2)):
        write_atomic(os.path.join(args.out, f"{t.name}.{side}.tpl"), template_bytes(t.name, side, p))
    g = glue(t.side1, t.side2)
    write_atomic(os.path.join(args.out, f"{t.name}.cert"), serialize_trace(reduce(g, args.budget)))
    print(f"template {t.name}: sides with {len(t.side1.vertices)} and {len(t.side2.vertices)} vertices, "
          f"{len(t.side1.ports)} boundary points; written to {args.out}")
    return OK


# -- entry point ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coxdiag", description="Planar diagrams for Coxeter presentations.")
    p.add_argument("--rules", help="directory of template rule files overriding the built-ins")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None, help="maximum number of elementary steps")
    p.add_argument("--jobs", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check diagram files")
    s.add_argument("files", nargs="+")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("reduce", help="reduce closed diagrams to the empty diagram")
    s.add_argument("files", nargs="+")
    s.add_argument("--strategy", choices=("auto", "dihedral", "braid", "An"), default="auto")
    s.add_argument("--trace", help="write the trace here (a directory for several inputs)")
    s.add_argument("--expand", action="store_true", help="write primitive steps only")
    s.set_defaults(fn=cmd_reduce)

    s = sub.add_parser("generate", help="random trivial diagrams")
    s.add_argument("--group", required=True)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--size", type=int, default=20, help="target vertex count")
    s.add_argument("--seed", dest="sub_seed", type=int, help="overrides the global --seed")
    s.add_argument("--out", help="output directory (default: stdout)")
    s.set_defaults(fn=cmd_generate)

    s = sub.add_parser("verify", help="replay a trace against a diagram")
    s.add_argument("diagram")
    s.add_argument("trace")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("render", help="draw a diagram")
    s.add_argument("file")
    s.add_argument("--format", choices=("dot", "svg"), default="svg")
    s.add_argument("--layout", choices=("tutte", "force"), default="tutte")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_render)

    s = sub.add_parser("stats", help="counts, Euler characteristics and histograms")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_stats)

    s = sub.add_parser("word", help="word problem utilities")
    s.add_argument("--group", required=True)
    s.add_argument("word", nargs="+")
    s.set_defaults(fn=cmd_word)

    s = sub.add_parser("derive-zam", help="derive the rank-3 template and its certificate")
    s.add_argument("--group", default="A3")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_derive_zam)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.rules:
            from .rules import load_rules
            load_rules(args.rules)
        return args.fn(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return INVALID
    except (ParseError, DiagramError, CoxeterError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
