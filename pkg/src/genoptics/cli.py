"""Command-line front end.

Exit status: 0 on success, 1 when an optic cannot be derived, 2 for parse,
validation, typecheck and usage errors.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Optional

from . import bench as benchmod
from .derive import (
    DeriveError, derive_ctor_prism, derive_field, derive_param, derive_position, derive_sub_prism,
    derive_super, derive_typed, derive_typed_prism, derive_types, plan_cache,
)
from .engine import (
    DEFAULT_DEPTH_BOUND, ByParam, InterestingDepthWarning, _short, ByType, DepthExceeded, compile_plan, interesting, plan_nodes, show_plan,
)
from .optics import (
    Focus, KindMismatch, Lens, MiddleTypeMismatch, build, compose_all, match, modify, over,
    to_list_of, update, view,
)
from .rep import ParamOutOfRange, get_param, index_params, rep_of, show_rep
from .schema import (
    App, ParamTag, Prim, Schema, SchemaError, TypeExpr, check_ground, is_primitive, parse_schema, parse_type,
    prelude, show_type, validate,
)
from .value import (
    Ctor, PFloat, PInt, PString, ParseError, TypeMismatch, coerce_numbers, pair, parse_value,
    print_value, to_list, typecheck,
)


class UsageError(Exception):
    pass


EXIT_OK, EXIT_DERIVE, EXIT_INPUT = 0, 1, 2


def bundled_schema_text() -> str:
    return resources.files("genoptics").joinpath("data/shop.schema").read_text(encoding="utf-8")


def load_schema(path: Optional[str]) -> Schema:
    if path is None:
        text = bundled_schema_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    s = parse_schema(text, prelude())
    findings = validate(s)
    if findings:
        raise UsageError("; ".join(str(f) for f in findings))
    return s


def ground_type(schema: Schema, text: str) -> TypeExpr:
    ty = parse_type(text)
    findings = check_ground(schema, ty)
    if findings:
        raise UsageError("; ".join(str(f) for f in findings))
    return ty


# ---------------------------------------------------------------------------
# Optic expressions


@dataclass(frozen=True)
class Step:
    op: str
    arg: object = None
    target: Optional[TypeExpr] = None

    @property
    def can_change_type(self) -> bool:
        return self.op in ("field", "position", "param")


_TYPE_STEPS = {"typed", "super", "typedp", "_Typed", "sub", "_Sub", "types"}
_ALIASES = {"_Typed": "typedp", "_Sub": "sub"}


def parse_optic(text: str) -> list[Step]:
    """Steps joined by `` . ``, applied left to right."""
    steps = []
    for raw in text.split(" . "):
        part = raw.strip()
        if not part:
            raise UsageError(f"empty step in optic {text!r}")
        target = None
        if "->" in part:
            part, _, tgt = part.partition("->")
            part = part.strip()
            target = parse_type(tgt.strip())
        head, _, rest = part.partition(" ")
        rest = rest.strip()
        if head in ("field", "ctor"):
            if not rest.isidentifier():
                raise UsageError(f"{head} needs a name, got {rest!r}")
            steps.append(Step(head, rest, target))
        elif head in ("position", "param"):
            try:
                steps.append(Step(head, int(rest), target))
            except ValueError:
                raise UsageError(f"{head} needs an integer, got {rest!r}") from None
        elif head in _TYPE_STEPS:
            if not rest:
                raise UsageError(f"{head} needs a type")
            steps.append(Step(_ALIASES.get(head, head), parse_type(rest), target))
        elif head.startswith("_") and head[1:2].isupper() and not rest:
            steps.append(Step("ctor", head[1:], target))
        else:
            raise UsageError(f"unknown optic step {part!r}")
    for st in steps[:-1]:
        if st.target is not None:
            raise UsageError("only the last step may carry a target type")
    for st in steps:
        if st.target is not None and not st.can_change_type:
            raise UsageError(f"{st.op} does not change types; drop the target")
    return steps


def _derive_step(schema: Schema, st: Step, s: TypeExpr, b: Optional[TypeExpr], depth_bound: int):
    if st.op == "field":
        return derive_field(schema, s, st.arg, b)
    if st.op == "position":
        return derive_position(schema, s, st.arg, b)
    if st.op == "param":
        return derive_param(schema, s, st.arg, b, plan_cache(schema, depth_bound))
    if st.op == "typed":
        o = derive_typed(schema, s, st.arg)
    elif st.op == "super":
        o = derive_super(schema, s, st.arg)
    elif st.op == "ctor":
        o = derive_ctor_prism(schema, s, st.arg)
    elif st.op == "typedp":
        o = derive_typed_prism(schema, s, st.arg)
    elif st.op == "sub":
        o = derive_sub_prism(schema, s, st.arg)
    elif st.op == "types":
        o = derive_types(schema, s, st.arg, plan_cache(schema, depth_bound))
    else:
        raise UsageError(f"unknown optic step {st.op}")
    if b is not None and b is not o.a_ty:
        raise DeriveError(
            "NotTypeChanging", f"The optic '{st.op}' on {show_type(s)} cannot change its focus type.", s, b
        )
    return o


def derive_optic(schema: Schema, s: TypeExpr, steps: list[Step], depth_bound: int = DEFAULT_DEPTH_BOUND):
    return compose_all(*derive_parts(schema, s, steps, depth_bound))


def derive_parts(schema: Schema, s: TypeExpr, steps: list[Step], depth_bound: int = DEFAULT_DEPTH_BOUND) -> list:
    """Derive each step at the focus type of the previous one, then redo the
    chain right to left so a type change at the end propagates outwards."""
    sources = [s]
    mono = []
    for st in steps:
        o = _derive_step(schema, st, sources[-1], None, depth_bound)
        mono.append(o)
        sources.append(o.a_ty)
    target = steps[-1].target
    if target is None:
        return mono
    optics = [None] * len(steps)
    b = target
    for i in range(len(steps) - 1, -1, -1):
        o = _derive_step(schema, steps[i], sources[i], b, depth_bound)
        optics[i] = o
        b = o.t_ty
    return optics


# ---------------------------------------------------------------------------
# Actions


def _numeric(v, op: Callable, what: str):
    """Apply ``op`` to a number, looking inside single-field wrappers like Cost."""
    if isinstance(v, (PInt, PFloat)):
        return op(v)
    if isinstance(v, Ctor) and len(v.args) == 1:
        return Ctor(v.name, (_numeric(v.args[0], op, what),))
    raise UsageError(f"{what} needs a number, got {print_value(v)}")


def _add(n):
    def op(v):
        if isinstance(v, PInt) and isinstance(n, PInt):
            return PInt(v.value + n.value)
        return PFloat(v.value + n.value)

    return op


def _mul(x):
    def op(v):
        if isinstance(v, PInt) and isinstance(x, PInt):
            return PInt(v.value * x.value)
        return PFloat(v.value * x.value)

    return op


def _negate(v):
    return PInt(-v.value) if isinstance(v, PInt) else PFloat(-v.value)


def _length(v):
    if isinstance(v, PString):
        return PInt(len(v.value))
    items = to_list(v)
    if items is None:
        raise UsageError(f"length needs a string or list, got {print_value(v)}")
    return PInt(len(items))


def builtin(text: str, schema: Schema, b_ty: TypeExpr) -> Callable:
    name, _, arg = text.strip().partition(" ")
    arg = arg.strip()

    def literal(ty=None):
        if not arg:
            raise UsageError(f"{name} needs an argument")
        v = parse_value(arg)
        return coerce_numbers(schema, v, ty) if ty is not None else v

    if name == "add":
        n = literal()
        return lambda v: _numeric(v, _add(n), "add")
    if name == "mul":
        x = literal()
        return lambda v: _numeric(v, _mul(x), "mul")
    if name == "negate":
        return lambda v: _numeric(v, _negate, "negate")
    if name == "length":
        return _length
    if name == "show":
        return lambda v: PString(print_value(v))
    if name == "const":
        c = literal(b_ty)
        return lambda _v: c
    if name == "pairWith":
        second = b_ty.args[1] if isinstance(b_ty, App) and b_ty.name == "Pair" else None
        c = literal(second)
        return lambda v: pair(v, c)
    raise UsageError(f"unknown modify function {name!r}")


def run_action(schema: Schema, optic, action: str, v) -> str:
    verb, _, rest = action.strip().partition(" ")
    rest = rest.strip()
    if verb == "view":
        return print_value(view(optic, v))
    if verb == "list":
        return "[" + ", ".join(print_value(x) for x in to_list_of(optic, v)) + "]"
    if verb == "set":
        if optic.kind is not Lens:
            raise KindMismatch("set", Lens, optic.kind)
        b = parse_value(rest, optic.b_ty, schema)
        return print_value(update(optic, b, v))
    if verb == "modify":
        f = builtin(rest, schema, optic.b_ty)
        if optic.kind is Lens:
            return print_value(modify(optic, f, v))
        return print_value(over(optic, f, v))
    if verb == "match":
        r = match(optic, v)
        tag = "Right" if isinstance(r, Focus) else "Left"
        return print_value(Ctor(tag, (r.value,)))
    if verb == "build":
        b = parse_value(rest, optic.b_ty, schema)
        return print_value(build(optic, b))
    raise UsageError(f"unknown action {verb!r}")


# ---------------------------------------------------------------------------
# Commands


def cmd_check(args, out, err) -> int:
    path = args.file or args.schema
    s = load_schema(path)
    n = sum(1 for d in s if not s.is_prelude(d.name))
    print(f"ok: {n} types", file=out)
    return EXIT_OK


def _read_value_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def cmd_query(args, out, err) -> int:
    s = load_schema(args.schema)
    if not args.type or not args.optic or not args.action:
        raise UsageError("query needs --type, --optic and --action")
    if args.value is None and args.value_text is None:
        raise UsageError("query needs --value (or --value-text)")
    ty = ground_type(s, args.type)
    text = args.value_text if args.value_text is not None else _read_value_text(args.value)
    v = parse_value(text, ty, s)
    mismatch = typecheck(s, v, ty)
    if mismatch is not None:
        raise mismatch
    optic = derive_optic(s, ty, parse_optic(args.optic), args.depth_bound)
    print(run_action(s, optic, args.action, v), file=out)
    return EXIT_OK


def _plan_summary(plan) -> str:
    nodes = plan_nodes(plan)
    foci = skips = lazy = 0
    for n in nodes:
        for _name, kids in n.ctors:
            for k in kids:
                if k.kind == "FocusLeaf":
                    foci += 1
                elif k.kind == "SkipLeaf":
                    skips += 1
                elif k.kind == "Lazy":
                    lazy += 1
    text = f"plan: {len(nodes)} descend nodes, {foci} focus leaves, {skips} skip leaves"
    return text + (f", {lazy} deferred" if lazy else "")


def cmd_derive(args, out, err) -> int:
    s = load_schema(args.schema)
    ty = ground_type(s, args.type_expr)
    steps = parse_optic(args.optic_text)
    parts = derive_parts(s, ty, steps, args.depth_bound)
    print(compose_all(*parts).signature(), file=out)
    for i, o in enumerate(parts, 1):
        plan = getattr(o.body, "plan", None)
        if plan is None:
            continue
        summary = _plan_summary(plan)
        print(summary if len(parts) == 1 else f"step {i} {summary}", file=out)
    return EXIT_OK


def _parse_query(s: Schema, text: str, ty: TypeExpr):
    head, _, rest = text.strip().partition(" ")
    rest = rest.strip()
    if head == "types":
        return ByType(ground_type(s, rest))
    if head == "param":
        try:
            i = int(rest)
        except ValueError:
            raise UsageError(f"param needs an integer, got {rest!r}") from None
        try:
            a = get_param(ty, i)
        except ParamOutOfRange as e:
            raise DeriveError("ParamOutOfRange", f"The type {show_type(ty)} does not have a type parameter at index {i}.", ty, i) from e
        return ByParam(i, a, a)
    raise UsageError(f"unknown query {text!r}; use 'types T' or 'param i'")


def cmd_analyze(args, out, err) -> int:
    s = load_schema(args.schema)
    ty = ground_type(s, args.type_expr)
    if args.rep:
        print(show_rep(rep_of(s, ty)), file=out)
        if not args.query:
            return EXIT_OK
    if not args.query:
        raise UsageError("analyze needs --query (or --rep)")
    q = _parse_query(s, args.query, ty)
    root = index_params(ty).tagged if isinstance(q, ByParam) else ty
    if is_primitive(root):
        print(f"{show_type(ty)} is primitive: nothing to traverse", file=out)
        return EXIT_OK
    for c in s.instantiate(root):
        for k, f in enumerate(c.fields, 1):
            label = f"{c.name}.{f.name}" if f.name else f"{c.name}[{k}]"
            print(f"{label} :: {show_type(f.ty)}  {_verdict(s, f.ty, q, args.depth_bound)}", file=out)
    plan = compile_plan(s, plan_cache(s, args.depth_bound), ty, q)
    print(show_plan(plan), file=out)
    if args.seen_trace:
        trace: list = []
        try:
            interesting(s, root, q, depth_bound=args.depth_bound, trace=trace)
        except DepthExceeded as e:
            print(f"warning: {e}", file=err)
        for t, path in trace:
            print(f"expand {_short(t)}; seen: {{{', '.join(_short(p, 40) for p in path)}}}", file=out)
    return EXIT_OK


def _verdict(s: Schema, ft: TypeExpr, q, bound: int) -> str:
    if q.matches(ft):
        return "interesting"
    inner = ft
    while isinstance(inner, ParamTag):
        inner = inner.inner
    if isinstance(inner, Prim):
        return "pruned"
    try:
        return "interesting" if interesting(s, inner, q, depth_bound=bound) else "pruned"
    except DepthExceeded:
        return "interesting (depth bound reached)"


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def cmd_bench(args, out, err) -> int:
    suites = list(benchmod.SUITES) if args.suite == "all" else [args.suite]
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    sizes = _int_list(args.sizes) if args.sizes else None
    try:
        rows = benchmod.run_bench(suites, sizes, engines, args.reps)
    except benchmod.BenchError as e:
        raise UsageError(str(e)) from None
    text = benchmod.to_csv(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    if rows:
        print(benchmod.normalized_table(rows), file=err if not args.csv else out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="genoptics", description="Derive and run generic optics over schema-defined types.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--schema", help="schema file (defaults to the bundled example schema)")
    common.add_argument("--depth-bound", type=int, default=DEFAULT_DEPTH_BOUND, dest="depth_bound")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="parse and validate a schema")
    c.add_argument("file", nargs="?")
    c.set_defaults(func=cmd_check)

    q = sub.add_parser("query", parents=[common], help="derive an optic and apply an action to a value")
    q.add_argument("--value", help="value file, or - for stdin")
    q.add_argument("--value-text", dest="value_text", help="value given inline")
    q.add_argument("--type")
    q.add_argument("--optic")
    q.add_argument("--action")
    q.set_defaults(func=cmd_query)

    d = sub.add_parser("derive", parents=[common], help="print a derived optic's types and plan")
    d.add_argument("type_expr")
    d.add_argument("optic_text")
    d.set_defaults(func=cmd_derive)

    a = sub.add_parser("analyze", parents=[common], help="field verdicts, plan and representation of a type")
    a.add_argument("type_expr")
    a.add_argument("--query")
    a.add_argument("--rep", action="store_true", help="print the sum-of-products representation")
    a.add_argument("--seen-trace", action="store_true", dest="seen_trace")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("bench", parents=[common], help="time plan, naive and handwritten engines")
    b.add_argument("suite", nargs="?", default="all", choices=[*benchmod.SUITES, "all"])
    b.add_argument("--sizes")
    b.add_argument("--engines", default=",".join(benchmod.ENGINES))
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--csv")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[list] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", InterestingDepthWarning)
        code = _dispatch(args, out, err)
    for w in caught:
        if issubclass(w.category, InterestingDepthWarning):
            print(f"warning: {w.message}", file=err)
        else:
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    return code


def _dispatch(args, out, err) -> int:
    try:
        return args.func(args, out, err)
    except DeriveError as e:
        print(e.message, file=err)
        return EXIT_DERIVE
    except MiddleTypeMismatch as e:
        print(str(e), file=err)
        return EXIT_DERIVE
    except (ParseError, TypeMismatch, SchemaError, UsageError, KindMismatch, ParamOutOfRange, OSError) as e:
        print(f"error: {e}", file=err)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
