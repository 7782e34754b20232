"""Derive lenses, prisms and traversals from schema definitions."""
from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

from . import engine
from .effects import IDENTITY, EffectInterface
from .engine import ByParam, ByType, DepthExceeded, Effect, Fold, MapPure, PlanCache, compile_plan, run_plan
from .optics import Focus, LensBody, Optic, PrismBody, Residual, TravBody, Lens, Prism, Traversal
from .rep import ParamOutOfRange, get_param, put_param
from .schema import App, CtorDef, Prim, Schema, TypeDef, TypeExpr, Var, pair_type, show_type, var_occurrences
from .value import Ctor

UNIT = App("Unit")


class DeriveError(Exception):
    def __init__(self, code: str, message: str, subject: Optional[TypeExpr] = None, detail: Any = None):
        self.code = code
        self.message = message
        self.subject = subject
        self.detail = detail
        super().__init__(message)


# ---------------------------------------------------------------------------
# Plan caches, one per schema

_CACHES: "weakref.WeakKeyDictionary[Schema, dict]" = weakref.WeakKeyDictionary()


def plan_cache(schema: Schema, depth_bound: int = engine.DEFAULT_DEPTH_BOUND) -> PlanCache:
    per_schema = _CACHES.setdefault(schema, {})
    cache = per_schema.get(depth_bound)
    if cache is None:
        cache = per_schema[depth_bound] = PlanCache(depth_bound)
    return cache


# ---------------------------------------------------------------------------
# Helpers


def _typedef(schema: Schema, s: TypeExpr) -> TypeDef:
    if isinstance(s, Prim):
        raise DeriveError("NotAnAlgebraicType", f"The type {show_type(s)} is primitive and has no fields.", s)
    if not isinstance(s, App) or s.name not in schema:
        raise DeriveError("UnknownType", f"Unknown type {show_type(s)}.", s)
    d = schema.lookup(s.name)
    if d.arity != len(s.args):
        raise DeriveError("ArityMismatch", f"The type {s.name} expects {d.arity} arguments.", s)
    return d


def _single(schema: Schema, s: TypeExpr) -> tuple[TypeDef, CtorDef, CtorDef]:
    """Declared and instantiated constructor of a single-constructor type."""
    d = _typedef(schema, s)
    if len(d.ctors) != 1:
        raise DeriveError(
            "MultiConstructor",
            f"The type {show_type(s)} has {len(d.ctors)} constructors; lenses need exactly one.",
            s,
            [c.name for c in d.ctors],
        )
    return d, d.ctors[0], schema.instantiate(s)[0]


def _focus_type(fields) -> TypeExpr:
    tys = [f.ty for f in fields]
    if not tys:
        return UNIT
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = pair_type(t, out)
    return out


def _pack(args: tuple):
    if not args:
        return Ctor("Unit", ())
    out = args[-1]
    for x in reversed(args[:-1]):
        out = Ctor("Pair", (x, out))
    return out


def _unpack(v, n: int) -> tuple:
    if n == 0:
        return ()
    out = []
    for _ in range(n - 1):
        out.append(v.args[0])
        v = v.args[1]
    out.append(v)
    return tuple(out)


def _positional_lens(schema, s, d, decl: CtorDef, inst: CtorDef, k: int, b_ty, label: str) -> Optic:
    a_ty = inst.fields[k].ty
    body_ty = decl.fields[k].ty
    changing = isinstance(body_ty, Var) and sum(
        var_occurrences(f.ty, body_ty.index) for c in d.ctors for f in c.fields
    ) == 1
    if b_ty is None or b_ty is a_ty:
        b_ty, t_ty = a_ty, s
    elif changing:
        t_ty = put_param(s, d.arity - 1 - body_ty.index, b_ty)
    else:
        raise DeriveError(
            "NotTypeChanging",
            f"The field at position {k + 1} of {show_type(s)} cannot change type.",
            s,
            {"position": k + 1, "target": b_ty},
        )
    name = decl.name

    def extract(v):
        return v.args[k], v.args

    def rebuild(b, args):
        return Ctor(name, args[:k] + (b,) + args[k + 1:])

    return Optic(Lens, s, t_ty, a_ty, b_ty, LensBody(extract, rebuild), schema, label)


# ---------------------------------------------------------------------------
# Lenses


def derive_field(schema: Schema, s: TypeExpr, name: str, b_ty: Optional[TypeExpr] = None) -> Optic:
    d = _typedef(schema, s)
    if len(d.ctors) != 1 and any(f.name == name for c in d.ctors for f in c.fields):
        _single(schema, s)
    if len(d.ctors) == 1:
        decl = d.ctors[0]
        for k, f in enumerate(decl.fields):
            if f.name == name:
                return _positional_lens(schema, s, d, decl, schema.instantiate(s)[0], k, b_ty, f"field {name}")
        if decl.fields and not decl.is_record:
            raise DeriveError("NotARecord", f"The type {show_type(s)} has no named fields.", s, name)
    raise DeriveError(
        "NoSuchField", f"The type {show_type(s)} does not contain a field named {name}.", s, name
    )


def derive_position(schema: Schema, s: TypeExpr, k: int, b_ty: Optional[TypeExpr] = None) -> Optic:
    d = _typedef(schema, s)
    if len(d.ctors) == 1 and 1 <= k <= len(d.ctors[0].fields):
        return _positional_lens(schema, s, d, d.ctors[0], schema.instantiate(s)[0], k - 1, b_ty, f"position {k}")
    if len(d.ctors) > 1:
        _single(schema, s)
    raise DeriveError(
        "PositionOutOfRange", f"The type {show_type(s)} does not contain a field at position {k}", s, k
    )


def derive_typed(schema: Schema, s: TypeExpr, a: TypeExpr) -> Optic:
    d, decl, inst = _single(schema, s)
    hits = [k for k, f in enumerate(inst.fields) if f.ty is a]
    if not hits:
        raise DeriveError("TypeAbsent", f"The type {show_type(s)} does not contain a field of type {show_type(a)}.", s, a)
    if len(hits) > 1:
        raise DeriveError(
            "TypeAmbiguous",
            f"The type {show_type(s)} contains {show_type(a)} at positions {', '.join(str(k + 1) for k in hits)}.",
            s,
            [k + 1 for k in hits],
        )
    lens = _positional_lens(schema, s, d, decl, inst, hits[0], None, f"typed {show_type(a)}")
    return lens


def derive_super(schema: Schema, sub: TypeExpr, sup: TypeExpr) -> Optic:
    _, sub_decl, sub_inst = _single(schema, sub)
    _, sup_decl, sup_inst = _single(schema, sup)
    for ty, decl in ((sub, sub_decl), (sup, sup_decl)):
        if decl.fields and not decl.is_record:
            raise DeriveError("NotARecord", f"The type {show_type(ty)} has no named fields.", ty)
    where = {f.name: (k, f.ty) for k, f in enumerate(sub_inst.fields)}
    missing, mismatched, slots = [], [], []
    for f in sup_inst.fields:
        hit = where.get(f.name)
        if hit is None:
            missing.append(f.name)
        elif hit[1] is not f.ty:
            mismatched.append(f.name)
        else:
            slots.append(hit[0])
    if missing or mismatched:
        parts = []
        if missing:
            parts.append("missing " + ", ".join(missing))
        if mismatched:
            parts.append("mismatched " + ", ".join(mismatched))
        raise DeriveError(
            "NotASubtype",
            f"The type {show_type(sub)} is not a subtype of {show_type(sup)}: {'; '.join(parts)}.",
            sub,
            {"missing": missing, "mismatched": mismatched},
        )
    sup_name = sup_decl.name
    sub_name = sub_decl.name

    def extract(v):
        return Ctor(sup_name, tuple(v.args[k] for k in slots)), v.args

    def rebuild(b, args):
        out = list(args)
        for k, x in zip(slots, b.args):
            out[k] = x
        return Ctor(sub_name, tuple(out))

    return Optic(Lens, sub, sub, sup, sup, LensBody(extract, rebuild), schema, f"super {show_type(sup)}")


# ---------------------------------------------------------------------------
# Prisms


def _ctor_prism(schema, s, decl_name: str, inst: CtorDef, label: str) -> Optic:
    n = len(inst.fields)
    a_ty = _focus_type(inst.fields)

    def match_(v):
        if v.name == decl_name:
            return Focus(_pack(v.args))
        return Residual(v)

    def build_(b):
        return Ctor(decl_name, _unpack(b, n))

    return Optic(Prism, s, s, a_ty, a_ty, PrismBody(match_, build_), schema, label)


def derive_ctor_prism(schema: Schema, s: TypeExpr, name: str) -> Optic:
    _typedef(schema, s)
    for inst in schema.instantiate(s):
        if inst.name == name:
            return _ctor_prism(schema, s, name, inst, f"_{name}")
    raise DeriveError("NoSuchConstructor", f"The type {show_type(s)} does not have a constructor named {name}.", s, name)


def derive_typed_prism(schema: Schema, s: TypeExpr, a: TypeExpr) -> Optic:
    _typedef(schema, s)
    hits = [c for c in schema.instantiate(s) if _focus_type(c.fields) is a]
    if not hits:
        raise DeriveError("TypeAbsent", f"No constructor of {show_type(s)} holds exactly {show_type(a)}.", s, a)
    if len(hits) > 1:
        raise DeriveError(
            "TypeAmbiguous",
            f"Constructors {', '.join(c.name for c in hits)} of {show_type(s)} all hold {show_type(a)}.",
            s,
            [c.name for c in hits],
        )
    return _ctor_prism(schema, s, hits[0].name, hits[0], f"_Typed {show_type(a)}")


def derive_sub_prism(schema: Schema, sup: TypeExpr, sub: TypeExpr) -> Optic:
    _typedef(schema, sup)
    _typedef(schema, sub)
    sup_ctors = schema.instantiate(sup)
    to_sup: dict[str, str] = {}
    for c in schema.instantiate(sub):
        sig = c.field_types()
        cands = [x.name for x in sup_ctors if x.field_types() == sig]
        if not cands:
            raise DeriveError(
                "NotASumSubtype",
                f"The constructor {c.name} of {show_type(sub)} has no counterpart in {show_type(sup)}.",
                sup,
                c.name,
            )
        if len(cands) > 1:
            raise DeriveError(
                "AmbiguousMapping",
                f"The constructor {c.name} of {show_type(sub)} matches {', '.join(cands)} in {show_type(sup)}.",
                sup,
                {c.name: cands},
            )
        to_sup[c.name] = cands[0]
    image: dict[str, str] = {}
    for sub_name, sup_name in to_sup.items():
        if sup_name in image:
            raise DeriveError(
                "AmbiguousMapping",
                f"The constructors {image[sup_name]} and {sub_name} of {show_type(sub)} both map to {sup_name}.",
                sup,
                {sup_name: [image[sup_name], sub_name]},
            )
        image[sup_name] = sub_name

    def match_(v):
        name = image.get(v.name)
        if name is None:
            return Residual(v)
        return Focus(Ctor(name, v.args))

    def build_(b):
        return Ctor(to_sup[b.name], b.args)

    return Optic(Prism, sup, sup, sub, sub, PrismBody(match_, build_), schema, f"_Sub {show_type(sub)}")


# ---------------------------------------------------------------------------
# Traversals


def _plan_traversal(plan) -> TravBody:
    def fold(s, stats=None):
        return run_plan(plan, Fold(), s, stats=stats)

    def map_(f, s, stats=None):
        return run_plan(plan, MapPure(f), s, stats=stats)

    def effect(eff, k, s, stats=None):
        return run_plan(plan, Effect(eff, k), s, stats=stats)

    return TravBody(fold, map_, effect, plan)


def _compile(schema, s, q, cache):
    try:
        return compile_plan(schema, cache, s, q)
    except DepthExceeded as e:
        raise DeriveError(
            "PolymorphicRecursionDepthExceeded",
            f"Analysing {show_type(s)} exceeded the depth bound {e.bound}.",
            s,
            e.bound,
        ) from e


def derive_types(schema: Schema, s: TypeExpr, a: TypeExpr, cache: Optional[PlanCache] = None) -> Optic:
    """Every occurrence of ``a`` inside ``s``, outermost first, never the root."""
    if not isinstance(s, Prim):
        _typedef(schema, s)
    cache = cache or plan_cache(schema)
    plan = _compile(schema, s, ByType(a), cache)
    return Optic(Traversal, s, s, a, a, _plan_traversal(plan), schema, f"types {show_type(a)}")


def derive_param(
    schema: Schema, s: TypeExpr, i: int, b_ty: Optional[TypeExpr] = None, cache: Optional[PlanCache] = None
) -> Optic:
    try:
        a = get_param(s, i)
    except ParamOutOfRange as e:
        raise DeriveError("ParamOutOfRange", f"The type {show_type(s)} does not have a type parameter at index {i}.", s, i) from e
    _typedef(schema, s)
    b = a if b_ty is None else b_ty
    t = put_param(s, i, b)
    cache = cache or plan_cache(schema)
    plan = _compile(schema, s, ByParam(i, a, b), cache)
    return Optic(Traversal, s, t, a, b, _plan_traversal(plan), schema, f"param {i}")


# ---------------------------------------------------------------------------
# Constrained traversals


@dataclass(frozen=True)
class Instance:
    """Action for one field type: ``action(eff, v)`` yields an effect value
    holding the replacement, which has type ``out_ty``."""

    action: Callable
    out_ty: TypeExpr


@dataclass
class ConstrainedTraversal:
    schema: Schema
    s_ty: TypeExpr
    t_ty: TypeExpr
    table: Mapping[TypeExpr, Instance]
    _plan: list = field(default_factory=list, repr=False)

    def traverse(self, eff: EffectInterface, v):
        """Apply the table's action to every immediate field, left to right."""
        for name, kids in self._plan:
            if name == v.name:
                break
        else:
            raise KeyError(f"{v.name} is not a constructor of {show_type(self.s_ty)}")
        if not kids:
            return eff.pure(v)
        acc = eff.fmap(_collector(len(kids), name), kids[0].action(eff, v.args[0]))
        for inst, x in zip(kids[1:], v.args[1:]):
            acc = eff.ap(acc, inst.action(eff, x))
        return acc

    def over(self, v):
        return self.traverse(IDENTITY, v)


def _collector(n: int, name: str):
    def step(got):
        def take(x):
            cur = got + (x,)
            return Ctor(name, cur) if len(cur) == n else step(cur)

        return take

    return step(())


def derive_constraints(schema: Schema, s: TypeExpr, table: Mapping[TypeExpr, Any]) -> ConstrainedTraversal:
    d = _typedef(schema, s)
    table = {k: v if isinstance(v, Instance) else Instance(*v) for k, v in table.items()}
    plan = []
    for c in schema.instantiate(s):
        kids = []
        for f in c.fields:
            inst = table.get(f.ty)
            if inst is None:
                raise DeriveError(
                    "MissingInstance", f"No instance for field type {show_type(f.ty)} in {show_type(s)}.", s, f.ty
                )
            kids.append(inst)
        plan.append((c.name, kids))
    t = _solve_target(schema, s, d, table)
    return ConstrainedTraversal(schema, s, t, table, plan)


def _solve_target(schema, s, d: TypeDef, table) -> TypeExpr:
    """Target type: each field type replaced by its instance's output type."""
    assign: dict[int, TypeExpr] = {}
    for decl, inst in zip(d.ctors, schema.instantiate(s)):
        for fd, fi in zip(decl.fields, inst.fields):
            out = table[fi.ty].out_ty
            if not _unify(fd.ty, out, assign):
                raise DeriveError(
                    "InstanceTypeMismatch",
                    f"The instance for {show_type(fi.ty)} produces {show_type(out)}, which {show_type(s)} cannot hold there.",
                    s,
                    {"field": fi.ty, "output": out},
                )
    if not assign:
        return s
    args = list(s.args)
    for j, t in assign.items():
        args[j] = t
    return App(s.name, args)


def _unify(body: TypeExpr, out: TypeExpr, assign: dict) -> bool:
    if isinstance(body, Var):
        prev = assign.get(body.index)
        if prev is None:
            assign[body.index] = out
            return True
        return prev is out
    if isinstance(body, App):
        if not isinstance(out, App) or out.name != body.name or len(out.args) != len(body.args):
            return False
        return all(_unify(b, o, assign) for b, o in zip(body.args, out.args))
    return body is out


def has_types_table(schema: Schema, s: TypeExpr, a: TypeExpr, focus_action: Callable) -> dict:
    """Instance table that makes a constrained traversal behave like ``types a``.

    ``focus_action(eff, v)`` handles occurrences of ``a``; primitives are
    returned unchanged; every other type recurses through its own
    constrained traversal, built lazily from the same table.
    """
    table: dict = {}
    handles: dict = {}

    def recurse_into(ty):
        def action(eff, v):
            h = handles.get(ty)
            if h is None:
                h = handles[ty] = derive_constraints(schema, ty, table)
            return h.traverse(eff, v)

        return action

    def keep(eff, v):
        return eff.pure(v)

    stack = [s]
    seen = {s}
    while stack:
        ty = stack.pop()
        if isinstance(ty, Prim):
            continue
        for c in schema.instantiate(ty):
            for f in c.fields:
                ft = f.ty
                if ft in table:
                    continue
                if ft is a:
                    table[ft] = Instance(focus_action, ft)
                elif isinstance(ft, Prim):
                    table[ft] = Instance(keep, ft)
                else:
                    table[ft] = Instance(recurse_into(ft), ft)
                    if ft not in seen:
                        seen.add(ft)
                        stack.append(ft)
    return table


__all__ = [
    "DeriveError", "plan_cache", "derive_field", "derive_position", "derive_typed", "derive_super",
    "derive_ctor_prism", "derive_typed_prism", "derive_sub_prism", "derive_types", "derive_param",
    "Instance", "ConstrainedTraversal", "derive_constraints", "has_types_table", "UNIT",
]
