"""Optic kinds, eliminators and composition.

Lenses use the complement-pair form: ``extract`` splits a source into its
focus and an opaque complement, ``rebuild`` puts a new focus back. Composing
two lenses pairs their complements, so a composed ``modify`` still takes the
source apart once and puts it together once.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Callable, Optional

from .effects import CONST_LIST, IDENTITY, EffectInterface, collect
from .schema import App, ParamTag, Schema, TypeExpr, show_type
from .value import TypeMismatch, typecheck


class OpticKind(enum.Enum):
    LENS = "Lens"
    PRISM = "Prism"
    TRAVERSAL = "Traversal"

    def join(self, other: "OpticKind") -> "OpticKind":
        if self is other:
            return self
        return OpticKind.TRAVERSAL


Lens = OpticKind.LENS
Prism = OpticKind.PRISM
Traversal = OpticKind.TRAVERSAL


class KindMismatch(Exception):
    def __init__(self, operation: str, expected: OpticKind, found: OpticKind):
        self.operation = operation
        self.expected = expected
        self.found = found
        super().__init__(f"{operation} needs a {expected.value}, got a {found.value}")


class MiddleTypeMismatch(Exception):
    def __init__(self, outer: "Optic", inner: "Optic"):
        self.outer = (outer.a_ty, outer.b_ty)
        self.inner = (inner.s_ty, inner.t_ty)
        super().__init__(
            "cannot compose: outer optic focuses "
            f"{show_type(outer.a_ty)} -> {show_type(outer.b_ty)} but inner optic works on "
            f"{show_type(inner.s_ty)} -> {show_type(inner.t_ty)}"
        )


@dataclass(frozen=True)
class Residual:
    value: Any


@dataclass(frozen=True)
class Focus:
    value: Any


@dataclass(frozen=True)
class LensBody:
    extract: Callable[[Any], tuple]
    rebuild: Callable[[Any, Any], Any]


@dataclass(frozen=True)
class PrismBody:
    match: Callable[[Any], Any]
    build: Callable[[Any], Any]


@dataclass(frozen=True)
class TravBody:
    """Traversal in three execution modes.

    ``fold(s, stats)`` lists foci, ``map(f, s, stats)`` rebuilds with ``f``
    and ``effect(eff, k, s, stats)`` sequences ``k`` left to right.
    ``plan`` is the compiled plan when the traversal came from one.
    """

    fold: Callable
    map: Callable
    effect: Callable
    plan: Any = None


@dataclass(frozen=True)
class Optic:
    kind: OpticKind
    s_ty: TypeExpr
    t_ty: TypeExpr
    a_ty: TypeExpr
    b_ty: TypeExpr
    body: Any
    schema: Optional[Schema] = None
    label: str = ""

    @property
    def type_preserving(self) -> bool:
        return self.s_ty is self.t_ty and self.a_ty is self.b_ty

    def signature(self) -> str:
        return " ".join([self.kind.value] + [type_atom(t) for t in (self.s_ty, self.t_ty, self.a_ty, self.b_ty)])

    def __str__(self) -> str:
        return self.signature()


def type_atom(ty: TypeExpr) -> str:
    text = show_type(ty)
    if isinstance(ty, ParamTag) or (isinstance(ty, App) and ty.args and not (ty.name == "Pair" and len(ty.args) == 2)):
        return f"({text})"
    return text


# ---------------------------------------------------------------------------
# Operand checks


def _check(schema: Optional[Schema], v, ty: TypeExpr) -> None:
    if schema is None:
        return
    err = typecheck(schema, v, ty)
    if err is not None:
        raise err


def _need(o: Optic, kind: OpticKind, operation: str) -> None:
    if o.kind is not kind:
        raise KindMismatch(operation, kind, o.kind)


# ---------------------------------------------------------------------------
# Lens eliminators


def view(l: Optic, s):
    _need(l, Lens, "view")
    return l.body.extract(s)[0]


def update(l: Optic, b, s, check: bool = True):
    _need(l, Lens, "update")
    if check:
        _check(l.schema, s, l.s_ty)
        _check(l.schema, b, l.b_ty)
    return l.body.rebuild(b, l.body.extract(s)[1])


def modify(l: Optic, f: Callable, s, check: bool = True):
    _need(l, Lens, "modify")
    a, c = l.body.extract(s)
    b = f(a)
    if check:
        _check(l.schema, b, l.b_ty)
    return l.body.rebuild(b, c)


# ---------------------------------------------------------------------------
# Prism eliminators


def match(p: Optic, s):
    _need(p, Prism, "match")
    return p.body.match(s)


def build(p: Optic, b, check: bool = True):
    _need(p, Prism, "build")
    if check:
        _check(p.schema, b, p.b_ty)
    return p.body.build(b)


# ---------------------------------------------------------------------------
# Traversal view of every kind


def as_traversal(o: Optic) -> TravBody:
    if o.kind is Traversal:
        return o.body
    if o.kind is Lens:
        ext, reb = o.body.extract, o.body.rebuild

        def fold(s, stats=None):
            return [ext(s)[0]]

        def map_(f, s, stats=None):
            a, c = ext(s)
            return reb(f(a), c)

        def effect(eff, k, s, stats=None):
            a, c = ext(s)
            return eff.fmap(lambda b: reb(b, c), k(a))

        return TravBody(fold, map_, effect)
    m, bld = o.body.match, o.body.build

    def pfold(s, stats=None):
        r = m(s)
        return [r.value] if isinstance(r, Focus) else []

    def pmap(f, s, stats=None):
        r = m(s)
        return bld(f(r.value)) if isinstance(r, Focus) else r.value

    def peffect(eff, k, s, stats=None):
        r = m(s)
        if isinstance(r, Focus):
            return eff.fmap(bld, k(r.value))
        return eff.pure(r.value)

    return TravBody(pfold, pmap, peffect)


def over(t: Optic, f: Callable, s, check: bool = True, stats=None):
    """Replace every focus by ``f`` of it. With ``check`` the result must
    inhabit ``t.t_ty``; a failure names the path to the bad output."""
    if check:
        _check(t.schema, s, t.s_ty)
    out = as_traversal(t).map(f, s, stats)
    if check:
        _check(t.schema, out, t.t_ty)
    return out


def to_list_of(t: Optic, s, stats=None) -> list:
    return list(as_traversal(t).fold(s, stats))


def traverse_of(t: Optic, eff: EffectInterface, k: Callable, s, stats=None):
    return as_traversal(t).effect(eff, k, s, stats)


def over_via_effect(t: Optic, f: Callable, s):
    """``over`` expressed through the identity effect."""
    return traverse_of(t, IDENTITY, f, s)


def to_list_via_effect(t: Optic, s) -> list:
    """``to_list_of`` expressed through the constant-list effect."""
    return list(traverse_of(t, CONST_LIST, collect, s))


# ---------------------------------------------------------------------------
# Composition


def compose(o1: Optic, o2: Optic) -> Optic:
    """``o1`` then ``o2``: ``o2`` runs at every focus of ``o1``."""
    if o1.a_ty is not o2.s_ty or o1.b_ty is not o2.t_ty:
        raise MiddleTypeMismatch(o1, o2)
    kind = o1.kind.join(o2.kind)
    schema = o1.schema or o2.schema
    label = f"{o1.label} . {o2.label}" if o1.label and o2.label else ""
    if kind is Lens:
        body = _compose_lens(o1.body, o2.body)
    elif kind is Prism:
        body = _compose_prism(o1.body, o2.body)
    else:
        body = _compose_trav(as_traversal(o1), as_traversal(o2))
    return Optic(kind, o1.s_ty, o1.t_ty, o2.a_ty, o2.b_ty, body, schema, label)


def compose_all(*optics: Optic) -> Optic:
    out = optics[0]
    for o in optics[1:]:
        out = compose(out, o)
    return out


def _compose_lens(l1: LensBody, l2: LensBody) -> LensBody:
    e1, r1, e2, r2 = l1.extract, l1.rebuild, l2.extract, l2.rebuild

    def extract(s):
        a1, c1 = e1(s)
        a2, c2 = e2(a1)
        return a2, (c1, c2)

    def rebuild(b, c):
        c1, c2 = c
        return r1(r2(b, c2), c1)

    return LensBody(extract, rebuild)


def _compose_prism(p1: PrismBody, p2: PrismBody) -> PrismBody:
    m1, b1, m2, b2 = p1.match, p1.build, p2.match, p2.build

    def match_(s):
        r = m1(s)
        if isinstance(r, Residual):
            return r
        r2 = m2(r.value)
        if isinstance(r2, Residual):
            return Residual(b1(r2.value))
        return r2

    def build_(b):
        return b1(b2(b))

    return PrismBody(match_, build_)


def _compose_trav(t1: TravBody, t2: TravBody) -> TravBody:
    def fold(s, stats=None):
        out = []
        for x in t1.fold(s, stats):
            out.extend(t2.fold(x, stats))
        return out

    def map_(f, s, stats=None):
        return t1.map(lambda x: t2.map(f, x, stats), s, stats)

    def effect(eff, k, s, stats=None):
        return t1.effect(eff, lambda x: t2.effect(eff, k, x, stats), s, stats)

    return TravBody(fold, map_, effect)


__all__ = [
    "OpticKind", "Lens", "Prism", "Traversal", "KindMismatch", "MiddleTypeMismatch", "Residual", "Focus",
    "LensBody", "PrismBody", "TravBody", "Optic", "type_atom", "view", "update", "modify", "match", "build",
    "as_traversal", "over", "to_list_of", "traverse_of", "over_via_effect", "to_list_via_effect",
    "compose", "compose_all", "TypeMismatch",
]
