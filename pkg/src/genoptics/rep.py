"""Sum-of-products representations, parameter indexing and parameter get/put.

Sums and products are right-nested in declaration order. Metadata nodes
wrap the whole type (``Data``), each constructor (``Cons``) and each field
(``Sel``); nullary constructors hold a bare ``UnitN`` under their ``Cons``
node.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .schema import App, ParamTag, Prim, Schema, TypeExpr, show_type


class PrimitiveHasNoRep(Exception):
    def __init__(self, ty: TypeExpr):
        self.ty = ty
        super().__init__(f"primitive type {show_type(ty)} has no generic representation")


class ParamOutOfRange(Exception):
    def __init__(self, ty: TypeExpr, index: int):
        self.ty = ty
        self.index = index
        super().__init__(f"{show_type(ty)} has no type parameter at index {index}")


@dataclass(frozen=True)
class SumN:
    left: "RepNode"
    right: "RepNode"


@dataclass(frozen=True)
class ProdN:
    left: "RepNode"
    right: "RepNode"


@dataclass(frozen=True)
class FieldN:
    ty: TypeExpr


@dataclass(frozen=True)
class UnitN:
    pass


@dataclass(frozen=True)
class VoidN:
    pass


@dataclass(frozen=True)
class MetaN:
    kind: str  # "Data" | "Cons" | "Sel"
    name: Optional[str]
    child: "RepNode"


RepNode = Union[SumN, ProdN, FieldN, UnitN, VoidN, MetaN]


def _right_nest(nodes, ctor):
    out = nodes[-1]
    for n in reversed(nodes[:-1]):
        out = ctor(n, out)
    return out


def rep_of(schema: Schema, ty: TypeExpr) -> MetaN:
    """Generic representation of a ground, non-primitive type.

    Outer ``ParamTag`` wrappers are looked through; tags inside the
    arguments survive substitution into the field types.
    """
    base = ty
    while isinstance(base, ParamTag):
        base = base.inner
    if isinstance(base, Prim):
        raise PrimitiveHasNoRep(base)
    ctors = schema.instantiate(base)
    if not ctors:
        return MetaN("Data", base.name, VoidN())
    alts = []
    for c in ctors:
        if not c.fields:
            alts.append(MetaN("Cons", c.name, UnitN()))
        else:
            sels = [MetaN("Sel", f.name, FieldN(f.ty)) for f in c.fields]
            alts.append(MetaN("Cons", c.name, _right_nest(sels, ProdN)))
    return MetaN("Data", base.name, _right_nest(alts, SumN))


def constructors(node: RepNode) -> list[MetaN]:
    """The ``Cons`` metadata nodes in order."""
    out = []
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, MetaN) and n.kind == "Cons":
            out.append(n)
        elif isinstance(n, MetaN):
            stack.append(n.child)
        elif isinstance(n, SumN):
            stack.append(n.right)
            stack.append(n.left)
    return out


def fields(node: RepNode) -> list[FieldN]:
    out = []
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, FieldN):
            out.append(n)
        elif isinstance(n, MetaN):
            stack.append(n.child)
        elif isinstance(n, (SumN, ProdN)):
            stack.append(n.right)
            stack.append(n.left)
    return out


def erase_rep(node: RepNode) -> RepNode:
    from .schema import erase_tags

    if isinstance(node, FieldN):
        return FieldN(erase_tags(node.ty))
    if isinstance(node, MetaN):
        return MetaN(node.kind, node.name, erase_rep(node.child))
    if isinstance(node, SumN):
        return SumN(erase_rep(node.left), erase_rep(node.right))
    if isinstance(node, ProdN):
        return ProdN(erase_rep(node.left), erase_rep(node.right))
    return node


def show_rep(node: RepNode, metadata: bool = True) -> str:
    """Render in ``K``/``M``/``:+:``/``:×:`` notation."""
    return _show_rep(node, metadata, arg=False)


def _show_rep(node, metadata, arg):
    if isinstance(node, FieldN):
        s = f"K {show_type(node.ty, None) if _is_atomic(node.ty) else '(' + show_type(node.ty) + ')'}"
        return f"({s})" if arg else s
    if isinstance(node, UnitN):
        return "U"
    if isinstance(node, VoidN):
        return "V"
    if isinstance(node, MetaN):
        if not metadata:
            return _show_rep(node.child, metadata, arg)
        if node.kind == "Sel":
            tag = "'MetaSel 'Nothing" if node.name is None else f"'MetaSel ('Just \"{node.name}\")"
        else:
            tag = f"'Meta{node.kind} \"{node.name}\""
        s = f"M ({tag}) {_show_rep(node.child, metadata, arg=True)}"
        return f"({s})" if arg else s
    if isinstance(node, (SumN, ProdN)):
        op = ":+:" if isinstance(node, SumN) else ":×:"
        left = _show_operand(node.left, metadata)
        right = _show_operand(node.right, metadata)
        s = f"{left} {op} {right}"
        return f"({s})" if arg else s
    raise TypeError(f"not a representation node: {node!r}")


def _show_operand(node, metadata):
    inner = node
    while not metadata and isinstance(inner, MetaN):
        inner = inner.child
    if isinstance(inner, (SumN, ProdN)):
        return f"({_show_rep(inner, metadata, arg=False)})"
    return _show_rep(inner, metadata, arg=False)


def _is_atomic(ty: TypeExpr) -> bool:
    if isinstance(ty, App):
        return not ty.args or (ty.name == "Pair" and len(ty.args) == 2)
    return not isinstance(ty, ParamTag)


# ---------------------------------------------------------------------------
# Parameters


@dataclass(frozen=True)
class IndexedType:
    base: TypeExpr
    tagged: TypeExpr


def index_params(ty: TypeExpr) -> IndexedType:
    """Tag each argument of the outermost application with its right-index."""
    if not isinstance(ty, App) or not ty.args:
        return IndexedType(ty, ty)
    n = len(ty.args)
    tagged = App(ty.name, [ParamTag(n - 1 - j, a) for j, a in enumerate(ty.args)])
    return IndexedType(ty, tagged)


def _param_position(ty: TypeExpr, i: int) -> int:
    if not isinstance(ty, App) or i < 0 or i >= len(ty.args):
        raise ParamOutOfRange(ty, i)
    return len(ty.args) - 1 - i


def get_param(ty: TypeExpr, i: int) -> TypeExpr:
    return ty.args[_param_position(ty, i)]


def put_param(ty: TypeExpr, i: int, b: TypeExpr) -> TypeExpr:
    j = _param_position(ty, i)
    args = list(ty.args)
    args[j] = b
    return App(ty.name, args)


def left_index(arity: int, right_index: int) -> int:
    return arity - 1 - right_index
