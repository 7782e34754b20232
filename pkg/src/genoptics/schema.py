"""Algebraic data type definitions, ground type expressions and the prelude.

Type expressions are hash-consed: structurally equal expressions are the
same object, so equality and hashing are O(1) even for the exponentially
large (but shared) instantiations produced by polymorphic recursion.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from ._lexer import ParseError, TokenStream, tokenize

# Double is a separate type that shares Float's 64-bit runtime values
PRIMITIVES = frozenset({"Int", "Float", "Double", "Char", "String"})
FLOATING = frozenset({"Float", "Double"})

_INTERN: dict = {}
_INTERN_LOCK = threading.Lock()


def _intern(key, build):
    obj = _INTERN.get(key)
    if obj is None:
        with _INTERN_LOCK:
            obj = _INTERN.get(key)
            if obj is None:
                obj = build()
                _INTERN[key] = obj
    return obj


class TypeExpr:
    __slots__ = ()

    def __setattr__(self, name, value):
        raise AttributeError("type expressions are immutable")

    def __str__(self) -> str:
        return show_type(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {show_type(self)}>"


class Prim(TypeExpr):
    __slots__ = ("name",)

    def __new__(cls, name: str):
        def build():
            obj = object.__new__(cls)
            object.__setattr__(obj, "name", name)
            return obj

        return _intern(("Prim", name), build)

    def __reduce__(self):
        return (Prim, (self.name,))


class Var(TypeExpr):
    """A type parameter, indexed from the left of the parameter list."""

    __slots__ = ("index",)

    def __new__(cls, index: int):
        def build():
            obj = object.__new__(cls)
            object.__setattr__(obj, "index", index)
            return obj

        return _intern(("Var", index), build)

    def __reduce__(self):
        return (Var, (self.index,))


class App(TypeExpr):
    __slots__ = ("name", "args")

    def __new__(cls, name: str, args: Iterable[TypeExpr] = ()):
        args = tuple(args)

        def build():
            obj = object.__new__(cls)
            object.__setattr__(obj, "name", name)
            object.__setattr__(obj, "args", args)
            return obj

        return _intern(("App", name, args), build)

    def __reduce__(self):
        return (App, (self.name, self.args))


class ParamTag(TypeExpr):
    """Marks a type that occupies parameter position ``index`` (counted from
    the right) of the indexed outer type."""

    __slots__ = ("index", "inner")

    def __new__(cls, index: int, inner: TypeExpr):
        def build():
            obj = object.__new__(cls)
            object.__setattr__(obj, "index", index)
            object.__setattr__(obj, "inner", inner)
            return obj

        return _intern(("ParamTag", index, inner), build)

    def __reduce__(self):
        return (ParamTag, (self.index, self.inner))


INT = Prim("Int")
FLOAT = Prim("Float")
DOUBLE = Prim("Double")
CHAR = Prim("Char")
STRING = Prim("String")


def is_primitive(ty: TypeExpr) -> bool:
    while isinstance(ty, ParamTag):
        ty = ty.inner
    return isinstance(ty, Prim)


def is_ground(ty: TypeExpr) -> bool:
    if isinstance(ty, Var):
        return False
    if isinstance(ty, App):
        return all(is_ground(a) for a in ty.args)
    if isinstance(ty, ParamTag):
        return is_ground(ty.inner)
    return True


def has_tags(ty: TypeExpr) -> bool:
    if isinstance(ty, ParamTag):
        return True
    if isinstance(ty, App):
        return any(has_tags(a) for a in ty.args)
    return False


def erase_tags(ty: TypeExpr) -> TypeExpr:
    if isinstance(ty, ParamTag):
        return erase_tags(ty.inner)
    if isinstance(ty, App) and ty.args:
        return App(ty.name, [erase_tags(a) for a in ty.args])
    return ty


def subst(ty: TypeExpr, args: Sequence[TypeExpr]) -> TypeExpr:
    """Replace every ``Var(j)`` in ``ty`` by ``args[j]``."""
    if isinstance(ty, Var):
        return args[ty.index]
    if isinstance(ty, App):
        if not ty.args:
            return ty
        return App(ty.name, [subst(a, args) for a in ty.args])
    if isinstance(ty, ParamTag):
        return ParamTag(ty.index, subst(ty.inner, args))
    return ty


def var_occurrences(ty: TypeExpr, index: int) -> int:
    if isinstance(ty, Var):
        return int(ty.index == index)
    if isinstance(ty, App):
        return sum(var_occurrences(a, index) for a in ty.args)
    if isinstance(ty, ParamTag):
        return var_occurrences(ty.inner, index)
    return 0


def pair_type(a: TypeExpr, b: TypeExpr) -> App:
    return App("Pair", (a, b))


def list_type(a: TypeExpr) -> App:
    return App("List", (a,))


# ---------------------------------------------------------------------------
# Pretty printing


def show_type(ty: TypeExpr, var_names: Optional[Sequence[str]] = None) -> str:
    return _show(ty, var_names, top=True)


def _show(ty: TypeExpr, names, top: bool) -> str:
    if isinstance(ty, Prim):
        return ty.name
    if isinstance(ty, Var):
        if names is not None and ty.index < len(names):
            return names[ty.index]
        return _default_var_name(ty.index)
    if isinstance(ty, ParamTag):
        s = f"Param {ty.index} {_show(ty.inner, names, top=False)}"
        return s if top else f"({s})"
    if isinstance(ty, App):
        if ty.name == "Pair" and len(ty.args) == 2:
            return f"({_show(ty.args[0], names, True)}, {_show(ty.args[1], names, True)})"
        if not ty.args:
            return ty.name
        s = " ".join([ty.name] + [_show(a, names, top=False) for a in ty.args])
        return s if top else f"({s})"
    raise TypeError(f"not a type expression: {ty!r}")


def _default_var_name(i: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    return letters[i] if i < 26 else f"t{i}"


# ---------------------------------------------------------------------------
# Definitions


@dataclass(frozen=True)
class FieldDef:
    name: Optional[str]
    ty: TypeExpr


@dataclass(frozen=True)
class CtorDef:
    name: str
    fields: tuple[FieldDef, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.fields)

    @property
    def is_record(self) -> bool:
        return bool(self.fields) and self.fields[0].name is not None

    def field_types(self) -> tuple[TypeExpr, ...]:
        return tuple(f.ty for f in self.fields)


@dataclass(frozen=True)
class TypeDef:
    name: str
    params: tuple[str, ...]
    ctors: tuple[CtorDef, ...]

    @property
    def arity(self) -> int:
        return len(self.params)

    def ctor(self, name: str) -> Optional[CtorDef]:
        for c in self.ctors:
            if c.name == name:
                return c
        return None

    def show(self) -> str:
        head = " ".join(("type", self.name) + self.params)
        lines = [head]
        for c in self.ctors:
            parts = ["  |", c.name]
            for f in c.fields:
                t = _show(f.ty, self.params, top=False)
                parts.append(f"{f.name}:{t}" if f.name else t)
            lines.append(" ".join(parts))
        return "\n".join(lines)


class SchemaError(Exception):
    pass


class DuplicateType(SchemaError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"type {name} is already defined differently")


class MalformedDef(SchemaError):
    def __init__(self, name: str, invariant: str, detail: str):
        self.name = name
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"malformed definition of {name} ({invariant}): {detail}")


class UnknownTypeError(SchemaError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown type {name}")


class ArityError(SchemaError):
    pass


@dataclass(frozen=True)
class Finding:
    """One validation problem. ``kind`` is UnknownType, ArityMismatch or
    VarOutOfRange."""

    kind: str
    subject: str
    where: str

    def __str__(self) -> str:
        return f"{self.kind} {self.subject} (in {self.where})"


def check_def(d: TypeDef) -> None:
    """Local invariants of a single definition; raises MalformedDef."""
    seen_ctors = set()
    for c in d.ctors:
        if c.name in seen_ctors:
            raise MalformedDef(d.name, "unique-constructor-names", f"constructor {c.name} appears twice")
        seen_ctors.add(c.name)
        named = [f.name is not None for f in c.fields]
        if any(named) and not all(named):
            raise MalformedDef(d.name, "all-or-no-field-names", f"constructor {c.name} mixes named and unnamed fields")
        labels = [f.name for f in c.fields if f.name is not None]
        if len(labels) != len(set(labels)):
            raise MalformedDef(d.name, "unique-field-names", f"constructor {c.name} repeats a field name")
        for f in c.fields:
            for problem in _local_type_problems(f.ty, d.arity):
                raise MalformedDef(d.name, problem[0], f"constructor {c.name}: {problem[1]}")
    if len(set(d.params)) != len(d.params):
        raise MalformedDef(d.name, "unique-parameters", "a type parameter is repeated")


def _local_type_problems(ty: TypeExpr, arity: int) -> Iterator[tuple[str, str]]:
    if isinstance(ty, Var):
        if ty.index >= arity:
            yield ("var-in-range", f"parameter index {ty.index} >= arity {arity}")
    elif isinstance(ty, ParamTag):
        yield ("no-param-tags", "parameter tags are not allowed in definitions")
    elif isinstance(ty, App):
        for a in ty.args:
            yield from _local_type_problems(a, arity)


class Schema:
    """An immutable set of type definitions. ``register`` returns a new schema."""

    def __init__(self, defs: Optional[Mapping[str, TypeDef]] = None, frozen: Iterable[str] = ()):
        self._defs: dict[str, TypeDef] = dict(defs or {})
        self._frozen = frozenset(frozen)
        self._inst_cache: dict[TypeExpr, tuple[CtorDef, ...]] = {}

    @property
    def defs(self) -> Mapping[str, TypeDef]:
        return MappingProxyType(self._defs)

    def __contains__(self, name: str) -> bool:
        return name in self._defs

    def __iter__(self):
        return iter(self._defs.values())

    def __len__(self) -> int:
        return len(self._defs)

    def get(self, name: str) -> Optional[TypeDef]:
        return self._defs.get(name)

    def lookup(self, name: str) -> TypeDef:
        d = self._defs.get(name)
        if d is None:
            raise UnknownTypeError(name)
        return d

    def is_prelude(self, name: str) -> bool:
        return name in self._frozen

    def register(self, d: TypeDef) -> "Schema":
        return register(self, d)

    def validate(self) -> list[Finding]:
        return validate(self)

    def instantiate(self, ty: TypeExpr) -> tuple[CtorDef, ...]:
        """Constructors of a ground application with fields substituted (memoized)."""
        cached = self._inst_cache.get(ty)
        if cached is not None:
            return cached
        base = ty
        while isinstance(base, ParamTag):
            base = base.inner
        if not isinstance(base, App):
            raise ArityError(f"{show_type(ty)} has no constructors")
        result = substitute(self.lookup(base.name), base.args)
        self._inst_cache[ty] = result
        return result

    def show(self) -> str:
        return "\n".join(d.show() for d in self._defs.values() if d.name not in self._frozen)


def register(schema: Schema, d: TypeDef) -> Schema:
    check_def(d)
    existing = schema.get(d.name)
    if existing is not None:
        if existing == d:
            return schema
        raise DuplicateType(d.name)
    defs = dict(schema.defs)
    defs[d.name] = d
    return Schema(defs, schema._frozen)


def validate(schema: Schema) -> list[Finding]:
    findings: list[Finding] = []
    for d in schema:
        for c in d.ctors:
            where = f"{d.name}.{c.name}"
            for f in c.fields:
                findings.extend(_type_findings(schema, f.ty, d.arity, where))
    return findings


def _type_findings(schema: Schema, ty: TypeExpr, arity: Optional[int], where: str) -> Iterator[Finding]:
    if isinstance(ty, Var):
        if arity is None:
            yield Finding("VarOutOfRange", _default_var_name(ty.index), where)
        elif ty.index >= arity:
            yield Finding("VarOutOfRange", _default_var_name(ty.index), where)
    elif isinstance(ty, ParamTag):
        yield from _type_findings(schema, ty.inner, arity, where)
    elif isinstance(ty, App):
        d = schema.get(ty.name)
        if d is None:
            yield Finding("UnknownType", ty.name, where)
        elif d.arity != len(ty.args):
            yield Finding("ArityMismatch", ty.name, where)
        for a in ty.args:
            yield from _type_findings(schema, a, arity, where)


def check_ground(schema: Schema, ty: TypeExpr) -> list[Finding]:
    """Validation findings for a user-supplied ground type expression."""
    return list(_type_findings(schema, ty, None, show_type(ty)))


def substitute(d: TypeDef, args: Sequence[TypeExpr]) -> tuple[CtorDef, ...]:
    args = tuple(args)
    if len(args) != d.arity:
        raise ArityError(f"{d.name} expects {d.arity} arguments, got {len(args)}")
    if not args:
        return d.ctors
    return tuple(
        CtorDef(c.name, tuple(FieldDef(f.name, subst(f.ty, args)) for f in c.fields))
        for c in d.ctors
    )


# ---------------------------------------------------------------------------
# Parsing


def parse_type(text: str, params: Sequence[str] = ()) -> TypeExpr:
    """Parse a type expression. Lower-case names must be among ``params``."""
    ts = TokenStream(tokenize(text))
    ty = _parse_type_app(ts, list(params))
    ts.expect_eof()
    return ty


def _named_type(name: str, args: list[TypeExpr]) -> TypeExpr:
    if name in PRIMITIVES and not args:
        return Prim(name)
    return App(name, args)


def _parse_type_app(ts: TokenStream, params: list[str]) -> TypeExpr:
    tok = ts.peek()
    if tok.kind == "upper":
        ts.next()
        args = []
        while _starts_atom(ts.peek()):
            args.append(_parse_type_atom(ts, params))
        return _named_type(tok.text, args)
    return _parse_type_atom(ts, params)


def _starts_atom(tok) -> bool:
    return tok.kind in ("upper", "lower") and tok.text != "type" or (
        tok.kind == "punct" and tok.text in ("(", "[")
    )


def _parse_type_atom(ts: TokenStream, params: list[str]) -> TypeExpr:
    tok = ts.peek()
    if tok.kind == "upper":
        ts.next()
        return _named_type(tok.text, [])
    if tok.kind == "lower" and tok.text != "type":
        ts.next()
        if tok.text not in params:
            raise ParseError(tok.line, tok.column, f"a declared type parameter, found {tok.text!r}")
        return Var(params.index(tok.text))
    if ts.at_punct("["):
        ts.next()
        inner = _parse_type_app(ts, params)
        ts.expect_punct("]")
        return list_type(inner)
    if ts.at_punct("("):
        ts.next()
        if ts.at_punct(")"):
            ts.next()
            return App("Unit")
        first = _parse_type_app(ts, params)
        if ts.at_punct(","):
            items = [first]
            while ts.at_punct(","):
                ts.next()
                items.append(_parse_type_app(ts, params))
            ts.expect_punct(")")
            return _nest_pairs(items)
        ts.expect_punct(")")
        return first
    ts.fail("a type")


def _nest_pairs(items: list[TypeExpr]) -> TypeExpr:
    out = items[-1]
    for t in reversed(items[:-1]):
        out = pair_type(t, out)
    return out


def parse_defs(text: str) -> list[TypeDef]:
    """Parse schema text into definitions (not yet registered)."""
    ts = TokenStream(tokenize(text))
    defs = []
    while ts.peek().kind != "eof":
        kw = ts.peek()
        if kw.kind != "lower" or kw.text != "type":
            ts.fail("'type'")
        ts.next()
        name = ts.expect_kind("upper", "a type name").text
        params = []
        while ts.peek().kind == "lower" and ts.peek().text != "type":
            params.append(ts.next().text)
        ctors = []
        while ts.at_punct("|"):
            ts.next()
            cname = ts.expect_kind("upper", "a constructor name").text
            fields = []
            while True:
                tok = ts.peek()
                if tok.kind == "lower" and tok.text != "type" and ts.peek(1).kind == "punct" and ts.peek(1).text == ":":
                    ts.next()
                    ts.next()
                    fields.append(FieldDef(tok.text, _parse_type_atom(ts, params)))
                elif _starts_atom(tok):
                    fields.append(FieldDef(None, _parse_type_atom(ts, params)))
                else:
                    break
            ctors.append(CtorDef(cname, tuple(fields)))
        defs.append(TypeDef(name, tuple(params), tuple(ctors)))
    return defs


def parse_schema(text: str, base: Optional[Schema] = None) -> Schema:
    schema = prelude() if base is None else base
    for d in parse_defs(text):
        schema = register(schema, d)
    return schema


PRELUDE_TEXT = """\
type Unit
  | Unit
type Bool
  | False
  | True
type Maybe a
  | Nothing
  | Just a
type Either a b
  | Left a
  | Right b
type List a
  | Nil
  | Cons a (List a)
type Pair a b
  | Pair a b
"""

_PRELUDE: Optional[Schema] = None


def prelude() -> Schema:
    global _PRELUDE
    if _PRELUDE is None:
        defs = {d.name: d for d in parse_defs(PRELUDE_TEXT)}
        for d in defs.values():
            check_def(d)
        _PRELUDE = Schema(defs, frozen=defs)
    return _PRELUDE
