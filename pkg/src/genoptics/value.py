"""Runtime values, typechecking against ground types, and the text format.

Values carry no type information; callers always pass the ambient ground
type alongside. Equality, typechecking and printing are iterative so that
long lists (10^4 cells and more) do not exhaust the interpreter stack.
"""
from __future__ import annotations

import math
import struct
from typing import Optional, Sequence

from ._lexer import ParseError, TokenStream, tokenize
from .schema import FLOATING, App, ParamTag, Prim, Schema, TypeExpr, show_type


class Value:
    __slots__ = ()

    def __repr__(self) -> str:
        return print_value(self)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq


class PInt(Value):
    __slots__ = ("value",)

    def __init__(self, value: int):
        self.value = value

    def __eq__(self, other):
        return type(other) is PInt and other.value == self.value

    def __hash__(self):
        return hash(("Int", self.value))


class PFloat(Value):
    __slots__ = ("value",)

    def __init__(self, value: float):
        self.value = float(value)

    def __eq__(self, other):
        # bitwise: distinguishes 0.0 from -0.0, equates identical NaNs
        return type(other) is PFloat and struct.pack("<d", self.value) == struct.pack("<d", other.value)

    def __hash__(self):
        return hash(("Float", struct.pack("<d", self.value)))


class PChar(Value):
    __slots__ = ("value",)

    def __init__(self, value: str):
        self.value = value

    def __eq__(self, other):
        return type(other) is PChar and other.value == self.value

    def __hash__(self):
        return hash(("Char", self.value))


class PString(Value):
    __slots__ = ("value",)

    def __init__(self, value: str):
        self.value = value

    def __eq__(self, other):
        return type(other) is PString and other.value == self.value

    def __hash__(self):
        return hash(("String", self.value))


class Ctor(Value):
    __slots__ = ("name", "args")

    def __init__(self, name: str, args: tuple = ()):
        self.name = name
        self.args = args

    def __eq__(self, other):
        if type(other) is not Ctor:
            return False
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if type(a) is Ctor:
                if type(b) is not Ctor or a.name != b.name or len(a.args) != len(b.args):
                    return False
                stack.extend(zip(a.args, b.args))
            elif a != b:
                return False
        return True

    def __hash__(self):
        h = 0
        count = 0
        stack = [self]
        while stack:
            v = stack.pop()
            count += 1
            if type(v) is Ctor:
                h = hash((h, v.name, len(v.args)))
                stack.extend(reversed(v.args))
            else:
                h = hash((h, v))
        return h


PRIM_TYPES = {PInt: "Int", PFloat: "Float", PChar: "Char", PString: "String"}


def _runtime_name(prim: str) -> str:
    return "Float" if prim in FLOATING else prim


def ctor(name: str, *args: Value) -> Ctor:
    return Ctor(name, args)


def from_list(items: Sequence[Value]) -> Ctor:
    out = Ctor("Nil", ())
    for v in reversed(items):
        out = Ctor("Cons", (v, out))
    return out


def to_list(v: Value) -> Optional[list]:
    """Elements of a Cons/Nil spine, or None when ``v`` is not one."""
    items = []
    while type(v) is Ctor:
        if v.name == "Nil" and not v.args:
            return items
        if v.name == "Cons" and len(v.args) == 2:
            items.append(v.args[0])
            v = v.args[1]
        else:
            return None
    return None


def pair(a: Value, b: Value) -> Ctor:
    return Ctor("Pair", (a, b))


def node_count(v: Value) -> int:
    n = 0
    stack = [v]
    while stack:
        x = stack.pop()
        n += 1
        if type(x) is Ctor:
            stack.extend(x.args)
    return n


def value_depth(v: Value) -> int:
    best = 0
    stack = [(v, 1)]
    while stack:
        x, d = stack.pop()
        best = max(best, d)
        if type(x) is Ctor:
            stack.extend((a, d + 1) for a in x.args)
    return best


# ---------------------------------------------------------------------------
# Typechecking


class TypeMismatch(Exception):
    """A value does not inhabit a type. ``path`` lists argument indices
    from the root to the offending node."""

    def __init__(self, path: Sequence[int], expected: TypeExpr, found: str):
        self.path = tuple(path)
        self.expected = expected
        self.found = found
        where = "root" if not self.path else "path " + ".".join(str(p) for p in self.path)
        super().__init__(f"at {where}: expected {show_type(expected)}, found {found}")

    def __eq__(self, other):
        return (
            isinstance(other, TypeMismatch)
            and (self.path, self.expected, self.found) == (other.path, other.expected, other.found)
        )

    __hash__ = Exception.__hash__


def describe(v) -> str:
    if isinstance(v, Ctor):
        return v.name
    name = PRIM_TYPES.get(type(v))
    return name if name is not None else type(v).__name__


def typecheck(schema: Schema, v: Value, ty: TypeExpr) -> Optional[TypeMismatch]:
    """None when ``v`` inhabits ``ty``; otherwise the leftmost-outermost mismatch."""
    # paths are cons cells (index, parent) so long spines stay linear
    stack = [(v, ty, None)]
    while stack:
        x, t, path = stack.pop()
        while isinstance(t, ParamTag):
            t = t.inner
        if isinstance(t, Prim):
            if PRIM_TYPES.get(type(x)) != _runtime_name(t.name):
                return TypeMismatch(_unwind(path), t, describe(x))
            if t.name == "Char" and len(x.value) != 1:
                return TypeMismatch(_unwind(path), t, "String")
            continue
        if not isinstance(t, App) or not isinstance(x, Ctor):
            return TypeMismatch(_unwind(path), t, describe(x))
        c = None
        for cand in schema.instantiate(t):
            if cand.name == x.name:
                c = cand
                break
        if c is None or len(c.fields) != len(x.args):
            return TypeMismatch(_unwind(path), t, x.name if c is None else f"{x.name}/{len(x.args)}")
        for i in range(len(x.args) - 1, -1, -1):
            stack.append((x.args[i], c.fields[i].ty, (i, path)))
    return None


def _unwind(path) -> tuple:
    out = []
    while path is not None:
        out.append(path[0])
        path = path[1]
    return tuple(reversed(out))


def ensure_typed(schema: Schema, v: Value, ty: TypeExpr) -> None:
    err = typecheck(schema, v, ty)
    if err is not None:
        raise err


# ---------------------------------------------------------------------------
# Text format


def _show_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite float {x!r} has no text form")
    s = repr(x)
    if "." not in s and "e" not in s:
        s += ".0"
    return s


def _quote(text: str, q: str) -> str:
    return q + text.replace("\\", "\\\\").replace(q, "\\" + q) + q


def _show_atom_prim(v) -> str:
    t = type(v)
    if t is PInt:
        return str(v.value)
    if t is PFloat:
        return _show_float(v.value)
    if t is PChar:
        return _quote(v.value, "'")
    if t is PString:
        return _quote(v.value, '"')
    raise TypeError(f"not a value: {v!r}")


def print_value(v: Value) -> str:
    return _print(v, nested=False)


def _print(v, nested: bool) -> str:
    if type(v) is not Ctor:
        return _show_atom_prim(v)
    items = to_list(v)
    if items is not None:
        return "[" + ", ".join(_print(x, False) for x in items) + "]"
    if v.name == "Pair" and len(v.args) == 2:
        return f"({_print(v.args[0], False)}, {_print(v.args[1], False)})"
    if not v.args:
        return v.name
    s = " ".join([v.name] + [_print(a, True) for a in v.args])
    return f"({s})" if nested else s


def parse_value(text: str, ty: Optional[TypeExpr] = None, schema: Optional[Schema] = None) -> Value:
    """Parse the text format.

    Without a type, integer literals become ``PInt`` and literals with a
    fraction or exponent become ``PFloat``. With ``ty`` (and ``schema``),
    numeric literals are read at the type the position expects, so
    ``Cost 100`` yields a float when Cost wraps a Float.
    """
    ts = TokenStream(tokenize(text))
    v = _parse_app(ts)
    ts.expect_eof()
    if ty is not None:
        if schema is None:
            raise ValueError("a schema is required for typed parsing")
        v = coerce_numbers(schema, v, ty)
    return v


def coerce_numbers(schema: Schema, v: Value, ty: TypeExpr) -> Value:
    """Rewrite integer literals sitting at Float positions into floats."""
    while isinstance(ty, ParamTag):
        ty = ty.inner
    if isinstance(ty, Prim):
        if ty.name in FLOATING and type(v) is PInt:
            return PFloat(float(v.value))
        return v
    if type(v) is not Ctor or not isinstance(ty, App) or ty.name not in schema:
        return v
    # list spines are walked iteratively
    if ty.name == "List":
        items = to_list(v)
        if items is not None:
            elem = ty.args[0]
            return from_list([coerce_numbers(schema, x, elem) for x in items])
    for c in schema.instantiate(ty):
        if c.name == v.name and len(c.fields) == len(v.args):
            return Ctor(v.name, tuple(coerce_numbers(schema, a, f.ty) for a, f in zip(v.args, c.fields)))
    return v


def _starts_value_atom(tok) -> bool:
    return tok.kind in ("upper", "int", "float", "string", "char") or (
        tok.kind == "punct" and tok.text in ("(", "[")
    )


def _parse_app(ts: TokenStream) -> Value:
    tok = ts.peek()
    if tok.kind == "upper":
        ts.next()
        args = []
        while _starts_value_atom(ts.peek()):
            args.append(_parse_atom(ts))
        return Ctor(tok.text, tuple(args))
    return _parse_atom(ts)


def _parse_atom(ts: TokenStream) -> Value:
    tok = ts.peek()
    if tok.kind == "upper":
        ts.next()
        return Ctor(tok.text, ())
    if tok.kind == "int":
        ts.next()
        return PInt(tok.value)
    if tok.kind == "float":
        ts.next()
        return PFloat(tok.value)
    if tok.kind == "string":
        ts.next()
        return PString(tok.value)
    if tok.kind == "char":
        ts.next()
        return PChar(tok.value)
    if ts.at_punct("["):
        ts.next()
        items = []
        if not ts.at_punct("]"):
            items.append(_parse_app(ts))
            while ts.at_punct(","):
                ts.next()
                items.append(_parse_app(ts))
        ts.expect_punct("]")
        return from_list(items)
    if ts.at_punct("("):
        ts.next()
        first = _parse_app(ts)
        if ts.at_punct(","):
            ts.next()
            second = _parse_app(ts)
            ts.expect_punct(")")
            return pair(first, second)
        ts.expect_punct(")")
        return first
    ts.fail("a value")


__all__ = [
    "Value", "PInt", "PFloat", "PChar", "PString", "Ctor", "ctor", "pair",
    "from_list", "to_list", "node_count", "value_depth", "TypeMismatch", "typecheck",
    "ensure_typed", "print_value", "parse_value", "coerce_numbers", "ParseError",
]
