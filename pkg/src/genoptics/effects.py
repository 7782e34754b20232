"""Applicative effect interfaces used by effectful traversals.

An interface is three functions over opaque effect-wrapped values:
``pure(x)``, ``fmap(f, m)`` and ``ap(mf, mx)``. Traversals only rely on
``ap`` sequencing its left argument before its right one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .value import PInt


@dataclass(frozen=True)
class EffectInterface:
    pure: Callable[[Any], Any]
    fmap: Callable[[Callable, Any], Any]
    ap: Callable[[Any, Any], Any]
    name: str = "effect"


def _id_fmap(f, x):
    return f(x)


IDENTITY = EffectInterface(lambda x: x, _id_fmap, _id_fmap, "identity")

# Const over a tuple monoid: collects whatever k emits, ignores the rebuild.
CONST_LIST = EffectInterface(lambda _x: (), lambda _f, m: m, lambda mf, mx: mf + mx, "const-list")


def collect(x) -> tuple:
    """The action to pair with CONST_LIST so that traversal gathers foci."""
    return (x,)


# State: an effect value is a function ``state -> (result, state)``.


def _st_pure(x):
    return lambda s: (x, s)


def _st_fmap(f, m):
    def run(s):
        x, s1 = m(s)
        return f(x), s1

    return run


def _st_ap(mf, mx):
    def run(s):
        f, s1 = mf(s)
        x, s2 = mx(s1)
        return f(x), s2

    return run


STATE = EffectInterface(_st_pure, _st_fmap, _st_ap, "state")


def label(_x):
    """Replace a focus by the current counter value and bump the counter."""
    return lambda s: (PInt(s), s + 1)


def run_state(m, start: int = 0):
    return m(start)


__all__ = ["EffectInterface", "IDENTITY", "CONST_LIST", "STATE", "collect", "label", "run_state"]
