"""Tri-state, memoised membership procedures for constructed sets.

A query answers IN, OUT or UNKNOWN; UNKNOWN carries the reason
(``horizon-exhausted`` or ``stage-bound-exceeded``) and the budget that was
spent.  Boolean combinations follow Kleene's strong three-valued logic.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .points import Point
from .systems import RPow, ST, System, apply

HORIZON = "horizon-exhausted"
STAGE_BOUND = "stage-bound-exceeded"


class Status(enum.Enum):
    IN = "in"
    OUT = "out"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Membership:
    status: Status
    reason: Optional[str] = None
    spent: int = 0

    @property
    def is_in(self) -> bool:
        return self.status is Status.IN

    @property
    def is_out(self) -> bool:
        return self.status is Status.OUT

    @property
    def unknown(self) -> bool:
        return self.status is Status.UNKNOWN

    def __invert__(self) -> "Membership":
        if self.status is Status.IN:
            return OUT
        if self.status is Status.OUT:
            return IN
        return self

    def __repr__(self) -> str:
        if self.unknown:
            return f"Unknown({self.reason}, {self.spent})"
        return self.status.name


IN = Membership(Status.IN)
OUT = Membership(Status.OUT)


def unknown(reason: str, spent: int = 0) -> Membership:
    return Membership(Status.UNKNOWN, reason, spent)


def from_bool(b: bool) -> Membership:
    return IN if b else OUT


def m_and(*ms: Membership) -> Membership:
    first_unknown = None
    for m in ms:
        if m.is_out:
            return OUT
        if m.unknown and first_unknown is None:
            first_unknown = m
    return first_unknown or IN


def m_or(*ms: Membership) -> Membership:
    first_unknown = None
    for m in ms:
        if m.is_in:
            return IN
        if m.unknown and first_unknown is None:
            first_unknown = m
    return first_unknown or OUT


class UnresolvedMembership(RuntimeError):
    def __init__(self, membership: Membership, point=None):
        super().__init__(f"{membership!r} at {point}")
        self.membership = membership
        self.point = point


class HorizonExhausted(RuntimeError):
    def __init__(self, horizon: int, point=None):
        super().__init__(f"no resolution within horizon {horizon} from {point}")
        self.horizon = horizon
        self.point = point


class SetHandle:
    """Lazily evaluated set; subclasses implement :meth:`_eval`."""

    name = "set"
    children: tuple = ()

    def __init__(self) -> None:
        self._memo: dict = {}

    def contains(self, x: Point) -> Membership:
        m = self._memo.get(x)
        if m is None:
            m = self._eval(x)
            self._memo[x] = m
        return m

    __call__ = contains

    def _eval(self, x: Point) -> Membership:
        raise NotImplementedError

    def clear_memo(self) -> None:
        self._memo.clear()
        for c in self.children:
            c.clear_memo()

    def __and__(self, other: "SetHandle") -> "SetHandle":
        return And(self, other)

    def __or__(self, other: "SetHandle") -> "SetHandle":
        return Or(self, other)

    def __invert__(self) -> "SetHandle":
        return Not(self)

    def __repr__(self) -> str:
        return self.name


class Predicate(SetHandle):
    def __init__(self, fn: Callable[[Point], bool], name: str = "pred"):
        super().__init__()
        self.fn = fn
        self.name = name

    def _eval(self, x):
        return from_bool(self.fn(x))


def whole(name: str = "X") -> Predicate:
    return Predicate(lambda x: True, name)


def empty(name: str = "empty") -> Predicate:
    return Predicate(lambda x: False, name)


class And(SetHandle):
    def __init__(self, *sets: SetHandle):
        super().__init__()
        self.children = sets
        self.name = "and(" + ",".join(map(repr, sets)) + ")"

    def _eval(self, x):
        return m_and(*(s.contains(x) for s in self.children))


class Or(SetHandle):
    def __init__(self, *sets: SetHandle):
        super().__init__()
        self.children = sets
        self.name = "or(" + ",".join(map(repr, sets)) + ")"

    def _eval(self, x):
        return m_or(*(s.contains(x) for s in self.children))


class Not(SetHandle):
    def __init__(self, inner: SetHandle):
        super().__init__()
        self.children = (inner,)
        self.name = f"not({inner!r})"

    def _eval(self, x):
        return ~self.children[0].contains(x)


class Image(SetHandle):
    """``w . A``: x is in the image iff w^{-1} x is in A."""

    def __init__(self, sys: System, word, inner: SetHandle):
        super().__init__()
        self.sys = sys
        self.word = word
        self.inv = word.inverse()
        self.children = (inner,)
        self.name = f"img({word},{inner!r})"

    def _eval(self, x):
        return self.children[0].contains(apply(self.sys, self.inv, x))


# -- textual recipes -----------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|-?\d+|[(),])")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SyntaxError(f"bad set expression near {text[pos:]!r}")
        out.append(m[1])
        pos = m.end()
    return out


def parse_word(text: str):
    """``st(1,-2)`` or ``r(5)``."""
    toks = _tokenize(text)
    w, rest = _parse_word(toks)
    if rest:
        raise SyntaxError(f"trailing input in word {text!r}")
    return w


def _parse_args(toks: list[str]) -> tuple[list[str], list[str]]:
    # returns top-level comma separated token groups inside the parentheses
    if not toks or toks[0] != "(":
        raise SyntaxError("expected '('")
    depth, groups, cur = 0, [], []
    for i, t in enumerate(toks):
        if t == "(":
            depth += 1
            if depth == 1:
                continue
        elif t == ")":
            depth -= 1
            if depth == 0:
                groups.append(cur)
                return groups, toks[i + 1:]
        elif t == "," and depth == 1:
            groups.append(cur)
            cur = []
            continue
        cur.append(t)
    raise SyntaxError("unbalanced parentheses")


def _parse_word(toks):
    head, groups_rest = toks[0], toks[1:]
    groups, rest = _parse_args(groups_rest)
    ints = [int(g[0]) for g in groups if g]
    if head == "st":
        return ST(tuple(ints)), rest
    if head == "r":
        return RPow(ints[0]), rest
    raise SyntaxError(f"unknown word constructor {head!r}")


def parse_set(text: str, sys: System, **params) -> SetHandle:
    """Build a :class:`SetHandle` from the recipe grammar documented in README.

    ``params`` (``horizon``, ``jmax``) are forwarded to ``marker1d``/``rok2d``.
    """
    h, rest = _parse_set(_tokenize(text), sys, params)
    if rest:
        raise SyntaxError(f"trailing input in {text!r}")
    return h


def _parse_set(toks, sys, params):
    head = toks[0]
    if head in ("X", "all"):
        return whole(), toks[1:]
    if head in ("none", "empty"):
        return empty(), toks[1:]
    if head == "seed":
        return Predicate(sys.seed, "seed"), toks[1:]
    groups, rest = _parse_args(toks[1:])
    if head in ("cyl", "even"):
        i = int(groups[0][0])
        bit = int(groups[1][0]) if head == "cyl" else 0
        return Predicate(sys.family_member(i, bit), f"{head}({i}" + (f",{bit})" if head == "cyl" else ")")), rest
    if head == "img":
        w, leftover = _parse_word(groups[0])
        inner, leftover2 = _parse_set(groups[1], sys, params)
        return Image(sys, w, inner), rest
    if head in ("and", "or"):
        parts = [_parse_set(g, sys, params)[0] for g in groups]
        return (And if head == "and" else Or)(*parts), rest
    if head == "not":
        return Not(_parse_set(groups[0], sys, params)[0]), rest
    if head == "marker1d":
        from .markers import vanishing_markers_1d
        n = int(groups[0][0])
        return vanishing_markers_1d(sys, n, params.get("horizon", 1 << 14))[-1], rest
    if head == "rok2d":
        from .markers import weak_rokhlin_2d
        n, m = int(groups[0][0]), int(groups[1][0])
        return weak_rokhlin_2d(sys, n, m, params.get("jmax"), params.get("horizon", 1 << 14)), rest
    raise SyntaxError(f"unknown set constructor {head!r}")


def region_tally(handle: SetHandle, points: Iterable[Point]) -> dict:
    counts = {s: 0 for s in Status}
    for x in points:
        counts[handle.contains(x).status] += 1
    return {s.value: c for s, c in counts.items()}
