"""Complete sections, generating families, decomposition and first returns.

Orbit walks are budgeted: every scan stops after ``horizon`` steps and an
inconclusive scan is reported as UNKNOWN (inside set recipes) or raised as
:class:`HorizonExhausted` (from the public per-point operations).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .membership import (HORIZON, IN, OUT, HorizonExhausted, Membership, Not, SetHandle,
                         UnresolvedMembership, unknown)
from .points import Point
from .systems import RPow, ST, System, apply


class Walker:
    """One-step dynamics along which orbits are scanned."""

    def step(self, x: Point, direction: int):
        """Image of x one step in ``direction`` (+1/-1), or an UNKNOWN Membership."""
        raise NotImplementedError


class GroupWalker(Walker):
    def __init__(self, sys: System, word=None):
        self.sys = sys
        self.word = word if word is not None else ST((1,))
        self._inv = self.word.inverse()

    def step(self, x, direction):
        return apply(self.sys, self.word if direction > 0 else self._inv, x)

    def __repr__(self):
        return f"walk[{self.word}]"


class InducedWalker(Walker):
    """First-return map of ``base`` to the set ``A`` (the induced automorphism)."""

    def __init__(self, base: Walker, A: SetHandle, horizon: int):
        self.base = base
        self.A = A
        self.horizon = horizon
        self._memo: dict = {}

    def step(self, x, direction):
        key = (x, direction)
        r = self._memo.get(key)
        if r is None:
            r = self._return(x, direction)
            self._memo[key] = r
        return r

    def _return(self, x, direction):
        y = x
        for n in range(1, self.horizon + 1):
            y = self.base.step(y, direction)
            if isinstance(y, Membership):
                return y
            m = self.A.contains(y)
            if m.is_in:
                return y
            if m.unknown:
                return m
        return unknown(HORIZON, self.horizon)

    def __repr__(self):
        return f"induced[{self.base!r} on {self.A!r}]"


def walk(walker: Walker, x: Point, k: int):
    """walker^k x (k may be negative), or an UNKNOWN Membership."""
    d = 1 if k > 0 else -1
    for _ in range(abs(k)):
        x = walker.step(x, d)
        if isinstance(x, Membership):
            return x
    return x


def scan_exit(s: SetHandle, walker: Walker, x: Point, direction: int, horizon: int):
    """(k, point) for the first k >= 1 with walker^(direction k) x outside s,
    or an UNKNOWN Membership."""
    y = x
    for k in range(1, horizon + 1):
        y = walker.step(y, direction)
        if isinstance(y, Membership):
            return y
        m = s.contains(y)
        if m.is_out:
            return k, y
        if m.unknown:
            return m
    return unknown(HORIZON, horizon)


def scan_hit(s: SetHandle, walker: Walker, x: Point, horizon: int, both: bool = True):
    """Distance to the nearest orbit point (excluding x) inside s, scanning
    forward and (if ``both``) backward.  Returns (k, point) or UNKNOWN."""
    ys = {1: x, -1: x}
    blocked: Optional[Membership] = None
    for k in range(1, horizon + 1):
        for d in ((1, -1) if both else (1,)):
            if ys[d] is None:
                continue
            y = walker.step(ys[d], d)
            if isinstance(y, Membership):
                blocked = blocked or y
                ys[d] = None
                continue
            ys[d] = y
            m = s.contains(y)
            if m.is_in:
                return d * k, y
            if m.unknown:
                blocked = blocked or m
        if all(v is None for v in ys.values()):
            break
    return blocked or unknown(HORIZON, horizon)


# -- per-point operations ------------------------------------------------------

def _require_in(s: SetHandle, x: Point) -> None:
    m = s.contains(x)
    if not m.is_in:
        raise UnresolvedMembership(m, x)


def induced_step(A: SetHandle, walker: Walker, x: Point, horizon: int) -> tuple[Point, int]:
    """S_A(x) and the return time n(x)."""
    _require_in(A, x)
    y = x
    for n in range(1, horizon + 1):
        y = walker.step(y, 1)
        if isinstance(y, Membership):
            raise UnresolvedMembership(y, x)
        m = A.contains(y)
        if m.is_in:
            return y, n
        if m.unknown:
            raise UnresolvedMembership(m, y)
    raise HorizonExhausted(horizon, x)


def first_exit(s: SetHandle, walker: Walker, x: Point, direction: int, horizon: int) -> int:
    """Smallest k >= 1 with walker^(direction k) x not in s."""
    _require_in(s, x)
    r = scan_exit(s, walker, x, direction, horizon)
    if isinstance(r, Membership):
        if r.reason == HORIZON:
            raise HorizonExhausted(horizon, x)
        raise UnresolvedMembership(r, x)
    return r[0]


# -- generating families -------------------------------------------------------

@dataclass
class GeneratingFamily:
    """Members listed in complement pairs: ``members[2i+1]`` is the complement
    of ``members[2i]``."""

    members: list = field(default_factory=list)

    @classmethod
    def from_pairs(cls, sets: Sequence[SetHandle]) -> "GeneratingFamily":
        fam = cls()
        for s in sets:
            fam.members += [s, Not(s)]
        return fam

    @classmethod
    def cylinders(cls, sys: System, count: int) -> "GeneratingFamily":
        from .membership import Predicate
        return cls.from_pairs([Predicate(sys.family_member(i, 0), f"even({i})")
                               for i in range(count)])

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def separates(self, x: Point, y: Point) -> Optional[bool]:
        unresolved = False
        for s in self.members:
            a, b = s.contains(x), s.contains(y)
            if a.unknown or b.unknown:
                unresolved = True
            elif a.is_in != b.is_in:
                return True
        return None if unresolved else False


class InvariantPart(SetHandle):
    """Largest walker-invariant subset of A, evaluated on |k| <= horizon:
    OUT as soon as one orbit point leaves A, otherwise UNKNOWN."""

    def __init__(self, A: SetHandle, walker: Walker, horizon: int):
        super().__init__()
        self.children = (A,)
        self.walker = walker
        self.horizon = horizon
        self._outside = Not(A)
        self.name = f"inv({A!r})"

    def _eval(self, x):
        A = self.children[0]
        m = A.contains(x)
        if not m.is_in:
            return m
        r = scan_hit(self._outside, self.walker, x, self.horizon)
        if isinstance(r, Membership):
            return r
        return OUT


def strip_full_orbits(fam: GeneratingFamily, walker: Walker, horizon: int) -> GeneratingFamily:
    """The family {C_i} u {B_i n C_j} with B_i the invariant part of member i
    and C_i = A_i minus B_i."""
    inv = [InvariantPart(A, walker, horizon) for A in fam.members]
    cs = [A & Not(B) for A, B in zip(fam.members, inv)]
    for c, A in zip(cs, fam.members):
        c.name = f"strip({A!r})"
    out = GeneratingFamily()
    for c in cs:
        out.members += [c, Not(c)]
    for i, B in enumerate(inv):
        for j, C in enumerate(cs):
            if i != j:
                s = B & C
                out.members += [s, Not(s)]
    return out


class _Decomposition:
    """Shared classifier behind the two halves returned by :func:`decompose`."""

    def __init__(self, A: SetHandle, fam: GeneratingFamily, walker: Walker, horizon: int):
        self.A = A
        self.fam = fam
        self.walker = walker
        self.horizon = horizon
        self._within = [A & F for F in fam.members]
        self._memo: dict = {}

    def classify(self, x) -> Membership | str:
        r = self._memo.get(x)
        if r is None:
            r = self._classify(x)
            self._memo[x] = r
        return r

    def _classify(self, x):
        a = self.A.contains(x)
        if a.is_out:
            return "out"
        if a.unknown:
            return a
        # x is in B_n iff F_n is the first member met by its orbit (inside A)
        # and x lies in F_n; certified only while every earlier member was
        # ruled out, which a finite scan can do only for the first one.
        certain = True
        for F, AF in zip(self.fam.members, self._within):
            f = F.contains(x)
            if f.is_in:
                return "B" if certain else unknown(HORIZON, self.horizon)
            if f.unknown:
                return f
            hit = scan_hit(AF, self.walker, x, self.horizon)
            if not isinstance(hit, Membership):
                return "C" if certain else unknown(HORIZON, self.horizon)
            certain = False
        return unknown(HORIZON, self.horizon)


class _DecompositionPart(SetHandle):
    def __init__(self, dec: _Decomposition, part: str):
        super().__init__()
        self.dec = dec
        self.part = part
        self.children = (dec.A,)
        self.name = f"decompose({dec.A!r}).{part}"

    def _eval(self, x):
        r = self.dec.classify(x)
        if isinstance(r, Membership):
            return r
        return IN if r == self.part else OUT

    def clear_memo(self):
        super().clear_memo()
        self.dec._memo.clear()


def decompose(A: SetHandle, fam: GeneratingFamily, walker: Walker,
              horizon: int) -> tuple[SetHandle, SetHandle]:
    """Split A into disjoint B, C whose saturations agree with that of A.

    ``walker`` should be the induced walker on A when A is not the whole
    space.
    """
    dec = _Decomposition(A, fam, walker, horizon)
    return _DecompositionPart(dec, "B"), _DecompositionPart(dec, "C")


def probe_splits(F: SetHandle, A: SetHandle, walker: Walker, probes: Sequence[Point],
                 horizon: int) -> bool:
    """True if, from every probe in A, the walker orbit meets both A n F and
    A minus F within the horizon (neither contains the probe's full orbit)."""
    inside, outside = A & F, A & Not(F)
    for x in probes:
        for part in (inside, outside):
            m = part.contains(x)
            if m.is_in:
                continue
            if isinstance(scan_hit(part, walker, x, horizon), Membership):
                return False
    return True
