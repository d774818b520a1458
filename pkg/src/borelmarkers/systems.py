"""Computable free actions of Z^d with an explicit orbit generator R.

Each system exposes its commuting generators through :func:`apply`, a
single automorphism ``R`` whose orbits are exactly the group orbits, and a
shipped seed set and generating family of cylinder/congruence predicates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from . import spiral
from .points import (InadmissiblePoint, LatticePoint, LinePoint, OdoPoint, Point,
                     ProdOdoPoint, parse_point)
from .report import VerificationReport


class WordNotSupported(ValueError):
    pass


@dataclass(frozen=True)
class ST:
    """Group element ``S^p T^q`` (``T_1^{e_1} ... T_d^{e_d}`` in general)."""

    exps: tuple

    def __mul__(self, other: "ST") -> "ST":
        n = max(len(self.exps), len(other.exps))
        a = self.exps + (0,) * (n - len(self.exps))
        b = other.exps + (0,) * (n - len(other.exps))
        return ST(tuple(x + y for x, y in zip(a, b)))

    def inverse(self) -> "ST":
        return ST(tuple(-e for e in self.exps))

    def is_identity(self) -> bool:
        return not any(self.exps)

    def __str__(self) -> str:
        return "st(" + ",".join(str(e) for e in self.exps) + ")"


@dataclass(frozen=True)
class RPow:
    k: int

    def __mul__(self, other: "RPow") -> "RPow":
        return RPow(self.k + other.k)

    def inverse(self) -> "RPow":
        return RPow(-self.k)

    def is_identity(self) -> bool:
        return self.k == 0

    def __str__(self) -> str:
        return f"r({self.k})"


def st(*exps: int) -> ST:
    return ST(tuple(exps))


GroupWord = ST | RPow


class System:
    """Base class; subclasses fill in the generator action and R."""

    name = "system"
    dim = 1
    labels = 1

    def admissible(self, x: Point) -> bool:
        raise NotImplementedError

    def act(self, exps: tuple, x: Point) -> Point:
        raise NotImplementedError

    def r_step(self, k: int, x: Point) -> Point:
        raise NotImplementedError

    def r_offset(self, x: Point, y: Point) -> Optional[int]:
        """The exact j with R^j x = y, or None if x and y lie on different orbits."""
        raise NotImplementedError

    def seed(self, x: Point) -> bool:
        raise NotImplementedError

    def family_member(self, i: int, bit: int) -> Callable[[Point], bool]:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, count: int, radius: int) -> list:
        raise NotImplementedError

    def parse(self, text: str) -> Point:
        x = parse_point(text)
        if not self.admissible(x):
            raise InadmissiblePoint(text)
        return x

    def __repr__(self) -> str:
        return self.name


def _pad(exps: tuple, d: int) -> tuple:
    if len(exps) > d:
        if any(exps[d:]):
            raise WordNotSupported(f"word {exps} needs more than {d} generators")
        return exps[:d]
    return exps + (0,) * (d - len(exps))


class LabeledLattice(System):
    """``labels`` disjoint copies of Z^d acted on by coordinate translations."""

    def __init__(self, labels: int = 3, dim: int = 2):
        self.labels = labels
        self.dim = dim
        self.name = f"lat:{labels}" if dim == 2 else f"lat{dim}:{labels}"

    def admissible(self, x) -> bool:
        return (isinstance(x, LatticePoint) and 0 <= x.label < self.labels
                and len(x.coords) == self.dim)

    def act(self, exps, x):
        e = _pad(exps, self.dim)
        return LatticePoint(x.label, tuple(c + k for c, k in zip(x.coords, e)))

    def index(self, coords: tuple) -> int:
        if self.dim == 2:
            return spiral.spiral_point_to_index(*coords)
        return spiral.shell_point_to_index(coords)

    def point(self, label: int, k: int) -> LatticePoint:
        if self.dim == 2:
            return LatticePoint(label, spiral.spiral_index_to_point(k))
        return LatticePoint(label, spiral.shell_index_to_point(k, self.dim))

    def r_step(self, k, x):
        return self.point(x.label, self.index(x.coords) + k)

    def r_offset(self, x, y):
        if x.label != y.label:
            return None
        return self.index(y.coords) - self.index(x.coords)

    def seed(self, x) -> bool:
        return (sum(x.coords) + x.label) % 2 == 0

    def family_member(self, i, bit):
        return lambda x: ((sum(x.coords) >> i) & 1) == bit

    def sample(self, rng, count, radius):
        labels = rng.integers(0, self.labels, size=count)
        coords = rng.integers(-radius, radius + 1, size=(count, self.dim))
        return [LatticePoint(int(l), tuple(int(c) for c in row))
                for l, row in zip(labels, coords)]

    def window(self, radius: int) -> Iterator[LatticePoint]:
        rng = range(-radius, radius + 1)
        for label in range(self.labels):
            for v in np.ndindex(*(len(rng),) * self.dim):
                yield LatticePoint(label, tuple(c - radius for c in v))

    def representatives(self) -> list:
        return [LatticePoint(l, (0,) * self.dim) for l in range(self.labels)]


class IntegerLine(System):
    """``labels`` copies of Z under the shift; R = S."""

    dim = 1

    def __init__(self, labels: int = 1):
        self.labels = labels
        self.name = f"line:{labels}"

    def admissible(self, x):
        return isinstance(x, LinePoint) and 0 <= x.label < self.labels

    def act(self, exps, x):
        (p,) = _pad(exps, 1)
        return LinePoint(x.label, x.n + p)

    def r_step(self, k, x):
        return LinePoint(x.label, x.n + k)

    def r_offset(self, x, y):
        return None if x.label != y.label else y.n - x.n

    def seed(self, x):
        return x.n % 2 == 0

    def family_member(self, i, bit):
        return lambda x: ((x.n >> i) & 1) == bit

    def sample(self, rng, count, radius):
        labels = rng.integers(0, self.labels, size=count)
        ns = rng.integers(-radius, radius + 1, size=count)
        return [LinePoint(int(l), int(n)) for l, n in zip(labels, ns)]

    def window(self, radius):
        for label in range(self.labels):
            for n in range(-radius, radius + 1):
                yield LinePoint(label, n)

    def representatives(self):
        return [LinePoint(l, 0) for l in range(self.labels)]


def _random_odo(rng, max_prefix=8, max_period=6, nonconstant=False) -> OdoPoint:
    while True:
        pre = "".join(rng.choice(["0", "1"], size=int(rng.integers(0, max_prefix + 1))))
        per = "".join(rng.choice(["0", "1"], size=int(rng.integers(1, max_period + 1))))
        x = OdoPoint.make(pre, per)
        if not (nonconstant and x.eventually_constant()):
            return x


@lru_cache(maxsize=1 << 18)
def _odo_shift(x: OdoPoint, p: int) -> OdoPoint:
    return OdoPoint.from_value(x.value + p)


class DyadicOdometer(System):
    """Adding machine x -> x + 1 on eventually periodic 2-adic integers; R = S."""

    dim = 1
    name = "odo"

    def admissible(self, x):
        return isinstance(x, OdoPoint)

    def act(self, exps, x):
        (p,) = _pad(exps, 1)
        return _odo_shift(x, p) if p else x

    def r_step(self, k, x):
        return self.act((k,), x)

    def r_offset(self, x, y):
        d = y.value - x.value
        return int(d) if d.denominator == 1 else None

    def seed(self, x):
        return x.bit(0) == 0

    def family_member(self, i, bit):
        return lambda x: x.bit(i) == bit

    def sample(self, rng, count, radius=8):
        return [_random_odo(rng, radius, max(1, radius - 2)) for _ in range(count)]

    def representatives(self):
        return [OdoPoint.make("", "0")]


class ProductOdometer(System):
    """Two independent odometers S (left) and T (right).

    Restricted to pairs whose coordinates are not eventually constant, the
    orbits of the odometer R acting on the interleaved coding coincide with
    the Z^2-orbits.
    """

    dim = 2
    name = "podo"

    def admissible(self, x):
        return (isinstance(x, ProdOdoPoint) and not x.left.eventually_constant()
                and not x.right.eventually_constant())

    def act(self, exps, x):
        p, q = _pad(exps, 2)
        left = OdoPoint.from_value(x.left.value + p) if p else x.left
        right = OdoPoint.from_value(x.right.value + q) if q else x.right
        return ProdOdoPoint(left, right)

    def r_step(self, k, x):
        z = x.interleaved()
        return ProdOdoPoint.from_interleaved(OdoPoint.from_value(z.value + k))

    def r_offset(self, x, y):
        d = y.interleaved().value - x.interleaved().value
        return int(d) if d.denominator == 1 else None

    def seed(self, x):
        return x.left.bit(0) == 0 and x.right.bit(0) == 0

    def family_member(self, i, bit):
        return lambda x: x.interleaved().bit(i) == bit

    def sample(self, rng, count, radius=8):
        return [ProdOdoPoint(_random_odo(rng, radius, 6, True), _random_odo(rng, radius, 6, True))
                for _ in range(count)]

    def representatives(self):
        return [ProdOdoPoint(OdoPoint.make("", "01"), OdoPoint.make("", "01"))]


# -- operations ----------------------------------------------------------------

def apply(sys: System, w, x: Point) -> Point:
    if not sys.admissible(x):
        raise InadmissiblePoint(str(x))
    if isinstance(w, RPow):
        return sys.r_step(w.k, x) if w.k else x
    if isinstance(w, ST):
        return sys.act(w.exps, x) if any(w.exps) else x
    raise WordNotSupported(repr(w))


def r_apply(sys: System, k: int, x: Point) -> Point:
    return apply(sys, RPow(k), x)


@dataclass(frozen=True)
class NotFound:
    """Returned by :func:`r_index_of` when no |j| <= horizon exists."""

    horizon: int


def r_index_of(sys: System, x: Point, y: Point, horizon: int):
    """The j with |j| <= horizon and R^j x = y, or a :class:`NotFound`."""
    j = sys.r_offset(x, y)
    if j is None or abs(j) > horizon:
        return NotFound(horizon)
    return j


def is_found(j) -> bool:
    return isinstance(j, int)


def _words(dim: int, W: int) -> Iterator[tuple]:
    for v in np.ndindex(*(2 * W + 1,) * dim):
        e = tuple(int(c) - W for c in v)
        if any(e):
            yield e


def verify_freeness(sys: System, samples: Iterable[Point], window: int) -> VerificationReport:
    rep = VerificationReport("freeness", params={"system": sys.name, "window": window})
    words = list(_words(sys.dim, window))
    for x in samples:
        for e in words:
            rep.resolved_count += 1
            if sys.act(e, x) == x:
                rep.add_violation(point=str(x), word=str(ST(e)))
    return rep


def verify_action_laws(sys: System, samples: Iterable[Point], window: int,
                       rng: np.random.Generator) -> VerificationReport:
    """Composition and commutativity of the generators on the samples."""
    rep = VerificationReport("action-laws", params={"system": sys.name, "window": window})
    d = sys.dim
    for x in samples:
        e1 = tuple(int(c) for c in rng.integers(-window, window + 1, size=d))
        e2 = tuple(int(c) for c in rng.integers(-window, window + 1, size=d))
        lhs = sys.act(e1, sys.act(e2, x))
        rhs = sys.act(tuple(a + b for a, b in zip(e1, e2)), x)
        rep.resolved_count += 1
        if lhs != rhs:
            rep.add_violation(point=str(x), law="composition", w1=str(ST(e1)), w2=str(ST(e2)))
        for i in range(d):
            for j in range(i + 1, d):
                ei = tuple(int(k == i) for k in range(d))
                ej = tuple(int(k == j) for k in range(d))
                if sys.act(ei, sys.act(ej, x)) != sys.act(ej, sys.act(ei, x)):
                    rep.add_violation(point=str(x), law="commutativity", generators=(i, j))
        if sys.act((0,) * d, x) != x:
            rep.add_violation(point=str(x), law="identity")
    return rep


def verify_orbit_agreement(sys: System, samples: Iterable[Point], span: int,
                           horizon: int) -> VerificationReport:
    """Every S^p T^q x (|p|,|q| <= span) must be some R^j x with |j| <= horizon."""
    rep = VerificationReport("orbit-agreement",
                             params={"system": sys.name, "span": span, "horizon": horizon})
    for x in samples:
        for e in _words(sys.dim, span):
            y = sys.act(e, x)
            j = r_index_of(sys, x, y, horizon)
            if not is_found(j):
                rep.unknown_count += 1
                rep.add_violation(point=str(x), word=str(ST(e)), reason="not found within horizon")
            elif sys.r_step(j, x) != y:
                rep.add_violation(point=str(x), word=str(ST(e)), reason="R^j x != y", j=j)
            else:
                rep.resolved_count += 1
    return rep


def make_system(descriptor: str) -> System:
    """``lat:3``, ``lat3:2`` (3-dim lattice, 2 labels), ``line:1``, ``odo``, ``podo``."""
    kind, _, arg = descriptor.partition(":")
    if kind == "lat":
        return LabeledLattice(int(arg or 1), 2)
    if kind.startswith("lat") and kind[3:].isdigit():
        return LabeledLattice(int(arg or 1), int(kind[3:]))
    if kind == "line":
        return IntegerLine(int(arg or 1))
    if kind == "odo":
        return DyadicOdometer()
    if kind == "podo":
        return ProductOdometer()
    raise ValueError(f"unknown system {descriptor!r}")
