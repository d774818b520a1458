"""Finitely representable points of the built-in systems.

Odometer points are eventually periodic binary sequences ``x_0 x_1 ...``
(index 0 first, least significant).  Each such sequence is a 2-adic
rational ``p/q`` with ``q`` odd, which is what the arithmetic runs on.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Union


class InadmissiblePoint(ValueError):
    pass


class PointSyntaxError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class LatticePoint:
    label: int
    coords: tuple

    @property
    def a(self) -> int:
        return self.coords[0]

    @property
    def b(self) -> int:
        return self.coords[1]

    def __str__(self) -> str:
        return f"lat:{self.label}:" + ",".join(str(c) for c in self.coords)


@dataclass(frozen=True, order=True)
class LinePoint:
    label: int
    n: int

    def __str__(self) -> str:
        return f"line:{self.label}:{self.n}"


def _least_rotation(s: str) -> int:
    """Shift of the lexicographically least rotation (smallest shift on ties)."""
    doubled = s + s
    n = len(s)
    return min(range(n), key=lambda k: doubled[k:k + n])


def _minimal_period(s: str) -> str:
    n = len(s)
    for p in range(1, n + 1):
        if n % p == 0 and s[:p] * (n // p) == s:
            return s[:p]
    return s


@dataclass(frozen=True, order=True)
class OdoPoint:
    """Eventually periodic bit sequence ``prefix + period + period + ...``.

    Always construct through :meth:`make` (or the odometer arithmetic) so the
    representation is canonical: minimal period rotated to its least
    rotation, shortest compatible prefix.
    """

    prefix: str
    period: str

    @staticmethod
    def make(prefix: str, period: str) -> "OdoPoint":
        if not period or set(prefix + period) - {"0", "1"}:
            raise PointSyntaxError(f"bad odometer bits {prefix!r}|{period!r}")
        return _canonical(prefix, period)

    @property
    def value(self) -> Fraction:
        return _to_value(self.prefix, self.period)

    @staticmethod
    def from_value(v: Fraction) -> "OdoPoint":
        return _from_value(Fraction(v))

    def bit(self, i: int) -> int:
        if i < len(self.prefix):
            return int(self.prefix[i])
        return int(self.period[(i - len(self.prefix)) % len(self.period)])

    def unrolled(self, prefix_len: int, period_len: int) -> tuple[str, str]:
        """Same sequence written with the given prefix length and a period length
        that is a multiple of the minimal one."""
        if prefix_len < len(self.prefix) or period_len % len(self.period):
            raise ValueError("cannot unroll to a shorter representation")
        pre = "".join(str(self.bit(i)) for i in range(prefix_len))
        per = "".join(str(self.bit(i)) for i in range(prefix_len, prefix_len + period_len))
        return pre, per

    def eventually_constant(self) -> bool:
        return self.period in ("0", "1")

    def __str__(self) -> str:
        return f"odo:{self.prefix}|{self.period}"


def _canonical(prefix: str, period: str) -> OdoPoint:
    period = _minimal_period(period)
    # absorb trailing prefix bits into the period
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1] + period[:-1]
    s = _least_rotation(period)
    return OdoPoint(prefix + period[:s], period[s:] + period[:s])


def _bits_int(bits: str) -> int:
    return sum(1 << i for i, c in enumerate(bits) if c == "1")


@lru_cache(maxsize=1 << 16)
def _to_value(prefix: str, period: str) -> Fraction:
    p = len(period)
    return _bits_int(prefix) + Fraction(_bits_int(period) << len(prefix), 1 - (1 << p))


@lru_cache(maxsize=1 << 16)
def _from_value(v: Fraction) -> OdoPoint:
    num, den = v.numerator, v.denominator
    if den % 2 == 0:
        raise InadmissiblePoint(f"{v} is not a 2-adic integer")
    seen: dict[int, int] = {}
    bits = []
    while num not in seen:
        seen[num] = len(bits)
        b = num & 1
        bits.append("1" if b else "0")
        num = (num - b * den) // 2
    start = seen[num]
    s = "".join(bits)
    return _canonical(s[:start], s[start:])


@dataclass(frozen=True, order=True)
class ProdOdoPoint:
    left: OdoPoint
    right: OdoPoint

    def interleaved(self) -> OdoPoint:
        """Bit 2i is left bit i, bit 2i+1 is right bit i."""
        L = max(len(self.left.prefix), len(self.right.prefix))
        p = _lcm(len(self.left.period), len(self.right.period))
        lp, lq = self.left.unrolled(L, p)
        rp, rq = self.right.unrolled(L, p)
        return OdoPoint.make(_zip_bits(lp, rp), _zip_bits(lq, rq))

    @staticmethod
    def from_interleaved(z: OdoPoint) -> "ProdOdoPoint":
        L = len(z.prefix) + len(z.prefix) % 2
        p = len(z.period) * (2 if len(z.period) % 2 else 1)
        pre, per = z.unrolled(L, p)
        return ProdOdoPoint(OdoPoint.make(pre[0::2], per[0::2]),
                            OdoPoint.make(pre[1::2], per[1::2]))

    def __str__(self) -> str:
        return f"podo:({self.left}),({self.right})"


def _zip_bits(x: str, y: str) -> str:
    return "".join(a + b for a, b in zip(x, y))


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


Point = Union[LatticePoint, LinePoint, OdoPoint, ProdOdoPoint]

_LAT = re.compile(r"lat:(\d+):(-?\d+(?:,-?\d+)*)$")
_LINE = re.compile(r"line:(\d+):(-?\d+)$")
_ODO = re.compile(r"odo:([01]*)\|([01]+)$")
_PODO = re.compile(r"podo:\((odo:[01]*\|[01]+)\),\((odo:[01]*\|[01]+)\)$")


def parse_point(text: str) -> Point:
    """Parse a point literal (``lat:0:3,4``, ``line:1:-7``, ``odo:111|0``,
    ``podo:(odo:1|01),(odo:|011)``)."""
    text = text.strip()
    if m := _LAT.match(text):
        return LatticePoint(int(m[1]), tuple(int(c) for c in m[2].split(",")))
    if m := _LINE.match(text):
        return LinePoint(int(m[1]), int(m[2]))
    if m := _ODO.match(text):
        return OdoPoint.make(m[1], m[2])
    if m := _PODO.match(text):
        return ProdOdoPoint(parse_point(m[1]), parse_point(m[2]))
    raise PointSyntaxError(f"unrecognised point literal {text!r}")


def format_point(x: Point) -> str:
    return str(x)
