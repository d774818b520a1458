"""Explicit bijections Z <-> Z^d used as orbit generators on lattices.

For d = 2 the positive arm walks the closed upper half-plane
``{b > 0} or {b = 0, a >= 0}`` ring by ring (max-norm ring r has 4r points
there), counterclockwise on odd rings and clockwise on even rings, so
consecutive indices are always lattice neighbours::

    0 -> (0,0), 1 -> (1,0), 2 -> (1,1), 3 -> (0,1), 4 -> (-1,1), 5 -> (-2,1) ...

Negative indices are the point reflection of the positive arm:
``sigma(-k) = -sigma(k)``.  The two arms meet only at the origin, so this is a
doubly infinite Hamiltonian path of the grid.

For other d a max-norm shell enumeration of Z^d (lexicographic inside each
shell) is composed with the zigzag bijection Z -> N.  Adjacency is not kept
there; only bijectivity is needed.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np


def _ring_offset(r: int) -> int:
    # index of the first point of half-ring r (r >= 1)
    return 1 + 2 * r * (r - 1)


def _ccw_pos(r: int, t: int) -> tuple[int, int]:
    if t <= r:
        return (r, t)
    if t <= 3 * r:
        return (r - (t - r), r)
    return (-r, r - (t - 3 * r))


def _ccw_index(r: int, a: int, b: int) -> int:
    if a == r:
        return b
    if b == r:
        return r + (r - a)
    return 3 * r + (r - b)


def _half_index(a: int, b: int) -> int:
    r = max(abs(a), abs(b))
    if r == 0:
        return 0
    t = _ccw_index(r, a, b)
    if r % 2 == 0:
        t = 4 * r - 1 - t
    return _ring_offset(r) + t


def _in_upper_half(a: int, b: int) -> bool:
    return b > 0 or (b == 0 and a >= 0)


def spiral_index_to_point(k: int) -> tuple[int, int]:
    if k == 0:
        return (0, 0)
    if k < 0:
        a, b = spiral_index_to_point(-k)
        return (-a, -b)
    # largest r with offset(r) <= k
    r = max(1, int(((2 * k - 1) ** 0.5 + 1) / 2))
    while _ring_offset(r) > k:
        r -= 1
    while _ring_offset(r + 1) <= k:
        r += 1
    t = k - _ring_offset(r)
    if r % 2 == 0:
        t = 4 * r - 1 - t
    return _ccw_pos(r, t)


def spiral_point_to_index(a: int, b: int) -> int:
    if _in_upper_half(a, b):
        return _half_index(a, b)
    return -_half_index(-a, -b)


def spiral_indices(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised :func:`spiral_point_to_index` (int64; keep |coords| < 2**30)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    upper = (b > 0) | ((b == 0) & (a >= 0))
    sign = np.where(upper, 1, -1)
    a, b = a * sign, b * sign
    r = np.maximum(np.abs(a), np.abs(b))
    t = np.where(a == r, b, np.where(b == r, 2 * r - a, 4 * r - b))
    t = np.where(r % 2 == 0, 4 * r - 1 - t, t)
    idx = np.where(r == 0, 0, 1 + 2 * r * (r - 1) + t)
    return sign * idx


# -- general dimension ------------------------------------------------------

def zigzag(k: int) -> int:
    """Z -> N: 0, 1, -1, 2, -2, ... -> 0, 1, 2, 3, 4, ..."""
    return 2 * k - 1 if k > 0 else -2 * k


def unzigzag(n: int) -> int:
    return (n + 1) // 2 if n % 2 else -(n // 2)


@lru_cache(maxsize=None)
def _shell(d: int, r: int) -> tuple:
    if r == 0:
        return ((0,) * d,)
    return tuple(v for v in product(range(-r, r + 1), repeat=d)
                 if max(abs(c) for c in v) == r)


@lru_cache(maxsize=None)
def _shell_rank(d: int, r: int) -> dict:
    return {v: i for i, v in enumerate(_shell(d, r))}


def shell_point_to_index(v: tuple) -> int:
    d = len(v)
    r = max((abs(c) for c in v), default=0)
    below = (2 * r - 1) ** d if r > 0 else 0
    return unzigzag(below + _shell_rank(d, r)[tuple(v)])


def shell_index_to_point(k: int, d: int) -> tuple:
    n = zigzag(k)
    r = 0
    while (2 * r + 1) ** d <= n:
        r += 1
    below = (2 * r - 1) ** d if r > 0 else 0
    return _shell(d, r)[n - below]
