import numpy as np
import pytest
from hypothesis import given, strategies as st

from borelmarkers.membership import HORIZON, HorizonExhausted, Predicate, whole
from borelmarkers.points import LinePoint, OdoPoint
from borelmarkers.sections import (GeneratingFamily, GroupWalker, InducedWalker, InvariantPart,
                                   decompose, first_exit, induced_step, scan_hit,
                                   strip_full_orbits, walk)
from borelmarkers.systems import ST, DyadicOdometer, IntegerLine

LINE = IntegerLine()
ODO = DyadicOdometer()
S_LINE = GroupWalker(LINE)
S_ODO = GroupWalker(ODO)


def P(n):
    return LinePoint(0, n)


def test_induced_step_examples():
    evens = Predicate(lambda x: x.n % 2 == 0)
    assert induced_step(evens, S_LINE, P(4), 100) == (P(6), 2)
    zero_bit = Predicate(lambda x: x.bit(0) == 0)
    assert induced_step(zero_bit, S_ODO, OdoPoint.make("", "0"), 100)[1] == 2
    single = Predicate(lambda x: x.n == 0)
    with pytest.raises(HorizonExhausted):
        induced_step(single, S_LINE, P(0), 500)


def test_first_exit_examples():
    block = Predicate(lambda x: 0 <= x.n <= 5)
    assert first_exit(block, S_LINE, P(3), 1, 100) == 3
    assert first_exit(block, S_LINE, P(3), -1, 100) == 4
    with pytest.raises(HorizonExhausted):
        first_exit(whole(), S_LINE, P(0), 1, 50)


def test_first_exit_is_the_marker_stratum_on_the_odometer():
    A1 = Predicate(ODO.seed)
    for x in ODO.sample(np.random.default_rng(2), 200):
        if not A1(x).is_in:
            continue
        k = first_exit(A1, S_ODO, x, 1, 1 << 10)
        naive = next(j for j in range(1, 1 << 10) if not A1(ODO.r_step(j, x)).is_in)
        assert k == naive
        assert all(A1(ODO.r_step(j, x)).is_in for j in range(k))


@given(st.integers(-300, 300))
def test_induced_step_is_invertible(n):
    A = Predicate(lambda x: x.n % 3 == 0 or x.n % 7 == 0)
    W = InducedWalker(S_LINE, A, 100)
    x = P(n - n % 3)
    y = W.step(x, 1)
    assert W.step(y, -1) == x
    assert walk(W, x, 3) == walk(W, walk(W, x, 1), 2)


def test_strip_on_the_line():
    fam = GeneratingFamily.cylinders(LINE, 4)
    for A in fam.members:
        B = InvariantPart(A, S_LINE, 64)
        assert all(B(P(n)).is_out for n in range(-50, 50))
    stripped = strip_full_orbits(fam, S_LINE, 64)
    # no member holds a full orbit, so each C_i is the member itself
    Cs = stripped.members[0:2 * len(fam.members):2]
    for A, C in zip(fam.members, Cs):
        assert all(C(P(n)) == A(P(n)) for n in range(-50, 50))


def test_strip_with_the_whole_space():
    fam = GeneratingFamily.from_pairs([whole()])
    B = InvariantPart(fam.members[0], S_LINE, 64)
    assert all(B(P(n)).unknown and B(P(n)).reason == HORIZON for n in range(-10, 10))
    C = strip_full_orbits(fam, S_LINE, 64).members[0]
    assert not any(C(P(n)).is_in for n in range(-10, 10))


def test_strip_keeps_separation_on_the_odometer():
    fam = GeneratingFamily.from_pairs([Predicate(lambda x, i=i: x.bit(i) == 1, f"cyl({i})")
                                       for i in range(8)])
    stripped = strip_full_orbits(fam, S_ODO, 1 << 10)
    rng = np.random.default_rng(4)
    pts = ODO.sample(rng, 200)
    pairs = [(pts[i], pts[j]) for i, j in rng.integers(0, 200, size=(1000, 2)) if pts[i] != pts[j]]
    for x, y in pairs:
        if fam.separates(x, y):
            assert stripped.separates(x, y)


def test_decompose_the_line():
    fam = strip_full_orbits(GeneratingFamily.cylinders(LINE, 3), S_LINE, 64)
    B, C = decompose(whole(), fam, S_LINE, 64)
    assert B(P(0)).is_in and C(P(1)).is_in
    for n in range(-100, 101):
        b, c = B(P(n)), C(P(n))
        assert b.is_in != c.is_in
    for n in range(-20, 20):
        assert isinstance(scan_hit(B, S_LINE, P(n), 64), tuple)
        assert isinstance(scan_hit(C, S_LINE, P(n), 64), tuple)


def test_decompose_inside_a_subset():
    A = Predicate(lambda x: x.n % 3 == 0, "3Z")
    W = InducedWalker(S_LINE, A, 64)
    fam = GeneratingFamily.cylinders(LINE, 4)
    B, C = decompose(A, fam, W, 64)
    for n in range(-90, 91):
        b, c = B(P(n)), C(P(n))
        if n % 3:
            assert b.is_out and c.is_out
        else:
            assert not (b.is_in and c.is_in)
    assert B(P(0)).is_in


def test_clearing_memos_changes_nothing():
    fam = strip_full_orbits(GeneratingFamily.cylinders(LINE, 3), S_LINE, 64)
    B, _ = decompose(whole(), fam, S_LINE, 64)
    first = [B(P(n)) for n in range(-30, 30)]
    B.clear_memo()
    assert [B(P(n)) for n in range(-30, 30)] == first
