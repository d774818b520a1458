import itertools

import pytest
from hypothesis import given, strategies as st

from borelmarkers.membership import (HORIZON, IN, OUT, STAGE_BOUND, Image, Predicate, Status,
                                     m_and, m_or, parse_set, parse_word, region_tally, unknown)
from borelmarkers.points import LatticePoint, LinePoint
from borelmarkers.systems import ST, IntegerLine, LabeledLattice, RPow

U = unknown(HORIZON, 10)
VALUES = [IN, OUT, U]
LINE = IntegerLine()
LAT = LabeledLattice(3)


def as_kleene(m):
    return {Status.IN: 1.0, Status.OUT: 0.0, Status.UNKNOWN: 0.5}[m.status]


@pytest.mark.parametrize("a,b", list(itertools.product(VALUES, VALUES)))
def test_kleene_tables(a, b):
    assert as_kleene(m_and(a, b)) == min(as_kleene(a), as_kleene(b))
    assert as_kleene(m_or(a, b)) == max(as_kleene(a), as_kleene(b))
    assert as_kleene(~a) == 1 - as_kleene(a)


def test_unknown_carries_reason_and_budget():
    m = unknown(STAGE_BOUND, 77)
    assert m.unknown and m.reason == STAGE_BOUND and m.spent == 77
    assert ~m is m


def test_words():
    assert parse_word("st(1,-2)") == ST((1, -2))
    assert parse_word("r(5)") == RPow(5)
    with pytest.raises(SyntaxError):
        parse_word("q(1)")


@given(st.integers(-500, 500), st.integers(-5, 5))
def test_image_coherence(n, k):
    E = Predicate(lambda x: x.n % 3 == 0, "mod3")
    img = Image(LINE, ST((k,)), E)
    assert img.contains(LinePoint(0, n)) == E.contains(LinePoint(0, n - k))


def test_recipes_on_the_line():
    pts = [LinePoint(0, n) for n in range(-64, 64)]
    cases = {
        "X": lambda n: True,
        "none": lambda n: False,
        "seed": lambda n: n % 2 == 0,
        "even(1)": lambda n: (n >> 1) % 2 == 0,
        "cyl(2,1)": lambda n: (n >> 2) % 2 == 1,
        "img(st(1), seed)": lambda n: n % 2 == 1,
        "and(even(0), not(even(1)))": lambda n: n % 4 == 2,
        "or(cyl(0,1), even(1))": lambda n: n % 2 == 1 or (n >> 1) % 2 == 0,
    }
    for text, ref in cases.items():
        h = parse_set(text, LINE)
        assert all(h(x).is_in == ref(x.n) for x in pts), text


def test_marker_recipes():
    h = parse_set("marker1d(3)", LINE)
    assert [n for n in range(-8, 9) if h(LinePoint(0, n)).is_in] == [-8, -4, 0, 4, 8]
    r = parse_set("rok2d(2,2)", LAT)
    assert r(LatticePoint(0, (0, 0))).status in (Status.IN, Status.OUT)


@pytest.mark.parametrize("text", ["cube(1)", "and(seed", "seed seed", "img(st(1))"])
def test_bad_recipes(text):
    with pytest.raises((SyntaxError, IndexError)):
        parse_set(text, LINE)


def test_memo_is_transparent():
    calls = []

    def fn(x):
        calls.append(x)
        return x.n > 0

    h = Predicate(fn) & ~Predicate(lambda x: x.n > 10)
    first = [h(LinePoint(0, n)) for n in range(-5, 20)]
    again = [h(LinePoint(0, n)) for n in range(-5, 20)]
    assert len(calls) == 25 and first == again
    h.clear_memo()
    assert [h(LinePoint(0, n)) for n in range(-5, 20)] == first
    assert len(calls) == 50


def test_tally():
    h = parse_set("seed", LINE)
    assert region_tally(h, [LinePoint(0, n) for n in range(10)]) == {"in": 5, "out": 5, "unknown": 0}
