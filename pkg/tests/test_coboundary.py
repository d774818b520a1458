import dataclasses
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from borelmarkers import coboundary as cob
from borelmarkers.markers import staggered_tiling_seed, weak_rokhlin_2d
from borelmarkers.membership import Membership
from borelmarkers.points import LatticePoint
from borelmarkers.systems import ST, LabeledLattice, apply

LAT = LabeledLattice(3)
F = Fraction


@pytest.fixture(scope="module")
def plan():
    return cob.build_towers(cob.synthesize_sequences(3), LAT, window=2000)


def sparse_plan(R_max):
    """Towers whose bases are spread twice as wide as the cells, so a quarter
    of the plane is covered at each level."""
    seq = cob.synthesize_sequences(R_max)
    towers = []
    for r in range(1, R_max + 1):
        n, m = seq.n[r - 1], seq.m[r - 1]
        base = weak_rokhlin_2d(LAT, n, m, jmax=10**9, seed=staggered_tiling_seed(2 * n, 2 * m))
        towers.append(cob.TowerPlan(r, n, m, seq.alpha[r - 1], base))
    return dataclasses.replace(seq, towers=tuple(towers))


def reference_recurrence(R):
    alpha, ms, acc = [F(1, 4)], [], F(0)
    for r in range(1, R + 1):
        m = max((ms[-1] if ms else 0) + 1, math.ceil((2 * r + acc) / alpha[-1]))
        ms.append(m)
        acc += alpha[-1] * m
        alpha.append(min(alpha[-1] / 2, F(1, 2 * m)))
    return alpha, ms


def test_canonical_plan():
    p = cob.synthesize_sequences(3)
    assert p.alpha == (F(1, 4), F(1, 16), F(1, 192))
    assert p.m == (8, 96, 2688)
    assert p.n == (2, 4, 6)
    assert p.alpha_next == F(1, 5376)
    assert p.m[0] * 2 * p.alpha[1] == 1
    alpha, ms = reference_recurrence(3)
    assert tuple(alpha[:3]) == p.alpha and tuple(ms) == p.m


@pytest.mark.parametrize("R", range(1, 9))
def test_every_synthesized_plan_validates(R):
    p = cob.synthesize_sequences(R)
    rep = cob.validate_sequences(p)
    assert rep.passed, rep.violations
    alpha, ms = reference_recurrence(R)
    assert p.m == tuple(ms) and p.alpha == tuple(alpha[:R]) and p.alpha_next == alpha[R]


def test_single_level_plan():
    p = cob.synthesize_sequences(1)
    rep = cob.validate_sequences(p)
    assert rep.passed and p.m == (8,) and rep.stats["growth_slack"] == {1: F(0)}


@pytest.mark.parametrize("r", [1, 2, 3])
def test_halving_any_height_is_caught(r):
    p = cob.synthesize_sequences(3)
    m = list(p.m)
    m[r - 1] //= 2
    rep = cob.validate_sequences(dataclasses.replace(p, m=tuple(m)))
    assert not rep.passed
    assert any(v["check"] == "growth" and v["r"] == r and v["slack"] < 0 for v in rep.violations)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_doubling_any_weight_is_caught(r):
    p = cob.synthesize_sequences(3)
    a = list(p.alpha)
    a[r - 1] *= 2
    assert not cob.validate_sequences(dataclasses.replace(p, alpha=tuple(a))).passed


def test_halved_second_height_slack():
    p = cob.synthesize_sequences(3)
    rep = cob.validate_sequences(dataclasses.replace(p, m=(8, 48, 2688)))
    v = [v for v in rep.violations if v["check"] == "growth"]
    assert v == [{"check": "growth", "r": 2, "slack": F(-3)}]


def test_rmax_must_be_positive():
    with pytest.raises(ValueError):
        cob.synthesize_sequences(0)


def test_cells(plan):
    t = plan.towers[1]
    y = LatticePoint(0, (0, 0))
    assert t.base(y).is_in
    assert cob.tower_cell_of(y, t) == (0, 0)
    assert cob.tower_cell_of(apply(LAT, ST((1, 2)), y), t) == (1, 2)
    assert cob.f_r_eval(y, t) == F(1, 16)
    assert cob.f_r_eval(apply(LAT, ST((1, 5)), y), t) == -F(1, 16)


def test_cells_are_unique():
    t = sparse_plan(1).towers[0]
    seen = {}
    for x in LAT.window(12):
        if t.base(x).is_in:
            for i, j in t.cells():
                p = apply(LAT, ST((i, j)), x)
                assert p not in seen
                seen[p] = (i, j)
    for p, c in seen.items():
        if max(map(abs, p.coords)) <= 5:
            assert cob.tower_cell_of(p, t) == c


def test_values_on_a_sparse_plan():
    p = sparse_plan(3)
    t1, t2, t3 = p.towers
    outside = [x for x in LAT.window(8) if all(cob.tower_cell_of(x, t) is cob.OUTSIDE for t in p.towers)]
    assert outside and all(cob.f_eval(x, p) == 0 for x in outside)
    corners = t3.base.candidates(0, -40, 40, 0, 6 * t3.m)
    only3 = next(x for x in corners if t3.base(x).is_in
                 and cob.tower_cell_of(x, t1) is cob.OUTSIDE and cob.tower_cell_of(x, t2) is cob.OUTSIDE)
    assert cob.f_eval(only3, p) == F(1, 192)
    odd1 = next(x for x in LAT.window(40) if cob.tower_cell_of(x, t1) == (1, 0)
                and cob.tower_cell_of(x, t2) is cob.OUTSIDE and cob.tower_cell_of(x, t3) is cob.OUTSIDE)
    assert cob.f_eval(odd1, p) == -F(1, 4)


def test_rows_cancel(plan):
    for t in plan.towers:
        x = LatticePoint(2, (0, 0))
        for j in (0, 1, t.m - 1):
            row = [cob.f_r_eval(apply(LAT, ST((i, j)), x), t) for i in range(t.n)]
            assert sum(row) == 0
            prefixes = [sum(row[:k]) for k in range(t.n + 1)]
            assert set(prefixes) <= {0, t.alpha}
            suffixes = [sum(row[k:]) - sum(row) for k in range(t.n + 1)]
            assert set(suffixes) <= {0, -t.alpha}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2), st.integers(-500, 500), st.integers(-500, 500))
def test_s_sums_stay_bounded(plan, label, a, b):
    rep = cob.partial_sums(LatticePoint(label, (a, b)), "S", 300, plan)
    assert rep.complete
    assert rep.max_abs <= sum(plan.alpha)
    assert rep.final_sum == sum(rep.per_level)
    assert all(isinstance(v, Fraction) for v in rep.per_level)


def test_t_sum_from_a_second_level_base_point(plan):
    x = LatticePoint(0, (0, 0))
    rep = cob.partial_sums(x, "T", 96, plan)
    assert rep.final_sum >= F(7, 2)
    assert rep.per_level[1] == 6


def test_one_step_outside():
    p = sparse_plan(1)
    x = next(x for x in LAT.window(20) if cob.tower_cell_of(x, p.towers[0]) is cob.OUTSIDE)
    assert cob.partial_sums(x, "S", 1, p).final_sum == 0


def test_bad_direction_and_length(plan):
    with pytest.raises(ValueError):
        cob.partial_sums(LatticePoint(0, (0, 0)), "U", 5, plan)
    with pytest.raises(ValueError):
        cob.partial_sums(LatticePoint(0, (0, 0)), "S", 0, plan)


def test_transfer_function_examples():
    p = sparse_plan(1)
    t = p.towers[0]
    # rows of the sparse tiling between brick rows never meet the tower
    x = LatticePoint(0, (0, 8))
    assert all(cob.tower_cell_of(apply(LAT, ST((k, 0)), x), t) is cob.OUTSIDE for k in range(400))
    g, stable = cob.transfer_g_for_S(x, p, 400)
    assert g == 0 and stable
    y = LatticePoint(0, (0, 3))
    assert cob.tower_cell_of(y, t) == (0, 3)
    assert cob.transfer_g_for_S(y, p, 400)[0] == F(1, 4)


def test_telescoping(plan):
    for x in LAT.sample(__import__("numpy").random.default_rng(1), 8, 100):
        t = cob.transfer_pair(x, plan, 3000)
        g1, s1 = cob.transfer_g_for_S(x, plan, 3000)
        g2, s2 = cob.transfer_g_for_S(apply(LAT, ST((1, 0)), x), plan, 3000)
        assert (t["g"], t["g_S"]) == (g1, g2)
        if s1 and s2:
            assert cob.f_eval(x, plan) == g1 - g2


def test_bound_decomposition(plan):
    x = LatticePoint(1, (0, 0))
    r1 = cob.bound_decomposition(x, 1, plan)
    assert r1.stats["lower"] == {} and r1.stats["level_term"] == 2
    assert r1.checks["level_term_exact"] and r1.checks["at_least_r"]
    r2 = cob.bound_decomposition(x, 2, plan)
    assert r2.stats["guaranteed"] == F(7, 2) and r2.passed
    with pytest.raises(ValueError):
        cob.bound_decomposition(LatticePoint(1, (1, 0)), 1, plan)


def test_unknown_cells_surface():
    seq = cob.synthesize_sequences(1)
    p = cob.build_towers(seq, LAT, seed="checkerboard", jmax=3)
    x = LatticePoint(0, (30, 30))
    assert isinstance(cob.tower_cell_of(x, p.towers[0]), Membership)
    with pytest.raises(cob.UnknownCell) as e:
        cob.f_eval(x, p)
    assert e.value.level == 1
    rep = cob.partial_sums(x, "S", 10, p)
    assert rep.truncated_at == 1 and rep.unknown_count == 1 and not rep.complete
