"""The alternating tower function f = sum_r f_r on a Z^2 lattice system.

Level r uses an ``n_r x m_r`` weak Rokhlin base A_r; f_r is ``+alpha_r`` on
the even columns ``S^i T^j A_r`` (i even), ``-alpha_r`` on the odd ones, and
zero off the tower.  With even widths every full row cancels, which keeps the
S-partial sums bounded, while the T-sums from A_r pick up ``m_r alpha_r``.
Everything is exact: values are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .markers import (DEFAULT_HORIZON, RokhlinSet, checkerboard_seed, default_jmax,
                      staggered_tiling_seed, weak_rokhlin_2d)
from .membership import Membership
from .points import LatticePoint, Point
from .report import VerificationReport
from .systems import ST, System, apply

TAIL_RULE = "geometric-2x"


class UnknownCell(RuntimeError):
    def __init__(self, point, level: int, membership: Membership):
        super().__init__(f"tower {level} cell of {point} unresolved: {membership!r}")
        self.point = point
        self.level = level
        self.membership = membership
        self.budget = membership.spent


class _Outside:
    def __repr__(self):
        return "Outside"


OUTSIDE = _Outside()


@dataclass(frozen=True)
class TowerPlan:
    level: int
    n: int
    m: int
    alpha: Fraction
    base: RokhlinSet

    def cells(self):
        return [(i, j) for i in range(self.n) for j in range(self.m)]


@dataclass(frozen=True)
class SequencePlan:
    R_max: int
    n: tuple
    m: tuple
    alpha: tuple
    alpha_next: Fraction
    tail_rule: str = TAIL_RULE
    towers: tuple = ()

    def tail_bound(self, r: int) -> Fraction:
        """Bound on sum_{s>r} alpha_s (r is 1-based)."""
        nxt = self.alpha[r] if r < self.R_max else self.alpha_next
        return 2 * nxt

    def to_dict(self) -> dict:
        return {"R_max": self.R_max, "n": list(self.n), "m": list(self.m),
                "alpha": list(self.alpha), "alpha_next": self.alpha_next,
                "tail_rule": self.tail_rule}


def synthesize_sequences(R_max: int) -> SequencePlan:
    if R_max < 1:
        raise ValueError("R_max must be at least 1")
    alpha = [Fraction(1, 4)]
    ms: list[int] = []
    acc = Fraction(0)
    for r in range(1, R_max + 1):
        a = alpha[-1]
        need = 2 * r + acc
        m = max((ms[-1] if ms else 0) + 1, -(-need // a))
        while m * a < need:
            m += 1
        ms.append(int(m))
        acc += a * m
        alpha.append(min(a / 2, Fraction(1, 2 * m)))
    return SequencePlan(R_max, tuple(2 * r for r in range(1, R_max + 1)), tuple(ms),
                        tuple(alpha[:R_max]), alpha[R_max])


def validate_sequences(plan: SequencePlan) -> VerificationReport:
    rep = VerificationReport("sequences", params=plan.to_dict())
    slack53, slack54 = {}, {}
    acc = Fraction(0)
    alphas = list(plan.alpha) + [plan.alpha_next]
    for r in range(1, plan.R_max + 1):
        m, a = plan.m[r - 1], plan.alpha[r - 1]
        s = 1 - m * plan.tail_bound(r)
        slack53[r] = s
        if s < 0:
            rep.add_violation(check="tail", r=r, slack=s)
        need = Fraction(2) if r == 1 else 2 * r + acc
        s = m * a - need
        slack54[r] = s
        if s < 0:
            rep.add_violation(check="growth", r=r, slack=s)
        acc += a * m
    for r in range(1, len(alphas)):
        if not 0 < alphas[r] <= alphas[r - 1] / 2:
            rep.add_violation(check="halving", r=r + 1, alpha=alphas[r])
    rep.checks["alpha_positive"] = alphas[0] > 0
    rep.checks["m_increasing"] = all(x < y for x, y in zip(plan.m, plan.m[1:])) and plan.m[0] >= 1
    rep.checks["n_even_increasing"] = (all(x % 2 == 0 and x > 0 for x in plan.n)
                                       and all(x < y for x, y in zip(plan.n, plan.n[1:])))
    rep.checks["tail_rule_known"] = plan.tail_rule == TAIL_RULE
    rep.stats["tail_slack"] = slack53
    rep.stats["growth_slack"] = slack54
    rep.resolved_count = plan.R_max
    return rep


def build_towers(plan: SequencePlan, sys: System, seed: str = "tiling", window: int = 40,
                 span: int = 0, jmax: Optional[int] = None,
                 horizon: int = DEFAULT_HORIZON) -> SequencePlan:
    """Attach a tower base to every level.

    ``seed="tiling"`` starts each sweep from a staggered brick tiling of size
    ``n_r x m_r``; ``seed="checkerboard"`` uses the system's parity seed (only
    practical for the small levels).  ``window`` and ``span`` size the stage
    bound when ``jmax`` is not given.
    """
    towers = []
    for r in range(1, plan.R_max + 1):
        n, m = plan.n[r - 1], plan.m[r - 1]
        s = staggered_tiling_seed(n, m) if seed == "tiling" else checkerboard_seed()
        j = jmax if jmax is not None else default_jmax(sys, window, span + n + m)
        base = weak_rokhlin_2d(sys, n, m, j, horizon, s)
        towers.append(TowerPlan(r, n, m, plan.alpha[r - 1], base))
    return dataclasses.replace(plan, towers=tuple(towers))


def tower_cell_of(x: Point, tower: TowerPlan):
    """(i, j) with S^-i T^-j x in the base, ``OUTSIDE``, or an UNKNOWN Membership."""
    base = tower.base
    seed = base.seed
    if isinstance(x, LatticePoint) and getattr(seed, "enumerable", False):
        a, b = x.coords
        # the base lies inside its seed, so only seed points can be corners
        cands = seed.enumerate(x.label, a - tower.n + 1, a, b - tower.m + 1, b)
        shifts = [(a - c.coords[0], b - c.coords[1]) for c in cands]
    else:
        shifts = tower.cells()
    pending = None
    for i, j in shifts:
        mem = base.contains(apply(base.sys, ST((-i, -j)), x))
        if mem.is_in:
            return i, j
        if mem.unknown and pending is None:
            pending = mem
    return pending if pending is not None else OUTSIDE


def f_r_eval(x: Point, tower: TowerPlan) -> Fraction:
    c = tower_cell_of(x, tower)
    if isinstance(c, Membership):
        raise UnknownCell(x, tower.level, c)
    if c is OUTSIDE:
        return Fraction(0)
    return tower.alpha if c[0] % 2 == 0 else -tower.alpha


def f_levels(x: Point, plan: SequencePlan) -> tuple:
    if len(plan.towers) != plan.R_max:
        raise ValueError("plan has no towers; call build_towers first")
    return tuple(f_r_eval(x, t) for t in plan.towers)


def f_eval(x: Point, plan: SequencePlan) -> Fraction:
    return sum(f_levels(x, plan), Fraction(0))


@dataclass
class PartialSumReport:
    direction: str
    start: str
    length: int
    steps: int = 0
    final_sum: Fraction = Fraction(0)
    running_max: Optional[Fraction] = None
    running_min: Optional[Fraction] = None
    per_level: list = field(default_factory=list)
    unknown_count: int = 0
    truncated_at: Optional[int] = None
    unknown_reason: Optional[str] = None
    trace: list = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.truncated_at is None

    @property
    def max_abs(self) -> Fraction:
        return max(abs(self.running_max), abs(self.running_min)) if self.steps else Fraction(0)


def _word(direction: str) -> ST:
    if direction == "S":
        return ST((1, 0))
    if direction == "T":
        return ST((0, 1))
    raise ValueError(f"direction must be S or T, got {direction!r}")


def partial_sums(x: Point, direction: str, N: int, plan: SequencePlan,
                 trace: bool = False) -> PartialSumReport:
    """Running sums sum_{k<n} f(g^k x) for n = 1..N along g = S or T."""
    if N < 1:
        raise ValueError("length must be at least 1")
    g = _word(direction)
    sys = plan.towers[0].base.sys
    rep = PartialSumReport(direction, str(x), N, per_level=[Fraction(0)] * plan.R_max)
    total = Fraction(0)
    y = x
    for n in range(1, N + 1):
        try:
            vals = f_levels(y, plan)
        except UnknownCell as e:
            rep.truncated_at = n
            rep.unknown_count += 1
            rep.unknown_reason = f"level {e.level}: {e.membership.reason}"
            break
        for r, v in enumerate(vals):
            rep.per_level[r] += v
        total += sum(vals)
        rep.steps = n
        rep.running_max = total if rep.running_max is None else max(rep.running_max, total)
        rep.running_min = total if rep.running_min is None else min(rep.running_min, total)
        if trace:
            rep.trace.append((n, total, ";".join(str(v) for v in vals)))
        y = apply(sys, g, y)
    rep.final_sum = total
    return rep


def _s_sums(x: Point, plan: SequencePlan, N: int) -> list:
    sys = plan.towers[0].base.sys
    out, total, y = [], Fraction(0), x
    for _ in range(N):
        total += f_eval(y, plan)
        out.append(total)
        y = apply(sys, ST((1, 0)), y)
    return out


def _sup(sums: Sequence[Fraction]) -> tuple[Fraction, bool]:
    best, at = sums[0], 0
    for k, s in enumerate(sums):
        if s > best:
            best, at = s, k
    N = len(sums)
    return best, at < N - N // 4


def transfer_g_for_S(x: Point, plan: SequencePlan, N_g: int) -> tuple[Fraction, bool]:
    """max_{1<=n<=N_g} sum_{k<n} f(S^k x) and whether it settled before the
    final quarter of the horizon."""
    if N_g < 1:
        raise ValueError("N_g must be at least 1")
    return _sup(_s_sums(x, plan, N_g))


def transfer_pair(x: Point, plan: SequencePlan, N_g: int) -> dict:
    """g(x), g(Sx) and f(x) from one pass of N_g + 1 steps.

    The S-sums from Sx are those from x shifted by one and reduced by f(x),
    so both suprema come out of the same sequence.
    """
    sums = _s_sums(x, plan, N_g + 1)
    fx = sums[0]
    gx, sx = _sup(sums[:N_g])
    gsx, ssx = _sup([s - fx for s in sums[1:]])
    return {"f": fx, "g": gx, "g_S": gsx, "stabilized": sx and ssx,
            "telescopes": fx == gx - gsx}


def bound_decomposition(x: Point, r: int, plan: SequencePlan) -> VerificationReport:
    """Split the T-sum over m_r steps from x in A_r by level.

    Lower levels are compared with their cap alpha_t m_t, higher levels with
    alpha_s m_r; an excess is recorded as a violation of the caps (the
    measured total is still reported).
    """
    tower = plan.towers[r - 1]
    if not tower.base.contains(x).is_in:
        raise ValueError(f"{x} is not in A_{r}")
    m = plan.m[r - 1]
    rep_ps = partial_sums(x, "T", m, plan)
    rep = VerificationReport("bound-decomposition", params={"point": str(x), "r": r, "steps": m})
    if not rep_ps.complete:
        rep.unknown_count = rep_ps.unknown_count
        rep.stats["truncated_at"] = rep_ps.truncated_at
        rep.stats["unknown_reason"] = rep_ps.unknown_reason
        return rep
    rep.resolved_count = m
    level_term = rep_ps.per_level[r - 1]
    lower = {t: rep_ps.per_level[t - 1] for t in range(1, r)}
    upper = {s: rep_ps.per_level[s - 1] for s in range(r + 1, plan.R_max + 1)}
    for t, v in lower.items():
        cap = plan.alpha[t - 1] * plan.m[t - 1]
        if abs(v) > cap:
            rep.add_violation(term="lower", level=t, measured=v, cap=cap)
    for s, v in upper.items():
        cap = plan.alpha[s - 1] * m
        if abs(v) > cap:
            rep.add_violation(term="upper", level=s, measured=v, cap=cap)
    guaranteed = (m * plan.alpha[r - 1]
                  - sum((plan.alpha[t - 1] * plan.m[t - 1] for t in lower), Fraction(0))
                  - m * sum((plan.alpha[s - 1] for s in upper), Fraction(0)))
    rep.checks["level_term_exact"] = level_term == m * plan.alpha[r - 1]
    rep.checks["at_least_r"] = abs(rep_ps.final_sum) >= r
    rep.stats.update(level_term=level_term, lower=lower, upper=upper, total=rep_ps.final_sum,
                     guaranteed=guaranteed, combined_bound=2 * r - 1)
    return rep
