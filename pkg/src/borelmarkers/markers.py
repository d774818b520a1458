"""Vanishing markers for Z-actions and weak Rokhlin bases for free Z^d-actions.

The Z^d construction starts from a seed set with no full R-orbit and runs a
sequence of separation stages.  The stage with step word ``g`` stratifies the
current set A into ``B_j = {x in A : g x = R^j x}``, processes the strata in the
order j = -1, 1, -2, 2, ..., deletes every g-run whose exit lands in the
still-current set (type b), and keeps the last point of every other run
(type a).  The result A' satisfies ``A' n gA' = {}``.

Stages are planned over the index set ``I = [0,t_1) x ... x [0,t_d)`` in
lexicographic order: reaching target ``w`` adds one stage for every new
difference ``w - w'`` with ``w' < w`` (nearest ``w'`` first), so after the last
target all the sets ``T^k A``, ``k in I``, are pairwise disjoint.
"""
from __future__ import annotations

import itertools
import sys as _sys
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import spiral
from .membership import (HORIZON, IN, OUT, STAGE_BOUND, Membership, Not, Predicate,
                         SetHandle, from_bool, m_and, m_or, unknown)
from .points import LatticePoint, Point
from .report import VerificationReport
from .sections import (GeneratingFamily, GroupWalker, InducedWalker, Walker, decompose,
                       probe_splits, scan_exit, scan_hit)
from .systems import LabeledLattice, RPow, ST, System, apply

_sys.setrecursionlimit(max(_sys.getrecursionlimit(), 20000))

DEFAULT_HORIZON = 1 << 14


class InvalidSeed(ValueError):
    pass


class MarkerSet(SetHandle):
    """A constructed set together with its parameters and declared products."""

    def __init__(self, inner: SetHandle, sys: System, params: dict, products: Sequence = ()):
        super().__init__()
        self.inner = inner
        self.children = (inner,)
        self.sys = sys
        self.params = params
        self.products = list(products)
        self.name = params.get("name", inner.name)

    def contains(self, x):
        return self.inner.contains(x)

    __call__ = contains

    def clear_memo(self):
        self.inner.clear_memo()


# -- seeds ---------------------------------------------------------------------

class LatticeSeed(Predicate):
    """Seed predicate on a 2-dim lattice with a vectorised mask.

    ``enumerate(label, a_lo, a_hi, b_lo, b_hi)`` (inclusive bounds) lists the
    seed points of a box when ``enum`` is given.
    """

    def __init__(self, fn, mask, name, enum=None):
        super().__init__(fn, name)
        self.mask = mask
        self._enum = enum

    @property
    def enumerable(self) -> bool:
        return self._enum is not None

    def enumerate(self, label, a_lo, a_hi, b_lo, b_hi):
        return self._enum(label, a_lo, a_hi, b_lo, b_hi)


def checkerboard_seed() -> LatticeSeed:
    return LatticeSeed(lambda x: (sum(x.coords) + x.label) % 2 == 0,
                       lambda label, a, b: (a + b + label) % 2 == 0,
                       "checkerboard")


def staggered_tiling_seed(n: int, m: int) -> LatticeSeed:
    """Corners of an n x m brick tiling whose brick rows are shifted by one
    column per row: ``b = 0 mod m`` and ``a = b // m mod n``."""

    def fn(x):
        a, b = x.coords
        return b % m == 0 and (a - b // m) % n == 0

    def mask(label, a, b):
        return (b % m == 0) & ((a - b // m) % n == 0)

    def enum(label, a_lo, a_hi, b_lo, b_hi):
        out = []
        for row in range(-(-b_lo // m), b_hi // m + 1):
            b = row * m
            a = a_lo + (row - a_lo) % n
            while a <= a_hi:
                out.append(LatticePoint(label, (a, b)))
                a += n
        return out

    return LatticeSeed(fn, mask, f"tiling({n},{m})", enum)


def default_seed(sys: System) -> SetHandle:
    if isinstance(sys, LabeledLattice) and sys.dim == 2:
        return checkerboard_seed()
    return Predicate(sys.seed, "seed")


def default_jmax(sys: System, window: int = 40, span: int = 0) -> int:
    if isinstance(sys, LabeledLattice):
        if sys.dim == 2:
            return 4 * (2 * (window + span) + 1) ** 2
        return 2 * (2 * (window + span) + 1) ** sys.dim
    return 1 << 12


# -- one-dimensional vanishing markers -----------------------------------------

class RunEnds(SetHandle):
    """Points of C whose walker-successor leaves C: the union over k of
    W^(k-1) E_k, with E_k the points of C whose first exit time is k."""

    def __init__(self, C: SetHandle, walker: Walker, horizon: int, name: str = ""):
        super().__init__()
        self.children = (C,)
        self.walker = walker
        self.horizon = horizon
        self.name = name or f"ends({C!r})"

    def _eval(self, x):
        C = self.children[0]
        m = C.contains(x)
        if not m.is_in:
            return m
        y = self.walker.step(x, 1)
        if isinstance(y, Membership):
            return y
        return ~C.contains(y)


def _seed_probe_points(sys: System, count: int) -> list:
    rng = np.random.default_rng(0)
    radius = 64 if sys.dim == 1 and not hasattr(sys, "family_member") else 8
    try:
        pts = sys.sample(rng, count, 200 if hasattr(sys, "window") else radius)
    except TypeError:
        pts = sys.sample(rng, count)
    return list(sys.representatives()) + pts


def vanishing_markers_1d(sys: System, depth: int, horizon: int = DEFAULT_HORIZON,
                         seed: Optional[SetHandle] = None, family_size: int = 24,
                         probes: int = 16) -> list:
    """Nested sets A_1 > A_2 > ... > A_depth for the first generator S.

    A_2 is built from the seed with S; every later level repeats the
    construction for the induced map on the previous level, with a seed
    obtained by decomposing that level along the first generating-family
    member that splits the induced orbits of the probe points.
    """
    S = GroupWalker(sys, ST((1,)))
    A1 = seed if seed is not None else Predicate(sys.seed, "seed")
    probe_pts = _seed_probe_points(sys, probes)
    for x in probe_pts:
        for part in (A1, Not(A1)):
            if not part.contains(x).is_in and isinstance(scan_hit(part, S, x, horizon), Membership):
                raise InvalidSeed(f"orbit of {x} misses {part!r} within {horizon}")
    levels = [MarkerSet(A1, sys, {"name": "A_1", "level": 1})]
    if depth >= 2:
        A2 = RunEnds(A1, S, horizon, "A_2")
        levels.append(MarkerSet(A2, sys, {"name": "A_2", "level": 2, "walker": "S"}))
    fam = GeneratingFamily.cylinders(sys, family_size)
    for level in range(2, depth):
        A = levels[-1]
        W = InducedWalker(S, A, horizon)
        probes_in = []
        for x in probe_pts:
            if A.contains(x).is_in:
                probes_in.append(x)
                continue
            hit = scan_hit(A, S, x, horizon, both=False)
            if not isinstance(hit, Membership):
                probes_in.append(hit[1])
        chosen = None
        for i in range(0, len(fam.members), 2):
            if probe_splits(fam.members[i], A, W, probes_in, horizon):
                chosen = i
                break
        if chosen is None:
            raise InvalidSeed(f"no family member splits the induced orbits at level {level}")
        sub = GeneratingFamily(fam.members[chosen:])
        B, _ = decompose(A, sub, W, horizon)
        nxt = RunEnds(B, W, horizon, f"A_{level + 1}")
        levels.append(MarkerSet(nxt, sys, {"name": f"A_{level + 1}", "level": level + 1,
                                           "split_member": fam.members[chosen].name}))
    return levels[:depth]


class _Wandering(SetHandle):
    """Points of the deepest level with no return to it within the horizon."""

    def __init__(self, deepest: SetHandle, walker: Walker, horizon: int):
        super().__init__()
        self.children = (deepest,)
        self.walker = walker
        self.horizon = horizon
        self.name = "A_inf"

    def _eval(self, x):
        m = self.children[0].contains(x)
        if not m.is_in:
            return m
        r = scan_hit(self.children[0], self.walker, x, self.horizon)
        if isinstance(r, Membership):
            return IN if r.reason == HORIZON else r
        return OUT


class _Recurrent(SetHandle):
    def __init__(self, An: SetHandle, Ainf: SetHandle, n: int, walker: Walker, horizon: int):
        super().__init__()
        self.children = (An, Ainf)
        self.n = n
        self.walker = walker
        self.horizon = horizon
        self.name = f"B_{n}"

    def _eval(self, x):
        An, Ainf = self.children
        core = m_and(An.contains(x), ~Ainf.contains(x))
        if core.is_in:
            return IN
        shifted = []
        for i in range(self.n + 1, self.horizon + 1):
            for d in (i, -i):
                # x in S^d A_inf  iff  S^-d x in A_inf
                y = _walk(self.walker, x, -d)
                shifted.append(y if isinstance(y, Membership) else Ainf.contains(y))
                if shifted[-1].is_in:
                    return IN
        return m_or(core, *shifted)


def _walk(walker, x, k):
    d = 1 if k > 0 else -1
    for _ in range(abs(k)):
        x = walker.step(x, d)
        if isinstance(x, Membership):
            return x
    return x


def recurrent_adjust(levels: Sequence[SetHandle], sys: System, horizon: int = 256) -> list:
    """B_n = (A_n minus A_inf) u U_{n<|i|<=H} S^i A_inf, where A_inf is the set of
    points of the deepest level that do not return to it within the horizon."""
    S = GroupWalker(sys, ST((1,)))
    deepest = levels[0]
    for L in levels[1:]:
        deepest = deepest & L
    Ainf = _Wandering(deepest, S, horizon)
    return [_Recurrent(A, Ainf, n, S, horizon) for n, A in enumerate(levels, start=1)]


# -- the Z^d sweep -------------------------------------------------------------

def index_set(bounds: Sequence[int]) -> list:
    return list(itertools.product(*(range(t) for t in bounds)))


@dataclass(frozen=True)
class Stage:
    target: tuple
    prior: tuple
    gamma: ST


@dataclass
class StagePlan:
    bounds: tuple
    stages: list = field(default_factory=list)
    target_end: dict = field(default_factory=dict)  # target -> number of stages done

    def gammas(self) -> list:
        return [s.gamma for s in self.stages]


def build_stage_plan(bounds: Sequence[int]) -> StagePlan:
    # A difference g first becomes available at the target g+ = max(g, 0)
    # (prior g- = max(-g, 0)); within a target, nearer priors come first.
    idx = index_set(bounds)
    boxes = itertools.product(*(range(-t + 1, t) for t in bounds))
    diffs = [g for g in boxes if any(g) and next(c for c in g if c) > 0]
    pos = lambda g: tuple(max(c, 0) for c in g)
    neg = lambda g: tuple(max(-c, 0) for c in g)
    rank = {w: k for k, w in enumerate(idx)}
    diffs.sort(key=lambda g: (rank[pos(g)], -rank[neg(g)]))
    plan = StagePlan(tuple(bounds))
    plan.stages = [Stage(pos(g), neg(g), ST(g)) for g in diffs]
    k = 0
    for w in idx:
        while k < len(diffs) and rank[plan.stages[k].target] <= rank[w]:
            k += 1
        plan.target_end[w] = k
    return plan


def _rank(j: int) -> int:
    return 2 * j if j > 0 else -2 * j - 1


class RokhlinSweep:
    """Memoised evaluation of the stage sequence A_0 (seed) > A_1 > ... > A_K.

    Per point the engine stores how many stages it is known to survive and,
    once it is removed (or becomes undecidable), at which stage.
    """

    def __init__(self, sys: System, seed: SetHandle, gammas: Sequence[ST], jmax: int,
                 horizon: int):
        self.sys = sys
        self.seed = seed
        self.gammas = list(gammas)
        self.K = len(self.gammas)
        self.jmax = jmax
        self.horizon = horizon
        self._vector = (isinstance(sys, LabeledLattice) and sys.dim == 2
                        and isinstance(seed, LatticeSeed) and self.K > 0)
        if self._vector:
            self._gamma_arr = np.array([_pad2(g.exps) for g in self.gammas], dtype=np.int64)
            self._span = np.abs(self._gamma_arr).max(axis=0).tolist()
            self._stage_of: dict = {}
            for s, g in enumerate(self._gamma_arr.tolist()):
                self._stage_of.setdefault(tuple(g), s)
        self.reset()

    def reset(self):
        self._state: dict = {}
        self._typeb: dict = {}
        self.seed.clear_memo()

    # stratum of x at stage s: the j with gamma_s x = R^j x
    def stratum(self, s: int, x):
        j = self.sys.r_offset(x, apply(self.sys, self.gammas[s - 1], x))
        if j is None or abs(j) > self.jmax:
            return unknown(STAGE_BOUND, self.jmax)
        return j

    def member(self, k: int, x) -> Membership:
        st = self._state.get(x)
        if st is None:
            m = self.seed.contains(x)
            st = [0, None, None] if m.is_in else [0, m, 0]
            self._state[x] = st
            if m.is_in and self._vector:
                st[0] = self._noop_prefix(x)
        while st[1] is None and st[0] < k:
            s = st[0] + 1
            c = self._condition(s, x)
            if c.is_in:
                st[0] = s
            else:
                st[1], st[2] = c, s
        if st[1] is not None and st[2] <= k:
            return st[1]
        return IN

    def _noop_prefix(self, x) -> int:
        # Stages whose image g x leaves the seed keep x (given a resolved
        # stratum); return how many leading stages are of that kind.
        a, b = x.coords
        rho = max(abs(a), abs(b)) + max(self._span)
        if self.seed.enumerable and 4 * rho * (rho + 1) <= self.jmax:
            # every stratum is within the bound (|index| <= 2r(r+1) on the
            # max-norm ball of radius r); only seed points in the g-box matter
            sa, sb = self._span
            first = self.K
            for c in self.seed.enumerate(x.label, a - sa, a + sa, b - sb, b + sb):
                s = self._stage_of.get((c.coords[0] - a, c.coords[1] - b))
                if s is not None and s < first:
                    first = s
            return first
        ga = a + self._gamma_arr[:, 0]
        gb = b + self._gamma_arr[:, 1]
        hit = self.seed.mask(x.label, ga, gb)
        j = spiral.spiral_indices(ga, gb) - spiral.spiral_point_to_index(a, b)
        bad = hit | (np.abs(j) > self.jmax)
        nz = np.flatnonzero(bad)
        return int(nz[0]) if nz.size else self.K

    def _condition(self, s: int, x) -> Membership:
        j = self.stratum(s, x)
        if isinstance(j, Membership):
            return j
        y = apply(self.sys, self.gammas[s - 1], x)
        return ~self._base_current(s, y, j)

    def _base_current(self, s: int, y, j: int) -> Membership:
        """Is y still in the stage-s base when stratum j is processed?"""
        b = self.member(s - 1, y)
        if not b.is_in:
            return b
        i = self.stratum(s, y)
        if isinstance(i, Membership):
            return i
        if _rank(i) >= _rank(j):
            return IN
        return ~self._type_b(s, y, i)

    def _type_b(self, s: int, y, i: int) -> Membership:
        key = (s, y)
        r = self._typeb.get(key)
        if r is None:
            r = self._type_b_eval(s, y, i)
            self._typeb[key] = r
        return r

    def _type_b_eval(self, s, y, i):
        g = self.gammas[s - 1]
        z = y
        for _ in range(self.horizon):
            z = apply(self.sys, g, z)
            b = self.member(s - 1, z)
            if b.unknown:
                return b
            if b.is_in:
                iz = self.stratum(s, z)
                if isinstance(iz, Membership):
                    return iz
                if iz == i:
                    continue
            return self._base_current(s, z, i)
        return unknown(HORIZON, self.horizon)


def _pad2(e):
    return (tuple(e) + (0, 0))[:2]


class StageView(SetHandle):
    def __init__(self, sweep: RokhlinSweep, k: int, name: str = ""):
        super().__init__()
        self.sweep = sweep
        self.k = k
        self.name = name or f"stage[{k}]"

    def contains(self, x):
        return self.sweep.member(self.k, x)

    __call__ = contains

    def clear_memo(self):
        self.sweep.reset()


def separation_step(base: SetHandle, gamma: ST, sys: System, jmax: int,
                    horizon: int = DEFAULT_HORIZON) -> SetHandle:
    """A' inside ``base`` with A' n gamma A' empty on resolved points."""
    if gamma.is_identity():
        raise ValueError("step word must not be the identity")
    sweep = RokhlinSweep(sys, base, [gamma], jmax, horizon)
    return StageView(sweep, 1, f"sep({base!r},{gamma})")


class RokhlinSet(MarkerSet):
    """Result of the sweep; exposes the intermediate stage sets."""

    def __init__(self, sweep: RokhlinSweep, plan: StagePlan, sys: System, params: dict):
        products = [ST(k) for k in index_set(plan.bounds)]
        super().__init__(StageView(sweep, sweep.K, params.get("name", "")), sys, params, products)
        self.sweep = sweep
        self.plan = plan

    def after_stage(self, k: int) -> SetHandle:
        return StageView(self.sweep, k)

    def after_target(self, target: tuple) -> SetHandle:
        return StageView(self.sweep, self.plan.target_end[tuple(target)], f"A{tuple(target)}")

    @property
    def seed(self) -> SetHandle:
        return self.sweep.seed

    def candidates(self, label, a_lo, a_hi, b_lo, b_hi):
        """Seed points of a box (the set is contained in its seed)."""
        return self.sweep.seed.enumerate(label, a_lo, a_hi, b_lo, b_hi)


def weak_rokhlin_d(sys: System, bounds: Sequence[int], jmax: Optional[int] = None,
                   horizon: int = DEFAULT_HORIZON, seed: Optional[SetHandle] = None,
                   window: int = 40) -> RokhlinSet:
    bounds = tuple(int(t) for t in bounds)
    if len(bounds) != sys.dim:
        raise ValueError(f"{sys.name} needs {sys.dim} bounds, got {bounds}")
    if any(t < 1 for t in bounds):
        raise ValueError("bounds must be positive")
    plan = build_stage_plan(bounds)
    if jmax is None:
        jmax = default_jmax(sys, window, max(bounds))
    seed = seed if seed is not None else default_seed(sys)
    sweep = RokhlinSweep(sys, seed, plan.gammas(), jmax, horizon)
    params = {"name": f"rok{bounds}", "bounds": bounds, "jmax": jmax, "horizon": horizon,
              "seed": seed.name, "system": sys.name, "stages": len(plan.stages)}
    return RokhlinSet(sweep, plan, sys, params)


def weak_rokhlin_2d(sys: System, n: int, m: int, jmax: Optional[int] = None,
                    horizon: int = DEFAULT_HORIZON, seed: Optional[SetHandle] = None,
                    window: int = 40) -> RokhlinSet:
    if sys.dim != 2:
        raise ValueError("weak_rokhlin_2d needs a Z^2 system")
    return weak_rokhlin_d(sys, (n, m), jmax, horizon, seed, window)


# -- verification --------------------------------------------------------------

def verify_disjointness(A: SetHandle, words: Sequence, region: Iterable[Point], sys: System,
                        max_witnesses: int = 20) -> VerificationReport:
    """No point of the region may lie in two of the images w.A."""
    words = list(words)
    invs = [w.inverse() for w in words]
    rep = VerificationReport("disjointness",
                             params={"set": repr(A), "words": [str(w) for w in words],
                                     "system": sys.name})
    per_label: dict = {}
    nviol = 0
    for x in region:
        ms = [A.contains(apply(sys, v, x)) for v in invs]
        ins = [w for w, m in zip(words, ms) if m.is_in]
        unk = sum(m.unknown for m in ms)
        rep.unknown_count += unk
        if not unk:
            rep.resolved_count += 1
        label = getattr(x, "label", 0)
        tot, hits = per_label.get(label, (0, 0))
        base = A.contains(x)
        per_label[label] = (tot + 1, hits + base.is_in)
        if len(ins) >= 2:
            nviol += 1
            if len(rep.violations) < max_witnesses:
                rep.add_violation(point=str(x), w1=str(ins[0]), w2=str(ins[1]))
    rep.stats["violation_count"] = nviol
    rep.checks["no_overlap"] = nviol == 0
    rep.density_per_label = {str(k): hits / tot for k, (tot, hits) in sorted(per_label.items())}
    return rep


def verify_complete_section(A: SetHandle, sys: System, representatives: Iterable[Point],
                            horizon: int) -> VerificationReport:
    """Scan each representative's R-orbit (0, 1, -1, 2, -2, ...) for a point of A."""
    rep = VerificationReport("complete-section", params={"set": repr(A), "horizon": horizon,
                                                         "system": sys.name})
    hits = {}
    for x in representatives:
        found = None
        for k in range(0, horizon + 1):
            for kk in ((0,) if k == 0 else (k, -k)):
                m = A.contains(sys.r_step(kk, x) if kk else x)
                if m.unknown:
                    rep.unknown_count += 1
                elif m.is_in:
                    found = kk
                    break
                rep.resolved_count += 1
            if found is not None:
                break
        hits[str(x)] = found
        if found is None:
            rep.add_violation(point=str(x), reason="no hit within horizon")
    rep.stats["hit_distance"] = hits
    return rep
