"""Seeded experiment driver: configs, sampling, suites and report output."""
from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import coboundary as cob
from .markers import (index_set, verify_complete_section, verify_disjointness,
                      vanishing_markers_1d, weak_rokhlin_d)
from .report import VerificationReport, emit_json, emit_trace_csv
from .systems import LabeledLattice, ST, System, make_system, verify_action_laws, verify_freeness

SUITES = ("freeness", "markers1d", "rok2d", "rokd", "cob-a", "cob-b", "transfer")

EXIT_PASS, EXIT_FAIL, EXIT_UNKNOWN, EXIT_CONFIG = 0, 1, 2, 64


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    suite: str = "freeness"
    system: str = "lat:3"
    seed: int = 0
    samples: int = 1000
    window: int = 10
    horizon: int = 1 << 14
    jmax: Optional[int] = None
    depth: int = 5
    bounds: tuple = (2, 3)
    rmax: int = 3
    levels: tuple = (1, 2)
    witnesses: int = 10
    starts: int = 100
    length: int = 10_000
    n_g: int = 10_000
    tower_seed: str = "tiling"
    output: Optional[str] = None
    trace_csv: Optional[str] = None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        extra = set(d) - names
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        d = dict(d)
        for k in ("bounds", "levels"):
            if k in d and d[k] is not None:
                d[k] = tuple(d[k])
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e

    def with_overrides(self, **flags) -> "ExperimentConfig":
        cfg = dataclasses.replace(self, **{k: v for k, v in flags.items() if v is not None})
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        for k in ("samples", "horizon", "depth", "rmax", "witnesses", "starts", "length", "n_g"):
            if getattr(self, k) < 1:
                raise ConfigError(f"{k} must be positive")
        if self.window < 0:
            raise ConfigError("window must be non-negative")
        if self.jmax is not None and self.jmax < 1:
            raise ConfigError("jmax must be positive")
        if not self.bounds or any(t < 1 for t in self.bounds):
            raise ConfigError("bounds must be positive")
        if any(not 1 <= r <= self.rmax for r in self.levels):
            raise ConfigError("levels must lie in 1..rmax")
        if self.tower_seed not in ("tiling", "checkerboard"):
            raise ConfigError("tower_seed is 'tiling' or 'checkerboard'")
        try:
            make_system(self.system)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["bounds"], d["levels"] = list(self.bounds), list(self.levels)
        return d


def suite_rng(seed: int, suite: str) -> np.random.Generator:
    """Counter-based generator keyed by (seed, suite)."""
    key = SUITES.index(suite) if suite in SUITES else len(suite)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, key])))


def sample_points(sys: System, count: int, region: int, seed: int) -> list:
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    return sys.sample(rng, count, region)


def emit(report: VerificationReport, path: str | Path, fmt: str = "json", trace=None) -> Path:
    if fmt == "json":
        return emit_json(report, path)
    if fmt == "csv":
        return emit_trace_csv(trace if trace is not None else report.stats.get("trace", []), path)
    raise ValueError(f"unknown format {fmt!r}")


def exit_code(report: VerificationReport) -> int:
    if not report.passed:
        return EXIT_FAIL
    if report.resolved_count == 0 and report.unknown_count > 0:
        return EXIT_UNKNOWN
    return EXIT_PASS


# -- suites --------------------------------------------------------------------

def _merge(rep: VerificationReport, part: VerificationReport, key: str) -> None:
    rep.resolved_count += part.resolved_count
    rep.unknown_count += part.unknown_count
    rep.violations += [dict(v, check=key) for v in part.violations]
    for k, v in part.checks.items():
        rep.checks[f"{key}.{k}"] = v
    rep.checks[key] = not part.violations


def _region(sys: System, cfg: ExperimentConfig, rng) -> list:
    if isinstance(sys, LabeledLattice):
        return list(sys.window(cfg.window))
    return sys.sample(rng, cfg.samples, cfg.window or 8)


def _freeness(cfg, sys, rng, rep):
    pts = sys.sample(rng, cfg.samples, cfg.window if isinstance(sys, LabeledLattice) else 8)
    _merge(rep, verify_freeness(sys, pts, cfg.window), "freeness")
    _merge(rep, verify_action_laws(sys, pts, cfg.window, rng), "action_laws")


def _markers1d(cfg, sys, rng, rep):
    levels = vanishing_markers_1d(sys, cfg.depth, cfg.horizon)
    pts = sys.sample(rng, cfg.samples, 200 if sys.name.startswith("line") else 8)
    queries = 0
    for n, A in enumerate(levels, start=1):
        part = verify_disjointness(A, [ST((i,)) for i in range(n)], pts, sys)
        queries += n * len(pts)
        _merge(rep, part, f"disjoint_{n}")
        rep.stats[f"density_{n}"] = part.density_per_label
    nest_bad = 0
    for n in range(1, len(levels)):
        for x in pts:
            inner, outer = levels[n].contains(x), levels[n - 1].contains(x)
            if inner.is_in and outer.is_out:
                nest_bad += 1
                rep.add_violation(check=f"nesting_{n + 1}", point=str(x))
    rep.checks["nesting"] = nest_bad == 0
    rep.stats["queries"] = queries
    rep.stats["unknown_fraction"] = Fraction(rep.unknown_count, max(queries, 1))


def _rok(cfg, sys, rng, rep):
    bounds = cfg.bounds if cfg.suite == "rokd" else tuple(cfg.bounds[:2])
    A = weak_rokhlin_d(sys, bounds, cfg.jmax, cfg.horizon, window=cfg.window)
    rep.params["jmax"] = A.params["jmax"]
    rep.params["stages"] = A.params["stages"]
    region = _region(sys, cfg, rng)
    part = verify_disjointness(A, [ST(k) for k in index_set(bounds)], region, sys)
    _merge(rep, part, "disjoint")
    rep.density_per_label = part.density_per_label
    if hasattr(sys, "representatives"):
        reach = 4 * (2 * cfg.window + 1) ** 2
        cs = verify_complete_section(A, sys, sys.representatives(), reach)
        _merge(rep, cs, "nonempty")
        rep.stats["hit_distance"] = cs.stats["hit_distance"]


def _plan(cfg, sys):
    plan = cob.synthesize_sequences(cfg.rmax)
    return cob.build_towers(plan, sys, cfg.tower_seed, window=cfg.window + cfg.length,
                            jmax=cfg.jmax, horizon=cfg.horizon)


def _cob_a(cfg, sys, rng, rep):
    plan = _plan(cfg, sys)
    bound = sum(plan.alpha, Fraction(0))
    worst = Fraction(0)
    trace = None
    for x in sample_points(sys, cfg.starts, cfg.window, int(rng.integers(1 << 63))):
        ps = cob.partial_sums(x, "S", cfg.length, plan, trace=trace is None and bool(cfg.trace_csv))
        if ps.trace:
            trace = ps.trace
        rep.unknown_count += ps.unknown_count
        rep.resolved_count += ps.steps
        if ps.steps:
            worst = max(worst, ps.max_abs)
            if ps.max_abs > bound:
                rep.add_violation(point=str(x), max_abs=ps.max_abs, bound=bound)
    rep.stats["max_abs_sum"] = worst
    rep.stats["bound"] = bound
    rep.checks["bounded"] = worst <= bound
    if trace and cfg.trace_csv:
        emit_trace_csv(trace, cfg.trace_csv)


def _transfer(cfg, sys, rng, rep):
    plan = _plan(cfg, sys)
    stab = 0
    for x in sample_points(sys, cfg.starts, cfg.window, int(rng.integers(1 << 63))):
        try:
            t = cob.transfer_pair(x, plan, cfg.n_g)
        except cob.UnknownCell:
            rep.unknown_count += 1
            continue
        rep.resolved_count += 1
        if t["stabilized"]:
            stab += 1
            if not t["telescopes"]:
                rep.add_violation(point=str(x), f=t["f"], g=t["g"], g_S=t["g_S"])
    rep.stats["stabilized_pairs"] = stab
    rep.checks["telescoping"] = not rep.violations


def find_witnesses(tower: cob.TowerPlan, sys: System, count: int, window: int) -> list:
    """Up to ``count`` points of the tower base, nearest boxes first."""
    base = tower.base
    found: list = []
    radius = max(window, 1)
    while True:
        for label in range(sys.labels):
            if getattr(base.seed, "enumerable", False):
                pts = base.candidates(label, -radius, radius, -radius, radius)
            else:
                pts = [x for x in sys.window(radius) if x.label == label]
            for x in sorted(pts, key=lambda p: (max(map(abs, p.coords)), p.coords)):
                if x not in found and base.contains(x).is_in:
                    found.append(x)
                    if len(found) >= count:
                        return found
        if radius >= max(tower.m, window) * 4:
            return found
        radius *= 2


def _cob_b(cfg, sys, rng, rep):
    plan = _plan(cfg, sys)
    for r in cfg.levels:
        wit = find_witnesses(plan.towers[r - 1], sys, cfg.witnesses, cfg.window)
        rep.stats[f"witnesses_{r}"] = len(wit)
        rep.checks[f"found_{r}"] = len(wit) >= cfg.witnesses
        excess = []
        for x in wit:
            b = cob.bound_decomposition(x, r, plan)
            rep.resolved_count += b.resolved_count
            rep.unknown_count += b.unknown_count
            if b.stats.get("total") is not None and abs(b.stats["total"]) < r:
                rep.add_violation(point=str(x), r=r, total=b.stats["total"])
            excess += b.violations
            rep.stats.setdefault(f"guaranteed_{r}", b.stats.get("guaranteed"))
            rep.stats.setdefault(f"level_term_{r}", b.stats.get("level_term"))
            tot = b.stats.get("total")
            if tot is not None:
                lo = rep.stats.get(f"min_total_{r}")
                rep.stats[f"min_total_{r}"] = tot if lo is None else min(lo, tot)
        # caps on the interference terms are reported, not enforced
        rep.stats[f"interference_excess_{r}"] = excess


_RUNNERS = {"freeness": _freeness, "markers1d": _markers1d, "rok2d": _rok, "rokd": _rok,
            "cob-a": _cob_a, "cob-b": _cob_b, "transfer": _transfer}


def run(config: ExperimentConfig) -> VerificationReport:
    config.validate()
    sys = make_system(config.system)
    rep = VerificationReport(config.suite, params=config.to_dict())
    t0 = time.perf_counter()
    try:
        _RUNNERS[config.suite](config, sys, suite_rng(config.seed, config.suite), rep)
    except (ValueError, RuntimeError) as e:
        rep.add_violation(error=type(e).__name__, message=str(e))
    rep.wall_time = time.perf_counter() - t0
    rep.timestamp = time.strftime("%Y-%m-%dT%H:%M:%S")
    if config.output:
        emit_json(rep, config.output)
    return rep
