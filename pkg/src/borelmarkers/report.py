"""Verification reports and their JSON / CSV serialisation.

Exact rationals are written as ``"p/q"`` strings (integers as ``"p"``) and
read back as :class:`fractions.Fraction`.
"""
from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any


@dataclass
class VerificationReport:
    name: str
    params: dict = field(default_factory=dict)
    resolved_count: int = 0
    unknown_count: int = 0
    violations: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    density_per_label: dict = field(default_factory=dict)
    wall_time: float = 0.0
    timestamp: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations and all(self.checks.values())

    def add_violation(self, **witness) -> None:
        self.violations.append(witness)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return _encode(d)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        d = dict(d)
        d.pop("passed", None)
        decoded = {k: (_decode(v) if k in ("stats", "violations") else v) for k, v in d.items()}
        return cls(**decoded)


def rational_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


def _encode(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return {"rational": rational_str(obj)}
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


def _decode(obj: Any) -> Any:
    if isinstance(obj, dict):
        if set(obj) == {"rational"}:
            return Fraction(obj["rational"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def emit_json(report: VerificationReport, path: str | Path) -> Path:
    path = Path(path)
    if not report.timestamp:
        report.timestamp = time.strftime("%Y-%m-%dT%H:%M:%S")
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return path


def load_json(path: str | Path) -> VerificationReport:
    return VerificationReport.from_dict(json.loads(Path(path).read_text()))


def comparable(report: VerificationReport) -> dict:
    """Report content with the run-dependent fields (timestamp, wall time) removed."""
    d = report.to_dict()
    d.pop("timestamp", None)
    d.pop("wall_time", None)
    return d


TRACE_COLUMNS = ("n", "running_sum_p", "running_sum_q", "level_attribution")


def emit_trace_csv(trace: list[tuple[int, Fraction, str]], path: str | Path) -> Path:
    """Write a partial-sum trace ``[(n, running_sum, attribution), ...]``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for n, s, attr in trace:
            s = Fraction(s)
            w.writerow([n, s.numerator, s.denominator, attr])
    return path


def load_trace_csv(path: str | Path) -> list[tuple[int, Fraction, str]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [(int(r["n"]), Fraction(int(r["running_sum_p"]), int(r["running_sum_q"])),
             r["level_attribution"]) for r in rows]
