"""Command-line entry points ``bench`` and ``cob``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import coboundary as cob
from .harness import (EXIT_CONFIG, SUITES, ConfigError, ExperimentConfig, exit_code, run,
                      sample_points)
from .points import PointSyntaxError, parse_point
from .report import VerificationReport, _encode
from .systems import make_system


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _ints(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from e


def _summary(rep: VerificationReport) -> str:
    state = "PASS" if rep.passed else "FAIL"
    return (f"{rep.name}: {state} resolved={rep.resolved_count} unknown={rep.unknown_count} "
            f"violations={len(rep.violations)} ({rep.wall_time:.2f}s)")


def bench_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bench", description="Run a verification suite.")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--config", help="JSON config file; flags override its entries")
    p.add_argument("--system")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--jmax", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--bounds", type=_ints)
    p.add_argument("--rmax", type=int)
    p.add_argument("--levels", type=_ints)
    p.add_argument("--witnesses", type=int)
    p.add_argument("--starts", type=int)
    p.add_argument("--length", type=int)
    p.add_argument("--n-g", dest="n_g", type=int)
    p.add_argument("--tower-seed", dest="tower_seed")
    p.add_argument("--output", "-o")
    p.add_argument("--trace-csv", dest="trace_csv")
    return p


def bench(argv=None) -> int:
    try:
        args = vars(bench_parser().parse_args(argv))
        path = args.pop("config")
        base = ExperimentConfig.load(path) if path else ExperimentConfig(suite=args["suite"])
        cfg = base.with_overrides(**args)
    except ConfigError as e:
        print(f"bench: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    rep = run(cfg)
    print(_summary(rep))
    for v in rep.violations[:5]:
        print("  witness:", json.dumps(_encode(v)))
    return exit_code(rep)


def cob_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cob", description="Coboundary tower function tools.")
    p.add_argument("--rmax", type=int, default=3)
    p.add_argument("--system", default="lat:3")
    p.add_argument("--tower-seed", dest="tower_seed", default="tiling")
    sub = p.add_subparsers(dest="cmd", required=True)
    sub.add_parser("plan")
    e = sub.add_parser("eval")
    e.add_argument("--x", required=True)
    s = sub.add_parser("sweep")
    s.add_argument("--dir", choices=("S", "T"), default="S")
    s.add_argument("--len", dest="length", type=int, default=10_000)
    s.add_argument("--starts", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--window", type=int, default=40)
    b = sub.add_parser("propb")
    b.add_argument("--r", type=int, required=True)
    b.add_argument("--witnesses", type=int, default=10)
    b.add_argument("--window", type=int, default=40)
    for q in sub.choices.values():
        # shared options are accepted on either side of the subcommand
        q.add_argument("--rmax", type=int, default=argparse.SUPPRESS)
        q.add_argument("--system", default=argparse.SUPPRESS)
        q.add_argument("--tower-seed", dest="tower_seed", default=argparse.SUPPRESS)
    for q in (p, *sub.choices.values()):
        q.add_argument("--output", "-o")
    return p


def _dump(obj, path=None) -> None:
    text = json.dumps(_encode(obj), indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def cob_main(argv=None) -> int:
    try:
        args = cob_parser().parse_args(argv)
        if args.rmax < 1:
            raise ConfigError("rmax must be positive")
        sys_ = make_system(args.system)
    except (ConfigError, ValueError) as e:
        print(f"cob: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    plan = cob.synthesize_sequences(args.rmax)
    if args.cmd == "plan":
        rep = cob.validate_sequences(plan)
        _dump({"plan": plan.to_dict(), "report": rep.to_dict()}, args.output)
        return exit_code(rep)
    if args.cmd == "eval":
        try:
            x = parse_point(args.x)
        except PointSyntaxError as e:
            print(f"cob: config error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        towers = cob.build_towers(plan, sys_, args.tower_seed,
                                  window=max(map(abs, getattr(x, "coords", (0,)))) + 1)
        vals = cob.f_levels(x, towers)
        cells = [cob.tower_cell_of(x, t) for t in towers.towers]
        _dump({"point": str(x), "f": sum(vals, Fraction(0)), "levels": list(vals),
               "cells": [str(c) for c in cells]}, args.output)
        return 0
    if args.cmd == "sweep":
        cfg = ExperimentConfig(suite="cob-a", system=args.system, seed=args.seed,
                               starts=args.starts, length=args.length, window=args.window,
                               rmax=args.rmax, tower_seed=args.tower_seed, output=args.output)
        if args.dir == "S":
            rep = run(cfg)
        else:
            towers = cob.build_towers(plan, sys_, args.tower_seed,
                                      window=args.window + args.length)
            rep = VerificationReport("sweep-T", params={"length": args.length, "seed": args.seed})
            worst = Fraction(0)
            for x in sample_points(sys_, args.starts, args.window, args.seed):
                ps = cob.partial_sums(x, "T", args.length, towers)
                rep.resolved_count += ps.steps
                rep.unknown_count += ps.unknown_count
                worst = max(worst, ps.max_abs)
            rep.stats["max_abs_sum"] = worst
        print(_summary(rep))
        return exit_code(rep)
    cfg = ExperimentConfig(suite="cob-b", system=args.system, rmax=max(args.rmax, args.r),
                           levels=(args.r,), witnesses=args.witnesses, window=args.window,
                           tower_seed=args.tower_seed, output=args.output)
    try:
        cfg.validate()
    except ConfigError as e:
        print(f"cob: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    rep = run(cfg)
    print(_summary(rep))
    _dump(rep.stats)
    return exit_code(rep)


def bench_entry() -> None:
    sys.exit(bench())


def cob_entry() -> None:
    sys.exit(cob_main())
