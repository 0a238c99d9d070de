"""Command-line front end: single runs, parameter sweeps, CSV output.

Every row is reproducible from its (seed, scheme, varied value) triple;
reruns are byte-identical. Wall time is reported as 0 unless --timing is
given, so that timing noise never leaks into diffable output.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass

from .decision_engine import SCHEME_NAMES, AllocationOutcome, run_scheme
from .errors import InvalidConfig
from .scenario import ScenarioConfig, build_scenario, channel_gains, load_config

CSV_HEADER = (
    "seed,n_cells,scheme,lambda,objective,system_overhead,n_offload,"
    "mean_rate_bps,sum_cpu_assigned_hz,prb_slots_assigned,wall_time_ms"
)

# the server-split rule each scheme runs with, as printed in the CSV
_SCHEME_OBJECTIVE = {
    "proposed_minmax": "minmax",
    "proposed_minsum": "minsum",
    "all_local": "none",
    "all_offload_orth": "equal",
    "equal_cpu": "equal",
}

_VARY_KEYS = {"cells": "n_cells", "lambda": "reuse_lambda", "mec_ghz": "mec_ghz"}


@dataclass(frozen=True)
class RunRecord:
    seed: int
    n_cells: int
    scheme: str
    reuse_lambda: float
    objective: str
    system_overhead: float
    n_offload: int
    mean_rate_bps: float
    sum_cpu_assigned_hz: float
    prb_slots_assigned: int
    wall_time_ms: float | int

    def to_row(self) -> list[str]:
        return [
            str(self.seed),
            str(self.n_cells),
            self.scheme,
            _fmt(self.reuse_lambda),
            self.objective,
            _fmt(self.system_overhead),
            str(self.n_offload),
            _fmt(self.mean_rate_bps),
            _fmt(self.sum_cpu_assigned_hz),
            str(self.prb_slots_assigned),
            _fmt(self.wall_time_ms),
        ]


def _fmt(x) -> str:
    if isinstance(x, int):
        return str(x)
    if math.isinf(x):
        return "inf"
    return str(float(x))


def _record(seed: int, scheme: str, cfg, outcome: AllocationOutcome, wall_ms) -> RunRecord:
    offs = outcome.decision.offload_set
    mean_rate = (
        float(sum(outcome.rates_bps[i] for i in offs) / len(offs)) if offs else 0.0
    )
    return RunRecord(
        seed=seed,
        n_cells=cfg.n_cells,
        scheme=scheme,
        reuse_lambda=float(cfg.reuse_lambda),
        objective=_SCHEME_OBJECTIVE[scheme],
        system_overhead=outcome.system_overhead,
        n_offload=outcome.decision.n_offload,
        mean_rate_bps=mean_rate,
        sum_cpu_assigned_hz=outcome.cpu.total_hz if outcome.cpu is not None else 0.0,
        prb_slots_assigned=int(outcome.assoc.m.sum()),
        wall_time_ms=wall_ms,
    )


def _run_one(cfg: ScenarioConfig, seed: int, scheme: str, timing: bool):
    s = build_scenario(cfg, seed=seed)
    g = channel_gains(s)
    t0 = time.perf_counter()
    outcome = run_scheme(scheme, s, g)
    wall_ms = (time.perf_counter() - t0) * 1e3 if timing else 0
    return _record(seed, scheme, cfg, outcome, wall_ms), outcome


def _detail_lines(seed: int, scheme: str, outcome: AllocationOutcome) -> list[str]:
    """Per-cell PRB listing, '#'-prefixed so CSV consumers skip it."""
    lines = [f"# prb_allocation seed={seed} scheme={scheme}"]
    c = outcome.assoc.c
    for n in range(c.shape[0]):
        if outcome.decision.a[n] == 0:
            lines.append(f"# cell {n}: local")
        else:
            held = " ".join(str(k) for k in c[n].nonzero()[0])
            lines.append(f"# cell {n}: {held}")
    return lines


class _Parser(argparse.ArgumentParser):
    # usage problems exit 3; config problems exit 2 (handled in main)
    def error(self, message):
        self.exit(3, f"{self.prog}: error: {message}\n")


def _resolve_schemes(scheme: str | None, objective: str | None) -> list[str]:
    scheme = scheme or "proposed"
    if scheme == "proposed":
        return [f"proposed_{objective or 'minsum'}"]
    if objective is not None and scheme != f"proposed_{objective}":
        raise _UsageError(
            f"--objective {objective} conflicts with --scheme {scheme}"
        )
    if scheme == "all":
        return sorted(SCHEME_NAMES)
    return [scheme]


class _UsageError(Exception):
    pass


def _parse_seeds(text: str) -> list[int]:
    if ".." in text:
        first, _, last = text.partition("..")
        try:
            lo, hi = int(first), int(last)
        except ValueError:
            raise _UsageError(f"bad seed range {text!r}") from None
        return list(range(lo, hi + 1))
    try:
        return [int(text)]
    except ValueError:
        raise _UsageError(f"bad seed list {text!r}") from None


def _parse_values(vary: str, text: str) -> list:
    cast = int if vary == "cells" else float
    try:
        values = [cast(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise _UsageError(f"bad value list {text!r} for --vary {vary}") from None
    if not values:
        raise _UsageError("empty --values list")
    return values


def _load_cfg(path: str | None) -> ScenarioConfig:
    if path is None:
        cfg = ScenarioConfig()
        cfg.validate()
        return cfg
    return load_config(path)


def _emit(rows: list[list[str]], output: str | None, extra: list[str]) -> None:
    def write(stream):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        writer.writerows(rows)

    if output is None:
        write(sys.stdout)
        for line in extra:
            print(line)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            write(fh)
        for line in extra:
            print(line)


def cmd_run(args) -> int:
    cfg = _load_cfg(args.config)
    schemes = _resolve_schemes(args.scheme, args.objective)
    seed = args.seed if args.seed is not None else cfg.seed
    rows, extra = [], []
    for scheme in schemes:
        record, outcome = _run_one(cfg, seed, scheme, args.timing)
        rows.append(record.to_row())
        if args.detail:
            extra.extend(_detail_lines(seed, scheme, outcome))
    _emit(rows, args.output, extra)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_cfg(args.config)
    schemes = _resolve_schemes(args.scheme, args.objective)
    seeds = _parse_seeds(args.seeds)
    if not seeds:
        raise _UsageError("empty seed range")
    values = _parse_values(args.vary, args.values)
    key = _VARY_KEYS[args.vary]
    rows = []
    for value in sorted(values):
        run_cfg = cfg.with_overrides(**{key: value})
        run_cfg.validate()
        for seed in sorted(seeds):
            s = build_scenario(run_cfg, seed=seed)
            g = channel_gains(s)
            for scheme in sorted(schemes):
                t0 = time.perf_counter()
                outcome = run_scheme(scheme, s, g)
                wall_ms = (time.perf_counter() - t0) * 1e3 if args.timing else 0
                rows.append(_record(seed, scheme, run_cfg, outcome, wall_ms).to_row())
    _emit(rows, args.output, [])
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="mecoffload", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument(
            "--scheme",
            default=None,
            choices=["proposed", "all", *SCHEME_NAMES],
            help="which scheme to run (default proposed)",
        )
        p.add_argument("--objective", default=None, choices=["minmax", "minsum"])
        p.add_argument("--output", default=None, help="CSV file (default stdout)")
        p.add_argument(
            "--timing",
            action="store_true",
            help="report real wall time instead of the reproducible 0",
        )

    run_p = sub.add_parser("run", help="one seed, one or more schemes")
    common(run_p)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument(
        "--detail", action="store_true", help="dump the per-cell PRB table"
    )
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="cartesian sweep over values and seeds")
    common(sweep_p)
    sweep_p.add_argument("--seeds", required=True, help="N or A..B (inclusive)")
    sweep_p.add_argument("--vary", required=True, choices=sorted(_VARY_KEYS))
    sweep_p.add_argument("--values", required=True, help="comma-separated list")
    sweep_p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"mecoffload: error: {exc}", file=sys.stderr)
        return 3
    except InvalidConfig as exc:
        print(f"mecoffload: config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"mecoffload: config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
