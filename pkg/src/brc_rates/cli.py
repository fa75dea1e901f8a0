"""Command-line front end: eval, sweep, region and composite subcommands.

Scenarios are flat JSON objects with dotted keys, for example::

    {"strategy": "COMPOUND", "params.P": 10, "params.P1": 10, "params.P2": 10,
     "sweep.name": "d1", "sweep.start": -1, "sweep.stop": 1, "sweep.step": 0.01}

Exit codes: 0 success, 2 config error, 3 infeasible scenario, 4 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import region_tools as rt
from .core import (
    BrcError,
    DomainError,
    GaussianBrcParams,
    InfeasibleParameterError,
    NumericError,
    StrategyKind,
)

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 2, 3, 4

PARAM_FIELDS = tuple(f.name for f in fields(GaussianBrcParams))
CODING_FIELDS = rt.CODING_KEYS
# relay positions on the source-destination segment
PSEUDO_SWEEP = ("d1", "d2")
REGION_TAGS = tuple(k.value for k in StrategyKind) + ("DF_CF",)
EXTRA_COLUMNS = {
    StrategyKind.COMPOUND: ("R_DF", "R_CF", "R_TS", "tau", "R_CF1"),
    StrategyKind.OBLIVIOUS: ("R1_outer",),
    StrategyKind.DEGRADED_CR_CAPACITY: ("r0_max", "r1_max", "sum_max"),
}
THREADS_ENV = "BRC_RATES_THREADS"


class ConfigError(Exception):
    """Unusable configuration; the message names the offending field."""


@dataclass(frozen=True)
class SweepVar:
    name: str
    start: float
    stop: float
    step: float

    def values(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + k * self.step, 12) for k in range(n)]


@dataclass(frozen=True)
class CompositeBlock:
    p_start: float = 0.0
    p_stop: float = 1.0
    p_step: float = 0.01

    def values(self) -> list[float]:
        return SweepVar("p", self.p_start, self.p_stop, self.p_step).values()


@dataclass(frozen=True)
class ScenarioConfig:
    strategy: str
    params: GaussianBrcParams
    coding: tuple[tuple[str, float], ...] = ()
    sweep: SweepVar | None = None
    composite: CompositeBlock | None = None
    degraded: bool = False
    output: str | None = None
    seed: int = 0
    grid: int = rt.SweepSpec().points
    refine: int = rt.SweepSpec().refine

    @property
    def fixed(self) -> dict[str, float]:
        return dict(self.coding)

    @property
    def spec(self) -> rt.SweepSpec:
        return rt.SweepSpec(points=self.grid, refine=self.refine)

    def to_flat(self) -> dict[str, Any]:
        out: dict[str, Any] = {"strategy": self.strategy}
        out.update({f"params.{k}": getattr(self.params, k) for k in PARAM_FIELDS})
        out.update({f"coding.{k}": v for k, v in self.coding})
        if self.sweep is not None:
            out.update({f"sweep.{k}": getattr(self.sweep, k) for k in ("name", "start", "stop", "step")})
        if self.composite is not None:
            out.update({f"composite.{k}": getattr(self.composite, k) for k in ("p_start", "p_stop", "p_step")})
        out["oblivious.degraded"] = self.degraded
        if self.output is not None:
            out["output"] = self.output
        out.update(seed=self.seed, grid=self.grid, refine=self.refine)
        return out


# ---------------------------------------------------------------- parsing


def _line_of(text: str, key: str) -> str:
    needle = json.dumps(key)
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return f"line {i}: "
    return ""


def parse_config(text: str) -> ScenarioConfig:
    """Parse a flat JSON scenario; raises :class:`ConfigError`."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object")

    def fail(key: str, msg: str):
        raise ConfigError(f"{_line_of(text, key)}field {key!r}: {msg}")

    def num(key: str) -> float:
        v = raw[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            fail(key, f"expected a finite number, got {v!r}")
        return float(v)

    def integer(key: str, lo: int) -> int:
        v = raw[key]
        if isinstance(v, bool) or not isinstance(v, int) or v < lo:
            fail(key, f"expected an integer >= {lo}, got {v!r}")
        return v

    known = {"strategy", "output", "seed", "grid", "refine", "oblivious.degraded"}
    known |= {f"params.{k}" for k in PARAM_FIELDS} | {f"coding.{k}" for k in CODING_FIELDS}
    known |= {f"sweep.{k}" for k in ("name", "start", "stop", "step")}
    known |= {f"composite.{k}" for k in ("p_start", "p_stop", "p_step")}
    for key in raw:
        if key not in known:
            fail(key, "unknown key")

    if "strategy" not in raw:
        raise ConfigError("field 'strategy': missing")
    strategy = raw["strategy"]
    if strategy not in REGION_TAGS:
        fail("strategy", f"unknown strategy {strategy!r}; expected one of {', '.join(REGION_TAGS)}")

    pkw = {k: num(f"params.{k}") for k in PARAM_FIELDS if f"params.{k}" in raw}
    for k in ("P", "P1", "P2"):
        if k not in pkw:
            raise ConfigError(f"field 'params.{k}': missing")
    try:
        params = GaussianBrcParams(**pkw)
    except DomainError as e:
        bad = next((k for k in PARAM_FIELDS if str(e).startswith(k + " ")), None)
        if bad is not None:
            fail(f"params.{bad}", str(e))
        raise ConfigError(str(e)) from None

    coding = []
    for k in CODING_FIELDS:
        key = f"coding.{k}"
        if key in raw:
            v = num(key)
            if not 0.0 <= v <= (2.0 if k == "gamma" else 1.0):
                fail(key, f"out of range: {v!r}")
            coding.append((k, v))

    sweep = None
    skeys = [k for k in raw if k.startswith("sweep.")]
    if skeys:
        for k in ("name", "start", "stop", "step"):
            if f"sweep.{k}" not in raw:
                raise ConfigError(f"field 'sweep.{k}': missing")
        name = raw["sweep.name"]
        if name not in PARAM_FIELDS + CODING_FIELDS + PSEUDO_SWEEP:
            fail("sweep.name", f"names no parameter: {name!r}")
        start, stop, step = num("sweep.start"), num("sweep.stop"), num("sweep.step")
        if step <= 0:
            fail("sweep.step", "must be > 0")
        if stop < start:
            fail("sweep.stop", "range is empty")
        sweep = SweepVar(name, start, stop, step)

    composite = None
    if any(k.startswith("composite.") for k in raw):
        kw = {k: num(f"composite.{k}") for k in ("p_start", "p_stop", "p_step") if f"composite.{k}" in raw}
        composite = CompositeBlock(**kw)
        if composite.p_step <= 0:
            fail("composite.p_step", "must be > 0")
        if not 0.0 <= composite.p_start <= composite.p_stop <= 1.0:
            fail("composite.p_stop", "p range must satisfy 0 <= p_start <= p_stop <= 1")

    degraded = raw.get("oblivious.degraded", False)
    if not isinstance(degraded, bool):
        fail("oblivious.degraded", f"expected true/false, got {degraded!r}")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        fail("output", "expected a path string")
    seed = integer("seed", 0) if "seed" in raw else 0
    grid = integer("grid", 2) if "grid" in raw else rt.SweepSpec().points
    refine = integer("refine", 0) if "refine" in raw else rt.SweepSpec().refine
    return ScenarioConfig(strategy, params, tuple(coding), sweep, composite, degraded, output, seed, grid, refine)


def dump_config(cfg: ScenarioConfig) -> str:
    return json.dumps(cfg.to_flat(), indent=2) + "\n"


# ---------------------------------------------------------------- evaluation


def fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, float, np.floating, np.integer)):
        return format(float(v) + 0.0, ".12g")
    return str(v)


def to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _threads() -> int:
    v = os.environ.get(THREADS_ENV)
    if not v:
        return 1
    try:
        return max(1, int(v))
    except ValueError:
        raise ConfigError(f"environment {THREADS_ENV}: expected an integer, got {v!r}") from None


def _ordered_map(fn: Callable, items: Sequence) -> list:
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _eval_header(cfg: ScenarioConfig) -> list[str]:
    extra = EXTRA_COLUMNS.get(StrategyKind(cfg.strategy), ())
    return ["strategy", *PARAM_FIELDS, *CODING_FIELDS, "R0", "R1", "R2", *extra]


def _eval_row(cfg: ScenarioConfig) -> list[Any]:
    kind = StrategyKind(cfg.strategy)
    row = rt.evaluate_strategy(kind, cfg.params, cfg.spec, cfg.fixed, degraded=cfg.degraded)
    return [cfg.strategy, *(getattr(cfg.params, k) for k in PARAM_FIELDS),
            *(row[k] for k in CODING_FIELDS), row["R0"], row["R1"], row["R2"],
            *(row[k] for k in EXTRA_COLUMNS.get(kind, ()))]


def apply_sweep_value(cfg: ScenarioConfig, name: str, value: float) -> ScenarioConfig:
    """Scenario with the swept variable set to ``value``."""
    if name in PSEUDO_SWEEP:
        return replace(cfg, params=cfg.params.with_relay_position(int(name[1]), value))
    if name in PARAM_FIELDS:
        try:
            return replace(cfg, params=replace(cfg.params, **{name: value}))
        except DomainError as e:
            raise ConfigError(f"field 'sweep.start': value {value!r} invalid for {name}: {e}") from None
    return replace(cfg, coding=tuple(sorted({**cfg.fixed, name: value}.items(),
                                            key=lambda kv: CODING_FIELDS.index(kv[0]))))


def _require_eval_strategy(cfg: ScenarioConfig) -> None:
    if cfg.strategy in ("DF_CF", StrategyKind.COMPOSITE.value):
        raise ConfigError(f"field 'strategy': {cfg.strategy} is not supported by this subcommand")


def cmd_eval(cfg: ScenarioConfig) -> str:
    _require_eval_strategy(cfg)
    return to_csv(_eval_header(cfg), [_eval_row(cfg)])


def cmd_sweep(cfg: ScenarioConfig) -> str:
    _require_eval_strategy(cfg)
    if cfg.sweep is None:
        raise ConfigError("field 'sweep.name': sweep block missing")
    points = [apply_sweep_value(cfg, cfg.sweep.name, v) for v in cfg.sweep.values()]
    return to_csv(_eval_header(cfg), _ordered_map(_eval_row, points))


def cmd_region(cfg: ScenarioConfig) -> dict[str, str]:
    """Returns CSV text keyed by file suffix ("" is the hull file)."""
    if cfg.strategy in (StrategyKind.COMPOUND.value, StrategyKind.COMPOSITE.value):
        raise ConfigError(f"field 'strategy': {cfg.strategy} has no private-rate region")
    fixed = cfg.fixed
    bounds = {}
    for k in ("beta1", "beta2"):
        if k in fixed:
            bounds[k] = (fixed[k], fixed[k])
    spec = replace(cfg.spec, bounds=bounds)
    bounds_to_run = ["inner", "outer"] if cfg.strategy == StrategyKind.OBLIVIOUS.value else ["inner"]
    out = {}
    for b in bounds_to_run:
        reg = rt.region_boundary(cfg.strategy, cfg.params, spec, alpha=fixed.get("alpha"),
                                 bound=b, degraded=cfg.degraded)
        tag = "" if b == "inner" else "_outer"
        out[tag] = to_csv(reg.axes, [(p[0], p[1]) for p in reg.hull])
        out[tag + "_points"] = to_csv(reg.axes, [(p[0], p[1]) for p in reg.points])
    return out


def cmd_composite(cfg: ScenarioConfig) -> str:
    if cfg.composite is None:
        raise ConfigError("field 'composite.p_step': composite block missing")
    cand = rt.composite_candidates(cfg.params, cfg.spec)
    base = rt.composite_baselines(cfg.params)
    common, pairs = cand
    r1s, r2s = float(pairs[:, 0].max()), float(pairs[:, 1].max())
    header = ["p", "r_av_broadcast", "r_av_df", "r_av_cf", "R1_star", "R2_star",
              "R0_common", "R_DF1", "R_DF2", "R_CF1", "R_CF2"]
    rows = []
    for p in cfg.composite.values():
        bc, df, cf = rt.composite_expected_rate(rt.CompositeScenario(p, cfg.params),
                                                candidates=cand, baselines=base)
        rows.append([p, bc, df, cf, r1s, r2s, common["R0"],
                     base["R_DF1"], base["R_DF2"], base["R_CF1"], base["R_CF2"]])
    return to_csv(header, rows)


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brc-rates", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("eval", "sweep", "region", "composite"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="flat JSON scenario file")
        sp.add_argument("--out", help="output CSV path (default: config 'output' or stdout)")
        sp.add_argument("--seed", type=int, help="override the scenario seed")
        sp.add_argument("--grid", type=int, help="coarse grid points per axis")
        sp.add_argument("--refine", type=int, help="refinement passes")
        sp.add_argument("--dump-config", action="store_true",
                        help="print the normalized scenario and exit")
    return ap


def _companion(path: str, suffix: str) -> str:
    p = Path(path)
    return str(p.with_name(p.stem + suffix + (p.suffix or ".csv")))


def _write(path: str | None, text: str, stdout) -> None:
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        try:
            text = Path(args.config).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from None
        cfg = parse_config(text)
        over = {}
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be >= 0")
            over["seed"] = args.seed
        if args.grid is not None:
            if args.grid < 2:
                raise ConfigError("--grid must be >= 2")
            over["grid"] = args.grid
        if args.refine is not None:
            if args.refine < 0:
                raise ConfigError("--refine must be >= 0")
            over["refine"] = args.refine
        if args.out is not None:
            over["output"] = args.out
        cfg = replace(cfg, **over)
        if args.dump_config:
            stdout.write(dump_config(cfg))
            return EXIT_OK
        if args.command == "region":
            files = cmd_region(cfg)
            if cfg.output is None:
                for suffix, body in files.items():
                    stdout.write(f"# {suffix or 'hull'}\n{body}")
            else:
                for suffix, body in files.items():
                    _write(_companion(cfg.output, suffix) if suffix else cfg.output, body, stdout)
            return EXIT_OK
        cmd = {"eval": cmd_eval, "sweep": cmd_sweep, "composite": cmd_composite}[args.command]
        _write(cfg.output, cmd(cfg), stdout)
        return EXIT_OK
    except ConfigError as e:
        print(f"config error: {e}", file=stderr)
        return EXIT_CONFIG
    except NumericError as e:
        print(f"numeric error: {e}", file=stderr)
        return EXIT_NUMERIC
    except (InfeasibleParameterError, BrcError) as e:
        print(f"infeasible scenario: {e}", file=stderr)
        return EXIT_INFEASIBLE
    except (FloatingPointError, OverflowError, np.linalg.LinAlgError) as e:
        print(f"numeric error: {e}", file=stderr)
        return EXIT_NUMERIC
