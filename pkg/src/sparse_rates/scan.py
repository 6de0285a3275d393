"""Grid scans over (q, SNR) and their CSV / JSON serialisation."""
from __future__ import annotations

import dataclasses
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from ._parallel import ordered_map
from .errors import ConfigError, SparseRatesError
from .model import ChannelParams, SparsityLaw, memoryless_law
from .oracle import MAX_ENUMERATION_N, MAX_LOGDET_N, mc_i1, mc_i2
from .rates import (
    WiretapParams,
    i1,
    mac_rate,
    memoryless_optimality_scan,
    rate_causal_state,
    rate_controlled,
    rate_pattern_info,
    rate_unknown_pattern,
    secrecy_controlled,
    secrecy_uncontrolled,
    secrecy_unavailable,
)
from .shannon_transform import i2

__all__ = ["SCENARIOS", "ScanConfig", "ScanTable", "parse_grid", "run_scan", "emit", "render"]

WIRETAP = ("wiretap-controlled", "wiretap-unavailable", "wiretap-uncontrolled")
ORACLE = ("oracle-i1", "oracle-i2")
SCENARIOS = (
    "i1-replica",
    "i1-rigorous",
    "i2",
    "controlled",
    "unknown",
    "causal-state",
    "pattern-info",
    *WIRETAP,
    "mac",
    "memoryless-scan",
    *ORACLE,
)
# scenarios whose formula is a clamped achievable rate
_CLAMPED = ("controlled", "unknown", "causal-state", "pattern-info", *WIRETAP, "mac")
_LAW_FREE = ("i2", "causal-state", "oracle-i2")


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` (inclusive of ``b`` up to rounding) or a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(v) for v in text.split(":")]
            if len(parts) != 3:
                raise ConfigError(f"range needs the form a:b:step, got {text!r}")
            a, b, step = parts
            if not step > 0 or b < a:
                raise ConfigError(f"range {text!r} needs step > 0 and b >= a")
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            return [float(v) for v in np.round(a + step * np.arange(count), 12)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None


@dataclass(frozen=True)
class ScanConfig:
    scenario: str
    p: float
    q_grid: tuple[float, ...]
    snr_db_grid: tuple[float, ...]
    q2: float | None = None
    alpha: float | None = None
    units: str = "nats"
    seed: int = 0
    trials: int | None = None
    n: int | None = None
    degree: int | None = None
    n_laws: int | None = None
    coeffs: tuple[float, ...] | None = None
    route: str = "auto"
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "q_grid", tuple(float(v) for v in self.q_grid))
        object.__setattr__(self, "snr_db_grid", tuple(float(v) for v in self.snr_db_grid))
        if self.coeffs is not None:
            object.__setattr__(self, "coeffs", tuple(float(v) for v in self.coeffs))
        self.validate()

    def validate(self):
        s = self.scenario
        if s not in SCENARIOS:
            raise ConfigError(f"unknown scenario {s!r}; choose from {', '.join(SCENARIOS)}")
        if self.units not in ("nats", "bits"):
            raise ConfigError(f"units must be nats or bits, got {self.units!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.route not in ("auto", "replica", "rigorous"):
            raise ConfigError(f"route must be auto, replica or rigorous, got {self.route!r}")
        if not (0.0 < self.p <= 1.0):
            raise ConfigError(f"p must lie in (0, 1], got {self.p!r}")
        for name, grid in (("q", self.q_grid), ("snr-db", self.snr_db_grid)):
            if not grid:
                raise ConfigError(f"{name} grid is empty")
            if not all(math.isfinite(v) for v in grid):
                raise ConfigError(f"{name} grid has non-finite entries")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{name} grid must be strictly increasing")
        if not all(0.0 < q <= 1.0 for q in self.q_grid):
            raise ConfigError("q grid entries must lie in (0, 1]")
        self._require("q2", s in WIRETAP)
        self._require("alpha", s == "mac")
        self._require("trials", s in ORACLE)
        self._require("n", s in ORACLE)
        self._require("degree", s == "memoryless-scan")
        self._require("n_laws", s == "memoryless-scan")
        if s in WIRETAP and not (0.0 < self.q2 <= self.q_grid[0]):
            raise ConfigError(f"wiretap scans need 0 < q2 <= min(q grid), got q2={self.q2!r}")
        if s == "mac" and not (0.0 <= self.alpha < 1.0):
            raise ConfigError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        if s in ORACLE:
            if self.trials < 1:
                raise ConfigError("trials must be >= 1")
            limit = MAX_ENUMERATION_N if s == "oracle-i1" else MAX_LOGDET_N
            if not 1 <= self.n <= limit:
                raise ConfigError(f"{s} needs 1 <= n <= {limit}, got {self.n!r}")
        if s == "memoryless-scan" and (self.degree < 1 or self.n_laws < 1):
            raise ConfigError("memoryless-scan needs degree >= 1 and n-laws >= 1")
        if self.coeffs is not None and s in _LAW_FREE + ("memoryless-scan", "i1-replica"):
            raise ConfigError(f"scenario {s!r} does not take a pattern law")
        if self.p == 1.0 and s in ("i1-rigorous", "memoryless-scan") and self.coeffs is None:
            raise ConfigError(f"scenario {s!r} needs p < 1")

    def _require(self, name, needed):
        present = getattr(self, name) is not None
        if needed and not present:
            raise ConfigError(f"scenario {self.scenario!r} requires --{name.replace('_', '-')}")
        if present and not needed:
            raise ConfigError(f"--{name.replace('_', '-')} is not used by scenario {self.scenario!r}")

    def law(self) -> SparsityLaw | None:
        if self.coeffs is not None:
            return SparsityLaw(coeffs=self.coeffs)
        return None if self.p >= 1.0 else memoryless_law(self.p)

    def echo(self) -> dict:
        return {f.name: _jsonable(getattr(self, f.name)) for f in dataclasses.fields(self)}


def _jsonable(value):
    return list(value) if isinstance(value, tuple) else value


@dataclass(frozen=True)
class ScanTable:
    """Row-major ``len(q) x len(snr_db)`` grid in nats; missing cells are None."""

    config: ScanConfig
    q_axis: tuple[float, ...]
    snr_db_axis: tuple[float, ...]
    values: tuple[tuple[float | None, ...], ...]
    clamped: tuple[tuple[bool, ...], ...]
    diagnostics: tuple[dict, ...] = ()
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def q_label(self) -> str:
        return "q1" if self.config.scenario in WIRETAP else "q"

    @property
    def failed(self) -> bool:
        return bool(self.diagnostics)

    def array(self) -> np.ndarray:
        return np.array([[np.nan if v is None else v for v in row] for row in self.values])


def _cell(cfg: ScanConfig, law: SparsityLaw | None, q: float, snr_db: float):
    """``(value, clamped)`` in nats for one grid point."""
    params = ChannelParams.from_snr_db(cfg.p, snr_db, q)
    s = cfg.scenario
    if s == "i1-replica":
        return i1(params, law, "replica"), False
    if s == "i1-rigorous":
        return i1(params, law, "rigorous"), False
    if s == "i2":
        return i2(params).i2, False
    if s == "oracle-i1":
        return mc_i1(cfg.n, cfg.trials, params, None if cfg.coeffs is None else law, cfg.seed).mean, False
    if s == "oracle-i2":
        return mc_i2(cfg.n, cfg.trials, params, None, cfg.seed).mean, False
    if s == "memoryless-scan":
        return memoryless_optimality_scan(params, cfg.degree, cfg.n_laws, cfg.seed).gap, False
    if s in WIRETAP:
        wp = WiretapParams(params, cfg.q2)
        fn = {"wiretap-controlled": secrecy_controlled, "wiretap-unavailable": secrecy_unavailable,
              "wiretap-uncontrolled": secrecy_uncontrolled}[s]
        report = fn(wp, law, cfg.route)
    elif s == "controlled":
        report = rate_controlled(params, law, cfg.route)
    elif s == "unknown":
        report = rate_unknown_pattern(params, law, cfg.route)
    elif s == "causal-state":
        report = rate_causal_state(params, "replica" if cfg.route == "auto" else cfg.route)
    elif s == "pattern-info":
        report = rate_pattern_info(params, law, cfg.route)
    elif s == "mac":
        report = mac_rate(params, law, cfg.alpha, cfg.route)
    else:  # pragma: no cover - validated above
        raise ConfigError(f"unknown scenario {s!r}")
    return report.rate, report.clamped


def run_scan(config: ScanConfig, workers: int | None = None) -> ScanTable:
    """Evaluate the scenario on every grid cell; failed cells become None plus a diagnostic."""
    config.validate()
    law = config.law()
    started = time.perf_counter()
    cells = [(q, snr) for q in config.q_grid for snr in config.snr_db_grid]

    def evaluate(point):
        q, snr = point
        try:
            value, clamped = _cell(config, law, q, snr)
        except (SparseRatesError, ArithmeticError, ValueError) as exc:
            category = getattr(exc, "category", "numeric")
            return None, False, {"q": q, "snr_db": snr, "category": category, "message": str(exc)}
        if not math.isfinite(value):
            return None, False, {"q": q, "snr_db": snr, "category": "numeric", "message": f"non-finite value {value!r}"}
        return float(value), bool(clamped), None

    # the oracle parallelises over trials itself
    results = ordered_map(evaluate, cells, 1 if config.scenario in ORACLE else workers)
    width = len(config.snr_db_grid)
    rows = [results[i : i + width] for i in range(0, len(results), width)]
    return ScanTable(
        config=config,
        q_axis=config.q_grid,
        snr_db_axis=config.snr_db_grid,
        values=tuple(tuple(r[0] for r in row) for row in rows),
        clamped=tuple(tuple(r[1] for r in row) for row in rows),
        diagnostics=tuple(r[2] for r in results if r[2] is not None),
        meta={"version": __version__, "wall_time_s": time.perf_counter() - started},
    )


def _scale(table: ScanTable) -> float:
    return 1.0 / math.log(2.0) if table.config.units == "bits" else 1.0


def _fmt(value: float) -> str:
    return "%.12g" % value


def render(table: ScanTable, fmt: str | None = None) -> str:
    """Serialised table; the only place a unit conversion happens."""
    fmt = fmt or table.config.format
    scale = _scale(table)
    if fmt == "csv":
        buf = io.StringIO(newline="")
        buf.write("q,snr_db,value,clamped\n")
        for q, row, flags in zip(table.q_axis, table.values, table.clamped):
            for snr, value, flag in zip(table.snr_db_axis, row, flags):
                cell = "" if value is None else _fmt(value * scale)
                buf.write(f"{_fmt(q)},{_fmt(snr)},{cell},{'true' if flag else 'false'}\n")
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "config": table.config.echo(),
            "axes": {table.q_label: list(table.q_axis), "snr_db": list(table.snr_db_axis)},
            "values": [[None if v is None else v * scale for v in row] for row in table.values],
            "clamped": [list(row) for row in table.clamped],
            "meta": {**table.meta, "units": table.config.units, "failed_cells": len(table.diagnostics)},
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    raise ConfigError(f"format must be csv or json, got {fmt!r}")


def diagnostics_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".diagnostics.json")


def emit(table: ScanTable, fmt: str | None = None, path: str | Path | None = None) -> Path | None:
    """Write the table to ``path`` (stdout-free); diagnostics go to a companion file when cells failed."""
    text = render(table, fmt)
    path = path if path is not None else table.config.output_path
    if path is None:
        raise ConfigError("no output path given")
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if table.diagnostics:
            with open(diagnostics_path(path), "w", encoding="utf-8", newline="\n") as fh:
                json.dump(list(table.diagnostics), fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
