"""Command-line front end.

Exit status: 0 success, 1 runtime or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .analysis import SweepGrid, SweepRecord, cell_seed, rho_grid, run_sweep
from .core import (
    DEFAULT_W,
    DEFAULT_W_R,
    DomainError,
    GeometryConfig,
    ModelParams,
    db_to_linear,
    linear_to_db,
    outage_probability,
)
from .sim import DEFAULT_CHUNK_SIZE, empirical_outage

CSV_FIELDS = (
    "rho", "r", "theory_paper_db", "theory_exact_db", "sim_mean_db",
    "sim_ci95_low_db", "sim_ci95_high_db", "abs_err", "rel_err", "within_ci",
    "trials", "seed",
)
OUTAGE_FIELDS = (
    "rho", "r", "threshold_db", "theory", "empirical", "std_error", "within_3se",
    "trials", "seed",
)
MODES = ("eval", "sweep", "outage", "validate")


@dataclass
class RunConfig:
    mode: str
    w: float = DEFAULT_W
    w_r: float = DEFAULT_W_R
    s: float | None = None
    rho: list[float] = field(default_factory=list)
    rho_min: float = 0.01
    rho_max: float = 0.5
    rho_steps: int = 20
    rho_spacing: str = "linear"
    radii: list[float] = field(default_factory=list)
    zeta_db: float = -20.0
    thresholds_db: list[float] = field(default_factory=list)
    trials: int = 100_000
    seed: int = 42
    chunk_size: int = DEFAULT_CHUNK_SIZE
    workers: int = 1
    out: str = "-"
    format: str = "csv"

    def __post_init__(self):
        if self.s is None:
            self.s = (self.w + self.w_r) / 2.0

    @property
    def rho_values(self) -> list[float]:
        if self.mode == "sweep":
            return [float(x) for x in rho_grid(self.rho_min, self.rho_max, self.rho_steps, self.rho_spacing)]
        return list(self.rho)

    def geometry(self, r: float) -> GeometryConfig:
        return GeometryConfig(r=r, w=self.w, w_r=self.w_r, s=self.s)

    def grid(self) -> SweepGrid:
        return SweepGrid(
            self.rho_values, self.radii, self.geometry(max(self.radii)),
            self.zeta_db, self.trials, self.seed,
        )


def _common(p: argparse.ArgumentParser, *, radii: bool = True, out: bool = True):
    p.add_argument("--w", type=float, default=DEFAULT_W, help="blocker diameter in meters")
    p.add_argument("--w-r", type=float, default=DEFAULT_W_R, help="receiver diameter in meters")
    p.add_argument("--s", type=float, default=None, help="minimum blocker distance; default (w + w_r)/2")
    if radii:
        p.add_argument("--radius", type=float, action="append", dest="radii",
                       help="communication-circle radius in meters (repeatable)")
    p.add_argument("--zeta-db", type=float, default=-20.0, help="per-blocker loss in dB (<= 0)")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE)
    p.add_argument("--workers", type=int, default=1, help="threads running trial chunks")
    if out:
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmblockage",
        description="Expected mm-wave blockage attenuation: closed forms vs Monte Carlo.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("eval", help="theory and simulation at one intensity")
    p.add_argument("--rho", type=float, required=True, help="blockers per square meter")
    _common(p)

    p = sub.add_parser("sweep", help="theory vs simulation over an intensity grid")
    p.add_argument("--rho-min", type=float, default=0.01)
    p.add_argument("--rho-max", type=float, default=0.5)
    p.add_argument("--rho-steps", type=int, default=20)
    p.add_argument("--rho-spacing", choices=("linear", "log"), default="linear")
    _common(p)

    p = sub.add_parser("outage", help="outage probability, Poisson tail vs empirical")
    p.add_argument("--rho", type=float, action="append", required=True)
    p.add_argument("--threshold-db", type=float, action="append", dest="thresholds_db",
                   help="outage threshold in dB (<= 0, repeatable)")
    _common(p)

    p = sub.add_parser("validate", help="run the built-in consistency checks")
    _common(p, out=False)
    return parser


def parse_args(argv=None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    kwargs = {k: v for k, v in vars(ns).items() if v is not None}
    if isinstance(kwargs.get("rho"), float):
        kwargs["rho"] = [kwargs["rho"]]
    kwargs.setdefault("radii", [5.0, 10.0, 20.0] if ns.mode in ("sweep", "validate") else [10.0])
    kwargs.setdefault("thresholds_db", [-20.0])
    config = RunConfig(**kwargs)

    def fail(flag, msg):
        parser.error(f"{flag}: {msg}")

    if config.w <= 0:
        fail("--w", f"blocker diameter must be positive, got {config.w}")
    if config.w_r < 0:
        fail("--w-r", f"receiver diameter must be >= 0, got {config.w_r}")
    if config.s <= 0 or config.s < (config.w + config.w_r) / 2.0 * (1 - 1e-12):
        fail("--s", f"must be >= (w + w_r)/2 = {(config.w + config.w_r) / 2.0}, got {config.s}")
    if config.zeta_db > 0:
        fail("--zeta-db", f"must be <= 0 dB, got {config.zeta_db}")
    if config.trials < 1:
        fail("--trials", "must be >= 1")
    if config.chunk_size < 1:
        fail("--chunk-size", "must be >= 1")
    if config.workers < 1:
        fail("--workers", "must be >= 1")
    for r in config.radii:
        try:
            config.geometry(r)
        except DomainError as exc:
            fail("--radius", str(exc))
    for rho in config.rho:
        if not (rho >= 0 and math.isfinite(rho)):
            fail("--rho", f"must be finite and >= 0, got {rho}")
    if config.mode == "sweep":
        if config.rho_steps < 1:
            fail("--rho-steps", "must be >= 1")
        if config.rho_min < 0:
            fail("--rho-min", "must be >= 0")
        if config.rho_max < config.rho_min:
            fail("--rho-max", "must be >= --rho-min")
        if config.rho_spacing == "log" and config.rho_min <= 0:
            fail("--rho-min", "log spacing needs a positive minimum")
    if config.mode == "outage":
        for t in config.thresholds_db:
            if t > 0:
                fail("--threshold-db", f"must be <= 0 dB, got {t}")
    return config


def _num(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return np.format_float_positional(x, unique=True, trim="0")


def _db(x: float) -> float:
    return linear_to_db(x)


def record_row(rec: SweepRecord) -> dict:
    """Output row for one sweep record; attenuations in dB."""
    return {
        "rho": rec.rho,
        "r": rec.r,
        "theory_paper_db": _db(rec.theory_paper),
        "theory_exact_db": _db(rec.theory_exact),
        "sim_mean_db": _db(rec.sim_mean),
        "sim_ci95_low_db": _db(rec.sim_ci95_low),
        "sim_ci95_high_db": _db(rec.sim_ci95_high),
        "abs_err": rec.abs_err,
        "rel_err": rec.rel_err,
        "within_ci": rec.within_ci,
        "trials": rec.trials,
        "seed": rec.seed,
    }


def format_csv(rows: list[dict], fields=CSV_FIELDS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        cells = []
        for name in fields:
            value = row[name]
            if isinstance(value, bool):
                cells.append("true" if value else "false")
            elif isinstance(value, int):
                cells.append(str(value))
            else:
                cells.append(_num(value))
        writer.writerow(cells)
    return buf.getvalue()


def format_json(rows: list[dict]) -> str:
    # JSON has no infinities; a zero linear bound becomes null
    clean = [
        {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in row.items()}
        for row in rows
    ]
    return json.dumps(clean, indent=2) + "\n"


def _write(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_results(records: list[SweepRecord], fmt: str = "csv", path: str = "-"):
    if not records:
        raise ValueError("no records to emit")
    rows = [record_row(rec) for rec in records]
    _write(format_csv(rows) if fmt == "csv" else format_json(rows), path)


def outage_rows(config: RunConfig) -> list[dict]:
    zeta = db_to_linear(config.zeta_db)
    rows = []
    index = 0
    for r in config.radii:
        geo = config.geometry(r)
        for rho in config.rho:
            params = ModelParams(rho, zeta)
            for threshold in config.thresholds_db:
                seed = cell_seed(config.seed, index)
                index += 1
                theory = outage_probability(params, geo, threshold)
                emp = empirical_outage(
                    params, geo, threshold, config.trials, seed, config.chunk_size,
                    workers=config.workers,
                )
                se = math.sqrt(theory * (1.0 - theory) / config.trials)
                rows.append({
                    "rho": rho, "r": r, "threshold_db": threshold, "theory": theory,
                    "empirical": emp, "std_error": se,
                    "within_3se": abs(emp - theory) <= 3.0 * se or emp == theory,
                    "trials": config.trials, "seed": seed,
                })
    return rows


def run(config: RunConfig) -> int:
    if config.mode == "validate":
        from .validation import run_checks

        results = run_checks(
            w=config.w, w_r=config.w_r, s=config.s, zeta_db=config.zeta_db,
            trials=config.trials, seed=config.seed, chunk_size=config.chunk_size,
            workers=config.workers, radii=tuple(config.radii),
        )
        for res in results:
            print(res.line())
        failed = [res.name for res in results if not res.passed]
        if failed:
            print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
            return 1
        print(f"all {len(results)} checks passed")
        return 0
    if config.mode == "outage":
        rows = outage_rows(config)
        text = format_csv(rows, OUTAGE_FIELDS) if config.format == "csv" else format_json(rows)
        _write(text, config.out)
        return 0
    records = run_sweep(config.grid(), config.chunk_size, workers=config.workers)
    emit_results(records, config.format, config.out)
    return 0


def main(argv=None) -> int:
    config = parse_args(argv)
    try:
        return run(config)
    except (OSError, RuntimeError, DomainError) as exc:
        print(f"mmblockage: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
