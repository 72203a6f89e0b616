"""Theory-vs-simulation sweeps over blocker intensity and circle radius."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DomainError,
    GeometryConfig,
    ModelParams,
    cover_prob,
    db_to_linear,
    expected_attenuation_exact,
    expected_attenuation_paper,
)
from .sim import DEFAULT_CHUNK_SIZE, estimate_attenuation

__all__ = [
    "ABS_ERR_FLOOR",
    "SweepGrid",
    "SweepRecord",
    "ApproximationGap",
    "SweepError",
    "rho_grid",
    "cell_seed",
    "run_sweep",
    "approximation_bound",
    "approximation_error_report",
]

#: Absolute slack on CI containment for cells whose standard error is ~0.
ABS_ERR_FLOOR = 1e-4


class SweepError(RuntimeError):
    """A sweep cell failed; the message names the cell."""


@dataclass(frozen=True)
class SweepGrid:
    rho_values: tuple[float, ...]
    radii: tuple[float, ...]
    geo_template: GeometryConfig
    zeta_db: float = -20.0
    trials: int = 100_000
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "rho_values", tuple(float(x) for x in self.rho_values))
        object.__setattr__(self, "radii", tuple(float(x) for x in self.radii))
        if not self.rho_values or not self.radii:
            raise DomainError("sweep grid needs at least one rho and one radius")
        if any(rho < 0 for rho in self.rho_values):
            raise DomainError("intensities must be >= 0")
        s = self.geo_template.s
        bad = [r for r in self.radii if r <= s]
        if bad:
            raise DomainError(f"radii {bad} do not exceed s={s}")
        if self.zeta_db > 0:
            raise DomainError(f"zeta_db must be <= 0, got {self.zeta_db}")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")

    @property
    def zeta(self) -> float:
        return db_to_linear(self.zeta_db)

    def cells(self):
        """``(index, rho, geometry)`` in row-major order: radius outer, rho inner."""
        index = 0
        for r in self.radii:
            geo = self.geo_template.with_radius(r)
            for rho in self.rho_values:
                yield index, rho, geo
                index += 1

    def __len__(self) -> int:
        return len(self.rho_values) * len(self.radii)


@dataclass(frozen=True)
class SweepRecord:
    rho: float
    r: float
    theory_paper: float
    theory_exact: float
    sim_mean: float
    sim_std_error: float
    sim_ci95_low: float
    sim_ci95_high: float
    abs_err: float
    rel_err: float
    within_ci: bool
    trials: int
    seed: int


@dataclass(frozen=True)
class ApproximationGap:
    rho: float
    r: float
    gap: float
    bound: float
    flagged: bool


def rho_grid(rho_min: float, rho_max: float, steps: int, spacing: str = "linear") -> np.ndarray:
    if steps < 1:
        raise DomainError("steps must be >= 1")
    if rho_min < 0 or rho_max < rho_min:
        raise DomainError(f"need 0 <= rho_min <= rho_max, got {rho_min}, {rho_max}")
    if steps == 1:
        return np.array([rho_min])
    if spacing == "linear":
        return np.linspace(rho_min, rho_max, steps)
    if spacing == "log":
        if rho_min <= 0:
            raise DomainError("log spacing needs rho_min > 0")
        return np.geomspace(rho_min, rho_max, steps)
    raise DomainError(f"unknown spacing {spacing!r}")


def cell_seed(master_seed: int, index: int) -> int:
    """64-bit seed for sweep cell ``index``, derived from the master seed."""
    state = np.random.SeedSequence([master_seed, index]).generate_state(1, np.uint64)
    return int(state[0])


def run_sweep(
    grid: SweepGrid,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    *,
    workers: int = 1,
) -> list[SweepRecord]:
    zeta = grid.zeta
    records = []
    for index, rho, geo in grid.cells():
        params = ModelParams(rho=rho, zeta=zeta)
        seed = cell_seed(grid.seed, index)
        try:
            est = estimate_attenuation(params, geo, grid.trials, seed, chunk_size, workers=workers)
        except Exception as exc:
            raise SweepError(f"cell {index} (rho={rho}, r={geo.r}) failed: {exc}") from exc
        paper = expected_attenuation_paper(params, geo)
        exact = expected_attenuation_exact(params, geo)
        abs_err = abs(paper - est.mean)
        within = est.ci95_low <= paper <= est.ci95_high or abs_err <= ABS_ERR_FLOOR
        records.append(
            SweepRecord(
                rho=rho,
                r=geo.r,
                theory_paper=paper,
                theory_exact=exact,
                sim_mean=est.mean,
                sim_std_error=est.std_error,
                sim_ci95_low=est.ci95_low,
                sim_ci95_high=est.ci95_high,
                abs_err=abs_err,
                rel_err=abs_err / est.mean,
                within_ci=within,
                trials=est.trials,
                seed=seed,
            )
        )
    return records


def approximation_bound(params: ModelParams, geo: GeometryConfig) -> float:
    """Second-order bound ``rho_bar * g**2 * (1 - zeta)**2 / 2`` on the closed-form gap."""
    g = cover_prob(geo)
    return params.rho_bar(geo.r) * (g * (1.0 - params.zeta)) ** 2 / 2.0


def approximation_error_report(grid: SweepGrid) -> list[ApproximationGap]:
    """Gap between the approximate and exact expected attenuation on every cell."""
    zeta = grid.zeta
    out = []
    for _, rho, geo in grid.cells():
        params = ModelParams(rho=rho, zeta=zeta)
        gap = abs(expected_attenuation_paper(params, geo) - expected_attenuation_exact(params, geo))
        bound = approximation_bound(params, geo)
        out.append(ApproximationGap(rho, geo.r, gap, bound, gap > bound))
    return out
