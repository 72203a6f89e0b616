"""Seeded Monte Carlo engine for blocker drops and cover counting.

Trials are split into fixed-size chunks.  Chunk ``c`` draws from its own
generator seeded by ``SeedSequence([seed, c])``, so results depend only on
``(seed, chunk_size)`` and never on how many workers ran the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    TWO_PI,
    CoverCount,
    DomainError,
    GeometryConfig,
    ModelParams,
    PolarLocation,
    linear_to_db,
    outage_min_covers,
    sample_distance,
)

__all__ = [
    "FieldSizeError",
    "BlockerField",
    "TrialResult",
    "AttenuationEstimate",
    "MAX_BLOCKERS",
    "DEFAULT_CHUNK_SIZE",
    "chunk_rng",
    "sample_field",
    "count_covers",
    "run_trial",
    "simulate_cover_counts",
    "estimate_attenuation",
    "empirical_outage",
    "summarize",
]

MAX_BLOCKERS = 10_000_000
DEFAULT_CHUNK_SIZE = 5_000
Z95 = 1.96


class FieldSizeError(RuntimeError):
    """A sampled blocker count exceeded the configured cap."""


@dataclass(frozen=True)
class BlockerField:
    """One realization of the blocker process, stored as parallel arrays."""

    d: np.ndarray
    omega: np.ndarray
    geo: GeometryConfig

    def __len__(self) -> int:
        return len(self.d)

    @property
    def locations(self) -> list[PolarLocation]:
        return [PolarLocation(float(d), float(w)) for d, w in zip(self.d, self.omega)]

    @classmethod
    def from_locations(cls, locations, geo: GeometryConfig) -> BlockerField:
        d = np.array([loc.d for loc in locations], dtype=float)
        omega = np.array([loc.omega for loc in locations], dtype=float)
        if np.any((d < geo.s) | (d > geo.r)):
            raise DomainError("blocker distance outside [s, r]")
        if np.any((omega <= 0.0) | (omega > TWO_PI)):
            raise DomainError("blocker azimuth outside (0, 2*pi]")
        return cls(d, omega, geo)


@dataclass(frozen=True)
class TrialResult:
    n_covers: int
    m_blockers: int
    attenuation_linear: float


@dataclass(frozen=True)
class AttenuationEstimate:
    mean: float
    std_error: float
    ci95_low: float
    ci95_high: float
    trials: int
    seed: int

    @property
    def mean_db(self) -> float:
        return linear_to_db(self.mean)


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, chunk]))


def _draw_counts(rng: np.random.Generator, lam: float, size: int, cap: int) -> np.ndarray:
    if lam == 0.0:
        return np.zeros(size, dtype=np.int64)
    m = rng.poisson(lam, size=size)
    if size and m.max() > cap:
        raise FieldSizeError(
            f"sampled {int(m.max())} blockers, above the cap of {cap}; "
            f"mean count {lam:g} is implausible"
        )
    return m


def _draw_locations(rng: np.random.Generator, total: int):
    u_d = rng.random(total)
    # 1 - U maps [0, 1) onto (0, 1], so the azimuth lands in (0, 2*pi]
    omega = TWO_PI * (1.0 - rng.random(total))
    return u_d, omega


def _wrap(delta):
    return np.mod(delta + math.pi, TWO_PI) - math.pi


def sample_field(
    params: ModelParams,
    geo: GeometryConfig,
    rng: np.random.Generator,
    *,
    cap: int = MAX_BLOCKERS,
) -> BlockerField:
    """Drop one Poisson field of blockers on the annulus ``[s, r]``."""
    m = int(_draw_counts(rng, params.rho_bar(geo.r), 1, cap)[0])
    u_d, omega = _draw_locations(rng, m)
    return BlockerField(sample_distance(u_d, geo), omega, geo)


def run_trial(params: ModelParams, geo: GeometryConfig, rng: np.random.Generator, phi: float = 0.0) -> TrialResult:
    """Drop one field and report its covers along ``phi``."""
    cover = count_covers(sample_field(params, geo, rng), phi)
    return TrialResult(cover.n, cover.m, cover.attenuation(params.zeta))


def _covered(d, omega, phi: float, geo: GeometryConfig) -> np.ndarray:
    half_eps = np.arcsin(geo.w / (2.0 * d))
    return np.abs(_wrap(omega - phi)) <= half_eps


def count_covers(field: BlockerField, phi: float = 0.0) -> CoverCount:
    """Number of blockers whose angular shadow contains direction ``phi``."""
    n = int(np.count_nonzero(_covered(field.d, field.omega, phi, field.geo)))
    return CoverCount(n=n, m=len(field))


def _chunk_cover_counts(
    params: ModelParams,
    geo: GeometryConfig,
    size: int,
    rng: np.random.Generator,
    phi: float,
    cap: int,
) -> np.ndarray:
    m = _draw_counts(rng, params.rho_bar(geo.r), size, cap)
    total = int(m.sum())
    u_d, omega = _draw_locations(rng, total)
    # cheap prefilter: nothing farther than the widest possible half-angle can cover
    delta = np.abs(_wrap(omega - phi))
    candidate = np.flatnonzero(delta <= geo.derived.eps_max / 2.0)
    d = sample_distance(u_d[candidate], geo)
    hit = candidate[delta[candidate] <= np.arcsin(geo.w / (2.0 * d))]
    owner = np.searchsorted(np.cumsum(m), hit, side="right")
    return np.bincount(owner, minlength=size)


def simulate_cover_counts(
    params: ModelParams,
    geo: GeometryConfig,
    trials: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    *,
    phi: float = 0.0,
    workers: int = 1,
    cap: int = MAX_BLOCKERS,
) -> np.ndarray:
    """Cover count of every trial, in trial order.

    The output is identical for any ``workers`` value.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be >= 1, got {chunk_size}")
    n_chunks = -(-trials // chunk_size)
    sizes = [min(chunk_size, trials - c * chunk_size) for c in range(n_chunks)]

    def run(c):
        return _chunk_cover_counts(params, geo, sizes[c], chunk_rng(seed, c), phi, cap)

    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_chunks)))
    else:
        parts = [run(c) for c in range(n_chunks)]
    return np.concatenate(parts)


def summarize(values: np.ndarray, seed: int) -> AttenuationEstimate:
    """Mean, standard error and normal 95% interval of per-trial attenuations."""
    trials = len(values)
    if trials == 0:
        raise DomainError("no trials to summarize")
    mean = math.fsum(values) / trials
    if trials > 1:
        var = math.fsum((values - mean) ** 2) / (trials - 1)
    else:
        var = 0.0
    se = math.sqrt(var / trials)
    # attenuation is a power ratio, so the interval is clipped to [0, 1]
    low = max(mean - Z95 * se, 0.0)
    high = min(mean + Z95 * se, 1.0)
    return AttenuationEstimate(mean, se, min(low, mean), max(high, mean), trials, seed)


def estimate_attenuation(
    params: ModelParams,
    geo: GeometryConfig,
    trials: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    *,
    workers: int = 1,
    phi: float = 0.0,
) -> AttenuationEstimate:
    """Monte Carlo estimate of the mean power ratio ``E[zeta**N]``."""
    n = simulate_cover_counts(params, geo, trials, seed, chunk_size, phi=phi, workers=workers)
    return summarize(np.power(params.zeta, n.astype(float)), seed)


def empirical_outage(
    params: ModelParams,
    geo: GeometryConfig,
    threshold_db: float,
    trials: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    *,
    workers: int = 1,
) -> float:
    """Fraction of trials whose total blockage loss is below ``threshold_db``."""
    if threshold_db > 0:
        raise DomainError(f"threshold must be <= 0 dB, got {threshold_db}")
    n = simulate_cover_counts(params, geo, trials, seed, chunk_size, workers=workers)
    if outage_min_covers(params.zeta, threshold_db) is None:
        return 0.0
    loss_db = linear_to_db(params.zeta) * n
    return float(np.count_nonzero(loss_db < threshold_db)) / trials
