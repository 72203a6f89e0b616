"""Self-checks of the closed forms against independent numerical oracles.

Each check returns a :class:`CheckResult`; :func:`run_checks` runs the set
used by ``mmblockage validate``.  Statistical thresholds are expressed in
standard errors, so shrinking ``trials`` widens them automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .core import (
    GeometryConfig,
    ModelParams,
    angle_pdf,
    blocker_count_pmf,
    cover_prob,
    db_to_linear,
    distance_cdf,
    expected_attenuation_exact,
    expected_attenuation_paper,
    outage_probability,
    sample_distance,
    single_cover_prob_given_eps,
)
from .analysis import SweepGrid, approximation_bound, cell_seed
from .sim import DEFAULT_CHUNK_SIZE, chunk_rng, empirical_outage, estimate_attenuation

__all__ = [
    "CheckResult",
    "KS_COEFF",
    "quad_angle_pdf",
    "quad_cover_prob",
    "truncated_thinning_series",
    "ks_distance_check",
    "blocker_count_chi2_check",
    "run_checks",
]

KS_COEFF = 1.36 * 1.5
CHI2_ALPHA = 1e-3


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _quad(f, geo: GeometryConfig) -> float:
    dg = geo.derived
    # the density falls off like eps**-2, so split the support geometrically
    edges = np.geomspace(dg.eps_min, dg.eps_max, 9)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
        total += val
    return total


def quad_angle_pdf(geo: GeometryConfig) -> float:
    return _quad(lambda e: angle_pdf(e, geo, strict=False), geo)


def quad_cover_prob(geo: GeometryConfig) -> float:
    """Cover probability by integrating ``h(eps) * f(eps)`` numerically."""
    return _quad(lambda e: single_cover_prob_given_eps(e) * angle_pdf(e, geo, strict=False), geo)


def truncated_thinning_series(mean_covers: float, zeta: float, tail: float = 1e-12) -> float:
    """``sum zeta**n * Poisson(n; mean)`` up to the point where the tail mass is below ``tail``."""
    if mean_covers == 0.0:
        return 1.0
    n_max = int(stats.poisson.isf(tail, mean_covers)) + 1
    n = np.arange(n_max + 1)
    return math.fsum(stats.poisson.pmf(n, mean_covers) * zeta**n)


def ks_distance_check(geo: GeometryConfig, samples: int, seed: int) -> CheckResult:
    u = chunk_rng(seed, 0).random(samples)
    d = sample_distance(u, geo)
    ks = stats.kstest(d, lambda x: distance_cdf(np.clip(x, geo.s, geo.r), geo)).statistic
    limit = KS_COEFF / math.sqrt(samples)
    return CheckResult(
        f"distance_ks(r={geo.r:g})", ks < limit, f"D={ks:.3e} limit={limit:.3e}"
    )


def blocker_count_chi2_check(
    params: ModelParams, geo: GeometryConfig, samples: int, seed: int
) -> CheckResult:
    m = chunk_rng(seed, 1).poisson(params.rho_bar(geo.r), size=samples)
    observed = np.bincount(m)
    expected = np.array(
        [blocker_count_pmf(k, params, geo) for k in range(len(observed))]
    ) * samples
    # the last bin takes the whole upper tail
    expected[-1] = samples - expected[:-1].sum()
    # merge sparse bins from both ends until each expects at least 5
    obs_bins, exp_bins = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= 5.0:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        obs_bins[-1] += acc_o
        exp_bins[-1] += acc_e
    chi2, p = stats.chisquare(obs_bins, exp_bins)
    return CheckResult(
        f"blocker_count_chi2(rho_bar={params.rho_bar(geo.r):.4g})",
        p > CHI2_ALPHA,
        f"chi2={chi2:.2f} bins={len(obs_bins)} p={p:.3g} alpha={CHI2_ALPHA}",
    )


def run_checks(
    *,
    w: float = 0.5,
    w_r: float = 0.3,
    s: float | None = None,
    zeta_db: float = -20.0,
    trials: int = 100_000,
    seed: int = 42,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
    radii=(5.0, 10.0, 20.0),
    rho_values=(0.01, 0.05, 0.2),
) -> list[CheckResult]:
    template = GeometryConfig(r=max(radii), w=w, w_r=w_r, s=s)
    grid = SweepGrid(rho_values, radii, template, zeta_db, trials, seed)
    zeta = db_to_linear(zeta_db)
    results = []

    for r in grid.radii:
        geo = template.with_radius(r)
        area = quad_angle_pdf(geo)
        results.append(CheckResult(
            f"angle_pdf_normalization(r={r:g})", abs(area - 1.0) <= 1e-8, f"integral={area:.12f}"
        ))
        g_closed, g_quad = cover_prob(geo), quad_cover_prob(geo)
        results.append(CheckResult(
            f"cover_prob_quadrature(r={r:g})",
            abs(g_closed - g_quad) <= 1e-8,
            f"closed={g_closed:.12e} quad={g_quad:.12e}",
        ))
        results.append(ks_distance_check(geo, trials, seed))

    mid = template.with_radius(grid.radii[len(grid.radii) // 2])
    results.append(blocker_count_chi2_check(ModelParams(grid.rho_values[-1], zeta), mid, trials, seed))

    worst_series = worst_bound = 0.0
    bound_ok = True
    for _, rho, geo in grid.cells():
        params = ModelParams(rho, zeta)
        g = cover_prob(geo)
        exact = expected_attenuation_exact(params, geo)
        worst_series = max(worst_series, abs(exact - truncated_thinning_series(params.rho_bar(geo.r) * g, zeta)))
        if g * (1.0 - zeta) <= 0.05:
            gap = abs(expected_attenuation_paper(params, geo) - exact)
            worst_bound = max(worst_bound, gap / approximation_bound(params, geo) if gap else 0.0)
            bound_ok &= gap <= approximation_bound(params, geo)
    results.append(CheckResult(
        "thinning_series_oracle", worst_series <= 1e-10, f"max |exact - series|={worst_series:.2e}"
    ))
    results.append(CheckResult(
        "approximation_gap_bound", bound_ok, f"max gap/bound={worst_bound:.3f}"
    ))

    worst_z = 0.0
    for index, rho, geo in grid.cells():
        params = ModelParams(rho, zeta)
        est = estimate_attenuation(params, geo, trials, cell_seed(seed, index), chunk_size, workers=workers)
        exact = expected_attenuation_exact(params, geo)
        if est.std_error > 0:
            worst_z = max(worst_z, abs(est.mean - exact) / est.std_error)
        elif abs(est.mean - exact) > 1e-12:
            worst_z = math.inf
    results.append(CheckResult(
        "simulation_vs_thinning_3se", worst_z <= 3.0, f"max |sim - exact|/se={worst_z:.2f}"
    ))

    worst_z = 0.0
    for index, (rho, threshold) in enumerate([(grid.rho_values[-1], -30.0), (grid.rho_values[0], 0.0)]):
        params = ModelParams(rho, zeta)
        p = outage_probability(params, mid, threshold)
        emp = empirical_outage(params, mid, threshold, trials, cell_seed(seed + 1, index), chunk_size, workers=workers)
        se = math.sqrt(p * (1.0 - p) / trials)
        worst_z = max(worst_z, abs(emp - p) / se if se > 0 else (0.0 if emp == p else math.inf))
    results.append(CheckResult(
        "outage_consistency_3se", worst_z <= 3.0, f"max |empirical - theory|/se={worst_z:.2f}"
    ))
    return results
