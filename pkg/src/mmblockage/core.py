"""Closed-form blockage model for an open-area mm-wave D2D receiver.

Blockers are cylinders of diameter ``w`` scattered around the receiver by a
homogeneous Poisson point process of intensity ``rho`` inside the annulus
``s <= d <= r``.  Each blocker that covers the arrival direction multiplies
the received power by ``zeta`` (a linear power ratio in ``(0, 1]``).

All functions here are pure.  Lengths are in meters, angles in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "DomainError",
    "DegenerateGeometryError",
    "GeometryConfig",
    "DerivedGeometry",
    "ModelParams",
    "PolarLocation",
    "CoverCount",
    "MIN_SEPARATION",
    "DEFAULT_W",
    "DEFAULT_W_R",
    "db_to_linear",
    "linear_to_db",
    "distance_cdf",
    "sample_distance",
    "blocker_count_pmf",
    "subtended_angle",
    "angle_pdf",
    "single_cover_prob_given_eps",
    "cover_prob",
    "cover_count_pmf",
    "expected_attenuation_paper",
    "expected_attenuation_exact",
    "outage_min_covers",
    "outage_probability",
]

#: Smallest allowed ``r - s``; below it the annulus normalizers cancel badly.
MIN_SEPARATION = 1e-6

#: Human-scale defaults for blocker and receiver diameters (meters).
DEFAULT_W = 0.5
DEFAULT_W_R = 0.3

TWO_PI = 2.0 * math.pi


class DomainError(ValueError):
    """An argument lies outside the domain of a model function."""


class DegenerateGeometryError(DomainError):
    """The annulus ``[s, r]`` is too thin to evaluate the closed forms."""


@dataclass(frozen=True)
class GeometryConfig:
    """Communication circle and blocker sizes.

    ``s`` defaults to ``(w + w_r) / 2``, the closest a blocker can stand to
    the receiver without the two cylinders overlapping.
    """

    r: float
    w: float = DEFAULT_W
    w_r: float = DEFAULT_W_R
    s: float | None = None

    def __post_init__(self):
        if self.s is None:
            object.__setattr__(self, "s", (self.w + self.w_r) / 2.0)
        for name in ("r", "w", "w_r", "s"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.w <= 0:
            raise DomainError(f"blocker diameter w must be positive, got {self.w}")
        if self.w_r < 0:
            raise DomainError(f"receiver diameter w_r must be >= 0, got {self.w_r}")
        if self.s <= 0:
            raise DomainError(f"minimum blocker distance s must be positive, got {self.s}")
        # small slack so that s == (w + w_r)/2 survives float rounding
        if self.s < (self.w + self.w_r) / 2.0 * (1.0 - 1e-12):
            raise DomainError(
                f"s={self.s} is closer than (w + w_r)/2={(self.w + self.w_r) / 2.0}"
            )
        if self.r <= self.s:
            raise DomainError(f"radius r={self.r} must exceed s={self.s}")
        if self.r - self.s < MIN_SEPARATION:
            raise DegenerateGeometryError(
                f"r - s = {self.r - self.s:g} is below the minimum separation {MIN_SEPARATION:g}"
            )

    @property
    def derived(self) -> DerivedGeometry:
        return DerivedGeometry.from_geometry(self)

    def with_radius(self, r: float) -> GeometryConfig:
        return GeometryConfig(r=r, w=self.w, w_r=self.w_r, s=self.s)


@dataclass(frozen=True)
class DerivedGeometry:
    """Ratios ``k = w / 2d`` at both annulus edges and the support of the subtended angle."""

    k_r: float
    k_s: float
    eps_min: float
    eps_max: float

    @classmethod
    def from_geometry(cls, geo: GeometryConfig) -> DerivedGeometry:
        k_r = geo.w / (2.0 * geo.r)
        k_s = min(geo.w / (2.0 * geo.s), 1.0)
        return cls(k_r, k_s, 2.0 * math.asin(k_r), 2.0 * math.asin(k_s))


@dataclass(frozen=True)
class ModelParams:
    """Blocker intensity (per square meter) and per-blocker power ratio."""

    rho: float
    zeta: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho >= 0):
            raise DomainError(f"intensity rho must be finite and >= 0, got {self.rho}")
        if not (0.0 < self.zeta <= 1.0):
            raise DomainError(f"zeta must be a linear power ratio in (0, 1], got {self.zeta}")

    @classmethod
    def from_db(cls, rho: float, zeta_db: float) -> ModelParams:
        if zeta_db > 0:
            raise DomainError(f"zeta_db must be <= 0 dB, got {zeta_db}")
        return cls(rho=rho, zeta=db_to_linear(zeta_db))

    @property
    def zeta_db(self) -> float:
        return linear_to_db(self.zeta)

    def rho_bar(self, r: float) -> float:
        """Mean blocker count in the communication circle, ``rho * pi * r**2``."""
        return self.rho * math.pi * r * r


@dataclass(frozen=True)
class PolarLocation:
    d: float
    omega: float

    def subtended_angle(self, geo: GeometryConfig) -> float:
        return subtended_angle(self.d, geo)


@dataclass(frozen=True)
class CoverCount:
    n: int
    m: int

    def __post_init__(self):
        if not (0 <= self.n <= self.m):
            raise DomainError(f"need 0 <= n <= m, got n={self.n}, m={self.m}")

    def attenuation(self, zeta: float) -> float:
        return zeta**self.n


def db_to_linear(value_db):
    if np.ndim(value_db):
        return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value):
    if np.ndim(value):
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(np.asarray(value, dtype=float))
    return 10.0 * math.log10(value) if value > 0 else -math.inf


def distance_cdf(d, geo: GeometryConfig):
    """CDF of a blocker's distance from the receiver, uniform over the annulus area."""
    d_arr = np.asarray(d, dtype=float)
    if np.any((d_arr < geo.s) | (d_arr > geo.r)) or np.any(np.isnan(d_arr)):
        raise DomainError(f"distance must lie in [s, r] = [{geo.s}, {geo.r}]")
    out = (d_arr * d_arr - geo.s * geo.s) / (geo.r * geo.r - geo.s * geo.s)
    return float(out) if out.ndim == 0 else out


def sample_distance(u, geo: GeometryConfig):
    """Inverse of :func:`distance_cdf`; maps uniform variates in [0, 1] to distances."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr < 0.0) | (u_arr > 1.0)) or np.any(np.isnan(u_arr)):
        raise DomainError("uniform variate must lie in [0, 1]")
    s2 = geo.s * geo.s
    out = np.sqrt(s2 + u_arr * (geo.r * geo.r - s2))
    # pin the endpoints; sqrt(s*s) need not round-trip to s
    out = np.where(u_arr == 0.0, geo.s, np.where(u_arr == 1.0, geo.r, out))
    return float(out) if out.ndim == 0 else out


def blocker_count_pmf(m: int, params: ModelParams, geo: GeometryConfig) -> float:
    """Poisson probability of exactly ``m`` blockers in the communication circle."""
    if m < 0 or int(m) != m:
        raise DomainError(f"blocker count must be a nonnegative integer, got {m}")
    lam = params.rho_bar(geo.r)
    if lam == 0.0:
        return 1.0 if m == 0 else 0.0
    return math.exp(m * math.log(lam) - lam - math.lgamma(m + 1))


def subtended_angle(d, geo: GeometryConfig):
    """Angular width ``2 asin(w / 2d)`` of a blocker at distance ``d``."""
    d_arr = np.asarray(d, dtype=float)
    ratio = geo.w / (2.0 * d_arr)
    if np.any(ratio > 1.0) or np.any(d_arr <= 0):
        raise DomainError(f"distance must be at least w/2 = {geo.w / 2.0}")
    out = 2.0 * np.arcsin(ratio)
    return float(out) if out.ndim == 0 else out


def angle_pdf(eps, geo: GeometryConfig, *, strict: bool = True):
    """Density of the subtended angle of a uniformly placed blocker.

    With ``strict=False`` points outside ``[eps_min, eps_max]`` evaluate to 0,
    which is what quadrature routines want.
    """
    dg = geo.derived
    e = np.asarray(eps, dtype=float)
    inside = (e >= dg.eps_min) & (e <= dg.eps_max)
    if strict and not np.all(inside):
        raise DomainError(
            f"angle outside support [{dg.eps_min}, {dg.eps_max}]"
        )
    half = np.where(inside, e, dg.eps_max) / 2.0
    scale = geo.w * geo.w / (4.0 * (geo.r * geo.r - geo.s * geo.s))
    out = np.where(inside, scale * np.cos(half) / np.sin(half) ** 3, 0.0)
    return float(out) if out.ndim == 0 else out


def single_cover_prob_given_eps(eps: float) -> float:
    """Chance that a blocker of angular width ``eps`` at a uniform azimuth covers a fixed direction."""
    if not (0.0 <= eps <= TWO_PI):
        raise DomainError(f"angle must lie in [0, 2*pi], got {eps}")
    return eps / TWO_PI


def _cover_bracket(k: float) -> float:
    # antiderivative term 2*asin(k)/k^2 + 2*sqrt(1/k^2 - 1)
    return 2.0 * math.asin(k) / (k * k) + 2.0 * math.sqrt(max(1.0 / (k * k) - 1.0, 0.0))


def cover_prob(geo: GeometryConfig) -> float:
    """Probability that one blocker, uniform on the annulus, covers a fixed direction."""
    dg = geo.derived
    scale = geo.w * geo.w / (8.0 * math.pi * (geo.r * geo.r - geo.s * geo.s))
    return scale * (_cover_bracket(dg.k_r) - _cover_bracket(dg.k_s))


def cover_count_pmf(n: int, m: int, geo: GeometryConfig, g: float | None = None) -> float:
    """Binomial law of the number of covers among ``m`` blockers.

    ``g`` overrides the per-blocker cover probability, mostly for testing.
    """
    if n < 0 or m < 0 or n > m:
        raise DomainError(f"need 0 <= n <= m, got n={n}, m={m}")
    if g is None:
        g = cover_prob(geo)
    return float(special.comb(m, n, exact=True) * g**n * (1.0 - g) ** (m - n))


def expected_attenuation_paper(params: ModelParams, geo: GeometryConfig) -> float:
    """Closed-form mean power ratio after the Poisson-limit and Taylor steps.

    ``exp(-rho_bar * (1 - exp(-g * (1 - zeta))))``
    """
    g = cover_prob(geo)
    rho_bar = params.rho_bar(geo.r)
    return math.exp(-rho_bar * -math.expm1(-g * (1.0 - params.zeta)))


def expected_attenuation_exact(params: ModelParams, geo: GeometryConfig) -> float:
    """Mean power ratio without approximation.

    Covers are an independent thinning of the blocker process, so the cover
    count is Poisson with mean ``rho_bar * g`` and ``E[zeta**N]`` is its
    probability generating function at ``zeta``.
    """
    g = cover_prob(geo)
    return math.exp(-params.rho_bar(geo.r) * g * (1.0 - params.zeta))


def outage_min_covers(zeta: float, threshold_db: float) -> int | None:
    """Smallest cover count whose total loss falls strictly below ``threshold_db``.

    Returns None when no count reaches it (transparent blockers).
    """
    if threshold_db > 0:
        raise DomainError(f"threshold must be <= 0 dB, got {threshold_db}")
    loss_db = linear_to_db(zeta)
    if loss_db >= 0.0:
        return None
    # n * loss_db < threshold_db  <=>  n > threshold_db / loss_db
    return math.floor(threshold_db / loss_db) + 1


def outage_probability(params: ModelParams, geo: GeometryConfig, threshold_db: float) -> float:
    """Probability that blockage loss along the link drops below ``threshold_db``.

    Uses the exact Poisson law of the cover count.
    """
    k = outage_min_covers(params.zeta, threshold_db)
    if k is None:
        return 0.0
    mean = params.rho_bar(geo.r) * cover_prob(geo)
    if mean == 0.0:
        return 0.0
    # Pr{N >= k} = P(k, mean), the regularized lower incomplete gamma
    return float(special.gammainc(k, mean)) if k > 0 else 1.0
