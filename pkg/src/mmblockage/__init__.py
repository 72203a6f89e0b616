"""Poisson blockage model for open-area mm-wave device-to-device links."""

from .core import (
    CoverCount,
    DegenerateGeometryError,
    DerivedGeometry,
    DomainError,
    GeometryConfig,
    ModelParams,
    PolarLocation,
    angle_pdf,
    blocker_count_pmf,
    cover_count_pmf,
    cover_prob,
    db_to_linear,
    distance_cdf,
    expected_attenuation_exact,
    expected_attenuation_paper,
    linear_to_db,
    outage_probability,
    sample_distance,
    single_cover_prob_given_eps,
    subtended_angle,
)

__version__ = "0.1.0"
