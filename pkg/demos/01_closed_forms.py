"""
Closed-form blockage quantities
===============================

Walk through the analytic side of the model for a person holding a phone
in a crowd: blockers are 0.5 m wide cylinders, the receiver is 0.3 m wide,
and the link partner sits on the edge of a 10 m circle.
"""

import math

import numpy as np

from mmblockage import (
    GeometryConfig,
    ModelParams,
    angle_pdf,
    cover_prob,
    distance_cdf,
    expected_attenuation_exact,
    expected_attenuation_paper,
    linear_to_db,
    outage_probability,
    subtended_angle,
)

geo = GeometryConfig(r=10.0)
print(geo)
print("support of the subtended angle (deg):",
      [round(math.degrees(x), 3) for x in (geo.derived.eps_min, geo.derived.eps_max)])

# Blockers are uniform over the annulus area, so half of them sit beyond
# sqrt((r^2 + s^2) / 2), not at the midpoint of [s, r].
d_half = math.sqrt((geo.r**2 + geo.s**2) / 2)
print(f"median blocker distance {d_half:.3f} m, CDF there = {distance_cdf(d_half, geo):.3f}")

# A close blocker hides a wide wedge of sky; a far one only a sliver.
for d in (0.5, 1.0, 5.0, 10.0):
    print(f"d = {d:4.1f} m -> subtends {math.degrees(subtended_angle(d, geo)):6.2f} deg")

# Density of that angle.  Most mass is near the narrow end.
eps = np.linspace(geo.derived.eps_min, geo.derived.eps_max, 6)
print("angle pdf:", np.round(angle_pdf(eps, geo), 4))

# Chance that one blocker covers the link direction, for a few circle sizes.
for r in (5.0, 10.0, 20.0):
    print(f"r = {r:4.1f} m: g = {cover_prob(geo.with_radius(r)):.5f}")

# Expected attenuation at -20 dB per blocker, approximate and exact.
print("\n rho     approx(dB)  exact(dB)")
for rho in (0.01, 0.05, 0.1, 0.2, 0.5):
    params = ModelParams.from_db(rho, -20.0)
    print(f"{rho:5.2f}   {linear_to_db(expected_attenuation_paper(params, geo)):9.3f}"
          f"  {linear_to_db(expected_attenuation_exact(params, geo)):9.3f}")

# Probability that blockage alone costs more than 30 dB (two or more covers).
params = ModelParams.from_db(0.2, -20.0)
print(f"\nPr(loss worse than -30 dB) at rho=0.2: {outage_probability(params, geo, -30.0):.4f}")
