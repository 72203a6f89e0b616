"""
Monte Carlo against the closed forms
====================================

Drop Poisson blocker fields, count the ones covering the link direction and
compare the empirical mean power ratio with both analytic expressions.
"""

from mmblockage import GeometryConfig, ModelParams, expected_attenuation_exact, expected_attenuation_paper
from mmblockage.sim import chunk_rng, count_covers, estimate_attenuation, sample_field

geo = GeometryConfig(r=10.0)
params = ModelParams.from_db(0.1, -20.0)

# One realization, to see what a field looks like.
field = sample_field(params, geo, chunk_rng(seed=1, chunk=0))
cover = count_covers(field, phi=0.0)
print(f"{cover.m} blockers dropped, {cover.n} cover the link -> {cover.n * -params.zeta_db:.0f} dB of loss")

# 10^5 trials.  The seed and chunk size fix the result exactly.
est = estimate_attenuation(params, geo, trials=100_000, seed=42, chunk_size=5_000)
print(f"simulated   {est.mean:.5f}  (95% CI {est.ci95_low:.5f} .. {est.ci95_high:.5f})")
print(f"exact       {expected_attenuation_exact(params, geo):.5f}")
print(f"approximate {expected_attenuation_paper(params, geo):.5f}")

# Same answer with four threads.
again = estimate_attenuation(params, geo, trials=100_000, seed=42, chunk_size=5_000, workers=4)
print("identical with 4 workers:", again == est)
