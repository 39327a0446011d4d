"""
Materials as subordinators
==========================

The fields (L, K, nu) of a material are the start, drift and Levy measure of
an increasing Levy process. Its Laplace exponent phi(lam) = f(lam) - L.
"""

# %%
import math

import numpy as np

from viscolevy import (
    kelvin_voigt,
    laplace_exponent,
    mc_laplace_check,
    prony,
    sample_path,
    stable_material,
    subordinator_from_material,
)

# %% Kelvin-Voigt is a Poisson process: jumps of size rate, at intensity weight
s = subordinator_from_material(kelvin_voigt(1, 2))
path = sample_path(s, horizon=10.0, seed=1)
print(len(path.jumps), "jumps; first few:", path.jumps[:3])

# %% A mixed material: constant start, drift and two jump sizes
m = prony(0.5, 0.2, [(1.0, 2.0), (4.0, 0.3)])
path = sample_path(subordinator_from_material(m), 5.0, seed=2)
print(np.c_[path.times[:6], path.values[:6]])

# %% Monte Carlo check of E exp(-lam (X_tau - X_0)) = exp(-tau phi(lam))
res = mc_laplace_check(subordinator_from_material(kelvin_voigt(1, 1)), 1.0, 1.0, 20000, seed=3, workers=4)
print(res, "z =", abs(res.estimate - res.analytic) / res.stderr)

# %% phi(lam) = sqrt(lam) for stable(1/2) with c = Gamma(3/2)
s = subordinator_from_material(stable_material(0.5, math.gamma(1.5)))
print(laplace_exponent(s, 4.0), mc_laplace_check(s, 4.0, 1.0, 20000, seed=4))
