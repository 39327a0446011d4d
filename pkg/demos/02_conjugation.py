"""
Creep and relaxation: conjugate materials
=========================================

Two materials are conjugate when their impulse responses convolve to t^2/2.
The relaxation function of a material is the derivative of its conjugate's
impulse response. Exact conjugation inverts theta h(theta) by partial fractions.
"""

# %%
import numpy as np

from viscolevy import (
    conjugate,
    interlaces,
    kelvin_voigt,
    maxwell,
    parallel,
    prony,
    relaxation_curve_numeric,
    relaxation_rep,
    spring,
    stable_material,
    verify_conjugation,
)
from viscolevy.numerics import TimeGrid

# %% Dictionary pairs
print(conjugate(maxwell(2, 4)), "==", kelvin_voigt(0.25, 0.5))
print(conjugate(stable_material(0.3)))
print(conjugate(stable_material(0.5)) == stable_material(0.5), "(self-conjugate)")

# %% The defining identity, checked by trapezoid convolution
g = TimeGrid.covering(10.0, 1e-3)
print("residual", verify_conjugation(maxwell(1, 1), kelvin_voigt(1, 1), g))

# %% A three-mode Prony material and its relaxation function
m = prony(0.2, 0.5, [(1.0, 1.0), (3.0, 0.4), (9.0, 0.1)])
c = conjugate(m)
print("rates     ", m.levy.rates)
print("conj rates", c.levy.rates, "interlaced:", interlaces(m.levy.rates, c.levy.rates, m.K))
r = relaxation_rep(m)
grid = TimeGrid(0.1, 0.3, 8)
numeric = relaxation_curve_numeric(m, grid)
print(np.c_[grid.times, r.evaluate(grid.times), numeric.values])

# %% Parallel combination adds relaxation functions
p = parallel(spring(2), kelvin_voigt(1, 3))
print(p, relaxation_rep(p))

# %% Power-law relaxation: stable(1/2) relaxes like t^(-1/2)/sqrt(pi)
cur = relaxation_curve_numeric(stable_material(0.5), TimeGrid(0.5, 0.5, 4))
print(cur.values, 1 / np.sqrt(np.pi * cur.times))
