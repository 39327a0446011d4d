"""
Numeric kernels
===============

Trapezoid convolution on a uniform grid, and numeric inverse Laplace
transforms by a fixed Talbot contour checked against Gaver-Stehfest.
"""

# %%
import numpy as np

from viscolevy.numerics import TimeGrid, convergence_order, convolve_grid, inverse_laplace

# %% Second-order convergence of the convolution of exp(-t) and exp(-2t)
errs = []
for h in (0.02, 0.01, 0.005):
    g = TimeGrid.covering(2.0, h)
    t = g.times
    errs.append(np.max(np.abs(convolve_grid(np.exp(-t), np.exp(-2 * t), g) - (np.exp(-t) - np.exp(-2 * t)))))
print("errors", errs, "orders", convergence_order(errs))

# %% Inversion with the cross-check flag
t = np.array([0.1, 1.0, 5.0])
res = inverse_laplace(lambda s: s**-0.5, t)
print(res.value, 1 / np.sqrt(np.pi * t), res.all_agree)
