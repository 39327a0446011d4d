"""
From a process back to a material
=================================

A process with independent increments (Gaussian part plus finite jumps) defines
a matrix material f_ij(t) = Y0 Y0^T + t Sigma + sum (1 - exp(-t|y|^2)) y y^T / |y|^2.
The same f is recovered as an average over simulated paths.
"""

# %%
import numpy as np

from viscolevy import (
    PaisCharacteristics,
    estimate_material_from_paths,
    material_from_characteristics,
    simulate_pais_paths,
)

c = PaisCharacteristics(
    start=[0.5, -0.5],
    sigma=[[1.0, 0.3], [0.3, 0.5]],
    jump_atoms=[([1.0, 0.5], 1.5), ([-0.5, 1.0], 0.7)],
)
grid = np.linspace(0.1, 1.0, 4)
closed = material_from_characteristics(c).evaluate(grid)

# %%
paths = simulate_pais_paths(c, 20000, seed=5, workers=4)
for mode in ("quadratic_variation", "terminal"):
    mean, se = estimate_material_from_paths(paths, grid, gaussian_term=mode)
    print(mode, "max |z| =", float(np.max(np.abs(mean - closed) / np.where(se > 0, se, 1))))

# %%
print(closed[-1])
print(mean[-1])
