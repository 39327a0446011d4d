"""
Spring-dashpot networks
=======================

A network with stiffness A and dissipation B obeys A q + B q' = Q. Its
impulse-response matrix on the observed coordinates follows from the
generalized eigenproblem A psi = lambda B psi.
"""

# %%
import numpy as np

from viscolevy import (
    LoadHistory,
    QuadraticFormPair,
    material_from_quadratic_forms,
    matrix_relaxation_numeric,
    verify_evolution,
)
from viscolevy.numerics import TimeGrid

# %% A standard linear solid: spring G1 in series with a Kelvin-Voigt cell (G2, eta).
# The first coordinate carries no dissipation, so B is singular and is deflated.
G1, G2, eta = 1.0, 2.0, 3.0
A = np.array([[G1, -G1], [-G1, G1 + G2]])
B = np.diag([0.0, eta])
M = material_from_quadratic_forms(QuadraticFormPair(A, B, (0,)))
print("const", M.const_K, "drift", M.drift_L, "atoms", M.spectral_atoms)
print(M.scalar())

# %% Two coupled observables
A = np.array([[3.0, -1.0], [-1.0, 2.0]])
B = np.array([[1.0, 0.2], [0.2, 0.5]])
p = QuadraticFormPair(A, B)
M = material_from_quadratic_forms(p)
print(M.evaluate(np.array([0.5, 5.0])))

# %% Time stepping the network reproduces the compiled material
g = TimeGrid.covering(2.0, 1e-4)
print("discrepancy", verify_evolution(p, M, LoadHistory.unit_step(), g, direction=[1.0, 0.0]))

# %% Relaxation matrix by inverting theta h(theta) on the Talbot contour.
# With B invertible there is no instantaneous compliance: r = A + B delta_0.
R = matrix_relaxation_numeric(M, TimeGrid(0.5, 0.5, 3))
print(R.values[0], R.beta)
