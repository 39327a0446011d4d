"""
Materials as Bernstein functions
================================

A linear viscoelastic material is described by its impulse response f(t):
the deformation history after a unit force impulse. The admissible f are
exactly the Bernstein functions L + K t + sum w (1 - exp(-rate t)).
"""

# %%
import numpy as np

from viscolevy import (
    bernstein_check,
    compose,
    dashpot,
    eval_impulse,
    kelvin_voigt,
    laplace_fprime,
    maxwell,
    series,
    spring,
    stable_material,
)

t = np.linspace(0, 5, 6)

# %% The dictionary of elementary materials
for name, m in [
    ("spring(2)", spring(2)),
    ("dashpot(0.5)", dashpot(0.5)),
    ("maxwell(2, 4)", maxwell(2, 4)),
    ("kelvin_voigt(1, 1)", kelvin_voigt(1, 1)),
    ("stable(1/2)", stable_material(0.5)),
]:
    print(f"{name:20s}", np.round(eval_impulse(m, t), 4))

# %% Series combination adds impulse responses; a spring and a dashpot in series are Maxwell
m = series(spring(2), dashpot(viscosity=4))
print(m == maxwell(2, 4), m)

# %% Composition outer(inner(t)) is again admissible
power = compose(stable_material(0.5), stable_material(0.5))
print("f(1) =", eval_impulse(power, 1.0))
print("Bernstein sign check on [0, 10]:", bernstein_check(power).passed)

# %% The Laplace side: theta * f_hat(theta) is a Stieltjes function
for th in (0.5, 1.0, 2.0):
    print(th, laplace_fprime(kelvin_voigt(1, 1), th), laplace_fprime(stable_material(0.5), th))
