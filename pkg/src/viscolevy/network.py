"""
Finite networks of springs and dashpots.

A network with hidden and observed degrees of freedom ``q`` evolves as

    A q + B q' = Q

with stored energy ``q.A.q / 2`` and dissipation ``q'.B.q' / 2``. Under a
unit step of force the observed displacements give an impulse-response
matrix

    f(t) = K + t L + sum_k (1 - exp(-lambda_k t)) J_k

whose Laplace form is ``theta f_hat(theta) = (A + theta B)^-1`` restricted
to the observables. With ``B`` positive definite and ``psi_k`` a
B-orthonormal eigenbasis of the pencil, ``(A + theta B)^-1`` equals
``sum_k psi_k psi_k^T / (lambda_k + theta)``, so ``J_k = psi_k psi_k^T / lambda_k``
and zero eigenvalues feed the drift ``L``. A singular ``B`` is handled by
eliminating its kernel first; the eliminated block gives ``K``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .bernstein import Analytic, BernsteinRep, LevyMeasure
from .errors import (
    DegeneratePencilError,
    InvalidParameterError,
    SingularPencilError,
    StepSizeError,
)
from .materials import LoadHistory, _superpose
from .numerics import TimeGrid

__all__ = [
    "QuadraticFormPair",
    "MatrixMaterial",
    "EigenResult",
    "generalized_eigen",
    "material_from_quadratic_forms",
    "respond_creep_matrix",
    "verify_evolution",
]

SYM_TOL = 1e-12
PSD_TOL = 1e-10


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_psd(name, M, *, sym_tol=SYM_TOL, psd_tol=PSD_TOL):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidParameterError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidParameterError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if np.max(np.abs(M - M.T), initial=0.0) > sym_tol * scale:
        raise InvalidParameterError(f"{name} is not symmetric")
    if M.size and np.linalg.eigvalsh(M).min() < -psd_tol * np.linalg.norm(M, 2):
        raise InvalidParameterError(f"{name} is not positive semidefinite")


@dataclass(frozen=True, eq=False)
class QuadraticFormPair:
    """Stiffness ``A``, dissipation ``B`` and the observed coordinates."""

    A: np.ndarray
    B: np.ndarray
    observables: tuple = None

    def __post_init__(self):
        A, B = _frozen(self.A), _frozen(self.B)
        _check_psd("A", A)
        _check_psd("B", B)
        if A.shape != B.shape:
            raise InvalidParameterError(f"A and B differ in shape: {A.shape} vs {B.shape}")
        n = A.shape[0]
        obs = tuple(range(n)) if self.observables is None else tuple(int(i) for i in self.observables)
        if not obs or len(set(obs)) != len(obs) or not all(0 <= i < n for i in obs):
            raise InvalidParameterError(f"observables must be distinct indices in [0, {n})")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "observables", obs)

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True, eq=False)
class MatrixMaterial:
    """``f(t) = const_K + t drift_L + sum (1 - exp(-rate t)) J`` on ``dim`` observables."""

    spectral_atoms: tuple
    drift_L: np.ndarray
    const_K: np.ndarray

    def __post_init__(self):
        L, K = _frozen(self.drift_L), _frozen(self.const_K)
        _check_psd("drift_L", L, sym_tol=1e-9, psd_tol=1e-9)
        _check_psd("const_K", K, sym_tol=1e-9, psd_tol=1e-9)
        if L.shape != K.shape:
            raise InvalidParameterError("drift_L and const_K differ in shape")
        atoms = []
        for rate, J in self.spectral_atoms:
            J = _frozen(J)
            if not (np.isfinite(rate) and rate > 0):
                raise InvalidParameterError(f"spectral rate must be positive, got {rate!r}")
            if J.shape != L.shape:
                raise InvalidParameterError("spectral atom has the wrong shape")
            _check_psd("spectral atom", J, sym_tol=1e-9, psd_tol=1e-9)
            atoms.append((float(rate), J))
        object.__setattr__(self, "spectral_atoms", tuple(sorted(atoms, key=lambda a: a[0])))
        object.__setattr__(self, "drift_L", L)
        object.__setattr__(self, "const_K", K)

    @property
    def dim(self) -> int:
        return self.const_K.shape[0]

    @property
    def rates(self) -> np.ndarray:
        return np.array([r for r, _ in self.spectral_atoms])

    def _stack(self):
        if not self.spectral_atoms:
            return np.zeros(0), np.zeros((0, self.dim, self.dim))
        return self.rates, np.stack([J for _, J in self.spectral_atoms])

    def evaluate(self, t) -> np.ndarray:
        """``f(t)`` with shape ``t.shape + (dim, dim)``."""
        t = np.asarray(t, dtype=float)
        rates, Js = self._stack()
        tt = t[..., None, None]
        out = self.const_K + tt * self.drift_L
        decay = -np.expm1(-np.multiply.outer(t, rates))
        return out + np.tensordot(decay, Js, axes=(-1, 0))

    def primitive(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        rates, Js = self._stack()
        tt = t[..., None, None]
        out = tt * self.const_K + 0.5 * tt**2 * self.drift_L
        x = np.multiply.outer(t, rates)
        core = np.where(x < 1e-4, x**2 / 2 - x**3 / 6 + x**4 / 24, x + np.expm1(-x))
        return out + np.tensordot(core / np.where(rates > 0, rates, 1.0), Js, axes=(-1, 0))

    def laplace_fprime(self, theta) -> np.ndarray:
        """``theta f_hat(theta)``, complex-capable, shape ``theta.shape + (dim, dim)``."""
        theta = np.asarray(theta)
        rates, Js = self._stack()
        tt = theta[..., None, None]
        out = self.const_K + self.drift_L / tt
        coef = rates / (theta[..., None] + rates)
        return out + np.tensordot(coef, Js, axes=(-1, 0))

    def scalar(self) -> Analytic:
        """The ``dim == 1`` case as a scalar analytic material."""
        if self.dim != 1:
            raise InvalidParameterError("only a one-observable material reduces to a scalar")
        atoms = tuple((r, max(float(J[0, 0]), 0.0)) for r, J in self.spectral_atoms)
        rep = BernsteinRep(
            max(float(self.const_K[0, 0]), 0.0), max(float(self.drift_L[0, 0]), 0.0), LevyMeasure(atoms)
        )
        return Analytic(rep)


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray
    condition: float


def generalized_eigen(A, B) -> EigenResult:
    """Solve ``A psi = lambda B psi`` with ``B`` positive definite.

    Reduces to a standard symmetric problem by the Cholesky factor of ``B``;
    the returned columns are B-orthonormal. ``condition`` is the 2-norm
    condition number of ``B``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    wB = np.linalg.eigvalsh(B)
    if wB.size and wB.min() <= PSD_TOL * max(wB.max(), 0.0):
        raise DegeneratePencilError(
            "B is not positive definite; build the material with material_from_quadratic_forms, "
            "which eliminates ker(B)"
        )
    try:
        C = linalg.cholesky(B, lower=True)
    except linalg.LinAlgError as exc:
        raise DegeneratePencilError(str(exc)) from exc
    Ci_A = linalg.solve_triangular(C, A, lower=True)
    M = linalg.solve_triangular(C, Ci_A.T, lower=True)
    values, Y = np.linalg.eigh(0.5 * (M + M.T))
    vectors = linalg.solve_triangular(C.T, Y, lower=False)
    return EigenResult(values, vectors, float(wB.max() / wB.min()))


def _merge_atoms(rates, Js, rtol=1e-12):
    atoms = []
    for r, J in sorted(zip(rates, Js), key=lambda a: a[0]):
        if atoms and r - atoms[-1][0] <= rtol * r:
            atoms[-1] = (atoms[-1][0], atoms[-1][1] + J)
        else:
            atoms.append((r, J))
    return [(r, 0.5 * (J + J.T)) for r, J in atoms]


def material_from_quadratic_forms(p: QuadraticFormPair) -> MatrixMaterial:
    """Impulse-response matrix of the network on its observables."""
    A, B, obs = p.A, p.B, list(p.observables)
    n = p.n
    wB, VB = np.linalg.eigh(B)
    tol = PSD_TOL * float(np.max(np.abs(wB), initial=0.0))
    V0, V1 = VB[:, wB <= tol], VB[:, wB > tol]

    K_full = np.zeros((n, n))
    chi = np.eye(n)
    A_red, B_red = A, B
    if V0.shape[1]:
        A00 = V0.T @ A @ V0
        if np.linalg.cond(A00) > 1e12:
            raise SingularPencilError("A and B share a null direction: the pencil is not regular")
        A01 = V0.T @ A @ V1
        X = np.linalg.solve(A00, A01)
        chi = V1 - V0 @ X
        K_full = V0 @ np.linalg.solve(A00, V0.T)
        A_red = V1.T @ A @ V1 - A01.T @ X
        B_red = V1.T @ B @ V1

    drift = np.zeros((len(obs), len(obs)))
    rates, Js = [], []
    if chi.shape[1]:
        eig = generalized_eigen(0.5 * (A_red + A_red.T), 0.5 * (B_red + B_red.T))
        psi = chi @ eig.vectors
        zero = 1e-12 * np.linalg.norm(A, 2) / np.linalg.norm(B, 2)
        for lam, col in zip(eig.values, psi.T):
            v = col[obs]
            outer = np.outer(v, v)
            if lam <= zero:
                drift += outer
            else:
                rates.append(float(lam))
                Js.append(outer / lam)
    K = K_full[np.ix_(obs, obs)]
    return MatrixMaterial(
        tuple(_merge_atoms(rates, Js)), 0.5 * (drift + drift.T), 0.5 * (K + K.T)
    )


def _direction(dim, direction):
    if direction is None:
        if dim != 1:
            raise InvalidParameterError("give a load direction for a multi-observable material")
        return np.ones(1)
    d = np.asarray(direction, dtype=float)
    if d.shape != (dim,):
        raise InvalidParameterError(f"direction must have shape ({dim},)")
    return d


def respond_creep_matrix(
    M: MatrixMaterial, load: LoadHistory, grid: TimeGrid, direction=None
) -> np.ndarray:
    """Observed displacements ``(count, dim)`` under the force ``load(t) * direction``."""
    d = _direction(M.dim, direction)
    t = grid.times
    return _superpose(
        load, t, lambda u: M.evaluate(u) @ d, lambda u: M.primitive(u) @ d, shape=(M.dim,)
    )


def verify_evolution(
    p: QuadraticFormPair,
    M: MatrixMaterial,
    load: LoadHistory,
    grid: TimeGrid,
    direction=None,
    *,
    h_floor: float = 1e-9,
) -> float:
    """Max discrepancy between a time-stepped network and ``M``'s creep response.

    The network equation is stepped by implicit Euler on ``grid`` (which must
    start at 0) with the force applied on the observables; the comparison
    runs over ``t > 0``. Raises
    :class:`StepSizeError` when resolving the fastest mode would need a step
    below ``h_floor``.
    """
    if grid.start != 0:
        raise InvalidParameterError("evolution grids start at t = 0")
    eig = generalized_eigen(p.A, p.B)
    lam_max = float(np.max(eig.values, initial=0.0))
    if lam_max > 0 and 0.1 / lam_max < h_floor:
        raise StepSizeError(
            f"fastest rate {lam_max:.3g} needs steps below {h_floor:g}; "
            "eliminate the stiff coordinates instead"
        )
    obs = list(p.observables)
    d = _direction(len(obs), direction)
    force = np.zeros(p.n)
    force[obs] = d
    t = grid.times
    h = grid.step
    Q = load.value(t)
    lu = linalg.lu_factor(p.B + h * p.A)
    q = np.zeros(p.n)
    traj = np.empty((len(t), len(obs)))
    traj[0] = q[obs]
    for i in range(1, len(t)):
        q = linalg.lu_solve(lu, p.B @ q + h * Q[i] * force)
        traj[i] = q[obs]
    ref = respond_creep_matrix(M, load, grid, d)
    # the network starts at rest; an instantaneous jump in M only shows for t > 0
    return float(np.max(np.abs(traj[1:] - ref[1:]), initial=0.0))
