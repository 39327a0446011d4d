"""
Creep / relaxation duality.

With ``h(theta) = laplace_fprime(m, theta)``, the relaxation function ``r``
satisfies ``r_hat(theta) = 1 / (theta h(theta))`` and the conjugate material
(whose impulse response is the primitive of ``r``) has Stieltjes transform

    h_conj(theta) = 1 / (theta h(theta)).

For a Prony material, ``theta h(theta)`` is increasing on each interval
between consecutive poles ``-lambda_i``, so its zeros (the conjugate rates)
are bracketed by the original rates and are found by bisection. Residues are
``1 / g'(-mu)`` with ``g(theta) = theta h(theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .bernstein import (
    Analytic,
    BernsteinRep,
    LevyMeasure,
    Material,
    Stable,
    canonicalize,
    eval_impulse,
)
from .errors import (
    InvalidParameterError,
    InversionDivergenceError,
    SingularPencilError,
    UnsupportedRepresentationError,
    ZeroMaterialError,
)
from .numerics import TimeGrid, convolve_grid, inverse_laplace, isolate_real_roots

if TYPE_CHECKING:
    from .network import MatrixMaterial

__all__ = [
    "StieltjesRep",
    "RelaxationRep",
    "RelaxationCurve",
    "MatrixRelaxationCurve",
    "stieltjes_of",
    "conjugate_exact",
    "conjugate_stable",
    "conjugate",
    "relaxation_rep",
    "relaxation_curve_numeric",
    "instantaneous_modulus",
    "verify_conjugation",
    "matrix_relaxation_numeric",
    "interlaces",
]


@dataclass(frozen=True)
class StieltjesRep:
    """``h(theta) = a + mu_at_zero/theta + sum mass/(theta + location)``."""

    a: float
    mu_at_zero: float
    mu_atoms: tuple = ()

    def __call__(self, theta):
        theta = np.asarray(theta)
        out = float(self.a) + float(self.mu_at_zero) / theta
        for loc, mass in self.mu_atoms:
            out = out + float(mass) / (theta + float(loc))
        return out


@dataclass(frozen=True)
class RelaxationRep:
    """``r(t) = alpha + beta delta_0 + sum_j rho_j exp(-x_j t)``.

    ``rho`` holds ``(rate x_j, mass rho_j)`` pairs.
    """

    alpha: float
    beta: float
    rho: tuple = ()

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or any(m < 0 for _, m in self.rho):
            raise InvalidParameterError("relaxation masses must be nonnegative")

    def evaluate(self, t):
        """Regular part of ``r`` (the delta mass is excluded); ``t = 0`` gives ``r(0+)``."""
        t = np.asarray(t, dtype=float)
        out = float(self.alpha) + 0.0 * t
        for x, mass in self.rho:
            out = out + float(mass) * np.exp(-float(x) * t)
        return out

    def primitive(self, t):
        """``int_0^t`` of the regular part."""
        t = np.asarray(t, dtype=float)
        out = float(self.alpha) * t
        for x, mass in self.rho:
            out = out - float(mass) * np.expm1(-float(x) * t) / float(x)
        return out


@dataclass(frozen=True)
class RelaxationCurve:
    times: np.ndarray
    values: np.ndarray
    beta: float


@dataclass(frozen=True)
class MatrixRelaxationCurve:
    times: np.ndarray
    values: np.ndarray  # (count, m, m)
    beta: np.ndarray  # (m, m)


def _analytic_rep(m) -> BernsteinRep:
    if isinstance(m, Analytic):
        return m.rep
    if isinstance(m, BernsteinRep):
        return m
    raise UnsupportedRepresentationError(
        f"{type(m).__name__} has no exact conjugate; use relaxation_curve_numeric"
    )


def stieltjes_of(m) -> StieltjesRep:
    """The pair ``(L, K delta_0 + x nu)`` representing ``laplace_fprime`` of a Prony material."""
    rep = canonicalize(_analytic_rep(m))
    if not rep.atoms_only:
        raise UnsupportedRepresentationError("stable components have no atomic Stieltjes pair")
    atoms = tuple((rate, weight * rate) for rate, weight in rep.levy.atoms)
    return StieltjesRep(rep.constant_L, rep.drift_K, atoms)


def _conjugate_parts(rep: BernsteinRep):
    """Return ``(L2, K2, rates, masses, weights)`` of ``1/(theta h(theta))``.

    ``masses`` are the Stieltjes masses at ``-rates``; ``weights`` the
    conjugate Prony weights ``masses/rates``. Parameters keep their numeric type
    (e.g. ``Fraction``) wherever no root finding is involved.
    """
    rep = canonicalize(rep)
    if rep.is_zero:
        raise ZeroMaterialError("the zero material has no conjugate")
    if not rep.atoms_only:
        raise UnsupportedRepresentationError("exact conjugation needs a Prony (atoms-only) material")
    L, K = rep.constant_L, rep.drift_K
    atoms = rep.levy.atoms
    if not atoms:
        if K == 0:
            return 0, 1 / L, (), (), ()
        if L == 0:
            return 1 / K, 0, (), (), ()
        return 0, 0, (K / L,), (1 / L,), (1 / K,)

    L2 = 0 if L > 0 else 1 / (K + sum(w * r for r, w in atoms))
    K2 = 1 / (L + sum(w for _, w in atoms)) if K == 0 else 0

    lam = np.array([float(r) for r, _ in atoms])
    c = np.array([float(w * r) for r, w in atoms])
    Lf, Kf = float(L), float(K)

    def g_neg(mu):
        # theta h(theta) at theta = -mu; decreasing in mu between poles
        return -Lf * mu + Kf - float(np.sum(c * mu / (lam - mu)))

    brackets = []
    if K > 0:
        brackets.append((0.0, lam[0]))
    brackets.extend(zip(lam[:-1], lam[1:]))
    if L > 0:
        brackets.append((lam[-1], math.inf))
    roots = isolate_real_roots(g_neg, brackets)
    masses = 1.0 / (Lf + np.sum(c * lam / (lam[None, :] - roots[:, None]) ** 2, axis=1))
    return L2, K2, tuple(roots.tolist()), tuple(masses.tolist()), tuple((masses / roots).tolist())


def conjugate_exact(m: Material) -> Analytic:
    """Conjugate of a Prony material: ``f1 * f2 = t^2/2``. Involutive."""
    L2, K2, rates, _, weights = _conjugate_parts(_analytic_rep(m))
    atoms = tuple(zip(rates, weights))
    return Analytic(canonicalize(BernsteinRep(L2, K2, LevyMeasure(atoms))))


def conjugate_stable(m: Material) -> Analytic:
    """``c t^a/Gamma(1+a)`` is conjugate to ``(1/c) t^(1-a)/Gamma(2-a)``."""
    rep = _analytic_rep(m)
    if not rep.pure_stable:
        raise UnsupportedRepresentationError("conjugate_stable needs a pure stable material")
    alpha, scale = rep.levy.stable
    return Analytic(BernsteinRep(0, 0, LevyMeasure((), Stable(1 - alpha, 1 / scale))))


def conjugate(m: Material) -> Analytic:
    """Exact conjugate for Prony or pure-stable materials."""
    rep = _analytic_rep(m)
    if rep.pure_stable:
        return conjugate_stable(m)
    return conjugate_exact(m)


def relaxation_rep(m: Material) -> RelaxationRep:
    """``(alpha, beta, rho)`` of the relaxation function of a Prony material."""
    L2, K2, rates, masses, _ = _conjugate_parts(_analytic_rep(m))
    rho = tuple(sorted(zip(rates, masses)))
    return RelaxationRep(K2, L2, rho)


def instantaneous_modulus(m: Material) -> float:
    """Mass ``beta`` of ``delta_0`` in ``r``: ``1/f'(0+)`` when ``f(0+) = 0``, else 0."""
    if m._f0() > 0:
        return 0.0
    slope = m._slope(0.0)
    if slope == 0:
        raise ZeroMaterialError("f(0+) = f'(0+) = 0: relaxation is too singular at 0")
    return 0.0 if math.isinf(slope) else 1.0 / slope


def _relaxation_hat(m: Material, beta: float):
    def F(theta):
        return 1.0 / (theta * m._laplace(theta)) - beta

    return F


def _initial_relaxation(m: Material) -> float:
    f0 = m._f0()
    if f0 > 0:
        return 1.0 / f0
    if math.isinf(m._slope(0.0)):
        return math.inf
    raise InvalidParameterError("r(0+) is not available numerically when f(0+) = 0; use t > 0")


def relaxation_curve_numeric(m: Material, grid: TimeGrid) -> RelaxationCurve:
    """Sample ``r(t)`` on ``grid`` by inverting ``1/(theta h(theta)) - beta``.

    The delta mass ``beta`` is returned separately. Raises
    :class:`InversionDivergenceError` if Talbot and Gaver-Stehfest disagree.
    """
    t = grid.times
    beta = instantaneous_modulus(m)
    values = np.empty_like(t)
    pos = t > 0
    if not np.all(pos):
        values[~pos] = _initial_relaxation(m)
    res = inverse_laplace(_relaxation_hat(m, beta), t[pos], offset=beta)
    if not res.all_agree:
        bad = t[pos][~res.agree]
        raise InversionDivergenceError(f"relaxation inversion disagrees at t={bad[:5]}")
    values[pos] = res.value
    return RelaxationCurve(t, values, beta)


def verify_conjugation(m1: Material, m2: Material, grid: TimeGrid) -> float:
    """``max |(f1 * f2)(t) - t^2/2|`` over ``grid`` (trapezoid convolution)."""
    t = grid.times
    conv = convolve_grid(eval_impulse(m1, t), eval_impulse(m2, t), grid)
    return float(np.max(np.abs(conv - 0.5 * t**2)))


def interlaces(rates, conjugate_rates, drift) -> bool:
    """Strict interlacing of relaxation rates.

    With ``drift > 0`` the conjugate rates start first,
    ``mu_1 < lambda_1 < mu_2 < ...``; with zero drift the conjugate has a
    drift of its own and ``lambda_1 < mu_1 < lambda_2 < ...``.
    """
    lam = sorted(float(r) for r in rates)
    mu = sorted(float(r) for r in conjugate_rates)
    first, second = (mu, lam) if drift > 0 else (lam, mu)
    merged = []
    for i in range(max(len(first), len(second))):
        if i < len(first):
            merged.append(first[i])
        if i < len(second):
            merged.append(second[i])
    if not (len(first) - len(second) in (0, 1)):
        return False
    return all(a < b for a, b in zip(merged, merged[1:]))


def _beta_matrix(M: "MatrixMaterial") -> np.ndarray:
    K = M.const_K
    C = M.drift_L + sum((rate * J for rate, J in M.spectral_atoms), np.zeros((M.dim, M.dim)))
    w, V = np.linalg.eigh(K)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(w))))
    V0 = V[:, w <= tol]
    if V0.shape[1] == 0:
        return np.zeros((M.dim, M.dim))
    C00 = V0.T @ C @ V0
    if np.linalg.cond(C00) > 1e13:
        raise SingularPencilError("instantaneous relaxation is unbounded in some direction")
    return V0 @ np.linalg.solve(C00, V0.T)


def matrix_relaxation_numeric(M: "MatrixMaterial", grid: TimeGrid) -> MatrixRelaxationCurve:
    """Entrywise relaxation curves ``r_ij(t)`` of a matrix material.

    The Laplace-domain matrix ``theta h(theta)`` is inverted at every contour
    node; ill-conditioned nodes raise :class:`SingularPencilError`.
    """
    t = grid.times
    if np.any(t <= 0):
        raise InvalidParameterError("matrix relaxation curves need t > 0")
    beta = _beta_matrix(M)

    def F(theta):
        H = theta[..., None, None] * M.laplace_fprime(theta)
        cond = np.linalg.cond(H)
        if np.any(~np.isfinite(cond)) or np.any(cond > 1e13):
            idx = np.unravel_index(np.argmax(np.where(np.isfinite(cond), cond, np.inf)), cond.shape)
            raise SingularPencilError(f"theta*h(theta) singular at theta={theta[idx]}")
        return np.linalg.inv(H) - beta

    res = inverse_laplace(F, t, offset=float(np.max(np.abs(beta))))
    if not res.all_agree:
        bad = t[~np.all(res.agree, axis=(-2, -1))]
        raise InversionDivergenceError(f"matrix relaxation inversion disagrees at t={bad[:5]}")
    values = 0.5 * (res.value + np.swapaxes(res.value, -1, -2))
    return MatrixRelaxationCurve(t, values, beta)
