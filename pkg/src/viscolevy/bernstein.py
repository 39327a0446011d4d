"""
Scalar viscoelastic materials as Bernstein functions.

A material's impulse response (creep compliance) is

    f(t) = L + K t + sum_i w_i (1 - exp(-lambda_i t)) + c t**alpha / Gamma(1 + alpha)

with instantaneous compliance ``L``, fluidity ``K``, Prony atoms
``(lambda_i, w_i)`` and an optional one-sided stable part ``(alpha, c)``.
The stable part corresponds to the Levy density
``c * sin(pi alpha)/pi * x**(-1-alpha)``; with that constant the pure-stable
material ``c t**alpha / (alpha Gamma(alpha))`` has Stieltjes transform
``c theta**(-alpha)``.

Besides the analytic form, materials can be composed pointwise
(``outer(inner(t))``, closed in the Bernstein cone) and combined in series or
in parallel when no analytic form of the combination is available.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate
from scipy.special import gamma

from .errors import (
    InvalidParameterError,
    InversionDivergenceError,
    UnsupportedRepresentationError,
    ZeroMaterialError,
)
from .numerics import TimeGrid, inverse_laplace, laplace_along_ray

__all__ = [
    "Stable",
    "LevyMeasure",
    "BernsteinRep",
    "Material",
    "Analytic",
    "Composed",
    "SeriesCombination",
    "ParallelCombination",
    "eval_impulse",
    "eval_derivative",
    "laplace_fprime",
    "compose",
    "canonicalize",
    "bernstein_check",
    "BernsteinCheck",
]


class Stable(NamedTuple):
    """One-sided stable component: index ``alpha`` in (0, 1) and scale ``c > 0``."""

    alpha: float
    scale: float


def _check_real(name, value, *, positive=False):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise InvalidParameterError(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    if positive and not value > 0:
        raise InvalidParameterError(f"{name} must be > 0, got {value!r}")
    if not value >= 0:
        raise InvalidParameterError(f"{name} must be >= 0, got {value!r}")


@dataclass(frozen=True)
class LevyMeasure:
    """Finite atom list plus an optional one-sided stable component.

    Atoms are ``(rate, weight)`` pairs. Construction only validates; use
    :func:`canonicalize` to sort, merge duplicate rates and drop zero weights.
    """

    atoms: tuple = ()
    stable: Stable | None = None

    def __post_init__(self):
        atoms = tuple((r, w) for r, w in self.atoms)
        for rate, weight in atoms:
            _check_real("atom rate", rate, positive=True)
            _check_real("atom weight", weight)
        object.__setattr__(self, "atoms", atoms)
        if self.stable is not None:
            alpha, scale = self.stable
            _check_real("stable scale", scale, positive=True)
            if not 0 < alpha < 1:
                raise InvalidParameterError(f"stable alpha must lie in (0, 1), got {alpha!r}")
            object.__setattr__(self, "stable", Stable(alpha, scale))

    @property
    def rates(self) -> np.ndarray:
        return np.array([float(r) for r, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([float(w) for _, w in self.atoms], dtype=float)

    @property
    def atoms_only(self) -> bool:
        return self.stable is None

    @property
    def is_zero(self) -> bool:
        return self.stable is None and all(w == 0 for _, w in self.atoms)


@dataclass(frozen=True)
class BernsteinRep:
    """``(L, K, nu)`` triple of a scalar material (also a subordinator law)."""

    constant_L: numbers.Real = 0.0
    drift_K: numbers.Real = 0.0
    levy: LevyMeasure = field(default_factory=LevyMeasure)

    def __post_init__(self):
        _check_real("constant L", self.constant_L)
        _check_real("drift K", self.drift_K)
        if not isinstance(self.levy, LevyMeasure):
            raise InvalidParameterError("levy must be a LevyMeasure")

    @property
    def is_zero(self) -> bool:
        return self.constant_L == 0 and self.drift_K == 0 and self.levy.is_zero

    @property
    def atoms_only(self) -> bool:
        return self.levy.atoms_only

    @property
    def pure_stable(self) -> bool:
        return (
            self.levy.stable is not None
            and self.constant_L == 0
            and self.drift_K == 0
            and all(w == 0 for _, w in self.levy.atoms)
        )

    # The methods below accept real or complex ndarrays.

    def evaluate(self, z):
        z = np.asarray(z)
        out = float(self.constant_L) + float(self.drift_K) * z
        lv = self.levy
        if lv.atoms:
            out = out + np.sum(
                lv.weights * -np.expm1(-np.multiply.outer(z, lv.rates)), axis=-1
            )
        if lv.stable is not None:
            a, c = lv.stable
            out = out + c * z**a / gamma(1 + a)
        return out

    def derivative(self, t):
        t = np.asarray(t)
        out = float(self.drift_K) + 0.0 * t
        lv = self.levy
        if lv.atoms:
            out = out + np.sum(lv.weights * lv.rates * np.exp(-np.multiply.outer(t, lv.rates)), axis=-1)
        if lv.stable is not None:
            a, c = lv.stable
            with np.errstate(divide="ignore"):
                out = out + c * t ** (a - 1) / gamma(a)
        return out

    def primitive(self, t):
        """``int_0^t f(s) ds`` in closed form."""
        t = np.asarray(t, dtype=float)
        out = float(self.constant_L) * t + 0.5 * float(self.drift_K) * t**2
        lv = self.levy
        if lv.atoms:
            x = np.multiply.outer(t, lv.rates)
            # t - (1 - exp(-x))/rate, via a series where cancellation bites
            small = x < 1e-4
            core = np.where(small, x**2 / 2 - x**3 / 6 + x**4 / 24, x + np.expm1(-x))
            out = out + np.sum(lv.weights * core / lv.rates, axis=-1)
        if lv.stable is not None:
            a, c = lv.stable
            out = out + c * t ** (1 + a) / gamma(2 + a)
        return out

    def laplace_fprime(self, theta):
        theta = np.asarray(theta)
        out = float(self.constant_L) + float(self.drift_K) / theta
        lv = self.levy
        if lv.atoms:
            mass = lv.weights * lv.rates
            out = out + np.sum(mass / (theta[..., None] + lv.rates), axis=-1)
        if lv.stable is not None:
            a, c = lv.stable
            out = out + c * theta ** (-a)
        return out

    def initial_slope(self) -> float:
        if self.levy.stable is not None:
            return math.inf
        lv = self.levy
        return float(self.drift_K) + float(np.sum(lv.weights * lv.rates))


# -- materials -----------------------------------------------------------------


class Material:
    """A scalar material: anything with an evaluable Bernstein impulse response.

    Subclasses implement ``_f`` (vectorised, real or complex argument where
    possible), ``_laplace`` (the Stieltjes-form transform of ``f'``), ``_f0``
    (``f(0+)``) and ``_slope`` (``f'(x)``, ``x = 0`` meaning the right limit).
    """

    def __call__(self, t):
        return eval_impulse(self, t)

    def _f(self, z):
        raise NotImplementedError

    def _laplace(self, theta):
        raise NotImplementedError

    def _f0(self) -> float:
        return float(np.real(self._f(np.array(0.0))))

    def _slope(self, x: float) -> float:
        raise UnsupportedRepresentationError(f"no derivative available for {type(self).__name__}")

    def _primitive(self, t):
        """``int_0^t f``: adaptive quadrature between sorted evaluation points."""
        t = np.asarray(t, dtype=float)
        pts, inverse = np.unique(np.maximum(t, 0.0), return_inverse=True)
        f = lambda s: float(np.real(self._f(np.array(s))))
        pieces = np.zeros(len(pts))
        prev = 0.0
        for i, p in enumerate(pts):
            if p > prev:
                pieces[i] = integrate.quad(f, prev, p, epsabs=1e-13, epsrel=1e-11, limit=200)[0]
            prev = p
        return np.cumsum(pieces)[inverse].reshape(t.shape)


@dataclass(frozen=True)
class Analytic(Material):
    """Material with explicit ``(L, K, nu)``."""

    rep: BernsteinRep

    @property
    def L(self):
        return self.rep.constant_L

    @property
    def K(self):
        return self.rep.drift_K

    @property
    def levy(self) -> LevyMeasure:
        return self.rep.levy

    @property
    def atoms(self):
        return self.rep.levy.atoms

    @property
    def stable(self):
        return self.rep.levy.stable

    def _f(self, z):
        return self.rep.evaluate(z)

    def _laplace(self, theta):
        return self.rep.laplace_fprime(theta)

    def _f0(self):
        return float(self.rep.constant_L)

    def _slope(self, x):
        if x == 0:
            return self.rep.initial_slope()
        return float(self.rep.derivative(x))

    def _primitive(self, t):
        return self.rep.primitive(t)

    def __repr__(self):
        parts = [f"L={self.L!r}", f"K={self.K!r}"]
        if self.atoms:
            parts.append(f"atoms={list(self.atoms)!r}")
        if self.stable is not None:
            parts.append(f"stable={tuple(self.stable)!r}")
        return f"Analytic({', '.join(parts)})"


@dataclass(frozen=True)
class Composed(Material):
    """``t -> outer(inner(t))``; kept symbolic."""

    outer: Material
    inner: Material

    def _f(self, z):
        return self.outer._f(self.inner._f(z))

    def _laplace(self, theta):
        theta = np.asarray(theta)
        flat = theta.ravel()
        out = np.empty(flat.shape, dtype=complex)
        for i, th in enumerate(flat):
            out[i] = th * laplace_along_ray(self._f, th)
        if np.isrealobj(theta):
            return out.real.reshape(theta.shape)
        return out.reshape(theta.shape)

    def _slope(self, x):
        inner_slope = self.inner._slope(x)
        outer_slope = self.outer._slope(float(np.real(self.inner._f(np.array(x)))))
        if inner_slope == 0 or outer_slope == 0:
            return 0.0
        return outer_slope * inner_slope


@dataclass(frozen=True)
class SeriesCombination(Material):
    """Impulse responses add (used when the sum has no analytic form)."""

    parts: tuple

    def _f(self, z):
        return sum(p._f(z) for p in self.parts)

    def _laplace(self, theta):
        return sum(p._laplace(theta) for p in self.parts)

    def _slope(self, x):
        return sum(p._slope(x) for p in self.parts)

    def _primitive(self, t):
        return sum(p._primitive(t) for p in self.parts)


@dataclass(frozen=True)
class ParallelCombination(Material):
    """Relaxation functions add; evaluated by numeric Laplace inversion."""

    parts: tuple

    def _laplace(self, theta):
        return 1.0 / sum(1.0 / p._laplace(theta) for p in self.parts)

    def _f0(self):
        f0 = [p._f0() for p in self.parts]
        if any(v == 0 for v in f0):
            return 0.0
        return 1.0 / sum(1.0 / v for v in f0)

    def _invert(self, F, t):
        res = inverse_laplace(F, t)
        if not res.all_agree:
            bad = np.asarray(t)[~res.agree]
            raise InversionDivergenceError(f"parallel combination: inversion disagrees at t={bad[:3]}")
        return res.value

    def _f(self, z):
        z = np.asarray(z)
        if np.iscomplexobj(z):
            raise UnsupportedRepresentationError("parallel combinations are evaluable on t >= 0 only")
        out = np.full(z.shape, self._f0(), dtype=float)
        pos = z > 0
        if np.any(pos):
            out[pos] = self._invert(lambda th: self._laplace(th) / th, z[pos])
        return out

    def _primitive(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        pos = t > 0
        if np.any(pos):
            out[pos] = self._invert(lambda th: self._laplace(th) / th**2, t[pos])
        return out

    def _slope(self, x):
        if x == 0:
            if self._f0() > 0:
                return math.inf
            slopes = [p._slope(0.0) for p in self.parts]
            if any(s == 0 for s in slopes):
                return 0.0
            return 1.0 / sum(1.0 / s for s in slopes)
        f0 = self._f0()
        return float(self._invert(lambda th: self._laplace(th) - f0, np.array([x]))[0])


def _is_zero(m: Material) -> bool:
    if isinstance(m, Analytic):
        return m.rep.is_zero
    return False


# -- public operations ---------------------------------------------------------


def _as_time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise InvalidParameterError("time must be >= 0")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else np.asarray(arr, dtype=float)


def eval_impulse(m: Material, t):
    """Impulse response ``f(t)`` for scalar or array ``t >= 0``."""
    arr = _as_time(t)
    return _out(np.real(m._f(arr)), t)


def eval_derivative(m: Material, t):
    """``f'(t)`` for ``t > 0``; analytic materials only."""
    if not isinstance(m, Analytic):
        raise UnsupportedRepresentationError("eval_derivative needs an analytic representation")
    arr = _as_time(t)
    if np.any(arr == 0):
        raise InvalidParameterError("eval_derivative needs t > 0")
    return _out(m.rep.derivative(arr), t)


def laplace_fprime(m: Material, theta):
    """Laplace transform of the distributional derivative of ``f``.

    ``L + K/theta + sum w lambda/(theta + lambda) + c theta**(-alpha)`` for
    analytic materials. Complex ``theta`` with ``Re theta > 0`` (or on the
    inversion contour) is accepted; real input must be positive.
    """
    if _is_zero(m):
        raise ZeroMaterialError("the zero material has no Stieltjes transform")
    th = np.asarray(theta)
    if not np.iscomplexobj(th) and np.any(~(th > 0)):
        raise InvalidParameterError("laplace_fprime needs theta > 0")
    out = m._laplace(th)
    if np.ndim(theta) == 0:
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out


def compose(outer: Material, inner: Material) -> Composed:
    """Pointwise composition ``outer(inner(t))``; again a Bernstein function."""
    if _is_zero(outer) or _is_zero(inner):
        raise ZeroMaterialError("cannot compose with the zero material")
    return Composed(outer, inner)


def _canonical_rep(rep: BernsteinRep) -> BernsteinRep:
    merged: dict = {}
    for rate, weight in rep.levy.atoms:
        if weight == 0:
            continue
        merged[rate] = merged.get(rate, 0) + weight
    atoms = tuple(sorted(merged.items()))
    return BernsteinRep(rep.constant_L, rep.drift_K, LevyMeasure(atoms, rep.levy.stable))


def canonicalize(rep):
    """Sort atoms by rate, merge equal rates, drop zero weights. Idempotent.

    Accepts a :class:`BernsteinRep` or an :class:`Analytic` material and
    returns the same kind.
    """
    if isinstance(rep, Analytic):
        return Analytic(_canonical_rep(rep.rep))
    if isinstance(rep, BernsteinRep):
        return _canonical_rep(rep)
    raise UnsupportedRepresentationError(f"cannot canonicalize {type(rep).__name__}")


@dataclass(frozen=True)
class BernsteinCheck:
    nonnegative: bool
    nondecreasing: bool
    concave: bool
    worst_first: float
    worst_second: float

    @property
    def passed(self) -> bool:
        return self.nonnegative and self.nondecreasing and self.concave


def bernstein_check(m: Material, grid: TimeGrid | None = None) -> BernsteinCheck:
    """Sign checks of ``f``, its first and second forward differences on a grid.

    A rounding allowance of ``64 eps max|f|`` is granted to each difference.
    """
    grid = grid or TimeGrid(0.0, 0.01, 1001)
    f = eval_impulse(m, grid.times)
    tol = 64 * np.finfo(float).eps * max(np.max(np.abs(f)), 1.0)
    d1 = np.diff(f)
    d2 = np.diff(f, 2)
    return BernsteinCheck(
        nonnegative=bool(np.all(f >= -tol)),
        nondecreasing=bool(np.all(d1 >= -tol)),
        concave=bool(np.all(d2 <= tol)),
        worst_first=float(d1.min()),
        worst_second=float(d2.max()),
    )
