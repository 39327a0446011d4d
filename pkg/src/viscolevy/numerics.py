"""
Shared numeric kernels: uniform grids, trapezoid convolution, numeric Laplace
transforms and their inversion, and bisection on interlaced brackets.

Inversion uses the fixed Talbot contour (Abate & Valko, 2004) as the primary
method. Gaver-Stehfest on the real axis provides an independent cross-check;
the two are computed from disjoint sets of transform values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import GridMismatchError, InvalidParameterError, StructuralError

__all__ = [
    "TimeGrid",
    "convolve_grid",
    "talbot_nodes",
    "stehfest_nodes",
    "inverse_laplace",
    "InversionResult",
    "isolate_real_roots",
    "numeric_laplace",
    "laplace_along_ray",
    "convergence_order",
]

TALBOT_TERMS = 24
STEHFEST_ORDER = 14


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``start + k*step`` for ``k = 0..count-1``."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if not self.start >= 0:
            raise InvalidParameterError(f"grid start must be >= 0, got {self.start}")
        if not self.step > 0:
            raise InvalidParameterError(f"grid step must be > 0, got {self.step}")
        if int(self.count) != self.count or self.count < 2:
            raise InvalidParameterError(f"grid count must be an integer >= 2, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def parse(cls, text: str) -> "TimeGrid":
        """Parse ``"start:step:count"``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidParameterError(f"grid must be 'start:step:count', got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise InvalidParameterError(f"bad grid {text!r}: {exc}") from None

    @classmethod
    def covering(cls, stop: float, step: float, start: float = 0.0) -> "TimeGrid":
        """Grid from ``start`` to ``stop`` inclusive (``stop - start`` rounded to steps)."""
        return cls(start, step, int(round((stop - start) / step)) + 1)

    @property
    def times(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    def __str__(self):
        return f"{self.start:g}:{self.step:g}:{self.count}"


def convolve_grid(f_samples, g_samples, grid: TimeGrid) -> np.ndarray:
    """Trapezoid approximation of ``(f*g)(t) = int_0^t f(s) g(t-s) ds`` on ``grid``.

    Both inputs are sampled on the same grid, which must start at 0. Values at
    ``t = 0`` are taken as right limits. The result is exact for inputs that
    are polynomials of degree <= 1 and has O(h^2) error for C^2 integrands.
    """
    f = np.asarray(f_samples, dtype=float)
    g = np.asarray(g_samples, dtype=float)
    if grid.start != 0:
        raise GridMismatchError("convolution grids must start at t = 0")
    if f.shape != (grid.count,) or g.shape != (grid.count,):
        raise GridMismatchError(
            f"samples have shapes {f.shape} and {g.shape}, grid has {grid.count} points"
        )
    full = np.convolve(f, g)[: grid.count]
    out = grid.step * (full - 0.5 * f[0] * g - 0.5 * f * g[0])
    out[0] = 0.0
    return out


def convergence_order(errors: Sequence[float], ratio: float = 2.0) -> np.ndarray:
    """Observed orders ``log(e_k / e_{k+1}) / log(ratio)`` for successive refinements."""
    e = np.asarray(errors, dtype=float)
    return np.log(e[:-1] / e[1:]) / math.log(ratio)


# -- Laplace inversion ---------------------------------------------------------


def talbot_nodes(t, terms: int = TALBOT_TERMS):
    """Fixed-Talbot nodes and weights.

    Returns complex arrays ``(theta, weight)`` of shape ``t.shape + (terms,)``
    such that ``f(t) ~= Re(sum(weight * F(theta), axis=-1))``.
    """
    t = np.asarray(t, dtype=float)[..., None]
    r = 2.0 * terms / (5.0 * t)
    k = np.arange(1, terms)
    phi = k * np.pi / terms
    cot = 1.0 / np.tan(phi)
    sigma = phi + (phi * cot - 1.0) * cot
    theta_k = r * phi * (cot + 1j)
    w_k = np.exp(t * theta_k) * (1.0 + 1j * sigma) * (r / terms)
    theta0 = r + 0j
    w0 = 0.5 * np.exp(r * t) * (r / terms) + 0j
    theta = np.concatenate([theta0, theta_k], axis=-1)
    weight = np.concatenate([w0, w_k], axis=-1)
    return theta, weight


@lru_cache(maxsize=8)
def _stehfest_coefficients(order: int) -> np.ndarray:
    if order % 2:
        raise InvalidParameterError("Gaver-Stehfest order must be even")
    half = order // 2
    coeffs = []
    for k in range(1, order + 1):
        s = 0
        for j in range((k + 1) // 2, min(k, half) + 1):
            s += Fraction(
                j**half * math.factorial(2 * j),
                (
                    math.factorial(half - j)
                    * math.factorial(j)
                    * math.factorial(j - 1)
                    * math.factorial(k - j)
                    * math.factorial(2 * j - k)
                ),
            )
        coeffs.append((-1) ** (k + half) * s)
    return np.array([float(c) for c in coeffs])


def stehfest_nodes(t, order: int = STEHFEST_ORDER):
    """Gaver-Stehfest real nodes and weights, shaped like :func:`talbot_nodes`."""
    t = np.asarray(t, dtype=float)[..., None]
    a = math.log(2.0) / t
    theta = a * np.arange(1, order + 1)
    weight = a * _stehfest_coefficients(order)
    return theta, weight


@dataclass(frozen=True)
class InversionResult:
    value: np.ndarray
    cross_check: np.ndarray
    agree: np.ndarray

    @property
    def all_agree(self) -> bool:
        return bool(np.all(self.agree))


def inverse_laplace(
    F: Callable,
    t,
    *,
    method: str = "talbot",
    terms: int = TALBOT_TERMS,
    order: int = STEHFEST_ORDER,
    rtol: float = 1e-6,
    atol: float = 1e-3,
    offset: float = 0.0,
) -> InversionResult:
    """Invert the Laplace transform ``F`` at times ``t > 0``.

    ``F`` must accept complex ndarrays elementwise; it may append trailing
    axes (e.g. a matrix per node), which are carried into the result. ``method`` selects which of
    the two inversions is returned as ``value``; the other becomes
    ``cross_check``. A point agrees when

        |talbot - stehfest| <= rtol*|talbot| + atol*scale

    where ``scale = max |theta F(theta)|`` over the Stehfest nodes, plus the
    rounding level of the Stehfest sum itself. Pass ``offset`` when ``F`` is a
    difference with a constant of that size already subtracted, so the
    rounding of the subtraction is accounted for. The absolute
    term exists because order-14 Stehfest in double precision loses all
    relative accuracy on small tails (e.g. ``exp(-t)`` at ``t = 10``).
    """
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise InvalidParameterError("inverse Laplace needs t > 0")
    axis = t.ndim

    def apply(theta, weight, values):
        extra = values.ndim - theta.ndim
        return np.sum(weight.reshape(weight.shape + (1,) * extra) * values, axis=axis)

    th_t, w_t = talbot_nodes(t, terms)
    # transforms known only for Re(theta) > 0 overflow here; the flag catches it
    with np.errstate(over="ignore", invalid="ignore"):
        tal = np.real(apply(th_t, w_t, F(th_t)))
    th_s, w_s = stehfest_nodes(t, order)
    Fs = np.real(F(th_s + 0j))
    gs = apply(th_s, w_s, Fs)
    extra = Fs.ndim - th_s.ndim
    scaled = np.abs(th_s.reshape(th_s.shape + (1,) * extra) * Fs)
    scale = np.max(scaled, axis=tuple(range(axis, Fs.ndim)))
    scale = scale.reshape(scale.shape + (1,) * extra)
    # rounding level of the alternating Stehfest sum
    noise = 64 * np.finfo(float).eps * apply(th_s, np.abs(w_s), np.abs(Fs) + abs(offset))
    agree = np.abs(tal - gs) <= rtol * np.abs(tal) + atol * scale + noise
    if method == "talbot":
        return InversionResult(tal, gs, agree)
    if method == "stehfest":
        return InversionResult(gs, tal, agree)
    raise InvalidParameterError(f"unknown inversion method {method!r}")


# -- numeric Laplace transforms ------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


def numeric_laplace(samples, grid: TimeGrid, theta) -> np.ndarray:
    """Laplace transform of sampled data over ``[grid.start, grid.stop]``.

    The samples are interpolated by a cubic spline and each cell is integrated
    with 6-point Gauss-Legendre, so the result is accurate to the spline's
    O(h^4) for smooth data. The tail beyond the grid is dropped.
    """
    y = np.asarray(samples, dtype=float)
    if y.shape != (grid.count,):
        raise GridMismatchError("samples do not match grid")
    spline = CubicSpline(grid.times, y)
    left = grid.times[:-1]
    half = 0.5 * grid.step
    nodes = (left[:, None] + half * (_GL_X + 1.0)).ravel()
    weights = np.tile(half * _GL_W, grid.count - 1)
    vals = spline(nodes) * weights
    theta = np.asarray(theta)
    return np.exp(-np.multiply.outer(theta, nodes)) @ vals


def laplace_along_ray(func: Callable, theta: complex, *, epsabs=1e-13, epsrel=1e-11) -> complex:
    """``int_0^inf exp(-theta s) func(s) ds`` for complex ``theta``, ``theta != 0``.

    The integration path is rotated to ``s = rho * exp(i psi)`` so that
    ``Re(theta s) > 0`` along it; this continues the transform to
    ``|arg theta| < pi``. ``func`` must be holomorphic with at most polynomial
    growth in the open right half-plane (true for Bernstein functions and
    their compositions).
    """
    theta = complex(theta)
    phi = math.atan2(theta.imag, theta.real)
    psi = -math.copysign(min(abs(phi), 0.5 * math.pi - 0.05), phi)
    direction = complex(math.cos(psi), math.sin(psi))
    rate = (theta * direction).real
    if not rate > 0:
        raise InvalidParameterError(f"theta={theta} outside the continuation sector")
    mod = abs(theta)

    def integrand(u):
        s = direction * u / mod
        return complex(np.exp(-theta * s) * func(s))

    val, _ = integrate.quad(
        integrand, 0.0, np.inf, complex_func=True, epsabs=epsabs, epsrel=epsrel, limit=400
    )
    return val * direction / mod


# -- root isolation ------------------------------------------------------------


def _inward(x: float, toward: float, steps: int = 4) -> float:
    for _ in range(steps):
        x = float(np.nextafter(x, toward))
    return x


def _bisect(func, lo, hi, flo, rtol):
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi or hi - lo <= rtol * 1e-3 * max(abs(lo), abs(hi)):
            return mid
        fm = func(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid


def isolate_real_roots(
    func: Callable[[float], float],
    brackets: Sequence[tuple[float, float]],
    rtol: float = 1e-13,
) -> np.ndarray:
    """Locate one root of ``func`` inside each open bracket by bisection.

    Bracket endpoints may be poles of ``func``: it is evaluated a few ulps
    inside each end. An infinite upper end is expanded by doubling until the
    sign changes. Bisection continues to full double precision, well past the
    requested relative tolerance. A bracket without a sign change raises
    :class:`StructuralError`.
    """
    roots = []
    for lo, hi in brackets:
        lo = float(lo)
        hi = float(hi)
        if not lo < hi:
            raise StructuralError(f"empty bracket ({lo}, {hi})")
        a = _inward(lo, math.inf)
        flo = func(a)
        if math.isinf(hi):
            b = max(2.0 * abs(a), 1.0)
            fhi = func(b)
            for _ in range(2100):
                if (fhi > 0) != (flo > 0):
                    break
                a_next = b
                b *= 2.0
                fhi = func(b)
                # the root lies beyond the previous probe; keep the bracket tight
                a, flo = a_next, func(a_next)
            else:
                raise StructuralError(f"no sign change found above {lo}")
        else:
            b = _inward(hi, -math.inf)
            fhi = func(b)
        if flo == 0:
            roots.append(a)
            continue
        if fhi == 0:
            roots.append(b)
            continue
        if not (np.isfinite(flo) and np.isfinite(fhi)) or (flo > 0) == (fhi > 0):
            raise StructuralError(
                f"bracket ({lo}, {hi}) has no sign change (f={flo}, {fhi}); "
                "input is not a valid Stieltjes function"
            )
        roots.append(_bisect(func, a, b, flo, rtol))
    return np.sort(np.array(roots, dtype=float))
