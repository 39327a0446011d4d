"""
Material constructors, rheological combination and response to load histories.

Parameter conventions follow the classical dictionary:

* ``spring(a)``            f = 1/a                 (stiffness a)
* ``dashpot(a)``           f = a t                 (conjugate of spring(a); a = 1/viscosity)
* ``maxwell(G, eta)``      f = 1/G + t/eta
* ``kelvin_voigt(a, b)``   f = (1/a)(1 - exp(-(a/b) t))   (stiffness a, viscosity b)
* ``stable_material(alpha, c)``  f = c t^alpha / (alpha Gamma(alpha))

``dashpot(viscosity=eta)`` is shorthand for ``dashpot(1/eta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bernstein import (
    Analytic,
    BernsteinRep,
    LevyMeasure,
    Material,
    ParallelCombination,
    SeriesCombination,
    Stable,
    canonicalize,
    eval_impulse,
)
from .conjugation import conjugate, instantaneous_modulus, relaxation_curve_numeric
from .errors import (
    InvalidParameterError,
    InversionDivergenceError,
    UnsupportedRepresentationError,
    ZeroMaterialError,
)
from .numerics import TimeGrid, inverse_laplace

__all__ = [
    "spring",
    "dashpot",
    "maxwell",
    "kelvin_voigt",
    "stable_material",
    "prony",
    "series",
    "parallel",
    "LoadHistory",
    "RelaxationResponse",
    "respond_creep",
    "respond_relaxation",
]


def _positive(name, value):
    if isinstance(value, bool) or not value > 0 or not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be a finite positive number, got {value!r}")


def spring(a) -> Analytic:
    _positive("stiffness", a)
    return Analytic(BernsteinRep(1 / a, 0))


def dashpot(a=None, *, viscosity=None) -> Analytic:
    if (a is None) == (viscosity is None):
        raise InvalidParameterError("give exactly one of a (fluidity) or viscosity")
    if viscosity is not None:
        _positive("viscosity", viscosity)
        a = 1 / viscosity
    _positive("fluidity", a)
    return Analytic(BernsteinRep(0, a))


def maxwell(G, eta) -> Analytic:
    _positive("G", G)
    _positive("eta", eta)
    return Analytic(BernsteinRep(1 / G, 1 / eta))


def kelvin_voigt(a, b) -> Analytic:
    _positive("a", a)
    _positive("b", b)
    return Analytic(BernsteinRep(0, 0, LevyMeasure(((a / b, 1 / a),))))


def stable_material(alpha, c=1.0) -> Analytic:
    _positive("c", c)
    if not 0 < alpha < 1:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha!r}")
    return Analytic(BernsteinRep(0, 0, LevyMeasure((), Stable(alpha, c))))


def prony(L=0, K=0, atoms=(), stable=None) -> Analytic:
    """General analytic material ``L + K t + sum w (1 - exp(-rate t))`` (+ stable part)."""
    rep = canonicalize(BernsteinRep(L, K, LevyMeasure(tuple(atoms), stable)))
    if rep.is_zero:
        raise ZeroMaterialError("prony with no compliance at all is the zero material")
    return Analytic(rep)


# -- combination ---------------------------------------------------------------


def _check_nonzero(*ms):
    for m in ms:
        if not isinstance(m, Material):
            raise InvalidParameterError(f"expected a Material, got {type(m).__name__}")
        if isinstance(m, Analytic) and m.rep.is_zero:
            raise ZeroMaterialError("the zero material cannot be combined")


def _flatten(cls, ms):
    parts = []
    for m in ms:
        parts.extend(m.parts if isinstance(m, cls) else (m,))
    return tuple(parts)


def _sum_reps(a: BernsteinRep, b: BernsteinRep) -> BernsteinRep | None:
    sa, sb = a.levy.stable, b.levy.stable
    if sa is not None and sb is not None:
        if sa.alpha != sb.alpha:
            return None
        stable = Stable(sa.alpha, sa.scale + sb.scale)
    else:
        stable = sa if sa is not None else sb
    atoms = a.levy.atoms + b.levy.atoms
    return canonicalize(
        BernsteinRep(a.constant_L + b.constant_L, a.drift_K + b.drift_K, LevyMeasure(atoms, stable))
    )


def series(m1: Material, m2: Material) -> Material:
    """Impulse responses add. Analytic inputs give an analytic result when the
    stable parts (if any) share an index; otherwise a :class:`SeriesCombination`."""
    _check_nonzero(m1, m2)
    if isinstance(m1, Analytic) and isinstance(m2, Analytic):
        rep = _sum_reps(m1.rep, m2.rep)
        if rep is not None:
            return Analytic(rep)
    return SeriesCombination(_flatten(SeriesCombination, (m1, m2)))


def parallel(m1: Material, m2: Material) -> Material:
    """Relaxation functions add.

    Exact when both inputs and the series of their conjugates are conjugable
    (Prony or pure stable): ``conj(series(conj m1, conj m2))``. Otherwise a
    :class:`ParallelCombination`, evaluated by numeric inversion.
    """
    _check_nonzero(m1, m2)
    try:
        dual = series(conjugate(m1), conjugate(m2))
        return conjugate(dual)
    except UnsupportedRepresentationError:
        return ParallelCombination(_flatten(ParallelCombination, (m1, m2)))


# -- load histories --------------------------------------------------------------


@dataclass(frozen=True)
class LoadHistory:
    """Piecewise load: jumps at given times plus constant-rate ramps.

    ``steps`` holds ``(time, jump)`` and ``ramps`` holds ``(start, end, rate)``;
    the load increases by ``rate`` per unit time on ``[start, end)``.
    """

    steps: tuple = ()
    ramps: tuple = ()

    def __post_init__(self):
        steps = tuple(sorted((float(t), float(j)) for t, j in self.steps))
        ramps = tuple(sorted((float(s), float(e), float(r)) for s, e, r in self.ramps))
        for t, j in steps:
            if not (t >= 0 and math.isfinite(t) and math.isfinite(j)):
                raise InvalidParameterError(f"bad step ({t}, {j})")
        for s, e, r in ramps:
            if not (s >= 0 and e > s and math.isfinite(e) and math.isfinite(r)):
                raise InvalidParameterError(f"bad ramp ({s}, {e}, {r})")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "ramps", ramps)

    @classmethod
    def unit_step(cls, at: float = 0.0) -> "LoadHistory":
        return cls(steps=((at, 1.0),))

    def value(self, t):
        """Load level ``Q(t)`` (right-continuous)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for s, j in self.steps:
            out = out + j * (t >= s)
        for s, e, r in self.ramps:
            out = out + r * np.clip(t - s, 0.0, e - s)
        return out

    def scaled(self, c: float) -> "LoadHistory":
        return LoadHistory(
            tuple((t, c * j) for t, j in self.steps), tuple((s, e, c * r) for s, e, r in self.ramps)
        )

    def __add__(self, other: "LoadHistory") -> "LoadHistory":
        return LoadHistory(self.steps + other.steps, self.ramps + other.ramps)

    @classmethod
    def from_samples(cls, times, values) -> "LoadHistory":
        """Step at the first sample, then linear ramps between samples."""
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        rates = np.diff(values) / np.diff(times)
        ramps = tuple(
            (a, b, r) for a, b, r in zip(times[:-1], times[1:], rates) if r != 0
        )
        steps = ((times[0], values[0]),) if values[0] != 0 else ()
        return cls(steps, ramps)


def _superpose(load: LoadHistory, t, kernel, primitive, kernel_at_zero=None, shape=()):
    """``sum jump*kernel(t - t_k) + sum rate*int kernel`` over the active windows."""
    out = np.zeros(t.shape + shape)
    for tk, jump in load.steps:
        u = t - tk
        active = u > 0
        if np.any(active):
            out[active] += jump * kernel(u[active])
        at = u == 0
        if np.any(at):
            out[at] += jump * (kernel(u[at]) if kernel_at_zero is None else kernel_at_zero)
    for a, b, rate in load.ramps:
        active = t > a
        if np.any(active):
            ta = t[active]
            lo = ta - np.minimum(ta, b)
            out[active] += rate * (primitive(ta - a) - primitive(lo))
    return out


def respond_creep(m: Material, load: LoadHistory, grid: TimeGrid) -> np.ndarray:
    """Deformation ``q(t) = int_[0,t] f(t - tau) dQ(tau)`` sampled on ``grid``.

    Ramps use the primitive of ``f`` (closed form for analytic materials,
    adaptive quadrature otherwise).
    """
    t = grid.times
    return _superpose(load, t, lambda u: eval_impulse(m, u), m._primitive)


@dataclass(frozen=True)
class RelaxationResponse:
    """Force history; ``impulses`` lists ``(time, mass)`` delta spikes kept off the grid."""

    times: np.ndarray
    values: np.ndarray
    impulses: tuple
    beta: float


class _RelaxationKernel:
    def __init__(self, m: Material, method: str):
        exact = None
        if method in ("auto", "exact"):
            try:
                exact = conjugate(m)
            except UnsupportedRepresentationError:
                if method == "exact":
                    raise
        if exact is not None:
            self.beta = float(exact.L)
            self.r = lambda u: exact.rep.derivative(u)
            self.r0 = exact._slope(0.0)
            self.R = lambda u: np.where(u > 0, exact.rep.evaluate(u) - self.beta, 0.0)
            return
        self.beta = instantaneous_modulus(m)
        beta = self.beta

        def rhat(theta):
            return 1.0 / (theta * m._laplace(theta)) - beta

        self.r = lambda u: self._invert(rhat, u, beta)
        self.R = lambda u: self._invert(lambda th: rhat(th) / th, u, beta)
        self.r0 = None
        self._m = m

    @staticmethod
    def _invert(F, u, offset):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        pos = u > 0
        if np.any(pos):
            res = inverse_laplace(F, u[pos], offset=offset)
            if not res.all_agree:
                raise InversionDivergenceError("relaxation kernel inversion disagrees")
            out[pos] = res.value
        return out

    def at_zero(self):
        if self.r0 is None:
            grid = TimeGrid(0.0, 1.0, 2)
            self.r0 = float(relaxation_curve_numeric(self._m, grid).values[0])
        return self.r0


def respond_relaxation(
    m: Material, strain: LoadHistory, grid: TimeGrid, method: str = "auto"
) -> RelaxationResponse:
    """Force ``Q(t) = int_[0,t] r(t - tau) dq(tau)`` for a strain history.

    The ``beta delta_0`` part of ``r`` contributes ``beta * jump`` spikes at
    strain steps (returned in ``impulses``) and ``beta * rate`` inside ramps
    (included in ``values``). ``method`` is ``"exact"`` (conjugation),
    ``"numeric"`` (Laplace inversion) or ``"auto"``.
    """
    if method not in ("auto", "exact", "numeric"):
        raise InvalidParameterError(f"unknown method {method!r}")
    kern = _RelaxationKernel(m, method)
    t = grid.times
    needs_zero = any(np.any(t == tk) for tk, _ in strain.steps)
    values = _superpose(
        strain, t, kern.r, kern.R, kernel_at_zero=kern.at_zero() if needs_zero else None
    )
    impulses = ()
    if kern.beta > 0:
        impulses = tuple((tk, kern.beta * jump) for tk, jump in strain.steps)
        for a, b, rate in strain.ramps:
            values = values + kern.beta * rate * ((t >= a) & (t < b))
    return RelaxationResponse(t, values, impulses, kern.beta)
