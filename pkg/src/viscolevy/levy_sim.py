"""
Subordinators and finite-activity Levy processes behind scalar and matrix materials.

A scalar material ``f = L + K t + sum w (1 - exp(-x t)) + stable`` is the
subordinator started at ``L`` with drift ``K``, Poisson jumps of size ``x``
at intensity ``w`` and a one-sided stable component. Its Laplace exponent is
``phi(lam) = f(lam) - L``, so ``E exp(-lam (X_tau - X_0)) = exp(-tau phi(lam))``.

In the other direction, a Levy process ``Y`` in R^m with start ``Y0``,
Gaussian covariance ``Sigma`` and finitely many jump atoms defines the
matrix material

    f_ij(t) = Y0_i Y0_j + t Sigma_ij + sum_atoms intensity (1 - exp(-t |y|^2)) y_i y_j / |y|^2

which is also the expectation of a path functional over ``[0, 1]`` that
:func:`estimate_material_from_paths` averages.

Every path draws from its own stream ``SeedSequence(seed, spawn_key=(i,))``,
so results do not depend on how paths are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from .bernstein import Analytic, BernsteinRep, LevyMeasure, Material
from .errors import InvalidParameterError, MissingJumpRecordError, UnsupportedRepresentationError
from .network import MatrixMaterial, _merge_atoms

__all__ = [
    "SubordinatorSpec",
    "PaisCharacteristics",
    "Path",
    "MCResult",
    "path_rng",
    "subordinator_from_material",
    "material_from_subordinator",
    "laplace_exponent",
    "sample_one_sided_stable",
    "sample_path",
    "sample_increment",
    "mc_laplace_check",
    "material_from_characteristics",
    "sample_pais_path",
    "simulate_pais_paths",
    "estimate_material_from_paths",
    "mean_and_stderr",
]


def path_rng(seed: int, path_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(path_index),)))


@dataclass(frozen=True)
class SubordinatorSpec:
    """Start ``X_0``, drift and Levy measure of a subordinator."""

    start: float = 0.0
    drift: float = 0.0
    levy: LevyMeasure = LevyMeasure()

    def __post_init__(self):
        BernsteinRep(self.start, self.drift, self.levy)  # validates


def subordinator_from_material(m: Material) -> SubordinatorSpec:
    if not isinstance(m, Analytic):
        raise UnsupportedRepresentationError("only analytic materials map to a subordinator")
    return SubordinatorSpec(m.rep.constant_L, m.rep.drift_K, m.rep.levy)


def material_from_subordinator(s: SubordinatorSpec) -> Analytic:
    return Analytic(BernsteinRep(s.start, s.drift, s.levy))


def laplace_exponent(s: SubordinatorSpec, lam):
    """``phi(lam) = drift lam + sum w (1 - exp(-lam x)) + c lam^alpha / Gamma(1 + alpha)``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise InvalidParameterError("the Laplace exponent needs lam >= 0")
    out = float(s.drift) * lam
    for x, w in s.levy.atoms:
        out = out + float(w) * -np.expm1(-lam * float(x))
    if s.levy.stable is not None:
        a, c = s.levy.stable
        out = out + c * lam**a / gamma(1 + a)
    return out


def sample_one_sided_stable(alpha: float, size, rng: np.random.Generator) -> np.ndarray:
    """Draws with ``E exp(-lam S) = exp(-lam^alpha)`` (totally skewed, ``0 < alpha < 1``).

    Chambers-Mallows-Stuck in Kanter's form for the positive case.
    """
    if not 0 < alpha < 1:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha!r}")
    u = rng.uniform(0.0, math.pi, size)
    e = rng.standard_exponential(size)
    a = alpha
    return (np.sin(a * u) / np.sin(u) ** (1 / a)) * (np.sin((1 - a) * u) / e) ** ((1 - a) / a)


def _stable_factor(stable, dt):
    a, c = stable
    return (dt * c / gamma(1 + a)) ** (1 / a)


def _poisson_times(rng, rate, horizon):
    """Event times of a rate-``rate`` Poisson process on ``(0, horizon]``."""
    if rate == 0:
        return np.zeros(0)
    mean = rate * horizon
    chunk = int(mean + 5 * math.sqrt(mean) + 10)
    times = np.cumsum(rng.standard_exponential(chunk)) / rate
    while times[-1] <= horizon:
        more = times[-1] + np.cumsum(rng.standard_exponential(chunk)) / rate
        times = np.concatenate([times, more])
    return times[times <= horizon]


@dataclass(frozen=True, eq=False)
class Path:
    """Sampled right-continuous path.

    ``values`` has one row per time (a scalar or a vector). ``jumps`` lists
    ``(time, size)`` for every recorded jump and is ``None`` when unknown.
    ``gaussian_terminal`` and ``quadratic_variation`` describe the Gaussian part
    at the horizon (zero for subordinators).
    """

    times: np.ndarray
    values: np.ndarray
    jumps: tuple | None
    gaussian_terminal: np.ndarray | float = 0.0
    quadratic_variation: np.ndarray | float = 0.0

    @property
    def jump_times(self) -> np.ndarray:
        return np.array([t for t, _ in self.jumps or ()])

    def value_at(self, t):
        idx = np.searchsorted(self.times, np.asarray(t, dtype=float), side="right") - 1
        if np.any(idx < 0):
            raise InvalidParameterError("time before the path starts")
        return self.values[idx]


def _merged_times(horizon, grid_count, jump_times):
    grid = np.linspace(0.0, horizon, grid_count + 1)
    times = np.union1d(grid, jump_times)
    return times


def sample_path(
    s: SubordinatorSpec, horizon: float, seed: int, path_index: int = 0, stable_steps: int = 256
) -> Path:
    """Subordinator path on ``[0, horizon]``.

    Atom jumps are generated exactly from exponential inter-arrival times.
    The stable part, if any, is sampled exactly in law at ``stable_steps``
    equal increments; those increments are not listed as jumps.
    """
    if not horizon > 0:
        raise InvalidParameterError("horizon must be positive")
    rng = path_rng(seed, path_index)
    events = []
    for x, w in s.levy.atoms:
        for t in _poisson_times(rng, float(w), horizon):
            events.append((float(t), float(x)))
    events.sort()
    jt = np.array([t for t, _ in events])
    steps = stable_steps if s.levy.stable is not None else 1
    times = _merged_times(horizon, steps, jt)
    values = float(s.start) + float(s.drift) * times
    if events:
        sizes = np.array([x for _, x in events])
        idx = np.searchsorted(times, jt)
        bumps = np.zeros(len(times))
        np.add.at(bumps, idx, sizes)
        values = values + np.cumsum(bumps)
    if s.levy.stable is not None:
        dt = horizon / steps
        incr = _stable_factor(s.levy.stable, dt) * sample_one_sided_stable(
            s.levy.stable.alpha, steps, rng
        )
        levels = np.concatenate([[0.0], np.cumsum(incr)])
        k = np.minimum(np.floor(times / dt + 1e-9).astype(int), steps)
        values = values + levels[k]
    return Path(times, values, tuple(events))


def sample_increment(s: SubordinatorSpec, tau: float, rng: np.random.Generator) -> float:
    """One draw of ``X_tau - X_0`` from its exact law."""
    out = float(s.drift) * tau
    for x, w in s.levy.atoms:
        out += float(x) * rng.poisson(float(w) * tau)
    if s.levy.stable is not None:
        out += _stable_factor(s.levy.stable, tau) * float(
            sample_one_sided_stable(s.levy.stable.alpha, 1, rng)[0]
        )
    return out


def mean_and_stderr(samples, axis=0):
    """Mean and standard error, shifted by the first sample so constant input is exact."""
    x = np.asarray(samples, dtype=float)
    n = x.shape[axis]
    if n < 2:
        raise InvalidParameterError("need at least two samples")
    x = np.moveaxis(x, axis, 0)
    shift = x[0]
    d = x - shift
    mean_d = np.apply_along_axis(math.fsum, 0, d) / n if d.ndim > 1 else math.fsum(d) / n
    var = np.apply_along_axis(math.fsum, 0, (d - mean_d) ** 2) if d.ndim > 1 else math.fsum((d - mean_d) ** 2)
    return shift + mean_d, np.sqrt(var / (n - 1) / n)


def _parallel_map(fn, n, workers):
    """``[fn(i) for i in range(n)]`` over contiguous chunks; order is preserved."""
    if workers <= 1:
        return [fn(i) for i in range(n)]
    bounds = np.linspace(0, n, workers + 1).astype(int)
    chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(workers) as pool:
        parts = list(pool.map(lambda r: [fn(i) for i in r], chunks))
    return [v for part in parts for v in part]


@dataclass(frozen=True)
class MCResult:
    estimate: float
    stderr: float
    analytic: float


def mc_laplace_check(
    s: SubordinatorSpec, lam: float, tau: float, n_paths: int, seed: int, workers: int = 1
) -> MCResult:
    """Monte Carlo ``E exp(-lam (X_tau - X_0))`` against ``exp(-tau phi(lam))``."""
    if lam < 0:
        raise InvalidParameterError("lam must be >= 0")
    if n_paths < 100:
        raise InvalidParameterError("use at least 100 paths")
    if not tau > 0:
        raise InvalidParameterError("tau must be positive")
    draws = _parallel_map(
        lambda i: math.exp(-lam * sample_increment(s, tau, path_rng(seed, i))), n_paths, workers
    )
    est, se = mean_and_stderr(draws)
    return MCResult(float(est), float(se), math.exp(-tau * float(laplace_exponent(s, lam))))


@dataclass(frozen=True, eq=False)
class PaisCharacteristics:
    """Start ``Y0``, Gaussian covariance ``Sigma`` and jump atoms ``(y, intensity)``.

    A general process also has a drift, which the material map ignores and
    the simulator does not generate.
    """

    start: np.ndarray
    sigma: np.ndarray
    jump_atoms: tuple = ()

    def __post_init__(self):
        y0 = np.atleast_1d(np.array(self.start, dtype=float))
        m = y0.shape[0]
        S = np.atleast_2d(np.array(self.sigma, dtype=float))
        if S.shape != (m, m):
            raise InvalidParameterError(f"sigma must be {m}x{m}")
        if np.max(np.abs(S - S.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(S))):
            raise InvalidParameterError("sigma is not symmetric")
        if np.linalg.eigvalsh(S).min() < -1e-10 * max(1.0, np.linalg.norm(S, 2)):
            raise InvalidParameterError("sigma is not positive semidefinite")
        atoms = []
        for y, intensity in self.jump_atoms:
            y = np.atleast_1d(np.array(y, dtype=float))
            if y.shape != (m,) or not np.any(y != 0) or not np.all(np.isfinite(y)):
                raise InvalidParameterError(f"jump point must be a nonzero vector of length {m}")
            if not (intensity > 0 and math.isfinite(intensity)):
                raise InvalidParameterError("jump intensity must be positive")
            y.setflags(write=False)
            atoms.append((y, float(intensity)))
        y0.setflags(write=False)
        S.setflags(write=False)
        object.__setattr__(self, "start", y0)
        object.__setattr__(self, "sigma", S)
        object.__setattr__(self, "jump_atoms", tuple(atoms))
        object.__setattr__(self, "_root", _sqrt_psd(S) if np.any(S != 0) else None)

    @property
    def dim(self) -> int:
        return self.start.shape[0]


def material_from_characteristics(c: PaisCharacteristics) -> MatrixMaterial:
    rates, Js = [], []
    for y, intensity in c.jump_atoms:
        r = float(y @ y)
        rates.append(r)
        Js.append(intensity * np.outer(y, y) / r)
    return MatrixMaterial(tuple(_merge_atoms(rates, Js)), c.sigma, np.outer(c.start, c.start))


def _sqrt_psd(S):
    w, V = np.linalg.eigh(S)
    return V * np.sqrt(np.clip(w, 0.0, None))


def sample_pais_path(
    c: PaisCharacteristics, horizon: float, n_gauss_steps: int, seed: int, path_index: int = 0
) -> Path:
    """Path of ``Y0 + W + compound Poisson`` on ``[0, horizon]``.

    ``W`` has covariance ``t Sigma`` and is sampled exactly at the union of
    ``n_gauss_steps`` equal steps and the jump times.
    """
    if not horizon > 0 or n_gauss_steps < 1:
        raise InvalidParameterError("need horizon > 0 and at least one Gaussian step")
    rng = path_rng(seed, path_index)
    m = c.dim
    events = []
    for y, intensity in c.jump_atoms:
        for t in _poisson_times(rng, intensity, horizon):
            events.append((float(t), y))
    events.sort(key=lambda e: e[0])
    jt = np.array([t for t, _ in events])
    times = _merged_times(horizon, n_gauss_steps, jt)
    values = np.tile(c.start, (len(times), 1))
    gaussian = np.zeros(m)
    root = c._root
    if root is not None:
        z = rng.standard_normal((len(times) - 1, m))
        incr = np.sqrt(np.diff(times))[:, None] * (z @ root.T)
        W = np.vstack([np.zeros(m), np.cumsum(incr, axis=0)])
        values = values + W
        gaussian = W[-1].copy()
    if events:
        bumps = np.zeros((len(times), m))
        np.add.at(bumps, np.searchsorted(times, jt), np.array([y for _, y in events]))
        values = values + np.cumsum(bumps, axis=0)
    return Path(
        times,
        values,
        tuple((t, y.copy()) for t, y in events),
        gaussian,
        horizon * np.array(c.sigma),
    )


def simulate_pais_paths(
    c: PaisCharacteristics, n_paths: int, seed: int, n_gauss_steps: int = 1, horizon: float = 1.0,
    workers: int = 1,
) -> list[Path]:
    return _parallel_map(
        lambda i: sample_pais_path(c, horizon, n_gauss_steps, seed, i), n_paths, workers
    )


_GAUSSIAN_TERMS = ("quadratic_variation", "terminal", "realized")


def _gaussian_bracket(p: Path, mode: str) -> np.ndarray:
    if mode == "quadratic_variation":
        return np.atleast_2d(p.quadratic_variation)
    if mode == "terminal":
        g = np.atleast_1d(p.gaussian_terminal)
        return np.outer(g, g)
    vals = np.asarray(p.values, dtype=float).reshape(len(p.times), -1)
    cont = vals.copy()
    for t, y in p.jumps:
        cont[p.times >= t] -= np.atleast_1d(y)
    d = np.diff(cont, axis=0)
    return d.T @ d


def estimate_material_from_paths(paths, times, gaussian_term: str = "quadratic_variation"):
    """Monte Carlo material from paths on ``[0, 1]``.

    Averages ``Y0 Y0^T + t [Y^c]_1 + sum_jumps (1 - exp(-t |dY|^2)) dY dY^T / |dY|^2``.
    ``gaussian_term`` picks the Gaussian bracket: the simulator's exact
    quadratic variation, the outer square of the terminal Gaussian value, or
    the realized variance of the sampled continuous part. Returns
    ``(mean, stderr)`` of shape ``(len(times),)`` for scalar paths and
    ``(len(times), m, m)`` otherwise.
    """
    if gaussian_term not in _GAUSSIAN_TERMS:
        raise InvalidParameterError(f"gaussian_term must be one of {_GAUSSIAN_TERMS}")
    t = np.asarray(times, dtype=float)
    if not paths:
        raise InvalidParameterError("no paths given")
    v0 = np.asarray(paths[0].values)
    scalar = v0.ndim == 1 or v0.shape[1] == 1
    samples = []
    for p in paths:
        if p.jumps is None:
            raise MissingJumpRecordError("path has no jump record")
        if abs(p.times[-1] - 1.0) > 1e-12 or p.times[0] != 0:
            raise InvalidParameterError("paths must cover exactly [0, 1]")
        y0 = np.atleast_1d(np.asarray(p.values[0], dtype=float))
        val = np.outer(y0, y0) + t[:, None, None] * _gaussian_bracket(p, gaussian_term)
        for _, y in p.jumps:
            y = np.atleast_1d(np.asarray(y, dtype=float))
            r = float(y @ y)
            val = val + (-np.expm1(-t * r))[:, None, None] * (np.outer(y, y) / r)
        samples.append(val)
    mean, se = mean_and_stderr(np.stack(samples))
    if scalar:
        return mean[:, 0, 0], se[:, 0, 0]
    return mean, se
