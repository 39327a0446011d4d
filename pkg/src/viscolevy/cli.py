"""Command-line entry point: ``viscolevy <command> ...``.

Exit status is 0 on success, 1 on bad input or a numeric failure and 2
when a verification ran but did not pass.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import specs
from .bernstein import bernstein_check, compose, eval_impulse
from .conjugation import conjugate, relaxation_curve_numeric, relaxation_rep, verify_conjugation
from .errors import UnsupportedRepresentationError, ViscoLevyError
from .levy_sim import (
    estimate_material_from_paths,
    material_from_characteristics,
    mc_laplace_check,
    sample_pais_path,
    sample_path,
    simulate_pais_paths,
    subordinator_from_material,
)
from .materials import parallel, respond_creep, respond_relaxation, series
from .network import material_from_quadratic_forms, verify_evolution
from .numerics import TimeGrid

EXIT_OK, EXIT_INPUT, EXIT_FAILED = 0, 1, 2


class _Fail(Exception):
    """Verification ran and did not pass."""


# -- output ------------------------------------------------------------------------


def _fmt(x) -> str:
    return repr(float(x))


def _write(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _upper(dim):
    return [(i, j) for i in range(dim) for j in range(i, dim)]


def _emit_curve(args, t, values, extra=None):
    values = np.asarray(values)
    if args.format == "json":
        doc = {"t": [float(x) for x in t]}
        if values.ndim == 1:
            doc["value"] = [float(v) for v in values]
        else:
            doc["value"] = values.tolist()
        doc.update(extra or {})
        _write(args, _json(doc))
        return
    if values.ndim == 1:
        _write(args, _csv(["t", "value"], zip(t, values)))
    else:
        idx = _upper(values.shape[-1])
        header = ["t"] + [f"f_{i + 1}{j + 1}" for i, j in idx]
        rows = ([tk] + [v[i, j] for i, j in idx] for tk, v in zip(t, values))
        _write(args, _csv(header, rows))


def _report(args, op, residual, tolerance, **extra):
    ok = bool(residual <= tolerance)
    _write(args, _json({"op": op, "residual": float(residual), "tolerance": float(tolerance), "pass": ok, **extra}))
    if not ok:
        raise _Fail()


# -- inputs ------------------------------------------------------------------------


def _grid(args) -> TimeGrid:
    try:
        return TimeGrid.parse(args.grid)
    except ViscoLevyError as exc:
        raise specs.SpecError(f"--grid: {exc}") from exc


def _material(path):
    return specs.parse_material(specs.load_document(path, "material"))


def _materials(args, count):
    if len(args.material) != count:
        raise specs.SpecError(f"{args.command} needs exactly {count} --material files")
    return [_material(p) for p in args.material]


def _emit_material(args, m):
    _write(args, _json(specs.material_to_spec(m)))


# -- commands ------------------------------------------------------------------------


def cmd_eval(args):
    (m,) = _materials(args, 1)
    g = _grid(args)
    _emit_curve(args, g.times, eval_impulse(m, g.times))


def cmd_conjugate(args):
    (m,) = _materials(args, 1)
    try:
        _emit_material(args, conjugate(m))
    except UnsupportedRepresentationError as exc:
        raise UnsupportedRepresentationError(f"{exc}; use `relax` for a sampled relaxation curve") from exc


def cmd_relax(args):
    (m,) = _materials(args, 1)
    g = _grid(args)
    try:
        rr = relaxation_rep(m)
    except UnsupportedRepresentationError:
        curve = relaxation_curve_numeric(m, g)
        _emit_curve(args, g.times, curve.values, {"beta": curve.beta})
        return
    _emit_curve(args, g.times, rr.evaluate(g.times), {"beta": float(rr.beta)})


def cmd_combine(args):
    if args.command == "compose":
        outer, inner = _materials(args, 2)
        _emit_material(args, compose(outer, inner))
        return
    if len(args.material) < 2:
        raise specs.SpecError(f"{args.command} needs at least two --material files")
    ms = [_material(p) for p in args.material]
    op = series if args.command == "series" else parallel
    out = ms[0]
    for m in ms[1:]:
        out = op(out, m)
    _emit_material(args, out)


def cmd_respond(args):
    (m,) = _materials(args, 1)
    load = specs.parse_load(specs.load_document(args.load, "load"))
    g = _grid(args)
    if args.mode == "creep":
        _emit_curve(args, g.times, respond_creep(m, load, g))
        return
    res = respond_relaxation(m, load, g)
    _emit_curve(args, g.times, res.values, {"beta": res.beta, "impulses": [list(i) for i in res.impulses]})


def cmd_network(args):
    p = specs.parse_network(specs.load_document(args.network, "network"))
    M = material_from_quadratic_forms(p)
    g = _grid(args)
    if args.format == "json" and args.atoms:
        _write(
            args,
            _json(
                {
                    "const_K": M.const_K.tolist(),
                    "drift_L": M.drift_L.tolist(),
                    "spectral_atoms": [{"rate": r, "J": J.tolist()} for r, J in M.spectral_atoms],
                }
            ),
        )
        return
    _emit_curve(args, g.times, M.evaluate(g.times))


def _path_rows(path):
    jt = set(path.jump_times.tolist())
    vals = np.asarray(path.values)
    for t, v in zip(path.times, vals):
        row = [t] + (list(v) if vals.ndim > 1 else [v])
        yield row + ["1" if t in jt else "0"]


def cmd_simulate(args):
    if bool(args.material) == bool(args.process):
        raise specs.SpecError("simulate needs exactly one of --material or --process")
    if args.process:
        c = specs.parse_pais(specs.load_document(args.process, "pais"))
        path = sample_pais_path(c, args.horizon, args.steps, args.seed, args.path_index)
        header = ["time"] + [f"value_{i + 1}" for i in range(c.dim)] + ["is_jump"]
    else:
        s = subordinator_from_material(_material(args.material[0]))
        path = sample_path(s, args.horizon, args.seed, args.path_index, args.steps)
        header = ["time", "value", "is_jump"]
    _write(args, _csv(header, _path_rows(path)))


def cmd_mc_check(args):
    (m,) = _materials(args, 1)
    res = mc_laplace_check(subordinator_from_material(m), args.lam, args.tau, args.paths, args.seed, args.workers)
    _report(
        args,
        "mc_laplace_check",
        abs(res.estimate - res.analytic),
        4 * res.stderr,
        estimate=res.estimate,
        stderr=res.stderr,
        analytic=res.analytic,
    )


def cmd_estimate(args):
    c = specs.parse_pais(specs.load_document(args.process, "pais"))
    g = _grid(args)
    paths = simulate_pais_paths(c, args.paths, args.seed, args.steps, workers=args.workers)
    mean, se = estimate_material_from_paths(paths, g.times, args.gaussian_term)
    ref = material_from_characteristics(c).evaluate(g.times)
    if mean.ndim == 1:
        ref = ref[:, 0, 0]
    _emit_curve(args, g.times, mean, {"stderr": se.tolist(), "closed_form": ref.tolist()})


def cmd_verify(args):
    g = _grid(args)
    if args.network:
        p = specs.parse_network(specs.load_document(args.network, "network"))
        load = specs.parse_load(specs.load_document(args.load, "load")) if args.load else None
        if load is None:
            raise specs.SpecError("verify --network needs --load")
        M = material_from_quadratic_forms(p)
        direction = None if M.dim == 1 else np.eye(M.dim)[0]
        res = verify_evolution(p, M, load, g, direction)
        _report(args, "verify_evolution", res, args.tolerance if args.tolerance is not None else 1e-4)
        return
    ms = [_material(p) for p in args.material]
    if len(ms) == 1 and args.bernstein:
        check = bernstein_check(ms[0], g)
        worst = max(0.0, -check.worst_first, check.worst_second)
        _report(args, "bernstein_check", 0.0 if check.passed else worst, 0.0, worst_violation=worst)
        return
    if len(ms) == 1:
        ms.append(conjugate(ms[0]))
    if len(ms) != 2:
        raise specs.SpecError("verify takes one material (paired with its conjugate) or two")
    res = verify_conjugation(ms[0], ms[1], g)
    _report(args, "verify_conjugation", res, args.tolerance if args.tolerance is not None else 1e-4)


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="viscolevy", description="Viscoelastic materials and Levy processes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, *, material=True, grid=False):
        p = sub.add_parser(name, help=help_, description=help_)
        if material:
            p.add_argument("--material", action="append", default=[], metavar="FILE", help="material JSON spec (repeatable)")
        if grid:
            p.add_argument("--grid", required=True, metavar="START:STEP:COUNT", help="uniform time grid")
        p.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=func)
        return p

    add("eval", cmd_eval, "sample the impulse response f(t)", grid=True)
    add("conjugate", cmd_conjugate, "exact conjugate material as a JSON spec")
    add("relax", cmd_relax, "relaxation function r(t), without its delta mass at 0", grid=True)
    add("series", cmd_combine, "series combination (impulse responses add)")
    add("parallel", cmd_combine, "parallel combination (relaxation functions add)")
    add("compose", cmd_combine, "composition outer(inner(t)); give --material twice, outer first")

    p = add("respond", cmd_respond, "response to a load history", grid=True)
    p.add_argument("--load", required=True, metavar="FILE", help="load JSON spec")
    p.add_argument("--mode", choices=("creep", "relaxation"), default="creep")

    p = add("network", cmd_network, "impulse-response matrix of a spring-dashpot network", material=False, grid=True)
    p.add_argument("--network", required=True, metavar="FILE")
    p.add_argument("--atoms", action="store_true", help="with --format json: print the spectral data instead")

    p = add("simulate", cmd_simulate, "sample one path (time,value,is_jump)")
    p.add_argument("--process", metavar="FILE", help="process JSON spec (instead of --material)")
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--path-index", type=int, default=0)
    p.add_argument("--steps", type=int, default=256, help="stable or Gaussian sub-steps")

    p = add("mc-check", cmd_mc_check, "Monte Carlo Laplace functional vs exp(-tau phi(lam))")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = add("estimate", cmd_estimate, "material estimated from simulated process paths", material=False, grid=True)
    p.add_argument("--process", required=True, metavar="FILE")
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=1, help="Gaussian sub-steps per path")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument(
        "--gaussian-term", choices=("quadratic_variation", "terminal", "realized"), default="quadratic_variation"
    )

    p = add("verify", cmd_verify, "conjugation residual vs t^2/2, or network evolution check", grid=True)
    p.add_argument("--network", metavar="FILE", help="check a network against its time-stepped evolution")
    p.add_argument("--load", metavar="FILE")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--bernstein", action="store_true", help="run the Bernstein sign check instead")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _Fail:
        return EXIT_FAILED
    except specs.SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ViscoLevyError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
