"""JSON documents for materials, networks, processes and load histories."""

from __future__ import annotations

import json
from importlib import resources

import jsonschema
import numpy as np

from .bernstein import Analytic, Composed, Material, ParallelCombination, SeriesCombination, Stable, compose
from .errors import InvalidParameterError, UnsupportedRepresentationError
from .levy_sim import PaisCharacteristics
from .materials import (
    LoadHistory,
    dashpot,
    kelvin_voigt,
    maxwell,
    parallel,
    prony,
    series,
    spring,
    stable_material,
)
from .network import QuadraticFormPair

__all__ = [
    "SpecError",
    "SCHEMA",
    "load_document",
    "parse_document",
    "parse_material",
    "material_to_spec",
    "parse_network",
    "parse_pais",
    "parse_load",
]

VERSION = 1
SCHEMA = json.loads(resources.files(__package__).joinpath("schemas/spec.schema.json").read_text())

_KIND_DEFS = {
    "prony": "prony",
    "stable": "stable_material",
    "spring": "spring",
    "dashpot": "dashpot",
    "maxwell": "maxwell",
    "kelvin_voigt": "kelvin_voigt",
    "series": "combination",
    "parallel": "combination",
    "compose": "compose",
    "network": "network",
    "pais": "pais",
    "load": "load",
}


def _node_validator(defname):
    # children are checked one level at a time so errors point into them
    schema = {"$defs": json.loads(json.dumps(SCHEMA["$defs"])), "$ref": f"#/$defs/{defname}"}
    for name in ("combination", "compose"):
        schema["$defs"][name]["properties"]["children"]["items"] = {"type": "object"}
    return jsonschema.Draft202012Validator(schema)


_VALIDATORS = {kind: _node_validator(d) for kind, d in _KIND_DEFS.items()}
_ROOT = jsonschema.Draft202012Validator(
    {"type": "object", "required": ["version", "kind"], "properties": {"version": {"const": VERSION}}}
)


class SpecError(InvalidParameterError):
    """A document failed to parse or validate; the message names the field and line."""


def _line_of(text: str | None, path) -> int | None:
    """Best-effort line of the field at ``path`` (keys matched in order)."""
    if text is None:
        return None
    pos = 0
    for key in path:
        if isinstance(key, str):
            found = text.find(json.dumps(key), pos)
            if found < 0:
                break
            pos = found
    return text.count("\n", 0, pos) + 1


def _first_error(node, path, root):
    validator = _ROOT if root else None
    if validator is not None:
        err = jsonschema.exceptions.best_match(validator.iter_errors(node))
        if err is not None:
            return path + list(err.absolute_path), err.message
    if not isinstance(node, dict) or "kind" not in node:
        return path, "expected an object with a 'kind' field"
    kind = node["kind"]
    if kind not in _VALIDATORS or (not root and kind not in _MATERIAL_KINDS):
        allowed = sorted(_MATERIAL_KINDS if not root else _VALIDATORS)
        return path + ["kind"], f"unknown kind {kind!r}; expected one of {allowed}"
    err = jsonschema.exceptions.best_match(_VALIDATORS[kind].iter_errors(node))
    if err is not None:
        return path + list(err.absolute_path), err.message
    for i, child in enumerate(node.get("children", ()) if kind in ("series", "parallel", "compose") else ()):
        found = _first_error(child, path + ["children", i], False)
        if found is not None:
            return found
    return None


def validate(doc, text: str | None = None, source: str = "<spec>"):
    found = _first_error(doc, [], True)
    if found is None:
        return
    path, message = found
    field = "/".join(str(p) for p in path) or "(root)"
    line = _line_of(text, path)
    where = f"{source}:{line}" if line else source
    raise SpecError(f"{where}: field {field}: {message}")


def load_document(path: str, kind: str | tuple | None = None) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"{path}: {exc.strerror}") from exc
    return parse_document(text, kind, source=path)


def parse_document(text: str, kind=None, source: str = "<spec>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    validate(doc, text, source)
    if kind is not None:
        kinds = (kind,) if isinstance(kind, str) else kind
        family = "material" if doc["kind"] in _MATERIAL_KINDS else doc["kind"]
        if family not in kinds:
            raise SpecError(f"{source}: expected a {' or '.join(kinds)} document, got kind {doc['kind']!r}")
    return doc


# -- materials -----------------------------------------------------------------

_MATERIAL_KINDS = {
    "prony",
    "stable",
    "spring",
    "dashpot",
    "maxwell",
    "kelvin_voigt",
    "series",
    "parallel",
    "compose",
}


def parse_material(doc: dict) -> Material:
    kind = doc["kind"]
    if kind == "prony":
        stable = doc.get("stable")
        return prony(
            doc.get("L", 0),
            doc.get("K", 0),
            [tuple(a) for a in doc.get("atoms", ())],
            Stable(stable["alpha"], stable["scale"]) if stable else None,
        )
    if kind == "stable":
        return stable_material(doc["alpha"], doc.get("c", 1.0))
    if kind == "spring":
        return spring(doc["a"])
    if kind == "dashpot":
        if "viscosity" in doc:
            return dashpot(viscosity=doc["viscosity"])
        return dashpot(doc["a"])
    if kind == "maxwell":
        return maxwell(doc["G"], doc["eta"])
    if kind == "kelvin_voigt":
        return kelvin_voigt(doc["a"], doc["b"])
    children = [parse_material(c) for c in doc["children"]]
    if kind == "compose":
        return compose(*children)
    combine = series if kind == "series" else parallel
    out = children[0]
    for c in children[1:]:
        out = combine(out, c)
    return out


def _num(x):
    return int(x) if isinstance(x, (int, np.integer)) else float(x)


def _named_form(m: Analytic) -> dict | None:
    """A dictionary-row spelling of ``m`` when it reproduces ``m`` exactly."""
    rep = m.rep
    L, K, atoms, st = rep.constant_L, rep.drift_K, rep.levy.atoms, rep.levy.stable
    candidates = []
    if st is None and not atoms:
        if L > 0 and K == 0:
            candidates.append(({"kind": "spring", "a": 1 / L}, lambda d: spring(d["a"])))
        if L == 0 and K > 0:
            candidates.append(({"kind": "dashpot", "a": K}, lambda d: dashpot(d["a"])))
        if L > 0 and K > 0:
            candidates.append(({"kind": "maxwell", "G": 1 / L, "eta": 1 / K}, lambda d: maxwell(d["G"], d["eta"])))
    if st is None and L == 0 and K == 0 and len(atoms) == 1:
        rate, w = atoms[0]
        candidates.append(
            ({"kind": "kelvin_voigt", "a": 1 / w, "b": 1 / (w * rate)}, lambda d: kelvin_voigt(d["a"], d["b"]))
        )
    if st is not None and L == 0 and K == 0 and not atoms:
        candidates.append(({"kind": "stable", "alpha": st.alpha, "c": st.scale}, lambda d: stable_material(d["alpha"], d["c"])))
    for doc, build in candidates:
        doc = {k: (_num(v) if k != "kind" else v) for k, v in doc.items()}
        try:
            if build(doc) == m:
                return doc
        except InvalidParameterError:
            pass
    return None


def material_to_spec(m: Material, *, top: bool = True) -> dict:
    """JSON-ready document; parsing it gives back an equal material."""
    if isinstance(m, Analytic):
        doc = _named_form(m)
        if doc is None:
            rep = m.rep
            doc = {"kind": "prony", "L": _num(rep.constant_L), "K": _num(rep.drift_K)}
            doc["atoms"] = [[_num(r), _num(w)] for r, w in rep.levy.atoms]
            if rep.levy.stable is not None:
                doc["stable"] = {"alpha": _num(rep.levy.stable.alpha), "scale": _num(rep.levy.stable.scale)}
    elif isinstance(m, Composed):
        doc = {"kind": "compose", "children": [material_to_spec(m.outer, top=False), material_to_spec(m.inner, top=False)]}
    elif isinstance(m, (SeriesCombination, ParallelCombination)):
        kind = "series" if isinstance(m, SeriesCombination) else "parallel"
        doc = {"kind": kind, "children": [material_to_spec(p, top=False) for p in m.parts]}
    else:
        raise UnsupportedRepresentationError(f"cannot serialize {type(m).__name__}")
    return {"version": VERSION, **doc} if top else doc


# -- other documents ---------------------------------------------------------------


def parse_network(doc: dict) -> QuadraticFormPair:
    return QuadraticFormPair(np.array(doc["A"], dtype=float), np.array(doc["B"], dtype=float), doc.get("observables"))


def parse_pais(doc: dict) -> PaisCharacteristics:
    start = doc["start"]
    m = len(start)
    sigma = doc.get("sigma", np.zeros((m, m)).tolist())
    jumps = [(j["point"], j["intensity"]) for j in doc.get("jumps", ())]
    return PaisCharacteristics(start, sigma, jumps)


def parse_load(doc: dict) -> LoadHistory:
    return LoadHistory(tuple(map(tuple, doc.get("steps", ()))), tuple(map(tuple, doc.get("ramps", ()))))
