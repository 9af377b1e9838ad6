"""
JSON dialects for arrangements, modules, equivariant modules and auxiliary
inputs, plus a canonical emitter so that parse followed by emit reproduces a
canonical file byte for byte.

Rationals are always written as strings (``"1/2"``, ``"-3/7"``, ``"5"``);
integers are accepted on input.  Floats are rejected.

* arrangement: ``{"dim": 2, "hyperplanes": [["1", "0"], ...]}``
* module: ``{"arrangement": {...}, "dim": d, "actions": {"+-": [[...]], ...}}``
* equivariant module: ``{"coxeter": {...}, "dim": d, "e": {"0": ..}, "s": {"s1": ..}}``
  where ``e`` is keyed by subset bitmasks written in decimal
* Coxeter input: ``{"type": "A", "rank": 2}`` or ``{"coxeter_matrix": [[1, 3], [3, 1]]}``
* separation input: ``{"elements": [...], "coeffs": [...], "k_max": 4}``
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from .arrangement import Arrangement, FacePoset, enumerate_faces, parse_signs
from .errors import ParseError
from .linalg import Matrix
from .modules import RModule

_RATIONAL = re.compile(r"-?\d+(/\d+)?\Z")


def parse_rational(x, where: str = "value") -> Fraction:
    """
    >>> parse_rational("-3/7")
    Fraction(-3, 7)
    """
    if isinstance(x, bool):
        raise ParseError(f"{where}: expected a rational, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and _RATIONAL.match(x.strip()):
        try:
            return Fraction(x.strip())
        except ZeroDivisionError:
            raise ParseError(f"{where}: zero denominator in {x!r}") from None
    raise ParseError(f"{where}: malformed rational {x!r}")


def rational_to_str(x: Fraction) -> str:
    return str(Fraction(x))


def matrix_to_json(m: Matrix) -> list:
    return [[rational_to_str(x) for x in m.row(i)] for i in range(m.rows)]


def matrix_from_json(obj, shape: tuple[int, int] | None = None, where: str = "matrix") -> Matrix:
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise ParseError(f"{where}: expected a list of rows")
    rows = [[parse_rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(obj)]
    cols = len(rows[0]) if rows else (shape[1] if shape else 0)
    if any(len(r) != cols for r in rows):
        raise ParseError(f"{where}: rows of different lengths")
    m = Matrix(rows, cols)
    if shape is not None and m.shape != shape:
        raise ParseError(f"{where}: shape {m.shape}, expected {shape}")
    return m


# -- canonical emitter -------------------------------------------------------


def _is_scalar(x) -> bool:
    return isinstance(x, (str, int, float, bool)) or x is None


def emit_json(obj: Any, indent: int = 0) -> str:
    """Indented JSON with lists of scalars kept on one line; keys keep insertion order."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if _is_scalar(obj):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {emit_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(_is_scalar(x) for x in obj):
            return "[" + ", ".join(json.dumps(x) for x in obj) + "]"
        return "[\n" + ",\n".join(inner + emit_json(x, indent + 1) for x in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot emit {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return emit_json(obj) + "\n"


# -- arrangements and modules ------------------------------------------------

_POSETS: dict[Arrangement, FacePoset] = {}


def poset_of(arr: Arrangement) -> FacePoset:
    """Shared face poset per arrangement so modules read from files can be combined."""
    p = _POSETS.get(arr)
    if p is None:
        p = _POSETS[arr] = enumerate_faces(arr)
    return p


def arrangement_to_json(arr: Arrangement) -> dict:
    return {"dim": arr.dim, "hyperplanes": [[rational_to_str(x) for x in f] for f in arr.normals]}


def arrangement_from_json(obj) -> Arrangement:
    if not isinstance(obj, dict) or "hyperplanes" not in obj or "dim" not in obj:
        raise ParseError("arrangement needs 'dim' and 'hyperplanes'")
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise ParseError(f"dim must be a non-negative integer, got {dim!r}")
    normals = []
    for i, f in enumerate(obj["hyperplanes"]):
        if not isinstance(f, list):
            raise ParseError(f"hyperplanes[{i}]: expected a list")
        if len(f) != dim:
            raise ParseError(f"hyperplanes[{i}]: {len(f)} coordinates, dimension mismatch with dim {dim}")
        normals.append(tuple(parse_rational(x, f"hyperplanes[{i}][{j}]") for j, x in enumerate(f)))
    try:
        return Arrangement(dim, tuple(normals))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def module_to_json(m: RModule) -> dict:
    p = m.poset
    return {
        "arrangement": arrangement_to_json(p.arrangement),
        "dim": m.dim,
        "actions": {p.name(c): matrix_to_json(m.act[c]) for c in range(len(p))},
    }


def module_from_json(obj) -> RModule:
    arr = arrangement_from_json(obj.get("arrangement"))
    p = poset_of(arr)
    d = obj.get("dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 0:
        raise ParseError(f"dim must be a non-negative integer, got {d!r}")
    actions = obj.get("actions")
    if not isinstance(actions, dict):
        raise ParseError("module needs an 'actions' object")
    act = {}
    for name, mat in actions.items():
        try:
            c = p.face_index(parse_signs(name))
        except (KeyError, ValueError):
            raise ParseError(f"unknown face {name!r}") from None
        act[c] = matrix_from_json(mat, (d, d), f"actions[{name}]")
    missing = [p.name(c) for c in range(len(p)) if c not in act]
    if missing:
        raise ParseError(f"actions missing for faces {', '.join(missing)}")
    return RModule(p, d, act)


# -- equivariant modules -----------------------------------------------------


def coxeter_spec_from_json(obj) -> dict:
    if not isinstance(obj, dict):
        raise ParseError("Coxeter input must be an object")
    if "coxeter_matrix" in obj:
        m = obj["coxeter_matrix"]
        if not isinstance(m, list) or not all(isinstance(r, list) and all(isinstance(x, int) for x in r) for r in m):
            raise ParseError("coxeter_matrix must be a list of integer rows")
        return {"coxeter_matrix": m}
    if "type" in obj:
        out = {"type": obj["type"]}
        if "rank" in obj:
            out["rank"] = obj["rank"]
        return out
    raise ParseError("Coxeter input needs 'type' or 'coxeter_matrix'")


_SYSTEMS: dict = {}


def system_of(spec: dict):
    from .coxeter import build_system

    key = json.dumps(spec, sort_keys=True)
    w = _SYSTEMS.get(key)
    if w is None:
        w = _SYSTEMS[key] = build_system(spec)
    return w


def rw_module_to_json(m, spec: dict | None = None) -> dict:
    w = m.system
    spec = spec or getattr(m, "spec", None) or {"coxeter_matrix": [list(r) for r in w.coxeter]}
    return {
        "coxeter": spec,
        "dim": m.dim,
        "e": {str(k): matrix_to_json(m.e[k]) for k in sorted(m.e)},
        "s": {f"s{i + 1}": matrix_to_json(x) for i, x in enumerate(m.s)},
    }


def rw_module_from_json(obj):
    from .coxeter import RWModule

    spec = coxeter_spec_from_json(obj.get("coxeter"))
    w = system_of(spec)
    d = obj.get("dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 0:
        raise ParseError(f"dim must be a non-negative integer, got {d!r}")
    e_obj, s_obj = obj.get("e"), obj.get("s")
    if not isinstance(e_obj, dict) or not isinstance(s_obj, dict):
        raise ParseError("equivariant module needs 'e' and 's' objects")
    e = {}
    for key, mat in e_obj.items():
        if not key.isdigit() or int(key) >= 1 << w.rank:
            raise ParseError(f"bad subset key {key!r}")
        e[int(key)] = matrix_from_json(mat, (d, d), f"e[{key}]")
    if len(e) != 1 << w.rank:
        raise ParseError(f"expected {1 << w.rank} e matrices, got {len(e)}")
    s = []
    for i in range(w.rank):
        key = f"s{i + 1}"
        if key not in s_obj:
            raise ParseError(f"missing generator {key}")
        s.append(matrix_from_json(s_obj[key], (d, d), f"s[{key}]"))
    if len(s_obj) != w.rank:
        raise ParseError("unknown generator names in 's'")
    m = RWModule(w, d, e, s)
    m.spec = spec
    return m


# -- documents ---------------------------------------------------------------


def classify(obj) -> str:
    if not isinstance(obj, dict):
        raise ParseError("top level must be a JSON object")
    if "actions" in obj:
        return "module"
    if "e" in obj and "s" in obj:
        return "rw_module"
    if "hyperplanes" in obj:
        return "arrangement"
    if "elements" in obj:
        return "symsep"
    if "type" in obj or "coxeter_matrix" in obj:
        return "coxeter"
    raise ParseError("cannot tell what kind of document this is")


def symsep_from_json(obj):
    elems = obj.get("elements")
    coeffs = obj.get("coeffs")
    if not isinstance(elems, list) or not isinstance(coeffs, list):
        raise ParseError("separation input needs 'elements' and 'coeffs' lists")
    k_max = obj.get("k_max", 4)
    if not isinstance(k_max, int) or isinstance(k_max, bool) or k_max < 1:
        raise ParseError("k_max must be a positive integer")
    mats = [matrix_from_json(m, where=f"elements[{i}]") for i, m in enumerate(elems)]
    cs = [parse_rational(c, f"coeffs[{i}]") for i, c in enumerate(coeffs)]
    return {"elements": mats, "coeffs": cs, "k_max": k_max}


def symsep_to_json(data) -> dict:
    return {
        "elements": [matrix_to_json(m) for m in data["elements"]],
        "coeffs": [rational_to_str(c) for c in data["coeffs"]],
        "k_max": data["k_max"],
    }


def parse_document(text: str, source: str = "<input>"):
    """``(kind, object)`` for a JSON document; parse errors carry line and column."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    kind = classify(obj)
    try:
        if kind == "module":
            return kind, module_from_json(obj)
        if kind == "rw_module":
            return kind, rw_module_from_json(obj)
        if kind == "arrangement":
            return kind, arrangement_from_json(obj)
        if kind == "symsep":
            return kind, symsep_from_json(obj)
        return kind, coxeter_spec_from_json(obj)
    except ParseError as exc:
        raise ParseError(f"{source}: {exc}") from None


def to_json(kind: str, value) -> dict:
    if kind == "module":
        return module_to_json(value)
    if kind == "rw_module":
        return rw_module_to_json(value)
    if kind == "arrangement":
        return arrangement_to_json(value)
    if kind == "symsep":
        return symsep_to_json(value)
    return dict(value)


def load(path: str | Path):
    path = Path(path)
    return parse_document(path.read_text(), str(path))


def save(path: str | Path, kind: str, value):
    Path(path).write_text(dumps(to_json(kind, value)))
