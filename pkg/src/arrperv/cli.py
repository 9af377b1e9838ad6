"""
Command-line front end.

Exit status is 0 on success, 1 when a module fails validation (the report
lists every violated relation instance) and 2 on input errors.  Input paths
that do not exist are looked up by file name among the bundled data files,
so ``arrperv faces examples/braid_a2.json`` works from any directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import coxeter as cx
from .arrangement import Arrangement, flats_and_restriction, make_flat, parse_signs
from .errors import ArrpervError, InvalidModule, ParseError, ValidationFailed
from .linalg import sym_separation
from .modules import RModule, ab_module, constant_module, validate_module
from .recollement import (
    ic_on_stratum,
    intermediate_extension_from,
    is_pure,
    j_restrict,
    support,
)
from .salvetti import check_zifferblatt, presentation
from .serialize import load, matrix_to_json, parse_rational, poset_of, system_of

DATA_DIR = Path(__file__).parent / "data"


class InputError(Exception):
    pass


def resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = DATA_DIR / p.name
    if bundled.exists():
        return bundled
    raise InputError(f"no such file: {path}")


def read(path: str):
    return load(resolve(path))


def arrangement_of(kind, value) -> Arrangement:
    if kind == "arrangement":
        return value
    if kind == "module":
        return value.poset.arrangement
    raise InputError(f"expected an arrangement or module file, got a {kind} document")


def face(poset, name: str) -> int:
    try:
        return poset.face_index(parse_signs(name))
    except (KeyError, ValueError):
        raise InputError(f"unknown face {name!r}") from None


def base_chamber(poset, name: str | None) -> int:
    if name is None:
        return poset.chambers[0]
    c = face(poset, name)
    if c not in poset.chambers:
        raise InputError(f"{name} is not a chamber")
    return c


def parse_flat(arr: Arrangement, text: str):
    try:
        idx = [int(x) for x in text.replace(",", " ").split()] if text.strip() else []
    except ValueError:
        raise InputError(f"bad hyperplane list {text!r}") from None
    return make_flat(arr, idx)


def parse_seed(text: str | None) -> Fraction | None:
    if text is None:
        return None
    key, _, val = text.partition("=")
    if key.strip() != "q" or not val:
        raise InputError(f"seed must look like q=<rational>, got {text!r}")
    return parse_rational(val.strip(), "seed")


class Output:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []
        self.data: dict = {}

    def line(self, text: str = ""):
        self.lines.append(text)

    def flush(self, stream):
        if self.fmt == "json":
            stream.write(json.dumps(self.data, indent=2) + "\n")
        else:
            stream.write("\n".join(self.lines) + ("\n" if self.lines else ""))


# -- subcommands -------------------------------------------------------------


def cmd_faces(args, out: Output) -> int:
    arr = arrangement_of(*read(args.file))
    p = poset_of(arr)
    out.line(f"{len(p)} faces, {len(p.chambers)} chambers")
    codims = sorted({f.codim for f in p.faces})
    out.line("by codimension: " + ", ".join(f"{c}:{len(p.by_codim(c))}" for c in codims))
    for f in p.faces:
        out.line(f"  {f.name}  codim {f.codim}  witness ({', '.join(str(x) for x in f.witness)})")
    out.data = {
        "faces": len(p),
        "chambers": len(p.chambers),
        "by_codim": {str(c): len(p.by_codim(c)) for c in codims},
        "list": [{"signs": f.name, "codim": f.codim, "witness": [str(x) for x in f.witness]} for f in p.faces],
    }
    return 0


def cmd_poset(args, out: Output) -> int:
    arr = arrangement_of(*read(args.file))
    p = poset_of(arr)
    out.line(f"{len(p)} faces, {len(p.covers)} cover relations")
    for a, b in p.covers:
        out.line(f"  {p.name(a)} < {p.name(b)}")
    out.data = {"faces": p.names(), "covers": [[p.name(a), p.name(b)] for a, b in p.covers]}
    return 0


def cmd_collinear(args, out: Output) -> int:
    arr = arrangement_of(*read(args.file))
    p = poset_of(arr)
    a, b, c = (face(p, x) for x in (args.a, args.b, args.c))
    ok = p.collinear(a, b, c)
    out.line(f"collinear({args.a}, {args.b}, {args.c}) = {str(ok).lower()}")
    out.data = {"faces": [args.a, args.b, args.c], "collinear": ok}
    return 0


def cmd_salvetti(args, out: Output) -> int:
    kind, value = read(args.file)
    p = poset_of(arrangement_of(kind, value))
    pres = presentation(p, base_chamber(p, args.base))
    for ln in pres.to_text().rstrip("\n").split("\n"):
        out.line(ln)
    out.data = pres.as_dict()
    status = 0
    if kind == "module":
        rep = check_zifferblatt(value, pres)
        out.line(rep.summary())
        out.data["clock_relations"] = rep.as_dict()
        status = 0 if rep.ok else 1
    return status


def cmd_validate(args, out: Output) -> int:
    kind, value = read(args.file)
    if kind == "module":
        rep = validate_module(value)
        reports = [rep]
        if rep.ok:
            reports.append(check_zifferblatt(value))
    elif kind == "rw_module":
        reports = [cx.validate_rw_module(value)]
        if reports[0].ok:
            reports.append(cx.braid_restrict(value).braid_report())
    else:
        raise InputError(f"validate expects a module file, got a {kind} document")
    for r in reports:
        out.line(r.summary())
    out.data = {"ok": all(r.ok for r in reports), "reports": [r.as_dict() for r in reports]}
    return 0 if all(r.ok for r in reports) else 1


def _require_valid(m, out: Output) -> int:
    rep = validate_module(m) if isinstance(m, RModule) else cx.validate_rw_module(m)
    if not rep.ok:
        out.line(rep.summary())
        out.data = {"ok": False, "reports": [rep.as_dict()]}
        return 1
    return 0


def cmd_restrict(args, out: Output) -> int:
    kind, value = read(args.file)
    arr = arrangement_of(kind, value)
    p = poset_of(arr)
    if args.flat is not None:
        res = flats_and_restriction(p, parse_flat(arr, args.flat))
        inside = [p.name(c) for c in res.embedding]
        out.line(f"flat {sorted(res.flat.hyperplanes)}: dimension {res.flat.dim}, "
                 f"{res.arrangement.size} restricted hyperplanes, {len(inside)} faces inside")
        for i, c in enumerate(res.embedding):
            out.line(f"  {res.poset.name(i) or '()'} -> {p.name(c)}")
        out.data = {
            "flat": sorted(res.flat.hyperplanes),
            "dim": res.flat.dim,
            "hyperplanes": [[str(x) for x in f] for f in res.arrangement.normals],
            "embedding": {res.poset.name(i): p.name(c) for i, c in enumerate(res.embedding)},
        }
        return 0
    if kind != "module":
        raise InputError("restrict needs --flat for an arrangement file")
    if _require_valid(value, out):
        return 1
    ls = j_restrict(value, base_chamber(p, args.base))
    out.line(f"local system at {p.name(ls.base)}: dim {ls.dim}, {len(ls.loops)} loops")
    for w, x in zip(ls.loops, ls.matrices):
        out.line(f"  {w.label(p)} : {matrix_to_json(x)}")
    out.data = ls.as_dict()
    return 0


def _purity_line(dim: int, pure: tuple[bool, bool]) -> str:
    star = "0" if pure[0] else "nonzero"
    shriek = "0" if pure[1] else "nonzero"
    return f"IC dim {dim}, i*={star}, i!={shriek}"


def cmd_ic(args, out: Output) -> int:
    kind, value = read(args.file)
    q = parse_seed(args.seed)
    if kind == "rw_module":
        if _require_valid(value, out):
            return 1
        pm = cx.rw_intermediate_extension_from(value)
        pure = (cx.rw_T(pm).dim == pm.dim, cx.rw_N(pm).dim == 0)
        out.line(_purity_line(pm.dim, pure))
        out.data = {"dim": pm.dim, "i_star_zero": pure[0], "i_shriek_zero": pure[1],
                    "support": [str(k) for k in cx.lambda_support(pm)]}
        return 0
    arr = arrangement_of(kind, value)
    p = poset_of(arr)
    if args.flat is not None:
        flat = parse_flat(arr, args.flat)
        res = flats_and_restriction(p, flat)
        sub = poset_of(res.arrangement)
        if q is not None:
            if res.arrangement.size != 1:
                raise InputError("--seed q=... needs a flat whose restriction has one hyperplane")
            seed = ab_module(1, q, poset=sub)
        else:
            seed = constant_module(sub)
        result = ic_on_stratum(p, flat, seed)
        b = res.embedding[res.poset.chambers[0]]
        faces = sorted(res.embedding)
        pure = is_pure(result, b, faces)
    else:
        if q is not None:
            if arr.size != 1:
                raise InputError("--seed q=... needs an arrangement with one hyperplane")
            seed = ab_module(1, q, poset=p)
        elif kind == "module":
            if _require_valid(value, out):
                return 1
            seed = value
        else:
            seed = constant_module(p)
        b = base_chamber(p, args.base)
        result = intermediate_extension_from(seed, b)
        pure = is_pure(result, b)
    sup = support(result)
    out.line(_purity_line(result.dim, pure))
    out.line("ranks: " + ", ".join(f"{p.name(c)}:{result.act[c].rank()}" for c in range(len(p))))
    out.line("support: " + " ".join(p.name(c) for c in sup.faces))
    out.data = {
        "dim": result.dim,
        "i_star_zero": pure[0],
        "i_shriek_zero": pure[1],
        "ranks": {p.name(c): result.act[c].rank() for c in range(len(p))},
        "support": sup.as_dict(p),
    }
    return 0


def cmd_support(args, out: Output) -> int:
    kind, value = read(args.file)
    if kind == "rw_module":
        if _require_valid(value, out):
            return 1
        sup = cx.lambda_support(value)
        n = value.system.rank
        out.line("support (subsets): " + " ".join(cx._mask_name(k, n) for k in sup))
        out.data = {"subsets": [str(k) for k in sup]}
        return 0
    if kind != "module":
        raise InputError(f"support expects a module file, got a {kind} document")
    if _require_valid(value, out):
        return 1
    p = value.poset
    sup = support(value)
    out.line(f"support: {len(sup.faces)} faces, closed={str(sup.closed).lower()}")
    out.line("  faces: " + " ".join(p.name(c) for c in sup.faces))
    out.line("  maximal flats: " + " ".join(str(sorted(f.hyperplanes)) for f in sup.maximal_flats))
    out.data = sup.as_dict(p)
    return 0


def cmd_coxeter(args, out: Output) -> int:
    path = Path(args.system)
    rw = None
    if path.exists() or (DATA_DIR / path.name).exists() or args.system.endswith(".json"):
        kind, value = read(args.system)
        if kind == "rw_module":
            rw = value
            w = value.system
        elif kind == "coxeter":
            w = system_of(value)
        else:
            raise InputError(f"coxeter expects a Coxeter or equivariant module file, got a {kind} document")
    else:
        w = cx.build_system(args.system)
    lam = cx.lambda_iso(w)
    p = lam.poset
    longest = w.longest((1 << w.rank) - 1)
    out.line(f"type {w.name}: |W| = {w.order}, longest element length {w.length(longest)}")
    out.line(f"{p.arrangement.size} reflecting hyperplanes, {len(p)} faces, {len(p.chambers)} chambers")
    out.line(f"|Lambda| = {len(lam.face_of)} = |C+| = {sum(1 for c in range(len(p)) if p.leq(c, lam.chamber))}")
    for mask in lam.subsets():
        out.line(f"  {cx._mask_name(mask, w.rank)} -> {p.name(lam.face_of[mask])}")
    chambers = {p.name(c): w.word_name(cx.chamber_element(w, lam, c)) for c in p.chambers}
    out.line("chambers: " + ", ".join(f"{k}={v}" for k, v in chambers.items()))
    out.data = {
        "type": w.name,
        "order": w.order,
        "longest_length": w.length(longest),
        "hyperplanes": [[str(x) for x in f] for f in p.arrangement.normals],
        "lambda": {str(m): p.name(lam.face_of[m]) for m in lam.subsets()},
        "chambers": chambers,
    }
    status = 0
    if rw is not None:
        rep = cx.validate_rw_module(rw, lam)
        out.line(rep.summary())
        out.data["relations"] = rep.as_dict()
        if rep.ok:
            br = cx.braid_restrict(rw)
            out.line(br.braid_report().summary())
            out.data["braid"] = br.as_dict()
        else:
            status = 1
    return status


def cmd_symsep(args, out: Output) -> int:
    kind, value = read(args.file)
    if kind != "symsep":
        raise InputError(f"symsep expects a separation input file, got a {kind} document")
    k_max = args.k_max or value["k_max"]
    k = sym_separation(value["elements"], value["coeffs"], k_max)
    out.line(f"k = {k}" if k is not None else "none")
    out.data = {"k": k, "k_max": k_max}
    return 0


COMMANDS = {
    "faces": cmd_faces,
    "poset": cmd_poset,
    "collinear": cmd_collinear,
    "salvetti": cmd_salvetti,
    "validate": cmd_validate,
    "restrict": cmd_restrict,
    "ic": cmd_ic,
    "support": cmd_support,
    "coxeter": cmd_coxeter,
    "symsep": cmd_symsep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arrperv", description="Exact computations with arrangement modules.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    add("faces", "enumerate faces").add_argument("file")
    add("poset", "list cover relations").add_argument("file")
    c = add("collinear", "test collinearity of three faces")
    c.add_argument("file")
    for x in ("a", "b", "c"):
        c.add_argument(x)
    s = add("salvetti", "print the groupoid presentation")
    s.add_argument("file")
    s.add_argument("--base")
    add("validate", "check module relations").add_argument("file")
    r = add("restrict", "restrict to a flat, or to the open part at a chamber")
    r.add_argument("file")
    r.add_argument("--flat")
    r.add_argument("--base")
    i = add("ic", "intermediate extension")
    i.add_argument("file")
    i.add_argument("--seed")
    i.add_argument("--base")
    i.add_argument("--flat")
    add("support", "support of a module").add_argument("file")
    add("coxeter", "Coxeter system summary").add_argument("system", help="type such as A2, or a JSON file")
    y = add("symsep", "least separating symmetric power")
    y.add_argument("file")
    y.add_argument("--k-max", type=int, dest="k_max")
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    out = Output(args.format)
    try:
        status = COMMANDS[args.command](args, out)
    except (InputError, ParseError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except (ValidationFailed, InvalidModule) as exc:
        stderr.write(f"{exc}\n")
        return 1
    except (ArrpervError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    out.flush(stdout)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
