"""
Exact feasibility of homogeneous strict linear systems.

Every question asked about faces of a central arrangement has the form

    find x with  E x = 0  and  G x > 0  (componentwise),

because faces are relatively open cones.  Equalities are removed by
parametrising ``ker E``; the strict inequalities are then decided by
Fourier-Motzkin elimination, and a witness is recovered by back-substitution.
Desk-scale systems (a handful of variables) keep the elimination small.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd, lcm
from typing import Sequence

from .linalg import Matrix, kernel_basis


def _normalize(row: tuple) -> tuple:
    lead = next((abs(x) for x in row if x), None)
    if lead is None or lead == 1:
        return row
    return tuple(x / lead for x in row)


def _eliminate(rows: set, k: int) -> set:
    """Remove variable ``k`` from strict constraints ``row . t > 0``."""
    pos, neg, out = [], [], set()
    for r in rows:
        c = r[k]
        if c > 0:
            pos.append(r)
        elif c < 0:
            neg.append(r)
        else:
            out.add(r)
    for p in pos:
        for n in neg:
            # p/p_k - n/n_k has zero coefficient at k; both terms are strict
            a, b = p[k], -n[k]
            combo = tuple(x / a + y / b for x, y in zip(p, n))
            out.add(_normalize(combo))
    return out


def _pick(lo, hi):
    if lo is None and hi is None:
        return Fraction(0)
    if hi is None:
        return Fraction(floor(lo) + 1)
    if lo is None:
        return Fraction(ceil(hi) - 1)
    cand = [Fraction(i) for i in range(floor(lo) + 1, ceil(hi))]
    if cand:
        return min(cand, key=abs)
    return (lo + hi) / 2


def strict_solve(equalities: Sequence[Sequence], stricts: Sequence[Sequence], n: int) -> tuple | None:
    """A rational ``x`` with ``e . x == 0`` and ``g . x > 0`` for all rows, or None.

    The returned witness is scaled to a primitive integer vector.
    """
    if equalities:
        param = kernel_basis(Matrix(equalities, n)).matrix()
    else:
        param = Matrix.identity(n)
    d = param.cols
    rows = set()
    for g in stricts:
        gk = tuple(sum((Fraction(a) * b for a, b in zip(g, param.column(j))), Fraction(0)) for j in range(d))
        if not any(gk):
            return None
        rows.add(_normalize(gk))
    levels = [rows]
    for k in range(d - 1, -1, -1):
        rows = _eliminate(rows, k)
        if any(not any(r) for r in rows):
            return None
        levels.append(rows)
    # levels[d - k] still mentions variables 0..k; assign them in increasing order
    t = [Fraction(0)] * d
    for k in range(d):
        lo = hi = None
        for r in levels[d - 1 - k]:
            c = r[k]
            if not c:
                continue
            rest = sum((r[j] * t[j] for j in range(k)), Fraction(0))
            bound = -rest / c
            if c > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        t[k] = _pick(lo, hi)
    x = param.apply(t)
    return _primitive(x)


def _primitive(x: Sequence[Fraction]) -> tuple:
    if not any(x):
        return tuple(Fraction(0) for _ in x)
    den = lcm(*(v.denominator for v in x))
    ints = [int(v * den) for v in x]
    g = gcd(*ints)
    return tuple(Fraction(v // g) for v in ints)


def sign_constraints(normals: Sequence[Sequence], signs: Sequence[int]):
    """Split a sign pattern over ``normals`` into equality and strict rows."""
    eqs, gts = [], []
    for f, s in zip(normals, signs):
        if s == 0:
            eqs.append(tuple(f))
        elif s > 0:
            gts.append(tuple(f))
        else:
            gts.append(tuple(-x for x in f))
    return eqs, gts
