"""
Recollement attached to a chamber idempotent, intermediate extensions, supports
and transport along flats.

For a chamber ``A`` with idempotent ``e = e_A`` every module ``M`` has two
distinguished submodules:

* ``T_e(M)``, generated by ``e M``;
* ``N_e(M)``, the largest submodule killed by ``e``.

``i^* M = M / T_e(M)`` and ``i^! M = N_e(M)`` are the closed-side functors,
``j^* M = e M`` with its loop action is the open side, and the intermediate
extension of ``j^* N`` is ``T_e(N) / N_e(T_e(N))``.  Closures are taken under
every face action together with every localization inverse, so the results
are submodules of the localized algebra as well.

The helpers at the top work for any module-like object exposing ``dim``,
``operators(...)`` and ``transformed(basis, coords)``; :mod:`arrperv.coxeter`
reuses them with ``e`` the chamber idempotent of the equivariant algebra.
"""

from __future__ import annotations

import dataclasses
import random
from fractions import Fraction
from typing import Sequence

from .arrangement import FacePoset, Flat, Restriction, flats_and_restriction, make_flat
from .errors import InvalidModule, NotSupportedOnClosed
from .linalg import (
    Matrix,
    Subspace,
    closure_under,
    determinant,
    hstack,
    image_basis,
    inverse,
    kernel_basis,
    largest_invariant_in,
)
from .modules import RModule, find_isomorphism
from .salvetti import Letter, Word, evaluate_word, on_image, presentation


# -- generic closed/open pieces ----------------------------------------------


def t_space(ops: Sequence[Matrix], e: Matrix) -> Subspace:
    space = closure_under(ops, image_basis(e))
    assert all(space.is_invariant(op) for op in ops)
    return space


def n_space(ops: Sequence[Matrix], e: Matrix) -> Subspace:
    space = largest_invariant_in(ops, e)
    assert all(space.is_invariant(op) for op in ops)
    assert all(not any(e.apply(v)) for v in space.basis)
    return space


def submodule(m, space: Subspace):
    """Restriction of every action to an invariant subspace, in its canonical basis."""
    return m.transformed(space.matrix(), space.coordinate_map())


def _quotient_map(space: Subspace, comp: Matrix) -> Matrix:
    n = space.ambient_dim
    full = hstack([space.matrix(), comp], n)
    inv = inverse(full)
    return inv.submatrix(range(space.dim, n), range(n))


def quotient(m, space: Subspace):
    """Induced actions on ``M / space``, computed on a coordinate complement.

    The computation is repeated with a second complement (the first one
    shifted by vectors of ``space``) and the two results must coincide.
    """
    comp = space.complement().matrix()
    out = m.transformed(comp, _quotient_map(space, comp))
    if space.dim and comp.cols:
        shift = space.matrix() @ Matrix([[1] * comp.cols for _ in range(space.dim)], comp.cols)
        other = comp + shift
        again = m.transformed(other, _quotient_map(space, other))
        assert again == out, "quotient actions depend on the complement"
    return out


def projection_onto_quotient(space: Subspace) -> Matrix:
    return _quotient_map(space, space.complement().matrix())


# -- open restriction ---------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class LocalSystemRep:
    """``e_A M`` with one invertible matrix per loop generator based at ``A``."""

    poset: FacePoset
    base: int
    space: Subspace
    loops: tuple[Word, ...]
    matrices: tuple[Matrix, ...]

    @property
    def dim(self) -> int:
        return self.space.dim

    def as_dict(self) -> dict:
        from .serialize import matrix_to_json

        return {
            "base": self.poset.name(self.base),
            "dim": self.dim,
            "loops": [{"word": w.label(self.poset), "matrix": matrix_to_json(x)} for w, x in zip(self.loops, self.matrices)],
        }


def default_loops(poset: FacePoset, base: int) -> tuple[Word, ...]:
    return presentation(poset, base).loops


def j_restrict(m: RModule, a: int, loops: Sequence[Word] | None = None) -> LocalSystemRep:
    m.require_valid()
    loops = default_loops(m.poset, a) if loops is None else tuple(loops)
    space = m.image(a)
    mats = []
    for w in loops:
        if w.start != a or w.end != a:
            raise InvalidModule(f"loop {w.label(m.poset)} is not based at {m.poset.name(a)}")
        x = on_image(m, a, evaluate_word(m, w))
        if space.dim and determinant(x) == 0:
            raise InvalidModule(f"loop {w.label(m.poset)} acts singularly")
        mats.append(x)
    return LocalSystemRep(m.poset, a, space, tuple(loops), tuple(mats))


def local_systems_isomorphic(l1: LocalSystemRep, l2: LocalSystemRep, via: Matrix | None = None) -> bool:
    """Check an explicit intertwiner, or search one when ``via`` is None."""
    if l1.dim != l2.dim or len(l1.matrices) != len(l2.matrices):
        return False
    if via is None:
        return _find_intertwiner(l1.matrices, l2.matrices) is not None
    if l1.dim and determinant(via) == 0:
        return False
    return all(via @ x == y @ via for x, y in zip(l1.matrices, l2.matrices))


def _find_intertwiner(xs, ys):
    """Random combination of a basis of ``{X : X x_i = y_i X}``, if invertible."""
    d = xs[0].rows if xs else 0
    if d == 0:
        return Matrix.zeros(0, 0)
    n = d * d
    rows = []
    for a, b in zip(xs, ys):
        for i in range(d):
            for j in range(d):
                row = [Fraction(0)] * n
                for k in range(d):
                    row[i * d + k] += a[k, j]
                    row[k * d + j] -= b[i, k]
                rows.append(row)
    basis = kernel_basis(Matrix(rows, n)).basis if rows else Subspace.full(n).basis
    rng = random.Random(0)
    for _ in range(20):
        v = [Fraction(0)] * n
        for b in basis:
            c = Fraction(rng.randint(-50, 50), rng.randint(1, 7))
            v = [x + c * y for x, y in zip(v, b)]
        x = Matrix([v[i * d:(i + 1) * d] for i in range(d)], d)
        if determinant(x) != 0:
            return x
    return None


# -- recollement functors -----------------------------------------------------


def T_e(m: RModule, a: int, faces: Sequence[int] | None = None) -> Subspace:
    return t_space(m.operators(faces), m.act[a])


def N_e(m: RModule, a: int, faces: Sequence[int] | None = None) -> Subspace:
    return n_space(m.operators(faces), m.act[a])


def i_upper_star(m: RModule, a: int, faces: Sequence[int] | None = None) -> RModule:
    return quotient(m, T_e(m, a, faces)).validated()


def i_upper_shriek(m: RModule, a: int, faces: Sequence[int] | None = None) -> RModule:
    return submodule(m, N_e(m, a, faces)).validated()


def i_star(m: RModule) -> RModule:
    """Regard ``m`` as a module supported on the closed part; every chamber must act by zero."""
    bad = [m.poset.name(c) for c in m.poset.chambers if not m.act[c].is_zero()]
    if bad:
        raise NotSupportedOnClosed(f"chamber idempotents do not vanish: {', '.join(bad)}")
    return m


def intermediate_extension_from(
    n: RModule, a: int, faces: Sequence[int] | None = None, loops: Sequence[Word] | None = None
) -> RModule:
    """``T_e(N) / N_e(T_e(N))`` for ``e = e_a``, with its defining properties asserted.

    ``faces`` limits the operators to a subset of faces (used inside a flat);
    ``loops`` are the words on which the open restriction is compared.
    """
    n.require_valid()
    t = T_e(n, a, faces)
    tm = submodule(n, t).validated()
    nt = N_e(tm, a, faces)
    p = quotient(tm, nt).validated()
    assert T_e(p, a, faces).dim == p.dim, "i^* of the intermediate extension must vanish"
    assert N_e(p, a, faces).dim == 0, "i^! of the intermediate extension must vanish"
    # e-parts: e N sits inside T_e(N), and projecting modulo N_e(T_e(N)) identifies it with e P
    src = n.image(a)
    to_t = t.coordinate_map() @ src.matrix()
    proj = projection_onto_quotient(nt) @ to_t
    dst = p.image(a)
    assert all(dst.contains(v) for v in proj.columns_tuple())
    x = dst.coordinate_map() @ proj
    ls_n = j_restrict(n, a, loops)
    ls_p = j_restrict(p, a, ls_n.loops)
    assert local_systems_isomorphic(ls_n, ls_p, via=x), "open restriction not preserved"
    return p


# -- supports and flats ---------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SupportReport:
    faces: tuple[int, ...]
    maximal_flats: tuple[Flat, ...]
    closed: bool

    def as_dict(self, poset: FacePoset) -> dict:
        return {
            "faces": [poset.name(c) for c in self.faces],
            "maximal_flats": [sorted(f.hyperplanes) for f in self.maximal_flats],
            "closed": self.closed,
        }


def support(m: RModule) -> SupportReport:
    p = m.poset
    faces = tuple(c for c in range(len(p)) if not m.act[c].is_zero())
    flats = {p.faces[c].zero_set() for c in faces}
    minimal = sorted((h for h in flats if not any(g < h for g in flats)), key=lambda h: sorted(h))
    maximal = tuple(make_flat(p.arrangement, h) for h in minimal)
    closed = set(faces) == set(p.faces_in(maximal))
    return SupportReport(faces, maximal, closed)


def annihilated_by_IZ(m: RModule, flats: Sequence[Flat]) -> bool:
    inside = set(m.poset.faces_in(flats))
    return all(m.act[c].is_zero() for c in range(len(m.poset)) if c not in inside)


def _restriction_for(poset: FacePoset, flat: Flat, mz: RModule | None = None) -> Restriction:
    res = flats_and_restriction(poset, flat)
    if mz is not None and mz.poset.arrangement != res.arrangement:
        raise InvalidModule("module does not live on the restricted arrangement of this flat")
    return res


def _face_map(res: Restriction, sub: FacePoset) -> dict[int, int]:
    """Index in ``sub`` -> ambient index, matching faces by sign vector."""
    by_signs = {res.poset.faces[i].signs: amb for i, amb in enumerate(res.embedding)}
    return {i: by_signs[f.signs] for i, f in enumerate(sub.faces)}


def embed_word(word: Word, fmap: dict[int, int]) -> Word:
    return Word(fmap[word.start], tuple(Letter(fmap[x.source], fmap[x.target], x.sign) for x in word.letters))


def rho_pullback(poset: FacePoset, flat: Flat, mz: RModule) -> RModule:
    """Module on the ambient arrangement killed by every face outside the flat."""
    mz.require_valid()
    res = _restriction_for(poset, flat, mz)
    fmap = _face_map(res, mz.poset)
    zero = Matrix.zeros(mz.dim, mz.dim)
    act = {c: zero for c in range(len(poset))}
    for i, c in fmap.items():
        act[c] = mz.act[i]
    out = RModule(poset, mz.dim, act).validated()
    assert annihilated_by_IZ(out, [flat])
    b = mz.poset.chambers[0]
    ls_z = j_restrict(mz, b)
    ls_x = j_restrict(out, fmap[b], [embed_word(w, fmap) for w in ls_z.loops])
    assert ls_z.matrices == ls_x.matrices, "flat transport changed the open restriction"
    return out


def stratum_faces(poset: FacePoset, flat: Flat) -> list[int]:
    return poset.faces_in([flat])


def ic_on_stratum(poset: FacePoset, flat: Flat, seed: RModule, b: int | None = None) -> RModule:
    """Intermediate extension of the open part of a flat, computed after transport.

    ``b`` is an ambient face that is maximal in the flat; by default the
    image of the first restricted chamber.  The same module computed by
    purifying on the flat first and transporting afterwards is checked to be
    isomorphic.
    """
    res = _restriction_for(poset, flat, seed)
    fmap = _face_map(res, seed.poset)
    inverse_map = {c: i for i, c in fmap.items()}
    if b is None:
        b = fmap[seed.poset.chambers[0]]
    if b not in inverse_map or inverse_map[b] not in seed.poset.chambers:
        raise InvalidModule(f"face {poset.name(b)} is not maximal in the flat")
    pulled = rho_pullback(poset, flat, seed)
    inside = sorted(fmap.values())
    loops = [embed_word(w, fmap) for w in default_loops(seed.poset, inverse_map[b])]
    p = intermediate_extension_from(pulled, b, faces=inside, loops=loops)
    assert annihilated_by_IZ(p, [flat])
    before = rho_pullback(poset, flat, intermediate_extension_from(seed, inverse_map[b]))
    assert find_isomorphism(p, before) is not None, "purification does not commute with transport"
    return p


def is_pure(m: RModule, a: int, faces: Sequence[int] | None = None) -> tuple[bool, bool]:
    """``(i^* m == 0, i^! m == 0)`` for ``e = e_a``."""
    return T_e(m, a, faces).dim == m.dim, N_e(m, a, faces).dim == 0
