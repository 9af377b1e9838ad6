"""
Finite-dimensional modules over the face algebra of an arrangement.

An :class:`RModule` is a vector space ``Q^dim`` with one idempotent matrix
``act[C]`` per face ``C``.  The defining relations, checked by
:func:`validate_module`, are

* R1  ``e_C e_C = e_C``;
* R2  ``e_A e_C = e_A e_B e_C`` whenever ``A, B, C`` are collinear;
* R3  ``e_A e_B = e_B = e_B e_A`` whenever ``A <= B``;

together with ``e_0 = 1`` for the smallest face and invertibility of
``e_A e_B e_A + (1 - e_A)`` for every opposing pair; the inverses ``s_AB``
are cached on the module.

The equivalent quiver-side description is a :class:`DoubleRep`; the functors
:func:`collapse` and :func:`expand` convert between the two.
"""

from __future__ import annotations

import dataclasses
import random
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .arrangement import Arrangement, FacePoset, enumerate_faces
from .errors import InvalidModule, NotInA, Singular, ValidationFailed
from .linalg import (
    Matrix,
    Subspace,
    block_diag,
    determinant,
    image_basis,
    inverse,
    kernel_basis,
    kron,
    to_scalar,
)


@dataclasses.dataclass
class Report:
    """Outcome of a relation sweep: which instances were checked and which failed."""

    title: str
    checked: int = 0
    failures: list[str] = dataclasses.field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, condition: bool, message: str):
        self.checked += 1
        if not condition:
            self.failures.append(message)

    def summary(self) -> str:
        head = f"{self.title}: {'pass' if self.ok else 'FAIL'} ({self.checked} checks, {len(self.failures)} failures)"
        return "\n".join([head] + [f"  {m}" for m in self.failures])

    def as_dict(self) -> dict:
        return {"title": self.title, "ok": self.ok, "checked": self.checked, "failures": list(self.failures)}


class RModule:
    """Idempotent actions ``act[C]`` of every face on ``Q^dim``.

    Construct freely, then call :func:`validate_module` (or use
    :meth:`validated`) to check the relations and fill ``inverses``.
    """

    def __init__(self, poset: FacePoset, dim: int, act: Mapping[int, Matrix]):
        self.poset = poset
        self.dim = dim
        self.act = {c: act[c] for c in range(len(poset))}
        for c, m in self.act.items():
            if m.shape != (dim, dim):
                raise InvalidModule(f"action of face {poset.name(c)} has shape {m.shape}, expected {(dim, dim)}")
        self.inverses: dict[tuple[int, int], Matrix] | None = None

    def __repr__(self):
        state = "validated" if self.inverses is not None else "unvalidated"
        return f"RModule(dim={self.dim}, faces={len(self.poset)}, {state})"

    def e(self, face: int | str) -> Matrix:
        if isinstance(face, str):
            face = self.poset.face_index(face)
        return self.act[face]

    def validated(self) -> "RModule":
        report = validate_module(self)
        if not report.ok:
            raise ValidationFailed(report)
        return self

    def require_valid(self):
        if self.inverses is None:
            report = validate_module(self)
            if not report.ok:
                raise InvalidModule(report.summary())

    def s(self, a: int, b: int) -> Matrix:
        """Inverse of ``e_a e_b e_a + (1 - e_a)`` for opposing ``a``, ``b``."""
        self.require_valid()
        return self.inverses[(a, b)]

    def operators(self, faces: Iterable[int] | None = None) -> list[Matrix]:
        """Every generator and cached localization inverse, optionally limited to ``faces``."""
        self.require_valid()
        keep = set(range(len(self.poset))) if faces is None else set(faces)
        ops = [self.act[c] for c in sorted(keep)]
        ops += [m for (a, b), m in sorted(self.inverses.items()) if a in keep and b in keep]
        return ops

    def image(self, face: int) -> Subspace:
        return image_basis(self.act[face])

    def transformed(self, basis: Matrix, coords: Matrix) -> "RModule":
        """Induced module on a subquotient: ``coords @ act @ basis`` for each face."""
        act = {c: coords @ m @ basis for c, m in self.act.items()}
        return RModule(self.poset, basis.cols, act)

    def __eq__(self, other):
        if not isinstance(other, RModule):
            return NotImplemented
        return self.poset is other.poset and self.dim == other.dim and self.act == other.act

    __hash__ = None


def validate_module(m: RModule) -> Report:
    """Check unit, R1, R2, R3 and invertibility of localization elements.

    On success the inverses are cached on ``m``.
    """
    p = m.poset
    name = p.name
    rep = Report("R-module relations")
    ident = Matrix.identity(m.dim)
    rep.check(m.act[p.zero] == ident, f"unit violated: e_{name(p.zero)} is not the identity")
    for c in range(len(p)):
        e = m.act[c]
        rep.check(e @ e == e, f"R1 violated at face {name(c)}")
    for a, b in p.order_pairs:
        if a == b:
            continue  # same as R1
        ea, eb = m.act[a], m.act[b]
        rep.check(ea @ eb == eb and eb @ ea == eb, f"R3 violated at {name(a)} <= {name(b)}")
    products: dict = {}

    def prod(x, y):
        key = (x, y)
        if key not in products:
            products[key] = m.act[x] @ m.act[y]
        return products[key]

    for a, b, c in p.collinear_triples():
        if a == b or b == c:
            continue  # trivially implied by R1
        rep.check(prod(a, c) == m.act[a] @ prod(b, c),
                  f"R2 violated at collinear {name(a)}, {name(b)}, {name(c)}")
    inverses = {}
    for a, b, _w in p.opposing_pairs:
        ea = m.act[a]
        loc = ea @ m.act[b] @ ea + (ident - ea)
        try:
            inverses[(a, b)] = inverse(loc)
            rep.checked += 1
        except Singular:
            rep.check(False, f"localization element for opposing {name(a)}, {name(b)} is not invertible")
    if rep.ok:
        m.inverses = inverses
    return rep


def constant_module(poset: FacePoset, d: int = 1) -> RModule:
    ident = Matrix.identity(d)
    return RModule(poset, d, {c: ident for c in range(len(poset))}).validated()


def one_hyperplane_poset() -> FacePoset:
    return enumerate_faces(Arrangement(1, ((1,),)))


def one_hyperplane_extension(t, s=None, poset: FacePoset | None = None) -> RModule:
    """Block module of dimension ``2k`` on an arrangement with a single hyperplane.

    ``e_+ = [[I, T], [0, 0]]`` and ``e_- = [[0, 0], [S, I]]`` with ``S = I``
    unless given; the loop around the hyperplane acts on ``e_+ M`` by ``T S``.
    For ``1 x 1`` blocks ``(T, S) = (a, b)`` this is the two-parameter family
    with ``e_+ e_- e_+ = ab e_+``.
    """
    t = _as_matrix(t)
    k = t.rows
    s = Matrix.identity(k) if s is None else _as_matrix(s)
    poset = poset or one_hyperplane_poset()
    if poset.arrangement.size != 1:
        raise InvalidModule("one_hyperplane_extension needs an arrangement with exactly one hyperplane")
    ident, zero = Matrix.identity(k), Matrix.zeros(k, k)
    plus = _blocks([[ident, t], [zero, zero]])
    minus = _blocks([[zero, zero], [s, ident]])
    act = {
        poset.face_index("+"): plus,
        poset.face_index("-"): minus,
        poset.face_index("0"): Matrix.identity(2 * k),
    }
    return RModule(poset, 2 * k, act).validated()


def ab_module(a, b, poset: FacePoset | None = None) -> RModule:
    """The scalar ``(a, b)`` member of :func:`one_hyperplane_extension`."""
    return one_hyperplane_extension([[a]], [[b]], poset=poset)


def _as_matrix(x) -> Matrix:
    if isinstance(x, Matrix):
        return x
    if isinstance(x, (int, Fraction, str)):
        return Matrix([[x]])
    return Matrix(x)


def _blocks(grid: Sequence[Sequence[Matrix]]) -> Matrix:
    rows = []
    for brow in grid:
        for i in range(brow[0].rows):
            rows.append(sum((b.row(i) for b in brow), ()))
    return Matrix(rows)


def direct_sum(m1: RModule, m2: RModule) -> RModule:
    if m1.poset is not m2.poset:
        raise InvalidModule("direct sum needs modules over the same poset")
    act = {c: block_diag(m1.act[c], m2.act[c]) for c in m1.act}
    return RModule(m1.poset, m1.dim + m2.dim, act).validated()


_PRODUCT_POSETS: dict = {}


def product_poset(p1: FacePoset, p2: FacePoset) -> FacePoset:
    key = (id(p1), id(p2))
    hit = _PRODUCT_POSETS.get(key)
    if hit is None or hit[0] is not p1 or hit[1] is not p2:
        hit = (p1, p2, enumerate_faces(p1.arrangement.product(p2.arrangement)))
        _PRODUCT_POSETS[key] = hit
    return hit[2]


def external_tensor(m1: RModule, m2: RModule, poset: FacePoset | None = None) -> RModule:
    """Module on the product arrangement with ``e_(C1, C2) = e_C1 (x) e_C2``."""
    poset = poset or product_poset(m1.poset, m2.poset)
    n1 = m1.poset.arrangement.size
    act = {}
    for i, face in enumerate(poset.faces):
        c1 = m1.poset.index[face.signs[:n1]]
        c2 = m2.poset.index[face.signs[n1:]]
        act[i] = kron(m1.act[c1], m2.act[c2])
    return RModule(poset, m1.dim * m2.dim, act).validated()


def stalk(m: RModule, p: int, q: int, c: int) -> Subspace:
    """Stalk at the cell ``iP + Q`` of the sheaf attached to face ``C``.

    It is the image of ``e_(C o Q)`` when ``P <= C`` and zero otherwise.
    """
    poset = m.poset
    if not poset.leq(p, c):
        return Subspace.zero(m.dim)
    return m.image(poset.compose(c, q))


# -- morphisms ---------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ModuleMorphism:
    source: RModule
    target: RModule
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise InvalidModule("morphism matrix has the wrong shape")
        for c in self.source.act:
            if self.matrix @ self.source.act[c] != self.target.act[c] @ self.matrix:
                raise InvalidModule(f"matrix does not intertwine the action of {self.source.poset.name(c)}")


def hom_space(m1: RModule, m2: RModule) -> list[ModuleMorphism]:
    """A basis of all ``X`` with ``X e_C = e_C X`` for every face."""
    d1, d2 = m1.dim, m2.dim
    n = d1 * d2
    if n == 0:
        return []
    rows = []
    # unknown X[i][j] sits at index i * d1 + j
    for c in m1.act:
        a, b = m1.act[c], m2.act[c]
        for i in range(d2):
            for j in range(d1):
                row = [Fraction(0)] * n
                for k in range(d1):
                    if a[k, j]:
                        row[i * d1 + k] += a[k, j]
                for k in range(d2):
                    if b[i, k]:
                        row[k * d1 + j] -= b[i, k]
                rows.append(row)
    kernel = kernel_basis(Matrix(rows, n))
    out = []
    for v in kernel.basis:
        x = Matrix([v[i * d1:(i + 1) * d1] for i in range(d2)], d1)
        out.append(ModuleMorphism(m1, m2, x))
    return out


def find_isomorphism(m1: RModule, m2: RModule, tries: int = 20, seed: int = 0) -> Matrix | None:
    """An invertible intertwiner, searched among random combinations of a hom basis.

    A random rational combination of a basis is invertible with high
    probability as soon as any member of the span is; None means no
    isomorphism was found.
    """
    if m1.dim != m2.dim:
        return None
    if m1.dim == 0:
        return Matrix.zeros(0, 0)
    basis = [h.matrix for h in hom_space(m1, m2)]
    if not basis:
        return None
    rng = random.Random(seed)
    for _ in range(tries):
        x = Matrix.zeros(m2.dim, m1.dim)
        for b in basis:
            x = x + b.scale(Fraction(rng.randint(-50, 50), rng.randint(1, 7)))
        if determinant(x) != 0:
            return x
    return None


def isomorphic(m1: RModule, m2: RModule) -> bool:
    return find_isomorphism(m1, m2) is not None


# -- double representations --------------------------------------------------


class DoubleRep:
    """Spaces ``E_C`` with ``gamma[(C', C)]: E_C' -> E_C`` and ``delta[(C, C')]: E_C -> E_C'`` for ``C' <= C``."""

    def __init__(self, poset: FacePoset, dims: Mapping[int, int], gamma: Mapping, delta: Mapping):
        self.poset = poset
        self.dims = dict(dims)
        self.gamma = dict(gamma)
        self.delta = dict(delta)

    def phi(self, a: int, b: int, via: int | None = None) -> Matrix:
        c = self.poset.zero if via is None else via
        return self.gamma[(c, b)] @ self.delta[(a, c)]


def validate_double_rep(e: DoubleRep) -> Report:
    """Identities, composition laws, then monotonicity, transitivity, invertibility."""
    p = e.poset
    name = p.name
    rep = Report("double representation axioms")
    for c in range(len(p)):
        ident = Matrix.identity(e.dims[c])
        rep.check(e.gamma[(c, c)] == ident and e.delta[(c, c)] == ident, f"identity maps fail at {name(c)}")
    for c1, c2 in p.order_pairs:
        rep.check(e.gamma[(c1, c2)].shape == (e.dims[c2], e.dims[c1]), f"gamma shape wrong at {name(c1)} <= {name(c2)}")
        rep.check(e.delta[(c2, c1)].shape == (e.dims[c1], e.dims[c2]), f"delta shape wrong at {name(c1)} <= {name(c2)}")
    if not rep.ok:
        return rep
    for c1, c2 in p.order_pairs:
        for c3 in range(len(p)):
            if c2 != c3 and c1 != c2 and p.leq(c2, c3):
                rep.check(e.gamma[(c2, c3)] @ e.gamma[(c1, c2)] == e.gamma[(c1, c3)],
                          f"gamma composition fails on {name(c1)} <= {name(c2)} <= {name(c3)}")
                rep.check(e.delta[(c2, c1)] @ e.delta[(c3, c2)] == e.delta[(c3, c1)],
                          f"delta composition fails on {name(c1)} <= {name(c2)} <= {name(c3)}")
    for c1, c2 in p.order_pairs:
        rep.check(e.gamma[(c1, c2)] @ e.delta[(c2, c1)] == Matrix.identity(e.dims[c2]),
                  f"monotonicity fails at {name(c1)} <= {name(c2)}")
    if not rep.ok:
        return rep
    n = len(p)
    for a in range(n):
        for b in range(n):
            ref = e.phi(a, b)
            for c in range(n):
                if p.leq(c, a) and p.leq(c, b) and c != p.zero:
                    rep.check(e.phi(a, b, via=c) == ref,
                              f"phi_{name(a)},{name(b)} depends on the lower bound {name(c)}")
    for a, b, c in p.collinear_triples():
        rep.check(e.phi(a, c) == e.phi(b, c) @ e.phi(a, b),
                  f"transitivity fails at collinear {name(a)}, {name(b)}, {name(c)}")
    for a, b, _w in p.opposing_pairs:
        ph = e.phi(a, b)
        rep.check(ph.is_square() and determinant(ph) != 0 if ph.rows else ph.shape == (0, 0),
                  f"invertibility fails at opposing {name(a)}, {name(b)}")
    return rep


def collapse(e: DoubleRep) -> RModule:
    """Functor M: the space ``E_Z`` with ``e_C = delta_CZ gamma_ZC``."""
    report = validate_double_rep(e)
    if not report.ok:
        raise NotInA(report)
    z = e.poset.zero
    act = {c: e.delta[(c, z)] @ e.gamma[(z, c)] for c in range(len(e.poset))}
    return RModule(e.poset, e.dims[z], act).validated()


def expand(m: RModule) -> DoubleRep:
    """Functor N: ``E_C = e_C M`` with ``gamma`` and ``delta`` given by multiplication by idempotents.

    ``E_C`` carries the canonical basis of the image of ``e_C``; the smallest
    face gets the standard basis so that ``collapse(expand(m)) == m`` exactly.
    """
    m.require_valid()
    p = m.poset
    spaces = {c: m.image(c) for c in range(len(p))}
    spaces[p.zero] = Subspace.full(m.dim)
    basis = {c: s.matrix() for c, s in spaces.items()}
    coords = {c: s.coordinate_map() for c, s in spaces.items()}
    gamma, delta = {}, {}
    for c1, c2 in p.order_pairs:
        gamma[(c1, c2)] = coords[c2] @ m.act[c2] @ basis[c1]
        delta[(c2, c1)] = coords[c1] @ m.act[c1] @ basis[c2]
    e = DoubleRep(p, {c: s.dim for c, s in spaces.items()}, gamma, delta)
    report = validate_double_rep(e)
    assert report.ok, report.summary()
    return e


def nat_iso_check(e: DoubleRep) -> Report:
    """Check that ``phi_CZ = delta_CZ`` identifies ``E`` with ``expand(collapse(E))`` componentwise.

    In ambient coordinates of ``E_Z`` the target maps are multiplications by
    idempotents, so the two commuting squares read
    ``e_C delta_C'Z = delta_CZ gamma_C'C`` and ``e_C' delta_CZ = delta_C'Z delta_CC'``.
    """
    p = e.poset
    name = p.name
    rep = validate_double_rep(e)
    rep.title = "natural isomorphism E -> N(M(E))"
    if not rep.ok:
        return rep
    z = p.zero
    act = {c: e.delta[(c, z)] @ e.gamma[(z, c)] for c in range(len(p))}
    for c in range(len(p)):
        d = e.delta[(c, z)]
        rep.check(act[c] @ d == d, f"image of phi_{name(c)}Z is not inside e_{name(c)} E_Z")
        rep.check(e.gamma[(z, c)] @ d == Matrix.identity(e.dims[c]), f"phi_{name(c)}Z is not injective")
        rep.check(d @ e.gamma[(z, c)] == act[c], f"phi_{name(c)}Z is not onto e_{name(c)} E_Z")
    for c1, c2 in p.order_pairs:
        rep.check(act[c2] @ e.delta[(c1, z)] == e.delta[(c2, z)] @ e.gamma[(c1, c2)],
                  f"gamma square fails at {name(c1)} <= {name(c2)}")
        rep.check(act[c1] @ e.delta[(c2, z)] == e.delta[(c1, z)] @ e.delta[(c2, c1)],
                  f"delta square fails at {name(c1)} <= {name(c2)}")
    return rep


def phi(e: DoubleRep, a: int, b: int) -> Matrix:
    """``phi_AB`` through the smallest face, asserted equal through every common lower bound."""
    ref = e.phi(a, b)
    for c in range(len(e.poset)):
        if e.poset.leq(c, a) and e.poset.leq(c, b):
            assert e.phi(a, b, via=c) == ref
    return ref


def constant_double_rep(poset: FacePoset, d: int = 1) -> DoubleRep:
    ident = Matrix.identity(d)
    pairs = poset.order_pairs
    return DoubleRep(
        poset,
        {c: d for c in range(len(poset))},
        {(a, b): ident for a, b in pairs},
        {(b, a): ident for a, b in pairs},
    )


def ab_double_rep(a, b) -> DoubleRep:
    """One hyperplane: ``E_0 = Q^2``, ``E_+- = Q``, ``delta_+0 = (1, 0)^T``, ``delta_-0 = (0, 1)^T``,
    ``gamma_0+ = (1, a)``, ``gamma_0- = (b, 1)``."""
    p = one_hyperplane_poset()
    zero, plus, minus = p.face_index("0"), p.face_index("+"), p.face_index("-")
    a, b = to_scalar(a), to_scalar(b)
    one = Matrix.identity(1)
    dims = {zero: 2, plus: 1, minus: 1}
    gamma = {(zero, zero): Matrix.identity(2), (plus, plus): one, (minus, minus): one,
             (zero, plus): Matrix([[1, a]]), (zero, minus): Matrix([[b, 1]])}
    delta = {(zero, zero): Matrix.identity(2), (plus, plus): one, (minus, minus): one,
             (plus, zero): Matrix([[1], [0]]), (minus, zero): Matrix([[0], [1]])}
    return DoubleRep(p, dims, gamma, delta)
