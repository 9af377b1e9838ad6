"""
Finite crystallographic Coxeter systems and the equivariant face algebra.

Points of the reflection representation are written in the coordinates
``y_i = alpha_i(x)`` given by the simple roots, so the fundamental chamber is
the positive orthant and every hyperplane normal is the list of coefficients
of a positive root.  For type A2 the arrangement is exactly the braid
arrangement with normals ``(1,0), (0,1), (1,1)``.

An :class:`RWModule` assigns a matrix ``e[I]`` to every subset ``I`` of the
generators (subsets are bitmasks, bit ``i`` for generator ``i``) and a matrix
``s[i]`` to every generator.
"""

from __future__ import annotations

import dataclasses
import itertools
from collections import deque
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

from .arrangement import Arrangement, FacePoset, enumerate_faces
from .errors import IllDefinedAction, InvalidModule, NotCrystallographic, NotFiniteType, Singular, ValidationFailed
from .linalg import Matrix, Subspace, determinant, inverse
from .modules import Report, RModule
from .recollement import n_space, quotient, submodule, t_space
from .salvetti import presentation, evaluate_word, on_image

MAX_ORDER = 100_000

# off-diagonal Cartan entries (a_ij, a_ji) for i < j, by Coxeter label
_CARTAN = {2: (0, 0), 3: (-1, -1), 4: (-1, -2), 6: (-1, -3)}


def coxeter_matrix_of_type(kind: str, rank: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Coxeter matrix for ``A_n``, ``B_n`` (= ``C_n``), ``D_n``, ``G2`` and products like ``"A1xA1"``.

    >>> coxeter_matrix_of_type("B2")
    ((1, 4), (4, 1))
    """
    kind = kind.strip().upper()
    if "X" in kind:
        blocks = [coxeter_matrix_of_type(part) for part in kind.split("X")]
        n = sum(len(b) for b in blocks)
        m = [[2] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i, j in itertools.product(range(len(b)), repeat=2):
                m[off + i][off + j] = b[i][j]
            off += len(b)
        for i in range(n):
            m[i][i] = 1
        return tuple(map(tuple, m))
    if rank is None:
        letter, digits = kind[0], kind[1:]
        if not digits.isdigit():
            raise ValueError(f"cannot read Coxeter type {kind!r}")
        rank = int(digits)
    else:
        letter = kind[0]
    n = rank
    m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]

    def link(i, j, v):
        m[i][j] = m[j][i] = v

    if letter == "A":
        for i in range(n - 1):
            link(i, i + 1, 3)
    elif letter in "BC":
        if n < 2:
            raise ValueError("type B needs rank at least 2")
        for i in range(n - 2):
            link(i, i + 1, 3)
        link(n - 2, n - 1, 4)
    elif letter == "D":
        if n < 4:
            raise ValueError("type D needs rank at least 4")
        for i in range(n - 2):
            link(i, i + 1, 3)
        link(n - 3, n - 1, 3)
    elif letter == "G":
        if n != 2:
            raise ValueError("type G exists only in rank 2")
        link(0, 1, 6)
    else:
        raise NotCrystallographic(f"type {kind} is not crystallographic or not supported")
    return tuple(map(tuple, m))


def cartan_matrix(cox: Sequence[Sequence[int]]) -> Matrix:
    """Integral Cartan matrix with the given Coxeter matrix; raises unless finite and crystallographic."""
    n = len(cox)
    for i in range(n):
        if len(cox[i]) != n or cox[i][i] != 1:
            raise ValueError("Coxeter matrix must be square with ones on the diagonal")
        for j in range(n):
            if cox[i][j] != cox[j][i]:
                raise ValueError("Coxeter matrix must be symmetric")
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    edges = []
    for i, j in itertools.combinations(range(n), 2):
        m = cox[i][j]
        if m in (0, None) or m == float("inf"):
            raise NotFiniteType(f"m({i},{j}) is infinite")
        if m not in _CARTAN:
            raise NotCrystallographic(f"m({i},{j}) = {m} has no rational reflection representation")
        a[i][j], a[j][i] = _CARTAN[m]
        if m != 2:
            edges.append((i, j))
    # finite Coxeter graphs are forests
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            raise NotFiniteType("Coxeter graph has a cycle")
        parent[ri] = rj
    cartan = Matrix(a, n)
    for k in range(1, n + 1):
        if determinant(cartan.submatrix(range(k), range(k))) <= 0:
            raise NotFiniteType("Cartan matrix is not positive definite")
    return cartan


def _primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints)


class CoxeterSystem:
    """Generators ``0 .. n-1`` acting on ``Q^n`` in simple-root coordinates."""

    def __init__(self, coxeter: Sequence[Sequence[int]], name: str | None = None):
        self.coxeter = tuple(tuple(int(x) for x in row) for row in coxeter)
        self.rank = len(self.coxeter)
        self.name = name or "custom"
        self.cartan = cartan_matrix(self.coxeter)
        n = self.rank
        gens = []
        for i in range(n):
            rows = [[Fraction(int(j == k)) for k in range(n)] for j in range(n)]
            for j in range(n):
                rows[j][i] -= self.cartan[i, j]
            gens.append(Matrix(rows, n))
        self.generators = tuple(gens)
        self._parabolic: dict[int, list[int]] = {}
        self._enumerate()
        self._check_orders()

    def __repr__(self):
        return f"CoxeterSystem({self.name}, order={self.order})"

    def _enumerate(self):
        ident = Matrix.identity(self.rank)
        self.elements: list[Matrix] = [ident]
        self.words: list[tuple[int, ...]] = [()]
        self.index: dict[Matrix, int] = {ident: 0}
        queue = deque([0])
        while queue:
            k = queue.popleft()
            for i, g in enumerate(self.generators):
                w = self.elements[k] @ g
                if w not in self.index:
                    if len(self.elements) >= MAX_ORDER:
                        raise NotFiniteType("group enumeration exceeded the size limit")
                    self.index[w] = len(self.elements)
                    self.elements.append(w)
                    self.words.append(self.words[k] + (i,))
                    queue.append(self.index[w])

    def _check_orders(self):
        ident = Matrix.identity(self.rank)
        for i, s in enumerate(self.generators):
            assert s @ s == ident and s != ident
            for j in range(i + 1, self.rank):
                st = s @ self.generators[j]
                m = self.coxeter[i][j]
                assert st ** m == ident and all(st ** k != ident for k in range(1, m))

    @property
    def order(self) -> int:
        return len(self.elements)

    def length(self, w: int) -> int:
        return len(self.words[w])

    def mul(self, u: int, v: int) -> int:
        return self.index[self.elements[u] @ self.elements[v]]

    def inv(self, w: int) -> int:
        return self.index[inverse(self.elements[w])]

    def of_word(self, word: Iterable[int]) -> int:
        m = Matrix.identity(self.rank)
        for i in word:
            m = m @ self.generators[i]
        return self.index[m]

    def word_name(self, w: int) -> str:
        return "".join(f"s{i + 1}" for i in self.words[w]) or "1"

    def parabolic(self, mask: int) -> list[int]:
        """Elements of the subgroup generated by the generators in ``mask``."""
        hit = self._parabolic.get(mask)
        if hit is None:
            hit = self._parabolic[mask] = self._generate(mask)
        return hit

    def _generate(self, mask: int) -> list[int]:
        gens = [g for i, g in enumerate(self.generators) if mask >> i & 1]
        seen = {0}
        queue = deque([0])
        while queue:
            k = queue.popleft()
            for g in gens:
                w = self.index[self.elements[k] @ g]
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return sorted(seen)

    def longest(self, mask: int) -> int:
        return max(self.parabolic(mask), key=lambda w: (self.length(w), -w))

    @cached_property
    def reflections(self) -> list[int]:
        out = set()
        for w in range(self.order):
            for i in range(self.rank):
                out.add(self.mul(self.mul(w, self.index[self.generators[i]]), self.inv(w)))
        return sorted(out, key=lambda r: (self.length(r), self.words[r]))

    @cached_property
    def roots(self) -> list[tuple[int, ...]]:
        """Positive-root normals, simple ones first, one per reflection."""
        ident = Matrix.identity(self.rank)
        out = []
        for r in self.reflections:
            diff = self.elements[r] - ident
            row = next(diff.row(i) for i in range(self.rank) if any(diff.row(i)))
            v = _primitive(row)
            if sum(v) < 0:
                v = tuple(-x for x in v)
            out.append(v)
        simple = [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]
        assert all(v in out for v in simple)
        rest = sorted((v for v in out if v not in simple), key=lambda v: (sum(v), tuple(-x for x in v)))
        return simple + rest


def build_system(spec) -> CoxeterSystem:
    """From a type string (``"A2"``), a ``{"type", "rank"}`` dict, or an explicit Coxeter matrix."""
    if isinstance(spec, str):
        return CoxeterSystem(coxeter_matrix_of_type(spec), spec.upper())
    if isinstance(spec, Mapping):
        if "coxeter_matrix" in spec:
            return CoxeterSystem(spec["coxeter_matrix"], spec.get("name"))
        kind, rank = spec["type"], spec.get("rank")
        label = f"{kind}{rank}" if rank is not None else kind
        return CoxeterSystem(coxeter_matrix_of_type(kind, rank), label.upper())
    return CoxeterSystem(spec)


def reflection_arrangement(w: CoxeterSystem) -> Arrangement:
    return Arrangement(w.rank, tuple(w.roots))


@dataclasses.dataclass
class LambdaPoset:
    """Subsets of the generators (bitmasks) matched with the faces in the closed fundamental chamber."""

    system: CoxeterSystem
    poset: FacePoset
    face_of: dict[int, int]
    chamber: int

    def subsets(self) -> list[int]:
        return sorted(self.face_of, key=lambda m: (bin(m).count("1"), m))

    def leq(self, i: int, j: int) -> bool:
        """Order of the subset poset: reverse inclusion."""
        return i & j == j


_CACHE: dict = {}


def system_poset(w: CoxeterSystem) -> FacePoset:
    hit = _CACHE.get(("poset", id(w)))
    if hit is None or hit[0] is not w:
        hit = (w, enumerate_faces(reflection_arrangement(w)))
        _CACHE[("poset", id(w))] = hit
    return hit[1]


def act_on_face(w: CoxeterSystem, poset: FacePoset, g: int, face: int) -> int:
    x = w.elements[g].apply(poset.faces[face].witness)
    return poset.index[poset.arrangement.signs_of(x)]


def lambda_iso(w: CoxeterSystem, poset: FacePoset | None = None) -> LambdaPoset:
    """``I -> C_I``: faces of the closed fundamental chamber fixed exactly by ``I``.

    Each assignment is checked by computing the stabilizer of the witness,
    which must be the parabolic subgroup ``W_I``.
    """
    poset = poset or system_poset(w)
    n = w.rank
    chamber = poset.index[tuple([1] * poset.arrangement.size)]
    face_of = {}
    for mask in range(1 << n):
        y = tuple(Fraction(0 if mask >> i & 1 else 1) for i in range(n))
        signs = poset.arrangement.signs_of(y)
        c = poset.index[signs]
        assert poset.leq(c, chamber)
        x = poset.faces[c].witness
        stab = sorted(g for g in range(w.order) if w.elements[g].apply(x) == tuple(x))
        assert stab == w.parabolic(mask), "witness stabilizer differs from the parabolic subgroup"
        face_of[mask] = c
    below = sorted(c for c in range(len(poset)) if poset.leq(c, chamber))
    assert sorted(face_of.values()) == below
    lam = LambdaPoset(w, poset, face_of, chamber)
    for i, j in itertools.product(range(1 << n), repeat=2):
        assert lam.leq(i, j) == poset.leq(face_of[i], face_of[j])
    return lam


def _conjugates_match(w: CoxeterSystem, g: int, j_mask: int, i_mask: int) -> bool:
    gi = w.inv(g)
    image = set()
    for j in range(w.rank):
        if j_mask >> j & 1:
            image.add(w.mul(w.mul(g, w.index[w.generators[j]]), gi))
    target = {w.index[w.generators[i]] for i in range(w.rank) if i_mask >> i & 1}
    return image == target


def opposes_lambda(w: CoxeterSystem, i_mask: int, j_mask: int, g: int, lam: LambdaPoset | None = None) -> bool:
    """``I`` opposes ``J`` through the group element ``g`` (an index into ``w.elements``)."""
    lam = lam or lambda_iso(w)
    ci, cj = bin(i_mask).count("1"), bin(j_mask).count("1")
    if ci != cj:
        return False
    for k in range(1 << w.rank):
        if k & (i_mask | j_mask) != (i_mask | j_mask) or bin(k).count("1") != ci + 1:
            continue
        if g not in w.parabolic(k) or not _conjugates_match(w, g, j_mask, i_mask):
            continue
        c2 = act_on_face(w, lam.poset, g, lam.face_of[j_mask])
        if lam.poset.opposes(lam.face_of[i_mask], c2) == lam.face_of[k]:
            return True
    return False


def opposition_triples(w: CoxeterSystem, lam: LambdaPoset | None = None) -> list[tuple[int, int, int]]:
    lam = lam or lambda_iso(w)
    n = 1 << w.rank
    return [(i, j, g) for i in range(n) for j in range(n) for g in range(w.order) if opposes_lambda(w, i, j, g, lam)]


# -- equivariant modules -----------------------------------------------------


class RWModule:
    def __init__(self, system: CoxeterSystem, dim: int, e: Mapping[int, Matrix], s: Sequence[Matrix]):
        self.system = system
        self.dim = dim
        n = system.rank
        self.e = {mask: e[mask] for mask in range(1 << n)}
        self.s = tuple(s)
        if len(self.s) != n:
            raise InvalidModule(f"expected {n} generator matrices, got {len(self.s)}")
        for m in list(self.e.values()) + list(self.s):
            if m.shape != (dim, dim):
                raise InvalidModule(f"matrix of shape {m.shape} in a module of dimension {dim}")
        self.inverses: dict | None = None

    def __repr__(self):
        return f"RWModule({self.system.name}, dim={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, RWModule):
            return NotImplemented
        return self.system is other.system and self.dim == other.dim and self.e == other.e and self.s == other.s

    __hash__ = None

    def rho(self, g: int) -> Matrix:
        out = Matrix.identity(self.dim)
        for i in self.system.words[g]:
            out = out @ self.s[i]
        return out

    def transformed(self, basis: Matrix, coords: Matrix) -> "RWModule":
        e = {mask: coords @ m @ basis for mask, m in self.e.items()}
        s = [coords @ m @ basis for m in self.s]
        return RWModule(self.system, basis.cols, e, s)

    def validated(self) -> "RWModule":
        rep = validate_rw_module(self)
        if not rep.ok:
            raise ValidationFailed(rep)
        return self

    def require_valid(self):
        if self.inverses is None:
            rep = validate_rw_module(self)
            if not rep.ok:
                raise InvalidModule(rep.summary())

    def operators(self, faces=None) -> list[Matrix]:
        self.require_valid()
        return [self.e[k] for k in sorted(self.e)] + list(self.s) + [self.inverses[k] for k in sorted(self.inverses)]

    @property
    def e_open(self) -> Matrix:
        return self.e[0]


def _mask_name(mask: int, n: int) -> str:
    items = [f"s{i + 1}" for i in range(n) if mask >> i & 1]
    return "{" + ",".join(items) + "}"


def relation5_instances(w: CoxeterSystem):
    """All ``(A|J, w1, J, w2, B|J, w)`` index data meeting the length condition.

    The factorization is ``w = w1 w2``, matching the order of the product
    ``e_(A|J) w1 e_J w2 e_(B|J)``; with every idempotent acting by 1 the
    relation then reduces to ``rho(w1) rho(w2) = rho(w)``.
    """
    n = w.rank
    full = (1 << n) - 1
    out = []
    for i_mask in range(1 << n):
        j_mask = full ^ i_mask
        wi = w.parabolic(i_mask)
        for a_mask in range(1 << n):
            if a_mask & ~i_mask:
                continue
            wa = w.longest(a_mask)
            for b_mask in range(1 << n):
                if b_mask & ~j_mask:
                    continue
                wb = w.longest(b_mask)
                for g in wi:
                    gi = w.inv(g)
                    lhs = w.length(w.mul(w.mul(g, wb), wa))
                    base = w.length(w.mul(w.mul(g, wb), gi)) + w.length(wa)
                    for w1 in wi:
                        w2 = w.mul(w.inv(w1), g)
                        if lhs == base + w.length(w2) + w.length(w1):
                            out.append((a_mask | j_mask, w1, j_mask, w2, b_mask | j_mask, g))
    return out


def validate_rw_module(m: RWModule, lam: LambdaPoset | None = None) -> Report:
    """Relations (1)-(5), unit, and invertibility of the localization elements."""
    w = m.system
    n = w.rank
    full = (1 << n) - 1
    rep = Report("R_W relations")
    ident = Matrix.identity(m.dim)
    name = lambda k: _mask_name(k, n)
    rep.check(m.e[full] == ident, f"unit violated: e_{name(full)} is not the identity")
    for i, j in itertools.product(range(1 << n), repeat=2):
        prod = m.e[i] @ m.e[j]
        rep.check(prod == m.e[i & j], f"relation (1) violated at I={name(i)}, J={name(j)}")
    for mask in range(1 << n):
        for k in range(n):
            if mask >> k & 1:
                rep.check(m.s[k] @ m.e[mask] == m.e[mask] @ m.s[k],
                          f"relation (2) violated at s{k + 1}, I={name(mask)}")
    for k in range(n):
        rep.check(m.s[k] @ m.s[k] == ident, f"relation (3) violated at s{k + 1}")
    for a, b in itertools.combinations(range(n), 2):
        rep.check((m.s[a] @ m.s[b]) ** w.coxeter[a][b] == ident,
                  f"relation (4) violated at s{a + 1}, s{b + 1} (m={w.coxeter[a][b]})")
    if not rep.ok:
        return rep
    rho = [m.rho(g) for g in range(w.order)]
    for left, w1, mid, w2, right, g in relation5_instances(w):
        lhs = m.e[left] @ rho[w1] @ m.e[mid] @ rho[w2] @ m.e[right]
        rhs = m.e[left] @ rho[g] @ m.e[right]
        rep.check(lhs == rhs, f"relation (5) violated at e_{name(left)} {w.word_name(w1)} e_{name(mid)} "
                              f"{w.word_name(w2)} e_{name(right)}")
    lam = lam or lambda_iso(w)
    inverses = {}
    for i_mask, j_mask, g in opposition_triples(w, lam):
        ei = m.e[i_mask]
        # rho(g) e_J rho(g)^-1 is the idempotent of the face g C_J opposite to C_I
        loc = ei @ rho[g] @ m.e[j_mask] @ inverse(rho[g]) @ ei + (ident - ei)
        try:
            inverses[(i_mask, j_mask, g)] = inverse(loc)
            rep.checked += 1
        except Singular:
            rep.check(False, f"localization element for {name(i_mask)} |{w.word_name(g)} {name(j_mask)} is not invertible")
    if rep.ok:
        m.inverses = inverses
    return rep


def trivial_rw_module(w: CoxeterSystem, d: int = 1) -> RWModule:
    ident = Matrix.identity(d)
    return RWModule(w, d, {k: ident for k in range(1 << w.rank)}, [ident] * w.rank).validated()


def sign_rw_module(w: CoxeterSystem) -> RWModule:
    ident = Matrix.identity(1)
    return RWModule(w, 1, {k: ident for k in range(1 << w.rank)}, [-ident] * w.rank).validated()


def a1_example() -> RWModule:
    """Rank one: ``e_{} = [[1,1],[0,0]]``, ``e_{s} = 1``, ``s`` swaps the coordinates."""
    w = build_system("A1")
    return RWModule(w, 2, {0: Matrix([[1, 1], [0, 0]]), 1: Matrix.identity(2)}, [Matrix([[0, 1], [1, 0]])]).validated()


# -- braid restriction and equivariant recollement ---------------------------


@dataclasses.dataclass(frozen=True)
class BraidRep:
    """``e M`` for ``e = e_{}`` with ``sigma_s = e s e`` restricted, one per generator."""

    system: CoxeterSystem
    space: Subspace
    matrices: tuple[Matrix, ...]

    @property
    def dim(self) -> int:
        return self.space.dim

    def braid_report(self) -> Report:
        w = self.system
        rep = Report("braid relations")
        for a, b in itertools.combinations(range(w.rank), 2):
            m = w.coxeter[a][b]
            x, y = self.matrices[a], self.matrices[b]
            lhs = rhs = Matrix.identity(self.dim)
            for k in range(m):
                lhs = lhs @ (x if k % 2 == 0 else y)
                rhs = rhs @ (y if k % 2 == 0 else x)
            rep.check(lhs == rhs, f"braid relation of length {m} fails for s{a + 1}, s{b + 1}")
        return rep

    def as_dict(self) -> dict:
        from .serialize import matrix_to_json

        return {"dim": self.dim, "sigma": {f"s{i + 1}": matrix_to_json(x) for i, x in enumerate(self.matrices)}}


def braid_restrict(m: RWModule) -> BraidRep:
    m.require_valid()
    e = m.e_open
    space = Subspace(m.dim, [e.apply(v) for v in Subspace.full(m.dim).basis])
    coords, basis = space.coordinate_map(), space.matrix()
    mats = []
    for s in m.s:
        x = coords @ e @ s @ e @ basis
        if space.dim and determinant(x) == 0:
            raise InvalidModule("braid generator acts singularly on the open part")
        mats.append(x)
    out = BraidRep(m.system, space, tuple(mats))
    rep = out.braid_report()
    assert rep.ok, rep.summary()
    return out


def rw_T(m: RWModule) -> Subspace:
    return t_space(m.operators(), m.e_open)


def rw_N(m: RWModule) -> Subspace:
    return n_space(m.operators(), m.e_open)


def rw_i_upper_star(m: RWModule) -> RWModule:
    return quotient(m, rw_T(m)).validated()


def rw_i_upper_shriek(m: RWModule) -> RWModule:
    return submodule(m, rw_N(m)).validated()


def _braid_intertwines(x: Matrix, b1: BraidRep, b2: BraidRep) -> bool:
    if b1.dim != b2.dim:
        return False
    if b1.dim and determinant(x) == 0:
        return False
    return all(x @ p == q @ x for p, q in zip(b1.matrices, b2.matrices))


def rw_intermediate_extension_from(n: RWModule) -> RWModule:
    """``T(N) / N(T(N))`` for the open idempotent, with purity and the open part asserted."""
    n.require_valid()
    t = rw_T(n)
    tm = submodule(n, t).validated()
    nt = rw_N(tm)
    p = quotient(tm, nt).validated()
    assert rw_T(p).dim == p.dim, "i^* of the intermediate extension must vanish"
    assert rw_N(p).dim == 0, "i^! of the intermediate extension must vanish"
    from .recollement import projection_onto_quotient

    src = braid_restrict(n)
    dst = braid_restrict(p)
    x = dst.space.coordinate_map() @ projection_onto_quotient(nt) @ t.coordinate_map() @ src.space.matrix()
    assert _braid_intertwines(x, src, dst), "open restriction not preserved"
    return p


def lambda_support(m: RWModule) -> list[int]:
    return [k for k in sorted(m.e) if not m.e[k].is_zero()]


def annihilated_by_lambda(m: RWModule, allowed: Iterable[int]) -> bool:
    keep = set(allowed)
    return all(m.e[k].is_zero() for k in m.e if k not in keep)


# -- bridge to plain modules -------------------------------------------------


def to_plain_module(m: RWModule, lam: LambdaPoset | None = None) -> RModule:
    """Module on the reflection arrangement with ``e_(g C_I) = rho(g) e_I rho(g)^-1``."""
    m.require_valid()
    w = m.system
    lam = lam or lambda_iso(w)
    poset = lam.poset
    act: dict[int, Matrix] = {}
    for g in range(w.order):
        r = m.rho(g)
        ri = inverse(r)
        for mask, c in lam.face_of.items():
            face = act_on_face(w, poset, g, c)
            x = r @ m.e[mask] @ ri
            old = act.setdefault(face, x)
            if old != x:
                raise IllDefinedAction(f"face {poset.name(face)} gets two different actions")
    assert len(act) == len(poset)
    return RModule(poset, m.dim, act).validated()


def chamber_element(w: CoxeterSystem, lam: LambdaPoset, chamber: int) -> int:
    for g in range(w.order):
        if act_on_face(w, lam.poset, g, lam.chamber) == chamber:
            return g
    raise ValueError("not a chamber")


def compatibility_report(m: RWModule, lam: LambdaPoset | None = None) -> Report:
    """Loop monodromies of the plain module agree with products of braid generators.

    A step from chamber ``u A`` to ``u s A`` contributes ``sigma_s``; later
    steps multiply on the left.
    """
    w = m.system
    lam = lam or lambda_iso(w)
    plain = to_plain_module(m, lam)
    braid = braid_restrict(m)
    pres = presentation(lam.poset, lam.chamber)
    rep = Report("plain versus braid monodromy")
    for word in pres.loops:
        expect = Matrix.identity(braid.dim)
        for x in word.letters:
            u = chamber_element(w, lam, x.source)
            v = chamber_element(w, lam, x.target)
            step = w.mul(w.inv(u), v)
            assert w.length(step) == 1
            expect = braid.matrices[w.words[step][0]] @ expect
        got = on_image(plain, lam.chamber, evaluate_word(plain, word))
        # both live on the image of e_{} = e_A in its canonical basis
        rep.check(got == expect, f"loop {word.label(lam.poset)} disagrees")
    return rep
