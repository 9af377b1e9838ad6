"""
Central real hyperplane arrangements and their face posets.

A face is recorded by its sign vector over the hyperplanes (entries in
``{+1, 0, -1}``), an exact rational witness point realizing exactly those
signs, and its codimension.  Faces of a :class:`FacePoset` are addressed by
their integer index; indices follow the sort order of the sign strings
(alphabet ``+ - 0``), so every listing derived from a poset is deterministic.
"""

from __future__ import annotations

import dataclasses
import itertools
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotAFlat, NotCodim2
from .feasibility import sign_constraints, strict_solve
from .linalg import Matrix, kernel_basis, to_scalar

SIGN_CHARS = {1: "+", -1: "-", 0: "0"}
CHAR_SIGNS = {"+": 1, "-": -1, "0": 0}


def sign_string(signs: Sequence[int]) -> str:
    return "".join(SIGN_CHARS[s] for s in signs)


def parse_signs(name: str) -> tuple[int, ...]:
    try:
        return tuple(CHAR_SIGNS[c] for c in name)
    except KeyError as exc:
        raise ValueError(f"bad sign string {name!r}") from exc


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _dot(f, x):
    return sum((a * b for a, b in zip(f, x)), Fraction(0))


@dataclasses.dataclass(frozen=True)
class Arrangement:
    """Linear hyperplanes ``{x : f_H . x = 0}`` in ``Q^dim``."""

    dim: int
    normals: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        normals = tuple(tuple(to_scalar(x) for x in f) for f in self.normals)
        object.__setattr__(self, "normals", normals)
        for i, f in enumerate(normals):
            if len(f) != self.dim:
                raise DimensionMismatch(f"hyperplane {i} has {len(f)} coordinates, expected {self.dim}")
            if not any(f):
                raise ValueError(f"hyperplane {i} has a zero normal")
        for i, j in itertools.combinations(range(len(normals)), 2):
            if Matrix([normals[i], normals[j]]).rank() < 2:
                raise ValueError(f"hyperplanes {i} and {j} coincide")

    @property
    def size(self) -> int:
        return len(self.normals)

    def signs_of(self, x: Sequence) -> tuple[int, ...]:
        return tuple(_sgn(_dot(f, x)) for f in self.normals)

    def permuted(self, order: Sequence[int]) -> "Arrangement":
        return Arrangement(self.dim, tuple(self.normals[i] for i in order))

    def product(self, other: "Arrangement") -> "Arrangement":
        """Arrangement on ``Q^(dim + other.dim)`` with hyperplanes of ``self`` first."""
        z1 = (Fraction(0),) * other.dim
        z0 = (Fraction(0),) * self.dim
        return Arrangement(
            self.dim + other.dim, tuple(f + z1 for f in self.normals) + tuple(z0 + g for g in other.normals)
        )


@dataclasses.dataclass(frozen=True)
class Face:
    signs: tuple[int, ...]
    witness: tuple[Fraction, ...]
    codim: int

    @property
    def name(self) -> str:
        return sign_string(self.signs)

    def zero_set(self) -> frozenset[int]:
        return frozenset(i for i, s in enumerate(self.signs) if s == 0)

    def __str__(self):
        return self.name


def _codim(arr: Arrangement, signs: Sequence[int]) -> int:
    rows = [arr.normals[i] for i, s in enumerate(signs) if s == 0]
    return Matrix(rows, arr.dim).rank() if rows else 0


def enumerate_faces(arr: Arrangement) -> "FacePoset":
    """All faces, by inserting hyperplanes one at a time.

    Each existing face is split into the feasible members of ``{+, 0, -}``
    for the new hyperplane; feasibility is decided exactly.
    """
    cells: list[tuple[int, ...]] = [()]
    for h in range(arr.size):
        normals = arr.normals[: h + 1]
        nxt = []
        for signs in cells:
            for s in (1, 0, -1):
                cand = signs + (s,)
                eqs, gts = sign_constraints(normals, cand)
                if strict_solve(eqs, gts, arr.dim) is not None:
                    nxt.append(cand)
        cells = nxt
    faces = []
    for signs in cells:
        eqs, gts = sign_constraints(arr.normals, signs)
        witness = strict_solve(eqs, gts, arr.dim)
        assert witness is not None and arr.signs_of(witness) == signs
        faces.append(Face(signs, witness, _codim(arr, signs)))
    return FacePoset(arr, faces)


class FacePoset:
    """The faces of an arrangement, ordered by closure inclusion."""

    def __init__(self, arrangement: Arrangement, faces: Iterable[Face]):
        self.arrangement = arrangement
        self.faces: tuple[Face, ...] = tuple(sorted(faces, key=lambda f: f.name))
        self.index = {f.signs: i for i, f in enumerate(self.faces)}
        if len(self.index) != len(self.faces):
            raise ValueError("duplicate faces")
        zero = tuple([0] * arrangement.size)
        self.zero = self.index[zero]
        self.chambers = tuple(i for i, f in enumerate(self.faces) if 0 not in f.signs)
        self._collinear: dict = {}

    def __len__(self):
        return len(self.faces)

    def __repr__(self):
        return f"FacePoset({len(self.faces)} faces, {len(self.chambers)} chambers)"

    def names(self) -> list[str]:
        return [f.name for f in self.faces]

    def face_index(self, name: str | Sequence[int]) -> int:
        signs = parse_signs(name) if isinstance(name, str) else tuple(name)
        try:
            return self.index[signs]
        except KeyError:
            label = name if isinstance(name, str) else sign_string(signs)
            raise KeyError(f"unknown face {label}") from None

    def name(self, i: int) -> str:
        return self.faces[i].name

    def codim(self, i: int) -> int:
        return self.faces[i].codim

    def by_codim(self, c: int) -> list[int]:
        return [i for i, f in enumerate(self.faces) if f.codim == c]

    # -- order --------------------------------------------------------------

    def leq(self, a: int, b: int) -> bool:
        """``a <= b``: every sign of ``a`` is zero or agrees with ``b``."""
        sb = self.faces[b].signs
        return all(x == 0 or x == y for x, y in zip(self.faces[a].signs, sb))

    @cached_property
    def order_pairs(self) -> tuple[tuple[int, int], ...]:
        n = len(self.faces)
        return tuple((a, b) for a in range(n) for b in range(n) if self.leq(a, b))

    @cached_property
    def covers(self) -> tuple[tuple[int, int], ...]:
        return tuple((a, b) for a, b in self.order_pairs if self.codim(a) == self.codim(b) + 1)

    # -- predicates ---------------------------------------------------------

    def collinear(self, a: int, b: int, c: int) -> bool:
        """Some segment meets faces ``a``, ``b``, ``c`` in that order.

        Faces are cones, so this holds iff some ``p in a`` and ``q in c``
        have ``p + q in b``: a strict feasibility problem in ``(p, q)``.
        """
        key = (a, b, c)
        hit = self._collinear.get(key)
        if hit is None:
            hit = self._collinear[key] = self._collinear_uncached(a, b, c)
        return hit

    def _collinear_uncached(self, a: int, b: int, c: int) -> bool:
        sa, sb, sc = self.faces[a].signs, self.faces[b].signs, self.faces[c].signs
        free = False
        for x, y, z in zip(sa, sb, sc):
            if x == -z and x != 0:
                free = True
            elif z == 0 or x == z:
                if y != x:
                    return False
            elif x == 0:
                if y != z:
                    return False
        if not free:
            # every sign of p + q is forced and b matches it; p, q can be chosen independently
            return True
        n = self.arrangement.dim
        zero = (Fraction(0),) * n
        normals = []
        signs = []
        for f, x, y, z in zip(self.arrangement.normals, sa, sb, sc):
            normals.extend([f + zero, zero + f, f + f])
            signs.extend([x, z, y])
        eqs, gts = sign_constraints(normals, signs)
        return strict_solve(eqs, gts, 2 * n) is not None

    def collinear_triples(self) -> list[tuple[int, int, int]]:
        n = len(self.faces)
        return [t for t in itertools.product(range(n), repeat=3) if self.collinear(*t)]

    def opposes(self, a: int, b: int) -> int | None:
        """The common wall through which ``a`` opposes ``b``, or None.

        The wall has codimension one more than ``a`` and ``b``, lies below
        both, and the two faces take opposite signs on every hyperplane
        containing it.
        """
        fa, fb = self.faces[a], self.faces[b]
        if fa.zero_set() != fb.zero_set() or a == b:
            return None
        wall = tuple(x if x == y else 0 for x, y in zip(fa.signs, fb.signs))
        w = self.index.get(wall)
        if w is None or self.codim(w) != fa.codim + 1:
            return None
        return w

    @cached_property
    def opposing_pairs(self) -> tuple[tuple[int, int, int], ...]:
        """All ordered ``(a, b, wall)`` with ``a`` opposing ``b``."""
        out = []
        n = len(self.faces)
        for a in range(n):
            for b in range(n):
                w = self.opposes(a, b)
                if w is not None:
                    out.append((a, b, w))
        return tuple(out)

    def compose(self, c: int, q: int) -> int:
        """Tits product: the sign of ``c`` where nonzero, else that of ``q``.

        Checked against its geometric meaning: ``x + eps * y`` lies in the
        result for witnesses ``x`` of ``c``, ``y`` of ``q`` and small ``eps``.
        """
        fc, fq = self.faces[c], self.faces[q]
        signs = tuple(x if x else y for x, y in zip(fc.signs, fq.signs))
        k = self.index.get(signs)
        assert k is not None, "composition of faces must be a face"
        eps = Fraction(1)
        for f in self.arrangement.normals:
            u, v = _dot(f, fc.witness), _dot(f, fq.witness)
            if u and v:
                eps = min(eps, abs(u) / (2 * abs(v)))
        point = tuple(x + eps * y for x, y in zip(fc.witness, fq.witness))
        assert self.arrangement.signs_of(point) == signs
        return k

    def codim2_cycle(self, f: int) -> list[int]:
        """Chambers above a codimension-2 face, in cyclic order of adjacency."""
        if self.codim(f) != 2:
            raise NotCodim2(f"face {self.name(f)} has codimension {self.codim(f)}")
        around = [c for c in self.chambers if self.leq(f, c)]
        adj = {c: sorted(d for d in around if self.opposes(c, d) is not None) for c in around}
        start = min(around, key=self.name)
        cycle = [start]
        prev, cur = None, start
        while True:
            nbrs = [d for d in adj[cur] if d != prev]
            if prev is None:
                nbrs = sorted(nbrs, key=self.name)
            nxt = nbrs[0]
            if nxt == start:
                break
            cycle.append(nxt)
            prev, cur = cur, nxt
        assert len(cycle) == len(around) and len(cycle) % 2 == 0
        return cycle

    def faces_in(self, flats: Sequence["Flat"]) -> list[int]:
        """Faces contained in the union of the given flats."""
        return [i for i, fc in enumerate(self.faces) if any(fl.hyperplanes <= fc.zero_set() for fl in flats)]

    def flat_of(self, i: int) -> "Flat":
        """The linear span of face ``i`` as a flat."""
        return make_flat(self.arrangement, self.faces[i].zero_set())


@dataclasses.dataclass(frozen=True)
class Flat:
    """An intersection of arrangement hyperplanes.

    ``hyperplanes`` is closed: it lists every hyperplane containing the
    intersection.  ``basis`` spans the subspace (columns of a ``dim x k`` matrix).
    """

    hyperplanes: frozenset[int]
    basis: Matrix

    @property
    def dim(self) -> int:
        return self.basis.cols


def make_flat(arr: Arrangement, indices: Iterable[int]) -> Flat:
    """The flat cut out by ``indices``; raises NotAFlat unless the set is closed."""
    idx = frozenset(indices)
    if any(i < 0 or i >= arr.size for i in idx):
        raise NotAFlat(f"hyperplane indices {sorted(idx)} out of range for {arr.size} hyperplanes")
    rows = [arr.normals[i] for i in sorted(idx)]
    space = kernel_basis(Matrix(rows, arr.dim)) if rows else kernel_basis(Matrix.zeros(0, arr.dim))
    basis = space.matrix()
    containing = frozenset(
        h for h, f in enumerate(arr.normals) if all(_dot(f, basis.column(j)) == 0 for j in range(basis.cols))
    )
    if containing != idx:
        raise NotAFlat(
            f"hyperplanes {sorted(idx)} do not form a flat: their intersection also lies in "
            f"{sorted(containing - idx)} (use {sorted(containing)})"
        )
    return Flat(idx, basis)


def close_flat(arr: Arrangement, indices: Iterable[int]) -> Flat:
    """Like :func:`make_flat` but first adds every hyperplane containing the intersection."""
    idx = frozenset(indices)
    rows = [arr.normals[i] for i in sorted(idx)]
    basis = kernel_basis(Matrix(rows, arr.dim) if rows else Matrix.zeros(0, arr.dim)).matrix()
    containing = frozenset(
        h for h, f in enumerate(arr.normals) if all(_dot(f, basis.column(j)) == 0 for j in range(basis.cols))
    )
    return make_flat(arr, containing)


@dataclasses.dataclass(frozen=True)
class Restriction:
    """A flat ``Z`` with its restricted arrangement and the face embedding.

    ``embedding[i]`` is the index in the ambient poset of face ``i`` of
    ``poset``; ``orientation[h]`` gives, for an ambient hyperplane ``h`` not
    containing ``Z``, the pair ``(restricted index, +1/-1)``.
    """

    flat: Flat
    arrangement: Arrangement
    poset: FacePoset
    ambient: FacePoset
    embedding: tuple[int, ...]
    orientation: dict

    def pullback_index(self, ambient_face: int) -> int | None:
        try:
            return self.embedding.index(ambient_face)
        except ValueError:
            return None


def flats_and_restriction(poset: FacePoset, flat: Flat) -> Restriction:
    """Restrict the arrangement to ``flat`` in the coordinates of ``flat.basis``."""
    arr = poset.arrangement
    basis = flat.basis
    k = basis.cols
    restricted: list[tuple] = []
    orientation = {}
    for h, f in enumerate(arr.normals):
        if h in flat.hyperplanes:
            continue
        g = tuple(_dot(f, basis.column(j)) for j in range(k))
        for r, old in enumerate(restricted):
            if Matrix([old, g]).rank() < 2:
                ratio = next(x / y for x, y in zip(g, old) if y)
                orientation[h] = (r, 1 if ratio > 0 else -1)
                break
        else:
            orientation[h] = (len(restricted), 1)
            restricted.append(g)
    sub = Arrangement(k, tuple(restricted))
    sub_poset = enumerate_faces(sub)
    embedding = []
    for face in sub_poset.faces:
        x = basis.apply(face.witness)
        amb = arr.signs_of(x)
        for h, (r, o) in orientation.items():
            assert amb[h] == o * face.signs[r]
        embedding.append(poset.index[amb])
    expected = sorted(poset.faces_in([flat]))
    assert sorted(embedding) == expected, "restriction must biject onto the faces lying in the flat"
    return Restriction(flat, sub, sub_poset, poset, tuple(embedding), orientation)


# Bundled arrangements used across the test-suite and the CLI.

def one_line() -> Arrangement:
    return Arrangement(1, ((1,),))


def boolean(n: int = 2) -> Arrangement:
    return Arrangement(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def braid_a2() -> Arrangement:
    return Arrangement(2, ((1, 0), (0, 1), (1, 1)))
