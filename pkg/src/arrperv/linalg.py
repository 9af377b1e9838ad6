"""
Exact linear algebra over the rationals.

Scalars are :class:`fractions.Fraction`.  A :class:`Matrix` is an immutable
grid of fractions; a :class:`Subspace` of ``Q^n`` is stored through the reduced
row echelon form of a spanning set, so two subspaces compare equal exactly
when they are equal as sets, and the coordinates of a vector in the stored
basis are read off at the pivot positions.

Every function here is pure.  No floating point is used anywhere.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .errors import DimensionMismatch, Singular

Scalar = Fraction


def to_scalar(x) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class Matrix:
    """An immutable ``rows x cols`` matrix of Fractions.

    Zero-sized matrices are allowed and keep their shape, so ``Matrix.zeros(0, 3)``
    composes correctly with a ``3 x k`` matrix.
    """

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, data: Iterable[Iterable], cols: int | None = None):
        grid = tuple(tuple(to_scalar(x) for x in row) for row in data)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        for row in grid:
            if len(row) != cols:
                raise DimensionMismatch(f"ragged matrix: expected rows of length {cols}")
        self.rows = len(grid)
        self.cols = cols
        self._data = grid
        self._hash = None

    @classmethod
    def _raw(cls, grid: tuple, cols: int) -> "Matrix":
        m = cls.__new__(cls)
        m.rows = len(grid)
        m.cols = cols
        m._data = grid
        m._hash = None
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        zero = Fraction(0)
        return cls._raw(tuple((zero,) * cols for _ in range(rows)), cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        columns = [tuple(to_scalar(x) for x in c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise DimensionMismatch("column has the wrong length")
        return cls._raw(tuple(tuple(c[i] for c in columns) for i in range(rows)), len(columns))

    @classmethod
    def diag(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        zero = Fraction(0)
        return cls._raw(
            tuple(tuple(to_scalar(entries[i]) if i == j else zero for j in range(n)) for i in range(n)), n
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def __iter__(self):
        return iter(self._data)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._data)
        return f"Matrix([{body}], cols={self.cols})"

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns_tuple()
        zero = Fraction(0)
        grid = tuple(
            tuple(sum((a * b for a, b in zip(r, c) if a and b), zero) for c in ocols) for r in self._data
        )
        return Matrix._raw(grid, other.cols)

    def columns_tuple(self) -> tuple:
        return tuple(zip(*self._data)) if self.rows else tuple(() for _ in range(self.cols))

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.cols:
            raise DimensionMismatch("vector has the wrong length")
        zero = Fraction(0)
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), zero) for r in self._data)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return Matrix._raw(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
                           self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot subtract {self.shape} and {other.shape}")
        return Matrix._raw(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
                           self.cols)

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self._data), self.cols)

    def scale(self, c) -> "Matrix":
        c = to_scalar(c)
        return Matrix._raw(tuple(tuple(c * a for a in r) for r in self._data), self.cols)

    def __mul__(self, c):
        if isinstance(c, Matrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(self.columns_tuple(), self.rows)

    def is_zero(self) -> bool:
        return all(not a for r in self._data for a in r)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_identity(self) -> bool:
        return self.is_square() and self == Matrix.identity(self.rows)

    def rank(self) -> int:
        return len(rref(self)[1])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._raw(tuple(tuple(self._data[i][j] for j in cols) for i in rows), len(cols))

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square():
            raise DimensionMismatch("only square matrices have powers")
        if k < 0:
            return inverse(self) ** (-k)
        result = Matrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result


def hstack(mats: Sequence[Matrix], rows: int | None = None) -> Matrix:
    if not mats:
        return Matrix.zeros(rows or 0, 0)
    r = mats[0].rows
    if any(m.rows != r for m in mats):
        raise DimensionMismatch("hstack needs equal row counts")
    return Matrix._raw(tuple(tuple(itertools.chain.from_iterable(m.row(i) for m in mats)) for i in range(r)),
                       sum(m.cols for m in mats))


def vstack(mats: Sequence[Matrix], cols: int | None = None) -> Matrix:
    if not mats:
        return Matrix.zeros(0, cols or 0)
    c = mats[0].cols
    if any(m.cols != c for m in mats):
        raise DimensionMismatch("vstack needs equal column counts")
    return Matrix._raw(tuple(itertools.chain.from_iterable(m._data for m in mats)), c)


def block_diag(*mats: Matrix) -> Matrix:
    cols = sum(m.cols for m in mats)
    zero = Fraction(0)
    grid = []
    offset = 0
    for m in mats:
        for r in m:
            grid.append((zero,) * offset + r + (zero,) * (cols - offset - m.cols))
        offset += m.cols
    return Matrix._raw(tuple(grid), cols)


def kron(a: Matrix, b: Matrix) -> Matrix:
    grid = tuple(
        tuple(x * y for x in a.row(i) for y in b.row(k)) for i in range(a.rows) for k in range(b.rows)
    )
    return Matrix._raw(grid, a.cols * b.cols)


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns.

    >>> r, piv = rref(Matrix([[1, 2], [2, 4]]))
    >>> r.tolist(), piv
    ([[Fraction(1, 1), Fraction(2, 1)], [Fraction(0, 1), Fraction(0, 1)]], (0,))
    """
    rows = [list(r) for r in m]
    nrows, ncols = m.rows, m.cols
    pivots = []
    pr = 0
    for c in range(ncols):
        if pr == nrows:
            break
        sel = next((i for i in range(pr, nrows) if rows[i][c]), None)
        if sel is None:
            continue
        rows[pr], rows[sel] = rows[sel], rows[pr]
        p = rows[pr][c]
        if p != 1:
            rows[pr] = [x / p for x in rows[pr]]
        prow = rows[pr]
        for i in range(nrows):
            if i != pr and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], prow)]
        pivots.append(c)
        pr += 1
    return Matrix._raw(tuple(tuple(r) for r in rows), ncols), tuple(pivots)


def kernel_basis(m: Matrix) -> "Subspace":
    r, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    vectors = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i, f]
        vectors.append(v)
    return Subspace(m.cols, vectors)


def image_basis(m: Matrix) -> "Subspace":
    return Subspace(m.rows, m.columns_tuple())


def inverse(m: Matrix) -> Matrix:
    """Exact inverse; raises :class:`Singular` for rank-deficient input."""
    if not m.is_square():
        raise DimensionMismatch(f"cannot invert a {m.shape} matrix")
    n = m.rows
    aug = hstack([m, Matrix.identity(n)])
    r, pivots = rref(aug)
    if pivots[:n] != tuple(range(n)):
        raise Singular("matrix is not invertible")
    return r.submatrix(range(n), range(n, 2 * n))


def is_invertible(m: Matrix) -> bool:
    return m.is_square() and m.rank() == m.rows


def determinant(m: Matrix) -> Fraction:
    if not m.is_square():
        raise DimensionMismatch("determinant of a non-square matrix")
    rows = [list(r) for r in m]
    n = m.rows
    det = Fraction(1)
    for c in range(n):
        sel = next((i for i in range(c, n) if rows[i][c]), None)
        if sel is None:
            return Fraction(0)
        if sel != c:
            rows[c], rows[sel] = rows[sel], rows[c]
            det = -det
        p = rows[c][c]
        det *= p
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] / p
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return det


def solve(m: Matrix, rhs: Matrix) -> Matrix | None:
    """One solution ``x`` of ``m @ x == rhs`` or None if the system is inconsistent."""
    if m.rows != rhs.rows:
        raise DimensionMismatch("right-hand side has the wrong number of rows")
    aug = hstack([m, rhs])
    r, pivots = rref(aug)
    if any(p >= m.cols for p in pivots):
        return None
    x = [[Fraction(0)] * rhs.cols for _ in range(m.cols)]
    for i, p in enumerate(pivots):
        for j in range(rhs.cols):
            x[p][j] = r[i, m.cols + j]
    return Matrix(x, rhs.cols)


class Subspace:
    """A subspace of ``Q^ambient_dim``.

    ``basis`` holds the rows of the reduced row echelon form of the spanning
    set, so the stored basis is canonical and ``pivots[i]`` is the coordinate
    at which basis vector ``i`` has its leading one.
    """

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        vectors = [tuple(to_scalar(x) for x in v) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector of length {len(v)} in Q^{ambient_dim}")
        if vectors:
            r, pivots = rref(Matrix._raw(tuple(vectors), ambient_dim))
            self.basis = tuple(r.row(i) for i in range(len(pivots)))
            self.pivots = pivots
        else:
            self.basis = ()
            self.pivots = ()
        self.ambient_dim = ambient_dim

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}/{self.ambient_dim}, basis={[[str(x) for x in v] for v in self.basis]})"

    def matrix(self) -> Matrix:
        """Basis vectors as the columns of an ``ambient_dim x dim`` matrix."""
        return Matrix.from_columns(self.basis, self.ambient_dim)

    def coordinates(self, v: Sequence) -> tuple:
        """Coordinates of ``v`` (assumed to lie in the subspace) in the stored basis."""
        return tuple(to_scalar(v[p]) for p in self.pivots)

    def coordinate_map(self) -> Matrix:
        """The ``dim x ambient_dim`` left inverse of :meth:`matrix` selecting pivot coordinates."""
        zero, one = Fraction(0), Fraction(1)
        return Matrix._raw(
            tuple(tuple(one if j == p else zero for j in range(self.ambient_dim)) for p in self.pivots),
            self.ambient_dim,
        )

    def contains(self, v: Sequence) -> bool:
        v = [to_scalar(x) for x in v]
        for b, p in zip(self.basis, self.pivots):
            c = v[p]
            if c:
                v = [x - c * y for x, y in zip(v, b)]
        return not any(v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("subspaces of different ambient spaces")
        return Subspace(self.ambient_dim, self.basis + other.basis)

    def annihilator(self) -> Matrix:
        """A matrix whose kernel is exactly this subspace."""
        if not self.basis:
            return Matrix.identity(self.ambient_dim)
        ann = kernel_basis(Matrix._raw(self.basis, self.ambient_dim))
        return Matrix._raw(ann.basis, self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("subspaces of different ambient spaces")
        return kernel_basis(vstack([self.annihilator(), other.annihilator()], self.ambient_dim))

    def image(self, op: Matrix) -> "Subspace":
        if op.cols != self.ambient_dim:
            raise DimensionMismatch("operator does not act on this ambient space")
        return Subspace(op.rows, [op.apply(v) for v in self.basis])

    def is_invariant(self, op: Matrix) -> bool:
        return all(self.contains(op.apply(v)) for v in self.basis)

    def complement(self) -> "Subspace":
        """The coordinate complement spanned by standard vectors at non-pivot positions."""
        n = self.ambient_dim
        return Subspace(n, [[Fraction(int(i == j)) for i in range(n)] for j in range(n) if j not in self.pivots])


def restrict(op: Matrix, source: Subspace, target: Subspace) -> Matrix:
    """Matrix of ``op`` from ``source`` to ``target`` in the stored bases.

    ``op`` must map ``source`` into ``target``; this is checked.
    """
    images = [op.apply(v) for v in source.basis]
    for w in images:
        if not target.contains(w):
            raise DimensionMismatch("operator does not map the source subspace into the target")
    return Matrix.from_columns([target.coordinates(w) for w in images], target.dim)


def _check_ops(ops: Sequence[Matrix], n: int):
    for op in ops:
        if op.shape != (n, n):
            raise DimensionMismatch(f"operator of shape {op.shape} on Q^{n}")


def closure_under(ops: Sequence[Matrix], seed: Subspace) -> Subspace:
    """Smallest subspace containing ``seed`` and stable under every operator."""
    n = seed.ambient_dim
    _check_ops(ops, n)
    current = seed
    frontier = list(seed.basis)
    while frontier:
        new = list(current.basis)
        for op in ops:
            new.extend(op.apply(v) for v in frontier)
        grown = Subspace(n, new)
        if grown.dim == current.dim:
            break
        # only vectors outside the old span can produce new images
        frontier = [v for v in grown.basis if not current.contains(v)]
        current = grown
    return current


def largest_invariant_in(ops: Sequence[Matrix], constraint: Matrix) -> Subspace:
    """Largest subspace killed by ``constraint`` and stable under every operator.

    Iterates ``S <- S ∩ op^{-1}(S)`` from ``S = ker(constraint)``; the fixed
    point is reached within ``ambient_dim`` rounds.
    """
    n = constraint.cols
    _check_ops(ops, n)
    current = kernel_basis(constraint)
    while True:
        ann = current.annihilator()
        nxt = kernel_basis(vstack([ann] + [ann @ op for op in ops], n))
        if nxt.dim == current.dim:
            return current
        current = nxt


def monomials(n: int, k: int) -> list[tuple[int, ...]]:
    """Exponent vectors of degree ``k`` in ``n`` variables, lexicographically descending.

    >>> monomials(2, 2)
    [(2, 0), (1, 1), (0, 2)]
    """
    if n == 0:
        return [()] if k == 0 else []
    out = []
    for first in range(k, -1, -1):
        for rest in monomials(n - 1, k - first):
            out.append((first,) + rest)
    return out


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for a, x in p.items():
        for b, y in q.items():
            e = tuple(i + j for i, j in zip(a, b))
            out[e] = out.get(e, 0) + x * y
    return out


def sym_power(m: Matrix, k: int) -> Matrix:
    """Action of ``m`` on degree-``k`` polynomials, by substitution.

    Variables transform as ``x_i -> sum_j m[i, j] x_j``; row ``alpha`` of the
    result holds the coefficients of the image of the monomial ``x^alpha``.
    Rows and columns use :func:`monomials` order.  The construction is
    multiplicative: ``sym_power(a @ b, k) == sym_power(a, k) @ sym_power(b, k)``.

    >>> sym_power(Matrix([[1, 1], [0, 1]]), 2).tolist() == [[1, 2, 1], [0, 1, 1], [0, 0, 1]]
    True
    """
    if not m.is_square():
        raise DimensionMismatch("symmetric powers need a square matrix")
    if k < 1:
        raise ValueError("degree must be at least 1")
    n = m.rows
    basis = monomials(n, k)
    index = {e: i for i, e in enumerate(basis)}
    unit = tuple([0] * n)
    linear = []
    for i in range(n):
        linear.append({tuple(int(j == t) for t in range(n)): m[i, j] for j in range(n) if m[i, j]})
    grid = []
    for alpha in basis:
        poly = {unit: Fraction(1)}
        for i, e in enumerate(alpha):
            for _ in range(e):
                poly = _poly_mul(poly, linear[i])
        row = [Fraction(0)] * len(basis)
        for e, c in poly.items():
            row[index[e]] += c
        grid.append(row)
    assert len(grid) == comb(n + k - 1, k)
    return Matrix(grid, len(basis))


def sym_separation(group_elems: Sequence[Matrix], coeffs: Sequence, k_max: int) -> int | None:
    """Least ``k <= k_max`` with ``sum_i coeffs[i] * sym_power(g_i, k) != 0``, else None."""
    if len(group_elems) != len(coeffs):
        raise DimensionMismatch("need one coefficient per group element")
    if not group_elems:
        return None
    n = group_elems[0].rows
    for g in group_elems:
        if g.shape != (n, n):
            raise DimensionMismatch("group elements must share one square size")
        if not is_invertible(g):
            raise Singular("group elements must be invertible")
    coeffs = [to_scalar(c) for c in coeffs]
    for k in range(1, k_max + 1):
        total = Matrix.zeros(comb(n + k - 1, k), comb(n + k - 1, k))
        for g, c in zip(group_elems, coeffs):
            if c:
                total = total + sym_power(g, k).scale(c)
        if not total.is_zero():
            return k
    return None
