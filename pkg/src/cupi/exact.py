"""Exact linear algebra over F2 and Q, and finite cochain complexes.

Everything here is exact: F2 matrix rows are packed into Python ints
(bit j of a row = entry in column j), Q entries are `fractions.Fraction`.
No floating point is used anywhere in the package.

Elimination is deterministic: pivots are chosen scanning columns left to
right and taking the lowest-index available row, so every derived basis
(kernels, cohomology representatives, page bases) is reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

F2 = "F2"
Q = "Q"
RINGS = (F2, Q)


class RingError(ValueError):
    """Unknown coefficient ring, or rings mixed in one operation."""


class ShapeError(ValueError):
    """Matrix/vector dimensions do not line up."""


class NotAComplexError(ValueError):
    """d followed by d is not zero."""


def check_ring(ring: str) -> str:
    if ring not in RINGS:
        raise RingError(f"unknown ring {ring!r}, expected one of {RINGS}")
    return ring


def same_ring(a: str, b: str) -> str:
    if a != b:
        raise RingError(f"mixed rings {a!r} and {b!r}")
    return a


def _q(x) -> Fraction:
    if isinstance(x, float):
        raise RingError("floats are not exact; use Fraction or int")
    return Fraction(x)


def _f2(x) -> int:
    if isinstance(x, float):
        raise RingError("floats are not exact; use 0/1 ints")
    return int(x) & 1


class Matrix:
    """Immutable exact matrix over F2 or Q.

    Rows are stored packed: an int bitmask per row over F2, a tuple of
    Fraction per row over Q.  The two representations expose the same
    interface; their semantic agreement is pinned by tests against a
    naive dense mod-2 model.
    """

    __slots__ = ("ring", "nrows", "ncols", "rows")

    def __init__(self, ring: str, nrows: int, ncols: int, rows):
        self.ring = check_ring(ring)
        if nrows < 0 or ncols < 0:
            raise ShapeError("negative matrix dimensions")
        self.nrows = nrows
        self.ncols = ncols
        rows = tuple(rows)
        if len(rows) != nrows:
            raise ShapeError(f"expected {nrows} rows, got {len(rows)}")
        if ring == F2:
            mask = (1 << ncols) - 1
            self.rows = tuple(int(r) & mask for r in rows)
        else:
            out = []
            for r in rows:
                r = tuple(r)
                if len(r) != ncols:
                    raise ShapeError("ragged row")
                out.append(tuple(_q(x) for x in r))
            self.rows = tuple(out)

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_rows(cls, ring: str, entries: Sequence[Sequence], ncols: Optional[int] = None) -> "Matrix":
        entries = [list(r) for r in entries]
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        for r in entries:
            if len(r) != ncols:
                raise ShapeError("ragged rows")
        if ring == F2:
            rows = []
            for r in entries:
                acc = 0
                for j, x in enumerate(r):
                    if _f2(x):
                        acc |= 1 << j
                rows.append(acc)
            return cls(F2, len(entries), ncols, rows)
        return cls(Q, len(entries), ncols, entries)

    @classmethod
    def from_columns(cls, ring: str, columns: Sequence[Sequence], nrows: Optional[int] = None) -> "Matrix":
        columns = [list(c) for c in columns]
        if nrows is None:
            nrows = len(columns[0]) if columns else 0
        return cls.from_rows(ring, [[c[i] for c in columns] for i in range(nrows)], ncols=len(columns))

    @classmethod
    def from_entries(cls, ring: str, nrows: int, ncols: int,
                     entries: Iterable[tuple]) -> "Matrix":
        """Build from (row, col, value) triples; repeated slots accumulate.

        Cost is proportional to the number of triples, not nrows * ncols,
        so this is the constructor of choice for large sparse assemblies.
        """
        check_ring(ring)
        if ring == F2:
            rows = [0] * nrows
            for i, j, x in entries:
                if _f2(x):
                    rows[i] ^= 1 << j
            return cls(F2, nrows, ncols, rows)
        acc: list[Optional[dict]] = [None] * nrows
        for i, j, x in entries:
            row = acc[i]
            if row is None:
                row = acc[i] = {}
            row[j] = row.get(j, 0) + _q(x)
        zero = Fraction(0)
        zrow = tuple([zero] * ncols)
        packed = [zrow if r is None else tuple(r.get(j, zero) for j in range(ncols))
                  for r in acc]
        return cls(Q, nrows, ncols, packed)

    @classmethod
    def zero(cls, ring: str, nrows: int, ncols: int) -> "Matrix":
        if ring == F2:
            return cls(F2, nrows, ncols, [0] * nrows)
        z = tuple(Fraction(0) for _ in range(ncols))
        return cls(Q, nrows, ncols, [z] * nrows)

    @classmethod
    def identity(cls, ring: str, n: int) -> "Matrix":
        if ring == F2:
            return cls(F2, n, n, [1 << i for i in range(n)])
        return cls.from_rows(Q, [[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    # -- access ---------------------------------------------------------

    def entry(self, i: int, j: int):
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise ShapeError(f"entry ({i},{j}) outside {self.nrows}x{self.ncols}")
        if self.ring == F2:
            return (self.rows[i] >> j) & 1
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        if self.ring == F2:
            return tuple((self.rows[i] >> j) & 1 for j in range(self.ncols))
        return self.rows[i]

    def column(self, j: int) -> tuple:
        return tuple(self.entry(i, j) for i in range(self.nrows))

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.nrows)]

    def is_zero(self) -> bool:
        if self.ring == F2:
            return all(r == 0 for r in self.rows)
        return all(all(x == 0 for x in r) for r in self.rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.ring == other.ring
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __repr__(self) -> str:
        return f"Matrix({self.ring}, {self.nrows}x{self.ncols})"

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        same_ring(self.ring, other.ring)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeError("shape mismatch in addition")
        if self.ring == F2:
            return Matrix(F2, self.nrows, self.ncols, [a ^ b for a, b in zip(self.rows, other.rows)])
        return Matrix(
            Q, self.nrows, self.ncols,
            [tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.ring == F2:
            return self + other
        same_ring(self.ring, other.ring)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeError("shape mismatch in subtraction")
        return Matrix(
            Q, self.nrows, self.ncols,
            [tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)],
        )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        same_ring(self.ring, other.ring)
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        if self.ring == F2:
            out = []
            for r in self.rows:
                acc = 0
                rr = r
                while rr:
                    k = (rr & -rr).bit_length() - 1
                    acc ^= other.rows[k]
                    rr &= rr - 1
                out.append(acc)
            return Matrix(F2, self.nrows, other.ncols, out)
        ocols = list(zip(*other.rows)) if other.nrows else [()] * 0
        out = []
        for r in self.rows:
            row = []
            for j in range(other.ncols):
                s = Fraction(0)
                col = ocols[j] if other.nrows else ()
                for x, y in zip(r, col):
                    if x:
                        s += x * y
                row.append(s)
            out.append(tuple(row))
        return Matrix(Q, self.nrows, other.ncols, out)

    def apply(self, vector: Sequence) -> tuple:
        """Matrix times column vector."""
        if len(vector) != self.ncols:
            raise ShapeError("vector length mismatch")
        if self.ring == F2:
            v = 0
            for j, x in enumerate(vector):
                if _f2(x):
                    v |= 1 << j
            return tuple(bits_parity(r & v) for r in self.rows)
        return tuple(
            sum((x * _q(y) for x, y in zip(r, vector) if x), Fraction(0)) for r in self.rows
        )

    def transpose(self) -> "Matrix":
        if self.ring == F2:
            # one pass over set bits; entrywise shifts would cost nrows*ncols
            cols = [0] * self.ncols
            for i, r in enumerate(self.rows):
                bit = 1 << i
                while r:
                    low = r & -r
                    cols[low.bit_length() - 1] |= bit
                    r ^= low
            return Matrix(F2, self.ncols, self.nrows, cols)
        return Matrix(Q, self.ncols, self.nrows, list(zip(*self.rows)) if self.nrows else [() for _ in range(self.ncols)])

    def hstack(self, other: "Matrix") -> "Matrix":
        same_ring(self.ring, other.ring)
        if self.nrows != other.nrows:
            raise ShapeError("row count mismatch in hstack")
        if self.ring == F2:
            return Matrix(F2, self.nrows, self.ncols + other.ncols,
                          [a | (b << self.ncols) for a, b in zip(self.rows, other.rows)])
        return Matrix(Q, self.nrows, self.ncols + other.ncols,
                      [ra + rb for ra, rb in zip(self.rows, other.rows)])

    def vstack(self, other: "Matrix") -> "Matrix":
        same_ring(self.ring, other.ring)
        if self.ncols != other.ncols:
            raise ShapeError("column count mismatch in vstack")
        return Matrix(self.ring, self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def column_select(self, cols: Sequence[int]) -> "Matrix":
        if self.ring == F2:
            rows = []
            for r in self.rows:
                acc = 0
                for jnew, j in enumerate(cols):
                    if (r >> j) & 1:
                        acc |= 1 << jnew
                rows.append(acc)
            return Matrix(F2, self.nrows, len(cols), rows)
        return Matrix(Q, self.nrows, len(cols), [tuple(r[j] for j in cols) for r in self.rows])

    # -- elimination ----------------------------------------------------

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form and its pivot columns.

        Pivot choice scans columns left to right and rows top down, which
        keeps every downstream basis deterministic.
        """
        if self.ring == F2:
            rows = list(self.rows)
            pivots = []
            r = 0
            for j in range(self.ncols):
                sel = None
                bit = 1 << j
                for i in range(r, self.nrows):
                    if rows[i] & bit:
                        sel = i
                        break
                if sel is None:
                    continue
                rows[r], rows[sel] = rows[sel], rows[r]
                piv = rows[r]
                for i in range(self.nrows):
                    if i != r and rows[i] & bit:
                        rows[i] ^= piv
                pivots.append(j)
                r += 1
                if r == self.nrows:
                    break
            return Matrix(F2, self.nrows, self.ncols, rows), tuple(pivots)
        rows = [list(r) for r in self.rows]
        pivots = []
        r = 0
        for j in range(self.ncols):
            sel = None
            for i in range(r, self.nrows):
                if rows[i][j] != 0:
                    sel = i
                    break
            if sel is None:
                continue
            rows[r], rows[sel] = rows[sel], rows[r]
            inv = 1 / rows[r][j]
            rows[r] = [x * inv for x in rows[r]]
            piv = rows[r]
            for i in range(self.nrows):
                if i != r and rows[i][j] != 0:
                    c = rows[i][j]
                    rows[i] = [x - c * y for x, y in zip(rows[i], piv)]
            pivots.append(j)
            r += 1
            if r == self.nrows:
                break
        return Matrix(Q, self.nrows, self.ncols, [tuple(r_) for r_ in rows]), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> "Matrix":
        """Matrix whose columns form a basis of the null space."""
        R, pivots = self.rref()
        pivot_set = set(pivots)
        free = [j for j in range(self.ncols) if j not in pivot_set]
        if self.ring == F2:
            k = len(pivots)
            T = Matrix(F2, k, self.ncols, R.rows[:k]).transpose()
            entries = []
            for jnew, f in enumerate(free):
                entries.append((f, jnew, 1))
                col = T.rows[f]
                while col:
                    low = col & -col
                    entries.append((pivots[low.bit_length() - 1], jnew, 1))
                    col ^= low
            return Matrix.from_entries(F2, self.ncols, len(free), entries)
        cols = []
        for f in free:
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for i, p in enumerate(pivots):
                x = R.entry(i, f)
                if x:
                    v[p] = -x
            cols.append(v)
        return Matrix.from_columns(Q, cols, nrows=self.ncols)

    def solve_matrix(self, rhs: "Matrix") -> Optional["Matrix"]:
        """Some X with self @ X = rhs, or None if unsolvable."""
        same_ring(self.ring, rhs.ring)
        if self.nrows != rhs.nrows:
            raise ShapeError("rhs row count mismatch")
        aug = self.hstack(rhs)
        R, pivots = aug.rref()
        for p in pivots:
            if p >= self.ncols:
                return None
        zero = Fraction(0) if self.ring == Q else 0
        cols = []
        for jr in range(rhs.ncols):
            v = [zero] * self.ncols
            for i, p in enumerate(pivots):
                v[p] = R.entry(i, self.ncols + jr)
            cols.append(v)
        return Matrix.from_columns(self.ring, cols, nrows=self.ncols)

    def solve(self, vector: Sequence) -> Optional[tuple]:
        X = self.solve_matrix(Matrix.from_columns(self.ring, [list(vector)], nrows=self.nrows))
        return None if X is None else X.column(0)


def bits_parity(x: int) -> int:
    return bin(x).count("1") & 1


# -- vectors ------------------------------------------------------------


def zero_vector(ring: str, n: int) -> tuple:
    check_ring(ring)
    return tuple([Fraction(0)] * n) if ring == Q else tuple([0] * n)


def vec_add(ring: str, a: Sequence, b: Sequence) -> tuple:
    if len(a) != len(b):
        raise ShapeError("vector length mismatch")
    if ring == F2:
        return tuple((x + y) & 1 for x, y in zip(a, b))
    return tuple(_q(x) + _q(y) for x, y in zip(a, b))

def vec_scale(ring: str, c, a: Sequence) -> tuple:
    if ring == F2:
        return tuple(a) if (int(c) & 1) else zero_vector(F2, len(a))
    c = _q(c)
    return tuple(c * _q(x) for x in a)


def vec_is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


# -- subspaces ----------------------------------------------------------


class Subspace:
    """Column span inside a fixed ambient dimension, with a canonical basis.

    The basis is the reduced row echelon form of the spanning set (stored
    as columns), so equal subspaces compare equal and quotient
    representative choices are reproducible.
    """

    __slots__ = ("ring", "ambient", "basis")

    def __init__(self, ring: str, ambient: int, basis: Matrix):
        self.ring = check_ring(ring)
        self.ambient = ambient
        self.basis = basis  # ambient x dim, canonical; use Subspace.span to build

    @classmethod
    def span(cls, ring: str, ambient: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = [list(v) for v in vectors]
        for v in rows:
            if len(v) != ambient:
                raise ShapeError("spanning vector has wrong length")
        return cls.from_columns(Matrix.from_rows(ring, rows, ncols=ambient).transpose())

    @classmethod
    def from_columns(cls, matrix: Matrix) -> "Subspace":
        R, pivots = matrix.transpose().rref()
        k = len(pivots)
        basis = Matrix(matrix.ring, k, matrix.nrows, R.rows[:k]).transpose()
        return cls(matrix.ring, matrix.nrows, basis)

    @classmethod
    def zero(cls, ring: str, ambient: int) -> "Subspace":
        return cls.span(ring, ambient, [])

    @classmethod
    def full(cls, ring: str, ambient: int) -> "Subspace":
        return cls(ring, ambient, Matrix.identity(ring, ambient))

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def vectors(self) -> list[tuple]:
        return [self.basis.column(j) for j in range(self.dim)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ring == other.ring
            and self.ambient == other.ambient
            and self.basis == other.basis
        )

    def __repr__(self) -> str:
        return f"Subspace({self.ring}, dim {self.dim} of {self.ambient})"

    def contains(self, vector: Sequence) -> bool:
        return self.basis.solve(vector) is not None

    def contains_space(self, other: "Subspace") -> bool:
        if self.ambient != other.ambient:
            raise ShapeError("ambient mismatch")
        if other.dim == 0:
            return True
        # rank([other | self]) exceeds dim(self) exactly on escape vectors
        return len(other.basis.hstack(self.basis).rref()[1]) == self.dim

    def add(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ShapeError("ambient mismatch")
        return Subspace.span(self.ring, self.ambient, self.vectors() + other.vectors())

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ShapeError("ambient mismatch")
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ring, self.ambient)
        A, B = self.basis, other.basis
        ker = A.hstack(_negate(B)).kernel()
        vecs = []
        for j in range(ker.ncols):
            coef = ker.column(j)[: A.ncols]
            vecs.append(A.apply(coef))
        return Subspace.span(self.ring, self.ambient, vecs)

    def image(self, f: Matrix) -> "Subspace":
        """Image of this subspace under the linear map f."""
        if f.ncols != self.ambient:
            raise ShapeError("map domain mismatch")
        return Subspace.span(self.ring, f.nrows, [f.apply(v) for v in self.vectors()])

    def preimage(self, f: Matrix, target: "Subspace") -> "Subspace":
        """{x in self : f(x) in target}."""
        if f.ncols != self.ambient or f.nrows != target.ambient:
            raise ShapeError("map shape mismatch in preimage")
        A = self.basis
        fA = f @ A
        T = target.basis
        stacked = fA.hstack(_negate(T) if self.ring == Q else T)
        ker = stacked.kernel()
        vecs = []
        for j in range(ker.ncols):
            coef = ker.column(j)[: A.ncols]
            vecs.append(A.apply(coef))
        return Subspace.span(self.ring, self.ambient, vecs)

    def annihilator(self) -> Matrix:
        """A matrix whose kernel is exactly this subspace.

        Rows span the functionals vanishing on the subspace, so membership
        becomes a linear condition usable inside larger systems.
        """
        return self.basis.transpose().kernel().transpose()


def _negate(m: Matrix) -> Matrix:
    if m.ring == F2:
        return m
    return Matrix(Q, m.nrows, m.ncols, [tuple(-x for x in r) for r in m.rows])


def quotient_representatives(big: Subspace, small: Subspace) -> list[tuple]:
    """Deterministic representatives for big/small (small must lie in big)."""
    stacked = small.basis.hstack(big.basis)
    _, pivots = stacked.rref()
    if len(pivots) != big.dim:
        raise ShapeError("quotient denominator is not contained in numerator")
    reps = []
    for p in pivots:
        if p >= small.dim:
            reps.append(big.basis.column(p - small.dim))
    return reps


def quotient_coordinates(reps: Sequence[Sequence], small: Subspace, vector: Sequence) -> tuple:
    """Coordinates of [vector] in the basis reps of big/small."""
    ring = small.ring
    repM = Matrix.from_rows(ring, [list(r) for r in reps], ncols=small.ambient).transpose()
    M = small.basis.hstack(repM)
    sol = M.solve(vector)
    if sol is None:
        raise ShapeError("vector does not lie in the subspace spanned by reps + denominator")
    return tuple(sol[small.dim:])


# -- cochain complexes --------------------------------------------------


class CohomologyGroup:
    """Dimension plus explicit representative cocycles for one degree."""

    __slots__ = ("degree", "dim", "representatives", "cocycles", "coboundaries")

    def __init__(self, degree, dim, representatives, cocycles, coboundaries):
        self.degree = degree
        self.dim = dim
        self.representatives = representatives
        self.cocycles = cocycles
        self.coboundaries = coboundaries


class CochainComplex:
    """Finite complex of free modules with degree +1 differentials.

    dims maps degree -> rank; differentials maps degree n to the matrix of
    d_n, of shape dims[n+1] x dims[n].  Degrees may be negative.  The
    composite d d = 0 is validated on construction.
    """

    def __init__(self, ring: str, dims: Mapping[int, int],
                 differentials: Mapping[int, Matrix], labels: Optional[Mapping[int, Sequence]] = None,
                 check: bool = True):
        self.ring = check_ring(ring)
        self.dims = {n: int(k) for n, k in dims.items() if k}
        self._d = {}
        for n, m in differentials.items():
            if m.nrows == 0 and m.ncols == 0:
                continue
            if m.ring != ring:
                raise RingError("differential over wrong ring")
            if m.ncols != self.dim(n) or m.nrows != self.dim(n + 1):
                raise ShapeError(f"d_{n} has shape {m.nrows}x{m.ncols}, expected {self.dim(n+1)}x{self.dim(n)}")
            self._d[n] = m
        self.labels = {n: tuple(v) for n, v in labels.items()} if labels else {}
        if check:
            self.validate()

    def validate(self) -> None:
        for n in sorted(self.dims):
            if self.dim(n) and self.dim(n + 1) and self.dim(n + 2):
                comp = self.d(n + 1) @ self.d(n)
                if not comp.is_zero():
                    raise NotAComplexError(f"d_{n+1} d_{n} != 0")

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def d(self, n: int) -> Matrix:
        m = self._d.get(n)
        if m is None:
            return Matrix.zero(self.ring, self.dim(n + 1), self.dim(n))
        return m

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def cocycle_space(self, n: int) -> Subspace:
        return Subspace.from_columns(self.d(n).kernel())

    def coboundary_space(self, n: int) -> Subspace:
        prev = self.d(n - 1)
        return Subspace.span(self.ring, self.dim(n), [prev.column(j) for j in range(prev.ncols)])

    def cohomology(self, n: Optional[int] = None):
        """CohomologyGroup at degree n, or a dict over all degrees."""
        if n is None:
            out = {}
            for k in sorted(set(self.dims) | {m + 1 for m in self.dims}):
                g = self.cohomology(k)
                if g.dim:
                    out[k] = g
            return out
        Z = self.cocycle_space(n)
        B = self.coboundary_space(n)
        reps = quotient_representatives(Z, B)
        return CohomologyGroup(n, len(reps), reps, Z, B)

    def class_coordinates(self, n: int, vector: Sequence, group: Optional[CohomologyGroup] = None) -> tuple:
        """Coordinates of the class of a cocycle in the chosen basis of H^n."""
        g = group if group is not None else self.cohomology(n)
        if not g.cocycles.contains(vector):
            raise ShapeError(f"vector is not a cocycle in degree {n}")
        return quotient_coordinates(g.representatives, g.coboundaries, vector)

    def betti(self) -> dict[int, int]:
        # ranks alone settle the dimensions; skip representative bases
        ranks: dict[int, int] = {}

        def rk(n: int) -> int:
            if n not in ranks:
                m = self._d.get(n)
                ranks[n] = len(m.rref()[1]) if m is not None else 0
            return ranks[n]

        out = {}
        for n in sorted(self.dims):
            b = self.dim(n) - rk(n) - rk(n - 1)
            if b:
                out[n] = b
        return out

    def shift(self, k: int) -> "CochainComplex":
        """Same complex with degrees moved up by k (no sign changes)."""
        return CochainComplex(
            self.ring,
            {n + k: d for n, d in self.dims.items()},
            {n + k: m for n, m in self._d.items()},
            labels={n + k: v for n, v in self.labels.items()},
            check=False,
        )


def zero_complex(ring: str) -> CochainComplex:
    return CochainComplex(ring, {}, {})


class ChainMap:
    """Degreewise matrices from one complex to another, commuting with d."""

    def __init__(self, source: CochainComplex, target: CochainComplex,
                 blocks: Mapping[int, Matrix], check: bool = True):
        same_ring(source.ring, target.ring)
        self.ring = source.ring
        self.source = source
        self.target = target
        self.blocks = {}
        for n, m in blocks.items():
            if m.ncols != source.dim(n) or m.nrows != target.dim(n):
                raise ShapeError(f"block {n} has shape {m.nrows}x{m.ncols}, "
                                 f"expected {target.dim(n)}x{source.dim(n)}")
            if not m.is_zero():
                self.blocks[n] = m
        if check:
            self.validate()

    def block(self, n: int) -> Matrix:
        m = self.blocks.get(n)
        if m is None:
            return Matrix.zero(self.ring, self.target.dim(n), self.source.dim(n))
        return m

    def validate(self) -> None:
        degs = set(self.source.dims) | set(self.target.dims)
        for n in sorted(degs):
            lhs = self.target.d(n) @ self.block(n)
            rhs = self.block(n + 1) @ self.source.d(n)
            if lhs != rhs:
                raise NotAComplexError(f"chain map does not commute with d in degree {n}")

    def apply(self, n: int, vector: Sequence) -> tuple:
        return self.block(n).apply(vector)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self after other (other.source -> self.target)."""
        if other.target is not self.source and other.target.dims != self.source.dims:
            raise ShapeError("composition mismatch")
        degs = set(self.blocks) | set(other.blocks)
        return ChainMap(other.source, self.target,
                        {n: self.block(n) @ other.block(n) for n in degs}, check=False)

    def induced_on_cohomology(self, n: int) -> Matrix:
        """Matrix of H^n(f) in the canonical representative bases."""
        gs = self.source.cohomology(n)
        gt = self.target.cohomology(n)
        cols = []
        for rep in gs.representatives:
            img = self.apply(n, rep)
            cols.append(list(self.target.class_coordinates(n, img, gt)))
        return Matrix.from_columns(self.ring, cols, nrows=gt.dim)


def identity_chain_map(c: CochainComplex) -> ChainMap:
    return ChainMap(c, c, {n: Matrix.identity(c.ring, c.dim(n)) for n in c.dims}, check=False)


def direct_sum(parts: Sequence[CochainComplex]) -> tuple[CochainComplex, list[dict[int, int]]]:
    """Direct sum, plus per-part degree offsets into the summed basis."""
    if not parts:
        raise ShapeError("empty direct sum")
    ring = parts[0].ring
    for p in parts:
        same_ring(ring, p.ring)
    degrees = sorted({n for p in parts for n in p.dims})
    offsets: list[dict[int, int]] = [dict() for _ in parts]
    dims = {}
    for n in degrees:
        acc = 0
        for i, p in enumerate(parts):
            offsets[i][n] = acc
            acc += p.dim(n)
        dims[n] = acc
    diffs = {}
    for n in degrees:
        rows_total = sum(p.dim(n + 1) for p in parts)
        cols_total = dims[n]
        if rows_total == 0 or cols_total == 0:
            continue
        if ring == F2:
            rows = []
            col_off = 0
            for p in parts:
                dp = p.d(n)
                rows.extend(r << col_off for r in dp.rows)
                col_off += p.dim(n)
            diffs[n] = Matrix(F2, rows_total, cols_total, rows)
        else:
            rows = []
            col_off = 0
            for p in parts:
                dp = p.d(n)
                left = col_off
                right = cols_total - col_off - p.dim(n)
                for r in dp.rows:
                    rows.append(tuple([Fraction(0)] * left) + r + tuple([Fraction(0)] * right))
                col_off += p.dim(n)
            diffs[n] = Matrix(Q, rows_total, cols_total, rows)
    return CochainComplex(ring, dims, diffs, check=False), offsets


def induced_subcomplex(C: CochainComplex, spaces: Mapping[int, Subspace]) -> tuple[CochainComplex, ChainMap]:
    """The complex induced on d-stable degreewise subspaces, plus its inclusion.

    Coordinates of the subcomplex are the canonical bases of the given
    subspaces; raises if some subspace is not carried into the next one.
    """
    full = {}
    for n in C.degrees():
        s = spaces.get(n)
        full[n] = s if s is not None else Subspace.zero(C.ring, C.dim(n))
        if full[n].ambient != C.dim(n):
            raise ShapeError(f"subspace ambient mismatch in degree {n}")
    dims = {n: s.dim for n, s in full.items()}
    diffs = {}
    for n in C.degrees():
        nxt = full.get(n + 1)
        images = C.d(n) @ full[n].basis
        if nxt is None or nxt.dim == 0:
            if not images.is_zero():
                raise ShapeError(f"subspaces are not d-stable at degree {n}")
            diffs[n] = Matrix.zero(C.ring, 0, full[n].dim)
            continue
        X = nxt.basis.solve_matrix(images)
        if X is None:
            raise ShapeError(f"subspaces are not d-stable at degree {n}")
        diffs[n] = X
    sub = CochainComplex(C.ring, dims, diffs)
    inc = ChainMap(sub, C, {n: full[n].basis for n in full if dims.get(n)}, check=False)
    return sub, inc
