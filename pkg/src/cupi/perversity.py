"""Perversity arithmetic and perverse complexes.

Goresky-MacPherson perversities for a fixed ambient dimension form a
finite poset; adding a top element "infinity" makes the monoidal sum
total.  This module provides that poset, the sum, the operation bound
L(p, s), intelligent truncation of cochain complexes, and functors from
the extended poset to complexes together with their levelwise truncation
and tensor product.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Mapping, Optional, Sequence

from .codiagram import NotFunctorialError
from .exact import (
    ChainMap,
    CochainComplex,
    Matrix,
    Subspace,
    identity_chain_map,
    induced_subcomplex,
    same_ring,
    zero_complex,
)


class InvalidPerversityError(ValueError):
    """Perversity constraints fail; the message names the first bad index."""


class DimensionMismatchError(ValueError):
    """Operands live over different ambient dimensions."""


class Perversity:
    """Values (p(2), ..., p(n)) with p(2) = 0 and steps of 0 or 1, or infinity.

    Instances are immutable and hashable; comparison is pointwise
    domination, with the infinite perversity above everything.  Ambient
    dimensions below 2 leave no constrained indices, so their only finite
    perversity is the empty one.
    """

    __slots__ = ("n", "values", "infinite")

    def __init__(self, n: int, values: Optional[Sequence[int]] = None,
                 infinite: bool = False):
        if n < 0:
            raise InvalidPerversityError("ambient dimension must be nonnegative")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "infinite", bool(infinite))
        if infinite:
            object.__setattr__(self, "values", None)
            return
        vals = tuple(int(v) for v in (values if values is not None else ()))
        if len(vals) != max(n - 1, 0):
            raise InvalidPerversityError(
                f"expected {max(n - 1, 0)} values p(2)..p({n}), got {len(vals)}")
        if vals and vals[0] != 0:
            raise InvalidPerversityError("violated at k=2: p(2) must be 0")
        for i in range(1, len(vals)):
            if not vals[i - 1] <= vals[i] <= vals[i - 1] + 1:
                raise InvalidPerversityError(
                    f"violated at k={i + 2}: step from p({i + 1})={vals[i - 1]} "
                    f"must be 0 or 1")
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("Perversity is immutable")

    @classmethod
    def zero(cls, n: int) -> "Perversity":
        return cls(n, (0,) * max(n - 1, 0))

    @classmethod
    def top(cls, n: int) -> "Perversity":
        return cls(n, tuple(k - 2 for k in range(2, n + 1)))

    @classmethod
    def infinity(cls, n: int) -> "Perversity":
        return cls(n, infinite=True)

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def value(self, k: int) -> int:
        if self.infinite:
            raise ValueError("the infinite perversity has no finite values")
        if not 2 <= k <= self.n:
            raise ValueError(f"k={k} outside 2..{self.n}")
        return self.values[k - 2]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Perversity) and self.n == other.n
                and self.infinite == other.infinite and self.values == other.values)

    def __hash__(self):
        return hash((self.n, self.infinite, self.values))

    def __le__(self, other: "Perversity") -> bool:
        if not isinstance(other, Perversity) or self.n != other.n:
            raise DimensionMismatchError("comparison needs matching ambient dimensions")
        if other.infinite:
            return True
        if self.infinite:
            return False
        return all(a <= b for a, b in zip(self.values, other.values))

    def __lt__(self, other: "Perversity") -> bool:
        return self <= other and self != other

    def __ge__(self, other: "Perversity") -> bool:
        return other <= self

    def __gt__(self, other: "Perversity") -> bool:
        return other < self

    def __repr__(self) -> str:
        if self.infinite:
            return f"Perversity.infinity({self.n})"
        return f"Perversity({self.n}, {self.values})"

    def to_json(self):
        """Integer list indexed from k = 2, or the string "inf"."""
        return "inf" if self.infinite else list(self.values)

    @classmethod
    def from_json(cls, data, n: int) -> "Perversity":
        if data == "inf":
            return cls.infinity(n)
        if not isinstance(data, (list, tuple)):
            raise InvalidPerversityError("perversity must be a list or \"inf\"")
        return cls(n, data)


def validate_perversity(values: Sequence[int], n: int) -> Perversity:
    return Perversity(n, values)


@lru_cache(maxsize=None)
def all_perversities(n: int) -> tuple[Perversity, ...]:
    """Every finite perversity for ambient n, in lexicographic order.

    The enumeration is memoized per dimension; a duplicated first
    computation under concurrent access is harmless because the result
    is a pure value.
    """
    if n < 3:
        return (Perversity.zero(n),)
    out = []

    def grow(prefix: tuple) -> None:
        if len(prefix) == n - 1:
            out.append(Perversity(n, prefix))
            return
        grow(prefix + (prefix[-1],))
        grow(prefix + (prefix[-1] + 1,))

    grow((0,))
    return tuple(out)


def extended_perversities(n: int) -> tuple[Perversity, ...]:
    """The finite poset plus its top element, infinity last."""
    return all_perversities(n) + (Perversity.infinity(n),)


def _smoothed(n: int, floor: tuple) -> Optional[tuple]:
    # least perversity above floor: impossible once floor(k) > k - 2, else
    # a right-to-left pass enforces steps <= 1 and a left-to-right pass
    # enforces monotonicity; both passes only ever increase values
    if any(f > k - 2 for k, f in zip(range(2, n + 1), floor)):
        return None
    g = [max(f, 0) for f in floor]
    for i in range(len(g) - 2, -1, -1):
        g[i] = max(g[i], g[i + 1] - 1)
    for i in range(1, len(g)):
        g[i] = max(g[i], g[i - 1])
    return tuple(g)


def minimal_dominating(n: int, floor: Sequence[int]) -> Perversity:
    """The least perversity pointwise above floor, or infinity if none exists.

    For small ambient dimensions the smoothing passes are cross-checked
    against the brute-force minimum over the enumerated poset.
    """
    floor = tuple(floor)
    if len(floor) != max(n - 1, 0):
        raise DimensionMismatchError(f"floor must have {max(n - 1, 0)} entries")
    vals = _smoothed(n, floor)
    if vals is None:
        return Perversity.infinity(n)
    result = Perversity(n, vals)
    if n <= 10:
        doms = [p.values for p in all_perversities(n)
                if all(a >= b for a, b in zip(p.values, floor))]
        best = tuple(min(column) for column in zip(*doms)) if floor else ()
        if result.values != best:
            raise InvalidPerversityError("smoothing disagrees with the poset minimum")
    return result


def oplus(p: Perversity, q: Perversity) -> Perversity:
    """Monoidal sum: the least perversity above the pointwise sum.

    Infinite whenever an operand is, or when the sum exceeds k - 2
    somewhere; associative and commutative with the zero perversity as
    unit.
    """
    if p.n != q.n:
        raise DimensionMismatchError(f"ambient dimensions differ: {p.n} != {q.n}")
    if p.infinite or q.infinite:
        return Perversity.infinity(p.n)
    return minimal_dominating(p.n, tuple(a + b for a, b in zip(p.values, q.values)))


def l_perversity(p: Perversity, s: int) -> Perversity:
    """Least perversity above k -> min(2 p(k), p(k) + s), or infinity.

    Bounds where a degree-s operation on classes of perversity p may
    land; values escaping the admissible range jump to infinity rather
    than clipping to the top perversity.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    if p.infinite:
        return Perversity.infinity(p.n)
    return minimal_dominating(p.n, tuple(min(2 * v, v + s) for v in p.values))


def goresky_range(p: Perversity) -> bool:
    """Whether 2 p(k) <= k - 2 for every k, so the doubled sum stays finite."""
    if p.infinite:
        return False
    return all(2 * v <= k - 2 for k, v in zip(range(2, p.n + 1), p.values))


# -- truncation ----------------------------------------------------------


def _truncation_spaces(A: CochainComplex, k: int) -> dict[int, Subspace]:
    spaces = {}
    for m in A.degrees():
        if m < k:
            spaces[m] = Subspace.full(A.ring, A.dim(m))
        elif m == k:
            spaces[m] = A.cocycle_space(m)
    return spaces


def truncate_inclusion(A: CochainComplex, k: int) -> tuple[CochainComplex, ChainMap]:
    """Intelligent truncation together with its inclusion into A."""
    if k < 0:
        z = zero_complex(A.ring)
        return z, ChainMap(z, A, {})
    return induced_subcomplex(A, _truncation_spaces(A, k))


def truncate(A: CochainComplex, k: int) -> CochainComplex:
    """Full below k, cocycles at k, zero above.

    Cohomology through degree k is untouched and everything above dies;
    a negative k gives the zero complex.
    """
    return truncate_inclusion(A, k)[0]


# -- perverse complexes --------------------------------------------------


class PerverseComplex:
    """A functor from the extended perversity poset to cochain complexes.

    Stores one complex per perversity (including the infinite one) and a
    chain map for every strict domination; validation checks that the
    maps compose.
    """

    def __init__(self, n: int, assignment: Mapping[Perversity, CochainComplex],
                 transitions: Mapping[tuple, ChainMap], check: bool = True):
        self.n = int(n)
        self.levels = extended_perversities(self.n)
        for p in self.levels:
            if p not in assignment:
                raise InvalidPerversityError(f"no complex assigned at {p!r}")
        self.assignment = {p: assignment[p] for p in self.levels}
        self.ring = self.assignment[self.levels[0]].ring
        for C in self.assignment.values():
            same_ring(self.ring, C.ring)
        self.transitions = {}
        for (a, b), f in transitions.items():
            if not a < b:
                raise NotFunctorialError(f"transition {a!r} -> {b!r} is not a strict domination")
            if f.source is not self.assignment[a] or f.target is not self.assignment[b]:
                raise NotFunctorialError(f"transition {a!r} -> {b!r} has wrong endpoints")
            self.transitions[(a, b)] = f
        for a in self.levels:
            for b in self.levels:
                if a != b and a <= b and (a, b) not in self.transitions:
                    raise NotFunctorialError(f"missing transition {a!r} -> {b!r}")
        if check:
            self.validate()

    def validate(self) -> None:
        for a, b in self.transitions:
            for c in self.levels:
                if not (b != c and b <= c):
                    continue
                left = self.transitions[(b, c)].compose(self.transitions[(a, b)])
                direct = self.transitions[(a, c)]
                for m in set(left.blocks) | set(direct.blocks):
                    if left.block(m) != direct.block(m):
                        raise NotFunctorialError(
                            f"transitions {a!r} -> {b!r} -> {c!r} do not compose")

    def complex(self, p: Perversity) -> CochainComplex:
        return self.assignment[p]

    def transition(self, a: Perversity, b: Perversity) -> ChainMap:
        if a == b:
            return identity_chain_map(self.assignment[a])
        return self.transitions[(a, b)]

    def betti(self) -> dict[Perversity, dict[int, int]]:
        return {p: self.assignment[p].betti() for p in self.levels}

    @classmethod
    def constant(cls, n: int, A: CochainComplex) -> "PerverseComplex":
        levels = extended_perversities(n)
        trans = {(a, b): identity_chain_map(A)
                 for a in levels for b in levels if a != b and a <= b}
        return cls(n, {p: A for p in levels}, trans, check=False)

    @classmethod
    def threshold(cls, n: int, at: Perversity, A: CochainComplex) -> "PerverseComplex":
        """A at every level dominating `at`, zero below, identity in between."""
        if at.n != n:
            raise DimensionMismatchError("threshold perversity has the wrong dimension")
        z = zero_complex(A.ring)
        levels = extended_perversities(n)
        assign = {p: (A if at <= p else z) for p in levels}
        trans = {}
        for a in levels:
            for b in levels:
                if not (a != b and a <= b):
                    continue
                if at <= a:
                    trans[(a, b)] = identity_chain_map(A)
                else:
                    trans[(a, b)] = ChainMap(assign[a], assign[b], {}, check=False)
        return cls(n, assign, trans, check=False)


def _restrict(incl: ChainMap, m: int, vector: Sequence) -> tuple:
    sol = incl.block(m).solve(vector)
    if sol is None:
        raise NotFunctorialError("map does not restrict to the subcomplex")
    return sol


def truncate_perverse(A: PerverseComplex, k: int) -> PerverseComplex:
    """Truncate the level at p to degree p(k); the infinite level stays whole.

    Domination gives p(k) <= q(k), so every transition restricts to the
    truncated subcomplexes.
    """
    if not 2 <= k <= A.n:
        raise ValueError(f"k={k} outside 2..{A.n}")
    subs, incls = {}, {}
    for p in A.levels:
        C = A.complex(p)
        if p.infinite:
            subs[p], incls[p] = C, identity_chain_map(C)
        else:
            subs[p], incls[p] = truncate_inclusion(C, p.value(k))
    trans = {}
    for (a, b), f in A.transitions.items():
        blocks = {}
        for m in subs[a].degrees():
            cols = []
            for j in range(subs[a].dim(m)):
                w = f.apply(m, incls[a].block(m).column(j))
                cols.append(list(_restrict(incls[b], m, w)))
            blocks[m] = Matrix.from_columns(A.ring, cols, nrows=subs[b].dim(m))
        trans[(a, b)] = ChainMap(subs[a], subs[b], blocks, check=False)
    return PerverseComplex(A.n, subs, trans, check=False)


# -- tensor product ------------------------------------------------------


class TensorProduct:
    """A (x) B with explicit basis bookkeeping for embedding simple tensors.

    The basis at total degree t concatenates the (i, j = t - i) blocks in
    ascending i, each block ordered with the first factor's index major.
    The differential is d (x) 1 + (-1)^i 1 (x) d.
    """

    def __init__(self, A: CochainComplex, B: CochainComplex):
        same_ring(A.ring, B.ring)
        self.ring = A.ring
        self.A, self.B = A, B
        blocks_at: dict[int, list] = {}
        for i in A.degrees():
            for j in B.degrees():
                blocks_at.setdefault(i + j, []).append((i, j))
        self.offsets: dict[tuple, int] = {}
        dims = {}
        for t in sorted(blocks_at):
            off = 0
            for (i, j) in sorted(blocks_at[t]):
                self.offsets[(i, j)] = off
                off += A.dim(i) * B.dim(j)
            dims[t] = off
        diffs = {}
        for t in sorted(blocks_at):
            rows_dim, cols_dim = dims.get(t + 1, 0), dims[t]
            if rows_dim == 0 or cols_dim == 0:
                continue
            ent = [[0] * cols_dim for _ in range(rows_dim)]
            for (i, j) in blocks_at[t]:
                col0 = self.offsets[(i, j)]
                dA, dB = A.d(i), B.d(j)
                if A.dim(i + 1) and (i + 1, j) in self.offsets:
                    row0 = self.offsets[(i + 1, j)]
                    for a in range(A.dim(i)):
                        for a2 in range(A.dim(i + 1)):
                            x = dA.entry(a2, a)
                            if x:
                                for b in range(B.dim(j)):
                                    ent[row0 + a2 * B.dim(j) + b][col0 + a * B.dim(j) + b] += x
                if B.dim(j + 1) and (i, j + 1) in self.offsets:
                    row0 = self.offsets[(i, j + 1)]
                    sgn = 1 if i % 2 == 0 else -1
                    for b in range(B.dim(j)):
                        for b2 in range(B.dim(j + 1)):
                            y = dB.entry(b2, b)
                            if y:
                                for a in range(A.dim(i)):
                                    ent[row0 + a * B.dim(j + 1) + b2][col0 + a * B.dim(j) + b] += sgn * y
            diffs[t] = Matrix.from_rows(self.ring, ent, ncols=cols_dim)
        self.complex = CochainComplex(self.ring, dims, diffs)

    def simple(self, i: int, j: int, u: Sequence, v: Sequence) -> tuple:
        """The vector u (x) v in total degree i + j."""
        t = i + j
        vec = [0] * self.complex.dim(t)
        off = self.offsets[(i, j)]
        bj = self.B.dim(j)
        for a, x in enumerate(u):
            if x:
                for b, y in enumerate(v):
                    if y:
                        vec[off + a * bj + b] = x * y
        return tuple(vec)


def _level_images(X: PerverseComplex, q: Perversity) -> dict[int, Subspace]:
    # image of the level inside the infinite envelope, degree by degree
    f = X.transition(q, Perversity.infinity(X.n))
    return {m: Subspace.from_columns(f.block(m))
            for m in X.complex(q).degrees()}


def perverse_tensor(A: PerverseComplex, B: PerverseComplex) -> PerverseComplex:
    """Levelwise tensor: level p spans the images of A_q (x) B_q' with q + q' <= p.

    The sum is realized inside the tensor product of the infinite levels,
    so transitions are subspace inclusions and compose on the nose.
    """
    if A.n != B.n:
        raise DimensionMismatchError(f"ambient dimensions differ: {A.n} != {B.n}")
    same_ring(A.ring, B.ring)
    n = A.n
    levels = extended_perversities(n)
    T = TensorProduct(A.complex(levels[-1]), B.complex(levels[-1]))
    amb = T.complex
    imA = {q: _level_images(A, q) for q in levels}
    imB = {q: _level_images(B, q) for q in levels}
    subs, incls = {}, {}
    for p in levels:
        vecs_at: dict[int, list] = {}
        for qa in levels:
            for qb in levels:
                if not oplus(qa, qb) <= p:
                    continue
                for i, U in imA[qa].items():
                    for j, V in imB[qb].items():
                        if U.dim == 0 or V.dim == 0:
                            continue
                        bucket = vecs_at.setdefault(i + j, [])
                        for u in U.vectors():
                            for v in V.vectors():
                                bucket.append(T.simple(i, j, u, v))
        spaces = {t: Subspace.span(amb.ring, amb.dim(t), vs)
                  for t, vs in vecs_at.items()}
        subs[p], incls[p] = induced_subcomplex(amb, spaces)
    trans = {}
    for a in levels:
        for b in levels:
            if not (a != b and a <= b):
                continue
            blocks = {}
            for m in subs[a].degrees():
                cols = [list(_restrict(incls[b], m, incls[a].block(m).column(j)))
                        for j in range(subs[a].dim(m))]
                blocks[m] = Matrix.from_columns(amb.ring, cols, nrows=subs[b].dim(m))
            trans[(a, b)] = ChainMap(subs[a], subs[b], blocks, check=False)
    return PerverseComplex(n, subs, trans, check=False)
