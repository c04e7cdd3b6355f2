"""Steenrod squares from cup_i structures over F2.

An arity-2 operad word is e_i or tau_i with de_i = dtau_i =
e_{i-1} + tau_{i-1}; acting on a pair of cochains, e_i gives a cup_i b
and tau_i gives b cup_i a.  The structure is "nice" when a cup_|a| a = a
and a cup_i b = 0 for i above either degree; then

    P^s(a) = da cup_{k-s+1} a + a cup_{k-s} a      (|a| = k, s <= k)

commutes with d and induces Sq^s [a] = [a cup_{k-s} a] on cohomology.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .exact import F2, CochainComplex, Matrix, RingError, ShapeError, vec_add, vec_is_zero, zero_vector
from .simplicial import SimplicialComplex, cup_i


@dataclass(frozen=True)
class E2Word:
    kind: str  # "e" or "tau"
    index: int

    def __post_init__(self):
        if self.kind not in ("e", "tau"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.index < 0:
            raise ValueError("generator index must be >= 0")

    def boundary(self) -> tuple["E2Word", ...]:
        """d e_i = d tau_i = e_{i-1} + tau_{i-1}; zero in index 0."""
        if self.index == 0:
            return ()
        return (E2Word("e", self.index - 1), E2Word("tau", self.index - 1))


CupOp = Callable[[int, int, Sequence, int, Sequence], tuple]


class CupIAlgebra:
    """A cochain complex over F2 together with its cup_i operations.

    op(i, a_deg, a, b_deg, b) returns the vector of a cup_i b in degree
    a_deg + b_deg - i; i = -1 is the zero operation.
    """

    def __init__(self, complex: CochainComplex, op: CupOp, name: str = ""):
        if complex.ring != F2:
            raise RingError("cup_i structures are F2 only")
        self.complex = complex
        self.op = op
        self.name = name

    def cup(self, i: int, a_deg: int, a: Sequence, b_deg: int, b: Sequence) -> tuple:
        if i < 0:
            return zero_vector(F2, self.complex.dim(a_deg + b_deg - i))
        return self.op(i, a_deg, a, b_deg, b)

    def theta(self, word: E2Word, a_deg: int, a: Sequence, b_deg: int, b: Sequence) -> tuple:
        if word.kind == "e":
            return self.cup(word.index, a_deg, a, b_deg, b)
        return self.cup(word.index, b_deg, b, a_deg, a)

    def leibniz_defect(self, i: int, a_deg: int, a: Sequence, b_deg: int, b: Sequence) -> tuple:
        """d(a u_i b) + a u_{i-1} b + b u_{i-1} a + da u_i b + a u_i db; zero iff the law holds."""
        C = self.complex
        da = C.d(a_deg).apply(a)
        db = C.d(b_deg).apply(b)
        total = C.d(a_deg + b_deg - i).apply(self.cup(i, a_deg, a, b_deg, b))
        total = vec_add(F2, total, self.cup(i - 1, a_deg, a, b_deg, b))
        total = vec_add(F2, total, self.cup(i - 1, b_deg, b, a_deg, a))
        total = vec_add(F2, total, self.cup(i, a_deg + 1, da, b_deg, b))
        total = vec_add(F2, total, self.cup(i, a_deg, a, b_deg + 1, db))
        return total

    def is_nice_on(self, a_deg: int, a: Sequence, b_deg: int, b: Sequence) -> bool:
        if self.cup(a_deg, a_deg, a, a_deg, a) != tuple(a):
            return False
        for i in range(min(a_deg, b_deg) + 1, a_deg + b_deg + 1):
            if a_deg + b_deg - i < 0:
                break
            if not vec_is_zero(self.cup(i, a_deg, a, b_deg, b)):
                return False
        return True


def simplicial_algebra(K: SimplicialComplex) -> CupIAlgebra:
    C = K.cochains(F2)

    def op(i, a_deg, a, b_deg, b):
        return cup_i(K, a_deg, a, b_deg, b, i)

    return CupIAlgebra(C, op, name="simplicial")


def ps(algebra: CupIAlgebra, s: int, k: int, a: Sequence) -> tuple:
    """Chain-level P^s of a degree-k cochain; lands in degree k+s.

    Defined for s <= k; above that the result is the zero vector, matching
    the vanishing of Sq^s above the degree.
    """
    C = algebra.complex
    if s > k:
        return zero_vector(F2, C.dim(k + s))
    da = C.d(k).apply(a)
    first = algebra.cup(k - s + 1, k + 1, da, k, a)
    second = algebra.cup(k - s, k, a, k, a)
    return vec_add(F2, first, second)


def sq_class(algebra: CupIAlgebra, s: int, k: int, cocycle: Sequence,
             target_group=None) -> tuple:
    """Coordinates of Sq^s [cocycle] in the canonical basis of H^{k+s}."""
    C = algebra.complex
    tg = target_group if target_group is not None else C.cohomology(k + s)
    if s > k:
        return zero_vector(F2, tg.dim)
    if not C.cocycle_space(k).contains(cocycle):
        raise ShapeError("sq needs a cocycle representative")
    value = algebra.cup(k - s, k, cocycle, k, cocycle)
    return C.class_coordinates(k + s, value, tg)


def sq_matrix(algebra: CupIAlgebra, s: int, k: int) -> Matrix:
    """Matrix of Sq^s: H^k -> H^{k+s} in the canonical bases."""
    C = algebra.complex
    gk = C.cohomology(k)
    gt = C.cohomology(k + s)
    cols = [list(sq_class(algebra, s, k, rep, gt)) for rep in gk.representatives]
    return Matrix.from_columns(F2, cols, nrows=gt.dim)


def sq_table(algebra: CupIAlgebra, max_s: Optional[int] = None) -> dict[tuple[int, int], Matrix]:
    """All Sq^s: H^k -> H^{k+s} with nonzero source and target."""
    C = algebra.complex
    groups = {k: g for k, g in C.cohomology().items()}
    out = {}
    for k, g in sorted(groups.items()):
        top = k if max_s is None else min(k, max_s)
        for s in range(0, top + 1):
            if groups.get(k + s) is None:
                continue
            out[(s, k)] = sq_matrix(algebra, s, k)
    return out
