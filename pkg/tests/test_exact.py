import random
from fractions import Fraction

import pytest

from cupi.exact import (
    F2, Q, Matrix, Subspace, CochainComplex, ChainMap,
    NotAComplexError, RingError, ShapeError,
    quotient_representatives, quotient_coordinates, direct_sum,
)


# A deliberately naive dense mod-2 model.  The packed-bit representation
# must agree with it entry for entry.

def naive_rref_f2(rows, ncols):
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for j in range(ncols):
        sel = None
        for i in range(r, len(rows)):
            if rows[i][j]:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][j]:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[r])]
        pivots.append(j)
        r += 1
    return rows, pivots


def random_f2_entries(rng, m, n):
    return [[rng.randrange(2) for _ in range(n)] for _ in range(m)]


def test_packed_f2_matches_naive_model():
    rng = random.Random(7)
    for _ in range(40):
        m, n = rng.randrange(1, 9), rng.randrange(1, 9)
        entries = random_f2_entries(rng, m, n)
        M = Matrix.from_rows(F2, entries)
        R, pivots = M.rref()
        naive, naive_pivots = naive_rref_f2(entries, n)
        assert R.to_rows() == naive
        assert list(pivots) == naive_pivots


def test_packed_f2_product_matches_naive_model():
    rng = random.Random(8)
    for _ in range(30):
        m, k, n = rng.randrange(1, 7), rng.randrange(1, 7), rng.randrange(1, 7)
        A = random_f2_entries(rng, m, k)
        B = random_f2_entries(rng, k, n)
        P = Matrix.from_rows(F2, A) @ Matrix.from_rows(F2, B)
        naive = [[sum(A[i][t] * B[t][j] for t in range(k)) % 2 for j in range(n)] for i in range(m)]
        assert P.to_rows() == naive


@pytest.mark.parametrize("ring", [F2, Q])
def test_kernel_columns_are_killed_and_complete(ring):
    rng = random.Random(11)
    for _ in range(25):
        m, n = rng.randrange(1, 8), rng.randrange(1, 8)
        if ring == F2:
            M = Matrix.from_rows(F2, random_f2_entries(rng, m, n))
        else:
            M = Matrix.from_rows(Q, [[Fraction(rng.randrange(-3, 4)) for _ in range(n)] for _ in range(m)])
        K = M.kernel()
        assert (M @ K).is_zero()
        assert K.ncols == n - M.rank()
        # kernel columns are independent
        assert K.rank() == K.ncols


@pytest.mark.parametrize("ring", [F2, Q])
def test_solve_roundtrip(ring):
    rng = random.Random(13)
    for _ in range(25):
        m, n = rng.randrange(1, 7), rng.randrange(1, 7)
        if ring == F2:
            M = Matrix.from_rows(F2, random_f2_entries(rng, m, n))
            x = [rng.randrange(2) for _ in range(n)]
        else:
            M = Matrix.from_rows(Q, [[Fraction(rng.randrange(-3, 4)) for _ in range(n)] for _ in range(m)])
            x = [Fraction(rng.randrange(-3, 4)) for _ in range(n)]
        b = M.apply(x)
        sol = M.solve(b)
        assert sol is not None
        assert M.apply(sol) == tuple(b)


def test_solve_detects_unsolvable():
    M = Matrix.from_rows(Q, [[1, 0], [2, 0]])
    assert M.solve([1, 1]) is None


def test_float_entries_rejected():
    with pytest.raises(RingError):
        Matrix.from_rows(Q, [[0.5]])
    with pytest.raises(RingError):
        Matrix.from_rows(F2, [[1.0]])


def test_rank_transpose_invariant():
    rng = random.Random(17)
    for _ in range(20):
        M = Matrix.from_rows(F2, random_f2_entries(rng, rng.randrange(1, 8), rng.randrange(1, 8)))
        assert M.rank() == M.transpose().rank()


def test_subspace_sum_intersection_dimension_formula():
    rng = random.Random(19)
    for ring in (F2, Q):
        for _ in range(20):
            n = rng.randrange(1, 7)
            def vec():
                if ring == F2:
                    return [rng.randrange(2) for _ in range(n)]
                return [Fraction(rng.randrange(-2, 3)) for _ in range(n)]
            U = Subspace.span(ring, n, [vec() for _ in range(rng.randrange(0, 4))])
            V = Subspace.span(ring, n, [vec() for _ in range(rng.randrange(0, 4))])
            S = U.add(V)
            I = U.intersect(V)
            assert S.dim + I.dim == U.dim + V.dim
            assert U.contains_space(I) and V.contains_space(I)
            assert S.contains_space(U) and S.contains_space(V)


def test_subspace_preimage():
    # f(x,y,z) = (x+y, z) over Q; preimage of span{(1,0)} is {z=0}
    f = Matrix.from_rows(Q, [[1, 1, 0], [0, 0, 1]])
    amb = Subspace.full(Q, 3)
    pre = amb.preimage(f, Subspace.span(Q, 2, [[1, 0]]))
    assert pre.dim == 2
    for v in pre.vectors():
        assert v[2] == 0


def test_quotient_representatives_are_deterministic_and_complete():
    big = Subspace.span(F2, 4, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
    small = Subspace.span(F2, 4, [[1, 1, 0, 0]])
    reps = quotient_representatives(big, small)
    assert len(reps) == 2
    again = quotient_representatives(big, small)
    assert reps == again
    v = (1, 0, 1, 0)
    coords = quotient_coordinates(reps, small, v)
    assert len(coords) == 2


# -- cochain complexes ---------------------------------------------------

def circle_complex(ring):
    # hollow triangle: 3 vertices, 3 edges
    if ring == F2:
        d0 = Matrix.from_rows(F2, [[1, 1, 0], [1, 0, 1], [0, 1, 1]])
    else:
        d0 = Matrix.from_rows(Q, [[-1, 1, 0], [-1, 0, 1], [0, -1, 1]])
    return CochainComplex(ring, {0: 3, 1: 3}, {0: d0})


@pytest.mark.parametrize("ring", [F2, Q])
def test_circle_cohomology(ring):
    c = circle_complex(ring)
    h = c.betti()
    assert h == {0: 1, 1: 1}
    g = c.cohomology(1)
    for rep in g.representatives:
        assert g.cocycles.contains(rep)


def test_not_a_complex_rejected():
    d0 = Matrix.from_rows(F2, [[1], [0]])
    d1 = Matrix.from_rows(F2, [[1, 1]])
    with pytest.raises(NotAComplexError):
        CochainComplex(F2, {0: 1, 1: 2, 2: 1}, {0: d0, 1: d1})


def test_cohomology_invariant_under_change_of_basis():
    rng = random.Random(23)

    def random_invertible(ring, n):
        while True:
            if ring == F2:
                M = Matrix.from_rows(F2, random_f2_entries(rng, n, n))
            else:
                M = Matrix.from_rows(Q, [[Fraction(rng.randrange(-2, 3)) for _ in range(n)] for _ in range(n)])
            if M.rank() == n:
                return M

    def invert(M):
        X = M.solve_matrix(Matrix.identity(M.ring, M.nrows))
        assert X is not None
        return X

    for ring in (F2, Q):
        base = circle_complex(ring)
        P0 = random_invertible(ring, 3)
        P1 = random_invertible(ring, 3)
        # conjugated differential: P1 d P0^{-1}
        d0 = P1 @ base.d(0) @ invert(P0)
        other = CochainComplex(ring, dict(base.dims), {0: d0})
        assert other.betti() == base.betti()


def test_chain_map_validation_and_induced_map():
    c = circle_complex(F2)
    ident = ChainMap(c, c, {0: Matrix.identity(F2, 3), 1: Matrix.identity(F2, 3)})
    m = ident.induced_on_cohomology(1)
    assert m == Matrix.identity(F2, 1)
    bad = {0: Matrix.identity(F2, 3), 1: Matrix.zero(F2, 3, 3)}
    with pytest.raises(NotAComplexError):
        ChainMap(c, c, bad)


def test_direct_sum_betti_adds():
    a = circle_complex(F2)
    b = circle_complex(F2)
    s, offsets = direct_sum([a, b])
    assert s.betti() == {0: 2, 1: 2}
    assert offsets[0][0] == 0 and offsets[1][0] == 3


def test_negative_degrees_supported():
    # chains of the 1-simplex as a complex in degrees -1, 0
    d = Matrix.from_rows(Q, [[-1], [1]])
    c = CochainComplex(Q, {-1: 1, 0: 2}, {-1: d})
    assert c.betti() == {0: 1}
