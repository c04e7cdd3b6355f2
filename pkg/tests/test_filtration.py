import random
from fractions import Fraction

import pytest

from cupi.exact import (
    ChainMap,
    CochainComplex,
    F2,
    Matrix,
    Q,
    Subspace,
    identity_chain_map,
    quotient_coordinates,
    quotient_representatives,
    zero_complex,
)
from cupi.filtration import (
    FilteredChainMap,
    FilteredComplex,
    HomComplex,
    NotFilteredError,
    TensorComplex,
    bete_filtration,
    canonical_filtration,
    check_er_quasi_iso,
    cup_shift_report,
    hom_filtered,
    is_filtered_map,
    spectral_sequence,
    tensor_filtered,
    trivial_filtration,
)
from cupi.simplicial import standard_chains
from cupi.spaces import double_cover_map, projective_plane
from cupi.steenrod import simplicial_algebra


# -- construction of the three standard filtrations -----------------------


def test_trivial_filtration_has_two_levels():
    C = projective_plane().cochains(F2)
    F = trivial_filtration(C)
    assert F.weights == (-1, 0)
    for n in C.degrees():
        assert F.level(n, -1).dim == 0
        assert F.level(n, 0).dim == C.dim(n)


def test_canonical_filtration_cuts_at_degree_on_zero_differential():
    # with d = 0 every cochain is a cocycle, so tau_p is exactly the
    # part in degrees <= p
    C = CochainComplex(Q, {0: 2, 1: 1, 3: 2}, {})
    F = canonical_filtration(C)
    for p in range(-1, 5):
        for n in C.degrees():
            expected = C.dim(n) if n <= p else 0
            assert F.level(n, p).dim == expected


def test_bete_filtration_on_simplex_chains():
    A = standard_chains(2)  # degrees -2..0
    F = bete_filtration(A)
    assert F.weights == (0, 1, 2)
    for p in F.weights:
        for n in A.degrees():
            expected = A.dim(n) if n >= -p else 0
            assert F.level(n, p).dim == expected


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_is_filtered_through_sigma_t_tau(n):
    # for non-positively graded complexes the identity refines
    # sigma -> trivial -> canonical
    A = standard_chains(n)
    ident = identity_chain_map(A)
    assert is_filtered_map(ident, bete_filtration(A), trivial_filtration(A))
    assert is_filtered_map(ident, trivial_filtration(A), canonical_filtration(A))
    assert is_filtered_map(ident, bete_filtration(A), canonical_filtration(A))


# -- tensor and hom filtrations -------------------------------------------


def test_tensor_of_trivial_is_trivial():
    A = standard_chains(1)
    B = standard_chains(2)
    FT = tensor_filtered(trivial_filtration(A), trivial_filtration(B))
    C = FT.complex
    assert FT.top() == 0
    for n in C.degrees():
        assert FT.level(n, -1).dim == 0
        assert FT.level(n, 0).dim == C.dim(n)


def test_tensor_of_bete_is_bete():
    B = standard_chains(1)
    T = TensorComplex(B, B)
    FT = tensor_filtered(bete_filtration(B), bete_filtration(B))
    FS = bete_filtration(T.complex)
    for n in T.complex.degrees():
        for m in range(-1, 4):
            assert FT.level(n, m) == FS.level(n, m)


def test_tensor_top_levels_add():
    A = standard_chains(1)
    FA = bete_filtration(A)
    FT = tensor_filtered(FA, FA)
    assert FT.top() == FA.top() + FA.top()
    assert FT.bottom() == FA.bottom() + FA.bottom()


def test_tensor_complex_differential_squares_to_zero_and_embeds():
    A = standard_chains(2)
    T = TensorComplex(A, A)  # constructor validates d d = 0
    u = (Fraction(1),)  # the top chain of the simplex, degree -2
    v = tuple([Fraction(1)] + [Fraction(0)] * (A.dim(0) - 1))
    w = T.embed(-2, 0, u, v)
    assert sum(1 for x in w if x) == 1


def test_hom_of_trivial_is_trivial():
    A = standard_chains(1)
    FH = hom_filtered(trivial_filtration(A), trivial_filtration(A))
    C = FH.complex
    for n in C.degrees():
        assert FH.level(n, -1).dim == 0
        assert FH.level(n, 0).dim == C.dim(n)


def test_identity_sits_in_hom_level_zero_exactly():
    B = standard_chains(1)
    H = HomComplex(B, B)
    FH = hom_filtered(bete_filtration(B), bete_filtration(B))
    blocks = {m: Matrix.identity(Q, B.dim(m)) for m in B.degrees()}
    x = H.coordinates(0, blocks)
    assert FH.level(0, 0).contains(x)
    assert not FH.level(0, -1).contains(x)


def test_hom_level_membership_matches_elementwise_condition():
    # brute force: an element lies in level p iff each block carries
    # W_q into W'_{q+p}
    B = standard_chains(1)
    FA = bete_filtration(B)
    H = HomComplex(B, B)
    FH = hom_filtered(FA, FA)
    rng = random.Random(9)
    for n in H.complex.degrees():
        for p in range(FH.bottom() - 1, FH.top() + 1):
            S = FH.level(n, p)
            for trial in range(10):
                x = tuple(Fraction(rng.randrange(-2, 3)) for _ in range(H.complex.dim(n)))
                direct = True
                for q in FA.weights:
                    for m in B.degrees():
                        blk = H.block_matrix(n, x, m)
                        img = FA.level(m, q).image(blk)
                        if not FA.level(m + n, q + p).contains_space(img):
                            direct = False
                assert S.contains(x) == direct


# -- spectral sequences ----------------------------------------------------


def test_trivial_filtration_degenerates_at_e1():
    C = projective_plane().cochains(F2)
    ss = spectral_sequence(trivial_filtration(C))
    assert ss.stable_at == 1
    assert ss.page_turn_verified and ss.converges()
    betti = {n: g.dim for n, g in C.cohomology().items()}
    assert {k: e.dim for k, e in ss.pages[1].items()} == {
        (0, n): d for n, d in betti.items()
    }


def test_canonical_filtration_recovers_cohomology_degreewise():
    C = projective_plane().cochains(F2)
    ss = spectral_sequence(canonical_filtration(C))
    assert ss.page_turn_verified and ss.converges()
    got = {k: e.dim for k, e in ss.pages[ss.max_page].items()}
    betti = {n: g.dim for n, g in C.cohomology().items()}
    assert got == {(-n, 2 * n): d for n, d in betti.items()}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bete_e1_is_the_complex_itself(n):
    A = standard_chains(n)
    ss = spectral_sequence(bete_filtration(A))
    for (p, q), e in ss.pages[1].items():
        assert q == 0
        assert e.dim == A.dim(p)
    assert ss.converges()


def random_invertible(rng, ring, n):
    while True:
        if ring == F2:
            rows = [[rng.randrange(2) for _ in range(n)] for _ in range(n)]
        else:
            rows = [[Fraction(rng.randrange(-2, 3)) for _ in range(n)] for _ in range(n)]
        m = Matrix.from_rows(ring, rows, ncols=n)
        if m.rank() == n:
            return m


def random_filtered_complex(rng, ring, max_deg=3):
    """Random complex (conjugated sum of elementary pieces) with a random
    filtration by subcomplexes generated by random cochains."""
    free = {n: rng.randrange(0, 3) for n in range(max_deg + 1)}
    pairs = {n: rng.randrange(0, 3) for n in range(max_deg)}
    dims = {}
    for n in range(max_deg + 1):
        dims[n] = free.get(n, 0) + pairs.get(n, 0) + pairs.get(n - 1, 0)
    diffs = {}
    for n in range(max_deg):
        rows = []
        for r in range(dims[n + 1]):
            row = [0] * dims[n]
            # pair targets sit after free and source slots in degree n+1
            t0 = free.get(n + 1, 0) + pairs.get(n + 1, 0)
            s0 = free.get(n, 0)
            if r >= t0 and (r - t0) < pairs.get(n, 0):
                row[s0 + (r - t0)] = 1
            rows.append(row)
        diffs[n] = Matrix.from_rows(ring, rows, ncols=dims[n])
    # change of basis
    P = {n: random_invertible(rng, ring, dims[n]) for n in range(max_deg + 1)}
    conj = {}
    for n in range(max_deg):
        sol = P[n].solve_matrix(Matrix.identity(ring, dims[n]))
        conj[n] = P[n + 1] @ diffs[n] @ sol
    C = CochainComplex(ring, dims, conj)

    gens = []
    for n in C.degrees():
        for _ in range(C.dim(n)):
            if ring == F2:
                gens.append((n, tuple(rng.randrange(2) for _ in range(C.dim(n)))))
            else:
                gens.append((n, tuple(Fraction(rng.randrange(-2, 3)) for _ in range(C.dim(n)))))
    rng.shuffle(gens)
    n_levels = rng.randrange(2, 5)
    chunks = [gens[i::n_levels] for i in range(n_levels - 1)]
    levels = {}
    acc = []
    for m in range(n_levels - 1):
        acc = acc + chunks[m]
        row = {}
        for n in C.degrees():
            vecs = [v for (deg, v) in acc if deg == n]
            vecs += [C.d(deg).apply(v) for (deg, v) in acc if deg == n - 1]
            row[n] = Subspace.span(ring, C.dim(n), vecs)
        levels[m] = row
    levels[n_levels - 1] = {n: Subspace.full(ring, C.dim(n)) for n in C.degrees()}
    return FilteredComplex(C, levels)


def gr_cohomology_dims(F, m):
    """Cohomology of W_m / W_{m-1}, computed directly from quotients."""
    C = F.complex
    reps = {n: quotient_representatives(F.level(n, m), F.level(n, m - 1))
            for n in range(min(C.degrees()), max(C.degrees()) + 2)}
    dims = {n: len(r) for n, r in reps.items()}
    diffs = {}
    for n in C.degrees():
        cols = []
        for rep in reps[n]:
            dx = C.d(n).apply(rep)
            cols.append(list(quotient_coordinates(reps[n + 1], F.level(n + 1, m - 1), dx)))
        diffs[n] = Matrix.from_columns(C.ring, cols, nrows=dims[n + 1])
    G = CochainComplex(C.ring, dims, diffs)
    return {n: g.dim for n, g in G.cohomology().items()}


@pytest.mark.parametrize("ring", [F2, Q])
def test_random_filtered_complexes_page_mechanics(ring):
    rng = random.Random(42 if ring == F2 else 43)
    for _ in range(15):
        F = random_filtered_complex(rng, ring)
        ss = spectral_sequence(F)
        # E1 equals cohomology of the associated graded, column by column
        for m in F.weights:
            grh = gr_cohomology_dims(F, m)
            for n, d in grh.items():
                assert ss.entry(1, -m, n + m).dim == d
            for (p, q), e in ss.pages[1].items():
                if p == -m and e.dim:
                    assert grh.get(p + q, 0) == e.dim
        assert ss.page_turn_verified
        assert ss.converges()


def cone_of(f: ChainMap):
    """Cone^n = A^{n+1} + B^n with d(a, b) = (-da, f a + db)."""
    A, B = f.source, f.target
    degrees = sorted({n - 1 for n in A.degrees()} | set(B.degrees()))
    dims = {n: A.dim(n + 1) + B.dim(n) for n in degrees}
    diffs = {}
    for n in degrees:
        dA = A.d(n + 1)
        top = (Matrix.zero(f.ring, dA.nrows, dA.ncols) - dA).hstack(
            Matrix.zero(f.ring, A.dim(n + 2), B.dim(n)))
        bot = f.block(n + 1).hstack(B.d(n))
        diffs[n] = top.vstack(bot)
    C = CochainComplex(f.ring, dims, diffs)
    zeros = {n: Subspace.zero(f.ring, C.dim(n)) for n in degrees}
    bpart = {}
    for n in degrees:
        vecs = []
        for j in range(B.dim(n)):
            v = [0] * C.dim(n)
            v[A.dim(n + 1) + j] = 1
            vecs.append(v)
        bpart[n] = Subspace.span(f.ring, C.dim(n), vecs)
    full = {n: Subspace.full(f.ring, C.dim(n)) for n in degrees}
    W = FilteredComplex(C, {-2: zeros, -1: bpart, 0: full})
    return C, W


@pytest.mark.parametrize("ring", [F2, Q])
def test_cone_spectral_sequence_d1_is_the_induced_map(ring):
    f = double_cover_map().pullback(ring)  # C*(triangle) -> C*(hexagon)
    A, B = f.source, f.target
    C, W = cone_of(f)
    ss = spectral_sequence(W)
    assert ss.page_turn_verified and ss.converges()
    for q in [-1, 0, 1, 2]:
        ga = A.cohomology(q + 1)
        gb = B.cohomology(q + 1)
        ea = ss.entry(1, 0, q)
        eb = ss.entry(1, 1, q)
        assert ea.dim == ga.dim
        assert eb.dim == gb.dim
        if ga.dim == 0:
            continue
        # embed H^{q+1}(A) and H^{q+1}(B) into the page and compare d1
        # against the induced map
        cols_a = []
        for rep in ga.representatives:
            vec = list(rep) + [0] * B.dim(q)
            cols_a.append(list(ea.coordinates(tuple(vec))))
        MA = Matrix.from_columns(ring, cols_a, nrows=ea.dim)
        cols_b = []
        for rep in gb.representatives:
            vec = [0] * A.dim(q + 2) + list(rep)
            cols_b.append(list(eb.coordinates(tuple(vec))))
        MB = Matrix.from_columns(ring, cols_b, nrows=eb.dim)
        assert MA.rank() == ea.dim and MB.rank() == eb.dim
        d1 = ss.d(1, 0, q)
        hf = f.induced_on_cohomology(q + 1)
        assert d1 @ MA == MB @ hf


def test_er_quasi_iso_identity_and_zero():
    C = projective_plane().cochains(F2)
    F = canonical_filtration(C)
    ident = FilteredChainMap(identity_chain_map(C), F, F)
    for r in range(0, 4):
        assert check_er_quasi_iso(ident, r)
    Z = zero_complex(F2)
    zmap = FilteredChainMap(ChainMap(C, Z, {}, check=False), F, trivial_filtration(Z))
    assert not check_er_quasi_iso(zmap, 1)


def test_er_quasi_iso_can_start_false_and_become_true():
    # acyclic 4-dimensional complex mapped to zero: a quasi-isomorphism
    # whose E1 comparison fails but whose E2 comparison holds
    A = CochainComplex(Q, {0: 2, 1: 2}, {0: Matrix.identity(Q, 2)})
    Z = zero_complex(Q)
    f = FilteredChainMap(ChainMap(A, Z, {}, check=False),
                         bete_filtration(A), trivial_filtration(Z))
    assert not check_er_quasi_iso(f, 0)
    assert check_er_quasi_iso(f, 1)
    assert check_er_quasi_iso(f, 5)


def test_not_filtered_map_is_rejected():
    A = CochainComplex(Q, {0: 1, 1: 1}, {0: Matrix.identity(Q, 1)})
    with pytest.raises(NotFilteredError):
        FilteredChainMap(identity_chain_map(A), bete_filtration(A), trivial_filtration(A))


# -- cup_i weight shift -----------------------------------------------------


def test_cup_shift_holds_for_trivial_filtration():
    K = projective_plane()
    A = simplicial_algebra(K)
    rep = cup_shift_report(A, trivial_filtration(A.complex))
    assert rep.holds
    assert rep.checked > 0
    assert rep.violations == []


def test_cup_shift_detects_shifted_filtration():
    K = projective_plane()
    A = simplicial_algebra(K)
    C = A.complex
    zeros = {n: Subspace.zero(F2, C.dim(n)) for n in C.degrees()}
    fulls = {n: Subspace.full(F2, C.dim(n)) for n in C.degrees()}
    shifted = FilteredComplex(C, {-2: zeros, -1: fulls})
    rep = cup_shift_report(A, shifted)
    assert not rep.holds
    v = rep.violations[0]
    assert v["required_level"] < v["minimal_level"]
    assert v["minimal_level"] == -1
