"""Stratified complexes, face-poset sheaves, truncation towers, and IH."""

import pytest

from cupi.codiagram import (
    NotFunctorialError,
    RepresentativeMissingError,
    UnsupportedRingError,
    normalized_poset_algebra,
)
from cupi.exact import (
    F2,
    Q,
    ChainMap,
    CochainComplex,
    Matrix,
    vec_add,
    vec_is_zero,
    zero_complex,
    zero_vector,
)
from cupi.intersection import (
    BadStrataError,
    LandingError,
    NotOpenError,
    PosetSheaf,
    attachment_unit,
    check_axioms,
    constant_sheaf,
    deligne_ic,
    hypercohomology,
    ih_steenrod,
    ih_steenrod_matrix,
    intersection_homology,
    pushforward_open,
    stalk_cup,
    stratified_from_data,
    stratified_to_data,
    stratify,
    theta,
)
from cupi.perversity import (
    InvalidPerversityError,
    Perversity,
    extended_perversities,
    l_perversity,
    oplus,
)
from cupi.simplicial import SimplicialComplex
from cupi.spaces import (
    pinched_torus,
    projective_plane,
    simplex,
    sphere,
    suspended_torus,
    torus,
)
from cupi.steenrod import simplicial_algebra, sq_matrix

# -- oracles ------------------------------------------------------------------
#
# Both closed-form formulas below are classical cone-collapse computations for
# a suspension, derived independently of the code under test: the chain-level
# one counts allowable cycles degree by degree, the sheaf-level one tracks
# which link classes the final truncation stage keeps at the two apexes.


def suspension_ih_oracle(link, p, ring):
    """Intersection homology ranks of the suspension of a closed link.

    Cones on cycles kill everything in low degrees, but allowability caps
    how deep a chain may dip into an apex: with n = dim link + 1 the cutoff
    degree is c = n - 1 - p(n).  Below c classes are link classes, at c
    nothing survives, above c every class is a suspended link class.
    """
    b = link.cochains(ring).betti()
    n = link.dim + 1
    c = n - 1 - p.value(n)
    out = {}
    for k in range(n + 1):
        if k < c:
            out[k] = b.get(k, 0)
        elif k == c:
            out[k] = 0
        else:
            out[k] = b.get(k - 1, 0)
    return out


def suspension_sheaf_oracle(link, p, ring):
    """Hypercohomology ranks of the truncated tower over a suspension.

    Away from the apexes the tower is constant, so link classes in degrees
    i <= p(n) survive at both cone points and glue to one global class each;
    everything above the cut dies at the apexes and instead contributes the
    suspended class one degree up.  Zero entries are omitted, matching
    CochainComplex.betti.
    """
    b = link.cochains(ring).betti()
    n = link.dim + 1
    cut = p.value(n)
    out = {}
    for i in range(n + 1):
        v = (b.get(i, 0) if i <= cut else 0) + (b.get(i - 1, 0) if i - 1 > cut else 0)
        if v:
            out[i] = v
    return out


def invertible(m: Matrix) -> bool:
    return m.nrows == m.ncols and len(m.rref()[1]) == m.nrows


def test_oracles_agree_on_a_sphere_suspension():
    # suspending S^2 gives S^3; both formulas must reproduce H(S^3)
    link = sphere(2)
    for p in (Perversity.zero(3), Perversity.top(3)):
        assert suspension_ih_oracle(link, p, F2) == {0: 1, 1: 0, 2: 0, 3: 1}
        assert suspension_sheaf_oracle(link, p, Q) == {0: 1, 3: 1}


def test_oracles_are_dual_gradings_of_each_other():
    # independent derivations; their agreement under k <-> n-k is a theorem,
    # so any drift in one formula shows up here before touching the package
    for link in (torus(), sphere(2)):
        n = link.dim + 1
        for p in extended_perversities(n)[:-1]:
            for ring in (F2, Q):
                chain = suspension_ih_oracle(link, p, ring)
                sheaf = suspension_sheaf_oracle(link, p, ring)
                assert chain == {n - i: sheaf.get(i, 0) for i in range(n + 1)}


# -- fixtures -----------------------------------------------------------------


@pytest.fixture(scope="module")
def sigma_t2():
    return stratify(suspended_torus(), {3: [["N"], ["S"]]})


@pytest.fixture(scope="module")
def pinched():
    return stratify(pinched_torus(), {2: [["p"]]})


@pytest.fixture(scope="module")
def rp2_trivial():
    return stratify(projective_plane(), {})


@pytest.fixture(scope="module")
def ic_sigma(sigma_t2):
    return deligne_ic(sigma_t2, F2)


@pytest.fixture(scope="module")
def ic_pinched(pinched):
    return deligne_ic(pinched, F2)


@pytest.fixture(scope="module")
def ic_pinched_q(pinched):
    return deligne_ic(pinched, Q)


@pytest.fixture(scope="module")
def ic_rp2(rp2_trivial):
    return deligne_ic(rp2_trivial, F2)


# -- stratification -----------------------------------------------------------


def test_stratify_suspended_torus(sigma_t2):
    X = sigma_t2
    assert X.n == 3
    assert X.skeleton(0) == frozenset({("N",), ("S",)})
    assert X.skeleton(1) == X.skeleton(0)  # fill rule: nothing of dim 1 given
    assert set(X.open_faces(2)) == set(X.open_faces(3))
    assert len(X.open_faces(4)) == len(X.faces)
    assert ("N",) not in X.open_faces(2) and ("S",) not in X.open_faces(2)


def test_stratify_orders_faces_by_dimension(sigma_t2):
    for seq in (sigma_t2.faces, sigma_t2.open_faces(2)):
        lens = [len(f) for f in seq]
        assert lens == sorted(lens)


def test_stratify_open_sets_are_up_closed(pinched):
    U = set(pinched.open_faces(2))
    for f in pinched.faces:
        if f in U:
            for g in pinched.faces:
                if set(f) < set(g):
                    assert g in U


def test_stratify_trivial_strata():
    X = stratify(sphere(2), {})
    assert X.skeleton(0) == frozenset()
    assert tuple(X.open_faces(2)) == tuple(X.faces)


def test_stratify_rejects_bad_input():
    with pytest.raises(BadStrataError):
        stratify(pinched_torus(), {2: [["nope"]]})  # unknown vertex
    with pytest.raises(BadStrataError):
        stratify(pinched_torus(), {2: [["u0", "w0"]]})  # not a simplex
    with pytest.raises(BadStrataError):
        stratify(pinched_torus(), {2: [["u0", "u1"]]})  # dim 1 > n - 2
    with pytest.raises(BadStrataError):
        stratify(pinched_torus(), {1: [["p"]]})  # codimension-one stratum
    with pytest.raises(BadStrataError):
        stratify(pinched_torus(), {5: [["p"]]})  # codim beyond dimension
    with pytest.raises(BadStrataError):
        # whole space singular: the regular part must be dense
        stratify(simplex(2), {2: [[0], [1], [2]], 0: [[0, 1, 2]]})


def test_stratify_requires_dense_regular_part():
    # isolated vertex has no regular coface once declared singular
    K = SimplicialComplex(("a", "b", "c", "z"), [("a", "b", "c"), ("z",)])
    with pytest.raises(BadStrataError):
        stratify(K, {2: [["z"]]})


def test_stratified_json_round_trip(sigma_t2):
    data = stratified_to_data(sigma_t2)
    assert set(data) == {"vertices", "facets", "strata"}
    assert {"codim": 3, "facets": [["N"], ["S"]]} in [
        {"codim": s["codim"], "facets": sorted(s["facets"])} for s in data["strata"]
    ]
    again = stratified_from_data(data)
    assert again.faces == sigma_t2.faces
    assert again.skeleton(0) == sigma_t2.skeleton(0)


# -- constant sheaves and hypercohomology --------------------------------------


def test_constant_sheaf_on_a_simplex_is_contractible():
    for ring in (F2, Q):
        F = constant_sheaf(simplex(2), ring)
        assert hypercohomology(F) == {0: 1}


def test_constant_sheaf_matches_simplicial_cohomology():
    for K in (sphere(1), torus(), projective_plane()):
        for ring in (F2, Q):
            F = constant_sheaf(K, ring)
            assert hypercohomology(F) == K.cochains(ring).betti()


def skyscraper(faces, at, ring):
    """Stalk a point at one face, zero elsewhere, zero restrictions."""
    pt = CochainComplex(ring, {0: 1}, {})
    z = zero_complex(ring)
    stalks = {f: (pt if f == at else z) for f in faces}
    arrows = {}
    for a in faces:
        for b in faces:
            if a != b and set(a) < set(b):
                arrows[(a, b)] = ChainMap(stalks[a], stalks[b], {}, check=False)
    return PosetSheaf(faces, stalks, arrows, ring)


def test_skyscraper_at_a_vertex():
    # supported on a closed point: global sections see exactly the stalk
    faces = constant_sheaf(simplex(2), F2).faces
    assert hypercohomology(skyscraper(faces, (0,), F2)) == {0: 1}


def test_skyscraper_at_the_open_top_cell():
    # extension by zero from the open top cell: the count of chains through
    # the cell is a cone minus its base, leaving one class in the top degree
    faces = constant_sheaf(simplex(2), F2).faces
    for ring in (F2, Q):
        assert hypercohomology(skyscraper(faces, (0, 1, 2), ring)) == {2: 1}


def test_poset_sheaf_validate_catches_broken_functoriality():
    K = simplex(2)
    faces = constant_sheaf(K, F2).faces
    pt = CochainComplex(F2, {0: 1}, {})
    one = Matrix.identity(F2, 1)
    stalks = {f: pt for f in faces}
    arrows = {}
    for a in faces:
        for b in faces:
            if a != b and set(a) < set(b):
                arrows[(a, b)] = ChainMap(pt, pt, {0: one}, check=False)
    arrows[((0,), (0, 1, 2))] = ChainMap(pt, pt, {0: Matrix.zero(F2, 1, 1)}, check=False)
    bad = PosetSheaf(faces, stalks, arrows, F2)
    with pytest.raises(NotFunctorialError):
        bad.validate()


# -- pushforward along open subposets ------------------------------------------


def test_pushforward_along_the_identity(sigma_t2):
    U = sigma_t2.open_faces(2)
    F = constant_sheaf(U, F2)
    P = pushforward_open(F, U)
    assert P.identity
    assert P.faces == F.faces
    assert P.stalk(U[0]).dims == F.stalk(U[0]).dims
    assert hypercohomology(P) == hypercohomology(F)


def test_pushforward_interval_end():
    U = ((1,), (0, 1))
    for ring in (F2, Q):
        F = constant_sheaf(U, ring)
        P = pushforward_open(F, ((0,), (1,), (0, 1)))
        assert P.stalk((0,)).betti() == {0: 1}  # half-open interval is a point
        assert hypercohomology(P) == {0: 1}


def test_pushforward_rejects_non_open_targets():
    F = constant_sheaf(((1,),), F2)  # vertex only: not up-closed in the edge
    with pytest.raises(NotOpenError):
        pushforward_open(F, ((0,), (1,), (0, 1)))


def test_pushforward_cone_apex_stalk_is_link_cohomology():
    base = torus()
    cone = SimplicialComplex(
        base.vertices + ("N",),
        [tuple(f) + ("N",) for f in base.facet_lists()],
    )
    every = constant_sheaf(cone, F2).faces
    open_faces = tuple(f for f in every if f != ("N",))
    for ring in (F2, Q):
        P = pushforward_open(constant_sheaf(open_faces, ring), every)
        assert P.stalk(("N",)).betti() == {0: 1, 1: 2, 2: 1}


def test_pushforward_counit_is_a_quasi_isomorphism(pinched):
    every = pinched.faces
    U = pinched.open_faces(2)
    for ring in (F2, Q):
        F = constant_sheaf(U, ring)
        P = pushforward_open(F, every)
        for face in (U[0], U[len(U) // 2], U[-1]):
            c = P.counit(face)
            c.validate()
            assert P.stalk(face).betti() == F.stalk(face).betti() == {0: 1}
            assert invertible(c.induced_on_cohomology(0))


def test_pushforward_restrictions_respect_cup_i(pinched):
    P = pushforward_open(constant_sheaf(pinched.open_faces(2), F2), pinched.faces)
    a, b = ("p", "u0"), ("p", "u0", "u1")
    assert set(a) < set(b)
    alg_a = P.stalk_algebra(a)
    alg_b = P.stalk_algebra(b)
    r = P.restriction(a, b)
    for i in (0, 1):
        for deg_x, deg_y in ((0, 0), (0, 1), (1, 1)):
            for x in range(min(3, alg_a.complex.dim(deg_x))):
                for y in range(min(3, alg_a.complex.dim(deg_y))):
                    vx = tuple(1 if j == x else 0 for j in range(alg_a.complex.dim(deg_x)))
                    vy = tuple(1 if j == y else 0 for j in range(alg_a.complex.dim(deg_y)))
                    lhs = r.apply(deg_x + deg_y - i, alg_a.cup(i, deg_x, vx, deg_y, vy))
                    rhs = alg_b.cup(i, deg_x, r.apply(deg_x, vx), deg_y, r.apply(deg_y, vy))
                    assert lhs == rhs


def test_attachment_unit_is_a_chain_map(ic_sigma, ic_pinched_q):
    for A, face in ((ic_sigma, ("N",)), (ic_pinched_q, ("p",))):
        X = A.space
        level = A.sheaf(Perversity.zero(X.n))
        target, unit = attachment_unit(level, X.open_faces(X.n), face)
        unit.validate()
        assert unit.source is level.stalk(face)


# -- the truncation tower -------------------------------------------------------


def test_deligne_levels_enumerate_extended_perversities(ic_sigma):
    assert ic_sigma.perversities == extended_perversities(3)


def test_deligne_on_a_manifold_is_the_constant_sheaf(rp2_trivial):
    K = projective_plane()
    for ring in (F2, Q):
        A = deligne_ic(rp2_trivial, ring)
        for p in A.perversities:
            assert A.hypercohomology(p) == K.cochains(ring).betti()
            for f in (rp2_trivial.faces[0], rp2_trivial.faces[-1]):
                assert A.stalk(p, f).betti() == {0: 1}


def test_deligne_apex_stalks_on_the_suspended_torus(ic_sigma):
    zero3, top3 = Perversity.zero(3), Perversity.top(3)
    for apex in (("N",), ("S",)):
        assert ic_sigma.stalk(zero3, apex).betti() == {0: 1}
        assert ic_sigma.stalk(top3, apex).betti() == {0: 1, 1: 2}
        assert ic_sigma.stalk(Perversity.infinity(3), apex).betti() == {0: 1, 1: 2, 2: 1}


def test_deligne_hypercohomology_on_the_suspended_torus(ic_sigma):
    link = torus()
    for p in extended_perversities(3)[:-1]:
        assert ic_sigma.hypercohomology(p) == suspension_sheaf_oracle(link, p, F2)
    assert ic_sigma.hypercohomology(Perversity.infinity(3)) == {0: 1, 1: 2, 2: 1}


def test_deligne_hypercohomology_on_the_pinched_torus(ic_pinched, ic_pinched_q):
    for A in (ic_pinched, ic_pinched_q):
        assert A.hypercohomology(Perversity.zero(2)) == {0: 1, 2: 1}
        assert A.hypercohomology(Perversity.infinity(2)) == {0: 1, 1: 1}


def test_deligne_transitions_commute(ic_sigma):
    zero3, top3, inf3 = (
        Perversity.zero(3),
        Perversity.top(3),
        Perversity.infinity(3),
    )
    first = ic_sigma.transition(zero3, top3)
    second = ic_sigma.transition(top3, inf3)
    direct = ic_sigma.transition(zero3, inf3)
    first.validate()
    composite = second.compose(first)
    for n in range(4):
        assert composite.block(n) == direct.block(n)


def test_deligne_transitions_commute_over_q(ic_pinched_q):
    t = ic_pinched_q.transition(Perversity.zero(2), Perversity.infinity(2))
    t.validate()


def test_evaluator_is_closed_on_cocycles_at_the_cutoff(ic_sigma):
    # cocycle inputs whose cup lands exactly at the truncation degree stay
    # inside the truncated subcomplex; a non-cocycle factor may escape and
    # is then reported as projected
    top3 = Perversity.top(3)
    face = ("N",)
    stalk = ic_sigma.stalk(top3, face)
    z0 = stalk.cocycle_space(0)
    z1 = stalk.cocycle_space(1)
    assert z1.dim > 0
    for ju in range(min(2, z0.dim)):
        for jv in range(min(3, z1.dim)):
            u = z0.basis.column(ju)
            v = z1.basis.column(jv)
            out, exact = stalk_cup(ic_sigma, top3, face, 0, 0, u, 1, v)
            assert exact
            assert len(out) == stalk.dim(1)
    # a non-cocycle degree-0 factor may land outside the kept subspace;
    # the fallback must still return a vector of the right shape
    u = tuple(1 if j == 0 else 0 for j in range(stalk.dim(0)))
    assert not vec_is_zero(stalk.d(0).apply(u))
    v = z1.basis.column(0)
    out, exact = stalk_cup(ic_sigma, top3, face, 0, 0, u, 1, v)
    assert len(out) == stalk.dim(1)
    assert exact in (True, False)


# -- axiom checker --------------------------------------------------------------


def expect_axiom_keys(level):
    assert set(level["axioms"]) == {
        "normalization",
        "bounded_below",
        "stalk_vanishing",
        "attaching",
    }


def test_axioms_pass_on_the_suspended_torus(ic_sigma):
    report = check_axioms(ic_sigma)
    assert report["ok"] is True
    finite = [lvl for lvl in report["levels"] if not lvl.get("skipped")]
    assert len(finite) == 2
    for lvl in finite:
        expect_axiom_keys(lvl)
        assert all(ax["ok"] for ax in lvl["axioms"].values())
    sky = [lvl for lvl in report["levels"] if lvl.get("skipped")]
    assert len(sky) == 1 and sky[0]["perversity"] == "inf"


def test_axioms_pass_on_the_pinched_torus(ic_pinched, ic_pinched_q):
    for A in (ic_pinched, ic_pinched_q):
        report = check_axioms(A)
        assert report["ok"] is True


def test_axioms_pass_on_a_manifold(ic_rp2):
    report = check_axioms(ic_rp2)
    assert report["ok"] is True
    for lvl in report["levels"]:
        if lvl.get("skipped"):
            continue
        att = lvl["axioms"]["attaching"]
        assert att["ok"] is True and att["vacuous"]  # no strata to attach along


def test_axioms_fail_on_the_untruncated_tower(sigma_t2):
    zero3 = Perversity.zero(3)
    mutant = deligne_ic(sigma_t2, F2, cutoffs={zero3: None})
    report = check_axioms(mutant)
    assert report["ok"] is False
    lvl = next(l for l in report["levels"] if l["perversity"] == [0, 0])
    ax = lvl["axioms"]["stalk_vanishing"]
    assert ax["ok"] is False
    assert any(
        w["face"] in (("N",), ("S",)) and w["degree"] == 1 and w["bound"] == 0
        for w in ax["witnesses"]
    )


def test_axioms_fail_after_bumping_a_truncation_index(pinched, sigma_t2):
    zero2 = Perversity.zero(2)
    mutant = deligne_ic(pinched, F2, cutoffs={zero2: (1,)})
    report = check_axioms(mutant)
    assert report["ok"] is False
    lvl = next(l for l in report["levels"] if l["perversity"] == [0])
    assert lvl["axioms"]["stalk_vanishing"]["ok"] is False

    top3 = Perversity.top(3)
    mutant = deligne_ic(sigma_t2, F2, cutoffs={top3: (0, 2)})
    report = check_axioms(mutant)
    lvl = next(l for l in report["levels"] if l["perversity"] == [0, 1])
    ax = lvl["axioms"]["stalk_vanishing"]
    assert ax["ok"] is False
    assert any(w["degree"] == 2 for w in ax["witnesses"])


def test_axioms_fail_on_the_zero_sheaf(pinched):
    mutant = deligne_ic(pinched, F2, cutoffs={Perversity.zero(2): (-1,)})
    report = check_axioms(mutant)
    assert report["ok"] is False
    lvl = next(l for l in report["levels"] if l["perversity"] == [0])
    assert lvl["axioms"]["normalization"]["ok"] is False


# -- chain-level intersection homology -------------------------------------------


def test_ih_of_manifolds_is_ordinary_homology():
    for K in (sphere(2), torus()):
        X = stratify(K, {})
        for ring in (F2, Q):
            b = K.cochains(ring).betti()
            expected = {k: b.get(k, 0) for k in range(K.dim + 1)}
            for p in extended_perversities(K.dim):
                assert intersection_homology(X, p, ring) == expected


def test_ih_of_rp2_sees_the_ring():
    X = stratify(projective_plane(), {})
    zero2 = Perversity.zero(2)
    assert intersection_homology(X, zero2, F2) == {0: 1, 1: 1, 2: 1}
    assert intersection_homology(X, zero2, Q) == {0: 1, 1: 0, 2: 0}


def test_ih_of_the_pinched_torus(pinched):
    zero2 = Perversity.zero(2)
    for ring in (F2, Q):
        assert intersection_homology(pinched, zero2, ring) == {0: 1, 1: 0, 2: 1}
    assert intersection_homology(pinched, Perversity.infinity(2), F2) == {0: 1, 1: 1, 2: 0}


def test_ih_of_the_suspended_torus_matches_the_oracle(sigma_t2):
    link = torus()
    for ring in (F2, Q):
        for p in extended_perversities(3)[:-1]:
            assert intersection_homology(sigma_t2, p, ring) == suspension_ih_oracle(
                link, p, ring
            )
    assert intersection_homology(sigma_t2, Perversity.infinity(3), F2) == {
        0: 1, 1: 2, 2: 1, 3: 0,
    }


def test_ih_rejects_mismatched_perversities(pinched):
    with pytest.raises(InvalidPerversityError):
        intersection_homology(pinched, Perversity.zero(3), F2)


def test_sheaf_and_chain_pipelines_agree_through_the_oracles(ic_sigma, sigma_t2):
    # deliberately compared through the per-space closed forms, never via a
    # generic degree flip
    link = torus()
    for p in extended_perversities(3)[:-1]:
        assert ic_sigma.hypercohomology(p) == suspension_sheaf_oracle(link, p, F2)
        assert intersection_homology(sigma_t2, p, F2) == suspension_ih_oracle(link, p, F2)


# -- Steenrod squares between levels ---------------------------------------------


def test_ih_steenrod_requires_f2(ic_pinched_q):
    zero2 = Perversity.zero(2)
    C = ic_pinched_q.global_complex(zero2)
    with pytest.raises(UnsupportedRingError):
        ih_steenrod(ic_pinched_q, zero2, 0, 0, zero_vector(Q, C.dim(0)))


def test_ih_steenrod_rejects_non_cocycles(ic_pinched):
    zero2 = Perversity.zero(2)
    C = ic_pinched.global_complex(zero2)
    v = tuple(1 if j == 0 else 0 for j in range(C.dim(1)))
    assert not vec_is_zero(C.d(1).apply(v))
    with pytest.raises(RepresentativeMissingError):
        ih_steenrod(ic_pinched, zero2, 1, 1, v)


def test_ih_steenrod_s0_is_the_identity(ic_pinched, ic_sigma):
    cases = [
        (ic_pinched, Perversity.zero(2), (0, 2)),
        (ic_sigma, Perversity.zero(3), (0, 2, 3)),
        (ic_sigma, Perversity.top(3), (0, 1, 3)),
    ]
    for A, p, degrees in cases:
        for k in degrees:
            target, m = ih_steenrod_matrix(A, p, 0, k)
            assert target == p
            dim = A.cohomology(p, k).dim
            assert m == Matrix.identity(F2, dim)


def test_ih_steenrod_on_a_manifold_matches_plain_squares(ic_rp2):
    K = projective_plane()
    plain = simplicial_algebra(K)
    zero2 = Perversity.zero(2)
    for s, k in ((1, 1), (2, 1), (1, 2)):
        target, m = ih_steenrod_matrix(ic_rp2, zero2, s, k)
        reference = sq_matrix(plain, s, k)
        assert m.nrows == reference.nrows and m.ncols == reference.ncols
        assert len(m.rref()[1]) == len(reference.rref()[1])
    # Sq1: H^1 -> H^2 is the nonzero square of the generator
    _, m = ih_steenrod_matrix(ic_rp2, zero2, 1, 1)
    assert not m.is_zero()


def test_ih_steenrod_clips_to_the_ambient_level(ic_sigma):
    top3 = Perversity.top(3)
    assert l_perversity(top3, 1).infinite
    C = ic_sigma.global_complex(top3)
    g = ic_sigma.cohomology(top3, 1)
    out = ih_steenrod(ic_sigma, top3, 1, 1, g.representatives[0])
    assert out.perversity.infinite
    assert out.degree == 2
    assert len(out.coordinates) == ic_sigma.cohomology(Perversity.infinity(3), 2).dim
    assert C.dim(1) == len(g.representatives[0])


def test_ih_steenrod_is_representative_independent(ic_sigma):
    top3 = Perversity.top(3)
    C = ic_sigma.global_complex(top3)
    g = ic_sigma.cohomology(top3, 1)
    rep = g.representatives[0]
    shifted = vec_add(F2, rep, C.d(0).apply(tuple(1 for _ in range(C.dim(0)))))
    a = ih_steenrod(ic_sigma, top3, 1, 1, rep)
    b = ih_steenrod(ic_sigma, top3, 1, 1, shifted)
    assert a.perversity == b.perversity and a.coordinates == b.coordinates


def test_ih_steenrod_top_square_matches_theta(ic_sigma):
    top3 = Perversity.top(3)
    g = ic_sigma.cohomology(top3, 1)
    for rep in g.representatives:
        sq = ih_steenrod(ic_sigma, top3, 1, 1, rep)
        cup = theta(ic_sigma, 0, top3, 1, rep, top3, 1, rep)
        assert cup.perversity == oplus(top3, top3) == sq.perversity
        assert cup.coordinates == sq.coordinates


def test_theta_lands_at_the_perversity_sum(ic_sigma):
    zero3, top3 = Perversity.zero(3), Perversity.top(3)
    a = ic_sigma.cohomology(zero3, 2).representatives[0]
    b = ic_sigma.cohomology(top3, 1).representatives[0]
    out = theta(ic_sigma, 0, zero3, 2, a, top3, 1, b)
    assert out.perversity == oplus(zero3, top3) == top3
    assert out.degree == 3
    assert len(out.coordinates) == ic_sigma.cohomology(top3, 3).dim


def test_theta_square_commutes_with_transitions(ic_sigma):
    # theta(t, 1, -; t, 1, -) escapes to the untruncated level, where the
    # product of the two circle classes is the torus fundamental class.
    top3, inf3 = Perversity.top(3), Perversity.infinity(3)
    reps = ic_sigma.cohomology(top3, 1).representatives
    assert len(reps) == 2
    t = ic_sigma.transition(top3, inf3)
    hit = False
    for a in reps:
        for b in reps:
            low = theta(ic_sigma, 0, top3, 1, a, top3, 1, b)
            assert low.perversity == inf3
            high = theta(ic_sigma, 0, inf3, 1, t.apply(1, a), inf3, 1, t.apply(1, b))
            assert high.perversity == inf3
            assert low.coordinates == high.coordinates
            hit = hit or any(low.coordinates)
    assert hit
