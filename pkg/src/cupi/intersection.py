"""Stratified complexes and intersection cohomology on face posets.

The chain side filters simplicial chains by how deeply they may meet the
singular skeleta and takes homology of the allowable subcomplex.  The sheaf
side builds the same invariants as hypercohomology of a tower of open
pushforwards and stalkwise truncations over the face poset, one truncation
stage per codimension, with the untruncated tower kept alongside as the
ambient level.  Because every truncated stalk includes into its ambient
stalk, cup_i products and Steenrod squares of level classes can be evaluated
upstairs and solved back down to the level they land in.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .codiagram import (
    NotFunctorialError,
    PosetDiagram,
    PosetNormalization,
    RepresentativeMissingError,
    UnsupportedRingError,
    _block_entries,
    normalize_poset,
    normalized_poset_algebra,
)
from .exact import (
    ChainMap,
    CochainComplex,
    F2,
    Matrix,
    NotAComplexError,
    ShapeError,
    check_ring,
    identity_chain_map,
    induced_subcomplex,
    Subspace,
    vec_is_zero,
    zero_vector,
)
from .perversity import (
    InvalidPerversityError,
    Perversity,
    extended_perversities,
    l_perversity,
    oplus,
    truncate_inclusion,
)
from .simplicial import SimplicialComplex
from .steenrod import CupIAlgebra, ps


class BadStrataError(ValueError):
    """Stratification data violating the dimension or density rules."""


class NotOpenError(ValueError):
    """Pushforward target that is not an open (up-closed) subposet."""


class LandingError(ValueError):
    """A section that should come from a deeper level does not."""


# -- stratified complexes -----------------------------------------------------


class StratifiedComplex:
    """A triangulated space filtered by closed singular skeleta.

    faces are vertex-label tuples listed by dimension and then by vertex
    index, a linear extension of the face relation shared by every poset
    built from the space.  skeleton(m) is the face set of X_m for
    0 <= m <= n-2; open_faces(k) lists U_k = X - X_{n-k} for 2 <= k <= n+1,
    which is up-closed because skeleta are subcomplexes.
    """

    def __init__(self, complex: SimplicialComplex, skeleta: Mapping[int, frozenset],
                 strata_data: Mapping[int, tuple]):
        self.complex = complex
        self.n = complex.dim
        idx_faces = sorted(
            (s for k, fs in complex.simplices.items() for s in fs),
            key=lambda s: (len(s), s),
        )
        self._idx_faces = tuple(idx_faces)
        self.faces = tuple(
            tuple(complex.vertices[i] for i in s) for s in idx_faces
        )
        self._label_of = dict(zip(self._idx_faces, self.faces))
        self._skeleta = {m: frozenset(fs) for m, fs in skeleta.items()}
        self._strata_data = {c: tuple(g) for c, g in strata_data.items()}

    def skeleton(self, m: int) -> frozenset:
        """Faces of X_m, as label tuples; empty below the given strata."""
        got = self._skeleta.get(m)
        if got is not None:
            return frozenset(self._label_of[s] for s in got)
        return frozenset()

    def _skeleton_idx(self, m: int) -> frozenset:
        return self._skeleta.get(m, frozenset())

    def open_faces(self, k: int) -> tuple:
        """U_k = X - X_{n-k}, ordered compatibly with self.faces."""
        if not 2 <= k <= self.n + 1:
            raise ValueError(f"k={k} outside 2..{self.n + 1}")
        cut = self._skeleton_idx(self.n - k)
        return tuple(
            self._label_of[s] for s in self._idx_faces if s not in cut
        )


def stratify(K: SimplicialComplex, strata: Mapping[int, Iterable[Sequence]]) -> StratifiedComplex:
    """Validate singular strata, given as generator faces per codimension.

    Skeleta are filled downward: X_m is the subcomplex generated by every
    stratum of codimension c with n - c <= m, so nesting holds by
    construction.  Raises BadStrataError when a generator is unknown, a
    stratum is too large for its codimension, codimension one appears, the
    singular set is everything, or the regular part fails to be dense
    (every face must lie under a top-dimensional face outside X_{n-2}).
    """
    n = K.dim
    gens: dict[int, list[tuple]] = {}
    data: dict[int, list[tuple]] = {}
    for c, faces in strata.items():
        c = int(c)
        if c < 2 or c > n:
            raise BadStrataError(f"codimension {c} outside 2..{n}")
        for f in faces:
            labels = tuple(f)
            try:
                idx = tuple(sorted(K.index[v] for v in labels))
            except KeyError as missing:
                raise BadStrataError(f"unknown vertex {missing.args[0]!r}") from None
            if not K.has_simplex(idx):
                raise BadStrataError(f"{labels!r} is not a simplex")
            if len(idx) - 1 > n - c:
                raise BadStrataError(
                    f"{labels!r} has dimension {len(idx) - 1}, over the "
                    f"codimension-{c} cap {n - c}")
            gens.setdefault(c, []).append(idx)
            data.setdefault(c, []).append(labels)

    def closure(faces: Iterable[tuple]) -> frozenset:
        out = set()
        for s in faces:
            for k in range(1, len(s) + 1):
                out.update(_subtuples(s, k))
        return frozenset(out)

    skeleta = {}
    for m in range(0, max(n - 1, 0)):
        members = [g for c, gs in gens.items() if n - c <= m for g in gs]
        skeleta[m] = closure(members)

    sing = skeleta.get(n - 2, frozenset())
    all_faces = {s for fs in K.simplices.values() for s in fs}
    if sing and len(sing) >= len(all_faces):
        raise BadStrataError("the singular set is the whole space")
    tops = [set(s) for s in K.simplices.get(n, ()) if s not in sing]
    for s in all_faces:
        if not any(set(s) <= t for t in tops):
            raise BadStrataError(
                f"face {s!r} has no top-dimensional coface outside the "
                "singular set; the regular part is not dense")
    return StratifiedComplex(K, skeleta, data)


def _subtuples(s: tuple, k: int) -> list[tuple]:
    return list(combinations(s, k))


def stratified_to_data(X: StratifiedComplex) -> dict:
    """The JSON form: vertices, facets, and strata generators by codimension."""
    K = X.complex
    return {
        "vertices": list(K.vertices),
        "facets": [list(f) for f in K.facet_lists()],
        "strata": [
            {"codim": c, "facets": [list(g) for g in gs]}
            for c, gs in sorted(X._strata_data.items())
        ],
    }


def stratified_from_data(data: Mapping) -> StratifiedComplex:
    K = SimplicialComplex(tuple(data["vertices"]), [tuple(f) for f in data["facets"]])
    strata = {int(s["codim"]): [tuple(g) for g in s["facets"]] for s in data.get("strata", [])}
    return stratify(K, strata)


# -- sheaves on face posets ---------------------------------------------------


def _face_relations(faces: Sequence[tuple]) -> list[tuple]:
    sets = [set(f) for f in faces]
    out = []
    for i, a in enumerate(faces):
        for j, b in enumerate(faces):
            if len(a) < len(b) and sets[i] < sets[j]:
                out.append((a, b))
    return out


class PosetSheaf:
    """Complexes over a face poset with functorial restriction maps.

    faces must list every face before its cofaces.  Stalk values may be
    CochainComplex or CupIAlgebra; algebras are kept so normalizations can
    install the cut-formula products.  Restrictions are stored for all
    strict comparable pairs.
    """

    def __init__(self, faces: Sequence[tuple], stalks: Mapping, restrictions: Mapping,
                 ring: str, check: bool = False):
        check_ring(ring)
        self.ring = ring
        self.faces = tuple(faces)
        self._stalks = {}
        self._algebras = {}
        for f in self.faces:
            obj = stalks[f]
            if isinstance(obj, CupIAlgebra):
                self._stalks[f] = obj.complex
                self._algebras[f] = obj
            else:
                self._stalks[f] = obj
                self._algebras[f] = None
        self._restrictions = dict(restrictions)
        self._diagram: Optional[PosetDiagram] = None
        self._normalization: Optional[PosetNormalization] = None
        if check:
            self.validate()

    def stalk(self, face) -> CochainComplex:
        return self._stalks[face]

    def stalk_algebra(self, face) -> Optional[CupIAlgebra]:
        return self._algebras[face]

    def restriction(self, a, b) -> ChainMap:
        if a == b:
            return identity_chain_map(self._stalks[a])
        got = self._restrictions.get((a, b))
        if got is None:
            raise ShapeError(f"no restriction {a!r} -> {b!r}")
        return got

    def diagram(self) -> PosetDiagram:
        if self._diagram is None:
            objects = {
                f: (self._algebras[f] if self._algebras[f] is not None else self._stalks[f])
                for f in self.faces
            }
            self._diagram = PosetDiagram(
                self.faces, _face_relations(self.faces), objects,
                self._restrictions, check=False,
            )
        return self._diagram

    def normalization(self) -> PosetNormalization:
        if self._normalization is None:
            self._normalization = normalize_poset(self.diagram())
        return self._normalization

    def global_complex(self) -> CochainComplex:
        return self.normalization().total

    def hypercohomology(self) -> dict[int, int]:
        return self.global_complex().betti()

    def restrict(self, faces: Iterable[tuple]) -> "PosetSheaf":
        """The sheaf on a subposet, sharing stalks and restrictions."""
        wanted = set(faces)
        sub = tuple(f for f in self.faces if f in wanted)
        stalks = {
            f: (self._algebras[f] if self._algebras[f] is not None else self._stalks[f])
            for f in sub
        }
        rest = {
            (a, b): m for (a, b), m in self._restrictions.items()
            if a in wanted and b in wanted
        }
        return PosetSheaf(sub, stalks, rest, self.ring)

    def validate(self) -> None:
        """Check chain-map and functoriality conditions; raises NotFunctorial."""
        for (a, b), m in self._restrictions.items():
            try:
                m.validate()
            except NotAComplexError as err:
                raise NotFunctorialError(
                    f"restriction {a!r} -> {b!r} is not a chain map") from err
        self.diagram().validate()


def hypercohomology(F: PosetSheaf) -> dict[int, int]:
    """Graded dimensions of the derived global sections of F."""
    return F.hypercohomology()


def _point_algebra() -> CupIAlgebra:
    pt = CochainComplex(F2, {0: 1}, {})

    def op(i, a_deg, a, b_deg, b):
        if a_deg == b_deg == i == 0:
            return ((int(a[0]) * int(b[0])) % 2,)
        return zero_vector(F2, pt.dim(a_deg + b_deg - i))

    return CupIAlgebra(pt, op, name="point")


def _ordered_faces(source) -> tuple:
    if isinstance(source, StratifiedComplex):
        return source.faces
    if isinstance(source, SimplicialComplex):
        idx = sorted(
            (s for fs in source.simplices.values() for s in fs),
            key=lambda s: (len(s), s),
        )
        return tuple(tuple(source.vertices[i] for i in s) for s in idx)
    # bare face lists are reordered by dimension only, keeping their order
    return tuple(sorted((tuple(f) for f in source), key=len))


def constant_sheaf(source, ring: str) -> PosetSheaf:
    """The constant one-point sheaf on the face poset of source.

    source may be a StratifiedComplex, a SimplicialComplex, or an iterable
    of faces as vertex-label tuples.  Over F2 the stalks carry the product
    of the ground field, so downstream normalizations are cup_i algebras.
    """
    check_ring(ring)
    faces = _ordered_faces(source)
    if ring == F2:
        obj = _point_algebra()
        pt = obj.complex
    else:
        obj = pt = CochainComplex(ring, {0: 1}, {})
    one = Matrix.identity(ring, 1)
    arrows = {
        (a, b): ChainMap(pt, pt, {0: one}, check=False)
        for (a, b) in _face_relations(faces)
    }
    return PosetSheaf(faces, {f: obj for f in faces}, arrows, ring)


# -- pushforward along open subposets -----------------------------------------


def poset_normalization_map(NA: PosetNormalization, NB: PosetNormalization,
                            maps: Mapping, check: bool = False) -> ChainMap:
    """A map of poset normalizations assembled from stalk maps.

    maps[x] must be a chain map between the two diagrams' stalks at x; the
    slot over a chain receives the map at the chain's top.  Both diagrams
    must share their chain sets.  With check on, the squares against all
    comparable pairs are verified first.
    """
    if check:
        DA, DB = NA.diagram, NB.diagram
        for y in DA.elements:
            for x in DA.elements:
                if DA.less(x, y):
                    left = maps[y].compose(DA.arrow(x, y))
                    right = DB.arrow(x, y).compose(maps[x])
                    for n in set(left.blocks) | set(right.blocks):
                        if left.block(n) != right.block(n):
                            raise NotFunctorialError(
                                f"stalk maps do not commute with {x!r} -> {y!r}")
    ring = NA.ring
    blocks = {}
    for n in sorted(set(NA.dims) | set(NB.dims)):
        tgt = NB.dims.get(n, 0)
        entries: list = []
        for key, off, d in NA._slices.get(n, []):
            fb = maps[key[-1]].block(n - (len(key) - 1))
            got = NB.offset(n, key)
            if got is None:
                if not fb.is_zero():
                    raise ShapeError(f"target has no slot for chain {key!r}")
                continue
            _block_entries(entries, fb, got[0], off)
        blocks[n] = Matrix.from_entries(ring, tgt, NA.dims.get(n, 0), entries)
    return ChainMap(NA.total, NB.total, blocks, check=False)


class PushforwardSheaf(PosetSheaf):
    """Derived direct image of a sheaf along an open subposet inclusion.

    Stalks are normalizations over the intersection of the source with each
    open star; restrictions project away the chains that leave the smaller
    star.  When the open set is everything the sheaf is returned unchanged
    and identity is set.
    """

    def __init__(self, faces, stalks, restrictions, ring, source,
                 star_normalizations, identity):
        super().__init__(faces, stalks, restrictions, ring)
        self.source = source
        self.star_normalizations = star_normalizations
        self.identity = identity

    def counit(self, face) -> ChainMap:
        """Evaluation at the singleton chain; a quasi-isomorphism on U."""
        if self.identity:
            return identity_chain_map(self.stalk(face))
        N = self.star_normalizations[face]
        stalk = self.source.stalk(face)
        blocks = {}
        for k in stalk.degrees():
            got = N.offset(k, (face,))
            if got is None:
                continue
            off, d = got
            entries = [(i, off + i, 1) for i in range(d)]
            blocks[k] = Matrix.from_entries(self.ring, d, N.dims.get(k, 0), entries)
        return ChainMap(N.total, stalk, blocks, check=False)


def pushforward_open(sheaf: PosetSheaf, faces: Sequence[tuple]) -> PushforwardSheaf:
    """Push a sheaf on an open subposet forward to a larger face poset."""
    faces = tuple(faces)
    src = set(sheaf.faces)
    amb = set(faces)
    if not src <= amb:
        raise NotOpenError("the source poset does not sit inside the target")
    face_sets = {f: set(f) for f in faces}
    for f in sheaf.faces:
        for g in faces:
            if face_sets[f] < face_sets[g] and g not in src:
                raise NotOpenError(
                    f"{f!r} is in the open set but its coface {g!r} is not")
    if src == amb:
        stalks = {
            f: (sheaf.stalk_algebra(f) or sheaf.stalk(f)) for f in faces
        }
        rest = {pair: sheaf._restrictions[pair] for pair in _face_relations(faces)}
        return PushforwardSheaf(faces, stalks, rest, sheaf.ring, sheaf, None, True)

    ring = sheaf.ring
    stars: dict[tuple, tuple] = {}
    norms: dict[tuple, PosetNormalization] = {}
    stalks = {}
    for f in faces:
        star = tuple(g for g in sheaf.faces if face_sets[f] <= set(g))
        stars[f] = star
        N = normalize_poset(sheaf.restrict(star).diagram())
        norms[f] = N
        if ring == F2 and all(sheaf.stalk_algebra(g) is not None for g in star):
            stalks[f] = normalized_poset_algebra(N, check_nice=False)
        else:
            stalks[f] = N.total

    rest = {}
    for (a, b) in _face_relations(faces):
        Na, Nb = norms[a], norms[b]
        blocks = {}
        for n in Nb.dims:
            entries: list = []
            for key, off, d in Nb._slices[n]:
                got = Na.offset(n, key)
                if got is None:
                    raise ShapeError(f"chain {key!r} missing from the larger star")
                src_off = got[0]
                entries.extend((off + i, src_off + i, 1) for i in range(d))
            blocks[n] = Matrix.from_entries(ring, Nb.dims[n], Na.dims.get(n, 0), entries)
        rest[(a, b)] = ChainMap(Na.total, Nb.total, blocks, check=False)
    return PushforwardSheaf(faces, stalks, rest, ring, sheaf, norms, False)


def attachment_unit(sheaf: PosetSheaf, open_faces: Sequence[tuple], face) -> tuple:
    """The unit from a stalk into sections of the punctured star.

    Returns the normalization of the sheaf over (star of face) - (face)
    intersected with the open set, and the chain map whose components at
    singleton chains are the sheaf restrictions.  The insertion signs cancel
    in pairs against functoriality, so this commutes with d over any ring.
    """
    wanted = set(open_faces)
    fs = set(face)
    star = tuple(g for g in sheaf.faces if g in wanted and fs < set(g))
    N = normalize_poset(sheaf.restrict(star).diagram())
    stalk = sheaf.stalk(face)
    blocks = {}
    for n in stalk.degrees():
        tgt = N.dims.get(n, 0)
        entries: list = []
        for g in star:
            got = N.offset(n, (g,))
            if got is None:
                continue
            _block_entries(entries, sheaf.restriction(face, g).block(n), got[0], 0)
        blocks[n] = Matrix.from_entries(sheaf.ring, tgt, stalk.dim(n), entries)
    return N, ChainMap(stalk, N.total, blocks, check=False)


# -- the truncation tower -----------------------------------------------------


def _truncate_level(sheaf: PosetSheaf, cutoff: int) -> tuple[PosetSheaf, dict]:
    """Stalkwise truncation of a sheaf, with the inclusions back into it.

    Arrows of the truncated sheaf are solved through the stalk inclusions;
    the solutions exist because truncation keeps d-closed subspaces, and
    are unique because the inclusions have full column rank, which is what
    makes the result functorial.
    """
    stalks = {}
    incls = {}
    for f in sheaf.faces:
        sub, inc = truncate_inclusion(sheaf.stalk(f), cutoff)
        stalks[f] = sub
        incls[f] = inc
    rest = {}
    for (a, b) in _face_relations(sheaf.faces):
        r = sheaf.restriction(a, b)
        blocks = {}
        for n in stalks[a].degrees():
            rhs = r.block(n) @ incls[a].block(n)
            sol = incls[b].block(n).solve_matrix(rhs)
            if sol is None:
                raise NotFunctorialError(
                    f"truncated restriction {a!r} -> {b!r} does not exist")
            blocks[n] = sol
        rest[(a, b)] = ChainMap(stalks[a], stalks[b], blocks, check=False)
    return PosetSheaf(sheaf.faces, stalks, rest, sheaf.ring), incls


class PerversePosetSheaf:
    """The perversity-indexed family of truncated towers over one space.

    levels holds a sheaf on the full face poset per finite perversity, with
    the never-truncated tower at infinity as the ambient; stalk inclusions
    into the ambient are kept so sections can be compared across levels.
    """

    def __init__(self, space: StratifiedComplex, ring: str, levels: Mapping,
                 stalk_inclusions: Mapping, cutoffs: Mapping):
        self.space = space
        self.ring = ring
        self.perversities = extended_perversities(space.n)
        self._levels = dict(levels)
        self._stalk_incl = dict(stalk_inclusions)
        self.cutoffs = dict(cutoffs)
        self._norms: dict = {}
        self._groups: dict = {}
        self._inclusions: dict = {}
        self._transitions: dict = {}
        self._algebra: Optional[CupIAlgebra] = None

    def sheaf(self, p: Perversity) -> PosetSheaf:
        got = self._levels.get(p)
        if got is None:
            raise InvalidPerversityError(f"no level at {p!r}")
        return got

    def stalk(self, p: Perversity, face) -> CochainComplex:
        return self.sheaf(p).stalk(face)

    def stalk_inclusion(self, p: Perversity, face) -> ChainMap:
        if p.infinite:
            return identity_chain_map(self.stalk(p, face))
        return self._stalk_incl[p][face]

    def normalization(self, p: Perversity) -> PosetNormalization:
        if p not in self._norms:
            self._norms[p] = self.sheaf(p).normalization()
        return self._norms[p]

    def global_complex(self, p: Perversity) -> CochainComplex:
        return self.normalization(p).total

    def hypercohomology(self, p: Perversity) -> dict[int, int]:
        return self.global_complex(p).betti()

    def cohomology(self, p: Perversity, n: int):
        key = (p, n)
        if key not in self._groups:
            self._groups[key] = self.global_complex(p).cohomology(n)
        return self._groups[key]

    def inclusion(self, p: Perversity) -> ChainMap:
        """The global inclusion of a level into the ambient tower."""
        if p.infinite:
            return identity_chain_map(self.global_complex(p))
        if p not in self._inclusions:
            inf = Perversity.infinity(self.space.n)
            self._inclusions[p] = poset_normalization_map(
                self.normalization(p), self.normalization(inf), self._stalk_incl[p])
        return self._inclusions[p]

    def transition(self, p: Perversity, q: Perversity) -> ChainMap:
        """The comparison map between levels, for p <= q."""
        if not p <= q:
            raise InvalidPerversityError(f"{p!r} does not precede {q!r}")
        if p == q:
            return identity_chain_map(self.global_complex(p))
        if q.infinite:
            return self.inclusion(p)
        key = (p, q)
        if key not in self._transitions:
            maps = {}
            for f in self.space.faces:
                ip = self._stalk_incl[p][f]
                iq = self._stalk_incl[q][f]
                blocks = {}
                for n in ip.source.degrees():
                    sol = iq.block(n).solve_matrix(ip.block(n))
                    if sol is None:
                        raise NotFunctorialError(
                            f"level {p!r} does not include into {q!r} at {f!r}")
                    blocks[n] = sol
                maps[f] = ChainMap(ip.source, iq.source, blocks, check=False)
            self._transitions[key] = poset_normalization_map(
                self.normalization(p), self.normalization(q), maps)
        return self._transitions[key]

    def algebra(self) -> CupIAlgebra:
        """Cup_i products on the ambient global sections; F2 only."""
        if self.ring != F2:
            raise UnsupportedRingError("cup_i on towers requires F2")
        if self._algebra is None:
            inf = Perversity.infinity(self.space.n)
            # stalk niceness is exercised by the evaluator closure tests;
            # re-sampling it per stalk here would dominate construction
            self._algebra = normalized_poset_algebra(
                self.normalization(inf), check_nice=False)
        return self._algebra


def deligne_ic(X: StratifiedComplex, ring: str = F2,
               cutoffs: Optional[Mapping] = None) -> PerversePosetSheaf:
    """The truncation tower of the constant sheaf over a stratified space.

    Starting from the constant sheaf on the regular part, each stage k
    pushes forward from U_k to U_{k+1} and truncates stalkwise at that
    perversity's value: cutoff sequences may be overridden per perversity
    through cutoffs ((p(2), ..., p(n))-shaped; None disables truncation
    entirely), which is how the axiom checker's mutants are built.  The
    level at infinity is the same tower with no truncation at all.
    """
    check_ring(ring)
    n = X.n
    finite = extended_perversities(n)[:-1]
    plan = {}
    missing = object()
    for p in finite:
        seq = missing if cutoffs is None else cutoffs.get(p, missing)
        if seq is missing:
            plan[p] = tuple(p.value(k) for k in range(2, n + 1))
        elif seq is None:
            plan[p] = None
        else:
            seq = tuple(int(v) for v in seq)
            if len(seq) != max(n - 1, 0):
                raise InvalidPerversityError(
                    f"cutoff override needs {max(n - 1, 0)} stages, got {len(seq)}")
            plan[p] = seq

    base = constant_sheaf(X.open_faces(2), ring)
    ambient: PosetSheaf = base
    levels: dict[Perversity, PosetSheaf] = {p: base for p in finite}
    incls: dict[Perversity, dict] = {
        p: {f: identity_chain_map(base.stalk(f)) for f in base.faces} for p in finite
    }

    for k in range(2, n + 1):
        big = X.open_faces(k + 1)
        new_ambient = pushforward_open(ambient, big)
        for p in finite:
            pushed = pushforward_open(levels[p], big)
            if pushed.identity:
                lifted = incls[p]
            else:
                lifted = {}
                for f in big:
                    star = pushed.star_normalizations[f]
                    target = new_ambient.star_normalizations[f]
                    lifted[f] = poset_normalization_map(
                        star, target, {g: incls[p][g] for g in pushed.source.faces
                                       if set(f) <= set(g)})
            cutoff = plan[p][k - 2] if plan[p] is not None else None
            if cutoff is None:
                levels[p] = pushed
                incls[p] = lifted
            else:
                truncated, t_incl = _truncate_level(pushed, cutoff)
                levels[p] = truncated
                incls[p] = {f: lifted[f].compose(t_incl[f]) for f in big}
        ambient = new_ambient

    inf = Perversity.infinity(n)
    levels_all = dict(levels)
    levels_all[inf] = ambient
    return PerversePosetSheaf(X, ring, levels_all, incls, plan)


# -- axiom checker --------------------------------------------------------------


def _invertible(m: Matrix) -> bool:
    return m.nrows == m.ncols and len(m.rref()[1]) == m.nrows


def check_axioms(A: PerversePosetSheaf) -> dict:
    """Per-perversity report on the four sheaf conditions.

    normalization: on the regular part the stalks are one point in degree
    zero and restrictions induce isomorphisms on H^0.  bounded_below: no
    stalk lives in negative degrees.  stalk_vanishing: over U_{k+1} the
    stalk cohomology vanishes above p(k).  attaching: the unit into the
    sections over the punctured star is an isomorphism on H^i for
    i <= p(k), checked over U_{k+1} - U_k and vacuous when that is empty.
    The level at infinity has no truncation bounds and is skipped.
    """
    X = A.space
    n = X.n
    U = {k: X.open_faces(k) for k in range(2, n + 2)}
    report = {"ok": True, "ring": A.ring, "levels": [], "notes": []}
    for p in A.perversities:
        if p.infinite:
            report["levels"].append({
                "perversity": "inf",
                "skipped": True,
                "note": "truncation bounds do not constrain the ambient level",
            })
            report["notes"].append("level inf skipped: no truncation applies")
            continue
        sheaf = A.sheaf(p)
        betti = {f: sheaf.stalk(f).betti() for f in X.faces}

        norm_wit = [
            {"face": f, "betti": betti[f]} for f in U[2] if betti[f] != {0: 1}
        ]
        if not norm_wit:
            groups = {f: sheaf.stalk(f).cohomology(0) for f in U[2]}
            for (a, b) in _face_relations(U[2]):
                if len(b) != len(a) + 1:
                    continue
                img = sheaf.restriction(a, b).apply(0, groups[a].representatives[0])
                coords = sheaf.stalk(b).class_coordinates(0, img, groups[b])
                if not any(coords):
                    norm_wit.append({"face": a, "cover": b})
        ax0 = {"ok": not norm_wit, "witnesses": norm_wit}

        neg = [f for f in X.faces if any(d < 0 for d in sheaf.stalk(f).degrees())]
        ax1 = {"ok": not neg, "witnesses": [{"face": f} for f in neg]}

        vanish_wit = []
        for k in range(2, n + 1):
            bound = p.value(k)
            for f in U[k + 1]:
                for i, r in betti[f].items():
                    if i > bound:
                        vanish_wit.append({
                            "face": f, "codim": k, "degree": i,
                            "rank": r, "bound": bound,
                        })
        ax2 = {"ok": not vanish_wit, "witnesses": vanish_wit}

        attach_wit = []
        vacuous = []
        for k in range(2, n + 1):
            small = set(U[k])
            fresh = [f for f in U[k + 1] if f not in small]
            if not fresh:
                vacuous.append(k)
                continue
            for f in fresh:
                _, unit = attachment_unit(sheaf, U[k], f)
                for i in range(0, p.value(k) + 1):
                    if not _invertible(unit.induced_on_cohomology(i)):
                        attach_wit.append({"face": f, "codim": k, "degree": i})
        ax3 = {"ok": not attach_wit, "witnesses": attach_wit, "vacuous": vacuous}
        if vacuous:
            report["notes"].append(
                f"level {p.to_json()}: attaching vacuous at codimensions {vacuous}")

        ok = all(ax["ok"] for ax in (ax0, ax1, ax2, ax3))
        report["levels"].append({
            "perversity": p.to_json(),
            "ok": ok,
            "axioms": {
                "normalization": ax0,
                "bounded_below": ax1,
                "stalk_vanishing": ax2,
                "attaching": ax3,
            },
        })
        report["ok"] = report["ok"] and ok
    return report


# -- chain-level intersection homology -------------------------------------------


def intersection_homology(X: StratifiedComplex, p: Perversity,
                          ring: str = F2) -> dict[int, int]:
    """Graded dimensions of the allowable-chain homology.

    A simplex may meet the codimension-k skeleton in dimension at most
    i - k + p(k); chains spanned by such simplices whose boundaries are
    again such span the allowable subcomplex, realized here as an induced
    subcomplex of the simplicial chains placed in nonpositive degrees.
    The infinite perversity waives all bounds at the price of the singular
    set itself, returning the cohomology of the regular part.
    """
    check_ring(ring)
    if p.n != X.n:
        raise InvalidPerversityError(
            f"perversity is for ambient dimension {p.n}, the space has {X.n}")
    n = X.n
    if p.infinite:
        b = constant_sheaf(X.open_faces(2), ring).hypercohomology()
        return {k: b.get(k, 0) for k in range(n + 1)}

    K = X.complex
    skeleta = {k: X._skeleton_idx(n - k) for k in range(2, n + 1)}

    def allowed(s: tuple, i: int) -> bool:
        for k, sk in skeleta.items():
            if not sk:
                continue
            deep = -1
            for m in range(len(s), 0, -1):
                if any(t in sk for t in _subtuples(s, m)):
                    deep = m - 1
                    break
            if deep >= 0 and deep > i - k + p.value(k):
                return False
        return True

    dims = {}
    diffs = {}
    spaces = {}
    for i in range(0, n + 1):
        simps = K.simplices.get(i, ())
        dims[-i] = len(simps)
        if i >= 1:
            diffs[-i] = K.boundary_matrix(ring, i)
    C = CochainComplex(ring, dims, diffs)
    allowed_cols = {
        i: [j for j, s in enumerate(K.simplices.get(i, ())) if allowed(s, i)]
        for i in range(0, n + 1)
    }
    for i in range(0, n + 1):
        cols = allowed_cols[i]
        if i == 0:
            basis = [tuple(1 if t == j else 0 for t in range(dims[0]))
                     for j in cols]
            spaces[0] = Subspace.span(ring, dims[0], basis)
            continue
        # boundary rows at disallowed simplices must vanish
        good = set(allowed_cols[i - 1])
        bad_rows = [r for r in range(dims[-(i - 1)]) if r not in good]
        D = C.d(-i)
        entries = []
        for bi, r in enumerate(bad_rows):
            for cj, c in enumerate(cols):
                x = D.entry(r, c)
                if x:
                    entries.append((bi, cj, x))
        constrained = Matrix.from_entries(ring, len(bad_rows), len(cols), entries)
        ker = constrained.kernel()
        emb = []
        for t in range(ker.ncols):
            col = list(zero_vector(ring, dims[-i]))
            kv = ker.column(t)
            for cj, c in enumerate(cols):
                col[c] = kv[cj]
            emb.append(tuple(col))
        spaces[-i] = Subspace.span(ring, dims[-i], emb)
    sub, _ = induced_subcomplex(C, spaces)
    b = sub.betti()
    return {i: b.get(-i, 0) for i in range(n + 1)}


# -- Steenrod squares between levels ---------------------------------------------


@dataclass(frozen=True)
class LandedClass:
    """A cohomology class at the level an operation lands in.

    coordinates are in the canonical basis of the level's cohomology and
    are None when the landed section is not a cocycle (chain-level
    homotopies for cup_i with i > 0); vector is the landed cochain, in
    ambient coordinates when the level is infinite.
    """

    perversity: Perversity
    degree: int
    coordinates: Optional[tuple]
    vector: tuple


def _land(A: PerversePosetSheaf, L: Perversity, degree: int, section) -> LandedClass:
    inf = Perversity.infinity(A.space.n)
    if L.infinite:
        C = A.global_complex(inf)
        coords = None
        if vec_is_zero(C.d(degree).apply(section)):
            coords = C.class_coordinates(degree, section, A.cohomology(inf, degree))
        return LandedClass(L, degree, coords, tuple(section))
    CL = A.global_complex(L)
    Camb = A.global_complex(inf)
    incl = A.inclusion(L).block(degree)
    # solve through the inclusion up to an ambient coboundary
    M = incl.hstack(Camb.d(degree - 1))
    sol = M.solve(section)
    if sol is None:
        raise LandingError(
            f"the section does not come from level {L.to_json()} in degree {degree}")
    z = tuple(sol[: CL.dim(degree)])
    coords = None
    if vec_is_zero(CL.d(degree).apply(z)):
        coords = CL.class_coordinates(degree, z, A.cohomology(L, degree))
    return LandedClass(L, degree, coords, z)


def _require_cocycle(A: PerversePosetSheaf, p: Perversity, degree: int, vec) -> None:
    C = A.global_complex(p)
    if len(vec) != C.dim(degree):
        raise ShapeError(f"expected a degree-{degree} vector of length {C.dim(degree)}")
    if not vec_is_zero(C.d(degree).apply(vec)):
        raise RepresentativeMissingError("the class needs a cocycle representative")


def ih_steenrod(A: PerversePosetSheaf, p: Perversity, s: int, degree: int,
                cocycle: Sequence) -> LandedClass:
    """Sq^s on a level class, landed at the level the square descends to.

    The square is evaluated on the ambient tower through the level
    inclusion and solved back down to min(2p, p+s) smoothed into the
    perversity poset, or kept ambient when that escapes to infinity.
    """
    if A.ring != F2:
        raise UnsupportedRingError("Steenrod squares require F2 coefficients")
    _require_cocycle(A, p, degree, cocycle)
    x = cocycle if p.infinite else A.inclusion(p).apply(degree, cocycle)
    eta = ps(A.algebra(), s, degree, x)
    L = p if p.infinite else l_perversity(p, s)
    return _land(A, L, degree + s, eta)


def ih_steenrod_matrix(A: PerversePosetSheaf, p: Perversity, s: int,
                       degree: int) -> tuple[Perversity, Matrix]:
    """The matrix of Sq^s between level cohomologies, in canonical bases."""
    if A.ring != F2:
        raise UnsupportedRingError("Steenrod squares require F2 coefficients")
    g = A.cohomology(p, degree)
    cols = []
    target = p if p.infinite else l_perversity(p, s)
    tdim = A.cohomology(target, degree + s).dim
    for rep in g.representatives:
        landed = ih_steenrod(A, p, s, degree, rep)
        if landed.coordinates is None:
            raise LandingError("the square of a cocycle must be a cocycle")
        cols.append(list(landed.coordinates))
    return target, Matrix.from_columns(F2, cols, nrows=tdim)


def theta(A: PerversePosetSheaf, i: int, p: Perversity, a_deg: int, a: Sequence,
          q: Perversity, b_deg: int, b: Sequence) -> LandedClass:
    """cup_i of level sections, landed at the perversity sum of the levels."""
    if A.ring != F2:
        raise UnsupportedRingError("cup_i on towers requires F2")
    _require_cocycle(A, p, a_deg, a)
    _require_cocycle(A, q, b_deg, b)
    xa = a if p.infinite else A.inclusion(p).apply(a_deg, a)
    xb = b if q.infinite else A.inclusion(q).apply(b_deg, b)
    w = A.algebra().cup(i, a_deg, xa, b_deg, xb)
    return _land(A, oplus(p, q), a_deg + b_deg - i, w)


def stalk_cup(A: PerversePosetSheaf, p: Perversity, face, i: int,
              a_deg: int, a: Sequence, b_deg: int, b: Sequence) -> tuple[tuple, bool]:
    """cup_i of level stalk elements, pulled back through the inclusion.

    The product is taken in the ambient stalk algebra.  When it lies in the
    truncated stalk on the nose the exact flag is True; top-degree products
    of cocycles always do.  Otherwise the result is projected along a fixed
    complement of the inclusion and flagged.
    """
    if A.ring != F2:
        raise UnsupportedRingError("cup_i on towers requires F2")
    inf = Perversity.infinity(A.space.n)
    alg = A.sheaf(inf).stalk_algebra(face)
    if alg is None:
        raise UnsupportedRingError("the ambient stalk carries no cup_i structure")
    inc = A.stalk_inclusion(p, face)
    xa = inc.apply(a_deg, a)
    xb = inc.apply(b_deg, b)
    w = alg.cup(i, a_deg, xa, b_deg, xb)
    degree = a_deg + b_deg - i
    M = inc.block(degree)
    sol = M.solve(w)
    if sol is not None:
        return tuple(sol), True
    # complete the column space with unit vectors and drop the overflow
    amb = M.nrows
    aug = M.hstack(Matrix.identity(A.ring, amb))
    piv = aug.rref()[1]
    extra = [j - M.ncols for j in piv if j >= M.ncols]
    cols = [list(M.column(j)) for j in range(M.ncols)]
    cols += [[1 if r == e else 0 for r in range(amb)] for e in extra]
    full = Matrix.from_columns(A.ring, cols, nrows=amb)
    sol = full.solve(w)
    if sol is None:
        raise LandingError("projection basis failed to span the stalk")
    return tuple(sol[: M.ncols]), False
