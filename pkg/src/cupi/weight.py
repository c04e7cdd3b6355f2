"""Weight spectral sequences of cubical diagrams of triangulated pieces.

A descriptor is a cube of simplicial complexes with simplicial maps going
from deeper intersections down to the pieces they meet.  Each piece gets
its cochain complex with the trivial filtration; the diagonally filtered
normalization yields pages whose first page is the layerwise cohomology
with Cech differentials, abutting to the cohomology of the total space.
Over F2 the pages carry Steenrod operations through the normalization's
cup_i structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .exact import F2, Matrix, Q, RingError, Subspace, vec_add, zero_vector
from .filtration import FilteredComplex, SpectralSequence, spectral_sequence, trivial_filtration
from .codiagram import (
    CubicalCodiagram,
    Normalization,
    PageOperations,
    normalize_sigma,
    normalized_algebra,
    page_steenrod,
)
from .simplicial import SimplicialComplex, SimplicialMap
from .steenrod import simplicial_algebra


class RingMismatchError(RingError):
    pass


class IncompatibleDiagramsError(ValueError):
    pass


class MissingDualComplexError(ValueError):
    pass


def _complex_dimension(K: SimplicialComplex) -> int:
    return max(len(f) for f in K.facet_lists()) - 1


class HyperresolutionDescriptor:
    """Cube of simplicial complexes with maps from finer to coarser pieces.

    maps[(a, b)] for a inside b is the simplicial map carrying the piece
    at b into the piece at a; cochain pullback turns the cube into a
    codiagram.  Dimension growth along inclusions is reported as a
    warning, not an error.
    """

    def __init__(self, n: int, spaces: Mapping, maps: Mapping,
                 target_space: Optional[SimplicialComplex] = None):
        self.n = n
        self.spaces = {tuple(sorted(k)): v for k, v in spaces.items()}
        self.maps = {(tuple(sorted(a)), tuple(sorted(b))): f
                     for (a, b), f in maps.items()}
        self.target_space = target_space
        expected = set(self._subsets())
        if set(self.spaces) != expected:
            raise ValueError("spaces must cover exactly the nonempty subsets")
        for (a, b), f in self.maps.items():
            if not set(a) < set(b):
                raise ValueError(f"map key {a} -> {b} is not a strict inclusion")
            if f.source is not self.spaces[b] or f.target is not self.spaces[a]:
                raise ValueError(f"map for {a} -> {b} must carry spaces[{b}] into spaces[{a}]")
        for a in expected:
            for j in range(n + 1):
                if j in a:
                    continue
                b = tuple(sorted(a + (j,)))
                if (a, b) not in self.maps:
                    raise ValueError(f"missing map for the cover {a} -> {b}")

    def _subsets(self):
        from itertools import combinations

        out = []
        for size in range(1, self.n + 2):
            out.extend(combinations(range(self.n + 1), size))
        return out

    def dimension_warnings(self) -> tuple[str, ...]:
        notes = []
        for (a, b) in self.maps:
            da = _complex_dimension(self.spaces[a])
            db = _complex_dimension(self.spaces[b])
            if db > da:
                notes.append(f"piece {b} has dimension {db} > {da} of piece {a}")
        return tuple(notes)

    def layer(self, p: int) -> list[tuple]:
        """Pieces of cubical codimension p, i.e. |alpha| = p + 1."""
        return [a for a in self._subsets() if len(a) == p + 1]

    def diagram(self, ring: str) -> CubicalCodiagram:
        if ring not in (F2, Q):
            raise RingMismatchError(f"unsupported ring {ring!r}")
        objects = {}
        for a, K in self.spaces.items():
            objects[a] = simplicial_algebra(K) if ring == F2 else K.cochains(ring)
        arrows = {}
        for (a, b), f in self.maps.items():
            if len(b) != len(a) + 1:
                continue
            pb = f.pullback(ring)
            src = objects[a].complex if ring == F2 else objects[a]
            tgt = objects[b].complex if ring == F2 else objects[b]
            from .exact import ChainMap

            arrows[(a, b)] = ChainMap(src, tgt, pb.blocks)
        return CubicalCodiagram(self.n, objects, arrows)


@dataclass
class WeightPages:
    descriptor: HyperresolutionDescriptor
    ring: str
    normalization: Normalization
    filtered: FilteredComplex
    ss: SpectralSequence
    abutment: dict
    weight_graded: dict
    steenrod: dict = field(default_factory=dict)

    def e1_matches_layers(self) -> bool:
        """dim E_1^{p,q} against the cohomology of the codimension-p layer."""
        H = self.descriptor
        qs = set()
        for a in H.spaces:
            qs.update(H.spaces[a].cochains(self.ring).degrees())
        for p in range(0, H.n + 2):
            layer_betti: dict[int, int] = {}
            for a in H.layer(p):
                for q, d in H.spaces[a].cochains(self.ring).betti().items():
                    layer_betti[q] = layer_betti.get(q, 0) + d
            for q in sorted(qs | set(layer_betti)):
                if self.ss.entry(1, p, q).dim != layer_betti.get(q, 0):
                    return False
        return True


def weight_ss(descriptor: HyperresolutionDescriptor, ring: str,
              steenrod: Optional[Sequence[int]] = None) -> WeightPages:
    if ring not in (F2, Q):
        raise RingMismatchError(f"unsupported ring {ring!r}")
    if steenrod and ring != F2:
        raise RingMismatchError("page operations require F2")
    D = descriptor.diagram(ring)
    filts = {a: trivial_filtration(D.objects[a]) for a in D.subsets()}
    N, FN = normalize_sigma(D, filts)
    ss = spectral_sequence(FN)
    abutment = dict(N.total.betti())
    graded: dict[int, dict[int, int]] = {}
    for (p, q), dim in ss.e_infinity().items():
        graded.setdefault(p + q, {})[p] = dim
    ops = {}
    if steenrod:
        alg = normalized_algebra(N)
        for s in steenrod:
            ops[s] = page_steenrod(ss, alg, s, 2)
    return WeightPages(descriptor, ring, N, FN, ss, abutment, graded, ops)


def point_descriptor(K: SimplicialComplex) -> HyperresolutionDescriptor:
    return HyperresolutionDescriptor(0, {(0,): K}, {})


def square_descriptor(xt: SimplicialComplex, y: SimplicialComplex,
                      yt: SimplicialComplex, to_xt: SimplicialMap,
                      to_y: SimplicialMap) -> HyperresolutionDescriptor:
    """The square with pieces xt, y and double intersection yt."""
    if to_xt.source is not yt or to_xt.target is not xt:
        raise IncompatibleDiagramsError("to_xt must carry yt into xt")
    if to_y.source is not yt or to_y.target is not y:
        raise IncompatibleDiagramsError("to_y must carry yt into y")
    return HyperresolutionDescriptor(
        1, {(0,): xt, (1,): y, (0, 1): yt},
        {((0,), (0, 1)): to_xt, ((1,), (0, 1)): to_y})


@dataclass
class NodeCheck:
    q: int
    position: str
    ok: bool
    detail: str


@dataclass
class SquareReport:
    ring: str
    rows: tuple

    @property
    def holds(self) -> bool:
        return all(r.ok for r in self.rows)

    def failures(self) -> tuple:
        return tuple(r for r in self.rows if not r.ok)


def _class_matrix(C, q, vectors):
    """Columns: cohomology coordinates of the given degree-q cocycles."""
    group = C.cohomology(q)
    cols = [list(C.class_coordinates(q, v, group)) for v in vectors]
    return Matrix.from_columns(C.ring, cols, nrows=group.dim)


def acyclic_square_check(X: WeightPages, Xt: WeightPages, Y: WeightPages,
                         Yt: WeightPages,
                         to_xt: Optional[SimplicialMap] = None,
                         to_y: Optional[SimplicialMap] = None) -> SquareReport:
    """Exactness of E2(X) -> E2(Xt) + E2(Y) -> E2(Yt) -> E2(X) shifted.

    X must come from a square descriptor whose corner pieces match the
    three other page objects.  The connecting maps may be overridden to
    test deliberately wrong squares; by default the descriptor's own
    maps are used.
    """
    H = X.descriptor
    if H.n != 1:
        raise IncompatibleDiagramsError("the total space must be a square descriptor")
    ring = X.ring
    for pages, key in ((Xt, (0,)), (Y, (1,)), (Yt, (0, 1))):
        if pages.ring != ring:
            raise IncompatibleDiagramsError("rings of the four corners differ")
        if pages.descriptor.spaces[(0,)] is not H.spaces[key]:
            raise IncompatibleDiagramsError(f"corner {key} does not match the square")
    to_xt = to_xt if to_xt is not None else H.maps[((0,), (0, 1))]
    to_y = to_y if to_y is not None else H.maps[((1,), (0, 1))]

    CXt = H.spaces[(0,)].cochains(ring)
    CY = H.spaces[(1,)].cochains(ring)
    CYt = H.spaces[(0, 1)].cochains(ring)
    fXt = to_xt.pullback(ring)
    fY = to_y.pullback(ring)

    N = X.normalization
    ss = X.ss
    qs = sorted(set(CXt.degrees()) | set(CY.degrees()) | set(CYt.degrees()) | {0})
    rows = []
    for q in qs:
        hx, hy, hyt = CXt.cohomology(q), CY.cohomology(q), CYt.cohomology(q)
        e20 = ss.full_entry(2, 0, q)
        e21 = ss.full_entry(2, 1, q)

        # E2^{0,q} reps are cocycles of the normalization; split into pieces
        cols = []
        for x in e20.representatives:
            cx = N.component(q, x, (0,))
            cy = N.component(q, x, (1,))
            cx = cx if cx else tuple(zero_vector(ring, CXt.dim(q)))
            cy = cy if cy else tuple(zero_vector(ring, CY.dim(q)))
            cols.append(list(CXt.class_coordinates(q, cx, hx)) +
                        list(CY.class_coordinates(q, cy, hy)))
        inj = Matrix.from_columns(ring, cols, nrows=hx.dim + hy.dim)

        # middle map: pullback difference into the double intersection
        mxt = Matrix.from_columns(
            ring, [list(CYt.class_coordinates(
                q, fXt.block(q).apply(r), hyt)) for r in hx.representatives],
            nrows=hyt.dim)
        my = Matrix.from_columns(
            ring, [list(CYt.class_coordinates(
                q, fY.block(q).apply(r), hyt)) for r in hy.representatives],
            nrows=hyt.dim)
        mid = (Matrix.zero(ring, hyt.dim, hx.dim) - mxt).hstack(my)

        # connecting map: embed a double-intersection cocycle in column one
        cols = []
        for r in hyt.representatives:
            z = N.embed((0, 1), q, r)
            cols.append(list(e21.coordinates(z)))
        conn = Matrix.from_columns(ring, cols, nrows=e21.dim)

        pos = []
        pos.append(("left", inj.rank() == e20.dim,
                    f"E2(0,{q}) dim {e20.dim}, image rank {inj.rank()}"))
        ker_mid = Subspace.from_columns(mid.kernel())
        im_inj = Subspace.from_columns(inj)
        pos.append(("sum", ker_mid.dim == im_inj.dim and ker_mid.contains_space(im_inj),
                    f"ker dim {ker_mid.dim}, incoming image dim {im_inj.dim}"))
        ker_conn = Subspace.from_columns(conn.kernel())
        im_mid = Subspace.from_columns(mid)
        pos.append(("intersection", ker_conn.dim == im_mid.dim and ker_conn.contains_space(im_mid),
                    f"ker dim {ker_conn.dim}, incoming image dim {im_mid.dim}"))
        pos.append(("right", conn.rank() == e21.dim,
                    f"E2(1,{q}) dim {e21.dim}, image rank {conn.rank()}"))
        for name, ok, detail in pos:
            rows.append(NodeCheck(q, name, ok, detail))
    return SquareReport(ring, tuple(rows))


@dataclass
class DualRowReport:
    row: dict
    unreduced: dict
    reduced: dict
    matches_unreduced: bool
    matches_reduced: bool

    @property
    def convention(self) -> Optional[str]:
        if self.matches_unreduced and not self.matches_reduced:
            return "unreduced"
        if self.matches_reduced and not self.matches_unreduced:
            return "reduced"
        if self.matches_reduced and self.matches_unreduced:
            return "both"
        return None


def dual_complex_row(X: WeightPages, dual: Optional[SimplicialComplex]) -> DualRowReport:
    """E2^{*,0} against the cohomology of the suspended dual complex.

    Both the reduced and unreduced readings of the suspension row are
    reported; the caller learns which one the data matches.
    """
    if dual is None:
        raise MissingDualComplexError("the dual complex must be supplied")
    from .spaces import suspension

    SD = suspension(dual)
    betti = SD.cochains(X.ring).betti()
    pmax = X.descriptor.n + 1
    row = {p: X.ss.entry(2, p, 0).dim for p in range(0, pmax + 1)}
    unreduced = {p: betti.get(p, 0) for p in row}
    reduced = dict(unreduced)
    reduced[0] = max(reduced.get(0, 0) - 1, 0)
    return DualRowReport(
        row=row, unreduced=unreduced, reduced=reduced,
        matches_unreduced=row == unreduced,
        matches_reduced=row == reduced)
