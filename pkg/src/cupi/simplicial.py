"""Finite simplicial complexes, their exact cochains, and cup_i products.

A complex carries an explicit global vertex order (the order of its
`vertices` tuple); simplices are stored as ascending tuples of vertex
indices.  Boundaries are signed over Q and unsigned over F2, and the
cochain differential is the transpose of the boundary.

cup is the front/back face product (no extra sign over Q: the signs of
the convention live in the differential).  cup_i for i >= 1 is the
interval-cut formula over F2: all ways of cutting a simplex into i+2
overlapping intervals, the first factor evaluated on the join of the
even-numbered intervals, the second on the odd ones, degenerate joins
dropped.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .exact import (
    F2, Q, ChainMap, CochainComplex, Matrix, RingError, ShapeError,
    check_ring, zero_vector,
)


class SimplicialError(ValueError):
    """Malformed complex or map."""


class SimplicialComplex:

    def __init__(self, vertices: Sequence, facets: Iterable[Sequence]):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise SimplicialError("duplicate vertices")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        seen: set[tuple[int, ...]] = set()
        for facet in facets:
            try:
                idx = tuple(sorted(self.index[v] for v in facet))
            except KeyError as missing:
                raise SimplicialError(f"facet vertex {missing.args[0]!r} not in vertex list")
            if len(set(idx)) != len(idx):
                raise SimplicialError(f"facet {tuple(facet)!r} repeats a vertex")
            for k in range(1, len(idx) + 1):
                seen.update(combinations(idx, k))
        by_dim: dict[int, list] = {}
        for s in seen:
            by_dim.setdefault(len(s) - 1, []).append(s)
        self.simplices = {k: tuple(sorted(v)) for k, v in by_dim.items()}
        self.simplex_index = {k: {s: i for i, s in enumerate(v)} for k, v in self.simplices.items()}
        self._cochains: dict[str, CochainComplex] = {}

    @property
    def dim(self) -> int:
        return max(self.simplices) if self.simplices else -1

    def n_simplices(self, k: int) -> tuple:
        return self.simplices.get(k, ())

    def simplex_labels(self, k: int) -> tuple:
        return tuple(tuple(self.vertices[i] for i in s) for s in self.n_simplices(k))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(v) for k, v in self.simplices.items())

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.n_simplices(k)) for k in range(self.dim + 1))

    def has_simplex(self, s: Sequence[int]) -> bool:
        s = tuple(sorted(s))
        return s in self.simplex_index.get(len(s) - 1, {})

    def facet_lists(self) -> list[list]:
        """Maximal simplices, as vertex labels (for serialization)."""
        all_faces = {s for v in self.simplices.values() for s in v}
        facets = []
        for s in sorted(all_faces, key=lambda t: (len(t), t)):
            if not any(len(t) > len(s) and set(s) < set(t) for t in all_faces):
                facets.append([self.vertices[i] for i in s])
        return facets

    # -- chains and cochains ---------------------------------------------

    def boundary_matrix(self, ring: str, k: int) -> Matrix:
        """Matrix of the boundary C_k -> C_{k-1}, signed over Q."""
        check_ring(ring)
        rows_idx = self.simplex_index.get(k - 1, {})
        cols = self.n_simplices(k)
        entries = [[0] * len(cols) for _ in rows_idx]
        for j, s in enumerate(cols):
            for t in range(len(s)):
                face = s[:t] + s[t + 1:]
                i = rows_idx[face]
                entries[i][j] = 1 if (ring == F2 or t % 2 == 0) else -1
        return Matrix.from_rows(ring, entries, ncols=len(cols))

    def cochains(self, ring: str) -> CochainComplex:
        """Simplicial cochain complex; differential = boundary transpose."""
        check_ring(ring)
        if ring not in self._cochains:
            dims = {k: len(v) for k, v in self.simplices.items()}
            diffs = {k: self.boundary_matrix(ring, k + 1).transpose() for k in dims if k + 1 in dims}
            labels = {k: self.simplex_labels(k) for k in dims}
            self._cochains[ring] = CochainComplex(ring, dims, diffs, labels=labels)
        return self._cochains[ring]

    def cochain_vector(self, ring: str, k: int, values: Mapping[Sequence, object]) -> tuple:
        """Vector in C^k from a map {simplex (vertex labels) -> coefficient}."""
        idx = self.simplex_index.get(k, {})
        vec = list(zero_vector(ring, len(self.n_simplices(k))))
        for simplex, coeff in values.items():
            try:
                s = tuple(sorted(self.index[v] for v in simplex))
            except KeyError as missing:
                raise SimplicialError(f"vertex {missing.args[0]!r} not in complex")
            if s not in idx:
                raise SimplicialError(f"{tuple(simplex)!r} is not a {k}-simplex of the complex")
            if ring == F2:
                vec[idx[s]] = (vec[idx[s]] + int(coeff)) & 1
            else:
                vec[idx[s]] = vec[idx[s]] + Fraction(coeff)
        return tuple(vec)


def standard_chains(n: int, ring: str = Q) -> CochainComplex:
    """Chains of the n-simplex as a complex in degrees -n..0.

    Degree -k holds the k-simplices (the (k+1)-subsets of {0..n}); the
    differential is the alternating sum of face deletions.
    """
    if n < 0:
        raise SimplicialError("standard simplex needs n >= 0")
    K = SimplicialComplex(tuple(range(n + 1)), [tuple(range(n + 1))])
    dims = {-k: len(K.n_simplices(k)) for k in range(n + 1)}
    diffs = {-k: K.boundary_matrix(ring, k) for k in range(1, n + 1)}
    labels = {-k: K.n_simplices(k) for k in range(n + 1)}
    return CochainComplex(ring, dims, diffs, labels=labels)


class SimplicialMap:
    """Vertex map carrying simplices of the source onto simplices of the target."""

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex,
                 vertex_map: Mapping):
        self.source = source
        self.target = target
        self.vertex_map = dict(vertex_map)
        for v in source.vertices:
            if v not in self.vertex_map:
                raise SimplicialError(f"vertex {v!r} has no image")
            if self.vertex_map[v] not in target.index:
                raise SimplicialError(f"image {self.vertex_map[v]!r} is not a target vertex")
        for k, simplices in source.simplices.items():
            for s in simplices:
                image = {target.index[self.vertex_map[source.vertices[i]]] for i in s}
                if not target.has_simplex(tuple(image)):
                    raise SimplicialError(
                        f"image of {tuple(source.vertices[i] for i in s)!r} is not a simplex")

    def image_tuple(self, s: Sequence[int]) -> tuple[int, ...]:
        """Images of the vertices of a source simplex, in source order."""
        return tuple(self.target.index[self.vertex_map[self.source.vertices[i]]] for i in s)

    def pullback(self, ring: str) -> ChainMap:
        """Induced cochain map C*(target) -> C*(source).

        Over Q a simplex hitting its image with a vertex permutation
        contributes the sign of that permutation; degenerate images
        contribute zero.
        """
        check_ring(ring)
        src = self.source.cochains(ring)
        tgt = self.target.cochains(ring)
        blocks = {}
        for k in self.source.simplices:
            cols = self.target.n_simplices(k)
            col_index = self.target.simplex_index.get(k, {})
            entries = [[0] * len(cols) for _ in self.source.n_simplices(k)]
            for i, s in enumerate(self.source.n_simplices(k)):
                img = self.image_tuple(s)
                if len(set(img)) != len(img):
                    continue
                key = tuple(sorted(img))
                j = col_index.get(key)
                if j is None:
                    continue
                entries[i][j] = 1 if ring == F2 else permutation_sign(img)
            blocks[k] = Matrix.from_rows(ring, entries, ncols=len(cols))
        return ChainMap(tgt, src, blocks)


def permutation_sign(seq: Sequence) -> int:
    sign = 1
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


# -- products -------------------------------------------------------------


def cup(K: SimplicialComplex, ring: str, a: int, u: Sequence, b: int, v: Sequence) -> tuple:
    """Front/back cup product C^a x C^b -> C^{a+b}."""
    check_ring(ring)
    out_simplices = K.n_simplices(a + b)
    ui = K.simplex_index.get(a, {})
    vi = K.simplex_index.get(b, {})
    if len(u) != len(K.n_simplices(a)) or len(v) != len(K.n_simplices(b)):
        raise ShapeError("cochain vector length mismatch")
    out = []
    for s in out_simplices:
        front = s[: a + 1]
        back = s[a:]
        x = u[ui[front]]
        y = v[vi[back]]
        if ring == F2:
            out.append((int(x) * int(y)) & 1)
        else:
            out.append(Fraction(x) * Fraction(y))
    return tuple(out)


def iter_interval_cuts(m: int, i: int):
    """Nondecreasing tuples 0 <= j_0 <= ... <= j_i <= m."""
    # combinations with repetition, lexicographic
    for c in combinations(range(m + i + 1), i + 1):
        yield tuple(x - t for t, x in enumerate(c))


def cup_i(K: SimplicialComplex, a: int, u: Sequence, b: int, v: Sequence, i: int) -> tuple:
    """Interval-cut cup_i product over F2; cup_0 recovers cup."""
    if i < 0:
        return zero_vector(F2, len(K.n_simplices(a + b - i)))
    m = a + b - i
    out_simplices = K.n_simplices(m)
    ui = K.simplex_index.get(a, {})
    vi = K.simplex_index.get(b, {})
    if len(u) != len(K.n_simplices(a)) or len(v) != len(K.n_simplices(b)):
        raise ShapeError("cochain vector length mismatch")
    out = [0] * len(out_simplices)
    if m < 0:
        return tuple(out)
    support_u = {s for s, idx in ui.items() if u[idx]}
    support_v = {s for s, idx in vi.items() if v[idx]}
    for pos, s in enumerate(out_simplices):
        acc = 0
        for cuts in iter_interval_cuts(m, i):
            even, odd = interval_joins(s, cuts)
            if even is None:
                continue
            if len(even) != a + 1 or len(odd) != b + 1:
                continue
            if even in support_u and odd in support_v:
                acc ^= 1
        out[pos] = acc
    return tuple(out)


def interval_joins(s: Sequence, cuts: Sequence[int]):
    """Even/odd interval joins of a simplex for one cut tuple.

    Returns (None, None) if either join repeats a vertex.
    """
    m = len(s) - 1
    bounds = [0, *cuts, m]
    even: list = []
    odd: list = []
    for t in range(len(bounds) - 1):
        part = even if t % 2 == 0 else odd
        segment = s[bounds[t]: bounds[t + 1] + 1]
        if part and segment and part[-1] >= segment[0]:
            return None, None
        part.extend(segment)
    return tuple(even), tuple(odd)
