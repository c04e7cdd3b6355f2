"""Catalog of small named complexes used by tests, examples and the CLI.

Vertex labels are kept human-readable; the triangulations are the usual
small ones (6-vertex projective plane, 7-vertex torus, their sums and
suspensions).  Validity of the surface fixtures is pinned by tests, not
assumed here.
"""

from __future__ import annotations

from itertools import combinations

from .simplicial import SimplicialComplex, SimplicialMap


def simplex(n: int) -> SimplicialComplex:
    """The full n-simplex."""
    verts = tuple(range(n + 1))
    return SimplicialComplex(verts, [verts])


def sphere(n: int) -> SimplicialComplex:
    """Boundary of the (n+1)-simplex."""
    verts = tuple(range(n + 2))
    return SimplicialComplex(verts, combinations(verts, n + 1))


def hollow_triangle() -> SimplicialComplex:
    return sphere(1)


def point() -> SimplicialComplex:
    return SimplicialComplex((0,), [(0,)])


def two_points() -> SimplicialComplex:
    return SimplicialComplex((0, 1), [(0,), (1,)])


def projective_plane() -> SimplicialComplex:
    """Minimal 6-vertex triangulation of RP^2 (antipodal icosahedron)."""
    facets = [
        (1, 2, 3), (1, 2, 4), (1, 3, 5), (1, 4, 6), (1, 5, 6),
        (2, 3, 6), (2, 4, 5), (2, 5, 6), (3, 4, 5), (3, 4, 6),
    ]
    return SimplicialComplex((1, 2, 3, 4, 5, 6), facets)


def torus() -> SimplicialComplex:
    """7-vertex torus: cyclic facet families {i,i+1,i+3} and {i,i+2,i+3} mod 7."""
    facets = []
    for i in range(7):
        facets.append((i, (i + 1) % 7, (i + 3) % 7))
        facets.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex(tuple(range(7)), facets)


def genus2_surface() -> SimplicialComplex:
    """Connected sum of two 7-vertex tori along a shared facet."""
    t = torus()
    shared = (0, 1, 3)  # a facet of the cyclic torus
    verts_a = [f"a{v}" for v in range(7)]
    verts_b = [f"b{v}" for v in range(7)]

    def relabel(prefix, v):
        return f"{prefix}{v}" if v not in shared else f"s{v}"

    vertices = []
    for v in range(7):
        vertices.append(relabel("a", v))
    for v in range(7):
        if v not in shared:
            vertices.append(relabel("b", v))
    facets = []
    for side in ("a", "b"):
        for f in t.facet_lists():
            if tuple(sorted(f)) == shared:
                continue
            facets.append(tuple(relabel(side, v) for v in f))
    return SimplicialComplex(tuple(vertices), facets)


def wedge_s2_s1() -> SimplicialComplex:
    """Sphere boundary of a tetrahedron with a hollow triangle glued at one vertex."""
    verts = (0, 1, 2, 3, "w1", "w2")
    facets = list(combinations((0, 1, 2, 3), 3)) + [(0, "w1"), ("w1", "w2"), ("w2", 0)]
    return SimplicialComplex(verts, facets)


def suspension(base: SimplicialComplex, north="N", south="S") -> SimplicialComplex:
    """Join with two new cone points."""
    if north in base.index or south in base.index:
        raise ValueError("cone point labels collide with base vertices")
    verts = base.vertices + (north, south)
    facets = []
    for f in base.facet_lists():
        facets.append(tuple(f) + (north,))
        facets.append(tuple(f) + (south,))
    if not facets:
        facets = [(north,), (south,)]
    return SimplicialComplex(verts, facets)


def pinched_torus() -> SimplicialComplex:
    """Torus with a meridian collapsed: a 7-vertex sphere with poles identified.

    Drum triangulation of S^2 whose two pole links are disjoint
    triangles, so identifying the poles stays simplicial.  The pinch
    vertex is "p".
    """
    u = ["u0", "u1", "u2"]
    w = ["w0", "w1", "w2"]
    facets = []
    for i in range(3):
        facets.append(("p", u[i], u[(i + 1) % 3]))
        facets.append(("p", w[i], w[(i + 1) % 3]))
        facets.append((u[i], u[(i + 1) % 3], w[i]))
        facets.append((u[(i + 1) % 3], w[i], w[(i + 1) % 3]))
    return SimplicialComplex(("p", *u, *w), facets)


def suspended_torus() -> SimplicialComplex:
    return suspension(torus())


def circle(n: int = 3, prefix: str = "c") -> SimplicialComplex:
    """Cycle with n vertices."""
    if n < 3:
        raise ValueError("a simplicial circle needs at least 3 vertices")
    verts = tuple(f"{prefix}{i}" for i in range(n))
    facets = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    return SimplicialComplex(verts, facets)


def double_cover_map() -> SimplicialMap:
    """Hexagon onto triangle, the simplicial double cover of the circle."""
    hexagon = circle(6, prefix="h")
    triangle = circle(3, prefix="t")
    vm = {f"h{i}": f"t{i % 3}" for i in range(6)}
    return SimplicialMap(hexagon, triangle, vm)


def disjoint_union(a: SimplicialComplex, b: SimplicialComplex,
                   prefix_a: str = "A_", prefix_b: str = "B_") -> SimplicialComplex:
    verts = tuple(f"{prefix_a}{v}" for v in a.vertices) + tuple(f"{prefix_b}{v}" for v in b.vertices)
    facets = [tuple(f"{prefix_a}{v}" for v in f) for f in a.facet_lists()]
    facets += [tuple(f"{prefix_b}{v}" for v in f) for f in b.facet_lists()]
    return SimplicialComplex(verts, facets)


def closed_surface_check(K: SimplicialComplex) -> list[str]:
    """Diagnostics for the closed-surface fixtures; empty list means good."""
    problems = []
    if K.dim != 2:
        problems.append(f"dimension {K.dim}, expected 2")
        return problems
    tri_count: dict[tuple, int] = {}
    for t in K.n_simplices(2):
        for e in combinations(t, 2):
            tri_count[e] = tri_count.get(e, 0) + 1
    for e in K.n_simplices(1):
        c = tri_count.get(e, 0)
        if c != 2:
            labels = tuple(K.vertices[i] for i in e)
            problems.append(f"edge {labels} lies in {c} triangles")
    # vertex links must be single cycles
    for v in range(len(K.vertices)):
        link_edges = [tuple(x for x in t if x != v) for t in K.n_simplices(2) if v in t]
        adj: dict[int, set] = {}
        for a, b in link_edges:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        if not adj:
            problems.append(f"vertex {K.vertices[v]!r} has empty link")
            continue
        if any(len(nbrs) != 2 for nbrs in adj.values()):
            problems.append(f"link of {K.vertices[v]!r} is not a cycle")
            continue
        start = min(adj)
        seen = {start}
        prev, cur = None, start
        while True:
            nxt = sorted(x for x in adj[cur] if x != prev)
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            if cur == start:
                break
            seen.add(cur)
        if len(seen) != len(adj):
            problems.append(f"link of {K.vertices[v]!r} is disconnected")
    return problems
