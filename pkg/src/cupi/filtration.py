"""Filtered cochain complexes and their spectral sequences.

Filtrations W are increasing and finite; pages follow the convention
E_1^{p,q} = H^{p+q}(Gr^W_{-p}) with d_r of bidegree (r, 1-r).  Page
entries keep cochain-level representatives so operations defined on the
underlying complex (cup_i, chain maps) can be evaluated on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exact import (
    ChainMap,
    CochainComplex,
    F2,
    Matrix,
    Q,
    ShapeError,
    Subspace,
    quotient_coordinates,
    quotient_representatives,
    same_ring,
)


class NotFilteredError(ValueError):
    pass


class FilteredComplex:
    """A cochain complex with an increasing filtration by subcomplexes.

    levels maps a weight m to degreewise subspaces; between listed
    weights the filtration is extended as a step function, zero below
    the bottom and full above the top.
    """

    def __init__(self, complex: CochainComplex,
                 levels: Mapping[int, Mapping[int, Subspace]], check: bool = True):
        self.complex = complex
        self._W: dict[int, dict[int, Subspace]] = {}
        for m, per_degree in levels.items():
            row = {}
            for n in complex.degrees():
                s = per_degree.get(n)
                if s is None:
                    s = Subspace.zero(complex.ring, complex.dim(n))
                if s.ambient != complex.dim(n):
                    raise ShapeError(f"level {m} degree {n}: ambient mismatch")
                row[n] = s
            self._W[int(m)] = row
        if not self._W:
            raise ValueError("a filtration needs at least one level")
        self.weights = tuple(sorted(self._W))
        if check:
            self.validate()

    @property
    def ring(self) -> str:
        return self.complex.ring

    def level(self, n: int, m: int) -> Subspace:
        """W_m in degree n, extended as a step function in m."""
        ws = self.weights
        if m < ws[0]:
            return Subspace.zero(self.ring, self.complex.dim(n))
        lead = ws[0]
        for w in ws:
            if w <= m:
                lead = w
            else:
                break
        return self._W[lead].get(n, Subspace.zero(self.ring, self.complex.dim(n)))

    def bottom(self) -> int:
        return self.weights[0]

    def top(self) -> int:
        return self.weights[-1]

    def span(self) -> int:
        return self.top() - self.bottom()

    def validate(self):
        C = self.complex
        ws = self.weights
        for a, b in zip(ws, ws[1:]):
            for n in C.degrees():
                if not self._W[b][n].contains_space(self._W[a][n]):
                    raise NotFilteredError(f"levels not nested at weight {a}->{b}, degree {n}")
        for m in ws:
            for n in C.degrees():
                img = self._W[m][n].image(C.d(n))
                if not self.level(n + 1, m).contains_space(img):
                    raise NotFilteredError(f"level {m} is not a subcomplex at degree {n}")
        for n in C.degrees():
            if self._W[ws[-1]][n].dim != C.dim(n):
                raise NotFilteredError(f"top level is not exhaustive in degree {n}")

    def column_range(self) -> tuple[int, int]:
        """Inclusive range of column indices p = -m."""
        return (-self.top(), -self.bottom())

    def f(self, n: int, p: int) -> Subspace:
        """Column picture: F^p = W_{-p}."""
        return self.level(n, -p)


def trivial_filtration(C: CochainComplex) -> FilteredComplex:
    zeros = {n: Subspace.zero(C.ring, C.dim(n)) for n in C.degrees()}
    fulls = {n: Subspace.full(C.ring, C.dim(n)) for n in C.degrees()}
    return FilteredComplex(C, {-1: zeros, 0: fulls}, check=False)


def canonical_filtration(C: CochainComplex) -> FilteredComplex:
    """tau_p: everything below degree p, kernel of d at p, nothing above."""
    degs = C.degrees()
    if not degs:
        return trivial_filtration(C)
    levels = {}
    for p in range(degs[0], degs[-1] + 1):
        row = {}
        for n in degs:
            if n < p:
                row[n] = Subspace.full(C.ring, C.dim(n))
            elif n == p:
                row[n] = C.cocycle_space(n)
            else:
                row[n] = Subspace.zero(C.ring, C.dim(n))
        levels[p] = row
    return FilteredComplex(C, levels)


def bete_filtration(C: CochainComplex) -> FilteredComplex:
    """sigma_p is the full piece in degrees n >= -p and zero below."""
    degs = C.degrees()
    if not degs:
        return trivial_filtration(C)
    levels = {}
    for p in range(-degs[-1], -degs[0] + 1):
        row = {}
        for n in degs:
            if n >= -p:
                row[n] = Subspace.full(C.ring, C.dim(n))
            else:
                row[n] = Subspace.zero(C.ring, C.dim(n))
        levels[p] = row
    return FilteredComplex(C, levels, check=False)


def is_filtered_map(f: ChainMap, source: FilteredComplex, target: FilteredComplex) -> bool:
    """Does f carry W_m of the source into W_m of the target for all m?"""
    if f.source is not source.complex or f.target is not target.complex:
        if f.source.dims != source.complex.dims or f.target.dims != target.complex.dims:
            raise ShapeError("map endpoints do not match the filtered complexes")
    for m in sorted(set(source.weights) | set(target.weights)):
        for n in source.complex.degrees():
            img = source.level(n, m).image(f.block(n))
            if not target.level(n, m).contains_space(img):
                return False
    return True


class FilteredChainMap:
    """A chain map respecting the filtrations on both sides."""

    def __init__(self, chain_map: ChainMap, source: FilteredComplex,
                 target: FilteredComplex, check: bool = True):
        self.map = chain_map
        self.source = source
        self.target = target
        if check and not is_filtered_map(chain_map, source, target):
            raise NotFilteredError("map does not respect the filtration levels")


# -- tensor and hom filtrations ------------------------------------------


class TensorComplex:
    """Tensor product of two complexes with explicit block layout.

    Degree-n blocks are ordered by increasing left degree i; within a
    block the index of e_a tensor e_b is a * dim(B^j) + b.
    """

    def __init__(self, A: CochainComplex, B: CochainComplex):
        same_ring(A.ring, B.ring)
        self.A = A
        self.B = B
        self.ring = A.ring
        blocks: dict[int, list[tuple[int, int]]] = {}
        for i in A.degrees():
            for j in B.degrees():
                blocks.setdefault(i + j, []).append((i, j))
        self.blocks = {n: sorted(pairs) for n, pairs in blocks.items()}
        self._offset: dict[tuple[int, int], int] = {}
        dims = {}
        for n, pairs in self.blocks.items():
            off = 0
            for (i, j) in pairs:
                self._offset[(i, j)] = off
                off += A.dim(i) * B.dim(j)
            dims[n] = off
        diffs = {}
        for n in sorted(dims):
            tgt = dims.get(n + 1, 0)
            cols = []
            for (i, j) in self.blocks[n]:
                dA = A.d(i)
                dB = B.d(j)
                for a in range(A.dim(i)):
                    for b in range(B.dim(j)):
                        col = [0] * tgt
                        if (i + 1, j) in self._offset:
                            base = self._offset[(i + 1, j)]
                            for a2 in range(A.dim(i + 1)):
                                c = dA.entry(a2, a)
                                if c:
                                    col[base + a2 * B.dim(j) + b] = c
                        if (i, j + 1) in self._offset:
                            base = self._offset[(i, j + 1)]
                            sign = 1 if (self.ring == F2 or i % 2 == 0) else -1
                            for b2 in range(B.dim(j + 1)):
                                c = dB.entry(b2, b)
                                if c:
                                    col[base + a * B.dim(j + 1) + b2] = sign * c
                        cols.append(col)
            diffs[n] = Matrix.from_columns(self.ring, cols, nrows=tgt)
        self.complex = CochainComplex(self.ring, dims, diffs)

    def embed(self, i: int, j: int, u: Sequence, v: Sequence) -> tuple:
        """The vector of u tensor v in degree i + j."""
        n = i + j
        out = [Fraction(0) if self.ring == Q else 0] * self.complex.dim(n)
        base = self._offset[(i, j)]
        width = self.B.dim(j)
        for a, ua in enumerate(u):
            if not ua:
                continue
            for b, vb in enumerate(v):
                if vb:
                    out[base + a * width + b] = ua * vb if self.ring == Q else 1
        return tuple(out)


def tensor_filtered(FA: FilteredComplex, FB: FilteredComplex) -> FilteredComplex:
    """Convolution filtration (W*W')_p = sum over i+j=p of W_i tensor W'_j."""
    T = TensorComplex(FA.complex, FB.complex)
    C = T.complex
    levels = {}
    for p in range(FA.bottom() + FB.bottom(), FA.top() + FB.top() + 1):
        row = {}
        for n in C.degrees():
            vecs = []
            pairs = {(i, p - i) for i in FA.weights} | {(p - j, j) for j in FB.weights}
            for (i, j) in sorted(pairs):
                for ia in FA.complex.degrees():
                    jb = n - ia
                    if FB.complex.dim(jb) == 0:
                        continue
                    SU = FA.level(ia, i)
                    SV = FB.level(jb, j)
                    for u in SU.vectors():
                        for v in SV.vectors():
                            vecs.append(T.embed(ia, jb, u, v))
            row[n] = Subspace.span(C.ring, C.dim(n), vecs)
        levels[p] = row
    return FilteredComplex(C, levels)


class HomComplex:
    """Internal hom of complexes; degree n holds the maps A^m -> B^{m+n}.

    Basis units are ordered by source degree m, then source index k,
    then target index l; d(f) = d_B f - (-1)^n f d_A.
    """

    def __init__(self, A: CochainComplex, B: CochainComplex):
        same_ring(A.ring, B.ring)
        self.A = A
        self.B = B
        self.ring = A.ring
        self.blocks: dict[int, list[int]] = {}
        self._offset: dict[tuple[int, int], int] = {}
        dims = {}
        lo = min(B.degrees()) - max(A.degrees()) if A.degrees() and B.degrees() else 0
        hi = max(B.degrees()) - min(A.degrees()) if A.degrees() and B.degrees() else -1
        for n in range(lo, hi + 1):
            ms = [m for m in A.degrees() if B.dim(m + n) > 0]
            self.blocks[n] = ms
            off = 0
            for m in ms:
                self._offset[(n, m)] = off
                off += A.dim(m) * B.dim(m + n)
            if off:
                dims[n] = off
        diffs = {}
        for n in sorted(dims):
            tgt_dim = dims.get(n + 1, 0)
            cols = []
            for m in self.blocks[n]:
                dB = B.d(m + n)
                dA = A.d(m - 1)
                for k in range(A.dim(m)):
                    for l in range(B.dim(m + n)):
                        col = [0] * tgt_dim
                        if (n + 1, m) in self._offset:
                            base = self._offset[(n + 1, m)]
                            for l2 in range(B.dim(m + n + 1)):
                                c = dB.entry(l2, l)
                                if c:
                                    col[base + k * B.dim(m + n + 1) + l2] = c
                        if (n + 1, m - 1) in self._offset:
                            base = self._offset[(n + 1, m - 1)]
                            sign = 1 if (self.ring == F2 or n % 2 == 1) else -1
                            for k2 in range(A.dim(m - 1)):
                                c = dA.entry(k, k2)
                                if c:
                                    col[base + k2 * B.dim(m + n) + l] = sign * c
                        cols.append(col)
            diffs[n] = Matrix.from_columns(self.ring, cols, nrows=tgt_dim)
        self.complex = CochainComplex(self.ring, dims, diffs)

    def block_matrix(self, n: int, x: Sequence, m: int) -> Matrix:
        """The component A^m -> B^{m+n} of the degree-n element x."""
        rows_b = self.B.dim(m + n)
        cols_a = self.A.dim(m)
        cols = []
        base = self._offset.get((n, m))
        for k in range(cols_a):
            if base is None:
                cols.append([0] * rows_b)
            else:
                cols.append([x[base + k * rows_b + l] for l in range(rows_b)])
        return Matrix.from_columns(self.ring, cols, nrows=rows_b)

    def coordinates(self, n: int, blocks: Mapping[int, Matrix]) -> tuple:
        out = [Fraction(0) if self.ring == Q else 0] * self.complex.dim(n)
        for m, mat in blocks.items():
            base = self._offset[(n, m)]
            rows_b = self.B.dim(m + n)
            for k in range(self.A.dim(m)):
                for l in range(rows_b):
                    out[base + k * rows_b + l] = mat.entry(l, k)
        return tuple(out)


def hom_filtered(FA: FilteredComplex, FB: FilteredComplex) -> FilteredComplex:
    """(W|W')_p = maps sending W_q of the source into W'_{q+p} for all q."""
    H = HomComplex(FA.complex, FB.complex)
    C = H.complex
    lo = FB.bottom() - FA.top()
    hi = FB.top() - FA.bottom()
    levels = {}
    for p in range(lo, hi + 1):
        row = {}
        for n in C.degrees():
            constraints = []
            for q in FA.weights:
                for m in H.blocks[n]:
                    S = FA.level(m, q)
                    if S.dim == 0:
                        continue
                    ann = FB.level(m + n, q + p).annihilator()
                    if ann.nrows == 0:
                        continue
                    rows_b = FB.complex.dim(m + n)
                    base = H._offset[(n, m)]
                    for u in S.vectors():
                        # rows of ann applied to f(u), linear in f
                        cols = []
                        for idx in range(C.dim(n)):
                            cols.append([0] * FB.complex.dim(m + n))
                        for k, uk in enumerate(u):
                            if not uk:
                                continue
                            for l in range(rows_b):
                                cols[base + k * rows_b + l][l] = uk
                        ev = Matrix.from_columns(C.ring, cols, nrows=rows_b)
                        constraints.append(ann @ ev)
            if constraints:
                stacked = constraints[0]
                for extra in constraints[1:]:
                    stacked = stacked.vstack(extra)
                row[n] = Subspace.from_columns(stacked.kernel())
            else:
                row[n] = Subspace.full(C.ring, C.dim(n))
        levels[p] = row
    return FilteredComplex(C, levels)


# -- spectral sequence ----------------------------------------------------


@dataclass
class PageEntry:
    p: int
    q: int
    dim: int
    representatives: tuple
    numerator: Subspace
    denominator: Subspace

    def coordinates(self, vector: Sequence) -> tuple:
        return quotient_coordinates(self.representatives, self.denominator, vector)


class SpectralSequence:
    """Pages, differentials and convergence data of a filtered complex.

    pages[r][(p, q)] exists only for nonzero entries; differentials are
    stored where both endpoints are nonzero.  stable_at is the first
    page from which nothing changes.
    """

    def __init__(self, filtered: FilteredComplex):
        self.filtered = filtered
        C = filtered.complex
        self.ring = C.ring
        pmin, pmax = filtered.column_range()
        span = filtered.span()
        self.max_page = max(span + 1, 1)
        self._z_cache: dict[tuple[int, int, int], Subspace] = {}
        self.pages: dict[int, dict[tuple[int, int], PageEntry]] = {}
        self.differentials: dict[int, dict[tuple[int, int], Matrix]] = {}

        bidegrees = []
        for n in C.degrees():
            for p in range(pmin, pmax + 1):
                bidegrees.append((p, n - p))

        for r in range(1, self.max_page + 1):
            page = {}
            for (p, q) in bidegrees:
                e = self._entry(r, p, q)
                if e.dim:
                    page[(p, q)] = e
            self.pages[r] = page
            diffs = {}
            for (p, q), e in page.items():
                tgt = page.get((p + r, q - r + 1))
                if tgt is None:
                    continue
                cols = []
                for x in e.representatives:
                    dx = C.d(p + q).apply(x)
                    cols.append(list(tgt.coordinates(dx)))
                mat = Matrix.from_columns(self.ring, cols, nrows=tgt.dim)
                if not mat.is_zero():
                    diffs[(p, q)] = mat
            self.differentials[r] = diffs

        self.page_turn_verified = self._verify_page_turns()
        self.stable_at = self._compute_stable_at()

    # Z_r^{p,q} = {x in F^p C^{p+q} : dx in F^{p+r}}
    def _z(self, r: int, p: int, q: int) -> Subspace:
        key = (r, p, q)
        got = self._z_cache.get(key)
        if got is not None:
            return got
        FC = self.filtered
        C = FC.complex
        n = p + q
        base = FC.f(n, p)
        target = FC.f(n + 1, p + r)
        z = base.preimage(C.d(n), target)
        self._z_cache[key] = z
        return z

    def _entry(self, r: int, p: int, q: int) -> PageEntry:
        C = self.filtered.complex
        num = self._z(r, p, q)
        den = self._z(r - 1, p + 1, q - 1).add(
            self._z(r - 1, p - r + 1, q + r - 2).image(C.d(p + q - 1))
        )
        reps = tuple(quotient_representatives(num, den))
        return PageEntry(p, q, num.dim - den.dim, reps, num, den)

    def entry(self, r: int, p: int, q: int) -> PageEntry:
        rr = min(r, self.max_page)
        e = self.pages.get(rr, {}).get((p, q))
        if e is not None:
            return e
        dim_n = self.filtered.complex.dim(p + q)
        zero = Subspace.zero(self.ring, dim_n)
        return PageEntry(p, q, 0, (), zero, zero)

    def full_entry(self, r: int, p: int, q: int) -> PageEntry:
        """Like entry, but with the true cochain-level numerator and
        denominator even when the entry is zero or off the stored grid."""
        return self._entry(min(r, self.max_page), p, q)

    def d(self, r: int, p: int, q: int) -> Matrix:
        if r > self.max_page:
            src = self.entry(r, p, q)
            return Matrix.zero(self.ring, self.entry(r, p + r, q - r + 1).dim, src.dim)
        m = self.differentials.get(r, {}).get((p, q))
        if m is not None:
            return m
        return Matrix.zero(self.ring, self.entry(r, p + r, q - r + 1).dim,
                           self.entry(r, p, q).dim)

    def _verify_page_turns(self) -> bool:
        for r in range(1, self.max_page):
            keys = set(self.pages[r]) | set(self.pages[r + 1])
            for (p, q) in keys:
                out = self.d(r, p, q)
                inc = self.d(r, p - r, q + r - 1)
                expected = (self.entry(r, p, q).dim - out.rank()) - inc.rank()
                if expected != self.entry(r + 1, p, q).dim:
                    return False
        return True

    def _compute_stable_at(self) -> int:
        stable = self.max_page
        for r in range(self.max_page - 1, 0, -1):
            same_dims = (
                {k: e.dim for k, e in self.pages[r].items()}
                == {k: e.dim for k, e in self.pages[r + 1].items()}
            )
            if same_dims and not self.differentials[r]:
                stable = r
            else:
                break
        return stable

    def e_infinity(self) -> dict[tuple[int, int], int]:
        return {k: e.dim for k, e in self.pages[self.max_page].items()}

    def induced_cohomology_filtration_dim(self, p: int, n: int) -> int:
        """dim of the image of H^n(F^p) inside H^n."""
        C = self.filtered.complex
        Zn = C.cocycle_space(n)
        B = C.coboundary_space(n)
        S = Zn.intersect(self.filtered.f(n, p))
        return S.add(B).dim - B.dim

    def converges(self) -> bool:
        """E_infty equals Gr of the induced filtration on cohomology."""
        C = self.filtered.complex
        pmin, pmax = self.filtered.column_range()
        for n in set(C.degrees()) | {d + 1 for d in C.degrees()}:
            h = C.cohomology(n).dim
            total = 0
            for p in range(pmin, pmax + 1):
                einf = self.entry(self.max_page, p, n - p).dim
                gr = (self.induced_cohomology_filtration_dim(p, n)
                      - self.induced_cohomology_filtration_dim(p + 1, n))
                if einf != gr:
                    return False
                total += einf
            if total != h:
                return False
        return True


def spectral_sequence(filtered: FilteredComplex) -> SpectralSequence:
    return SpectralSequence(filtered)


def check_er_quasi_iso(fmap: FilteredChainMap, r: int) -> bool:
    """True iff the page-(r+1) map induced by fmap is an isomorphism everywhere."""
    ss_a = SpectralSequence(fmap.source)
    ss_b = SpectralSequence(fmap.target)
    page = r + 1
    keys = set(ss_a.pages.get(min(page, ss_a.max_page), {})) | set(
        ss_b.pages.get(min(page, ss_b.max_page), {})
    )
    for (p, q) in keys:
        ea = ss_a.entry(page, p, q)
        eb = ss_b.entry(page, p, q)
        if ea.dim != eb.dim:
            return False
        cols = []
        for x in ea.representatives:
            y = fmap.map.apply(p + q, x)
            cols.append(list(eb.coordinates(y)))
        mat = Matrix.from_columns(ss_b.ring, cols, nrows=eb.dim)
        if mat.rank() != ea.dim:
            return False
    return True


# -- weight shift of cup_i ------------------------------------------------


@dataclass
class CupShiftReport:
    holds: bool
    checked: int
    violations: list = field(default_factory=list)


def cup_shift_report(algebra, filtered: FilteredComplex,
                     max_violations: int = 10) -> CupShiftReport:
    """Verify W_p A^k cup_i W_q A^l lies in W_{p+q+i} A^{k+l-i}.

    Runs over all level pairs and basis vectors of the filtration; a
    violation records the minimal level actually containing the value.
    """
    C = filtered.complex
    if C.ring != F2:
        raise ShapeError("cup_i weight shift is an F2 check")
    report = CupShiftReport(holds=True, checked=0)
    ws = filtered.weights
    for p in ws:
        for q in ws:
            for k in C.degrees():
                for l in C.degrees():
                    SU = filtered.level(k, p)
                    SV = filtered.level(l, q)
                    if SU.dim == 0 or SV.dim == 0:
                        continue
                    for i in range(0, min(k, l) + 1):
                        tdeg = k + l - i
                        allowed = filtered.level(tdeg, p + q + i)
                        for u in SU.vectors():
                            for v in SV.vectors():
                                value = algebra.cup(i, k, u, l, v)
                                report.checked += 1
                                if allowed.contains(value):
                                    continue
                                report.holds = False
                                minimal = None
                                for m in ws:
                                    if filtered.level(tdeg, m).contains(value):
                                        minimal = m
                                        break
                                if len(report.violations) < max_violations:
                                    report.violations.append({
                                        "p": p, "q": q, "i": i, "k": k, "l": l,
                                        "required_level": p + q + i,
                                        "minimal_level": minimal,
                                    })
    return report
