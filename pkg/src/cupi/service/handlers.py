"""Job handlers shared by the service routes and the command line.

Both front ends speak plain dicts: decoded JSON comes in, JSON-ready
reports go out, so a report serializes identically no matter which door
it left through.  Schema problems raise SchemaError carrying a JSON
pointer into the offending document (or a bare option name); domain and
computation errors propagate from the core modules and the front ends
sort them into exit codes or HTTP statuses.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Mapping, Optional, Sequence

from ..codiagram import (
    NotFunctorialError,
    NotNiceError,
    RepresentativeMissingError,
    normalized_algebra,
    page_steenrod,
)
from ..exact import F2, Matrix, NotAComplexError, RINGS, RingError, ShapeError
from ..filtration import (
    NotFilteredError,
    bete_filtration,
    canonical_filtration,
    spectral_sequence,
    trivial_filtration,
)
from ..intersection import (
    BadStrataError,
    LandingError,
    NotOpenError,
    StratifiedComplex,
    check_axioms,
    deligne_ic,
    intersection_homology,
    stratified_from_data,
)
from ..perversity import (
    DimensionMismatchError,
    InvalidPerversityError,
    Perversity,
    l_perversity,
    extended_perversities,
    oplus,
    validate_perversity,
)
from ..simplicial import SimplicialComplex, SimplicialError, SimplicialMap
from ..steenrod import simplicial_algebra, sq_matrix
from ..weight import (
    HyperresolutionDescriptor,
    IncompatibleDiagramsError,
    MissingDualComplexError,
    dual_complex_row,
    weight_ss,
)


class ParseError(ValueError):
    """The input is not JSON at all."""


class SchemaError(ValueError):
    """A document fails its schema.

    path is a JSON pointer into the document, or a bare option name when
    the problem is a scalar option rather than a document node.
    """

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path or '/'}: {reason}")
        self.path = path or "/"
        self.reason = reason


SCHEMAS = ("complex", "stratified", "descriptor", "perversity")

# Bad input versus a computation that could not finish versus a bug.
VALIDATION_ERRORS = (
    ParseError, SchemaError, SimplicialError, BadStrataError,
    InvalidPerversityError, DimensionMismatchError, RingError, NotOpenError,
)
COMPUTATION_ERRORS = (
    NotFunctorialError, LandingError, RepresentativeMissingError,
    MissingDualComplexError, IncompatibleDiagramsError, ShapeError,
    NotFilteredError, NotAComplexError, NotNiceError,
)


def classify_error(exc: BaseException) -> str:
    if isinstance(exc, VALIDATION_ERRORS):
        return "validation"
    if isinstance(exc, COMPUTATION_ERRORS):
        return "computation"
    return "internal"


_FILTRATIONS = {
    "canonical": canonical_filtration,
    "bete": bete_filtration,
    "trivial": trivial_filtration,
}


# -- scalar options -----------------------------------------------------------


def _decode_ring(ring) -> str:
    if ring not in RINGS:
        raise SchemaError("ring", f"ring must be one of {', '.join(RINGS)}")
    return ring


def _decode_span(spec, default: Sequence[int], floor: int, name: str) -> list[int]:
    """A single integer or an inclusive 'a..b' range."""
    if spec is None:
        return list(default)
    if isinstance(spec, bool):
        raise SchemaError(name, "expected an integer or 'a..b'")
    if isinstance(spec, int):
        spec = str(spec)
    if not isinstance(spec, str):
        raise SchemaError(name, "expected an integer or 'a..b'")
    parts = spec.split("..") if ".." in spec else [spec, spec]
    try:
        lo, hi = (int(p) for p in parts)
    except ValueError:
        raise SchemaError(name, f"cannot read {spec!r} as an integer or 'a..b'")
    if lo < floor or hi < lo:
        raise SchemaError(name, f"range {spec!r} must be increasing and start at {floor} or above")
    return list(range(lo, hi + 1))


def _fan_out(fn: Callable, items: Sequence, jobs: int) -> list:
    # Results are collected in input order, so the job count never shows.
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _matrix_strings(M: Matrix) -> list[str]:
    return ["".join(str(x) for x in M.row(i)) for i in range(M.nrows)]


# -- document decoding --------------------------------------------------------


def _is_label(x) -> bool:
    return isinstance(x, (int, str)) and not isinstance(x, bool)


def _label_rows(doc: Mapping, key: str, at: str) -> tuple[list, list[dict]]:
    rows = doc.get(key)
    if not isinstance(rows, list):
        return [], [{"path": f"{at}/{key}", "message": "expected a list"}]
    out = []
    for j, row in enumerate(rows):
        if not isinstance(row, list) or not all(_is_label(v) for v in row):
            out.append({"path": f"{at}/{key}/{j}", "message": "expected a list of vertex labels"})
    return rows, out


def complex_violations(doc, at: str = "") -> list[dict]:
    if not isinstance(doc, Mapping):
        return [{"path": at or "/", "message": "expected an object with vertices and facets"}]
    out = []
    verts = doc.get("vertices")
    verts_ok = isinstance(verts, list) and all(_is_label(v) for v in verts)
    if not verts_ok:
        out.append({"path": f"{at}/vertices", "message": "expected a list of integer or string labels"})
    elif len(set(verts)) != len(verts):
        out.append({"path": f"{at}/vertices", "message": "duplicate vertices"})
        verts_ok = False
    facets, bad = _label_rows(doc, "facets", at)
    out.extend(bad)
    if bad or not verts_ok:
        return out
    vset = set(verts)
    for j, facet in enumerate(facets):
        here = f"{at}/facets/{j}"
        missing = [v for v in facet if v not in vset]
        if missing:
            out.append({"path": here, "message": f"facet vertex {missing[0]!r} not in vertex list"})
        elif len(set(facet)) != len(facet):
            out.append({"path": here, "message": "facet repeats a vertex"})
    return out


def decode_complex(doc, at: str = "") -> SimplicialComplex:
    bad = complex_violations(doc, at)
    if bad:
        raise SchemaError(bad[0]["path"], bad[0]["message"])
    try:
        return SimplicialComplex(doc["vertices"], [tuple(f) for f in doc["facets"]])
    except SimplicialError as e:
        raise SchemaError(at or "/", str(e))


def complex_to_data(K: SimplicialComplex) -> dict:
    return {"vertices": list(K.vertices), "facets": [list(f) for f in K.facet_lists()]}


def stratified_violations(doc, at: str = "") -> list[dict]:
    out = complex_violations(doc, at)
    if not isinstance(doc, Mapping):
        return out
    strata = doc.get("strata", [])
    if not isinstance(strata, list):
        out.append({"path": f"{at}/strata", "message": "expected a list of strata"})
        return out
    for i, stratum in enumerate(strata):
        here = f"{at}/strata/{i}"
        if not isinstance(stratum, Mapping):
            out.append({"path": here, "message": "expected an object with codim and facets"})
            continue
        codim = stratum.get("codim")
        if not isinstance(codim, int) or isinstance(codim, bool) or codim < 2:
            out.append({"path": f"{here}/codim", "message": "codim must be an integer >= 2"})
        _, bad = _label_rows(stratum, "facets", here)
        out.extend(bad)
    return out


def decode_stratified(doc, at: str = "") -> StratifiedComplex:
    bad = stratified_violations(doc, at)
    if bad:
        raise SchemaError(bad[0]["path"], bad[0]["message"])
    try:
        return stratified_from_data(doc)
    except SimplicialError as e:
        raise SchemaError(f"{at}/facets", str(e))
    except BadStrataError as e:
        raise SchemaError(f"{at}/strata", str(e))


def _subset_indices(key, arity: int) -> Optional[tuple]:
    if not isinstance(key, str) or not key or not all(c.isdigit() for c in key):
        return None
    idx = tuple(int(c) for c in key)
    if list(idx) != sorted(set(idx)) or idx[-1] > arity:
        return None
    return idx


def descriptor_violations(doc, at: str = "") -> list[dict]:
    if not isinstance(doc, Mapping):
        return [{"path": at or "/", "message": "expected an object with arity, spaces, maps"}]
    out = []
    arity = doc.get("arity")
    if not isinstance(arity, int) or isinstance(arity, bool) or not 0 <= arity <= 9:
        out.append({"path": f"{at}/arity", "message": "arity must be an integer between 0 and 9"})
        return out
    spaces = doc.get("spaces")
    if not isinstance(spaces, Mapping):
        out.append({"path": f"{at}/spaces", "message": "expected an object keyed by subset strings"})
    else:
        for key, space in spaces.items():
            if _subset_indices(key, arity) is None:
                out.append({
                    "path": f"{at}/spaces/{key}",
                    "message": f"key {key!r} must name increasing digits up to {arity}",
                })
            else:
                out.extend(complex_violations(space, f"{at}/spaces/{key}"))
    maps = doc.get("maps", {})
    if not isinstance(maps, Mapping):
        out.append({"path": f"{at}/maps", "message": "expected an object keyed like 'a<b'"})
        maps = {}
    for key, pairs in maps.items():
        here = f"{at}/maps/{key}"
        sides = key.split("<") if isinstance(key, str) else []
        if len(sides) != 2 or any(_subset_indices(s, arity) is None for s in sides):
            out.append({"path": here, "message": f"key {key!r} must look like 'a<b' with subset strings"})
            continue
        a, b = (_subset_indices(s, arity) for s in sides)
        if not set(a) < set(b):
            out.append({"path": here, "message": f"{sides[0]!r} must be a strict subset of {sides[1]!r}"})
        if not isinstance(pairs, list) or not all(
            isinstance(p, list) and len(p) == 2 and all(_is_label(v) for v in p) for p in pairs
        ):
            out.append({"path": here, "message": "expected a list of [source, target] vertex pairs"})
    if doc.get("dual") is not None:
        out.extend(complex_violations(doc["dual"], f"{at}/dual"))
    return out


def decode_descriptor(doc, at: str = "") -> tuple[HyperresolutionDescriptor, Optional[SimplicialComplex]]:
    bad = descriptor_violations(doc, at)
    if bad:
        raise SchemaError(bad[0]["path"], bad[0]["message"])
    arity = doc["arity"]
    spaces = {
        _subset_indices(key, arity): decode_complex(space, f"{at}/spaces/{key}")
        for key, space in doc["spaces"].items()
    }
    maps = {}
    for key, pairs in doc.get("maps", {}).items():
        a, b = (_subset_indices(s, arity) for s in key.split("<"))
        try:
            maps[(a, b)] = SimplicialMap(spaces[b], spaces[a], dict(map(tuple, pairs)))
        except KeyError as missing:
            raise SchemaError(f"{at}/maps/{key}", f"no space at subset {missing.args[0]!r}")
        except SimplicialError as e:
            raise SchemaError(f"{at}/maps/{key}", str(e))
    try:
        desc = HyperresolutionDescriptor(arity, spaces, maps)
    except ValueError as e:
        raise SchemaError(at or "/", str(e))
    dual = doc.get("dual")
    return desc, (None if dual is None else decode_complex(dual, f"{at}/dual"))


def descriptor_to_data(desc: HyperresolutionDescriptor,
                       dual: Optional[SimplicialComplex] = None) -> dict:
    def key(subset: tuple) -> str:
        return "".join(str(i) for i in subset)

    data = {
        "arity": desc.n,
        "spaces": {key(a): complex_to_data(K) for a, K in sorted(desc.spaces.items())},
        "maps": {
            f"{key(a)}<{key(b)}": [[v, f.vertex_map[v]] for v in f.source.vertices]
            for (a, b), f in sorted(desc.maps.items())
        },
    }
    if dual is not None:
        data["dual"] = complex_to_data(dual)
    return data


def perversity_violations(doc, at: str = "") -> list[dict]:
    if not isinstance(doc, Mapping):
        return [{"path": at or "/", "message": "expected an object with n and values"}]
    out = []
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        out.append({"path": f"{at}/n", "message": "n must be an integer >= 2"})
        return out
    values = doc.get("values")
    if values == "inf":
        return out
    if not isinstance(values, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in values
    ):
        out.append({"path": f"{at}/values", "message": "expected a list of integers or 'inf'"})
        return out
    try:
        validate_perversity(values, n)
    except InvalidPerversityError as e:
        out.append({"path": f"{at}/values", "message": f"{type(e).__name__}: {e}"})
    return out


def decode_perversity(spec, n: int, at: str = "perversity") -> Perversity:
    """Named ('zero', 'top', 'inf'), comma-joined, or a list of values."""
    if isinstance(spec, str):
        name = spec.strip().lower()
        named = {"zero": Perversity.zero, "0": Perversity.zero,
                 "top": Perversity.top, "t": Perversity.top,
                 "inf": Perversity.infinity, "infinity": Perversity.infinity}
        if name in named:
            return named[name](n)
        try:
            spec = [int(tok) for tok in name.split(",")]
        except ValueError:
            raise SchemaError(at, f"cannot read perversity {spec!r}")
    if isinstance(spec, (list, tuple)) and all(
        isinstance(v, int) and not isinstance(v, bool) for v in spec
    ):
        try:
            return validate_perversity(spec, n)
        except InvalidPerversityError as e:
            raise SchemaError(at, f"{type(e).__name__}: {e}")
    raise SchemaError(at, "expected perversity values, 'zero', 'top', or 'inf'")


def _decode_perversity_list(specs, n: int, at: str = "perversity") -> list[Perversity]:
    if specs is None or specs == "all" or specs == ["all"]:
        return list(extended_perversities(n))
    if isinstance(specs, str) or (
        isinstance(specs, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in specs)
    ):
        specs = [specs]
    return [decode_perversity(sp, n, at) for sp in specs]


# -- job handlers -------------------------------------------------------------


def run_cohomology(space_doc, ring="F2", at: str = "") -> dict:
    ring = _decode_ring(ring)
    K = decode_complex(space_doc, at)
    betti = K.cochains(ring).betti()
    rows = [{"degree": k, "dim": betti.get(k, 0)} for k in range(max(K.dim, 0) + 1)]
    return {"ring": ring, "euler": K.euler_characteristic(), "rows": rows}


def run_steenrod(space_doc, ring="F2", s=None, degree=None, at: str = "") -> dict:
    ring = _decode_ring(ring)
    if ring != F2:
        raise SchemaError("ring", "Steenrod squares require F2")
    K = decode_complex(space_doc, at)
    algebra = simplicial_algebra(K)
    betti = algebra.complex.betti()
    top = max(betti, default=0)
    s_list = _decode_span(s, range(top + 1), 0, "s")
    degrees = sorted(betti) if degree is None else [degree]
    entries = []
    for sv in s_list:
        for k in degrees:
            dim = betti.get(k, 0)
            if not dim:
                continue
            M = sq_matrix(algebra, sv, k)
            entries.append({
                "s": sv, "degree": k, "target": k + sv,
                "source_dim": dim, "target_dim": M.nrows,
                "rank": M.rank(), "matrix": _matrix_strings(M),
            })
    return {"ring": F2, "entries": entries}


def _page_rows(ss, pages: Sequence[int], jobs: int) -> list[dict]:
    def rows_at(r: int) -> list[dict]:
        stored = ss.pages.get(min(r, ss.max_page), {})
        return [
            {"page": r, "p": p, "q": q, "dim": ss.entry(r, p, q).dim}
            for (p, q) in sorted(stored)
            if ss.entry(r, p, q).dim
        ]

    out = []
    for chunk in _fan_out(rows_at, list(pages), jobs):
        out.extend(chunk)
    return out


def run_spectral(space_doc, ring="F2", filtration="canonical", pages=None,
                 jobs: int = 1, at: str = "") -> dict:
    ring = _decode_ring(ring)
    build = _FILTRATIONS.get(filtration)
    if build is None:
        raise SchemaError("filtration", f"filtration must be one of {', '.join(sorted(_FILTRATIONS))}")
    K = decode_complex(space_doc, at)
    ss = spectral_sequence(build(K.cochains(ring)))
    wanted = _decode_span(pages, (1, 2), 1, "pages")
    betti = ss.filtered.complex.betti()
    return {
        "ring": ring,
        "filtration": filtration,
        "stable_at": ss.stable_at,
        "pages": _page_rows(ss, wanted, jobs),
        "infinity": [
            {"p": p, "q": q, "dim": d} for (p, q), d in sorted(ss.e_infinity().items())
        ],
        "abutment": [{"degree": k, "dim": betti[k]} for k in sorted(betti)],
    }


def run_weight(descriptor_doc, ring="F2", pages=None, steenrod=None,
               jobs: int = 1, at: str = "") -> dict:
    ring = _decode_ring(ring)
    desc, dual = decode_descriptor(descriptor_doc, at)
    s_list = [] if steenrod is None else _decode_span(steenrod, (), 0, "steenrod")
    if s_list and ring != F2:
        raise SchemaError("ring", "page operations require F2")
    W = weight_ss(desc, ring)
    wanted = _decode_span(pages, (1, 2), 1, "pages")
    report = {
        "ring": ring,
        "arity": desc.n,
        "stable_at": W.ss.stable_at,
        "e1_matches_layers": W.e1_matches_layers(),
        "warnings": list(desc.dimension_warnings()),
        "pages": _page_rows(W.ss, wanted, jobs),
        "infinity": [
            {"p": p, "q": q, "dim": d} for (p, q), d in sorted(W.ss.e_infinity().items())
        ],
        "abutment": [{"degree": k, "dim": W.abutment[k]} for k in sorted(W.abutment)],
        "weight_graded": [
            {"degree": n, "p": p, "dim": d}
            for n in sorted(W.weight_graded)
            for p, d in sorted(W.weight_graded[n].items())
        ],
        "operations": [],
    }
    if s_list:
        algebra = normalized_algebra(W.normalization)
        tables = _fan_out(lambda sv: page_steenrod(W.ss, algebra, sv, 2), s_list, jobs)
        for ops in tables:
            for (p, q) in sorted(ops.tables):
                M = ops.tables[(p, q)]
                report["operations"].append({
                    "s": ops.s, "page": ops.r, "p": p, "q": q,
                    "target_p": p - q + ops.s, "target_q": 2 * q,
                    "rank": M.rank(), "matrix": _matrix_strings(M),
                })
    if dual is not None:
        row = dual_complex_row(W, dual)
        report["dual_row"] = {
            "convention": row.convention or "none",
            "matches_reduced": row.matches_reduced,
            "matches_unreduced": row.matches_unreduced,
            "row": [
                {"p": p, "dim": row.row[p], "reduced": row.reduced[p],
                 "unreduced": row.unreduced[p]}
                for p in sorted(row.row)
            ],
        }
    return report


def run_ih(space_doc, ring="F2", perversity=None, at: str = "") -> dict:
    ring = _decode_ring(ring)
    X = decode_stratified(space_doc, at)
    rows = []
    for p in _decode_perversity_list(perversity, X.n):
        dims = intersection_homology(X, p, ring)
        top = max(max(dims, default=0), X.n)
        rows.extend(
            {"perversity": p.to_json(), "degree": k, "dim": dims.get(k, 0)}
            for k in range(top + 1)
        )
    return {"ring": ring, "dimension": X.n, "rows": rows}


def run_deligne(space_doc, ring="F2", perversity=None, at: str = "") -> dict:
    ring = _decode_ring(ring)
    X = decode_stratified(space_doc, at)
    sheaf = deligne_ic(X, ring)
    levels = []
    for p in _decode_perversity_list(perversity, X.n):
        dims = sheaf.hypercohomology(p)
        top = max(max(dims, default=0), X.n)
        levels.append({
            "perversity": p.to_json(),
            "rows": [{"degree": k, "dim": dims.get(k, 0)} for k in range(top + 1)],
        })
    return {"ring": ring, "dimension": X.n, "levels": levels}


def run_axioms(space_doc, ring="F2", at: str = "") -> dict:
    ring = _decode_ring(ring)
    X = decode_stratified(space_doc, at)
    report = check_axioms(deligne_ic(X, ring))
    report["dimension"] = X.n
    return report


def run_perversity(n, op="list", a=None, b=None, s=None) -> dict:
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise SchemaError("n", "n must be an integer >= 2")
    out: dict[str, Any] = {"n": n, "op": op}
    if op == "list":
        out["perversities"] = [p.to_json() for p in extended_perversities(n)]
    elif op == "sum":
        if a is None or b is None:
            raise SchemaError("a" if a is None else "b", "sum needs both summands")
        pa, pb = decode_perversity(a, n, "a"), decode_perversity(b, n, "b")
        out.update(a=pa.to_json(), b=pb.to_json(), result=oplus(pa, pb).to_json())
    elif op == "landing":
        if a is None:
            raise SchemaError("a", "landing needs a perversity")
        if s is None or isinstance(s, bool) or not isinstance(s, int) or s < 0:
            raise SchemaError("s", "landing needs an integer s >= 0")
        pa = decode_perversity(a, n, "a")
        out.update(a=pa.to_json(), s=s, result=l_perversity(pa, s).to_json())
    else:
        raise SchemaError("op", f"unknown perversity operation {op!r}")
    return out


# -- schema validation --------------------------------------------------------


_COLLECTORS = {
    "complex": complex_violations,
    "stratified": stratified_violations,
    "descriptor": descriptor_violations,
    "perversity": perversity_violations,
}

_DECODERS: dict[str, Callable] = {
    "complex": decode_complex,
    "stratified": decode_stratified,
    "descriptor": decode_descriptor,
    "perversity": lambda doc, at="": decode_perversity(doc["values"], doc["n"], f"{at}/values"),
}


def detect_schema(doc) -> Optional[str]:
    if not isinstance(doc, Mapping):
        return None
    if "arity" in doc:
        return "descriptor"
    if "strata" in doc:
        return "stratified"
    if "vertices" in doc:
        return "complex"
    if "values" in doc and "n" in doc:
        return "perversity"
    return None


def validate_document(doc, schema: str = "auto") -> dict:
    if schema == "auto":
        schema = detect_schema(doc)
        if schema is None:
            return {
                "schema": None, "ok": False,
                "violations": [{"path": "/", "message": "unrecognized document shape"}],
            }
    if schema not in _COLLECTORS:
        raise SchemaError("schema", f"schema must be one of auto, {', '.join(SCHEMAS)}")
    violations = _COLLECTORS[schema](doc)
    if not violations:
        # The shape is right; surface the constructive checks too.
        try:
            _DECODERS[schema](doc)
        except SchemaError as e:
            violations.append({"path": e.path, "message": e.reason})
        except (SimplicialError, BadStrataError, InvalidPerversityError, ValueError) as e:
            violations.append({"path": "/", "message": f"{type(e).__name__}: {e}"})
    return {"schema": schema, "ok": not violations, "violations": violations}
