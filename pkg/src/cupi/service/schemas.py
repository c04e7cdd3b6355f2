"""Request and response models for the HTTP routes.

The wire formats mirror the handler payloads one to one; handlers do the
deep validation (with JSON pointers), so these models only pin the outer
shape that shows up in the generated API docs.
"""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

Label = Union[int, str]
Ring = Literal["F2", "Q"]
# A perversity: explicit values, or one of the names zero / top / inf.
PerversitySpec = Union[list[int], str]
Span = Union[int, str]


class ComplexIn(BaseModel):
    model_config = ConfigDict(extra="allow")
    vertices: list[Label]
    facets: list[list[Label]]


class StratumIn(BaseModel):
    codim: int
    facets: list[list[Label]]


class StratifiedIn(ComplexIn):
    strata: list[StratumIn] = []


class DescriptorIn(BaseModel):
    model_config = ConfigDict(extra="allow")
    arity: int
    spaces: dict[str, ComplexIn]
    maps: dict[str, list[list[Label]]] = {}
    dual: Optional[ComplexIn] = None


class CohomologyRequest(BaseModel):
    space: ComplexIn
    ring: Ring = "F2"


class SteenrodRequest(BaseModel):
    space: ComplexIn
    ring: Ring = "F2"
    s: Optional[Span] = None
    degree: Optional[int] = None


class SpectralRequest(BaseModel):
    space: ComplexIn
    ring: Ring = "F2"
    filtration: Literal["canonical", "bete", "trivial"] = "canonical"
    pages: Optional[Span] = None
    jobs: int = 1


class WeightRequest(BaseModel):
    descriptor: DescriptorIn
    ring: Ring = "F2"
    pages: Optional[Span] = None
    steenrod: Optional[Span] = None
    jobs: int = 1


class IHRequest(BaseModel):
    space: StratifiedIn
    ring: Ring = "F2"
    perversity: Union[PerversitySpec, list[PerversitySpec], None] = None


class DeligneRequest(IHRequest):
    pass


class AxiomsRequest(BaseModel):
    space: StratifiedIn
    ring: Ring = "F2"


class PerversityRequest(BaseModel):
    n: int
    op: Literal["list", "sum", "landing"] = "list"
    a: Optional[PerversitySpec] = None
    b: Optional[PerversitySpec] = None
    s: Optional[int] = None


class ValidateRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    document: Any
    schema_name: Literal["auto", "complex", "stratified", "descriptor", "perversity"] = Field(
        "auto", alias="schema")


class DegreeRow(BaseModel):
    degree: int
    dim: int


class CohomologyResponse(BaseModel):
    ring: Ring
    euler: int
    rows: list[DegreeRow]


class SteenrodEntry(BaseModel):
    s: int
    degree: int
    target: int
    source_dim: int
    target_dim: int
    rank: int
    matrix: list[str]


class SteenrodResponse(BaseModel):
    ring: Ring
    entries: list[SteenrodEntry]


class PageCell(BaseModel):
    page: int
    p: int
    q: int
    dim: int


class InfinityCell(BaseModel):
    p: int
    q: int
    dim: int


class SpectralResponse(BaseModel):
    ring: Ring
    filtration: str
    stable_at: int
    pages: list[PageCell]
    infinity: list[InfinityCell]
    abutment: list[DegreeRow]


class PageOperationEntry(BaseModel):
    s: int
    page: int
    p: int
    q: int
    target_p: int
    target_q: int
    rank: int
    matrix: list[str]


class GradedRow(BaseModel):
    degree: int
    p: int
    dim: int


class DualRowCell(BaseModel):
    p: int
    dim: int
    reduced: int
    unreduced: int


class DualRow(BaseModel):
    convention: str
    matches_reduced: bool
    matches_unreduced: bool
    row: list[DualRowCell]


class WeightResponse(BaseModel):
    ring: Ring
    arity: int
    stable_at: int
    e1_matches_layers: bool
    warnings: list[str]
    pages: list[PageCell]
    infinity: list[InfinityCell]
    abutment: list[DegreeRow]
    weight_graded: list[GradedRow]
    operations: list[PageOperationEntry]
    dual_row: Optional[DualRow] = None


class PerversityRow(BaseModel):
    perversity: Union[list[int], Literal["inf"]]
    degree: int
    dim: int


class IHResponse(BaseModel):
    ring: Ring
    dimension: int
    rows: list[PerversityRow]


class DeligneLevel(BaseModel):
    perversity: Union[list[int], Literal["inf"]]
    rows: list[DegreeRow]


class DeligneResponse(BaseModel):
    ring: Ring
    dimension: int
    levels: list[DeligneLevel]


class AxiomsResponse(BaseModel):
    # Witness contents vary by axiom, so levels stay loosely typed.
    ok: bool
    ring: Ring
    dimension: int
    levels: list[dict]
    notes: list[str]


class PerversityResponse(BaseModel):
    model_config = ConfigDict(extra="allow")
    n: int
    op: str


class Violation(BaseModel):
    path: str
    message: str


class ValidateResponse(BaseModel):
    schema_name: Optional[str] = Field(None, alias="schema")
    ok: bool
    violations: list[Violation]

    model_config = ConfigDict(populate_by_name=True)


class ErrorBody(BaseModel):
    kind: Literal["validation", "computation", "internal"]
    message: str
    where: Optional[str] = None


class ErrorResponse(BaseModel):
    error: ErrorBody
