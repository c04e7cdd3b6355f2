"""The HTTP application: one POST route per job, JSON both ways."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from . import handlers
from .schemas import (
    AxiomsRequest,
    AxiomsResponse,
    CohomologyRequest,
    CohomologyResponse,
    DeligneRequest,
    DeligneResponse,
    ErrorResponse,
    IHRequest,
    IHResponse,
    PerversityRequest,
    PerversityResponse,
    SpectralRequest,
    SpectralResponse,
    SteenrodRequest,
    SteenrodResponse,
    ValidateRequest,
    ValidateResponse,
    WeightRequest,
    WeightResponse,
)

_STATUS = {"validation": 422, "computation": 409, "internal": 500}
_ERRORS: dict = {code: {"model": ErrorResponse} for code in (409, 422)}


def create_app() -> FastAPI:
    app = FastAPI(
        title="cupi",
        version=__version__,
        description="Exact cochain operations on finite complexes: cohomology, "
                    "Steenrod squares, spectral sequences, weight pages, "
                    "intersection cohomology and the sheaf axiom checker.",
    )

    def report_error(request: Request, exc: Exception) -> JSONResponse:
        kind = handlers.classify_error(exc)
        body = {"kind": kind, "message": str(exc)}
        where = getattr(exc, "path", None)
        if where:
            body["where"] = where
        return JSONResponse(status_code=_STATUS[kind], content={"error": body})

    for group in (handlers.VALIDATION_ERRORS, handlers.COMPUTATION_ERRORS, (Exception,)):
        for cls in group:
            app.add_exception_handler(cls, report_error)

    @app.get("/")
    def info() -> dict:
        return {"name": "cupi", "version": __version__}

    @app.post("/cohomology", response_model=CohomologyResponse, responses=_ERRORS)
    def cohomology(req: CohomologyRequest):
        return handlers.run_cohomology(req.space.model_dump(), req.ring, at="/space")

    @app.post("/steenrod", response_model=SteenrodResponse, responses=_ERRORS)
    def steenrod(req: SteenrodRequest):
        return handlers.run_steenrod(
            req.space.model_dump(), req.ring, req.s, req.degree, at="/space")

    @app.post("/spectral", response_model=SpectralResponse, responses=_ERRORS)
    def spectral(req: SpectralRequest):
        return handlers.run_spectral(
            req.space.model_dump(), req.ring, req.filtration, req.pages,
            req.jobs, at="/space")

    @app.post("/weight", response_model=WeightResponse, responses=_ERRORS)
    def weight(req: WeightRequest):
        return handlers.run_weight(
            req.descriptor.model_dump(), req.ring, req.pages, req.steenrod,
            req.jobs, at="/descriptor")

    @app.post("/ih", response_model=IHResponse, responses=_ERRORS)
    def ih(req: IHRequest):
        return handlers.run_ih(
            req.space.model_dump(), req.ring, req.perversity, at="/space")

    @app.post("/deligne", response_model=DeligneResponse, responses=_ERRORS)
    def deligne(req: DeligneRequest):
        return handlers.run_deligne(
            req.space.model_dump(), req.ring, req.perversity, at="/space")

    @app.post("/check-axioms", response_model=AxiomsResponse, responses=_ERRORS)
    def axioms(req: AxiomsRequest):
        return handlers.run_axioms(req.space.model_dump(), req.ring, at="/space")

    @app.post("/perversity", response_model=PerversityResponse, responses=_ERRORS)
    def perversity(req: PerversityRequest):
        return handlers.run_perversity(req.n, req.op, req.a, req.b, req.s)

    @app.post("/validate", response_model=ValidateResponse, responses=_ERRORS)
    def validate(req: ValidateRequest):
        return handlers.validate_document(req.document, req.schema_name)

    return app
