"""FastAPI application: one POST endpoint per command.

Every endpoint answers {"config": echo, "payload": ..., "provenance": [...]}
on success. Caller mistakes (bad values, bad units, underdetermined
parameter sets) map to HTTP 422; failures of the numerics themselves map
to HTTP 500; both carry {"error": {"type", "message"}} bodies.
"""

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import IvlabError, NumericError
from . import ops
from .schemas import (
    CurveRequest,
    ExtractRequest,
    FitRequest,
    RegimeRequest,
    ScanRequest,
    SimulateRequest,
)


def _error_body(kind: str, message: str) -> dict:
    return {"error": {"type": kind, "message": message}}


def _respond(runner, request_model) -> dict:
    config, payload, provenance = runner(request_model)
    return {"config": config, "payload": payload, "provenance": provenance}


def create_app() -> FastAPI:
    app = FastAPI(title="ivlab", version=__version__)

    @app.exception_handler(IvlabError)
    async def _domain_error(request: Request, exc: IvlabError):
        status = 500 if isinstance(exc, NumericError) else 422
        return JSONResponse(
            status_code=status, content=_error_body(type(exc).__name__, str(exc))
        )

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422, content=_error_body("RequestValidationError", str(exc))
        )

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/curve")
    def curve(req: CurveRequest):
        return _respond(ops.run_curve, req)

    @app.post("/v1/regime")
    def regime(req: RegimeRequest):
        return _respond(ops.run_regime, req)

    @app.post("/v1/simulate")
    def simulate(req: SimulateRequest):
        return _respond(ops.run_simulate, req)

    @app.post("/v1/fit")
    def fit(req: FitRequest):
        return _respond(ops.run_fit, req)

    @app.post("/v1/extract")
    def extract(req: ExtractRequest):
        return _respond(ops.run_extract, req)

    @app.post("/v1/scan")
    def scan(req: ScanRequest):
        return _respond(ops.run_scan, req)

    return app


app = create_app()
