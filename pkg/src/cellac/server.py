"""HTTP suggestion service over an immutable engine snapshot.

Endpoints: POST /v1/suggest, GET /v1/health, GET /v1/stats, and a read-only
source-table viewer at GET /v1/table/{table_id}.  Bad requests return 400
with a machine-readable `code`.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import BadRequestError, Engine, MissingArtifactError, table_from_request


class SuggestRequest(BaseModel):
    table: Optional[dict] = None
    entity: Optional[str] = None
    row: Optional[int] = None
    heading: Optional[str] = None
    column: Optional[int] = None
    k: int = 10
    method: Optional[str] = None


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="cellac", version="0.1.0")
    # The grid frontend is served from a different origin than the API.
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"code": "invalid_request", "message": str(exc)})

    @app.exception_handler(BadRequestError)
    async def bad_request_handler(_request: Request, exc: BadRequestError):
        return JSONResponse(status_code=400,
                            content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(MissingArtifactError)
    async def missing_artifact_handler(_request: Request, exc: MissingArtifactError):
        return JSONResponse(status_code=503,
                            content={"code": "missing_artifact", "message": str(exc)})

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "artifacts": engine.versions}

    @app.get("/v1/stats")
    def stats():
        return engine.summary()

    @app.get("/v1/table/{table_id}")
    def table(table_id: str):
        found = engine.corpus.get(table_id)
        if found is None:
            return JSONResponse(status_code=404,
                                content={"code": "unknown_table",
                                         "message": f"no table {table_id!r} in corpus"})
        return found.to_record()

    @app.post("/v1/suggest")
    def suggest(req: SuggestRequest):
        table = table_from_request(req.table)
        return engine.suggest(table=table, entity=req.entity, row=req.row,
                              heading=req.heading, column=req.column,
                              k=req.k, method=req.method)

    return app
