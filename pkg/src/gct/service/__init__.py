"""FastAPI service wrapping the engine: one POST endpoint per operation."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..textio import ParseError
from . import ops, schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="gct",
        description="Typed string diagrams: evaluation, rewriting, "
                    "observable-structure law checking, and the GHZ "
                    "non-locality harness.",
        version="0.1.0",
    )

    def run(fn, req):
        try:
            return fn(req)
        except ops.UsageError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except ParseError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/theories")
    def theories() -> dict:
        return ops.list_theories()

    @app.post("/eval", response_model=schemas.EvalResponse)
    def eval_diagram(req: schemas.EvalRequest) -> schemas.EvalResponse:
        return run(ops.op_eval, req)

    @app.post("/rewrite", response_model=schemas.RewriteResponse)
    def rewrite_diagram(req: schemas.RewriteRequest) -> schemas.RewriteResponse:
        return run(ops.op_rewrite, req)

    @app.post("/check", response_model=schemas.CheckResponse)
    def check_laws(req: schemas.CheckRequest) -> schemas.CheckResponse:
        return run(ops.op_check, req)

    @app.post("/ghz", response_model=schemas.GhzResponse)
    def ghz(req: schemas.GhzRequest) -> schemas.GhzResponse:
        return run(ops.op_ghz, req)

    @app.post("/soundness", response_model=schemas.SoundnessResponse)
    def soundness(req: schemas.SoundnessRequest) -> schemas.SoundnessResponse:
        return run(ops.op_soundness, req)

    return app


app = create_app()
