"""HTTP front end: one POST endpoint per CLI subcommand.

Run with ``uvicorn stringtop.api:app``. Request bodies are the request models
of :mod:`stringtop.service`; responses are the same ``Result`` envelope the CLI
prints with ``--format json``.
"""

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from . import service
from .service import (AuditRequest, BracketRequest, CenterRequest, DerivedRequest,
                      HomologyRequest, LcsRequest, Result, StringBracketRequest,
                      VerifyRequest, WitnessRequest)

app = FastAPI(title="stringtop", version="0.1.0")

# a verification that ran and failed is a normal answer; the envelope says so
_STATUS = {service.EXIT_OK: 200, service.EXIT_DOMAIN: 400, service.EXIT_VERIFY: 200}


def _respond(command: str, req) -> JSONResponse:
    _, handler = service.HANDLERS[command]
    try:
        res = handler(req)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        res = service.error_result(command, exc)
    return JSONResponse(res.model_dump(mode="json"), status_code=_STATUS[res.exit_code])


_responses = {400: {"model": Result}}


@app.post("/bracket", response_model=Result, responses=_responses)
def bracket(req: BracketRequest):
    return _respond("bracket", req)


@app.post("/witness", response_model=Result, responses=_responses)
def witness(req: WitnessRequest):
    return _respond("witness", req)


@app.post("/derived", response_model=Result, responses=_responses)
def derived(req: DerivedRequest):
    return _respond("derived", req)


@app.post("/lcs", response_model=Result, responses=_responses)
def lcs(req: LcsRequest):
    return _respond("lcs", req)


@app.post("/homology", response_model=Result, responses=_responses)
def homology(req: HomologyRequest):
    return _respond("homology", req)


@app.post("/string-bracket", response_model=Result, responses=_responses)
def string_bracket(req: StringBracketRequest):
    return _respond("string-bracket", req)


@app.post("/verify", response_model=Result, responses=_responses)
def verify(req: VerifyRequest):
    return _respond("verify", req)


@app.post("/audit", response_model=Result, responses=_responses)
def audit(req: AuditRequest):
    return _respond("audit", req)


@app.post("/center", response_model=Result, responses=_responses)
def center(req: CenterRequest):
    return _respond("center", req)


@app.get("/schema")
def schema():
    return service.output_schema()
