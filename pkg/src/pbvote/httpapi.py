"""HTTP front for the election service.

Routes:
    POST /elections                                   create (admin)
    GET  /elections/{id}                              public election view
    POST /elections/{id}/voters/{voter}/edits         apply one draft edit
    GET  /elections/{id}/voters/{voter}/session       current draft + budget
    POST /elections/{id}/voters/{voter}/submit        submit the draft
    GET  /elections/{id}/tally?rule=greedy|exact      results (admin)
    POST /elections/{id}/close                        close election (admin)

Domain violations during editing come back in-band inside the session
body; hard errors use a JSON body ``{"error": code, "detail": ...}``.
Admin routes require ``Authorization: Bearer $PB_ADMIN_TOKEN``.
"""

from __future__ import annotations

import hmac
import os
from pathlib import Path

from fastapi import Body, FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse

from .errors import (
    ConfigParseError,
    UnauthorizedError,
    ValidationFailedError,
    VotingError,
)
from .service import ElectionService

_STATUS = {
    "unauthorized": 401,
    "not_found": 404,
    "unknown_election": 404,
    "conflict": 409,
    "election_closed": 409,
    "invalid_config": 400,
    "parse_error": 400,
    "validation_failed": 422,
    "instance_too_large": 422,
    "storage_failure": 500,
    "corrupt_log": 500,
}


def create_app(service: ElectionService, admin_token: str | None = None) -> FastAPI:
    """Build the API over an ElectionService.

    ``admin_token`` defaults to the PB_ADMIN_TOKEN environment variable;
    if neither is set, admin routes always refuse.
    """
    token = admin_token if admin_token is not None else os.environ.get("PB_ADMIN_TOKEN")
    app = FastAPI(title="pbvote")

    def require_admin(authorization: str | None) -> None:
        supplied = None
        if authorization and authorization.startswith("Bearer "):
            supplied = authorization[len("Bearer "):]
        if not token or supplied is None or not hmac.compare_digest(supplied, token):
            raise UnauthorizedError()

    @app.exception_handler(VotingError)
    async def voting_error_handler(_request: Request, exc: VotingError):
        body: dict = {"error": exc.code, "detail": str(exc)}
        if isinstance(exc, ValidationFailedError):
            body["violations"] = [
                {"code": v.code, "subject": v.subject, "detail": v.detail}
                for v in exc.violations
            ]
        if isinstance(exc, ConfigParseError):
            body["field"] = exc.field
        return JSONResponse(status_code=_STATUS.get(exc.code, 400), content=body)

    @app.post("/elections", status_code=201)
    def create_election(
        document: dict = Body(...),
        authorization: str | None = Header(default=None),
    ):
        require_admin(authorization)
        try:
            election_id = service.create_election(document)
        except ValidationFailedError as exc:
            # spec'd code for a semantically invalid config document
            return JSONResponse(
                status_code=400,
                content={
                    "error": "invalid_config",
                    "violations": [
                        {"code": v.code, "subject": v.subject, "detail": v.detail}
                        for v in exc.violations
                    ],
                },
            )
        return {"id": election_id}

    @app.get("/elections/{election_id}")
    def get_election(election_id: str):
        return service.election_view(election_id)

    @app.post("/elections/{election_id}/voters/{voter_id}/edits")
    def edit_ballot(election_id: str, voter_id: str, edit: dict = Body(...)):
        try:
            state = service.edit_ballot(election_id, voter_id, edit)
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"error": "bad_edit", "detail": str(exc)})
        return state.to_wire()

    @app.get("/elections/{election_id}/voters/{voter_id}/session")
    def get_session(election_id: str, voter_id: str):
        return service.get_session(election_id, voter_id).to_wire()

    @app.post("/elections/{election_id}/voters/{voter_id}/submit")
    def submit_ballot(election_id: str, voter_id: str):
        return service.submit_ballot(election_id, voter_id)

    @app.get("/elections/{election_id}/tally")
    def get_tally(
        election_id: str,
        rule: str = Query(default="greedy"),
        authorization: str | None = Header(default=None),
    ):
        require_admin(authorization)
        if rule not in ("greedy", "exact"):
            return JSONResponse(
                status_code=400,
                content={"error": "bad_rule", "detail": f"unknown selection rule: {rule!r}"},
            )
        result = service.tally_result(election_id, rule)
        return {
            "election_id": election_id,
            "ballot_count": result.scoreboard.ballot_count,
            "scores": result.scoreboard.scores,
            "ordering": list(result.ordering),
            "winners": list(result.winners),
            "winners_cost": result.winners_cost,
            "selection_rule": result.selection_rule,
        }

    @app.post("/elections/{election_id}/close")
    def close_election(
        election_id: str,
        authorization: str | None = Header(default=None),
    ):
        require_admin(authorization)
        service.close_election(election_id)
        return {"id": election_id, "open": False}

    return app


def main() -> None:
    """Serve the API; PB_DATA_DIR, PB_LISTEN_ADDR and PB_ADMIN_TOKEN configure it."""
    import uvicorn

    data_dir = Path(os.environ.get("PB_DATA_DIR", "./pb-data"))
    listen = os.environ.get("PB_LISTEN_ADDR", "127.0.0.1:8000")
    host, _, port = listen.rpartition(":")
    app = create_app(ElectionService(data_dir))
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
