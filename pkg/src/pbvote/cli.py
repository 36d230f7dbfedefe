"""Operator command line: create/close elections, tally, synthetic ballots.

By default commands talk to a running service over HTTP; ``--offline``
runs the engine and store in-process against the data directory instead,
so tallies and fixtures work without a server. Both paths go through the
same ElectionService operations.

Exit codes: 0 success, 1 domain error (unknown election, invalid config),
2 I/O failure, 3 instance too large for the exact rule.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click
import httpx

from .errors import (
    ConfigParseError,
    InstanceTooLargeError,
    ValidationFailedError,
    VotingError,
)
from .service import ElectionService
from .synth import generate_allocation
from .tally import result_report

EXIT_DOMAIN = 1
EXIT_IO = 2
EXIT_TOO_LARGE = 3


@click.group()
@click.option("--offline", is_flag=True, help="Run against PB_DATA_DIR in-process, no server.")
@click.option(
    "--data-dir",
    envvar="PB_DATA_DIR",
    default="./pb-data",
    show_default=True,
    help="Data directory (offline mode).",
)
@click.option(
    "--url",
    envvar="PB_SERVICE_URL",
    default="http://127.0.0.1:8000",
    show_default=True,
    help="Service base URL.",
)
@click.option("--admin-token", envvar="PB_ADMIN_TOKEN", default=None, help="Admin bearer token.")
@click.pass_context
def main(ctx: click.Context, offline: bool, data_dir: str, url: str, admin_token: str | None):
    ctx.obj = {
        "offline": offline,
        "data_dir": Path(data_dir),
        "url": url.rstrip("/"),
        "token": admin_token,
    }


def _service(ctx_obj: dict) -> ElectionService:
    return ElectionService(ctx_obj["data_dir"])


def _headers(ctx_obj: dict) -> dict:
    token = ctx_obj["token"]
    return {"Authorization": f"Bearer {token}"} if token else {}


def _fail_http(response: httpx.Response) -> None:
    try:
        body = response.json()
    except ValueError:
        body = {"error": "http_error", "detail": response.text}
    click.echo(f"error: {body.get('error')}: {body.get('detail', '')}", err=True)
    for violation in body.get("violations", []):
        click.echo(f"  {violation.get('code')}: {violation.get('subject') or ''} "
                   f"{violation.get('detail') or ''}".rstrip(), err=True)
    code = EXIT_TOO_LARGE if body.get("error") == "instance_too_large" else EXIT_DOMAIN
    sys.exit(code)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Election config JSON.")
@click.pass_obj
def create(obj: dict, config_path: str):
    """Create an election from a configuration file; prints its id."""
    try:
        text = Path(config_path).read_text("utf-8")
    except OSError as exc:
        click.echo(f"error: cannot read {config_path}: {exc}", err=True)
        sys.exit(EXIT_IO)

    if obj["offline"]:
        try:
            election_id = _service(obj).create_election(text)
        except (ConfigParseError, ValidationFailedError) as exc:
            click.echo(f"error: {exc.code}", err=True)
            for violation in getattr(exc, "violations", []):
                click.echo(f"  {violation}", err=True)
            sys.exit(EXIT_DOMAIN)
        except VotingError as exc:
            click.echo(f"error: {exc.code}: {exc}", err=True)
            sys.exit(EXIT_DOMAIN)
    else:
        try:
            document = json.loads(text)
        except ValueError as exc:
            click.echo(f"error: parse_error: {exc}", err=True)
            sys.exit(EXIT_DOMAIN)
        response = httpx.post(f"{obj['url']}/elections", json=document, headers=_headers(obj))
        if response.status_code != 201:
            _fail_http(response)
        election_id = response.json()["id"]
    click.echo(election_id)


@main.command()
@click.option("--election", "election_id", required=True)
@click.pass_obj
def close(obj: dict, election_id: str):
    """Close an election to further ballots."""
    if obj["offline"]:
        try:
            _service(obj).close_election(election_id)
        except VotingError as exc:
            click.echo(f"error: {exc.code}: {exc}", err=True)
            sys.exit(EXIT_DOMAIN)
    else:
        response = httpx.post(f"{obj['url']}/elections/{election_id}/close", headers=_headers(obj))
        if response.status_code != 200:
            _fail_http(response)
    click.echo(f"closed {election_id}")


@main.command()
@click.option("--election", "election_id", required=True)
@click.option("--rule", type=click.Choice(["greedy", "exact"]), default="greedy", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(), help="CSV output path.")
@click.pass_obj
def tally(obj: dict, election_id: str, rule: str, out_path: str):
    """Tally effective ballots and write the result CSV."""
    if obj["offline"]:
        try:
            result = _service(obj).tally_result(election_id, rule)
        except InstanceTooLargeError as exc:
            click.echo(f"error: {exc.code}: {exc}", err=True)
            sys.exit(EXIT_TOO_LARGE)
        except VotingError as exc:
            click.echo(f"error: {exc.code}: {exc}", err=True)
            sys.exit(EXIT_DOMAIN)
        csv_text = result_report(result)
    else:
        response = httpx.get(
            f"{obj['url']}/elections/{election_id}/tally",
            params={"rule": rule},
            headers=_headers(obj),
        )
        if response.status_code != 200:
            _fail_http(response)
        # rebuild the byte-stable report from the served scores
        body = response.json()
        election = httpx.get(f"{obj['url']}/elections/{election_id}")
        if election.status_code != 200:
            _fail_http(election)
        csv_text = _csv_from_wire(election.json(), body)

    try:
        Path(out_path).write_bytes(csv_text.encode("utf-8"))
    except OSError as exc:
        click.echo(f"error: cannot write {out_path}: {exc}", err=True)
        sys.exit(EXIT_IO)
    click.echo(f"wrote {out_path}")


def _csv_from_wire(election_view: dict, tally_body: dict) -> str:
    from .elections import Project
    from .tally import ScoreBoard, TallyResult

    projects = tuple(
        Project(id=p["id"], title=p["title"], cost=p["cost"], description=p.get("description"))
        for p in election_view["projects"]
    )
    result = TallyResult(
        scoreboard=ScoreBoard(scores=tally_body["scores"], ballot_count=tally_body["ballot_count"]),
        projects=projects,
        ordering=tuple(tally_body["ordering"]),
        winners=tuple(tally_body["winners"]),
        winners_cost=tally_body["winners_cost"],
        selection_rule=tally_body["selection_rule"],
    )
    return result_report(result)


@main.command("gen-ballots")
@click.option("--election", "election_id", required=True)
@click.option("--n", "count", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.pass_obj
def gen_ballots(obj: dict, election_id: str, count: int, seed: int):
    """Append synthetic valid ballots from a seeded generator (in-process)."""
    service = _service(obj)
    try:
        election = service.election(election_id)
        if not election.open:
            click.echo(f"error: election_closed: {election_id}", err=True)
            sys.exit(EXIT_DOMAIN)
        rng = random.Random(seed)
        for i in range(count):
            allocation = generate_allocation(election, rng)
            service.submit_allocation(election_id, f"synthetic-{seed}-{i:06d}", allocation)
    except VotingError as exc:
        click.echo(f"error: {exc.code}: {exc}", err=True)
        sys.exit(EXIT_DOMAIN)
    click.echo(f"appended {count} ballots to {election_id}")


if __name__ == "__main__":
    main()
