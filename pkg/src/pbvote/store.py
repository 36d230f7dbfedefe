"""Durable append-only ballot log, one file per election.

Record format, one per line:

    <sequence>,<crc32 hex>,<JSON payload>

The checksum covers the payload bytes, so a torn final write is detected
and discarded on replay; a damaged record anywhere else is corruption and
replay refuses the log. Revoting is allowed: the latest record per voter
is the effective ballot.
"""

from __future__ import annotations

import json
import logging
import os
import zlib
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .ballots import Allocation, allocation_from_wire, allocation_to_wire, validate_ballot
from .elections import ElectionConfig
from .errors import (
    CorruptLogError,
    ElectionClosedError,
    StorageFailureError,
    UnknownElectionError,
    ValidationFailedError,
)

logger = logging.getLogger(__name__)

LOG_SUFFIX = ".votes.log"


@dataclass(frozen=True)
class VoteRecord:
    """One submitted ballot as persisted; ``sequence`` is store-assigned and
    strictly increasing within an election."""

    election_id: str
    voter_id: str
    allocation: Allocation
    sequence: int
    submitted_at: str


class VoteStore:
    """Append-only vote persistence under a data directory.

    A single writer per election is assumed (the service serializes
    appends); records are flushed and fsynced before a submission is
    acknowledged.
    """

    def __init__(self, data_dir: str | Path):
        self._dir = Path(data_dir)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._records: dict[str, list[VoteRecord]] = {}
        for path in sorted(self._dir.glob(f"*{LOG_SUFFIX}")):
            election_id = path.name[: -len(LOG_SUFFIX)]
            self._records[election_id] = self._read_log(election_id)

    def open_log(self, election_id: str) -> None:
        """Register an election with the store, creating its empty log."""
        if election_id in self._records:
            return
        self._log_path(election_id).touch()
        self._records[election_id] = []

    def knows(self, election_id: str) -> bool:
        return election_id in self._records

    def append_vote(
        self,
        election: ElectionConfig,
        voter_id: str,
        allocation: Allocation,
    ) -> VoteRecord:
        """Validate and durably append one ballot, returning the new record.

        Raises:
            ElectionClosedError: the election is not open.
            ValidationFailedError: the ballot fails ``validate_ballot``.
            StorageFailureError: the record could not be persisted.
        """
        if not election.open:
            raise ElectionClosedError(election.id)
        violations = validate_ballot(election.method_spec, allocation, election)
        if violations:
            raise ValidationFailedError(violations)

        self.open_log(election.id)
        records = self._records[election.id]
        record = VoteRecord(
            election_id=election.id,
            voter_id=voter_id,
            allocation=allocation,
            sequence=len(records),
            submitted_at=datetime.now(timezone.utc).isoformat(),
        )
        try:
            with open(self._log_path(election.id), "ab") as fh:
                fh.write(_encode_record(record))
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageFailureError(str(exc)) from exc
        records.append(record)
        return record

    def records(self, election_id: str) -> list[VoteRecord]:
        """All records in append order."""
        self._require_known(election_id)
        return list(self._records[election_id])

    def effective_ballots(self, election_id: str) -> list[Allocation]:
        """Latest allocation per voter, ordered by ascending voter id."""
        self._require_known(election_id)
        latest: dict[str, Allocation] = {}
        for record in self._records[election_id]:
            latest[record.voter_id] = record.allocation
        return [latest[voter] for voter in sorted(latest)]

    def replay(self, election_id: str) -> None:
        """Rebuild in-memory state from the log on disk.

        A torn final record is discarded with a warning; a damaged record
        anywhere before the end raises CorruptLogError.
        """
        self._require_known(election_id)
        self._records[election_id] = self._read_log(election_id)

    def _require_known(self, election_id: str) -> None:
        if election_id not in self._records:
            raise UnknownElectionError(election_id)

    def _log_path(self, election_id: str) -> Path:
        return self._dir / f"{election_id}{LOG_SUFFIX}"

    def _read_log(self, election_id: str) -> list[VoteRecord]:
        raw = self._log_path(election_id).read_bytes()
        if not raw:
            return []
        lines = raw.split(b"\n")
        torn_tail = lines[-1]  # complete logs end with LF, leaving b"" here
        lines = lines[:-1]

        records: list[VoteRecord] = []
        for index, line in enumerate(lines):
            final = index == len(lines) - 1 and not torn_tail
            try:
                records.append(_decode_record(election_id, line, expected_seq=index))
            except CorruptLogError:
                if final:
                    logger.warning(
                        "discarding torn final record %d in %s", index, election_id
                    )
                    break
                raise
        if torn_tail:
            logger.warning(
                "discarding unterminated final record in %s", election_id
            )
        return records


def _encode_record(record: VoteRecord) -> bytes:
    payload = json.dumps(
        {
            "voter_id": record.voter_id,
            "submitted_at": record.submitted_at,
            "allocation": allocation_to_wire(record.allocation),
        },
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    ).encode("utf-8")
    checksum = zlib.crc32(payload)
    return b"%d,%08x," % (record.sequence, checksum) + payload + b"\n"


def _decode_record(election_id: str, line: bytes, expected_seq: int) -> VoteRecord:
    parts = line.split(b",", 2)
    if len(parts) != 3:
        raise CorruptLogError(f"record {expected_seq}: malformed line")
    seq_raw, checksum_raw, payload = parts
    try:
        sequence = int(seq_raw)
        checksum = int(checksum_raw, 16)
    except ValueError as exc:
        raise CorruptLogError(f"record {expected_seq}: bad header") from exc
    if sequence != expected_seq:
        raise CorruptLogError(f"record {expected_seq}: sequence gap (got {sequence})")
    if zlib.crc32(payload) != checksum:
        raise CorruptLogError(f"record {expected_seq}: checksum mismatch")
    try:
        data = json.loads(payload.decode("utf-8"))
        allocation = allocation_from_wire(data["allocation"])
        return VoteRecord(
            election_id=election_id,
            voter_id=str(data["voter_id"]),
            allocation=allocation,
            sequence=sequence,
            submitted_at=str(data.get("submitted_at", "")),
        )
    except CorruptLogError:
        raise
    except Exception as exc:  # payload passed the checksum but is not ours
        raise CorruptLogError(f"record {expected_seq}: bad payload ({exc})") from exc
