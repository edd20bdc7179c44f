"""Persistence for review sessions and verdicts.

A single directory holds an append-only JSON-lines journal plus a periodic
snapshot. Every mutation is appended to the journal and fsynced *before*
the in-memory state updates and the caller is acknowledged, so a crash
between persistence and acknowledgment can lose at most an unacknowledged
write. Recovery loads the snapshot (if any) and replays the journal tail.

All mutations serialize through one writer lock; reads return plain data
copies so concurrent readers see consistent snapshots.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

from .corpus import DIMENSIONS, paragraph_to_row, read_corpus
from .errors import (
    BadCursor,
    MalformedSubmission,
    UnknownParagraph,
    UnknownSession,
)

SNAPSHOT_EVERY = 256  # journal records between automatic snapshots

PROVENANCE_GOLD = "gold"
PROVENANCE_HUMAN = "human-verified"
PROVENANCE_MODEL = "model-unverified"


@dataclass(frozen=True)
class Verdict:
    verdict_id: str
    para_id: str
    dimension: str
    human_decision: str  # "accept" | "reject"
    coder_id: str
    timestamp: str  # UTC ISO-8601
    model_decision_at_time: int


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


class ReviewStore:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._journal_path = self.directory / "journal.jsonl"
        self._snapshot_path = self.directory / "snapshot.json"
        self._lock = threading.Lock()
        self._journal_fh = None
        self._journal_lines = 0
        self._since_snapshot = 0
        # test hook: invoked after the journal write, before the in-memory
        # apply, to simulate a crash at the durability boundary
        self.after_journal_write: Optional[Callable[[dict], None]] = None
        self._state: dict = {"sessions": {}, "verdicts": {}}
        self._recover()

    # -- persistence ----------------------------------------------------

    def _recover(self):
        offset = 0
        if self._snapshot_path.exists():
            snapshot = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
            self._state = snapshot["state"]
            offset = snapshot["journal_lines"]
        seen = 0
        if self._journal_path.exists():
            with self._journal_path.open("r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh):
                    seen = lineno + 1
                    if lineno < offset:
                        continue
                    line = line.strip()
                    if line:
                        self._apply(json.loads(line))
        self._journal_lines = max(seen, offset)
        self._journal_fh = self._journal_path.open("a", encoding="utf-8")

    def _append(self, record: dict):
        """Write-ahead: journal line hits disk before state mutates."""
        self._journal_fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        self._journal_fh.flush()
        os.fsync(self._journal_fh.fileno())
        self._journal_lines += 1
        if self.after_journal_write is not None:
            self.after_journal_write(record)
        self._apply(record)
        self._since_snapshot += 1
        if self._since_snapshot >= SNAPSHOT_EVERY:
            self._write_snapshot()

    def _apply(self, record: dict):
        kind = record["type"]
        if kind == "session":
            data = record["data"]
            self._state["sessions"][data["session_id"]] = data
            self._state["verdicts"].setdefault(data["session_id"], {})
        elif kind == "verdict":
            data = record["data"]
            self._state["verdicts"].setdefault(data["session_id"], {})[
                data["key"]
            ] = data["verdict"]
        else:
            raise ValueError(f"unknown journal record type {kind!r}")

    def _write_snapshot(self):
        tmp = self._snapshot_path.with_suffix(".tmp")
        payload = {"journal_lines": self._journal_lines, "state": self._state}
        tmp.write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")
        os.replace(tmp, self._snapshot_path)
        self._since_snapshot = 0

    def close(self):
        with self._lock:
            if self._journal_fh is not None:
                self._write_snapshot()
                self._journal_fh.close()
                self._journal_fh = None

    # -- sessions -------------------------------------------------------

    def create_session(
        self,
        queue: list[dict],
        corpus_path: str,
        threshold: int,
        session_id: str | None = None,
    ) -> dict:
        """Open a review session over a shortlist snapshot.

        ``queue`` entries carry para_id, dimension, votes, scores, text and
        document context; they are stored verbatim so later corpus edits
        cannot skew an open session.
        """
        session = {
            "session_id": session_id or f"sess-{uuid.uuid4().hex[:12]}",
            "created_at": _utc_now(),
            "corpus_path": str(corpus_path),
            "threshold": threshold,
            "queue": queue,
        }
        with self._lock:
            self._append({"type": "session", "data": session})
        return session

    def get_session(self, session_id: str) -> dict:
        session = self._state["sessions"].get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    def list_sessions(self) -> list[str]:
        return sorted(self._state["sessions"])

    # -- shortlist paging -----------------------------------------------

    def shortlist_page(
        self,
        session_id: str,
        dimension: str | None = None,
        cursor: str | None = None,
        limit: int = 20,
        coder_id: str | None = None,
    ) -> dict:
        session = self.get_session(session_id)
        if dimension is not None and dimension not in DIMENSIONS:
            raise MalformedSubmission(f"unknown dimension {dimension!r}")
        items = [
            e for e in session["queue"]
            if dimension is None or e["dimension"] == dimension
        ]
        try:
            offset = int(cursor) if cursor not in (None, "") else 0
        except ValueError:
            raise BadCursor(f"cursor must be an integer, got {cursor!r}") from None
        if offset < 0 or offset > len(items):
            raise BadCursor(f"cursor {offset} out of range 0..{len(items)}")
        if limit < 1:
            raise MalformedSubmission("limit must be >= 1")

        page = []
        for entry in items[offset:offset + limit]:
            enriched = dict(entry)
            enriched["verdict"] = self._verdict_payload(
                session_id, entry["para_id"], entry["dimension"], coder_id
            )
            page.append(enriched)
        next_offset = offset + limit
        return {
            "items": page,
            "total": len(items),
            "next_cursor": str(next_offset) if next_offset < len(items) else None,
        }

    # -- verdicts -------------------------------------------------------

    @staticmethod
    def _verdict_key(para_id: str, dimension: str, coder_id: str) -> str:
        return f"{para_id}|{dimension}|{coder_id}"

    def _verdict_payload(self, session_id, para_id, dimension, coder_id=None):
        verdicts = self._state["verdicts"].get(session_id, {})
        matching = [
            v for v in verdicts.values()
            if v["para_id"] == para_id and v["dimension"] == dimension
            and (coder_id is None or v["coder_id"] == coder_id)
        ]
        if not matching:
            return None
        return max(matching, key=lambda v: v["timestamp"])

    def submit_verdict(
        self,
        session_id: str,
        para_id: str,
        dimension: str,
        human_decision: str,
        coder_id: str,
    ) -> Verdict:
        """Record one verdict. Resubmission by the same coder overwrites
        (last-write-wins) and is acknowledged only after the journal write."""
        session = self.get_session(session_id)
        if human_decision not in ("accept", "reject"):
            raise MalformedSubmission(
                f"human_decision must be accept or reject, got {human_decision!r}"
            )
        if dimension not in DIMENSIONS:
            raise MalformedSubmission(f"unknown dimension {dimension!r}")
        if not coder_id:
            raise MalformedSubmission("coder_id must be non-empty")
        entry = next(
            (e for e in session["queue"]
             if e["para_id"] == para_id and e["dimension"] == dimension),
            None,
        )
        if entry is None:
            raise UnknownParagraph(
                f"paragraph {para_id!r}/{dimension} is not in session {session_id!r}"
            )

        key = self._verdict_key(para_id, dimension, coder_id)
        verdict = Verdict(
            verdict_id=key,
            para_id=para_id,
            dimension=dimension,
            human_decision=human_decision,
            coder_id=coder_id,
            timestamp=_utc_now(),
            model_decision_at_time=int(entry["model_decision"]),
        )
        with self._lock:
            self._append({
                "type": "verdict",
                "data": {"session_id": session_id, "key": key, "verdict": asdict(verdict)},
            })
        return verdict

    def progress(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        verdicts = self._state["verdicts"].get(session_id, {})
        reviewed_pairs = {(v["para_id"], v["dimension"]) for v in verdicts.values()}
        out = {}
        for dimension in DIMENSIONS:
            queue_pairs = {
                (e["para_id"], e["dimension"])
                for e in session["queue"]
                if e["dimension"] == dimension
            }
            out[dimension] = {
                "total": len(queue_pairs),
                "reviewed": len(queue_pairs & reviewed_pairs),
            }
        return out

    # -- corrected-corpus export ----------------------------------------

    def export_corrected(self, session_id: str) -> list[dict]:
        """Corpus rows with review outcomes applied.

        Reviewed queue items take the human verdict (accept keeps the model
        decision, reject flips it); unreviewed *flagged* items take the
        model decision with model-unverified provenance; everything else
        keeps its gold labels. Row provenance is the strongest source that
        touched the row: human-verified > model-unverified > gold. When
        several coders reviewed one item the latest verdict wins.
        """
        session = self.get_session(session_id)
        corpus = read_corpus(session["corpus_path"])
        rows = []
        rank = {PROVENANCE_GOLD: 0, PROVENANCE_MODEL: 1, PROVENANCE_HUMAN: 2}
        queue_by_para: dict[str, list[dict]] = {}
        for entry in session["queue"]:
            queue_by_para.setdefault(entry["para_id"], []).append(entry)

        for paragraph in corpus.paragraphs():
            row = paragraph_to_row(paragraph)
            provenance = PROVENANCE_GOLD
            for entry in queue_by_para.get(paragraph.para_id, ()):
                dimension = entry["dimension"]
                model_decision = int(entry["model_decision"])
                verdict = self._verdict_payload(session_id, paragraph.para_id, dimension)
                if verdict is not None:
                    if verdict["human_decision"] == "accept":
                        row[dimension] = model_decision
                    else:
                        row[dimension] = 1 - model_decision
                    source = PROVENANCE_HUMAN
                elif not entry.get("near_miss", False):
                    row[dimension] = model_decision
                    source = PROVENANCE_MODEL
                else:
                    continue  # unreviewed near-miss keeps gold
                if rank[source] > rank[provenance]:
                    provenance = source
            row["provenance"] = provenance
            rows.append(row)
        return rows

    def write_export(self, session_id: str, path: str | Path) -> int:
        rows = self.export_corrected(session_id)
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
        os.replace(tmp, path)
        return len(rows)
