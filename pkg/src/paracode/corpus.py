"""Corpus ingestion: cleaning, paragraph segmentation, labels, and dataset roles.

Documents arrive as UTF-8 plain text. Cleaning strips heading- and
table-like lines (heuristic, configurable), segmentation splits on blank
lines, and each resulting paragraph becomes the atomic coding unit with an
optional gold label per dimension (people-centrism ``pc`` and anti-elitism
``ae``). A corpus stores paragraphs uniquely per ``(doc_id, index)`` and
partitions them into train / test / holdout roles.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .errors import (
    DuplicateDocId,
    EmptyDocument,
    LabelIndexOutOfRange,
    UnknownDocId,
)

DIMENSIONS = ("pc", "ae")

PARA_INDEX_PAD = 4  # para_id = "<doc_id>#<index zero-padded to 4>"


class Register(str, Enum):
    manifesto = "manifesto"
    speech = "speech"
    other = "other"


class DatasetRole(str, Enum):
    train = "train"
    test = "test"
    holdout = "holdout"


@dataclass(frozen=True)
class LabelSet:
    """Tri-state gold labels: 1 (positive), 0 (negative), None (unlabeled).

    The two dimensions are independent; any combination is legal.
    """

    pc: Optional[int] = None
    ae: Optional[int] = None

    def __post_init__(self):
        for name in DIMENSIONS:
            v = getattr(self, name)
            if v not in (0, 1, None):
                raise ValueError(f"label {name} must be 0, 1 or None, got {v!r}")

    def get(self, dimension: str) -> Optional[int]:
        if dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension {dimension!r}")
        return getattr(self, dimension)


@dataclass(frozen=True)
class Document:
    doc_id: str
    party: str
    year: int
    register: Register
    source_language: str  # IETF tag, e.g. "en" or "lt"
    raw_text: str

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        if not self.raw_text:
            raise ValueError("raw_text must be non-empty")
        if not 1900 <= self.year <= 2100:
            raise ValueError(f"year {self.year} outside [1900, 2100]")


@dataclass(frozen=True)
class Paragraph:
    para_id: str
    doc_id: str
    index: int
    text: str
    labels: LabelSet = field(default_factory=LabelSet)
    party: str = ""
    year: int = 1900
    register: Register = Register.other
    role: Optional[DatasetRole] = None
    provenance: Optional[str] = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("paragraph text must be non-empty after trimming")
        if self.index < 0:
            raise ValueError("paragraph index must be >= 0")


def make_para_id(doc_id: str, index: int) -> str:
    return f"{doc_id}#{index:0{PARA_INDEX_PAD}d}"


# ----------------------------------------------------------------------
# Segmentation and cleaning
# ----------------------------------------------------------------------

def split_paragraphs(raw_text: str) -> list[str]:
    """Split text into paragraphs on blank lines.

    CRLF is normalized to LF first, then the text is split on the
    two-character sequence "\\n\\n". Each piece is trimmed of surrounding
    whitespace and empty pieces are dropped; order is preserved.
    """
    normalized = raw_text.replace("\r\n", "\n")
    pieces = (p.strip() for p in normalized.split("\n\n"))
    return [p for p in pieces if p]


@dataclass(frozen=True)
class CleaningConfig:
    """Heuristics for dropping non-prose lines before segmentation.

    A line counts as a heading when it is short (``max_heading_len``) and
    either consists entirely of upper-case letters (plus digits and
    punctuation) or starts with a numbered-outline prefix such as "1.",
    "1.2", "II." or "A)". A line counts as table-like when it contains two
    or more column separators (a tab, or a run of two or more spaces).
    """

    remove_headings: bool = True
    remove_tables: bool = True
    max_heading_len: int = 60


_OUTLINE_PREFIX = re.compile(r"^\s*(?:\d+(?:\.\d+)*|[IVXLCDM]+|[A-Z])[.)]\s+\S")
_COLUMN_SEP = re.compile(r"\t| {2,}")


def _is_heading(line: str, cfg: CleaningConfig) -> bool:
    stripped = line.strip()
    if not stripped or len(stripped) > cfg.max_heading_len:
        return False
    letters = [c for c in stripped if c.isalpha()]
    if letters and all(c.isupper() for c in letters):
        return True
    return bool(_OUTLINE_PREFIX.match(stripped))


def _is_table_line(line: str) -> bool:
    return len(_COLUMN_SEP.findall(line.strip())) >= 2


def clean_document(raw_text: str, rules: CleaningConfig | None = None) -> str:
    """Drop heading- and table-like lines, preserving paragraph boundaries.

    Removed lines leave no residue: runs of three or more newlines collapse
    back to a single paragraph break and the result is stripped, so cleaning
    never manufactures empty paragraphs.
    """
    cfg = rules or CleaningConfig()
    normalized = raw_text.replace("\r\n", "\n")
    kept = []
    for line in normalized.split("\n"):
        if cfg.remove_headings and _is_heading(line, cfg):
            continue
        if cfg.remove_tables and _is_table_line(line):
            continue
        kept.append(line)
    text = "\n".join(kept)
    text = re.sub(r"\n{3,}", "\n\n", text)
    return text.strip()


# ----------------------------------------------------------------------
# Label records and ingestion
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LabelRecord:
    """External gold-label row joined to a paragraph by (doc_id, index)."""

    doc_id: str
    index: int
    pc: Optional[int] = None
    ae: Optional[int] = None


def ingest_document(
    document: Document,
    labels: Iterable[LabelRecord] = (),
    cleaning: CleaningConfig | None = None,
) -> list[Paragraph]:
    """Clean, segment and label one document.

    Labels are joined by (doc_id, index); a label pointing at a
    non-existent paragraph index raises :class:`LabelIndexOutOfRange`.
    A document that segments into zero paragraphs raises
    :class:`EmptyDocument`.
    """
    cleaned = clean_document(document.raw_text, cleaning)
    texts = split_paragraphs(cleaned)
    if not texts:
        raise EmptyDocument(f"document {document.doc_id!r} has no paragraphs after cleaning")

    by_index: dict[int, LabelRecord] = {}
    for rec in labels:
        if rec.doc_id != document.doc_id:
            continue
        if not 0 <= rec.index < len(texts):
            raise LabelIndexOutOfRange(
                f"label for {document.doc_id!r} index {rec.index} out of range "
                f"(document has {len(texts)} paragraphs)"
            )
        by_index[rec.index] = rec

    paragraphs = []
    for i, text in enumerate(texts):
        rec = by_index.get(i)
        labelset = LabelSet(pc=rec.pc, ae=rec.ae) if rec else LabelSet()
        paragraphs.append(
            Paragraph(
                para_id=make_para_id(document.doc_id, i),
                doc_id=document.doc_id,
                index=i,
                text=text,
                labels=labelset,
                party=document.party,
                year=document.year,
                register=document.register,
            )
        )
    return paragraphs


# ----------------------------------------------------------------------
# Corpus store
# ----------------------------------------------------------------------

class Corpus:
    """In-memory paragraph store with unique doc ids and role partitions.

    Ingestion of distinct documents may run concurrently; all writes go
    through one lock so readers always see consistent snapshots.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._doc_ids: set[str] = set()
        self._paragraphs: dict[str, Paragraph] = {}

    def __len__(self) -> int:
        return len(self._paragraphs)

    def __iter__(self) -> Iterator[Paragraph]:
        return iter(self.paragraphs())

    @property
    def doc_ids(self) -> set[str]:
        return set(self._doc_ids)

    def paragraphs(self, role: DatasetRole | str | None = None) -> list[Paragraph]:
        """All paragraphs in (doc_id, index) order, optionally one role only."""
        items = sorted(self._paragraphs.values(), key=lambda p: (p.doc_id, p.index))
        if role is None:
            return items
        role = DatasetRole(role)
        return [p for p in items if p.role == role]

    def get(self, para_id: str) -> Paragraph:
        return self._paragraphs[para_id]

    def add_document(
        self,
        document: Document,
        labels: Iterable[LabelRecord] = (),
        cleaning: CleaningConfig | None = None,
    ) -> list[Paragraph]:
        paragraphs = ingest_document(document, labels, cleaning)
        with self._lock:
            if document.doc_id in self._doc_ids:
                raise DuplicateDocId(f"document {document.doc_id!r} already ingested")
            self._doc_ids.add(document.doc_id)
            for p in paragraphs:
                self._paragraphs[p.para_id] = p
        return paragraphs

    def add_paragraphs(self, paragraphs: Iterable[Paragraph]):
        """Bulk-load already-built paragraphs (e.g. from a corpus file)."""
        with self._lock:
            staged = list(paragraphs)
            for p in staged:
                if p.para_id in self._paragraphs:
                    raise DuplicateDocId(f"paragraph {p.para_id!r} already present")
            for p in staged:
                self._doc_ids.add(p.doc_id)
                self._paragraphs[p.para_id] = p

    def assign_roles(self, role_map: dict[str, DatasetRole | str]) -> dict[str, int]:
        """Assign each mapped document's paragraphs to a dataset role.

        Returns paragraph counts per role. Unknown doc ids raise; documents
        absent from the map keep their current role.
        """
        unknown = set(role_map) - self._doc_ids
        if unknown:
            raise UnknownDocId(f"role map references unknown documents: {sorted(unknown)}")
        resolved = {d: DatasetRole(r) for d, r in role_map.items()}
        with self._lock:
            for para_id, p in list(self._paragraphs.items()):
                if p.doc_id in resolved:
                    self._paragraphs[para_id] = replace(p, role=resolved[p.doc_id])
        counts = {r.value: 0 for r in DatasetRole}
        for p in self._paragraphs.values():
            if p.role is not None:
                counts[p.role.value] += 1
        return counts

    def partitions(self) -> dict[str, list[Paragraph]]:
        out: dict[str, list[Paragraph]] = {r.value: [] for r in DatasetRole}
        for p in self.paragraphs():
            if p.role is not None:
                out[p.role.value].append(p)
        return out


# ----------------------------------------------------------------------
# JSON-lines corpus file
# ----------------------------------------------------------------------

def paragraph_to_row(p: Paragraph) -> dict:
    row = {
        "para_id": p.para_id,
        "doc_id": p.doc_id,
        "index": p.index,
        "text": p.text,
        "party": p.party,
        "year": p.year,
        "register": p.register.value,
        "pc": p.labels.pc,
        "ae": p.labels.ae,
        "role": p.role.value if p.role else None,
    }
    if p.provenance is not None:
        row["provenance"] = p.provenance
    return row


def row_to_paragraph(row: dict) -> Paragraph:
    return Paragraph(
        para_id=row["para_id"],
        doc_id=row["doc_id"],
        index=int(row["index"]),
        text=row["text"],
        labels=LabelSet(pc=row.get("pc"), ae=row.get("ae")),
        party=row.get("party", ""),
        year=int(row.get("year", 1900)),
        register=Register(row.get("register", "other")),
        role=DatasetRole(row["role"]) if row.get("role") else None,
        provenance=row.get("provenance"),
    )


def write_corpus(paragraphs: Iterable[Paragraph], path: str | Path):
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for p in paragraphs:
            fh.write(json.dumps(paragraph_to_row(p), ensure_ascii=False) + "\n")


def read_corpus(path: str | Path) -> Corpus:
    corpus = Corpus()
    rows = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(row_to_paragraph(json.loads(line)))
    corpus.add_paragraphs(rows)
    return corpus


def read_label_records(path: str | Path) -> list[LabelRecord]:
    """Load gold labels from a JSON-lines file of {doc_id, index, pc, ae}."""
    records = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            records.append(
                LabelRecord(
                    doc_id=row["doc_id"],
                    index=int(row["index"]),
                    pc=row.get("pc"),
                    ae=row.get("ae"),
                )
            )
    return records
