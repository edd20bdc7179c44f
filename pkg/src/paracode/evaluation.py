"""Metrics against gold labels and the per-manifesto report tables.

F1 is computed as 2*tp / (2*tp + fp + fn): algebraically the harmonic mean
2PR/(P+R), but evaluated with a single division so the result is the
correctly rounded true value and provably lies inside
[min(precision, recall), max(precision, recall)]. Undefined ratios (zero
denominators) report as 0.0 and are listed in the ``degenerate`` field
instead of aborting whole-corpus evaluation.

Display rendering rounds half-up to 2 decimals; internal values keep full
precision. Emission is deterministic: identical inputs yield byte-identical
reports.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Optional, Sequence

from .corpus import DIMENSIONS, Paragraph
from .errors import EmptyGroup, EmptyInput, LengthMismatch


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
            fn=self.fn + other.fn,
        )


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    dimension: Optional[str] = None
    role: Optional[str] = None
    label: str = "ensemble"
    degenerate: tuple[str, ...] = ()


@dataclass(frozen=True)
class ManifestoReport:
    year: int
    party: str
    ae_true_prop: float
    ae_pred_prop: float
    pc_true_prop: float
    pc_pred_prop: float
    f1_ae: float
    f1_pc: float
    paragraph_count: int


def confusion(gold: Sequence[int], pred: Sequence[int]) -> ConfusionMatrix:
    """Standard binary confusion counts over equal-length 0/1 sequences."""
    if len(gold) != len(pred):
        raise LengthMismatch(f"gold has {len(gold)} items, pred has {len(pred)}")
    if len(gold) == 0:
        raise EmptyInput("cannot build a confusion matrix from zero pairs")
    tp = fp = tn = fn = 0
    for g, p in zip(gold, pred):
        if g not in (0, 1) or p not in (0, 1):
            raise ValueError(f"labels must be 0/1, got gold={g!r} pred={p!r}")
        if g == 1 and p == 1:
            tp += 1
        elif g == 0 and p == 1:
            fp += 1
        elif g == 0 and p == 0:
            tn += 1
        else:
            fn += 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def metrics(cm: ConfusionMatrix, dimension: Optional[str] = None,
            role: Optional[str] = None, label: str = "ensemble") -> MetricReport:
    if cm.total == 0:
        raise EmptyInput("confusion matrix is empty")
    degenerate = []
    accuracy = (cm.tp + cm.tn) / cm.total

    if cm.tp + cm.fp > 0:
        precision = cm.tp / (cm.tp + cm.fp)
    else:
        precision = 0.0
        degenerate.append("precision")

    if cm.tp + cm.fn > 0:
        recall = cm.tp / (cm.tp + cm.fn)
    else:
        recall = 0.0
        degenerate.append("recall")

    if precision + recall > 0:
        f1 = 2 * cm.tp / (2 * cm.tp + cm.fp + cm.fn)
    else:
        f1 = 0.0
        degenerate.append("f1")

    return MetricReport(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        dimension=dimension,
        role=role,
        label=label,
        degenerate=tuple(degenerate),
    )


# ----------------------------------------------------------------------
# Per-manifesto aggregation
# ----------------------------------------------------------------------

def aggregate_manifesto(
    paragraphs: Sequence[Paragraph],
    decisions: Mapping[tuple[str, str], int],
) -> list[ManifestoReport]:
    """Group paragraphs by (year, party) and aggregate proportions and F1.

    ``decisions`` maps (para_id, dimension) to the ensemble 0/1 decision.
    Proportions use the full group size as denominator; paragraphs without
    a gold label in a dimension are excluded from that dimension's
    confusion counts but still count toward paragraph_count.
    """
    if not paragraphs:
        raise EmptyGroup("no paragraphs to aggregate")
    groups: dict[tuple[int, str], list[Paragraph]] = {}
    for p in paragraphs:
        groups.setdefault((p.year, p.party), []).append(p)

    reports = []
    for (year, party), members in sorted(groups.items()):
        count = len(members)
        props = {}
        f1s = {}
        for dimension in DIMENSIONS:
            gold_pos = 0
            pred_pos = 0
            pairs_gold = []
            pairs_pred = []
            for p in members:
                decision = decisions[(p.para_id, dimension)]
                gold = p.labels.get(dimension)
                pred_pos += decision
                if gold is not None:
                    gold_pos += gold
                    pairs_gold.append(gold)
                    pairs_pred.append(decision)
            props[dimension] = (gold_pos / count, pred_pos / count)
            if pairs_gold:
                f1s[dimension] = metrics(confusion(pairs_gold, pairs_pred)).f1
            else:
                f1s[dimension] = 0.0
        reports.append(
            ManifestoReport(
                year=year,
                party=party,
                ae_true_prop=props["ae"][0],
                ae_pred_prop=props["ae"][1],
                pc_true_prop=props["pc"][0],
                pc_pred_prop=props["pc"][1],
                f1_ae=f1s["ae"],
                f1_pc=f1s["pc"],
                paragraph_count=count,
            )
        )
    return reports


# ----------------------------------------------------------------------
# Report emission
# ----------------------------------------------------------------------

def round2(value: float) -> str:
    """Half-up rounding to two decimals for display."""
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))

MANIFESTO_COLUMNS = (
    "Year", "Party", "AE-True", "AE-Pred", "PC-True", "PC-Pred",
    "F1-AE", "F1-PC", "Paragraph Count",
)

_METRIC_NAMES = ("Accuracy", "F1", "Precision", "Recall")
_DIM_ORDER = ("ae", "pc")  # column order in the metric tables


def _manifesto_rows(reports: Sequence[ManifestoReport]) -> list[list[str]]:
    rows = []
    for r in sorted(reports, key=lambda r: (r.year, r.party)):
        rows.append([
            str(r.year), r.party,
            round2(r.ae_true_prop), round2(r.ae_pred_prop),
            round2(r.pc_true_prop), round2(r.pc_pred_prop),
            round2(r.f1_ae), round2(r.f1_pc),
            str(r.paragraph_count),
        ])
    return rows


def _metric_table(reports: Sequence[MetricReport]) -> tuple[list[str], list[list[str]]]:
    dims = [d for d in _DIM_ORDER if any(r.dimension == d for r in reports)]
    if not dims:
        dims = list(_DIM_ORDER)
    header = ["Model", "Role"]
    for d in dims:
        header.extend(f"{m} ({d.upper()})" for m in _METRIC_NAMES)

    grouped: dict[tuple[str, str], dict[str, MetricReport]] = {}
    order: list[tuple[str, str]] = []
    for r in reports:
        key = (r.label, r.role or "")
        if key not in grouped:
            grouped[key] = {}
            order.append(key)
        grouped[key][r.dimension or ""] = r

    rows = []
    for key in order:
        label, role = key
        row = [label, role]
        for d in dims:
            r = grouped[key].get(d)
            if r is None:
                row.extend([""] * len(_METRIC_NAMES))
            else:
                row.extend([round2(r.accuracy), round2(r.f1),
                            round2(r.precision), round2(r.recall)])
        rows.append(row)
    return header, rows


def _render_text(header: Sequence[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def _render_csv(header: Sequence[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _render_json(header: Sequence[str], rows: list[list[str]]) -> str:
    records = [dict(zip(header, row)) for row in rows]
    return json.dumps(records, indent=2, ensure_ascii=False) + "\n"


_RENDERERS = {"table-text": _render_text, "csv": _render_csv, "json": _render_json}


def emit_report(reports: Sequence[MetricReport] | Sequence[ManifestoReport],
                format: str = "table-text") -> str:
    """Render reports deterministically; empty input yields a header-only
    manifesto-shaped table."""
    if format not in _RENDERERS:
        raise ValueError(f"unknown report format {format!r}")
    items = list(reports)
    if items and isinstance(items[0], MetricReport):
        header, rows = _metric_table(items)
    else:
        header, rows = list(MANIFESTO_COLUMNS), _manifesto_rows(items)
    return _RENDERERS[format](header, rows)


def emit_figure_series(reports: Sequence[ManifestoReport], dimension: str) -> str:
    """CSV series of true vs predicted proportions by party (figure data)."""
    if dimension not in DIMENSIONS:
        raise ValueError(f"unknown dimension {dimension!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["party", "year", "true", "predicted"])
    for r in sorted(reports, key=lambda r: (r.year, r.party)):
        true_prop = r.ae_true_prop if dimension == "ae" else r.pc_true_prop
        pred_prop = r.ae_pred_prop if dimension == "ae" else r.pc_pred_prop
        writer.writerow([r.party, r.year, round2(true_prop), round2(pred_prop)])
    return buf.getvalue()
