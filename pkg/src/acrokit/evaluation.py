"""Macro-averaged precision/recall/F1 for acronym identification and disambiguation.

Both tasks report F1 as the harmonic mean of macro precision and macro
recall, not as the mean of per-class F1 scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .model import AdInstance, SpanKind, TokenSentence, extract_spans, normalize_long_form


class AlignmentError(ValueError):
    """Gold and predictions do not cover the same ids."""

    def __init__(self, message: str, missing: Sequence[str] = (), unknown: Sequence[str] = ()):
        self.missing = list(missing)
        self.unknown = list(unknown)
        super().__init__(message)


def harmonic(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def _rate(num: int, den: int) -> float:
    return num / den if den else 0.0


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values) if values else 0.0


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int
    predicted_count: int
    correct: int


@dataclass(frozen=True)
class EvalReport:
    per_class: Mapping[str, ClassScores]
    macro_precision: float
    macro_recall: float
    f1: float
    total_gold: int
    total_predicted: int
    total_correct: int
    task: str = ""

    @classmethod
    def from_counts(
        cls,
        counts: Mapping[str, tuple[int, int, int]],
        task: str,
        precision_classes: Sequence[str],
        recall_classes: Sequence[str],
    ) -> "EvalReport":
        """Build a report from ``class -> (correct, predicted, gold)``."""
        per_class = {}
        for c in sorted(counts):
            tp, npred, ngold = counts[c]
            p, r = _rate(tp, npred), _rate(tp, ngold)
            per_class[c] = ClassScores(p, r, harmonic(p, r), ngold, npred, tp)
        mp = _mean([per_class[c].precision for c in sorted(precision_classes)])
        mr = _mean([per_class[c].recall for c in sorted(recall_classes)])
        return cls(
            per_class,
            mp,
            mr,
            harmonic(mp, mr),
            sum(v[2] for v in counts.values()),
            sum(v[1] for v in counts.values()),
            sum(v[0] for v in counts.values()),
            task,
        )

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "precision": self.macro_precision,
            "recall": self.macro_recall,
            "f1": self.f1,
            "counts": {
                "gold": self.total_gold,
                "predicted": self.total_predicted,
                "correct": self.total_correct,
            },
            "per_class": {
                c: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                    "predicted": s.predicted_count,
                    "correct": s.correct,
                }
                for c, s in self.per_class.items()
            },
        }

    def row(self) -> tuple[str, str, str]:
        return tuple(f"{100 * v:.2f}" for v in (self.macro_precision, self.macro_recall, self.f1))

    def to_table(self, name: str = "System", per_class: bool = False) -> str:
        """Plain-text table with Precision, Recall, F1 as percentages."""
        rows = [(name, *self.row())]
        if per_class:
            for c, s in self.per_class.items():
                rows.append((f"  {c}", f"{100 * s.precision:.2f}", f"{100 * s.recall:.2f}", f"{100 * s.f1:.2f}"))
        width = max(len(r[0]) for r in rows + [("Team Name",)])
        lines = [f"{'Team Name':<{width}} | {'Precision':>9} {'Recall':>9} {'F1':>9}"]
        lines.append("-" * len(lines[0]))
        for r in rows:
            lines.append(f"{r[0]:<{width}} | {r[1]:>9} {r[2]:>9} {r[3]:>9}")
        return "\n".join(lines)


def _align(gold_ids: Sequence[str], pred_ids: Sequence[str]) -> None:
    gold_set, pred_set = set(gold_ids), set(pred_ids)
    missing = [i for i in gold_ids if i not in pred_set]
    unknown = [i for i in pred_ids if i not in gold_set]
    if missing or unknown:
        parts = []
        if missing:
            parts.append(f"{len(missing)} gold id(s) without prediction: {', '.join(missing[:10])}")
        if unknown:
            parts.append(f"{len(unknown)} prediction id(s) not in gold: {', '.join(unknown[:10])}")
        raise AlignmentError("; ".join(parts), missing, unknown)


AI_CLASSES = (SpanKind.SHORT.value, SpanKind.LONG.value)


def _span_set(s: TokenSentence) -> set[tuple[int, int, str]]:
    return {(sp.start, sp.end, sp.kind.value) for sp in extract_spans(s)}


def evaluate_ai(gold: Sequence[TokenSentence], pred: Sequence[TokenSentence]) -> EvalReport:
    """Exact-match span scoring, macro-averaged over short and long forms."""
    _align([s.id for s in gold], [s.id for s in pred])
    by_id = {s.id: s for s in pred}
    tallies = {c: [0, 0, 0] for c in AI_CLASSES}
    for g in gold:
        p = by_id[g.id]
        gs, ps = _span_set(g), _span_set(p)
        for span in ps:
            tallies[span[2]][1] += 1
            if span in gs:
                tallies[span[2]][0] += 1
        for span in gs:
            tallies[span[2]][2] += 1
    counts = {c: tuple(v) for c, v in tallies.items()}
    return EvalReport.from_counts(counts, "ai", AI_CLASSES, AI_CLASSES)


def evaluate_ad(gold: Sequence[AdInstance], pred: Mapping[str, str]) -> EvalReport:
    """Per-long-form scoring of AD predictions.

    Macro precision averages the classes predicted at least once; macro
    recall averages the classes with at least one gold instance.
    """
    _align([g.id for g in gold], list(pred))
    tallies: dict[str, list[int]] = {}
    for g in gold:
        if g.gold is None:
            raise ValueError(f"gold instance {g.id!r} has no label")
        gl, pl = normalize_long_form(g.gold), normalize_long_form(pred[g.id])
        tallies.setdefault(gl, [0, 0, 0])[2] += 1
        tallies.setdefault(pl, [0, 0, 0])[1] += 1
        if gl == pl:
            tallies[gl][0] += 1
    counts = {c: tuple(v) for c, v in tallies.items()}
    predicted = [c for c, v in counts.items() if v[1] > 0]
    supported = [c for c, v in counts.items() if v[2] > 0]
    return EvalReport.from_counts(counts, "ad", predicted, supported)


def oracle_evaluate(
    gold: Sequence[Union[TokenSentence, AdInstance]],
    pred: Union[Sequence[TokenSentence], Mapping[str, str]],
) -> EvalReport:
    """Naive re-computation of the metrics for cross-checking the scorers.

    Counts come from an explicit confusion table walked cell by cell, with
    its own BIO decoder and averaging; only the report type is shared.
    """
    if isinstance(pred, Mapping):
        return _oracle_ad(gold, pred)
    return _oracle_ai(gold, pred)


def _oracle_report(cells: dict, task: str, p_classes: list, r_classes: list) -> EvalReport:
    per_class = {}
    tot_tp = tot_pred = tot_gold = 0
    for c in sorted(cells):
        tp, npred, ngold = cells[c]
        p = tp / npred if npred > 0 else 0.0
        r = tp / ngold if ngold > 0 else 0.0
        f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
        per_class[c] = ClassScores(p, r, f, ngold, npred, tp)
        tot_tp, tot_pred, tot_gold = tot_tp + tp, tot_pred + npred, tot_gold + ngold
    ps = [per_class[c].precision for c in p_classes]
    rs = [per_class[c].recall for c in r_classes]
    mp = math.fsum(ps) / len(ps) if ps else 0.0
    mr = math.fsum(rs) / len(rs) if rs else 0.0
    f1 = 0.0 if mp + mr == 0 else 2 * mp * mr / (mp + mr)
    return EvalReport(per_class, mp, mr, f1, tot_gold, tot_pred, tot_tp, task)


def _oracle_pairs(gold_ids: list, pred_ids: list) -> None:
    for gid in gold_ids:
        if gid not in pred_ids:
            raise AlignmentError(f"missing prediction for {gid}", [gid])
    for pid in pred_ids:
        if pid not in gold_ids:
            raise AlignmentError(f"unknown prediction id {pid}", unknown=[pid])


def _decode(labels) -> list[tuple[int, int, str]]:
    # a span starts at every B- and runs over the following I- of its kind
    out = []
    n = len(labels)
    for i in range(n):
        v = labels[i].value
        if v.startswith("B-"):
            kind = v[2:]
            j = i + 1
            while j < n and labels[j].value == "I-" + kind:
                j += 1
            out.append((i, j, kind))
    return out


def _oracle_ai(gold: Sequence[TokenSentence], pred: Sequence[TokenSentence]) -> EvalReport:
    pred_by_id = {p.id: p for p in pred}
    _oracle_pairs({g.id for g in gold}, set(pred_by_id))
    cells = {}
    for cls in AI_CLASSES:
        tp = npred = ngold = 0
        for g in gold:
            gspans = [s for s in _decode(g.labels) if s[2] == cls]
            pspans = [s for s in _decode(pred_by_id[g.id].labels) if s[2] == cls]
            ngold += len(gspans)
            npred += len(pspans)
            for ps in pspans:
                for gs in gspans:
                    if ps == gs:
                        tp += 1
        cells[cls] = (tp, npred, ngold)
    return _oracle_report(cells, "ai", list(AI_CLASSES), list(AI_CLASSES))


def _oracle_ad(gold: Sequence[AdInstance], pred: Mapping[str, str]) -> EvalReport:
    _oracle_pairs({g.id for g in gold}, set(pred))
    classes = sorted({normalize_long_form(g.gold) for g in gold} | {normalize_long_form(v) for v in pred.values()})
    confusion = {(gc, pc): 0 for gc in classes for pc in classes}
    for g in gold:
        confusion[(normalize_long_form(g.gold), normalize_long_form(pred[g.id]))] += 1
    cells = {}
    for c in classes:
        tp = confusion[(c, c)]
        npred = 0
        ngold = 0
        for other in classes:
            npred += confusion[(other, c)]
            ngold += confusion[(c, other)]
        cells[c] = (tp, npred, ngold)
    p_classes = [c for c in classes if cells[c][1] > 0]
    r_classes = [c for c in classes if cells[c][2] > 0]
    return _oracle_report(cells, "ad", p_classes, r_classes)
