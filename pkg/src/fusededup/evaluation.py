"""Pair-level precision / recall / F1.

Conventions for empty denominators: precision is 1.0 when nothing was
predicted, recall is 1.0 when there is nothing to find, and F1 is 0.0 when
precision + recall is 0.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Iterable

from .errors import ValidationError
from .records import GroundTruth

Pair = tuple[int, int]


@dataclass(frozen=True)
class EvalReport:
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f1: float

    def to_json(self) -> str:
        return json.dumps({
            "tp": self.true_positives,
            "fp": self.false_positives,
            "fn": self.false_negatives,
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f1": round(self.f1, 6),
        })

    def to_table(self, label: str = "model") -> str:
        return "\n".join([
            f"{'':<10}{label:>12}",
            f"{'Precision':<10}{self.precision:>12.4f}",
            f"{'Recall':<10}{self.recall:>12.4f}",
            f"{'F1 Score':<10}{self.f1:>12.4f}",
            f"{'TP/FP/FN':<10}{f'{self.true_positives}/{self.false_positives}/{self.false_negatives}':>12}",
        ])

    def as_dict(self) -> dict:
        return asdict(self)


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _canonical(pairs: Iterable[Pair]) -> set[Pair]:
    return {(min(i, j), max(i, j)) for i, j in pairs}


def confusion_report(tp: int, fp: int, fn: int) -> EvalReport:
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return EvalReport(tp, fp, fn, precision, recall, f1_score(precision, recall))


def evaluate(predicted: Iterable[Pair], truth: GroundTruth | Iterable[Pair], n_records: int | None = None) -> EvalReport:
    """Compare predicted duplicate pairs with the true pair set.

    ``truth`` is either a ``GroundTruth`` or an explicit pair set; in the
    latter case pass ``n_records`` to enable range validation.
    """
    if isinstance(truth, GroundTruth):
        true_pairs = truth.true_pairs()
        n_records = len(truth.entity_of) if n_records is None else n_records
    else:
        true_pairs = _canonical(truth)
    pred = _canonical(predicted)
    if n_records is not None:
        for i, j in pred:
            if i < 0 or j >= n_records or i == j:
                raise ValidationError(f"predicted pair ({i}, {j}) is outside the {n_records}-record dataset")
    tp = len(pred & true_pairs)
    return confusion_report(tp, len(pred) - tp, len(true_pairs) - tp)
