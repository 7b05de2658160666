"""Confusion matrix and precision / recall / accuracy / F1.

The positive class is 1 (a DRC violation). Ratios with a zero denominator
are reported as ``None`` and rendered as ``n/a``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InputError

UNDEFINED = "n/a"


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        for k in ("tp", "fp", "fn", "tn"):
            if getattr(self, k) < 0:
                raise InputError(f"{k} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def f1_from(precision: float | None, recall: float | None) -> float | None:
    """Harmonic mean of precision and recall; ``None`` if either is undefined or both are 0."""
    if precision is None or recall is None or precision + recall == 0:
        return None
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class EvalReport:
    matrix: ConfusionMatrix
    precision: float | None
    recall: float | None
    accuracy: float | None
    f1: float | None

    def to_dict(self) -> dict:
        d = asdict(self.matrix)
        d.update(
            precision=self.precision, recall=self.recall, accuracy=self.accuracy, f1=self.f1
        )
        return d

    def render(self) -> str:
        m = self.matrix
        lines = [
            "               pred 1   pred 0",
            f"  actual 1  {m.tp:>8d} {m.fn:>8d}",
            f"  actual 0  {m.fp:>8d} {m.tn:>8d}",
            "",
        ]
        for name in ("precision", "recall", "accuracy", "f1"):
            v = getattr(self, name)
            txt = UNDEFINED if v is None else f"{100.0 * v:.2f}%"
            lines.append(f"  {name:<10s}{txt:>10s}")
        return "\n".join(lines)


def confusion(labels, preds) -> ConfusionMatrix:
    y = np.asarray(labels)
    p = np.asarray(preds)
    if y.ndim != 1 or p.ndim != 1:
        raise InputError("labels and predictions must be 1-D")
    if y.size != p.size:
        raise InputError(f"length mismatch: {y.size} labels vs {p.size} predictions")
    if y.size == 0:
        raise InputError("cannot build a confusion matrix from no samples")
    if not (np.isin(y, (0, 1)).all() and np.isin(p, (0, 1)).all()):
        raise InputError("labels and predictions must be 0 or 1")
    y = y.astype(bool)
    p = p.astype(bool)
    return ConfusionMatrix(
        tp=int(np.sum(y & p)),
        fp=int(np.sum(~y & p)),
        fn=int(np.sum(y & ~p)),
        tn=int(np.sum(~y & ~p)),
    )


def report(m: ConfusionMatrix) -> EvalReport:
    precision = _ratio(m.tp, m.tp + m.fp)
    recall = _ratio(m.tp, m.tp + m.fn)
    return EvalReport(
        matrix=m,
        precision=precision,
        recall=recall,
        accuracy=_ratio(m.tp + m.tn, m.total),
        f1=f1_from(precision, recall),
    )


def evaluate(labels, preds) -> EvalReport:
    return report(confusion(labels, preds))
