"""Pick the log-density threshold on labeled validation data.

Every distinct confusion matrix reachable by a threshold is represented by
one candidate (midpoints between consecutive distinct scores plus one point
beyond each end), so an exhaustive sweep over candidates is exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import kernels
from .dataset import Dataset
from .density import DensityModel, score
from .errors import DatasetError, InputError

OBJECTIVES = ("f1", "accuracy")


@dataclass(frozen=True)
class TuneConfig:
    objective: str = "f1"

    def __post_init__(self) -> None:
        if self.objective not in OBJECTIVES:
            raise InputError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")


class SweepPoint(NamedTuple):
    candidate: float
    tp: int
    fp: int
    fn: int
    tn: int
    objective: float


@dataclass(frozen=True)
class TuneResult:
    log_epsilon: float
    objective_value: float
    sweep: tuple[SweepPoint, ...]

    def write_sweep_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SweepPoint._fields)
            for p in self.sweep:
                w.writerow([repr(p.candidate), p.tp, p.fp, p.fn, p.tn, repr(p.objective)])


def candidates(scores) -> np.ndarray:
    """Thresholds between and around the distinct scores, ascending.

    ``k`` distinct scores give ``k + 1`` candidates: ``s_1 - 1``, the ``k - 1``
    midpoints, and ``s_k + 1``.
    """
    s = np.unique(np.asarray(scores, dtype=np.float64))
    if s.size == 0:
        raise InputError("no scores to build threshold candidates from")
    if not np.isfinite(s).all():
        raise InputError("scores must be finite")
    mids = 0.5 * (s[:-1] + s[1:])
    # adjacent doubles: a rounded-down midpoint would drop the lower score
    mids = np.where(mids > s[:-1], mids, s[1:])
    hi = s[-1] + 1.0
    if hi <= s[-1]:
        hi = np.nextafter(s[-1], math.inf)
    return np.concatenate([[s[0] - 1.0], mids, [hi]])


def objective_value(objective: str, tp: int, fp: int, fn: int, tn: int) -> float:
    """F1 or accuracy from counts; an undefined F1 scores 0.

    Each is a single integer division so equal ratios compare equal.
    """
    if objective == "f1":
        den = 2 * tp + fp + fn
        return 2 * tp / den if tp else 0.0
    return (tp + tn) / (tp + fp + fn + tn)


def tune_scores(scores, labels, cfg: TuneConfig = TuneConfig()) -> TuneResult:
    """Exhaustive threshold sweep over precomputed scores.

    A sample is predicted positive when ``score < threshold``. The best
    objective wins; ties go to higher recall, then to the lower threshold.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 1 or s.shape != y.shape:
        raise InputError("scores and labels must be 1-D and equally long")
    if not np.isin(y, (0, 1)).all():
        raise InputError("labels must be 0 or 1")
    n_pos = int(np.sum(y == 1))
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DatasetError(
            f"validation needs both classes; got {n_pos} violations and {n_neg} violation-free samples"
        )

    cand = candidates(s)
    tp, fp = kernels.sweep_counts(np.sort(s[y == 1]), np.sort(s[y == 0]), cand)
    fn = n_pos - tp
    tn = n_neg - fp

    sweep = []
    best = None
    best_key = None
    for c, a, b, e, d in zip(cand.tolist(), tp.tolist(), fp.tolist(), fn.tolist(), tn.tolist()):
        obj = objective_value(cfg.objective, a, b, e, d)
        sweep.append(SweepPoint(c, a, b, e, d, obj))
        # candidates ascend, so strict > keeps the lowest threshold among ties;
        # recall ties compare tp since the positive count is fixed
        key = (obj, a)
        if best_key is None or key > best_key:
            best_key = key
            best = sweep[-1]
    return TuneResult(best.candidate, best.objective, tuple(sweep))


def tune(model: DensityModel, validation: Dataset, cfg: TuneConfig = TuneConfig()) -> TuneResult:
    """Sweep thresholds for ``model`` on a labeled validation set.

    The model is not modified; apply the result with
    ``model.with_threshold(result.log_epsilon)``.
    """
    if not validation.is_labeled:
        raise DatasetError("threshold tuning needs labeled validation data")
    return tune_scores(score(model, validation), validation.labels, cfg)
