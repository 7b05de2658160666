"""Per-feature monotone transforms that make a marginal look more Gaussian.

Candidates are tried in order of simplicity and the one whose output has the
smallest absolute sample skewness wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InputError, TransformDomainError

KINDS = ("identity", "sqrt", "log1p", "log_offset")
OFFSET_REL = 1e-6


@dataclass(frozen=True)
class TransformSpec:
    kind: str = "identity"
    offset: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InputError(f"unknown transform kind {self.kind!r}")
        if self.kind == "log_offset":
            if self.offset is None or not math.isfinite(self.offset):
                raise InputError("log_offset transform needs a finite offset")
        elif self.offset is not None:
            raise InputError(f"{self.kind} transform takes no offset")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.offset is not None:
            d["offset"] = self.offset
        return d

    @classmethod
    def from_dict(cls, d: dict) -> TransformSpec:
        if not isinstance(d, dict) or set(d) - {"kind", "offset"} or "kind" not in d:
            raise InputError(f"malformed transform spec {d!r}")
        offset = d.get("offset")
        if offset is not None:
            offset = float(offset)
        return cls(d["kind"], offset)


IDENTITY = TransformSpec()


class TransformFit(NamedTuple):
    spec: TransformSpec
    skewness: float | None  # of the transformed values; None when degenerate
    degenerate: bool


def skewness(values) -> float:
    """Adjusted Fisher-Pearson sample skewness G1 = g1 * sqrt(n(n-1)) / (n-2)."""
    x = np.asarray(values, dtype=np.float64).ravel()
    n = x.size
    if n < 3:
        raise InputError(f"skewness needs at least 3 values, got {n}")
    if x.max() == x.min():
        raise InputError("skewness is undefined for zero-variance data")
    d = x - x.mean()
    scale = np.abs(d).max()
    if scale == 0.0:
        raise InputError("skewness is undefined for zero-variance data")
    d = d / scale  # scale-free; keeps tiny spreads from underflowing
    m2 = np.mean(d * d)
    m3 = np.mean(d * d * d)
    g1 = m3 / m2**1.5
    return float(g1 * math.sqrt(n * (n - 1)) / (n - 2))


def _domain_ok(spec: TransformSpec, x: np.ndarray) -> np.ndarray:
    if spec.kind == "sqrt":
        return x >= 0.0
    if spec.kind == "log1p":
        return x > -1.0
    if spec.kind == "log_offset":
        return x + spec.offset > 0.0
    return np.ones(x.shape, dtype=bool)


def apply_array(spec: TransformSpec, values) -> np.ndarray:
    """Vectorized :func:`apply`; raises on the first out-of-domain value."""
    x = np.asarray(values, dtype=np.float64)
    ok = _domain_ok(spec, x) & np.isfinite(x)
    if not ok.all():
        bad = x[~ok].flat[0]
        raise TransformDomainError(f"value {bad!r} is outside the domain of {spec.kind}")
    if spec.kind == "identity":
        out = x.copy()
    elif spec.kind == "sqrt":
        out = np.sqrt(x)
    elif spec.kind == "log1p":
        out = np.log1p(x)
    else:
        out = np.log(x + spec.offset)
    if not np.isfinite(out).all():
        bad = x[~np.isfinite(out)].flat[0]
        raise TransformDomainError(f"{spec.kind} of {bad!r} is not finite")
    return out


def apply(spec: TransformSpec, x: float) -> float:
    return float(apply_array(spec, np.float64(x)))


def candidates(values) -> list[TransformSpec]:
    x = np.asarray(values, dtype=np.float64)
    lo, hi = float(x.min()), float(x.max())
    out = [IDENTITY]
    if lo >= 0.0:
        out += [TransformSpec("sqrt"), TransformSpec("log1p")]
    if hi > lo:
        out.append(TransformSpec("log_offset", OFFSET_REL * (hi - lo) - lo))
    return out


def fit_transform(values) -> TransformFit:
    """Pick the candidate transform minimizing |skewness| of the output.

    Ties keep the earlier (simpler) candidate. A constant feature yields the
    identity transform with ``degenerate=True``.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size < 3:
        raise InputError(f"fitting a transform needs at least 3 values, got {x.size}")
    if not np.isfinite(x).all():
        raise InputError("cannot fit a transform to non-finite values")
    if x.max() == x.min():
        return TransformFit(IDENTITY, None, True)

    best: TransformFit | None = None
    for spec in candidates(x):
        try:
            s = skewness(apply_array(spec, x))
        except InputError:  # transform collapsed the values or left the domain
            continue
        if not math.isfinite(s):
            continue
        if best is None or abs(s) < abs(best.skewness):
            best = TransformFit(spec, s, False)
    if best is None:  # spread so small that the moments underflow
        return TransformFit(IDENTITY, None, True)
    return best
