"""Factorized Gaussian density model over transformed grid features.

Each active feature gets its own transform and a univariate normal fitted on
violation-free data. A sample's score is the natural log of the product of
the per-feature densities, i.e. the sum of per-feature log-densities; summing
logs keeps the score finite where the raw product would underflow. A sample
is flagged as a violation when its score is strictly below ``log_epsilon``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .dataset import Dataset, FeatureSchema, GridSample
from .errors import DatasetError, InputError, ModelFormatError, ThresholdNotSetError
from .gaussianize import TransformSpec, apply_array, fit_transform

MODEL_FORMAT = "pgrdrc-model-v1"
SIGMA2_FLOOR = 1e-12
MIN_TRAIN = 3


@dataclass(frozen=True)
class GaussianParams:
    mu: float
    sigma2: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu):
            raise InputError(f"mu must be finite, got {self.mu!r}")
        if not (math.isfinite(self.sigma2) and self.sigma2 >= SIGMA2_FLOOR):
            raise InputError(f"sigma2 must be finite and >= {SIGMA2_FLOOR}, got {self.sigma2!r}")


def pdf_single(x, p: GaussianParams):
    """Normal density N(mu, sigma2) at ``x``; a float, or an array for array ``x``."""
    out = np.exp(-((np.asarray(x, dtype=np.float64) - p.mu) ** 2) / (2.0 * p.sigma2)) / math.sqrt(
        2.0 * math.pi * p.sigma2
    )
    return float(out) if out.ndim == 0 else out


def log_pdf_single(x: float, p: GaussianParams) -> float:
    return -0.5 * math.log(2.0 * math.pi * p.sigma2) - (x - p.mu) ** 2 / (2.0 * p.sigma2)


@dataclass(frozen=True)
class DensityModel:
    """Fitted per-feature transforms and Gaussians plus the decision threshold.

    ``transforms`` and ``params`` are keyed by feature name and cover the
    active features only; ``dropped`` lists features that were constant in
    training and contribute nothing to the score.
    """

    schema: FeatureSchema
    transforms: Mapping[str, TransformSpec]
    params: Mapping[str, GaussianParams]
    dropped: tuple[str, ...] = ()
    log_epsilon: float | None = None
    _active_idx: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "dropped", tuple(self.dropped))
        object.__setattr__(self, "transforms", dict(self.transforms))
        object.__setattr__(self, "params", dict(self.params))
        names = set(self.schema.names)
        dropped = set(self.dropped)
        if len(dropped) != len(self.dropped) or not dropped <= names:
            raise InputError("dropped features must be distinct schema members")
        active = [n for n in self.schema.names if n not in dropped]
        if not active:
            raise InputError("model has no active features; every feature was constant")
        if set(self.params) != set(active) or set(self.transforms) != set(active):
            raise InputError("params and transforms must cover exactly the active features")
        if self.log_epsilon is not None and math.isnan(self.log_epsilon):
            raise InputError("log_epsilon must not be NaN")
        idx = np.array([self.schema.index(n) for n in active], dtype=np.intp)
        object.__setattr__(self, "_active_idx", idx)

    @property
    def active(self) -> tuple[str, ...]:
        return tuple(self.schema.names[i] for i in self._active_idx)

    @property
    def is_tuned(self) -> bool:
        return self.log_epsilon is not None

    def with_threshold(self, log_epsilon: float | None) -> DensityModel:
        return replace(self, log_epsilon=log_epsilon)

    def transform(self, values: np.ndarray) -> np.ndarray:
        """Active-feature columns of ``values`` mapped through their transforms."""
        z = np.empty((values.shape[0], self._active_idx.size))
        for k, name in enumerate(self.active):
            z[:, k] = apply_array(self.transforms[name], values[:, self._active_idx[k]])
        return z


def fit(
    train: Dataset, transforms: Mapping[str, TransformSpec] | None = None
) -> DensityModel:
    """Fit transforms and per-feature Gaussians on violation-free samples.

    ``transforms`` pins the transform of the named features instead of
    selecting one. The variance is the maximum-likelihood (divide-by-N)
    estimate, floored at :data:`SIGMA2_FLOOR`.
    """
    if train.is_labeled and (train.labels == 1).any():
        row = int(np.flatnonzero(train.labels == 1)[0])
        raise DatasetError(f"training data must be violation-free; sample {row} is labeled 1")
    if len(train) < MIN_TRAIN:
        raise DatasetError(f"fitting needs at least {MIN_TRAIN} samples, got {len(train)}")
    forced = dict(transforms or {})
    unknown = set(forced) - set(train.schema.names)
    if unknown:
        raise InputError(f"transforms given for unknown features {sorted(unknown)}")

    specs: dict[str, TransformSpec] = {}
    params: dict[str, GaussianParams] = {}
    dropped: list[str] = []
    for k, name in enumerate(train.schema.names):
        col = train.values[:, k]
        if col.max() == col.min():
            dropped.append(name)
            continue
        spec = forced.get(name)
        if spec is None:
            tf = fit_transform(col)
            if tf.degenerate:
                dropped.append(name)
                continue
            spec = tf.spec
        z = apply_array(spec, col)
        mu = float(np.mean(z))
        sigma2 = float(np.mean((z - mu) ** 2))
        specs[name] = spec
        params[name] = GaussianParams(mu, max(sigma2, SIGMA2_FLOOR))
    return DensityModel(train.schema, specs, params, tuple(dropped))


def _check_schema(model: DensityModel, schema: FeatureSchema) -> None:
    if schema != model.schema:
        raise DatasetError(
            f"schema mismatch: model expects {list(model.schema.names)}, got {list(schema.names)}"
        )


def score(model: DensityModel, ds: Dataset) -> np.ndarray:
    """Log-density of every sample in ``ds``."""
    _check_schema(model, ds.schema)
    z = model.transform(ds.values)
    mu = np.array([model.params[n].mu for n in model.active])
    s2 = np.array([model.params[n].sigma2 for n in model.active])
    return kernels.gaussian_log_density(z, mu, s2)


def log_density(model: DensityModel, sample: GridSample | Sequence[float]) -> float:
    """Log-density of a single sample (sum over active features)."""
    values = sample.values if isinstance(sample, GridSample) else tuple(sample)
    if len(values) != len(model.schema):
        raise DatasetError(
            f"sample has {len(values)} values, model schema has {len(model.schema)}"
        )
    total = 0.0
    for k, name in zip(model._active_idx, model.active):
        z = float(apply_array(model.transforms[name], np.float64(values[k])))
        total += log_pdf_single(z, model.params[name])
    return total


def predict_scores(model: DensityModel, scores: np.ndarray) -> np.ndarray:
    if model.log_epsilon is None:
        raise ThresholdNotSetError()
    return (np.asarray(scores) < model.log_epsilon).astype(np.int8)


def predict(model: DensityModel, ds: Dataset) -> np.ndarray:
    """1 where the sample's score is strictly below ``log_epsilon``, else 0."""
    if model.log_epsilon is None:
        raise ThresholdNotSetError()
    return predict_scores(model, score(model, ds))


def model_to_dict(model: DensityModel) -> dict:
    return {
        "format_version": MODEL_FORMAT,
        "schema": list(model.schema.names),
        "dropped": list(model.dropped),
        "features": {
            name: {
                "transform": model.transforms[name].to_dict(),
                "mu": model.params[name].mu,
                "sigma2": model.params[name].sigma2,
            }
            for name in model.active
        },
        "log_epsilon": model.log_epsilon,
    }


def model_from_dict(doc: dict) -> DensityModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model file must hold a JSON object")
    version = doc.get("format_version")
    if version != MODEL_FORMAT:
        raise ModelFormatError(f"unsupported model format_version {version!r}, expected {MODEL_FORMAT!r}")
    expected = {"format_version", "schema", "dropped", "features", "log_epsilon"}
    if set(doc) != expected:
        raise ModelFormatError(f"model keys must be {sorted(expected)}, got {sorted(doc)}")
    try:
        schema = FeatureSchema(tuple(doc["schema"]))
        specs, params = {}, {}
        for name, entry in doc["features"].items():
            if not isinstance(entry, dict) or set(entry) != {"transform", "mu", "sigma2"}:
                raise ModelFormatError(f"feature {name!r}: malformed entry")
            specs[name] = TransformSpec.from_dict(entry["transform"])
            params[name] = GaussianParams(float(entry["mu"]), float(entry["sigma2"]))
        eps = doc["log_epsilon"]
        return DensityModel(
            schema,
            specs,
            params,
            tuple(doc["dropped"]),
            None if eps is None else float(eps),
        )
    except ModelFormatError:
        raise
    except (InputError, TypeError, ValueError, AttributeError) as exc:
        raise ModelFormatError(f"invalid model: {exc}") from None


def save_model(model: DensityModel, path: str | Path) -> None:
    # json writes floats with repr, which round-trips every double exactly
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> DensityModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ModelFormatError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    try:
        return model_from_dict(doc)
    except ModelFormatError as exc:
        raise ModelFormatError(f"{path}: {exc}") from None
