"""Grid-feature tables: schema, samples, CSV I/O and the train/validation/test split.

A :class:`Dataset` is array-backed (one row per virtual grid) and immutable;
:class:`GridSample` is the per-row view handed out when iterating.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DatasetError

LABEL_COLUMN = "drv"
GRID_ID_COLUMN = "grid_id"

# fractions in percent; integer arithmetic keeps the floor exact
NEGATIVE_SPLIT = (70, 15)  # train, validation; test gets the remainder
POSITIVE_SPLIT = 30  # validation; test gets the remainder


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered, unique feature names shared by datasets and models."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise DatasetError("schema needs at least one feature")
        for name in names:
            if not isinstance(name, str) or not name:
                raise DatasetError(f"feature names must be non-empty strings, got {name!r}")
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise DatasetError(f"duplicate feature names: {dup}")

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class GridSample:
    values: tuple[float, ...]
    label: int | None = None
    grid_id: str | None = None


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Dataset:
    """Feature matrix with an optional 0/1 label per row and optional grid ids.

    Args:
        schema: Feature schema; one column of ``values`` per name.
        values: ``(n, len(schema))`` array of finite reals.
        labels: Length-``n`` sequence of 0/1, or ``None`` for unlabeled data.
        grid_ids: Length-``n`` sequence of strings, or ``None``.
    """

    __slots__ = ("_schema", "_values", "_labels", "_grid_ids")

    def __init__(
        self,
        schema: FeatureSchema | Sequence[str],
        values,
        labels=None,
        grid_ids: Sequence[str] | None = None,
    ) -> None:
        if not isinstance(schema, FeatureSchema):
            schema = FeatureSchema(tuple(schema))
        x = np.array(values, dtype=np.float64, copy=True)
        if x.size == 0:
            x = x.reshape(0, len(schema))
        if x.ndim != 2 or x.shape[1] != len(schema):
            raise DatasetError(
                f"values must have shape (n, {len(schema)}), got {x.shape}"
            )
        if not np.isfinite(x).all():
            row = int(np.argwhere(~np.isfinite(x))[0, 0])
            raise DatasetError(f"sample {row} has a non-finite value")

        y = None
        if labels is not None:
            labels = list(labels)
            if any(lab is None for lab in labels):
                raise DatasetError("mixed labeled and unlabeled samples")
            y = np.array(labels, dtype=np.int64)
            if y.shape != (x.shape[0],):
                raise DatasetError(f"expected {x.shape[0]} labels, got {y.shape[0]}")
            if not np.isin(y, (0, 1)).all():
                raise DatasetError("labels must be 0 or 1")
            y = _readonly(y.astype(np.int8))

        ids = None
        if grid_ids is not None:
            ids = tuple(grid_ids)
            if len(ids) != x.shape[0]:
                raise DatasetError(f"expected {x.shape[0]} grid ids, got {len(ids)}")
            if any(not isinstance(g, str) for g in ids):
                raise DatasetError("grid ids must be strings")

        self._schema = schema
        self._values = _readonly(x)
        self._labels = y
        self._grid_ids = ids

    @classmethod
    def from_samples(
        cls, schema: FeatureSchema | Sequence[str], samples: Iterable[GridSample]
    ) -> Dataset:
        samples = list(samples)
        if not isinstance(schema, FeatureSchema):
            schema = FeatureSchema(tuple(schema))
        for i, s in enumerate(samples):
            if len(s.values) != len(schema):
                raise DatasetError(
                    f"sample {i} has {len(s.values)} values, schema has {len(schema)}"
                )
        n_labeled = sum(s.label is not None for s in samples)
        if 0 < n_labeled < len(samples):
            raise DatasetError("mixed labeled and unlabeled samples")
        n_ids = sum(s.grid_id is not None for s in samples)
        if 0 < n_ids < len(samples):
            raise DatasetError("grid ids must be given for all samples or none")
        return cls(
            schema,
            [s.values for s in samples] if samples else np.empty((0, len(schema))),
            labels=[s.label for s in samples] if n_labeled else None,
            grid_ids=[s.grid_id for s in samples] if n_ids else None,
        )

    @property
    def schema(self) -> FeatureSchema:
        return self._schema

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def labels(self) -> np.ndarray | None:
        return self._labels

    @property
    def grid_ids(self) -> tuple[str, ...] | None:
        return self._grid_ids

    @property
    def is_labeled(self) -> bool:
        return self._labels is not None

    def __len__(self) -> int:
        return self._values.shape[0]

    def __getitem__(self, i: int) -> GridSample:
        return GridSample(
            tuple(float(v) for v in self._values[i]),
            None if self._labels is None else int(self._labels[i]),
            None if self._grid_ids is None else self._grid_ids[i],
        )

    def __iter__(self) -> Iterator[GridSample]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        if self._schema != other._schema or self._grid_ids != other._grid_ids:
            return False
        if (self._labels is None) != (other._labels is None):
            return False
        if self._labels is not None and not np.array_equal(self._labels, other._labels):
            return False
        # bitwise comparison so -0.0 and 0.0 are told apart
        return self._values.shape == other._values.shape and (
            self._values.view(np.uint64) == other._values.view(np.uint64)
        ).all()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        state = "labeled" if self.is_labeled else "unlabeled"
        return f"Dataset({len(self)} samples, {len(self._schema)} features, {state})"

    def column(self, name: str) -> np.ndarray:
        return self._values[:, self._schema.index(name)]

    def subset(self, indices) -> Dataset:
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(
            self._schema,
            self._values[idx] if idx.size else np.empty((0, len(self._schema))),
            labels=None if self._labels is None else self._labels[idx],
            grid_ids=None if self._grid_ids is None else [self._grid_ids[i] for i in idx],
        )

    def with_labels(self, labels) -> Dataset:
        return Dataset(self._schema, self._values, labels=labels, grid_ids=self._grid_ids)


@dataclass(frozen=True)
class SplitResult:
    train: Dataset
    validation: Dataset
    test: Dataset


def load_csv(path: str | Path, label_column: str | None = LABEL_COLUMN) -> Dataset:
    """Read a grid-feature CSV.

    A ``grid_id`` column is carried as opaque ids. ``label_column`` is read as
    0/1 labels when the header contains it; pass ``None`` to treat every
    non-id column as a feature. Errors cite the 1-based file row.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DatasetError(f"{path}: missing header row")
        header = [h.strip() for h in header]
        id_col = header.index(GRID_ID_COLUMN) if GRID_ID_COLUMN in header else None
        lab_col = (
            header.index(label_column)
            if label_column is not None and label_column in header
            else None
        )
        feat_cols = [i for i in range(len(header)) if i not in (id_col, lab_col)]
        try:
            schema = FeatureSchema(tuple(header[i] for i in feat_cols))
        except DatasetError as exc:
            raise DatasetError(f"{path}: row 1: {exc}") from None

        rows: list[list[float]] = []
        labels: list[int] = []
        ids: list[str] = []
        for rec in reader:
            row = reader.line_num
            if not rec or (len(rec) == 1 and not rec[0].strip()):
                continue
            if len(rec) != len(header):
                raise DatasetError(
                    f"{path}: row {row}: expected {len(header)} fields, got {len(rec)}"
                )
            vals = []
            for i in feat_cols:
                cell = rec[i].strip()
                try:
                    v = float(cell)
                except ValueError:
                    raise DatasetError(
                        f"{path}: row {row}: non-numeric value {cell!r} in column {header[i]!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DatasetError(
                        f"{path}: row {row}: non-finite value {cell!r} in column {header[i]!r}"
                    )
                vals.append(v)
            rows.append(vals)
            if lab_col is not None:
                cell = rec[lab_col].strip()
                if cell not in ("0", "1"):
                    raise DatasetError(
                        f"{path}: row {row}: label {header[lab_col]!r} must be 0 or 1, got {cell!r}"
                    )
                labels.append(int(cell))
            if id_col is not None:
                ids.append(rec[id_col])

    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return Dataset(
        schema,
        rows,
        labels=labels if lab_col is not None else None,
        grid_ids=ids if id_col is not None else None,
    )


def save_csv(ds: Dataset, path: str | Path, label_column: str = LABEL_COLUMN) -> None:
    """Write ``ds`` so that :func:`load_csv` reproduces it exactly."""
    if len(ds) == 0:
        raise DatasetError("refusing to write a dataset with no samples")
    header = list(ds.schema.names)
    if ds.grid_ids is not None:
        header.insert(0, GRID_ID_COLUMN)
    if ds.is_labeled:
        header.append(label_column)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, row in enumerate(ds.values.tolist()):
            # repr is the shortest text that round-trips each double exactly
            rec = [repr(v) for v in row]
            if ds.grid_ids is not None:
                rec.insert(0, ds.grid_ids[i])
            if ds.labels is not None:
                rec.append(str(int(ds.labels[i])))
            w.writerow(rec)


def split(ds: Dataset, seed: int) -> SplitResult:
    """Partition a labeled dataset into train/validation/test.

    Negatives are shuffled and cut 70/15/15, positives 30/70 into
    validation/test. Partition sizes are floored; the remainder goes to test.
    Each part keeps the input row order.
    """
    if not ds.is_labeled:
        raise DatasetError("split needs a labeled dataset")
    neg = np.flatnonzero(ds.labels == 0)
    pos = np.flatnonzero(ds.labels == 1)
    if neg.size == 0:
        raise DatasetError("split needs at least one violation-free sample")

    rng = np.random.default_rng(seed)
    neg = rng.permutation(neg)
    pos = rng.permutation(pos)

    n_train = neg.size * NEGATIVE_SPLIT[0] // 100
    n_val = neg.size * NEGATIVE_SPLIT[1] // 100
    p_val = pos.size * POSITIVE_SPLIT // 100

    train = np.sort(neg[:n_train])
    val = np.sort(np.concatenate([neg[n_train : n_train + n_val], pos[:p_val]]))
    test = np.sort(np.concatenate([neg[n_train + n_val :], pos[p_val:]]))
    return SplitResult(ds.subset(train), ds.subset(val), ds.subset(test))
