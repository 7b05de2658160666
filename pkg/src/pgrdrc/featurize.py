"""Virtual-grid featurization of a placed layout.

The die is tiled into ``rows x cols`` equal rectangles (integer division, the
last row/column absorbs the leftover nanometers). Row 0 is the bottom row.
For every tile and every object class (cells, pins, nets) an object is

* *buried* when its rect lies inside the tile, shared edges included, and
* *intersecting* when it overlaps the tile with positive area but is not
  inside it.

A net's rect is the bounding box of its pins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .dataset import Dataset, FeatureSchema
from .errors import DatasetError, InputError
from .layout import Layout, Rect

FEATURE_NAMES = (
    "pin_density",
    "cell_density",
    "buried_nets",
    "buried_cells",
    "buried_pins",
    "intersecting_pins",
    "intersecting_cells",
    "intersecting_nets",
    "std_cell_count",
    "std_cell_area",
    "area_utilization",
)
FEATURE_SCHEMA = FeatureSchema(FEATURE_NAMES)

NM2_PER_UM2 = 1_000_000


@dataclass(frozen=True)
class GridSpec:
    rows: int
    cols: int

    def __post_init__(self) -> None:
        for name in ("rows", "cols"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InputError(f"grid {name} must be a positive integer, got {v!r}")

    def __len__(self) -> int:
        return self.rows * self.cols


def grid_id(row: int, col: int) -> str:
    return f"r{row}c{col}"


def grid_boundaries(die: Rect, grid: GridSpec) -> tuple[list[int], list[int]]:
    """Tile edges along x (``cols + 1`` values) and y (``rows + 1`` values)."""
    if die.width < grid.cols or die.height < grid.rows:
        raise InputError(
            f"a {grid.rows}x{grid.cols} grid does not fit a {die.width}x{die.height} nm die"
        )
    w = die.width // grid.cols
    h = die.height // grid.rows
    xs = [die.x0 + j * w for j in range(grid.cols)] + [die.x1]
    ys = [die.y0 + i * h for i in range(grid.rows)] + [die.y1]
    return xs, ys


def grid_rects(die: Rect, grid: GridSpec) -> list[Rect]:
    """Tile rectangles in row-major order."""
    xs, ys = grid_boundaries(die, grid)
    return [
        Rect(xs[j], ys[i], xs[j + 1], ys[i + 1])
        for i in range(grid.rows)
        for j in range(grid.cols)
    ]


def grid_ids(grid: GridSpec) -> list[str]:
    return [grid_id(i, j) for i in range(grid.rows) for j in range(grid.cols)]


def _as_array(rects) -> np.ndarray:
    a = np.array([r.as_list() for r in rects], dtype=np.int64)
    return a.reshape(-1, 4)


def featurize(layout: Layout, grid: GridSpec) -> Dataset:
    """Compute the per-tile feature vector for every tile of ``grid``.

    Returns an unlabeled dataset with :data:`FEATURE_SCHEMA`, one sample per
    tile in row-major order, grid ids ``r{row}c{col}``. Densities are per
    square micron, areas in square microns.
    """
    xs, ys = grid_boundaries(layout.die, grid)
    cells = _as_array(c.rect for c in layout.cells)
    pins = _as_array(p.rect for p in layout.pins)
    nets = _as_array(layout.nets.values())

    buried_c, inter_c, cell_nm2 = kernels.bin_rects(cells, xs, ys, True)
    buried_p, inter_p, _ = kernels.bin_rects(pins, xs, ys, False)
    buried_n, inter_n, _ = kernels.bin_rects(nets, xs, ys, False)

    tile_nm2 = np.outer(np.diff(ys), np.diff(xs)).ravel()
    tile_um2 = tile_nm2 / NM2_PER_UM2
    cell_um2 = cell_nm2 / NM2_PER_UM2
    n_cells = buried_c + inter_c
    n_pins = buried_p + inter_p

    values = np.column_stack(
        [
            n_pins / tile_um2,
            n_cells / tile_um2,
            buried_n,
            buried_c,
            buried_p,
            inter_p,
            inter_c,
            inter_n,
            n_cells,
            cell_um2,
            # overlapping placements can cover more than the tile
            np.minimum(cell_nm2 / tile_nm2, 1.0),
        ]
    ).astype(np.float64)
    return Dataset(FEATURE_SCHEMA, values, grid_ids=grid_ids(grid))


def label_grids(layout: Layout, grid: GridSpec, ds: Dataset) -> Dataset:
    """Label each tile 1 if a violation marker overlaps it with positive area."""
    if len(ds) != len(grid):
        raise DatasetError(f"dataset has {len(ds)} samples, grid has {len(grid)} tiles")
    if ds.grid_ids is not None and list(ds.grid_ids) != grid_ids(grid):
        raise DatasetError("dataset grid ids do not match the grid")
    xs, ys = grid_boundaries(layout.die, grid)
    buried, inter, _ = kernels.bin_rects(_as_array(layout.violations), xs, ys, False)
    return ds.with_labels((buried + inter > 0).astype(np.int8))
