"""Seeded synthetic data with known ground truth.

Two modes:

* tabular -- Gaussian features for violation-free rows; violating rows are
  drawn the same way and then have several features pushed
  ``shift_sigmas`` standard deviations away from the mean.
* layout -- a placed design whose hotspot tiles carry extra pins and a DRC
  marker each; every other tile is clean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, FeatureSchema
from .errors import InputError
from .featurize import GridSpec, grid_boundaries, grid_id
from .layout import Cell, Layout, Pin, Rect

# layout geometry, nanometers
CELL_HEIGHT = 1200
CELL_WIDTH_RANGE = (400, 4000)
PIN_SIZE = 100
MAX_FANOUT = 4
PINS_PER_CELL = (2, 4)
PLACEMENT_TRIES = 2000


@dataclass(frozen=True)
class SynthConfig:
    """Generator settings. Tabular and layout fields are independent.

    Attributes:
        seed: Seed for the single RNG stream of a generation call.
        n_negatives: Violation-free rows (tabular).
        n_positives: Violating rows (tabular).
        n_features: Feature count (tabular).
        shift_sigmas: Displacement of shifted features, in standard deviations.
        min_shifted: Fewest features shifted per violating row; each row
            shifts a uniform count between this and ``n_features``.
            ``None`` means half the features, rounded up.
        die_size: Square die edge length in nm (layout).
        rows, cols: Tile grid (layout).
        n_cells: Standard cells to place (layout).
        utilization: Cap on each tile's cell-area fraction (layout).
        n_hotspots: Tiles that receive extra pins and a DRC marker (layout).
        hotspot_multiplier: Hotspot pin count relative to the tile's base pins.
    """

    seed: int = 0
    n_negatives: int = 1000
    n_positives: int = 10
    n_features: int = 10
    shift_sigmas: float = 6.0
    min_shifted: int | None = None
    die_size: int = 100_000
    rows: int = 4
    cols: int = 4
    n_cells: int = 200
    utilization: float = 0.5
    n_hotspots: int = 1
    hotspot_multiplier: float = 3.0

    def __post_init__(self) -> None:
        for name in ("n_negatives", "n_positives", "n_features", "n_cells", "n_hotspots"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be non-negative")
        if not self.shift_sigmas >= 0:
            raise InputError("shift_sigmas must be >= 0")
        if not 0.0 < self.utilization < 1.0:
            raise InputError("utilization must lie in (0, 1)")
        if not self.hotspot_multiplier > 1.0:
            raise InputError("hotspot_multiplier must be > 1")
        if self.min_shifted is not None and not 1 <= self.min_shifted <= max(self.n_features, 1):
            raise InputError("min_shifted must lie in [1, n_features]")
        if self.die_size < 1:
            raise InputError("die_size must be positive")
        GridSpec(self.rows, self.cols)
        if self.n_hotspots > self.rows * self.cols:
            raise InputError("more hotspots than tiles")


def feature_names(n: int) -> tuple[str, ...]:
    width = len(str(max(n - 1, 0)))
    return tuple(f"f{k:0{width}d}" for k in range(n))


def generate_tabular(cfg: SynthConfig) -> Dataset:
    """Labeled Gaussian feature table; negatives first, then positives."""
    if cfg.n_negatives < 3:
        raise InputError("tabular generation needs at least 3 negatives")
    if cfg.n_features < 1:
        raise InputError("tabular generation needs at least 1 feature")
    rng = np.random.default_rng(cfg.seed)
    d = cfg.n_features
    mu = rng.uniform(-5.0, 5.0, d)
    sigma = rng.uniform(0.5, 2.0, d)

    n = cfg.n_negatives + cfg.n_positives
    x = mu + sigma * rng.standard_normal((n, d))
    lo = cfg.min_shifted if cfg.min_shifted is not None else math.ceil(d / 2)
    for r in range(cfg.n_negatives, n):
        k = int(rng.integers(lo, d + 1))
        feats = rng.choice(d, size=k, replace=False)
        signs = rng.choice((-1.0, 1.0), size=k)
        x[r, feats] += signs * cfg.shift_sigmas * sigma[feats]

    labels = np.r_[np.zeros(cfg.n_negatives, np.int8), np.ones(cfg.n_positives, np.int8)]
    return Dataset(FeatureSchema(feature_names(d)), x, labels=labels)


def _place_cells(rng, tile: Rect, count: int, cap_nm2: float, prefix: str) -> list[Cell]:
    widths = rng.integers(CELL_WIDTH_RANGE[0], CELL_WIDTH_RANGE[1] + 1, count)
    if widths.sum() * CELL_HEIGHT > cap_nm2:
        raise InputError(
            f"utilization infeasible: tile {prefix} needs {count} cells "
            f"({int(widths.sum()) * CELL_HEIGHT} nm^2) but may hold {int(cap_nm2)} nm^2"
        )
    if tile.height < CELL_HEIGHT or tile.width < CELL_WIDTH_RANGE[1]:
        raise InputError("utilization infeasible: tiles are smaller than a cell")
    placed: list[Rect] = []
    cells = []
    for k, w in enumerate(widths.tolist()):
        for _ in range(PLACEMENT_TRIES):
            x0 = int(rng.integers(tile.x0, tile.x1 - w + 1))
            y0 = int(rng.integers(tile.y0, tile.y1 - CELL_HEIGHT + 1))
            r = Rect(x0, y0, x0 + w, y0 + CELL_HEIGHT)
            if not any(r.overlaps(q) for q in placed):
                break
        else:
            raise InputError(f"utilization infeasible: could not place cell {k} in tile {prefix}")
        placed.append(r)
        cells.append(Cell(f"{prefix}_u{k}", r))
    return cells


def _pin_on_boundary(rng, cell: Rect) -> Rect:
    """A PIN_SIZE square inside ``cell`` touching one of its edges."""
    side = int(rng.integers(4))
    if side < 2:  # bottom / top edge
        x0 = int(rng.integers(cell.x0, cell.x1 - PIN_SIZE + 1))
        y0 = cell.y0 if side == 0 else cell.y1 - PIN_SIZE
    else:  # left / right edge
        y0 = int(rng.integers(cell.y0, cell.y1 - PIN_SIZE + 1))
        x0 = cell.x0 if side == 2 else cell.x1 - PIN_SIZE
    return Rect(x0, y0, x0 + PIN_SIZE, y0 + PIN_SIZE)


def _generate_layout(cfg: SynthConfig) -> tuple[Layout, frozenset[str]]:
    rng = np.random.default_rng(cfg.seed)
    grid = GridSpec(cfg.rows, cfg.cols)
    die = Rect(0, 0, cfg.die_size, cfg.die_size)
    xs, ys = grid_boundaries(die, grid)
    n_tiles = len(grid)
    hot = set(rng.choice(n_tiles, size=cfg.n_hotspots, replace=False).tolist())

    # balanced cell counts per tile; each cell stays inside its tile
    per_tile = [cfg.n_cells // n_tiles + (t < cfg.n_cells % n_tiles) for t in range(n_tiles)]
    cells: list[Cell] = []
    tile_cells: list[list[Cell]] = []
    for t in range(n_tiles):
        i, j = divmod(t, cfg.cols)
        tile = Rect(xs[j], ys[i], xs[j + 1], ys[i + 1])
        placed = _place_cells(rng, tile, per_tile[t], cfg.utilization * tile.area, grid_id(i, j))
        tile_cells.append(placed)
        cells.extend(placed)

    raw: list[tuple[str, str, Rect]] = []  # pin id, owner cell id, rect
    for t, group in enumerate(tile_cells):
        tile_pins = []
        for c in group:
            for _ in range(int(rng.integers(PINS_PER_CELL[0], PINS_PER_CELL[1] + 1))):
                tile_pins.append((c, _pin_on_boundary(rng, c.rect)))
        if t in hot and group:
            extra = math.ceil((cfg.hotspot_multiplier - 1.0) * len(tile_pins))
            owners = rng.integers(len(group), size=extra)
            tile_pins += [(group[o], _pin_on_boundary(rng, group[o].rect)) for o in owners.tolist()]
        raw.extend((f"{c.id}/p{k}", c.id, r) for k, (c, r) in enumerate(tile_pins))

    # nets are consecutive runs of pins in tile order, so most stay local
    pins: list[Pin] = []
    k = net = 0
    while k < len(raw):
        fanout = int(rng.integers(2, MAX_FANOUT + 1))
        pins += [Pin(pid, cid, f"n{net}", r) for pid, cid, r in raw[k : k + fanout]]
        k += fanout
        net += 1

    violations = []
    for t in sorted(hot):
        i, j = divmod(t, cfg.cols)
        cx = (xs[j] + xs[j + 1]) // 2
        cy = (ys[i] + ys[i + 1]) // 2
        half = max(1, min(xs[j + 1] - xs[j], ys[i + 1] - ys[i]) // 8)
        violations.append(Rect(cx - half, cy - half, cx + half, cy + half))

    layout = Layout(die, tuple(cells), tuple(pins), tuple(violations))
    return layout, frozenset(grid_id(*divmod(t, cfg.cols)) for t in hot)


def generate_layout(cfg: SynthConfig) -> Layout:
    """Synthetic placed layout; violation markers sit only in hotspot tiles."""
    return _generate_layout(cfg)[0]


def hotspot_grid_ids(cfg: SynthConfig) -> frozenset[str]:
    """Grid ids of the hotspot tiles :func:`generate_layout` produces for ``cfg``."""
    return _generate_layout(cfg)[1]
