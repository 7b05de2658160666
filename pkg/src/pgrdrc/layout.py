"""Placed-layout geometry and its JSON file format.

Coordinates are integer nanometers throughout. The file format is a single
JSON object::

    {"format": "pgrdrc-layout-v1",
     "die": [x0, y0, x1, y1],
     "cells": [{"id": "u1", "rect": [...]}, ...],
     "pins": [{"id": "u1/A", "cell": "u1", "net": "n1", "rect": [...]}, ...],
     "violations": [[x0, y0, x1, y1], ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any

from .errors import LayoutError

LAYOUT_FORMAT = "pgrdrc-layout-v1"
_TOP_KEYS = {"format", "die", "cells", "pins", "violations"}
_CELL_KEYS = {"id", "rect"}
_PIN_KEYS = {"id", "cell", "net", "rect"}


@dataclass(frozen=True, order=True)
class Rect:
    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self) -> None:
        for v in (self.x0, self.y0, self.x1, self.y1):
            if isinstance(v, bool) or not isinstance(v, int):
                raise LayoutError(f"rect coordinates must be integers, got {v!r}")
        if self.x0 >= self.x1 or self.y0 >= self.y1:
            raise LayoutError(
                f"degenerate rect [{self.x0}, {self.y0}, {self.x1}, {self.y1}]: "
                "need x0 < x1 and y0 < y1"
            )

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def contains(self, other: Rect) -> bool:
        """True if ``other`` lies inside this rect; shared edges count as inside."""
        return (
            self.x0 <= other.x0
            and self.y0 <= other.y0
            and other.x1 <= self.x1
            and other.y1 <= self.y1
        )

    def overlap_area(self, other: Rect) -> int:
        w = min(self.x1, other.x1) - max(self.x0, other.x0)
        h = min(self.y1, other.y1) - max(self.y0, other.y0)
        return w * h if w > 0 and h > 0 else 0

    def overlaps(self, other: Rect) -> bool:
        """Positive-area overlap; touching edges do not count."""
        return self.overlap_area(other) > 0

    def as_list(self) -> list[int]:
        return [self.x0, self.y0, self.x1, self.y1]


@dataclass(frozen=True)
class Cell:
    id: str
    rect: Rect


@dataclass(frozen=True)
class Pin:
    id: str
    cell: str
    net: str
    rect: Rect


@dataclass(frozen=True)
class Layout:
    """A placed design: die outline, standard cells, pins and DRC markers.

    Nets are not stored; each net is the set of pins sharing a net id and its
    geometry is their bounding box (see :attr:`nets`).
    """

    die: Rect
    cells: tuple[Cell, ...] = ()
    pins: tuple[Pin, ...] = ()
    violations: tuple[Rect, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "pins", tuple(self.pins))
        object.__setattr__(self, "violations", tuple(self.violations))

        cell_ids: set[str] = set()
        for c in self.cells:
            if not c.id:
                raise LayoutError("cell with empty id")
            if c.id in cell_ids:
                raise LayoutError(f"duplicate cell id {c.id!r}")
            cell_ids.add(c.id)
            if not self.die.overlaps(c.rect):
                raise LayoutError(f"cell {c.id!r} lies outside the die")

        pin_ids: set[str] = set()
        for p in self.pins:
            if not p.id:
                raise LayoutError("pin with empty id")
            if p.id in pin_ids:
                raise LayoutError(f"duplicate pin id {p.id!r}")
            pin_ids.add(p.id)
            if not p.cell:
                raise LayoutError(f"pin {p.id!r} has an empty cell id")
            if not p.net:
                raise LayoutError(f"pin {p.id!r} has an empty net id")
            if p.cell not in cell_ids:
                raise LayoutError(f"pin {p.id!r} references unknown cell {p.cell!r}")
            if not self.die.overlaps(p.rect):
                raise LayoutError(f"pin {p.id!r} lies outside the die")

        for k, v in enumerate(self.violations):
            if not self.die.overlaps(v):
                raise LayoutError(f"violation {k} lies outside the die")

    @cached_property
    def nets(self) -> dict[str, Rect]:
        """Net id -> bounding box of the net's pins, in first-seen order."""
        boxes: dict[str, list[int]] = {}
        for p in self.pins:
            r = p.rect
            b = boxes.get(p.net)
            if b is None:
                boxes[p.net] = [r.x0, r.y0, r.x1, r.y1]
            else:
                b[0] = min(b[0], r.x0)
                b[1] = min(b[1], r.y0)
                b[2] = max(b[2], r.x1)
                b[3] = max(b[3], r.y1)
        return {n: Rect(*b) for n, b in boxes.items()}


def _rect(obj: Any, where: str) -> Rect:
    if not isinstance(obj, list) or len(obj) != 4:
        raise LayoutError(f"{where}: expected [x0, y0, x1, y1], got {obj!r}")
    try:
        return Rect(*obj)
    except LayoutError as exc:
        raise LayoutError(f"{where}: {exc}") from None


def _check_keys(obj: Any, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise LayoutError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise LayoutError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise LayoutError(f"{where}: missing keys {sorted(missing)}")


def _str(obj: Any, where: str) -> str:
    if not isinstance(obj, str):
        raise LayoutError(f"{where}: expected a string, got {obj!r}")
    return obj


def layout_from_dict(doc: Any, source: str = "<layout>") -> Layout:
    _check_keys(doc, _TOP_KEYS, {"format", "die"}, source)
    if doc["format"] != LAYOUT_FORMAT:
        raise LayoutError(
            f"{source}: unsupported format {doc['format']!r}, expected {LAYOUT_FORMAT!r}"
        )
    die = _rect(doc["die"], f"{source}: die")
    for key in ("cells", "pins", "violations"):
        if not isinstance(doc.get(key, []), list):
            raise LayoutError(f"{source}: {key} must be a list")

    cells = []
    for k, c in enumerate(doc.get("cells", [])):
        where = f"{source}: cells[{k}]"
        _check_keys(c, _CELL_KEYS, _CELL_KEYS, where)
        cells.append(Cell(_str(c["id"], f"{where}.id"), _rect(c["rect"], f"{where}.rect")))

    pins = []
    for k, p in enumerate(doc.get("pins", [])):
        where = f"{source}: pins[{k}]"
        _check_keys(p, _PIN_KEYS, _PIN_KEYS, where)
        pins.append(
            Pin(
                _str(p["id"], f"{where}.id"),
                _str(p["cell"], f"{where}.cell"),
                _str(p["net"], f"{where}.net"),
                _rect(p["rect"], f"{where}.rect"),
            )
        )

    violations = [
        _rect(v, f"{source}: violations[{k}]") for k, v in enumerate(doc.get("violations", []))
    ]
    try:
        return Layout(die, tuple(cells), tuple(pins), tuple(violations))
    except LayoutError as exc:
        raise LayoutError(f"{source}: {exc}") from None


def layout_to_dict(layout: Layout) -> dict:
    return {
        "format": LAYOUT_FORMAT,
        "die": layout.die.as_list(),
        "cells": [{"id": c.id, "rect": c.rect.as_list()} for c in layout.cells],
        "pins": [
            {"id": p.id, "cell": p.cell, "net": p.net, "rect": p.rect.as_list()}
            for p in layout.pins
        ],
        "violations": [v.as_list() for v in layout.violations],
    }


def parse_layout(path: str | Path) -> Layout:
    """Load and validate a layout file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LayoutError(f"{path}: {exc.strerror or exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LayoutError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return layout_from_dict(doc, str(path))


def save_layout(layout: Layout, path: str | Path) -> None:
    Path(path).write_text(json.dumps(layout_to_dict(layout), indent=1) + "\n", encoding="utf-8")
