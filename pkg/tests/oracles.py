"""Slow, obviously-correct reference computations used by the tests.

Nothing here calls into the code paths it checks: the grid tiling, net boxes,
containment rules and sweep counts are all recomputed from scratch.
"""

from fractions import Fraction

import mpmath
import numpy as np

from pgrdrc.layout import Cell, Layout, Pin, Rect


def tiles(die, rows, cols):
    w = (die.x1 - die.x0) // cols
    h = (die.y1 - die.y0) // rows
    out = []
    for i in range(rows):
        for j in range(cols):
            x0 = die.x0 + j * w
            y0 = die.y0 + i * h
            x1 = die.x1 if j == cols - 1 else x0 + w
            y1 = die.y1 if i == rows - 1 else y0 + h
            out.append((x0, y0, x1, y1))
    return out


def _inside(o, t):
    return t[0] <= o[0] and t[1] <= o[1] and o[2] <= t[2] and o[3] <= t[3]


def _overlap(o, t):
    w = min(o[2], t[2]) - max(o[0], t[0])
    h = min(o[3], t[3]) - max(o[1], t[1])
    return w * h if (w > 0 and h > 0) else 0


def brute_features(layout, rows, cols):
    """Every object against every tile; returns a list of dicts (row-major)."""
    cells = [(c.rect.x0, c.rect.y0, c.rect.x1, c.rect.y1) for c in layout.cells]
    pins = [(p.rect.x0, p.rect.y0, p.rect.x1, p.rect.y1) for p in layout.pins]
    boxes = {}
    for p in layout.pins:
        r = (p.rect.x0, p.rect.y0, p.rect.x1, p.rect.y1)
        b = boxes.get(p.net, r)
        boxes[p.net] = (min(b[0], r[0]), min(b[1], r[1]), max(b[2], r[2]), max(b[3], r[3]))
    nets = list(boxes.values())

    out = []
    for t in tiles(layout.die, rows, cols):
        f = {}
        for cls, objs in (("cells", cells), ("pins", pins), ("nets", nets)):
            buried = sum(1 for o in objs if _inside(o, t))
            inter = sum(1 for o in objs if _overlap(o, t) > 0 and not _inside(o, t))
            f[f"buried_{cls}"] = buried
            f[f"intersecting_{cls}"] = inter
        area_nm2 = sum(_overlap(o, t) for o in cells)
        tile_nm2 = (t[2] - t[0]) * (t[3] - t[1])
        f["std_cell_area"] = area_nm2 / 1e6
        f["area_utilization"] = min(area_nm2 / tile_nm2, 1.0)
        n_c = f["buried_cells"] + f["intersecting_cells"]
        f["std_cell_count"] = n_c
        f["cell_density"] = n_c / (tile_nm2 / 1e6)
        f["pin_density"] = (f["buried_pins"] + f["intersecting_pins"]) / (tile_nm2 / 1e6)
        f["tile"] = t
        out.append(f)
    return out


def brute_labels(layout, rows, cols):
    viol = [(v.x0, v.y0, v.x1, v.y1) for v in layout.violations]
    return [int(any(_overlap(v, t) > 0 for v in viol)) for t in tiles(layout.die, rows, cols)]


def random_layout(rng, n_cells, lattice=True, n_violations=0):
    """Random layout, coordinates snapped to a coarse lattice so edge cases are common.

    Objects may stick out of the die but always overlap it.
    """
    step = 1000 if lattice else 1
    size = int(rng.integers(20, 60)) * 1000
    ox, oy = (int(v) * 1000 for v in rng.integers(-5, 5, 2))
    die = Rect(ox, oy, ox + size, oy + size + int(rng.integers(0, 7)) * 1000 + 7)

    def rect(max_w):
        w = int(rng.integers(1, max_w + 1)) * step
        h = int(rng.integers(1, max_w + 1)) * step
        x0 = int(rng.integers(die.x0 - w + step, die.x1)) // step * step
        y0 = int(rng.integers(die.y0 - h + step, die.y1)) // step * step
        x0 = max(x0, die.x0 - w + step)
        y0 = max(y0, die.y0 - h + step)
        return Rect(x0, y0, x0 + w, y0 + h)

    span = 12 if lattice else 12000
    cells = [Cell(f"c{k}", rect(span)) for k in range(n_cells)]
    pins = []
    n_nets = max(1, n_cells // 2)
    for k in range(int(rng.integers(0, 3 * n_cells + 1)) if n_cells else 0):
        owner = cells[int(rng.integers(n_cells))]
        pins.append(Pin(f"p{k}", owner.id, f"n{int(rng.integers(n_nets))}", rect(2 if lattice else 2000)))
    violations = [rect(8 if lattice else 8000) for _ in range(n_violations)]
    return Layout(die, tuple(cells), tuple(pins), tuple(violations))


def sweep_brute(scores, labels, candidate):
    preds = [1 if s < candidate else 0 for s in scores]
    tp = sum(1 for y, p in zip(labels, preds) if y == 1 and p == 1)
    fp = sum(1 for y, p in zip(labels, preds) if y == 0 and p == 1)
    fn = sum(1 for y, p in zip(labels, preds) if y == 1 and p == 0)
    tn = sum(1 for y, p in zip(labels, preds) if y == 0 and p == 0)
    return tp, fp, fn, tn


def exact_objective(objective, tp, fp, fn, tn):
    """Exact rational F1 / accuracy; undefined F1 counts as 0."""
    if objective == "f1":
        return Fraction(2 * tp, 2 * tp + fp + fn) if tp else Fraction(0)
    return Fraction(tp + tn, tp + fp + fn + tn)


def mp_log_product(z, mu, sigma2, dps=50):
    """ln of the direct product of normal densities, in extended precision."""
    with mpmath.workdps(dps):
        prod = mpmath.mpf(1)
        for x, m, s2 in zip(z, mu, sigma2):
            x, m, s2 = mpmath.mpf(float(x)), mpmath.mpf(float(m)), mpmath.mpf(float(s2))
            prod *= mpmath.exp(-((x - m) ** 2) / (2 * s2)) / mpmath.sqrt(2 * mpmath.pi * s2)
        return float(mpmath.log(prod))


def welford(values):
    """Streaming mean and population variance."""
    n = 0
    mean = 0.0
    m2 = 0.0
    for x in np.asarray(values, dtype=float).tolist():
        n += 1
        d = x - mean
        mean += d / n
        m2 += d * (x - mean)
    return mean, m2 / n
