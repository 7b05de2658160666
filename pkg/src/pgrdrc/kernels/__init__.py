"""Hot loops behind the featurizer, the scorer and the threshold sweep.

The compiled ``_fast`` extension is used when it was built; otherwise the
interpreter-only ``_pure`` module is. Set ``PGRDRC_PURE_PYTHON=1`` to force the
fallback. ``BACKEND`` names the active one and ``BACKENDS`` maps every
importable backend name to its module (used by tests and the benchmark).
"""

import os
from types import ModuleType

from . import _pure

BACKENDS: dict[str, ModuleType] = {"pure": _pure}

try:
    from . import _fast
except ImportError:  # extension not built
    pass
else:
    BACKENDS["cython"] = _fast

if os.environ.get("PGRDRC_PURE_PYTHON", "").strip() not in ("", "0"):
    BACKEND = "pure"
else:
    BACKEND = "cython" if "cython" in BACKENDS else "pure"

_impl = BACKENDS[BACKEND]
bin_rects = _impl.bin_rects
gaussian_log_density = _impl.gaussian_log_density
sweep_counts = _impl.sweep_counts

__all__ = ["BACKEND", "BACKENDS", "bin_rects", "gaussian_log_density", "sweep_counts"]
