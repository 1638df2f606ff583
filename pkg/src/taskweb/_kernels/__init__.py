"""Kernel backend selection.

The numba backend is used when numba imports cleanly. Set TASKWEB_NUMBA=0
(or "false"/"off"/"no") to force the pure-numpy fallback; anything else
leaves autodetection in place. ``benchmarks/bench_kernels.py`` compares the
two paths.
"""

from __future__ import annotations

import os

from . import np_backend


def _numba_disabled() -> bool:
    flag = os.environ.get("TASKWEB_NUMBA", "").strip().lower()
    return flag in ("0", "false", "off", "no")


if _numba_disabled():
    _backend = np_backend
    BACKEND = "numpy"
else:
    try:
        from . import nb_backend as _backend
        BACKEND = "numba"
    except ImportError:
        _backend = np_backend
        BACKEND = "numpy"

transitive_counts = _backend.transitive_counts
pivot_scores = _backend.pivot_scores


def backend_name() -> str:
    return BACKEND
