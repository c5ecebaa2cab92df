"""Kernel selection: compiled extension when importable, else the Python twin.

Set ``ICREGION_PURE=1`` to force the pure-Python path.
"""

from __future__ import annotations

import math
import os
from typing import Sequence

from . import _vertex_py

try:
    if os.environ.get("ICREGION_PURE", "") not in ("", "0"):
        raise ImportError("pure path requested")
    from . import _vertex_kernel as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"

# every entry the kernel stores is a minor of [A | b]; keep them below 2**62
_LIMIT = 2.0**62


def _minor_bound(A: Sequence[Sequence[int]], b: Sequence[int]) -> float:
    d = len(A[0])
    root = math.sqrt(d)
    cols = [max(1.0, root * max(abs(r[c]) for r in A)) for c in range(d)]
    cols.append(max(1.0, root * max(abs(v) for v in b)))
    return math.prod(cols) / min(cols)


def fits_machine(A: Sequence[Sequence[int]], b: Sequence[int]) -> bool:
    if not A:
        return True
    amax = max(abs(v) for r in A for v in r)
    return _minor_bound(A, b) < _LIMIT and amax * len(A[0]) < 2**60


def basic_feasible_points(
    A: Sequence[Sequence[int]], b: Sequence[int], *, backend: str | None = None
) -> list[tuple[tuple[int, ...], int]]:
    """Dispatch to the compiled kernel when available and overflow-safe."""
    use = backend or BACKEND
    if use == "compiled" and _compiled is not None and fits_machine(A, b):
        import numpy as np

        a = np.ascontiguousarray(np.array(A, dtype=np.int64).reshape(len(A), -1))
        bb = np.ascontiguousarray(np.array(b, dtype=np.int64))
        return _compiled.basic_feasible_points(a, bb)
    return _vertex_py.basic_feasible_points(A, b)
