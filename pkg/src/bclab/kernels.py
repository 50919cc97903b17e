"""Simplex kernel selection.

The hot loop of everything in this package is exact-rational simplex
pivoting.  Two interchangeable kernels implement it:

* ``bclab._simplex_cy`` -- Cython-compiled, rationals as (int, int) pairs;
* ``bclab._simplex_pure`` -- plain Python over ``fractions.Fraction``.

The compiled kernel is used when the extension built successfully, unless
``BCLAB_FORCE_PURE=1`` is set.  Both produce bit-identical results (same
pivot sequence, exact arithmetic); ``benchmarks/bench_kernels.py`` compares
their speed.
"""

from __future__ import annotations

import os

from . import _simplex_pure

STATUS_OPTIMAL = _simplex_pure.STATUS_OPTIMAL
STATUS_INFEASIBLE = _simplex_pure.STATUS_INFEASIBLE
STATUS_UNBOUNDED = _simplex_pure.STATUS_UNBOUNDED

try:
    from . import _simplex_cy  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on the build
    _simplex_cy = None
    HAVE_COMPILED = False

_FORCE_PURE = os.environ.get("BCLAB_FORCE_PURE", "") == "1"

_active = _simplex_pure if (_FORCE_PURE or not HAVE_COMPILED) else _simplex_cy


def active_kernel_name() -> str:
    return "pure" if _active is _simplex_pure else "compiled"


def use_kernel(name: str) -> None:
    """Switch the process-wide kernel ("pure" or "compiled")."""
    global _active
    if name == "pure":
        _active = _simplex_pure
    elif name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel is not available")
        _active = _simplex_cy
    else:
        raise ValueError(f"unknown kernel {name!r}")


def simplex_min(A, b, f):
    """Dispatch ``min f.y : Ay = b, y >= 0`` to the active kernel."""
    return _active.simplex_min(A, b, f)
