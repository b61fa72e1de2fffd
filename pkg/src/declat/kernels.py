"""Kernel backend selection.

Uses the compiled ``_ckernels`` extension when it was built, otherwise the
pure-Python ``_pykernels``.  Set ``DECLAT_PURE_PYTHON=1`` to force the
fallback.  Posets wider than :data:`MAX_BITS` always use the fallback.
"""

from __future__ import annotations

import os
from array import array

from . import _pykernels

_c = None
if not os.environ.get("DECLAT_PURE_PYTHON"):
    try:
        from . import _ckernels as _c
    except ImportError:
        _c = None

BACKEND = "cython" if _c is not None else "python"
MAX_BITS = 62
EMPTY_LO = _pykernels.EMPTY_LO
EMPTY_HI = _pykernels.EMPTY_HI


def _pick(n):
    if _c is not None and n <= MAX_BITS:
        return _c
    return _pykernels


def transitive_closure(n, pairs):
    return _pick(n).transitive_closure(n, list(pairs))


def lower_ideals(down):
    return _pick(len(down)).lower_ideals(down)


def linear_extensions(down):
    return _pick(len(down)).linear_extensions(down)


def count_linear_extensions(down):
    return _pick(len(down)).count_linear_extensions(down)


def aisle_signature(lows, highs, thresholds, ms):
    if _c is not None:
        return _c.aisle_signature(
            array("q", lows), array("q", highs), array("q", thresholds), array("q", ms)
        )
    return _pykernels.aisle_signature(lows, highs, thresholds, ms)
