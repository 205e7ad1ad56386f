"""Kernel dispatch: compiled extension when importable, pure Python otherwise.

Set ``TSTRUCT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

_compiled = None
if os.environ.get("TSTRUCT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable, using pure Python")
        _compiled = None

BACKEND = _compiled.BACKEND if _compiled is not None else _pykernels.BACKEND


def snf(A, nrows, ncols):
    if _compiled is not None:
        try:
            return _compiled.snf(A, nrows, ncols)
        except OverflowError:
            pass
    return _pykernels.snf(A, nrows, ncols)


def snf_diagonal(A, nrows, ncols):
    if _compiled is not None:
        try:
            return _compiled.snf_diagonal(A, nrows, ncols)
        except OverflowError:
            pass
    return _pykernels.snf_diagonal(A, nrows, ncols)


def upset_masks(n, up, down):
    if _compiled is not None and n <= 62:
        return _compiled.upset_masks(n, up, down)
    return _pykernels.upset_masks(n, up, down)
