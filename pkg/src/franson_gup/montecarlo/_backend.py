"""Pick the tally kernel at import time.

The compiled extension is used when it was built; otherwise the numpy
version. Setting ``FRANSON_GUP_BACKEND=python`` forces the fallback.
"""
from __future__ import annotations

import os

from . import _pykernel

BACKENDS = {"python": _pykernel.tally}

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None
else:
    BACKENDS["cython"] = _ckernel.tally

_requested = os.environ.get("FRANSON_GUP_BACKEND", "").strip().lower()
if _requested and _requested not in ("python", "cython"):
    raise ImportError(f"FRANSON_GUP_BACKEND must be 'python' or 'cython', got {_requested!r}")
if _requested == "cython" and "cython" not in BACKENDS:
    raise ImportError("FRANSON_GUP_BACKEND=cython but the compiled kernel is not built")

BACKEND = _requested or ("cython" if "cython" in BACKENDS else "python")
tally = BACKENDS[BACKEND]


def get_tally(name: str | None = None):
    if name is None:
        return tally
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available; have {sorted(BACKENDS)}") from None
