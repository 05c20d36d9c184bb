"""Backend selection: compiled kernels with a pure-Python fallback.

The compiled extension accelerates the uninstrumented decision paths
(the ones used when no cost simulator and no report are requested).
Both backends expose the same protocol and produce identical results;
the environment variable ``LOGSHAVE_FORCE_PY`` forces the fallback.

Protocol: each ``*_decide`` function returns ``NotImplemented`` when it
does not support the inputs (the caller then falls through to the
instrumented implementation), ``None`` for a no verdict, and a witness
mask (int) for a yes verdict.
"""

from __future__ import annotations

import os

if os.environ.get("LOGSHAVE_FORCE_PY"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:  # pragma: no cover - build-environment dependent
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
