"""Backend selection for the batch rank kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``SKEWMRD_PURE_PYTHON=1`` is set, the numpy versions are
used.  ``BACKEND`` names the active choice.
"""

from __future__ import annotations

import os

from . import _kernels_py

_py = _kernels_py
_compiled = None

if os.environ.get("SKEWMRD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _compiled = None

_impl = _compiled if _compiled is not None else _py
BACKEND = "cython" if _compiled is not None else "python"

batch_rank_mod_p = _impl.batch_rank_mod_p
rank_mod_p = _impl.rank_mod_p
batch_rank_ext = _impl.batch_rank_ext


def backends() -> dict:
    """Every importable backend module by name, for benchmarks and agreement tests."""
    out = {"python": _py}
    if _compiled is not None:
        out["cython"] = _compiled
    else:
        try:
            from . import _kernels  # type: ignore[attr-defined]
            out["cython"] = _kernels
        except ImportError:
            pass
    return out
