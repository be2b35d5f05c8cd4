"""JIT backend selection.

Set ``IDXDICT_DISABLE_NUMBA=1`` to force the pure-numpy kernels. When numba
is not importable the numpy path is used regardless.
"""
import os

_disabled = os.environ.get("IDXDICT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _disabled:
        raise ImportError
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "boundscheck": False,
    "error_model": "numpy",
}
