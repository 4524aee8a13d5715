"""Backend selection for the hot loops.

The compiled extension ``wavelife._core`` is used when it imports; otherwise,
or when the environment variable ``WAVELIFE_BACKEND=python`` is set, the numpy
implementation in ``wavelife._core_py`` is used.
"""
import os

from . import _core_py

try:
    from . import _core as _core_c
except ImportError:  # extension not built
    _core_c = None

ENV_VAR = "WAVELIFE_BACKEND"

_BACKENDS = {"python": _core_py}
if _core_c is not None:
    _BACKENDS["cython"] = _core_c


def available() -> list:
    return sorted(_BACKENDS)


def get(name=None):
    """Return the kernel module for ``name`` (default: best available)."""
    if name is None:
        name = os.environ.get(ENV_VAR) or ("cython" if _core_c is not None else "python")
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {available()}") from None


def active_name() -> str:
    return "cython" if get() is _core_c and _core_c is not None else "python"
