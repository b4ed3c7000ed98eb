"""Hot statevector kernels with a switchable backend.

The backend is chosen once at import from ``QUANTGRAD_KERNELS``
(``numba`` or ``numpy``). Without the variable, numba is used when it
imports cleanly. Both backends are always importable as
``kernels.numpy_backend`` / ``kernels.numba_backend`` (the latter may be
``None``) so tests and benchmarks can compare them directly.
"""
import os
import warnings

from . import _numpy as numpy_backend

try:
    from . import _numba as numba_backend
except ImportError:  # pragma: no cover - exercised only without numba
    numba_backend = None

_FUNCS = ("apply_1q", "apply_mcx", "apply_mcphase", "apply_swap", "apply_phases")


def _resolve(name):
    name = (name or "").strip().lower()
    if name == "numpy":
        return "numpy", numpy_backend
    if name in ("", "numba"):
        if numba_backend is not None:
            return "numba", numba_backend
        if name == "numba":
            warnings.warn("QUANTGRAD_KERNELS=numba but numba is unavailable; using numpy")
        return "numpy", numpy_backend
    raise ValueError(f"unknown kernel backend {name!r} (expected 'numba' or 'numpy')")


BACKEND, _impl = _resolve(os.environ.get("QUANTGRAD_KERNELS"))

apply_1q = _impl.apply_1q
apply_mcx = _impl.apply_mcx
apply_mcphase = _impl.apply_mcphase
apply_swap = _impl.apply_swap
apply_phases = _impl.apply_phases


def use(name):
    """Switch the active backend at runtime; returns the previous name."""
    global BACKEND, _impl
    previous = BACKEND
    BACKEND, _impl = _resolve(name)
    g = globals()
    for fn in _FUNCS:
        g[fn] = getattr(_impl, fn)
    return previous
