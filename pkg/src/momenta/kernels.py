"""Kernel selection: compiled extension if importable, else pure Python.

Set ``MOMENTA_KERNELS=python`` to force the fallback.
"""
import os
from array import array

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("MOMENTA_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        pass


def pack_exponents(exponents) -> array:
    """Flatten an ``n x n`` exponent table into the buffer the kernels take."""
    return array("i", [e for row in exponents for e in row])


def get(backend: str | None = None):
    """Return the kernel module for ``backend`` (``"python"``/``"cython"``)."""
    if backend is None or backend == BACKEND:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {backend!r}")


word_mul = _impl.word_mul
word_star = _impl.word_star
entry_block = _impl.entry_block
