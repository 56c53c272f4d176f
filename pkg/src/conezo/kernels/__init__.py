"""Kernel backend selection.

Two interchangeable backends implement the hot kernels (counter-indexed random
streams and the fused vector primitives): ``_ckern`` (Cython) and ``pykern``
(numpy).  The compiled backend is preferred when importable; set
``CONEZO_KERNELS=python`` or ``CONEZO_KERNELS=ext`` to force one.  ``use()``
swaps the active backend at runtime, which the benchmark CLI uses to compare
them in one process.
"""
from __future__ import annotations

import os

from . import pykern

try:
    from . import _ckern
except ImportError:
    _ckern = None

_BY_NAME = {"python": pykern}
if _ckern is not None:
    _BY_NAME["ext"] = _ckern


def available() -> list[str]:
    return sorted(_BY_NAME)


def _initial():
    name = os.environ.get("CONEZO_KERNELS", "auto").strip().lower()
    if name in ("", "auto"):
        return _ckern if _ckern is not None else pykern
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(
            f"CONEZO_KERNELS={name!r}: expected one of {available()} or 'auto'"
        ) from None


_active = _initial()


def active():
    """The backend module currently in use."""
    return _active


def use(name: str) -> str:
    """Select a backend by name ('python' or 'ext'); returns the previous name."""
    global _active
    if name not in _BY_NAME:
        raise ValueError(f"unknown kernel backend {name!r}; have {available()}")
    previous = _active.BACKEND
    _active = _BY_NAME[name]
    return previous
