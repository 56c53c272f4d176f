"""Dense 64-bit vectors and random direction draws.

Vectors are flat contiguous ``float64`` numpy arrays.  All reductions go
through the active kernel backend so their summation order is fixed within a
process, and all public operations leave entries finite.
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .rng import RngStream


def as_vector(x) -> np.ndarray:
    """Coerce to a contiguous 1-D float64 array (copying only if needed)."""
    v = np.ascontiguousarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    return v


def _check_pair(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")


def dot(x, y) -> float:
    x = as_vector(x)
    y = as_vector(y)
    _check_pair(x, y)
    return float(kernels.active().dot(x, y))


def norm(x) -> float:
    x = as_vector(x)
    return float(np.sqrt(kernels.active().dot(x, x)))


def axpy(alpha: float, x, y) -> np.ndarray:
    """y += alpha * x in place; returns y."""
    x = as_vector(x)
    y = as_vector(y)
    _check_pair(x, y)
    kernels.active().axpy(y, float(alpha), x)
    return y


def scale(x, alpha: float) -> np.ndarray:
    """x *= alpha in place; returns x."""
    x = as_vector(x)
    kernels.active().scale(x, float(alpha))
    return x


def lincomb(out, a: float, x, b: float, y) -> np.ndarray:
    """out = a*x + b*y elementwise; ``out`` may alias ``x`` or ``y``."""
    out = as_vector(out)
    x = as_vector(x)
    y = as_vector(y)
    _check_pair(out, x)
    _check_pair(out, y)
    kernels.active().lincomb(out, float(a), x, float(b), y)
    return out


def sample_gaussian(rng: RngStream, d: int) -> np.ndarray:
    """d i.i.d. standard normals; advances the stream by ``d + d%2`` counters."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return rng.normals(d)


def sample_unit_sphere(rng: RngStream, d: int) -> np.ndarray:
    """Uniform draw on the unit sphere: normal draw scaled by 1/norm.

    The all-zero draw has probability zero but is guarded by a redraw.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    while True:
        g = rng.normals(d)
        n = float(np.sqrt(kernels.active().dot(g, g)))
        if n > 0.0:
            kernels.active().scale(g, 1.0 / n)
            return g
