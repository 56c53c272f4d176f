"""NumPy implementation of the kernel API shared with the compiled backend.

Random stream contract
----------------------
All randomness is a pure function of ``(seed, counter)``.  Counter ``c`` maps to
a 64-bit word ``mix(key(seed) + (c+1)*GOLDEN)`` where ``mix`` is the SplitMix64
finalizer; this is exactly the SplitMix64 sequence started at state ``key(seed)``.

* ``uniform_fill``: entry ``i`` uses counter ``counter+i`` (stride 1/entry) and
  lies strictly inside (0, 1).
* ``normal_fill``: pairwise Box-Muller.  Pair ``j`` consumes counters
  ``counter+2j`` and ``counter+2j+1`` and yields entries ``2j`` (cos branch) and
  ``2j+1`` (sin branch).  A draw of ``n`` entries therefore consumes exactly
  ``n + (n % 2)`` counters; regenerating from the same base counter reproduces
  the draw bitwise.

Reduction order is fixed: stream sums accumulate chunk dots in ascending chunk
order with a constant chunk size, and ``dot`` delegates to ``numpy.dot``.  The
order never depends on call context, which is what the replay/buffered
trajectory-equality contracts require.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_R30 = np.uint64(30)
_R27 = np.uint64(27)
_R31 = np.uint64(31)
_R11 = np.uint64(11)
_HALF = np.float64(0.5)
_INV53 = np.float64(2.0**-53)
_TWO_PI = 2.0 * np.pi
_MASK = 0xFFFFFFFFFFFFFFFF

# Even so Box-Muller pairs never straddle a chunk boundary.
_CHUNK = 1 << 18


def _mix_arr(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _R30)) * _MIX1
    z = (z ^ (z >> _R27)) * _MIX2
    return z ^ (z >> _R31)


def _mix_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_key(seed: int) -> int:
    """Hash a user seed into the stream key (identical across backends)."""
    return _mix_int(((seed & _MASK) + 1) * 0x9E3779B97F4A7C15)


def _words(seed: int, counter: int, n: int) -> np.ndarray:
    key = np.uint64(stream_key(seed))
    c = np.arange(counter + 1, counter + n + 1, dtype=np.uint64)
    return _mix_arr(key + c * _GOLDEN)


def _uniform_chunk(seed: int, counter: int, n: int) -> np.ndarray:
    w = _words(seed, counter, n)
    return ((w >> _R11).astype(np.float64) + _HALF) * _INV53


def uniform_fill(out: np.ndarray, seed: int, counter: int) -> None:
    n = out.shape[0]
    for k0 in range(0, n, _CHUNK):
        k1 = min(k0 + _CHUNK, n)
        out[k0:k1] = _uniform_chunk(seed, counter + k0, k1 - k0)


def _normal_chunk(seed: int, counter: int, n: int) -> np.ndarray:
    """``n`` normals whose pair grid starts at ``counter`` (``n`` may be odd
    only for the final chunk of a draw)."""
    npairs = (n + 1) // 2
    u = _uniform_chunk(seed, counter, 2 * npairs)
    r = np.sqrt(-2.0 * np.log(u[0::2]))
    phi = _TWO_PI * u[1::2]
    block = np.empty(2 * npairs, dtype=np.float64)
    block[0::2] = r * np.cos(phi)
    block[1::2] = r * np.sin(phi)
    return block[:n]


def normal_fill(out: np.ndarray, seed: int, counter: int) -> None:
    n = out.shape[0]
    for k0 in range(0, n, _CHUNK):
        k1 = min(k0 + _CHUNK, n)
        out[k0:k1] = _normal_chunk(seed, counter + k0, k1 - k0)


def normal_sumsq(seed: int, counter: int, n: int) -> float:
    total = 0.0
    for k0 in range(0, n, _CHUNK):
        k1 = min(k0 + _CHUNK, n)
        block = _normal_chunk(seed, counter + k0, k1 - k0)
        total += float(np.dot(block, block))
    return total


def normal_axpy(y: np.ndarray, alpha: float, seed: int, counter: int) -> None:
    """y += alpha * stream, regenerating the stream instead of storing it."""
    n = y.shape[0]
    for k0 in range(0, n, _CHUNK):
        k1 = min(k0 + _CHUNK, n)
        block = _normal_chunk(seed, counter + k0, k1 - k0)
        block *= alpha
        y[k0:k1] += block


def dot(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.dot(x, y))


def axpy(y: np.ndarray, alpha: float, x: np.ndarray) -> None:
    y += alpha * x


def scale(x: np.ndarray, alpha: float) -> None:
    x *= alpha


def lincomb(out: np.ndarray, a: float, x: np.ndarray, b: float, y: np.ndarray) -> None:
    """out = a*x + b*y with per-element rounding fl(fl(a*x) + fl(b*y)).

    ``out`` may alias ``x`` or ``y``.
    """
    tmp = b * y
    np.multiply(x, a, out=out)
    out += tmp
