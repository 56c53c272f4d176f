"""Two-point directional gradient estimation.

``zoge`` is the central-difference estimate
``(f(x + lam*z) - f(x - lam*z)) / (2*lam) * z`` - two function evaluations, no
gradient access.  ``zoge_limit`` is its analytic small-smoothing limit
``(z . grad f(x)) z``, used by the verification suite so moment checks carry no
finite-difference bias.  On any quadratic the two coincide exactly for every
lam (the central difference has no odd-order error and quadratics have zero
third derivative).
"""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .vec import as_vector

#: Default smoothing for optimizer runs; the synthetic benchmark preset uses 1e-2.
DEFAULT_SMOOTHING = 1e-3


class NonFiniteValueError(RuntimeError):
    """Objective returned NaN/Inf; carries the offending point."""

    def __init__(self, value: float, x: np.ndarray):
        super().__init__(f"objective evaluated to {value!r}")
        self.value = value
        self.x = x


class Objective:
    """Value oracle with optional analytic gradient and known optimum.

    ``value`` is deterministic for fixed x and counts every call in
    ``eval_count`` (gradient calls are not counted; they exist for
    verification and diagnostics only).
    """

    def __init__(self, dim: int, value_fn: Callable[[np.ndarray], float],
                 grad_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 optimum: Optional[tuple[Optional[np.ndarray], float]] = None,
                 name: str = "objective"):
        self.dim = int(dim)
        self._value_fn = value_fn
        self._grad_fn = grad_fn
        self.optimum = optimum
        self.name = name
        self.eval_count = 0

    @property
    def has_grad(self) -> bool:
        return self._grad_fn is not None

    @property
    def f_star(self) -> Optional[float]:
        return None if self.optimum is None else self.optimum[1]

    def value(self, x: np.ndarray) -> float:
        self.eval_count += 1
        return float(self._value_fn(x))

    def checked_value(self, x: np.ndarray) -> float:
        v = self.value(x)
        if not np.isfinite(v):
            raise NonFiniteValueError(v, np.array(x, copy=True))
        return v

    def grad(self, x: np.ndarray) -> np.ndarray:
        if self._grad_fn is None:
            raise ValueError(f"{self.name} has no analytic gradient")
        return as_vector(self._grad_fn(x))

    def reset_eval_count(self) -> None:
        self.eval_count = 0


def zoge_coefficient(f: Objective, x: np.ndarray, z: np.ndarray, lam: float) -> float:
    """The scalar (f(x + lam z) - f(x - lam z)) / (2 lam); exactly two evaluations.

    Evaluation points are scratch buffers, so x is untouched (bitwise).
    """
    if lam <= 0.0:
        raise ValueError(f"smoothing must be positive, got {lam}")
    x = as_vector(x)
    z = as_vector(z)
    if x.shape[0] != z.shape[0]:
        raise ValueError("x and z length mismatch")
    step = lam * z
    f_plus = f.checked_value(x + step)
    f_minus = f.checked_value(x - step)
    return (f_plus - f_minus) / (2.0 * lam)


def zoge(f: Objective, x, z, lam: float = DEFAULT_SMOOTHING) -> np.ndarray:
    """Two-point estimate of the gradient along z: coefficient * z."""
    z = as_vector(z)
    return zoge_coefficient(f, x, z, lam) * z


def zoge_limit(f: Objective, x, z) -> np.ndarray:
    """Small-smoothing limit (z . grad f(x)) z; requires the analytic gradient."""
    x = as_vector(x)
    z = as_vector(z)
    a = f.grad(x)
    return float(np.dot(z, a)) * z
