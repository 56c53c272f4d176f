"""Test objectives with analytic gradients and known optima."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimator import Objective
from .rng import RngStream, derive_seed
from .vec import sample_unit_sphere

_X0_SALT = 0x58D1C3A79B42E605


@dataclass
class Problem:
    objective: Objective
    x0: np.ndarray
    name: str
    smoothness: float | None = None  # gradient-Lipschitz constant when known


def geometric_spectrum(d: int) -> np.ndarray:
    """Eigenvalues growing geometrically from 1/d to 1 (condition number d)."""
    t = np.linspace(0.0, 1.0, d)
    return np.power(float(d), t - 1.0)


def initial_on_sphere(d: int, radius: float, init_seed: int) -> np.ndarray:
    rng = RngStream(derive_seed(init_seed, _X0_SALT))
    x0 = sample_unit_sphere(rng, d)
    x0 *= radius
    return x0


def make_paper_quadratic(d: int, init_seed: int = 0, x0_norm: float = 10.0) -> Problem:
    """Diagonal strongly convex quadratic f(x) = sum_i sigma_i x_i^2.

    sigma is the geometric spectrum from 1/d to 1 (condition number exactly d),
    the minimum is 0 at the origin, and the initial iterate is drawn uniformly
    from the radius-``x0_norm`` sphere, deterministically in ``init_seed``.
    The smoothness constant is 2 * max(sigma) = 2.
    """
    if d < 2:
        raise ValueError("quadratic needs d >= 2")
    sigma = geometric_spectrum(d)

    def value(x):
        return float(np.dot(sigma, x * x))

    def grad(x):
        return 2.0 * sigma * x

    obj = Objective(d, value, grad, optimum=(np.zeros(d), 0.0), name=f"quadratic-d{d}")
    obj.sigma = sigma
    x0 = initial_on_sphere(d, x0_norm, init_seed)
    return Problem(obj, x0, f"quadratic:d={d}", smoothness=2.0 * float(sigma[-1]))


def make_sphere(d: int, init_seed: int = 0, x0_norm: float = 10.0) -> Problem:
    """Isotropic convex smoke test: f(x) = ||x||^2."""
    if d < 2:
        raise ValueError("sphere needs d >= 2")

    def value(x):
        return float(np.dot(x, x))

    def grad(x):
        return 2.0 * x

    obj = Objective(d, value, grad, optimum=(np.zeros(d), 0.0), name=f"sphere-d{d}")
    x0 = initial_on_sphere(d, x0_norm, init_seed)
    return Problem(obj, x0, f"sphere:d={d}", smoothness=2.0)


def make_rosenbrock(d: int) -> Problem:
    """Nonconvex smooth smoke test; minimum 0 at the all-ones point.

    Classic start: alternating (-1.2, 1.0, ...).
    """
    if d < 2:
        raise ValueError("rosenbrock needs d >= 2")

    def value(x):
        return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))

    def grad(x):
        g = np.zeros_like(x)
        g[:-1] = -400.0 * x[:-1] * (x[1:] - x[:-1] ** 2) - 2.0 * (1.0 - x[:-1])
        g[1:] += 200.0 * (x[1:] - x[:-1] ** 2)
        return g

    obj = Objective(d, value, grad, optimum=(np.ones(d), 0.0), name=f"rosenbrock-d{d}")
    x0 = np.empty(d, dtype=np.float64)
    x0[0::2] = -1.2
    x0[1::2] = 1.0
    return Problem(obj, x0, f"rosenbrock:d={d}")


_MAKERS = {
    "quadratic": make_paper_quadratic,
    "sphere": make_sphere,
    "rosenbrock": make_rosenbrock,
}


def problem_names() -> list[str]:
    return sorted(_MAKERS)


def make_problem(name: str, **params) -> Problem:
    if name not in _MAKERS:
        raise ValueError(f"unknown problem {name!r}; have {problem_names()}")
    return _MAKERS[name](**params)


def parse_problem_spec(spec: str) -> tuple[str, dict]:
    """Parse 'name:key=value,key=value' (e.g. 'quadratic:d=1000')."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    if name not in _MAKERS:
        raise ValueError(f"unknown problem {name!r}; have {problem_names()}")
    params: dict = {}
    if rest.strip():
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"malformed problem parameter {item!r}")
            key = key.strip()
            if key in ("d", "init_seed"):
                params[key] = int(value)
            elif key == "x0_norm":
                params[key] = float(value)
            else:
                raise ValueError(f"unknown problem parameter {key!r}")
    return name, params
