"""Cone-restricted search directions.

Two constructions of a direction on the radius-sqrt(d) sphere concentrated
around an axis m (the momentum):

* ``cone_direction_fast`` - the production form used by the optimizer,
  z = sqrt(d) * (cos(theta) * m/||m|| + sin(theta) * u).  The random part u is
  deliberately *not* orthogonalized against the axis and the opening angle is
  pinned at theta rather than sampled: in high dimension a uniform u is nearly
  orthogonal to any fixed axis, and the angle of a uniform cone point
  concentrates at the rim.  z is not renormalized; its squared norm is
  d * (1 + sin(2 theta) <m_hat, u>) in sphere mode.
* ``cone_direction_exact`` - the verification oracle: the angle gamma is drawn
  from its true density sin(gamma)^(d-1) on [0, theta] (inverse CDF on a
  numerical quadrature, log-domain for stability at large d) and the random
  part is Gram-Schmidt orthogonalized, so z is uniform on the cone cap.

Endpoint angles snap to exact coefficients: theta == pi/2 gives (cos, sin) =
(0, 1) and theta == 0 gives (1, 0), so the reductions to plain sphere sampling
and to the pure axis direction hold bitwise, not just to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, pi, sin, sqrt

import numpy as np

from . import kernels
from .rng import RngStream
from .vec import as_vector, sample_unit_sphere

HALF_PI = pi / 2.0

DIST_SPHERE = "sphere"
DIST_GAUSSIAN = "gaussian"
DISTS = (DIST_SPHERE, DIST_GAUSSIAN)

#: Axis norms below this fall back to the unbiased direction (never divide by ~0).
AXIS_NORM_FLOOR = 1e-300


def cone_coefficients(theta: float) -> tuple[float, float]:
    """(cos theta, sin theta) with exact values at the domain endpoints."""
    if not 0.0 <= theta <= HALF_PI:
        raise ValueError(f"theta must be in [0, pi/2], got {theta}")
    if theta == 0.0:
        return 1.0, 0.0
    if theta == HALF_PI:
        return 0.0, 1.0
    return cos(theta), sin(theta)


@dataclass
class ConeDirectionSpec:
    """Half-angle, axis and random-part distribution of the fast sampler."""

    theta: float
    axis: np.ndarray
    dist: str = DIST_SPHERE

    def __post_init__(self):
        if not 0.0 <= self.theta <= HALF_PI:
            raise ValueError(f"theta must be in [0, pi/2], got {self.theta}")
        if self.dist not in DISTS:
            raise ValueError(f"dist must be one of {DISTS}, got {self.dist!r}")
        self.axis = as_vector(self.axis)


def cone_direction_fast(spec: ConeDirectionSpec, rng: RngStream, d: int) -> np.ndarray:
    """Draw z = sqrt(d) cos(theta) m_hat + [sqrt(d) u | g] sin(theta).

    In sphere mode the random part is sqrt(d) times a uniform unit vector; in
    gaussian mode it is a raw standard normal vector (same radial scale in high
    dimension, no normalization).  The random draw always occurs, even when
    sin(theta) == 0, so changing theta does not shift the stream.  A zero-norm
    axis falls back to the unbiased direction (cos coefficient 0).
    """
    if spec.axis.shape[0] != d:
        raise ValueError(f"axis length {spec.axis.shape[0]} != d={d}")
    K = kernels.active()
    ct, st = cone_coefficients(spec.theta)
    rd = sqrt(d)

    if spec.dist == DIST_SPHERE:
        w = sample_unit_sphere(rng, d)
        b = rd * st
    else:
        w = rng.normals(d)
        b = st

    anorm = float(np.sqrt(K.dot(spec.axis, spec.axis)))
    if ct == 0.0 or anorm < AXIS_NORM_FLOOR:
        if anorm < AXIS_NORM_FLOOR:
            # Degenerate axis: fall back to the pure unbiased direction at
            # full radius, independent of theta.
            b = rd if spec.dist == DIST_SPHERE else 1.0
        if b != 1.0:
            K.scale(w, b)
        return w

    a = rd * ct / anorm
    if st == 0.0:
        z = spec.axis.copy()
        K.scale(z, a)
        return z
    K.lincomb(w, a, spec.axis, b, w)
    return w


def sample_orthogonal_complement(axis, rng: RngStream) -> np.ndarray:
    """Uniform unit vector in the subspace orthogonal to ``axis``.

    Gaussian draw, project out the axis component, normalize.  A collapsed
    projection (probability zero) triggers a redraw.
    """
    axis = as_vector(axis)
    d = axis.shape[0]
    if d < 2:
        raise ValueError("orthogonal complement sampling needs d >= 2")
    K = kernels.active()
    anorm2 = float(K.dot(axis, axis))
    if anorm2 <= 0.0:
        raise ValueError("axis must have nonzero norm")
    while True:
        g = rng.normals(d)
        K.axpy(g, -float(K.dot(g, axis)) / anorm2, axis)
        n = float(np.sqrt(K.dot(g, g)))
        if n > 0.0:
            K.scale(g, 1.0 / n)
            return g


class ConeAngleSampler:
    """Inverse-CDF sampler for the cone opening angle.

    The angle between a uniform point on the cone cap and the axis has density
    proportional to sin(gamma)^(d-1) on [0, theta].  The CDF is tabulated on a
    uniform grid by trapezoidal quadrature of exp((d-1) log sin(gamma) - max),
    which stays representable for any d.
    """

    GRID = 4096

    def __init__(self, d: int, theta: float):
        if d < 2:
            raise ValueError("exact cone sampling needs d >= 2")
        if not 0.0 < theta <= HALF_PI:
            raise ValueError(f"theta must be in (0, pi/2], got {theta}")
        self.d = d
        self.theta = theta
        g = np.linspace(0.0, theta, self.GRID + 1)
        with np.errstate(divide="ignore"):
            logw = (d - 1) * np.log(np.sin(g))
        logw[0] = -np.inf
        w = np.exp(logw - logw[-1])
        cdf = np.concatenate(([0.0], np.cumsum((w[1:] + w[:-1]) * 0.5)))
        self._gamma = g
        self._cdf = cdf / cdf[-1]

    def sample(self, rng: RngStream, n: int) -> np.ndarray:
        return np.interp(rng.uniforms(n), self._cdf, self._gamma)

    def cdf(self, gamma: float) -> float:
        """Tabulated P(angle <= gamma)."""
        return float(np.interp(gamma, self._gamma, self._cdf))


def angle_tail_bound(theta: float, theta_prime: float, d: int) -> float:
    """Closed-form upper bound for P(gamma <= theta') of the exact sampler.

    With s = (theta + theta')/2:  (theta' / (theta - s)) * (sin theta' / sin s)^(d-1).
    """
    if not 0.0 < theta_prime < theta:
        raise ValueError("requires 0 < theta' < theta")
    s = 0.5 * (theta + theta_prime)
    return (theta_prime / (theta - s)) * (sin(theta_prime) / sin(s)) ** (d - 1)


def cone_direction_exact(theta: float, axis, rng: RngStream, d: int,
                         sampler: ConeAngleSampler | None = None) -> np.ndarray:
    """Uniform draw on (cone of half-angle theta around axis) on the sqrt(d)-sphere.

    Verification oracle only: draws the true opening angle, then an exactly
    orthogonal random part.  ``sampler`` can be passed to reuse the CDF table.
    """
    axis = as_vector(axis)
    if axis.shape[0] != d:
        raise ValueError(f"axis length {axis.shape[0]} != d={d}")
    if d < 2:
        raise ValueError("exact cone sampling needs d >= 2")
    K = kernels.active()
    anorm = float(np.sqrt(K.dot(axis, axis)))
    if anorm <= 0.0:
        raise ValueError("axis must have nonzero norm")
    rd = sqrt(d)
    if theta == 0.0:
        z = axis.copy()
        K.scale(z, rd / anorm)
        return z
    if sampler is None or sampler.d != d or sampler.theta != theta:
        sampler = ConeAngleSampler(d, theta)
    gamma = float(sampler.sample(rng, 1)[0])
    u_perp = sample_orthogonal_complement(axis, rng)
    z = np.empty(d, dtype=np.float64)
    K.lincomb(z, rd * cos(gamma) / anorm, axis, rd * sin(gamma), u_perp)
    return z
