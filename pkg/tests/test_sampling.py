"""Cone direction constructions: fast path, exact oracle, and their agreement."""
import numpy as np
import pytest
from math import cos, pi, sqrt
from scipy import stats

from conezo.rng import RngStream, normal_stride
from conezo.sampling import (ConeAngleSampler, ConeDirectionSpec, angle_tail_bound,
                             cone_coefficients, cone_direction_exact,
                             cone_direction_fast, sample_orthogonal_complement)
from conezo.vec import dot, norm, sample_unit_sphere


def test_cone_coefficients_endpoints_exact():
    assert cone_coefficients(0.0) == (1.0, 0.0)
    assert cone_coefficients(pi / 2) == (0.0, 1.0)
    c, s = cone_coefficients(1.3)
    assert c == cos(1.3)
    with pytest.raises(ValueError):
        cone_coefficients(-0.1)
    with pytest.raises(ValueError):
        cone_coefficients(2.0)


def test_fast_theta_half_pi_reduces_to_sphere_bitwise():
    d = 1000
    axis = sample_unit_sphere(RngStream(1), d)
    spec = ConeDirectionSpec(theta=pi / 2, axis=axis, dist="sphere")
    z = cone_direction_fast(spec, RngStream(42), d)
    u = sample_unit_sphere(RngStream(42), d)
    assert np.array_equal(z, sqrt(d) * u)
    assert abs(norm(z) - sqrt(d)) < 1e-12 * sqrt(d)


def test_fast_theta_zero_is_deterministic_but_consumes_stream():
    d = 64
    axis = 3.7 * sample_unit_sphere(RngStream(2), d)
    rng = RngStream(9)
    spec = ConeDirectionSpec(theta=0.0, axis=axis, dist="sphere")
    z = cone_direction_fast(spec, rng, d)
    assert rng.counter == normal_stride(d)  # draw still consumed: stream parity
    expected = sqrt(d) * axis / norm(axis)
    assert np.allclose(z, expected, rtol=1e-15, atol=0)
    z2 = cone_direction_fast(spec, RngStream(777), d)
    assert np.array_equal(z, z2)  # independent of the stream


def test_fast_mean_alignment_matches_cos_theta():
    # E <z, m_hat>/sqrt(d) = cos(theta): the random part has zero mean overlap.
    d, n, theta = 10_000, 10_000, 1.35
    axis = sample_unit_sphere(RngStream(3), d)
    rng = RngStream(4)
    spec = ConeDirectionSpec(theta=theta, axis=axis, dist="sphere")
    acc = 0.0
    for _ in range(n):
        acc += dot(cone_direction_fast(spec, rng, d), axis)
    assert abs(acc / n / sqrt(d) - cos(theta)) < 0.005


def test_fast_norm_squared_identity_median():
    # ||z||^2/d - 1 = sin(2 theta) <m_hat, u>: median |.| is O(1/sqrt(d)).
    d, n, theta = 10_000, 10_000, 1.0
    axis = sample_unit_sphere(RngStream(5), d)
    spec = ConeDirectionSpec(theta=theta, axis=axis, dist="sphere")
    rng = RngStream(6)
    devs = np.empty(n)
    for i in range(n):
        z = cone_direction_fast(spec, rng, d)
        devs[i] = abs(dot(z, z) / d - 1.0)
    assert np.median(devs) <= 3.0 / sqrt(d)


def test_fast_gaussian_mode_reduces_to_raw_normals():
    d = 501
    axis = sample_unit_sphere(RngStream(7), d)
    spec = ConeDirectionSpec(theta=pi / 2, axis=axis, dist="gaussian")
    z = cone_direction_fast(spec, RngStream(8), d)
    g = RngStream(8).normals(d)
    assert np.array_equal(z, g)


def test_fast_zero_axis_fallback():
    d = 32
    spec = ConeDirectionSpec(theta=0.7, axis=np.zeros(d), dist="sphere")
    z = cone_direction_fast(spec, RngStream(10), d)
    assert np.all(np.isfinite(z))
    assert abs(norm(z) - sqrt(d)) < 1e-9  # pure unbiased direction


def test_prop1_overlap_is_asymptotically_normal():
    # sqrt(d) <m_hat, u> against |N(0,1)| via KS.
    d, n = 10_000, 10_000
    rng = RngStream(11)
    overlaps = np.empty(n)
    batch = 250
    for k in range(n // batch):
        g = rng.normals(batch * d).reshape(batch, d)
        overlaps[k * batch:(k + 1) * batch] = np.abs(g[:, 0]) / np.linalg.norm(g, axis=1)
    scaled = overlaps * sqrt(d)
    p = stats.kstest(scaled, lambda t: 2.0 * stats.norm.cdf(t) - 1.0).pvalue
    assert p > 0.001


class TestOrthogonalComplement:
    def test_orthogonal_to_axis(self):
        axis = np.zeros(16)
        axis[0] = 1.0
        u = sample_orthogonal_complement(axis, RngStream(1))
        assert abs(u[0]) < 1e-10
        assert abs(norm(u) - 1.0) < 1e-10

    def test_orthogonality_general_axis(self):
        rng = RngStream(2)
        axis = 2.5 * sample_unit_sphere(rng, 300)
        for _ in range(10):
            u = sample_orthogonal_complement(axis, rng)
            assert abs(dot(u, axis)) < 1e-10 * norm(axis)

    def test_zero_mean(self):
        d, n = 500, 10_000
        rng = RngStream(3)
        axis = sample_unit_sphere(rng, d)
        acc = np.zeros(d)
        for _ in range(n):
            acc += sample_orthogonal_complement(axis, rng)
        assert norm(acc / n) <= 0.05

    def test_requires_valid_axis(self):
        with pytest.raises(ValueError):
            sample_orthogonal_complement(np.zeros(4), RngStream(0))
        with pytest.raises(ValueError):
            sample_orthogonal_complement(np.ones(1), RngStream(0))


class TestExactSampler:
    def test_norm_is_sqrt_d(self):
        for d, theta in ((2, 1.0), (37, 0.4), (1000, 1.5)):
            axis = sample_unit_sphere(RngStream(d), d)
            z = cone_direction_exact(theta, axis, RngStream(d + 1), d)
            assert abs(norm(z) - sqrt(d)) < 1e-10 * sqrt(d)

    def test_theta_zero_returns_scaled_axis(self):
        axis = np.array([0.0, 2.0, 0.0])
        z = cone_direction_exact(0.0, axis, RngStream(0), 3)
        assert np.allclose(z, [0.0, sqrt(3.0), 0.0], rtol=1e-15)

    def test_d1_rejected(self):
        with pytest.raises(ValueError):
            cone_direction_exact(1.0, np.ones(1), RngStream(0), 1)

    def test_angle_cdf_d2_closed_form(self):
        # density ~ sin(gamma) on [0, pi/2]: CDF = 1 - cos(gamma)
        sampler = ConeAngleSampler(2, pi / 2)
        gammas = sampler.sample(RngStream(21), 10_000)
        p = stats.kstest(gammas, lambda g: 1.0 - np.cos(g)).pvalue
        assert p > 0.001

    def test_angle_concentrates_high_d(self):
        sampler = ConeAngleSampler(1000, 1.0)
        gammas = sampler.sample(RngStream(22), 10_000)
        assert np.mean(gammas <= 0.9) < 1e-3

    def test_tail_bound_respected(self):
        for d in (10, 100, 1000):
            sampler = ConeAngleSampler(d, 1.0)
            gammas = sampler.sample(RngStream(23 + d), 10_000)
            phat = float(np.mean(gammas <= 0.9))
            assert phat <= angle_tail_bound(1.0, 0.9, d)

    def test_angle_distribution_matches_fast_at_high_d(self):
        d, theta, n = 10_000, 1.35, 10_000
        axis = sample_unit_sphere(RngStream(31), d)
        rng = RngStream(32)
        spec = ConeDirectionSpec(theta=theta, axis=axis, dist="sphere")
        acc = 0.0
        for _ in range(n):
            z = cone_direction_fast(spec, rng, d)
            acc += dot(z, axis) / norm(z)
        sampler = ConeAngleSampler(d, theta)
        exact_mean = float(np.mean(np.cos(sampler.sample(RngStream(33), n))))
        assert abs(acc / n - exact_mean) < 0.01
