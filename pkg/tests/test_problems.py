"""Test objectives: spectra, optima, initial iterates, gradient cross-checks."""
import numpy as np
import pytest

from conezo.problems import (geometric_spectrum, make_paper_quadratic, make_problem,
                             make_rosenbrock, make_sphere, parse_problem_spec)
from conezo.rng import RngStream
from conezo.vec import sample_unit_sphere


def central_fd(f, x, lam=1e-6):
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = lam
        g[i] = (f(x + e) - f(x - e)) / (2.0 * lam)
    return g


def test_spectrum_condition_number_exact():
    sigma = geometric_spectrum(1000)
    assert sigma[-1] / sigma[0] == 1000.0
    assert np.all(np.diff(sigma) > 0)
    assert sigma[0] == pytest.approx(1e-3, rel=1e-15)


def test_quadratic_smoothness_and_optimum():
    prob = make_paper_quadratic(1000, init_seed=0)
    assert prob.smoothness == 2.0
    assert prob.objective.f_star == 0.0
    assert prob.objective.value(np.zeros(1000)) == 0.0


def test_quadratic_x0_norm_and_determinism():
    p1 = make_paper_quadratic(1000, init_seed=5)
    p2 = make_paper_quadratic(1000, init_seed=5)
    p3 = make_paper_quadratic(1000, init_seed=6)
    assert abs(np.linalg.norm(p1.x0) - 10.0) < 1e-10
    assert np.array_equal(p1.x0, p2.x0)
    assert not np.array_equal(p1.x0, p3.x0)


def test_quadratic_initial_value_rayleigh_bounds():
    for seed in range(5):
        prob = make_paper_quadratic(1000, init_seed=seed)
        f0 = prob.objective.value(prob.x0)
        assert 0.1 <= f0 <= 100.0


@pytest.mark.parametrize("maker,d", [(make_paper_quadratic, 50), (make_sphere, 20),
                                     (make_rosenbrock, 8)])
def test_grad_matches_finite_differences(maker, d):
    prob = maker(d)
    rng = RngStream(17)
    for _ in range(10):
        x = 2.0 * sample_unit_sphere(rng, d)
        g = prob.objective.grad(x)
        fd = central_fd(lambda y: prob.objective.value(y), x, lam=1e-6)
        assert np.allclose(g, fd, rtol=1e-5, atol=1e-7)


def test_quadratic_fd_exactness_tight():
    prob = make_paper_quadratic(100, init_seed=1)
    rng = RngStream(4)
    for _ in range(5):
        x = 3.0 * sample_unit_sphere(rng, 100)
        g = prob.objective.grad(x)
        fd = central_fd(lambda y: prob.objective.value(y), x, lam=1e-5)
        assert np.allclose(g, fd, rtol=1e-8, atol=1e-10)


def test_sphere_and_rosenbrock_trivials():
    sph = make_sphere(2)
    assert np.array_equal(sph.objective.grad(np.array([1.0, 2.0])), [2.0, 4.0])
    ros = make_rosenbrock(6)
    assert ros.objective.value(np.ones(6)) == 0.0
    assert np.array_equal(ros.objective.grad(np.ones(6)), np.zeros(6))


def test_parse_problem_spec():
    name, params = parse_problem_spec("quadratic:d=1000")
    assert name == "quadratic" and params == {"d": 1000}
    name, params = parse_problem_spec("sphere:d=10,init_seed=3")
    assert params == {"d": 10, "init_seed": 3}
    with pytest.raises(ValueError):
        parse_problem_spec("nope:d=2")
    with pytest.raises(ValueError):
        parse_problem_spec("quadratic:bogus=1")
    prob = make_problem("quadratic", d=10, init_seed=2)
    assert prob.objective.dim == 10


def test_small_dimension_rejected():
    with pytest.raises(ValueError):
        make_paper_quadratic(1)
