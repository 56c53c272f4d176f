"""Two-point estimator contracts."""
import numpy as np
import pytest

from conezo.estimator import NonFiniteValueError, Objective, zoge, zoge_coefficient, zoge_limit
from conezo.problems import make_rosenbrock


def linear_objective(c):
    c = np.asarray(c, dtype=np.float64)
    return Objective(c.shape[0], lambda x: float(np.dot(c, x)),
                     lambda x: c.copy(), name="linear")


def test_linear_exact_for_any_smoothing():
    c = np.array([2.0, -3.0, 0.5])
    f = linear_objective(c)
    z = np.array([1.0, 1.0, -2.0])
    for lam in (1e-6, 1e-3, 0.5, 10.0):
        g = zoge(f, np.zeros(3), z, lam)
        assert np.allclose(g, np.dot(c, z) * z, rtol=1e-12)


def test_quadratic_worked_example(quad2):
    # sigma=[1,2], x=[1,1], z=[1,0], lam=0.5 -> exactly [2, 0]
    g = zoge(quad2, np.array([1.0, 1.0]), np.array([1.0, 0.0]), 0.5)
    assert np.array_equal(g, [2.0, 0.0])


def test_quadratic_matches_limit_for_every_smoothing(quad2):
    x = np.array([0.3, -1.7])
    z = np.array([1.4, 2.2])
    ref = zoge_limit(quad2, x, z)
    for lam in (1e-5, 1e-3, 0.1, 1.0):
        assert np.allclose(zoge(quad2, x, z, lam), ref, rtol=1e-9)


def test_limit_trivials(quad2):
    z = np.array([2.0, -3.0])
    assert np.array_equal(zoge_limit(quad2, np.zeros(2), z), np.zeros(2))  # zero gradient
    x = np.array([1.0, 0.0])   # grad = [2, 0]
    z_perp = np.array([0.0, 5.0])
    assert np.array_equal(zoge_limit(quad2, x, z_perp), np.zeros(2))


def test_rosenbrock_second_order_convergence():
    prob = make_rosenbrock(2)
    x = np.array([1.2, 1.2])
    z = np.array([1.0, 1.0])
    truth = float(np.dot(z, prob.objective.grad(x)))
    assert truth == pytest.approx(67.6, abs=1e-12)
    errs = [abs(zoge_coefficient(prob.objective, x, z, lam) - truth)
            for lam in (1e-3, 1e-4)]
    ratio = errs[0] / errs[1]
    assert 50.0 < ratio < 150.0   # O(lam^2) truncation error


def test_x_unmodified_bitwise(quad2):
    x = np.array([1.0, 0.1])
    snapshot = x.copy()
    before = quad2.value(x)
    zoge(quad2, x, np.array([1.0, 0.3]), 0.1)
    assert np.array_equal(x, snapshot)
    assert quad2.value(x) == before


def test_two_evaluations_per_call(quad2):
    quad2.reset_eval_count()
    zoge(quad2, np.ones(2), np.ones(2), 1e-3)
    assert quad2.eval_count == 2


def test_nonfinite_value_carries_point():
    f = Objective(2, lambda x: float("inf") if x[0] > 1.0 else float(x[0]))
    with pytest.raises(NonFiniteValueError) as err:
        zoge(f, np.array([1.0, 0.0]), np.array([1.0, 0.0]), 0.5)
    assert err.value.x[0] == pytest.approx(1.5)


def test_contract_violations(quad2):
    with pytest.raises(ValueError):
        zoge(quad2, np.ones(2), np.ones(2), 0.0)
    with pytest.raises(ValueError):
        zoge(quad2, np.ones(2), np.ones(3), 1e-3)
    no_grad = Objective(2, lambda x: 0.0)
    with pytest.raises(ValueError):
        zoge_limit(no_grad, np.ones(2), np.ones(2))


def test_grad_not_counted(quad2):
    quad2.reset_eval_count()
    quad2.grad(np.ones(2))
    assert quad2.eval_count == 0
