import numpy as np
import pytest

from conezo.estimator import Objective


@pytest.fixture
def quad2():
    """f(x) = x0^2 + 2 x1^2 with analytic gradient."""
    sigma = np.array([1.0, 2.0])

    def value(x):
        return float(np.dot(sigma, x * x))

    def grad(x):
        return 2.0 * sigma * x

    obj = Objective(2, value, grad, optimum=(np.zeros(2), 0.0), name="quad2")
    obj.sigma = sigma
    return obj
