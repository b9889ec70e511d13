import math

import numpy as np

from quatode.quadrature import adaptive_simpson


def test_scalar():
    assert math.isclose(adaptive_simpson(math.sin, 0.0, math.pi), 2.0, rel_tol=1e-12)
    assert adaptive_simpson(math.exp, 1.0, 1.0) == 0.0


def test_reversed_limits():
    assert math.isclose(adaptive_simpson(math.exp, 1.0, 0.0), 1.0 - math.e, rel_tol=1e-12)


def test_vector_valued():
    got = adaptive_simpson(lambda t: np.array([t, t * t, math.cos(t), 1.0]), 0.0, 2.0)
    assert np.allclose(got, [2.0, 8.0 / 3.0, math.sin(2.0), 2.0], atol=1e-12)


def test_peaked_integrand():
    f = lambda t: 1.0 / (1e-4 + t * t)
    exact = 2.0 * math.atan(1.0 / 1e-2) / 1e-2
    assert math.isclose(adaptive_simpson(f, -1.0, 1.0, tol=1e-8), exact, rel_tol=1e-8)
