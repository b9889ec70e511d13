import numpy as np
import pytest
from hypothesis import strategies as st

from quatode.quaternion import Quaternion

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
quaternions = st.builds(Quaternion, finite, finite, finite, finite)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def assert_q(actual, expected, tol=1e-12):
    diff = abs(actual - expected)
    assert diff <= tol, f"{actual} != {expected} (|diff| = {diff:.3g})"
