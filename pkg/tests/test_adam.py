import numpy as np
import pytest

from ids1d.errors import ShapeError
from ids1d.optim import AdamState, adam_step


def test_zero_gradient_leaves_params_unchanged():
    p = np.array([1.0, -2.0, 3.0])
    state = AdamState.for_params([p])
    adam_step([p], [np.zeros(3)], state)
    np.testing.assert_array_equal(p, [1.0, -2.0, 3.0])
    assert state.t == 1


def test_first_step_magnitude_is_learning_rate():
    # bias correction makes m_hat / sqrt(v_hat) ~ sign(g) on step 1
    p = np.zeros(4)
    g = np.array([1.0, -3.0, 0.5, 100.0])
    state = AdamState.for_params([p], learning_rate=0.1)
    adam_step([p], [g], state)
    np.testing.assert_allclose(p, -0.1 * np.sign(g), rtol=1e-6)


def test_shape_mismatch():
    p = np.zeros(3)
    state = AdamState.for_params([p])
    with pytest.raises(ShapeError):
        adam_step([p], [np.zeros(4)], state)


def test_scalar_quadratic_converges():
    # minimize (x - 3)^2 from 0
    x = np.array([0.0])
    state = AdamState.for_params([x], learning_rate=0.1)
    for _ in range(500):
        adam_step([x], [2 * (x - 3.0)], state)
    assert abs(x[0] - 3.0) < 0.01
