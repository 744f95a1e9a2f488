import math

import numpy as np
import pytest

from opsample.sincfn import sinc, sinc_derivative


def test_sinc_zero_and_integers():
    assert sinc(0.0) == 1.0
    assert np.allclose(sinc(np.arange(1, 20)), 0.0, atol=1e-15)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_derivative_matches_finite_difference(order):
    u = np.concatenate([np.linspace(-8, 8, 161), [1e-3, -0.3, 0.63, 0.637]])
    h = 1e-3
    # central difference of the next lower order
    fd = (sinc_derivative(u + h, order - 1) - sinc_derivative(u - h, order - 1)) / (2 * h)
    assert np.max(np.abs(fd - sinc_derivative(u, order))) < 5e-5 * math.pi**order


def test_derivative_continuous_across_series_switch():
    r = 2.0 / math.pi
    for order in range(1, 5):
        lo = sinc_derivative(np.array([r - 1e-12]), order)
        hi = sinc_derivative(np.array([r + 1e-12]), order)
        assert abs(lo[0] - hi[0]) < 1e-9


def test_first_derivative_closed_form():
    # d/du sinc at integers k != 0 is (-1)^k / k
    k = np.arange(1, 10)
    assert np.allclose(sinc_derivative(k.astype(float), 1), (-1.0) ** k / k, atol=1e-13)
    assert sinc_derivative(np.array([0.0]), 1)[0] == 0.0


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        sinc_derivative(0.5, -1)
