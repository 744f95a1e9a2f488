"""Normalized sinc and its derivatives in closed form."""

import math

import numpy as np

# below this |pi u| the closed form loses digits to cancellation
_SERIES_RADIUS = 2.0
_SERIES_TERMS = 30


def sinc(u):
    """``sin(pi u) / (pi u)`` with ``sinc(0) = 1``."""
    return np.sinc(u)


def sinc_derivative(u, order: int = 0):
    """``d^order/du^order sinc(u)``.

    Leibniz expansion of ``sin(z) * z**-1`` with ``z = pi u`` away from the
    origin, Taylor series near it.
    """
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    u = np.asarray(u, dtype=float)
    if order == 0:
        return np.sinc(u)
    z = np.pi * u
    out = np.empty_like(z)
    near = np.abs(z) < _SERIES_RADIUS
    far = ~near

    zf = z[far]
    acc = np.zeros_like(zf)
    for k in range(order + 1):
        acc += (
            math.comb(order, k)
            * np.sin(zf + (order - k) * np.pi / 2)
            * (-1) ** k
            * math.factorial(k)
            / zf ** (k + 1)
        )
    out[far] = acc

    zn = z[near]
    acc = np.zeros_like(zn)
    m0 = (order + 1) // 2
    for m in range(m0, m0 + _SERIES_TERMS):
        acc += (-1) ** m * zn ** (2 * m - order) / ((2 * m + 1) * math.factorial(2 * m - order))
    out[near] = acc
    return out * np.pi**order
