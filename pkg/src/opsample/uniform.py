"""Uniform sampling: functions, operators, and the Haar step-kernel class."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .model import HaarModel, OperatorModel, SampledOutput, hs_norm
from .report import ReconReport, finish_report

__all__ = [
    "Filter",
    "WindowFunction",
    "make_filter",
    "wks_reconstruct",
    "reconstruct_uniform",
    "NormIdentity",
    "verify_norm_identity_uniform",
    "haar_reconstruct",
    "lattice_layout",
]


@dataclass(frozen=True)
class Filter:
    """Reconstruction filter with a flat passband on ``[-omega/2, omega/2]``.

    ``phi(x) = (1/T) sinc(x/T) sinc((1/T - omega) x)``: the inverse transform
    of a trapezoid whose flat top is the passband and whose base reaches
    ``1/T - omega/2``.  At ``T*omega == 1`` this is the critical sinc.
    """

    T: float
    omega: float

    @property
    def kind(self) -> str:
        return "critical_sinc" if math.isclose(self.T * self.omega, 1.0) else "trapezoid"

    @property
    def edge(self) -> float:
        """Half-width of the spectral support, ``1/T - omega/2``."""
        return 1.0 / self.T - self.omega / 2

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.sinc(x / self.T) * np.sinc((1.0 / self.T - self.omega) * x) / self.T

    def spectrum(self, nu):
        """Closed-form Fourier transform (the trapezoid itself)."""
        nu = np.abs(np.asarray(nu, dtype=float))
        lo, hi = self.omega / 2, self.edge
        if hi <= lo:
            return (nu <= lo).astype(float)
        return np.clip((hi - nu) / (hi - lo), 0.0, 1.0)


@dataclass(frozen=True)
class WindowFunction:
    """Indicator of ``[0, T_prime]``; the admissible support is ``[-T + T_prime, T]``."""

    T_prime: float
    T: float

    def __post_init__(self):
        if not 0 < self.T_prime <= self.T:
            raise PreconditionError(f"need 0 < T' <= T, got T'={self.T_prime}, T={self.T}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return ((t >= 0) & (t <= self.T_prime)).astype(float)


def make_filter(T: float, omega: float) -> Filter:
    if not (T > 0 and omega > 0):
        raise PreconditionError("T and omega must be positive")
    if T * omega > 1 + 1e-12:
        raise PreconditionError(f"T*omega = {T * omega} exceeds 1")
    return Filter(T, min(omega, 1.0 / T))


def _lattice_index(positions, T: float) -> np.ndarray:
    n = np.asarray(positions, dtype=float) / T
    k = np.rint(n)
    if np.any(np.abs(n - k) > 1e-9 * np.maximum(1.0, np.abs(n))):
        raise PreconditionError(f"sample positions are not on the lattice T*Z with T={T}")
    return k.astype(int)


def wks_reconstruct(positions, values, filt: Filter, eval_points) -> np.ndarray:
    """Oversampling expansion ``f(x) = T sum_n f(nT) phi(x - nT)``.

    Only the supplied samples enter the sum, so accuracy near the ends of the
    sampled range is truncation-limited.
    """
    _lattice_index(positions, filt.T)
    positions = np.asarray(positions, dtype=float)
    values = np.asarray(values)
    x = np.asarray(eval_points, dtype=float)
    K = filt.T * filt(x.reshape(-1, 1) - positions.reshape(1, -1))
    return (K @ values).reshape(x.shape)


def lattice_layout(truth, spacing, lattice_window):
    """Resolve the evaluation lattice from a ground-truth model or explicit args."""
    if truth is not None:
        return truth.spacing, truth.n_min, truth.n_max
    if spacing is None or lattice_window is None:
        raise PreconditionError("pass truth, or both spacing and lattice_window")
    return float(spacing), int(lattice_window[0]), int(lattice_window[1])


def reconstruct_uniform(
    output: SampledOutput,
    T: float,
    T_prime: float,
    filt: Filter,
    window: WindowFunction | None = None,
    *,
    spacing: float | None = None,
    lattice_window: tuple[int, int] | None = None,
    truth: OperatorModel | None = None,
    trim: int = 8,
) -> ReconReport:
    """Recover ``h(t, x)`` from the response to ``sum_k delta_{kT}``.

    Evaluates ``r(t) T sum_n y(t + nT) phi(x - t - nT)`` at the aligned points
    ``x = t_i + m*spacing``.  Because ``x - t - nT = m*spacing - nT`` does not
    depend on ``t_i``, the whole reconstruction is one matrix product.
    """
    if T_prime > T * (1 + 1e-12):
        raise PreconditionError(f"T'={T_prime} exceeds the train spacing T={T}")
    if not math.isclose(filt.T, T):
        raise PreconditionError(f"filter built for T={filt.T}, samples spaced {T}")
    window = window or WindowFunction(T_prime, T)
    sp, n_min, n_max = lattice_layout(truth, spacing, lattice_window)
    if filt.omega * sp < 1 - 1e-12:
        raise PreconditionError("filter passband narrower than the model bandwidth")
    _lattice_index(output.shifts, T)

    grid = output.base_grid
    n_t = int(round(T_prime / grid.step))
    if n_t > grid.count:
        raise PreconditionError("output grid does not cover [0, T']")
    r = window(grid.points[:n_t])
    m = np.arange(n_min, n_max + 1)
    K = T * filt(m[:, None] * sp - output.shifts[None, :])
    est = (K @ output.values[:, :n_t]) * r[None, :]
    estimate = OperatorModel(sp, T_prime, n_min, n_max, est)
    rep = finish_report(estimate, truth, trim)
    rep.notes["filter"] = filt.kind
    return rep


@dataclass(frozen=True)
class NormIdentity:
    hs_norm_sq: float
    scaled_output_norm_sq: float
    residual: float


def verify_norm_identity_uniform(model: OperatorModel, output: SampledOutput, T: float) -> NormIdentity:
    """Relative gap between ``||H||_HS^2`` and ``T ||H sum_k delta_{kT}||^2``.

    Both sides use the same midpoint quadrature in ``t``.
    """
    lhs = hs_norm(model) ** 2
    rhs = T * output.l2_norm_sq()
    if lhs == 0:
        res = 0.0 if rhs == 0 else math.inf
    else:
        res = abs(lhs - rhs) / lhs
    return NormIdentity(lhs, rhs, res)


def haar_reconstruct(output: SampledOutput, truth: HaarModel | None = None) -> ReconReport:
    """Step heights of a Haar-class operator from its response to ``sum_k delta_k``.

    On ``[0, 1)`` the response at ``t + n`` is exactly the height of cell ``n``
    at time ``t``, so the estimate copies the samples.
    """
    n = _lattice_index(output.shifts, 1.0)
    if np.any(np.diff(n) != 1):
        raise PreconditionError("Haar reconstruction needs consecutive integer shifts")
    grid = output.base_grid
    if grid.points[-1] >= 1.0 or grid.points[0] < 0:
        raise PreconditionError("output base grid must lie in [0, 1)")
    values = output.values.real if not np.any(output.values.imag) else output.values
    estimate = HaarModel(int(n[0]), int(n[-1]), values)
    return finish_report(estimate, truth, 0)
