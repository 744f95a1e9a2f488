"""Multi-channel identification: DFT and general mixing, PNS and derivative sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import PreconditionError, SingularSystemError
from .identifiers import DeltaTrain, derivative_train, dft_train, periodic_nonuniform_train
from .irregular import ExponentialFrame, dual_solve
from .model import OperatorModel, SampledOutput, TimeGrid, aligned_grid, apply_train, hs_norm
from .report import ReconReport, finish_report
from .uniform import lattice_layout

__all__ = [
    "MixingMatrix",
    "dft_mixing_matrix",
    "general_mixing_matrix",
    "dft_coefficients",
    "random_mixing_coefficients",
    "mixing_train",
    "multichannel_outputs",
    "reconstruct_multichannel_dft",
    "reconstruct_multichannel_general",
    "multichannel_norm_identity",
    "pns_kernels",
    "pns_outputs",
    "pns_two_channel_reconstruct",
    "pns_general_kernel",
    "pns_general_reconstruct",
    "derivative_kernels",
    "derivative_outputs",
    "derivative_two_channel_reconstruct",
    "leibniz_residual",
]

DEFAULT_MAX_CONDITION = 1e8


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    """The ``MN x MN`` matrix ``A_k`` linking channel samples to kernel values."""

    entries: np.ndarray
    k: int
    unitary: bool = False

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise PreconditionError("mixing matrix must be square")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def condition(self) -> float:
        return float(np.linalg.cond(self.entries))

    @cached_property
    def inverse(self) -> np.ndarray:
        if self.unitary:
            inv = self.entries.conj().T.copy()
        else:
            if not np.isfinite(self.condition) or self.condition > 1 / np.finfo(float).eps:
                raise SingularSystemError(f"mixing matrix A_{self.k} is singular")
            inv = np.linalg.inv(self.entries)
        inv.setflags(write=False)
        return inv


def dft_coefficients(M: int, N: int) -> np.ndarray:
    """``c[j, p] = exp(2 pi i j p / MN)``, the weights of the DFT trains."""
    MN = M * N
    jp = np.outer(np.arange(MN), np.arange(MN)) % MN
    return np.exp(2j * np.pi * jp / MN)


def dft_mixing_matrix(M: int, N: int, k: int) -> MixingMatrix:
    """``A_k[j, l] = exp(2 pi i j (k - l) / MN) / sqrt(MN)`` (0-based j, l)."""
    if M < 1 or N < 1:
        raise PreconditionError("M and N must be positive integers")
    MN = M * N
    j = np.arange(MN)[:, None]
    l = np.arange(MN)[None, :]
    A = np.exp(2j * np.pi * ((j * (k - l)) % MN) / MN) / math.sqrt(MN)
    dev = np.max(np.abs(A @ A.conj().T - np.eye(MN)))
    if dev > 1e-12:
        raise SingularSystemError(f"DFT mixing matrix not unitary (deviation {dev:.3g})")
    return MixingMatrix(A, k, unitary=True)


def general_mixing_matrix(coeffs, k: int) -> MixingMatrix:
    """``A_k[j, l] = c[j, (k - l) mod MN]`` for MN-periodic train weights."""
    c = np.asarray(coeffs, dtype=complex)
    MN = c.shape[0]
    if c.shape != (MN, MN):
        raise PreconditionError("coefficients must be an MN x MN array c[j, n mod MN]")
    l = np.arange(MN)
    return MixingMatrix(c[:, (k - l) % MN], k)


def random_mixing_coefficients(M: int, N: int, seed: int, perturbation: float = 0.2) -> np.ndarray:
    """Random unitary matrix plus a seeded complex perturbation.

    Every ``A_k`` is a column permutation of the result, so they all share
    its condition number, about ``(1 + p) / (1 - p)`` for small ``p``.
    """
    MN = M * N
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((MN, MN)) + 1j * rng.standard_normal((MN, MN))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    e = rng.standard_normal((MN, MN)) + 1j * rng.standard_normal((MN, MN))
    e *= perturbation / np.linalg.norm(e, 2)
    return q + e


def mixing_train(coeff_row, M: int, n_range: tuple[int, int]) -> DeltaTrain:
    """``sum_n c[n mod MN] delta_{n/M}``."""
    c = np.asarray(coeff_row, dtype=complex).reshape(-1)
    lo, hi = n_range
    n = np.arange(lo, hi + 1)
    return DeltaTrain(n / M, c[n % c.size], np.zeros(n.size, dtype=int), {"M": M})


def _check_class(model: OperatorModel, M: int, N: int) -> None:
    if not math.isclose(model.spacing, 1.0 / M, rel_tol=1e-12):
        raise PreconditionError(f"model spacing {model.spacing} differs from 1/M = {1 / M}")
    if model.temporal_support > N * (1 + 1e-12):
        raise PreconditionError(f"temporal support {model.temporal_support} exceeds N={N}")


def _channel_layout(model: OperatorModel, M: int, N: int):
    MN = M * N
    base = aligned_grid(model.temporal_support / model.n_t, 1.0 / M)
    k = np.arange(model.n_min, model.n_max + MN)
    return base, k, (int(k[0]) - MN + 1, int(k[-1]))


def multichannel_outputs(model: OperatorModel, M: int, N: int, coeffs=None) -> list[SampledOutput]:
    """The ``MN`` channel outputs on the aligned grid ``t + k/M``, ``t in [0, 1/M)``.

    ``coeffs[j, p]`` gives channel ``j`` the weight ``coeffs[j, n mod MN]`` at
    node ``n/M``; the default is the DFT family.
    """
    _check_class(model, M, N)
    MN = M * N
    c = dft_coefficients(M, N) if coeffs is None else np.asarray(coeffs, dtype=complex)
    if c.shape != (MN, MN):
        raise PreconditionError(f"need {MN} channels of period {MN}")
    base, k, n_range = _channel_layout(model, M, N)
    outs = []
    for j in range(MN):
        if coeffs is None:
            train = dft_train(M, N, j, n_range)
        else:
            train = mixing_train(c[j], M, n_range)
        out = apply_train(model, train, k / M, base_grid=base)
        outs.append(SampledOutput(out.base_grid, out.shifts, out.values, channel_tag=j))
    return outs


def _unmix(outputs, M, N, matrices, spacing, lattice_window, truth, scale):
    MN = M * N
    if len(outputs) != MN:
        raise PreconditionError(f"expected {MN} channel outputs, got {len(outputs)}")
    sp, n_min, n_max = lattice_layout(truth, spacing, lattice_window)
    if not math.isclose(sp, 1.0 / M, rel_tol=1e-12):
        raise PreconditionError(f"lattice spacing {sp} differs from 1/M")
    base = outputs[0].base_grid
    shifts = outputs[0].shifts
    for o in outputs[1:]:
        if o.base_grid != base or not np.array_equal(o.shifts, shifts):
            raise PreconditionError("channel outputs must share one evaluation layout")
    ratio = (1.0 / M) / base.step
    per = int(round(ratio))
    if abs(ratio - per) > 1e-9 or abs(base.count - per) > 0:
        raise PreconditionError("base grid must tile [0, 1/M)")
    k_all = np.rint(shifts * M).astype(int)
    if np.any(np.abs(shifts * M - k_all) > 1e-9):
        raise PreconditionError("shifts must be multiples of 1/M")

    n_t = per * MN
    est = np.zeros((n_max - n_min + 1, n_t), dtype=complex)
    Y = np.stack([o.values for o in outputs]) * scale  # (j, k, i)
    worst = 1.0
    for row, k in enumerate(k_all):
        A = matrices(int(k))
        worst = max(worst, A.condition)
        hv = A.inverse @ Y[:, row, :]  # hv[r, i] = h(t_i + r/M, t_i + k/M)
        for r in range(MN):
            m = k - r
            if n_min <= m <= n_max:
                est[m - n_min, r * per : (r + 1) * per] = hv[r]
    T_prime = N
    if truth is not None and truth.temporal_support < N:
        # a shorter support leaves the tail of [0, N] identically zero
        T_prime = truth.temporal_support
        est = est[:, : truth.n_t]
    return OperatorModel(sp, T_prime, n_min, n_max, est), worst


def reconstruct_multichannel_dft(
    outputs,
    M: int,
    N: int,
    *,
    spacing: float | None = None,
    lattice_window: tuple[int, int] | None = None,
    truth: OperatorModel | None = None,
    trim: int = 0,
) -> ReconReport:
    """Invert the unitary DFT mixing for every shift ``k``.

    With ``y_j`` the channel outputs, ``y_j(t + k/M) / sqrt(MN) = sum_r
    A_k[j, r] h(t + r/M, t + k/M)``, so ``h = A_k^* y / sqrt(MN)``.
    """
    est, _ = _unmix(
        outputs,
        M,
        N,
        lambda k: dft_mixing_matrix(M, N, k),
        spacing,
        lattice_window,
        truth,
        1 / math.sqrt(M * N),
    )
    rep = finish_report(est, truth, trim, condition=1.0)
    if truth is not None:
        rep.norm_residual = multichannel_norm_identity(truth, outputs, M, N)
    return rep


def reconstruct_multichannel_general(
    outputs,
    coeffs,
    M: int,
    N: int,
    *,
    max_condition: float = DEFAULT_MAX_CONDITION,
    spacing: float | None = None,
    lattice_window: tuple[int, int] | None = None,
    truth: OperatorModel | None = None,
    trim: int = 0,
) -> ReconReport:
    """Invert ``A_k[j, l] = c[j, (k - l) mod MN]`` for every shift ``k``.

    Raises
    ------
    SingularSystemError
        If some ``A_k`` is singular or its condition number exceeds
        ``max_condition``.
    """
    c = np.asarray(coeffs, dtype=complex)

    def matrices(k):
        A = general_mixing_matrix(c, k)
        if not np.isfinite(A.condition) or A.condition > max_condition:
            raise SingularSystemError(
                f"A_{k} has condition {A.condition:.3g} above the limit {max_condition:.3g}"
            )
        return A

    est, worst = _unmix(outputs, M, N, matrices, spacing, lattice_window, truth, 1.0)
    return finish_report(est, truth, trim, condition=worst)


def multichannel_norm_identity(model: OperatorModel, outputs, M: int, N: int) -> float:
    """Relative gap in ``||H||^2 = (1 / (M^2 N)) sum_j ||H f_j||^2`` (DFT trains)."""
    lhs = hs_norm(model) ** 2
    rhs = sum(o.l2_norm_sq() for o in outputs) / (M * M * N)
    if lhs == 0:
        return 0.0 if rhs == 0 else math.inf
    return abs(lhs - rhs) / lhs


# -- periodic nonuniform sampling ----------------------------------------------


def _half_band(x, sign: int) -> np.ndarray:
    # inverse transforms of the indicators of [-1/2, 0) (sign=-1) and [0, 1/2]
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, 0.5, dtype=complex)
    nz = x != 0
    xn = x[nz]
    if sign < 0:
        out[nz] = (1 - np.exp(-1j * np.pi * xn)) / (2j * np.pi * xn)
    else:
        out[nz] = (np.exp(1j * np.pi * xn) - 1) / (2j * np.pi * xn)
    small = nz & (np.abs(x) < 1e-6)
    if small.any():
        xs = x[small]
        # Taylor expansion avoids cancellation near the origin
        out[small] = 0.5 + sign * 1j * np.pi * xs / 4
    return out


def pns_kernels(alpha: float):
    """Closed-form reconstruction functions for two interleaved trains.

    For the class with ``spacing = 1`` and ``T' = 2`` sampled by ``delta_{2k}``
    and ``delta_{2k + alpha}``::

        S1(x) = 2/(e^{i pi alpha} - 1) (e^{i pi alpha} F_-(x) - F_+(x))
        S2(x) = 2/(e^{i pi alpha} - 1) (-F_-(x) + e^{i pi alpha} F_+(x))

    where ``F_-(x) = (1 - e^{-i pi x}) / (2 pi i x)`` and
    ``F_+(x) = (e^{i pi x} - 1) / (2 pi i x)`` are the inverse transforms of
    the two half-band indicators.
    """
    if not 0 < alpha < 1:
        raise PreconditionError(f"alpha={alpha} must lie in (0, 1)")
    e = np.exp(1j * np.pi * alpha)
    f = 2 / (e - 1)

    def S1(x):
        return f * (e * _half_band(x, -1) - _half_band(x, +1))

    def S2(x):
        return f * (-_half_band(x, -1) + e * _half_band(x, +1))

    return S1, S2


def pns_outputs(model: OperatorModel, alphas, N: float, pad: int) -> list[SampledOutput]:
    """Outputs of ``sum_k delta_{kN + alpha_j}`` at ``t + nN + alpha_j``.

    The shift index ``n`` runs over the lattice window extended by ``pad``
    periods on each side.
    """
    grid = model.t_grid
    if grid.count * grid.step < N * (1 - 1e-12):
        raise PreconditionError("model t-grid must cover one period N")
    lo = math.floor(model.n_min * model.spacing / N) - pad
    hi = math.ceil(model.n_max * model.spacing / N) + pad
    n = np.arange(lo, hi + 1)
    outs = []
    for j, a in enumerate(alphas):
        train = periodic_nonuniform_train(N, a, (lo - 2, hi + 1))
        out = apply_train(model, train, n * N + a)
        outs.append(SampledOutput(out.base_grid, out.shifts, out.values, channel_tag=j))
    return outs


def _expansion(outputs, kernels, alphas, N, sp, n_min, n_max, T_prime):
    grid = outputs[0].base_grid
    n_t = int(round(T_prime / grid.step))
    m = np.arange(n_min, n_max + 1) * sp
    est = np.zeros((m.size, n_t), dtype=complex)
    for out, S, a in zip(outputs, kernels, alphas):
        # x - t - nN - alpha at x = t + m*spacing does not depend on t
        K = S(m[:, None] - out.shifts[None, :])
        est += K @ out.values[:, :n_t]
    return est


def _check_pns_outputs(outputs, alphas, N):
    if len(outputs) != len(alphas):
        raise PreconditionError("one output per alpha is required")
    for out, a in zip(outputs, alphas):
        q = (out.shifts - a) / N
        if np.any(np.abs(q - np.rint(q)) > 1e-9):
            raise PreconditionError(f"output shifts are not of the form nN + {a}")


def pns_two_channel_reconstruct(
    outputs,
    alpha: float,
    *,
    lattice_window: tuple[int, int] | None = None,
    truth: OperatorModel | None = None,
    trim: int = 8,
) -> ReconReport:
    """Closed-form two-channel reconstruction for ``spacing = 1``, ``T' = 2``.

    ``h(t, x) = sum_n y_1(t + 2n) S1(x - t - 2n) + y_2(t + 2n + alpha)
    S2(x - t - 2n - alpha)``.  Both kernels decay like ``1/x``, so the error
    near the ends of the sampled range is truncation-limited.
    """
    S1, S2 = pns_kernels(alpha)
    sp, n_min, n_max = lattice_layout(truth, 1.0, lattice_window)
    if sp != 1.0 or (truth is not None and truth.temporal_support != 2.0):
        raise PreconditionError("closed-form kernels need spacing 1 and T' = 2")
    alphas = (0.0, alpha)
    _check_pns_outputs(outputs, alphas, 2.0)
    est = _expansion(outputs, (S1, S2), alphas, 2.0, sp, n_min, n_max, 2.0)
    return finish_report(OperatorModel(sp, 2.0, n_min, n_max, est), truth, trim)


def pns_general_kernel(alphas, M: int, N: int, j: int):
    """Cardinal function ``S_j`` for MN interleaved trains ``delta_{nN + alpha_j}``.

    Splitting the band ``[-M/2, M/2]`` into MN slices of width ``1/N`` turns
    the samples into a Vandermonde system ``V[j, p] = exp(2 pi i alpha_j p / N)``;
    its inverse gives

        S_j(y) = sinc(y/N) exp(2 pi i y (a + 1/(2N)))
                 * sum_p Vinv[p, j] exp(2 pi i p (y + alpha_j) / N),   a = -M/2,

    with ``S_j(nN + alpha_i - alpha_j) = delta_{ij} delta_{n0}``; the kernel
    is applied at ``y = x - t - nN - alpha_j``.
    """
    alphas = np.asarray(alphas, dtype=float)
    MN = M * N
    p = np.arange(MN)
    V = np.exp(2j * np.pi * np.outer(alphas, p) / N)
    try:
        Vinv = np.linalg.inv(V)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("offsets give a singular Vandermonde system") from exc
    col = Vinv[:, j]
    aj = alphas[j]
    a = -M / 2

    def S(y):
        y = np.asarray(y, dtype=float)
        env = np.sinc(y / N) * np.exp(2j * np.pi * y * (a + 1 / (2 * N)))
        poly = np.exp(2j * np.pi * (y[..., None] + aj) * p / N) @ col
        return env * poly

    return S


def pns_general_reconstruct(
    outputs,
    alphas,
    M: int,
    N: int,
    *,
    method: str = "polyphase",
    section: int | None = None,
    rho: float | None = None,
    lattice_window: tuple[int, int] | None = None,
    truth: OperatorModel | None = None,
    trim: int = 8,
) -> ReconReport:
    """Reconstruction from MN interleaved periodic trains.

    ``method="polyphase"`` uses the cardinal functions of
    :func:`pns_general_kernel`.  ``method="frame_section"`` pools all sample
    positions ``nN + alpha_j`` into one node set and runs the regularized
    dual-frame solve over ``[-M/2, M/2]``.
    """
    alphas = np.asarray(alphas, dtype=float)
    MN = M * N
    if alphas.size != MN:
        raise PreconditionError(f"need {MN} offsets, got {alphas.size}")
    if np.unique(alphas).size != alphas.size:
        raise PreconditionError("offsets alpha_j must be distinct")
    if np.any(alphas < 0) or np.any(alphas >= N):
        raise PreconditionError(f"offsets must lie in [0, {N})")
    sp, n_min, n_max = lattice_layout(truth, 1.0 / M, lattice_window)
    if not math.isclose(sp, 1.0 / M, rel_tol=1e-12):
        raise PreconditionError("model spacing must be 1/M")
    _check_pns_outputs(outputs, alphas, N)
    grid = outputs[0].base_grid
    n_t = int(round(N / grid.step))

    if method == "polyphase":
        kernels = [pns_general_kernel(alphas, M, N, j) for j in range(MN)]
        est = _expansion(outputs, kernels, alphas, N, sp, n_min, n_max, N)
        return finish_report(OperatorModel(sp, N, n_min, n_max, est), truth, trim)
    if method != "frame_section":
        raise PreconditionError(f"unknown method {method!r}")

    nodes = np.concatenate([o.shifts for o in outputs])
    values = np.concatenate([o.values[:, :n_t] for o in outputs])
    order = np.argsort(nodes)
    nodes, values = nodes[order], values[order]
    frame = ExponentialFrame(nodes, float(M))
    if section is not None:
        frame = frame.section(section)
    start = int(np.searchsorted(nodes, frame.nodes[0]))
    values = values[start : start + frame.nodes.size]
    A, B = frame.eig_bounds
    rho = 1e-10 * B if rho is None else rho
    C = dual_solve(frame.with_regularization(rho), values)
    m = np.arange(n_min, n_max + 1) * sp
    K = M * np.sinc(M * (m[:, None] - frame.nodes[None, :]))
    est = K @ C
    cond = B / A if A > 0 else math.inf
    estimate = OperatorModel(sp, N, n_min, n_max, est)
    return finish_report(estimate, truth, trim, regularization=rho, condition=cond)


# -- derivative sampling -------------------------------------------------------


def derivative_kernels():
    """``S(y) = sinc^2(y/2)`` and ``T(y) = (2/pi) sinc(y/2) sin(pi y/2)``."""

    def S(y):
        return np.sinc(np.asarray(y, dtype=float) / 2) ** 2

    def T(y):
        y = np.asarray(y, dtype=float)
        return (2 / np.pi) * np.sinc(y / 2) * np.sin(np.pi * y / 2)

    return S, T


def derivative_outputs(model: OperatorModel, pad: int, N: float = 2.0) -> list[SampledOutput]:
    """Responses to ``sum_k delta_{kN}`` and ``sum_k delta'_{kN}`` at ``t + nN``.

    The second channel carries ``d/dx h(t, x)`` at ``x = t + nN``.
    """
    lo = math.floor(model.n_min * model.spacing / N) - pad
    hi = math.ceil(model.n_max * model.spacing / N) + pad
    n = np.arange(lo, hi + 1)
    outs = []
    for r in (0, 1):
        out = apply_train(model, derivative_train(N, r, (lo - 2, hi + 1)), n * N)
        outs.append(SampledOutput(out.base_grid, out.shifts, out.values, channel_tag=r))
    return outs


def derivative_two_channel_reconstruct(
    output0: SampledOutput,
    output1: SampledOutput,
    *,
    lattice_window: tuple[int, int] | None = None,
    truth: OperatorModel | None = None,
    trim: int = 8,
) -> ReconReport:
    """``h(t, x) = sum_n h(t, t+2n) S(x-t-2n) + d_x h(t, t+2n) T(x-t-2n)``.

    Class: ``spacing = 1``, ``T' = 2``.
    """
    sp, n_min, n_max = lattice_layout(truth, 1.0, lattice_window)
    if sp != 1.0 or (truth is not None and truth.temporal_support != 2.0):
        raise PreconditionError("derivative kernels need spacing 1 and T' = 2")
    if not np.array_equal(output0.shifts, output1.shifts):
        raise PreconditionError("both channels must share the shifts 2n")
    _check_pns_outputs([output0, output1], (0.0, 0.0), 2.0)
    S, T = derivative_kernels()
    est = _expansion([output0, output1], (S, T), (0.0, 0.0), 2.0, sp, n_min, n_max, 2.0)
    return finish_report(OperatorModel(sp, 2.0, n_min, n_max, est), truth, trim)


def leibniz_residual(model: OperatorModel, train: DeltaTrain, shifts, step: float = 1e-4) -> float:
    """Max gap between ``(H f)' - H f'`` by finite differences and the direct channel.

    ``f`` is ``train`` with every order set to 0, ``(H f)'`` is a central
    difference in ``x``, and ``H f'`` is ``-d/dlambda`` of the node
    positions, also by central differences.  The direct channel is
    ``apply_train`` with every order set to 1.
    """
    zeros = np.zeros(len(train), dtype=int)
    f = DeltaTrain(train.nodes, train.weights, zeros)
    g = model.t_grid

    def out(tr, origin_shift=0.0):
        grid = TimeGrid(g.origin + origin_shift, g.step, g.count)
        return apply_train(model, tr, shifts, base_grid=grid).values

    d_out = (out(f, step) - out(f, -step)) / (2 * step)
    plus = DeltaTrain(train.nodes + step, train.weights, zeros)
    minus = DeltaTrain(train.nodes - step, train.weights, zeros)
    h_fprime = -(out(plus) - out(minus)) / (2 * step)
    direct = out(DeltaTrain(train.nodes, train.weights, np.ones(len(train), dtype=int)))
    return float(np.max(np.abs(d_out - h_fprime - direct)))
