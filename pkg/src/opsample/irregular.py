"""Irregular sampling: exponential frames, densities, and dual-frame recovery."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import PreconditionError, SingularSystemError
from .model import OperatorModel, SampledOutput, TimeGrid
from .report import ReconReport, finish_report
from .uniform import lattice_layout

__all__ = [
    "ExponentialFrame",
    "DensityReport",
    "KadecResult",
    "kadec_check",
    "beurling_density",
    "frame_bounds",
    "frame_bound_curve",
    "sampling_bounds",
    "dual_solve",
    "reconstruct_irregular",
    "separation_counterexample",
]

# relative tolerance used when comparing node gaps against T'
_GAP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ExponentialFrame:
    """The system ``{exp(-2 pi i lambda_k xi)}`` in ``L^2[-omega/2, omega/2]``.

    Attributes
    ----------
    nodes : ndarray
        Sorted node positions.
    omega : float
        Width of the frequency interval.
    regularization : float
        Tikhonov shift ``rho`` used by :func:`dual_solve`.
    """

    nodes: np.ndarray
    omega: float
    regularization: float = 0.0

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float).reshape(-1)
        if nodes.size == 0:
            raise PreconditionError("frame needs at least one node")
        if np.any(np.diff(nodes) < 0):
            raise PreconditionError("frame nodes must be sorted")
        if not self.omega > 0:
            raise PreconditionError("omega must be positive")
        if self.regularization < 0:
            raise PreconditionError("regularization must be nonnegative")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @cached_property
    def gram(self) -> np.ndarray:
        """``G[m, n] = omega * sinc(omega (lambda_m - lambda_n))``."""
        d = self.nodes[:, None] - self.nodes[None, :]
        g = self.omega * np.sinc(self.omega * d)
        g.setflags(write=False)
        return g

    @cached_property
    def eig_bounds(self) -> tuple[float, float]:
        return frame_bounds(self)

    def section(self, size: int) -> "ExponentialFrame":
        """Central block of ``size`` consecutive nodes."""
        n = self.nodes.size
        if not 1 <= size <= n:
            raise PreconditionError(f"section size {size} outside [1, {n}]")
        start = (n - size) // 2
        return ExponentialFrame(self.nodes[start : start + size], self.omega, self.regularization)

    def with_regularization(self, rho: float) -> "ExponentialFrame":
        return ExponentialFrame(self.nodes, self.omega, rho)


@dataclass
class DensityReport:
    """Finite-window node counts.

    ``n_plus[j]`` and ``n_minus[j]`` are the largest and smallest number of
    nodes in a half-open window of length ``h[j]`` placed inside the node
    span.  ``D_plus`` and ``D_minus`` are the ratios at the largest ``h``;
    they are estimates, not the limits themselves, hence ``caveat``.
    """

    h: np.ndarray
    n_plus: np.ndarray
    n_minus: np.ndarray
    D_plus: float
    D_minus: float
    caveat: str = "finite-window estimate; boundary windows excluded"

    @property
    def ratio_plus(self) -> np.ndarray:
        return self.n_plus / self.h

    @property
    def ratio_minus(self) -> np.ndarray:
        return self.n_minus / self.h


@dataclass(frozen=True)
class KadecResult:
    L: float
    passed: bool
    k0: int
    T: float


def _check_increasing(nodes) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=float).reshape(-1)
    if nodes.size == 0:
        raise PreconditionError("empty node list")
    if np.any(np.diff(nodes) <= 0):
        raise PreconditionError("nodes must be strictly increasing")
    return nodes


def kadec_check(nodes, T: float, k0: int | None = None) -> KadecResult:
    """Largest deviation ``L = max_k |lambda_k - k T|`` and whether ``L < T/4``.

    Node ``i`` is paired with index ``k0 + i``; by default ``k0`` is the
    lattice index nearest the first node.
    """
    if not T > 0:
        raise PreconditionError("T must be positive")
    nodes = _check_increasing(nodes)
    if k0 is None:
        k0 = int(round(nodes[0] / T))
    k = k0 + np.arange(nodes.size)
    L = float(np.max(np.abs(nodes - k * T)))
    return KadecResult(L=L, passed=L < T / 4, k0=k0, T=T)


def _window_counts(nodes: np.ndarray, h: float) -> np.ndarray:
    # the count #{x <= lam < x + h} is constant on (b_k, b_{k+1}] between the
    # breakpoints {lam_i} and {lam_i - h}, so evaluating there is exhaustive
    lo, hi = nodes[0], nodes[-1] - h
    cand = np.concatenate([nodes, nodes - h, [lo, hi]])
    cand = np.unique(cand[(cand >= lo) & (cand <= hi)])
    return np.searchsorted(nodes, cand + h, side="left") - np.searchsorted(nodes, cand, side="left")


def beurling_density(nodes, h_list) -> DensityReport:
    """Extremal window counts ``n+(h)``, ``n-(h)`` for each window length."""
    nodes = _check_increasing(nodes)
    h = np.asarray(h_list, dtype=float).reshape(-1)
    if h.size == 0 or np.any(h <= 0):
        raise PreconditionError("window lengths must be positive")
    span = nodes[-1] - nodes[0]
    if np.any(h > span):
        raise PreconditionError(f"window length exceeds the node span {span}")
    n_plus = np.empty(h.size, dtype=int)
    n_minus = np.empty(h.size, dtype=int)
    for j, hj in enumerate(h):
        c = _window_counts(nodes, hj)
        n_plus[j], n_minus[j] = c.max(), c.min()
    top = int(np.argmax(h))
    return DensityReport(
        h=h,
        n_plus=n_plus,
        n_minus=n_minus,
        D_plus=n_plus[top] / h[top],
        D_minus=n_minus[top] / h[top],
    )


def frame_bounds(frame: ExponentialFrame, section: int | None = None) -> tuple[float, float]:
    """Extreme eigenvalues of the Gram matrix of a central section.

    These are the Riesz bounds of the finite section.  For a redundant
    system (more nodes than the Nyquist rate of ``omega``) the smallest Gram
    eigenvalue tends to zero even though the infinite system is a frame;
    :func:`sampling_bounds` measures the frame inequality directly.
    """
    f = frame if section is None else frame.section(section)
    try:
        ev = scipy.linalg.eigh(f.gram, eigvals_only=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularSystemError(f"Gram eigensolve failed: {exc}") from exc
    return float(ev[0]), float(ev[-1])


def frame_bound_curve(frame: ExponentialFrame, sections) -> np.ndarray:
    """Rows ``(size, A, B)`` for nested central sections."""
    rows = [(s, *frame_bounds(frame, int(s))) for s in sections]
    return np.array(rows, dtype=float)


def sampling_bounds(nodes, omega: float, interior: float = 0.5) -> tuple[float, float]:
    """Frame bounds of the exponentials tested on band-limited functions.

    Estimates the best ``A, B`` in ``A ||f||^2 <= sum_k |f(lambda_k)|^2 <=
    B ||f||^2`` over ``f`` spanned by the orthonormal functions
    ``sqrt(omega) sinc(omega x - j)`` centred in the middle ``interior``
    fraction of the node span.  Edge leakage lowers ``A`` by roughly
    ``1 / (pi^2 * margin * omega)``.
    """
    nodes = _check_increasing(nodes)
    if not 0 < interior <= 1:
        raise PreconditionError("interior fraction must lie in (0, 1]")
    mid = 0.5 * (nodes[0] + nodes[-1])
    half = 0.5 * interior * (nodes[-1] - nodes[0])
    j = np.arange(math.ceil((mid - half) * omega), math.floor((mid + half) * omega) + 1)
    if j.size == 0:
        raise PreconditionError("node span too short for the test space")
    U = math.sqrt(omega) * np.sinc(omega * nodes[:, None] - j[None, :])
    s = scipy.linalg.svdvals(U)
    return float(s[-1] ** 2), float(s[0] ** 2)


def dual_solve(frame: ExponentialFrame, rhs) -> np.ndarray:
    """Solve ``(G + rho I) c = rhs`` for one or several right-hand sides.

    Raises
    ------
    SingularSystemError
        If ``rho == 0`` and the Gram matrix is numerically singular.
    """
    G = frame.gram
    rho = frame.regularization
    rhs = np.asarray(rhs)
    if rhs.shape[0] != G.shape[0]:
        raise PreconditionError(f"rhs has {rhs.shape[0]} rows, Gram is {G.shape[0]}")
    if rho == 0:
        A, B = frame.eig_bounds
        if A <= 1e-13 * B:
            raise SingularSystemError(f"Gram matrix singular (A={A:.3g}, B={B:.3g}); set rho > 0")
    M = G + rho * np.eye(G.shape[0])
    try:
        cf = scipy.linalg.cho_factor(M)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystemError("Gram system is not positive definite") from exc
    return scipy.linalg.cho_solve(cf, rhs.astype(complex))


def reconstruct_irregular(
    output: SampledOutput,
    nodes,
    T_prime: float,
    omega: float,
    section: int | None = None,
    rho: float | None = None,
    *,
    spacing: float | None = None,
    lattice_window: tuple[int, int] | None = None,
    truth: OperatorModel | None = None,
    trim: int = 8,
    freq_oversample: int = 8,
    frame_tol: float = 1e-3,
) -> ReconReport:
    """Recover ``h(t, x)`` from the response to ``sum_k delta_{lambda_k}``.

    For each grid time ``t`` the samples ``s_n = y(t + lambda_n) = h(t, t +
    lambda_n)`` are the inner products of ``eta(t, .)`` with the shifted
    exponentials ``exp(-2 pi i (t + lambda_n) nu)``.  Their Gram matrix does
    not depend on ``t``, so one factorization serves every row:

        c = (G + rho I)^{-1} s,
        h(t, x) = sum_n c_n omega sinc(omega (x - t - lambda_n)).

    Parameters
    ----------
    output : SampledOutput
        Rows must be evaluated at ``t + lambda_n`` (``shifts == nodes``).
    nodes : array_like
        Node positions of the identifier.
    T_prime : float
        Temporal support; consecutive nodes must be at least this far apart.
    omega : float
        Bandwidth of the operator class.
    section : int, optional
        Number of central nodes used; defaults to all.
    rho : float, optional
        Tikhonov shift; defaults to ``1e-10 * B`` with ``B`` the largest
        Gram eigenvalue.
    frame_tol : float
        Minimum lower sampling bound accepted by the frame spot-check.
    """
    nodes = _check_increasing(nodes)
    gaps = np.diff(nodes)
    if gaps.size and gaps.min() < T_prime * (1 - _GAP_TOL):
        raise PreconditionError(
            f"node separation {gaps.min():.6g} is below the temporal support {T_prime}"
        )
    if output.shifts.size != nodes.size or not np.allclose(output.shifts, nodes, rtol=0, atol=1e-12):
        raise PreconditionError("output must be sampled at t + lambda_n for the given nodes")
    sp, n_min, n_max = lattice_layout(truth, spacing, lattice_window)
    if omega * sp > 1 + 1e-12:
        raise PreconditionError("omega exceeds the model bandwidth 1/spacing")

    frame = ExponentialFrame(nodes, omega)
    if section is not None:
        frame = frame.section(section)
    start = int(np.searchsorted(nodes, frame.nodes[0]))
    rows = slice(start, start + frame.nodes.size)

    # shifting every node by t multiplies the frame by one unimodular factor,
    # so the bounds should not move; spot-check two times anyway
    spot = {}
    for t0 in (0.0, 0.5 * T_prime):
        A_s, B_s = sampling_bounds(frame.nodes + t0, omega)
        spot[t0] = (A_s, B_s)
        if A_s < frame_tol:
            raise PreconditionError(
                f"nodes shifted by t={t0} fail the frame check (lower bound {A_s:.3g})"
            )

    A, B = frame.eig_bounds
    rho = 1e-10 * B if rho is None else float(rho)
    frame = frame.with_regularization(rho)

    grid = output.base_grid
    n_t = int(round(T_prime / grid.step))
    if n_t > grid.count:
        raise PreconditionError("output grid does not cover [0, T']")
    S = output.values[rows, :n_t]
    C = dual_solve(frame, S)

    m = np.arange(n_min, n_max + 1)
    K = omega * np.sinc(omega * (m[:, None] * sp - frame.nodes[None, :]))
    est = K @ C
    estimate = OperatorModel(sp, T_prime, n_min, n_max, est)

    cond = B / A if A > 0 else math.inf
    rep = finish_report(estimate, truth, trim, condition=cond, regularization=rho)
    n_nu = freq_oversample * frame.nodes.size
    nu = -omega / 2 + omega * (np.arange(n_nu) + 0.5) / n_nu
    t = grid.points[:n_t]
    phase = np.exp(-2j * np.pi * (t[:, None, None] + frame.nodes[None, None, :]) * nu[None, :, None])
    rep.notes.update(
        gram_bounds=(A, B),
        sampling_bounds=spot,
        nu=nu,
        eta=np.einsum("tfn,nt->tf", phase, C),
        dual_coeffs=C,
    )
    return rep


def separation_counterexample(
    nodes,
    weights,
    l: int,
    T: float,
    *,
    spacing: float = 1.0,
    n_t: int = 64,
    lattice_window: tuple[int, int] | None = None,
) -> OperatorModel:
    """Nonzero operator annihilated by ``sum_k c_k delta_{lambda_k}``.

    With ``d = lambda_{l+1} - lambda_l < T`` the kernel is prescribed on the
    node diagonals: ``h(t, t + lambda_l) = c_{l+1}`` for ``t >= d``,
    ``h(t, t + lambda_{l+1}) = -c_l`` for ``t <= T - d``, and zero on every
    other node diagonal.  Each ``h(t_i, .)`` is the minimum-norm band-limited
    interpolant of those values, so the two surviving contributions cancel at
    every aligned output point.

    The node gaps must be multiples of the t-grid step ``T/n_t`` so that the
    lags seen by different nodes land on common grid points.
    """
    nodes = _check_increasing(nodes)
    c = np.asarray(weights, dtype=complex).reshape(-1)
    if c.size != nodes.size:
        raise PreconditionError("weights and nodes differ in length")
    if not 0 <= l < nodes.size - 1:
        raise PreconditionError(f"l={l} must index a consecutive node pair")
    d = nodes[l + 1] - nodes[l]
    if d >= T * (1 - _GAP_TOL):
        raise PreconditionError(f"gap {d} is not below T={T}; separation is not violated")
    if c[l] == 0 or c[l + 1] == 0:
        raise PreconditionError("weights c_l and c_{l+1} must be nonzero")
    if not spacing > 0:
        raise PreconditionError("spacing must be positive")
    grid = TimeGrid.midpoints(T, n_t)
    rel = (nodes - nodes[0]) / grid.step
    if np.any(np.abs(rel - np.rint(rel)) > 1e-9 * np.maximum(1.0, np.abs(rel))):
        raise PreconditionError("node gaps must be multiples of the t-grid step T/n_t")

    if lattice_window is None:
        lo = math.floor(nodes[0] / spacing) - 16
        hi = math.ceil(nodes[-1] / spacing) + 16
        lattice_window = (lo, hi)
    n_min, n_max = lattice_window
    n = np.arange(n_min, n_max + 1)
    if n.size < nodes.size:
        raise PreconditionError("lattice window too small to interpolate every node")

    t = grid.points
    values = np.zeros((nodes.size, n_t), dtype=complex)
    values[l] = np.where(t >= d, c[l + 1], 0)
    values[l + 1] = np.where(t <= T - d, -c[l], 0)
    B = np.sinc(nodes[:, None] / spacing - n[None, :])
    coeffs, *_ = scipy.linalg.lstsq(B, values)
    return OperatorModel(spacing, T, n_min, n_max, coeffs)
