"""Band-limited operator models and their forward action on delta trains.

An operator is stored through its time-varying impulse response

    h(t, x) = sum_n a[n](t) * sinc((x - t - n*spacing) / spacing),

with ``sinc(u) = sin(pi u) / (pi u)``.  The coefficient functions ``a[n]`` are
piecewise constant on a midpoint grid over ``[0, temporal_support]``.  Every
``h(t, .)`` is therefore band-limited to ``[-1/(2 spacing), 1/(2 spacing)]``
exactly, and ``h(t, t + m*spacing) = a[m](t)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .sincfn import sinc_derivative

__all__ = [
    "TimeGrid",
    "OperatorModel",
    "HaarModel",
    "SampledOutput",
    "eval_h",
    "eval_eta",
    "eval_sigma",
    "hs_norm",
    "apply_train",
    "random_operator",
    "random_haar_operator",
    "aligned_grid",
    "save_model",
    "load_model",
    "save_output",
    "load_output",
]

# nodes farther than this (in units of temporal support) from the evaluation
# region are rejected by apply_train
MAX_NODE_MAGNITUDE = 1e9


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``origin + i*step`` for ``0 <= i < count``."""

    origin: float
    step: float
    count: int

    def __post_init__(self):
        if not self.step > 0:
            raise PreconditionError(f"grid step must be positive, got {self.step}")
        if self.count < 1:
            raise PreconditionError(f"grid count must be positive, got {self.count}")

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)

    @classmethod
    def midpoints(cls, length: float, count: int) -> "TimeGrid":
        step = length / count
        return cls(origin=0.5 * step, step=step, count=count)


def aligned_grid(step: float, length: float) -> TimeGrid:
    """Midpoint grid over ``[0, length)`` sharing ``step`` with a model t-grid.

    Raises ValueError when ``length`` is not an integer multiple of ``step``.
    """
    ratio = length / step
    count = int(round(ratio))
    if count < 1 or abs(ratio - count) > 1e-9 * max(1.0, ratio):
        raise PreconditionError(
            f"length {length} is not a multiple of the grid step {step}"
        )
    return TimeGrid(origin=0.5 * step, step=step, count=count)


@dataclass(frozen=True, eq=False)
class OperatorModel:
    """Finite sinc-series representation of ``h(t, x)``.

    Attributes
    ----------
    spacing : float
        Sinc lattice step; the spreading function lives in
        ``[-1/(2 spacing), 1/(2 spacing)]``.
    temporal_support : float
        ``h(t, .)`` vanishes for ``t`` outside ``[0, temporal_support]``.
    n_min, n_max : int
        Active lattice indices (inclusive).
    coeffs : ndarray, shape (n_max - n_min + 1, n_t)
        ``coeffs[n - n_min, i] = a[n](t_i)``.
    """

    spacing: float
    temporal_support: float
    n_min: int
    n_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not self.spacing > 0 or not self.temporal_support > 0:
            raise PreconditionError("spacing and temporal_support must be positive")
        if self.n_max < self.n_min:
            raise PreconditionError("empty lattice window")
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] != self.n_max - self.n_min + 1:
            raise PreconditionError(
                f"coeffs must have shape ({self.n_max - self.n_min + 1}, n_t), "
                f"got {c.shape}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def bandwidth(self) -> float:
        return 1.0 / self.spacing

    @property
    def n_t(self) -> int:
        return self.coeffs.shape[1]

    @property
    def t_grid(self) -> TimeGrid:
        return TimeGrid.midpoints(self.temporal_support, self.n_t)

    @property
    def lattice(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def coefficient(self, m: int) -> np.ndarray:
        """Row ``a[m](t_i)``; zeros outside the lattice window."""
        if self.n_min <= m <= self.n_max:
            return self.coeffs[m - self.n_min]
        return np.zeros(self.n_t, dtype=complex)

    def with_coeffs(self, coeffs) -> "OperatorModel":
        return dataclasses.replace(self, coeffs=coeffs)

    def grid_index(self, t) -> np.ndarray:
        """Nearest t-grid index for each ``t`` (clipped to the grid)."""
        step = self.temporal_support / self.n_t
        idx = np.floor(np.asarray(t, dtype=float) / step).astype(int)
        return np.clip(idx, 0, self.n_t - 1)

    def h(self, t, x, order: int = 0) -> np.ndarray:
        """Vectorized ``d^order/dx^order h(t, x)``; zero for t outside support."""
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        out = np.zeros(t.shape, dtype=complex)
        inside = (t >= 0) & (t <= self.temporal_support)
        if not inside.any():
            return out
        ti, xi = t[inside], x[inside]
        a = self.coeffs[:, self.grid_index(ti)].T
        u = (xi[:, None] - ti[:, None]) / self.spacing - self.lattice[None, :]
        basis = sinc_derivative(u, order) / self.spacing**order
        out[inside] = np.einsum("kn,kn->k", a, basis)
        return out

    def __eq__(self, other):
        if not isinstance(other, OperatorModel):
            return NotImplemented
        return (
            self.spacing == other.spacing
            and self.temporal_support == other.temporal_support
            and self.n_min == other.n_min
            and self.n_max == other.n_max
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class HaarModel:
    """Operator with ``h(t, .)`` piecewise constant on unit cells ``[n, n+1)``.

    ``heights[n - n_min, i]`` is the value of ``h(t_i, x)`` for ``x`` in
    ``[n, n+1)``; the temporal support is ``[0, 1)``.  Along every diagonal
    ``x = t + c`` the kernel is a step function.
    """

    n_min: int
    n_max: int
    heights: np.ndarray
    temporal_support: float = field(default=1.0, init=False)

    def __post_init__(self):
        hts = np.array(self.heights)
        if hts.ndim != 2 or hts.shape[0] != self.n_max - self.n_min + 1:
            raise PreconditionError("heights must have shape (n_max - n_min + 1, n_t)")
        hts.setflags(write=False)
        object.__setattr__(self, "heights", hts)

    @property
    def n_t(self) -> int:
        return self.heights.shape[1]

    @property
    def t_grid(self) -> TimeGrid:
        return TimeGrid.midpoints(1.0, self.n_t)

    def h(self, t, x, order: int = 0) -> np.ndarray:
        if order != 0:
            raise PreconditionError("HaarModel has no x-derivatives")
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        out = np.zeros(t.shape, dtype=self.heights.dtype)
        cell = np.floor(x).astype(int)
        ok = (t >= 0) & (t < 1.0) & (cell >= self.n_min) & (cell <= self.n_max)
        i = np.clip(np.floor(t[ok] * self.n_t).astype(int), 0, self.n_t - 1)
        out[ok] = self.heights[cell[ok] - self.n_min, i]
        return out

    def __eq__(self, other):
        if not isinstance(other, HaarModel):
            return NotImplemented
        return (
            self.n_min == other.n_min
            and self.n_max == other.n_max
            and np.array_equal(self.heights, other.heights)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SampledOutput:
    """Channel output on the aligned points ``base_grid.points[i] + shifts[n]``.

    ``values[n, i]`` is the output at ``t_i + shifts[n]``.
    """

    base_grid: TimeGrid
    shifts: np.ndarray
    values: np.ndarray
    channel_tag: int = 0

    def __post_init__(self):
        shifts = np.array(self.shifts, dtype=float).reshape(-1)
        values = np.array(self.values, dtype=complex)
        if values.shape != (shifts.size, self.base_grid.count):
            raise PreconditionError(
                f"values shape {values.shape} does not match "
                f"({shifts.size}, {self.base_grid.count})"
            )
        shifts.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "shifts", shifts)
        object.__setattr__(self, "values", values)

    @property
    def points(self) -> np.ndarray:
        return self.shifts[:, None] + self.base_grid.points[None, :]

    def l2_norm_sq(self) -> float:
        """Midpoint-rule estimate of the squared L2 norm of the output signal.

        Exact for the aligned layouts used throughout, where the points
        ``t_i + shift_n`` tile the real line with one cell per sample.
        """
        return float(self.base_grid.step * np.sum(np.abs(self.values) ** 2))

    def scaled(self, factor) -> "SampledOutput":
        return dataclasses.replace(self, values=factor * self.values)

    def __eq__(self, other):
        if not isinstance(other, SampledOutput):
            return NotImplemented
        return (
            self.base_grid == other.base_grid
            and self.channel_tag == other.channel_tag
            and np.array_equal(self.shifts, other.shifts)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def eval_h(model, t: float, x: float) -> complex:
    """Time-varying impulse response ``h(t, x)``; exactly 0 off ``[0, T']``."""
    return complex(model.h(t, x)[()])


def eval_eta(model: OperatorModel, t: float, nu: float) -> complex:
    """Spreading function ``eta(t, nu)`` in closed form.

    The Fourier transform in ``x`` of the sinc series gives
    ``spacing * sum_n a[n](t) exp(-2 pi i (t + n spacing) nu)`` on the band and
    zero outside it.
    """
    if not 0 <= t <= model.temporal_support or abs(nu) > 0.5 / model.spacing:
        return 0j
    a = model.coeffs[:, model.grid_index(t)]
    phase = np.exp(-2j * np.pi * (t + model.lattice * model.spacing) * nu)
    return complex(model.spacing * np.sum(a * phase))


def eval_sigma(model: OperatorModel, x: float, xi: float) -> complex:
    """Kohn-Nirenberg symbol by midpoint quadrature over the t-grid."""
    grid = model.t_grid
    t = grid.points
    vals = model.h(t, np.full_like(t, x))
    return complex(grid.step * np.sum(vals * np.exp(-2j * np.pi * t * xi)))


def hs_norm(model) -> float:
    """Hilbert-Schmidt norm.

    For sinc models this is ``sqrt(spacing * sum_i w_i sum_n |a[n](t_i)|^2)``
    with midpoint weights.  For Haar models the cells have unit length.
    """
    if isinstance(model, HaarModel):
        return math.sqrt(np.sum(np.abs(model.heights) ** 2) / model.n_t)
    w = model.temporal_support / model.n_t
    return math.sqrt(model.spacing * w * float(np.sum(np.abs(model.coeffs) ** 2)))


def apply_train(model, train, shifts, base_grid: TimeGrid | None = None) -> SampledOutput:
    """Output of the operator driven by ``train`` at ``t_i + shift_n``.

    Node ``k`` contributes ``c_k * d^{r_k}/dx^{r_k} h(x - lambda_k, x)``.  Only
    nodes whose time lag falls in ``[0, T']`` are evaluated, so the sum is exact
    rather than truncated.

    Parameters
    ----------
    model : OperatorModel or HaarModel
    train : DeltaTrain
    shifts : array_like
        Evaluation offsets, one output row per shift.
    base_grid : TimeGrid, optional
        Defaults to the model's own t-grid.
    """
    grid = model.t_grid if base_grid is None else base_grid
    shifts = np.asarray(shifts, dtype=float).reshape(-1)
    nodes = np.asarray(train.nodes, dtype=float)
    if nodes.size and np.max(np.abs(nodes)) > MAX_NODE_MAGNITUDE * model.temporal_support:
        raise PreconditionError("train node outside the representable evaluation window")

    t = grid.points
    lo, hi = t[0], t[-1]
    order = np.argsort(shifts, kind="stable")
    sorted_shifts = shifts[order]
    values = np.zeros((shifts.size, t.size), dtype=complex)
    support = model.temporal_support
    weights = np.asarray(train.weights)
    orders = np.asarray(train.orders)

    # h(x - lam, x) = sum_n a[n](x - lam) sinc(lam/spacing - n): the basis
    # vector depends on lam only, so every node reduces to one row of P
    fast = isinstance(model, OperatorModel)
    if fast:
        P = np.zeros((nodes.size, model.n_t), dtype=complex)
        for r in np.unique(orders):
            sel = orders == r
            u = nodes[sel, None] / model.spacing - model.lattice[None, :]
            basis = sinc_derivative(u, int(r)) / model.spacing ** int(r)
            P[sel] = basis @ model.coeffs

    for k, lam in enumerate(nodes):
        # rows whose points x = t + s can satisfy 0 <= x - lam <= T'
        a = np.searchsorted(sorted_shifts, lam - hi, side="left")
        b = np.searchsorted(sorted_shifts, lam + support - lo, side="right")
        if a >= b:
            continue
        rows = order[a:b]
        x = shifts[rows, None] + t[None, :]
        lag = x - lam
        if fast:
            inside = (lag >= 0) & (lag <= support)
            block = np.zeros(lag.shape, dtype=complex)
            block[inside] = P[k, model.grid_index(lag[inside])]
            values[rows] += weights[k] * block
        else:
            values[rows] += weights[k] * model.h(lag, x, order=int(orders[k]))
    return SampledOutput(base_grid=grid, shifts=shifts, values=values)


def random_operator(
    spacing: float,
    temporal_support: float,
    lattice_window: tuple[int, int],
    n_t: int,
    seed: int,
) -> OperatorModel:
    """Operator with i.i.d. complex standard normal coefficients.

    Uses ``numpy.random.default_rng(seed)`` (PCG64); real and imaginary parts
    each have variance 1/2.
    """
    n_min, n_max = lattice_window
    if n_max < n_min:
        raise PreconditionError("empty lattice window")
    if n_t < 1:
        raise PreconditionError("n_t must be positive")
    rng = np.random.default_rng(seed)
    shape = (n_max - n_min + 1, n_t)
    coeffs = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
    return OperatorModel(spacing, temporal_support, n_min, n_max, coeffs)


def random_haar_operator(
    lattice_window: tuple[int, int], n_t: int, seed: int, low: int = -5, high: int = 5
) -> HaarModel:
    """Haar-class operator with i.i.d. integer step heights in ``[low, high]``."""
    n_min, n_max = lattice_window
    rng = np.random.default_rng(seed)
    heights = rng.integers(low, high, size=(n_max - n_min + 1, n_t), endpoint=True)
    return HaarModel(n_min, n_max, heights.astype(float))


# -- text serialization ------------------------------------------------------

MODEL_HEADER = "# opsample-model v1"


def save_model(model: OperatorModel, path) -> None:
    """Write ``model`` as text.

    Layout::

        # opsample-model v1
        spacing <float> temporal_support <float> n_min <int> n_max <int> n_t <int>
        <n> <i> <re> <im>
        ...

    Floats use ``repr`` so a reload is bit-exact.
    """
    lines = [
        MODEL_HEADER,
        f"spacing {model.spacing!r} temporal_support {model.temporal_support!r} "
        f"n_min {model.n_min} n_max {model.n_max} n_t {model.n_t}",
    ]
    for j, n in enumerate(model.lattice):
        for i in range(model.n_t):
            z = model.coeffs[j, i]
            lines.append(f"{n} {i} {float(z.real)!r} {float(z.imag)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> OperatorModel:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != MODEL_HEADER:
        raise PreconditionError(f"{path}: missing model header")
    tok = lines[1].split()
    meta = dict(zip(tok[0::2], tok[1::2]))
    n_min, n_max, n_t = int(meta["n_min"]), int(meta["n_max"]), int(meta["n_t"])
    coeffs = np.zeros((n_max - n_min + 1, n_t), dtype=complex)
    for ln in lines[2:]:
        n, i, re, im = ln.split()
        coeffs[int(n) - n_min, int(i)] = complex(float(re), float(im))
    return OperatorModel(
        float(meta["spacing"]), float(meta["temporal_support"]), n_min, n_max, coeffs
    )


OUTPUT_HEADER = "# opsample-output v1"


def save_output(output: SampledOutput, path) -> None:
    """Write a channel output as text.

    Layout::

        # opsample-output v1
        channel <int> origin <float> step <float> count <int>
        shift <n> <float>        (one line per shift)
        <n> <i> <re> <im>
    """
    g = output.base_grid
    lines = [
        OUTPUT_HEADER,
        f"channel {output.channel_tag} origin {g.origin!r} step {g.step!r} count {g.count}",
    ]
    lines += [f"shift {n} {float(s)!r}" for n, s in enumerate(output.shifts)]
    for n in range(output.shifts.size):
        for i in range(g.count):
            z = output.values[n, i]
            lines.append(f"{n} {i} {float(z.real)!r} {float(z.imag)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_output(path) -> SampledOutput:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != OUTPUT_HEADER:
        raise PreconditionError(f"{path}: missing output header")
    tok = lines[1].split()
    meta = dict(zip(tok[0::2], tok[1::2]))
    grid = TimeGrid(float(meta["origin"]), float(meta["step"]), int(meta["count"]))
    shifts = [float(ln.split()[2]) for ln in lines[2:] if ln.startswith("shift")]
    values = np.zeros((len(shifts), grid.count), dtype=complex)
    for ln in lines[2 + len(shifts) :]:
        n, i, re, im = ln.split()
        values[int(n), int(i)] = complex(float(re), float(im))
    return SampledOutput(grid, shifts, values, channel_tag=int(meta["channel"]))
