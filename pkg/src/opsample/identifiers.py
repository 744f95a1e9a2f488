"""Delta-train identifiers ``sum_k c_k delta^{(r_k)}_{lambda_k}``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

__all__ = [
    "DeltaTrain",
    "uniform_train",
    "dft_train",
    "periodic_nonuniform_train",
    "kadec_train",
    "derivative_train",
    "save_train",
    "load_train",
    "MAX_DERIVATIVE_ORDER",
]

MAX_DERIVATIVE_ORDER = 4


@dataclass(frozen=True, eq=False)
class DeltaTrain:
    """Finite weighted delta train.

    Nodes are strictly increasing; ``orders[k]`` is the derivative order
    attached to node ``k``.  ``meta`` carries constructor-specific data such as
    the Kadec perturbation bound.
    """

    nodes: np.ndarray
    weights: np.ndarray
    orders: np.ndarray
    meta: dict | None = None

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float).reshape(-1)
        weights = np.array(self.weights, dtype=complex).reshape(-1)
        orders = np.array(self.orders, dtype=int).reshape(-1)
        if not (nodes.size == weights.size == orders.size):
            raise PreconditionError("nodes, weights and orders must have equal length")
        if nodes.size == 0:
            raise PreconditionError("a delta train needs at least one node")
        if np.any(np.diff(nodes) <= 0):
            raise PreconditionError("train nodes must be strictly increasing")
        if not np.any(weights != 0):
            raise PreconditionError("train weights are all zero")
        if np.any(orders < 0):
            raise PreconditionError("derivative orders must be nonnegative")
        for name, arr in (("nodes", nodes), ("weights", weights), ("orders", orders)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "meta", dict(self.meta or {}))

    def __len__(self):
        return self.nodes.size

    def scaled(self, factor) -> "DeltaTrain":
        return DeltaTrain(self.nodes, factor * self.weights, self.orders, self.meta)

    def __eq__(self, other):
        if not isinstance(other, DeltaTrain):
            return NotImplemented
        return (
            np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.orders, other.orders)
        )

    __hash__ = None


def _krange(k_range) -> np.ndarray:
    lo, hi = k_range
    if hi < lo:
        raise PreconditionError(f"empty index range {k_range}")
    return np.arange(lo, hi + 1)


def uniform_train(T: float, k_range: tuple[int, int]) -> DeltaTrain:
    """``sum_k delta_{kT}`` for ``k`` in the inclusive range."""
    if not T > 0:
        raise PreconditionError("T must be positive")
    k = _krange(k_range)
    return DeltaTrain(k * T, np.ones(k.size), np.zeros(k.size, dtype=int), {"T": T})


def dft_train(M: int, N: int, j: int, n_range: tuple[int, int]) -> DeltaTrain:
    """``sum_n exp(2 pi i j n / MN) delta_{n/M}``."""
    if M < 1 or N < 1:
        raise PreconditionError("M and N must be positive integers")
    if not 0 <= j < M * N:
        raise PreconditionError(f"channel index j={j} outside [0, {M * N - 1}]")
    n = _krange(n_range)
    # reduce the exponent first so weights are exactly MN-periodic
    weights = np.exp(2j * np.pi * ((j * n) % (M * N)) / (M * N))
    return DeltaTrain(n / M, weights, np.zeros(n.size, dtype=int), {"M": M, "N": N, "j": j})


def periodic_nonuniform_train(N: float, alpha: float, k_range: tuple[int, int]) -> DeltaTrain:
    """``sum_k delta_{kN + alpha}`` with ``0 <= alpha < N``."""
    if not 0 <= alpha < N:
        raise PreconditionError(f"alpha={alpha} outside [0, {N})")
    k = _krange(k_range)
    return DeltaTrain(
        k * N + alpha, np.ones(k.size), np.zeros(k.size, dtype=int), {"N": N, "alpha": alpha}
    )


def kadec_train(T: float, perturbation, k_range: tuple[int, int]) -> DeltaTrain:
    """Nodes ``kT + eps_k``; ``meta['L']`` records ``max |eps_k|``.

    Whether ``L < T/4`` holds is left to :func:`opsample.irregular.kadec_check`.
    """
    k = _krange(k_range)
    eps = np.array([perturbation(int(kk)) for kk in k], dtype=float)
    nodes = k * T + eps
    if np.any(np.diff(nodes) <= 0):
        raise PreconditionError("perturbed nodes are not strictly increasing")
    return DeltaTrain(
        nodes,
        np.ones(k.size),
        np.zeros(k.size, dtype=int),
        {"T": T, "L": float(np.max(np.abs(eps))), "k0": int(k[0])},
    )


def derivative_train(N: float, r: int, k_range: tuple[int, int]) -> DeltaTrain:
    """Nodes ``kN`` with unit weights, every node carrying derivative order ``r``."""
    if not 0 <= r <= MAX_DERIVATIVE_ORDER:
        raise PreconditionError(f"unsupported derivative order {r} (max {MAX_DERIVATIVE_ORDER})")
    k = _krange(k_range)
    return DeltaTrain(k * N, np.ones(k.size), np.full(k.size, r), {"N": N, "r": r})


def save_train(train: DeltaTrain, path) -> None:
    """Rows ``lambda re(c) im(c) r``, floats in round-trip ``repr`` form."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# lambda re(c) im(c) r\n")
        for lam, c, r in zip(train.nodes, train.weights, train.orders):
            fh.write(f"{float(lam)!r} {float(c.real)!r} {float(c.imag)!r} {int(r)}\n")


def load_train(path) -> DeltaTrain:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for ln in fh:
            if ln.strip() and not ln.startswith("#"):
                rows.append(ln.split())
    nodes = [float(r[0]) for r in rows]
    weights = [complex(float(r[1]), float(r[2])) for r in rows]
    orders = [int(r[3]) for r in rows]
    return DeltaTrain(nodes, weights, orders)
