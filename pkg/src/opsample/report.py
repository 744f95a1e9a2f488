"""Reconstruction reports and their CSV form."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .model import HaarModel, OperatorModel, hs_norm


@dataclass
class ReconReport:
    """Reconstructed operator plus error metrics against an optional truth.

    ``estimate`` holds the reconstruction at the aligned points
    ``(t_i, t_i + m*spacing)``; for band-limited classes these values are the
    sinc coefficients of the estimate, so the estimate is itself a model.
    Error metrics only cover the interior lattice rows (``trim`` rows dropped
    at each edge).
    """

    estimate: OperatorModel | HaarModel
    max_error: float | None = None
    l2_error: float | None = None
    rel_l2_error: float | None = None
    norm_residual: float | None = None
    condition: float | None = None
    regularization: float | None = None
    trim: int = 0
    errors: np.ndarray | None = None
    notes: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        """Write ``t_index,lattice_index,re_err,im_err`` rows.

        The last row is ``summary,<trim>,<max_error>,<l2_error>``.  Floats are
        written in shortest round-trip form.
        """
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_index", "lattice_index", "re_err", "im_err"])
            if self.errors is not None:
                lattice = _lattice_of(self.estimate)
                for j, m in enumerate(lattice):
                    for i in range(self.errors.shape[1]):
                        e = self.errors[j, i]
                        w.writerow([i, int(m), repr(float(e.real)), repr(float(e.imag))])
            w.writerow(["summary", self.trim, _fmt(self.max_error), _fmt(self.l2_error)])


def _fmt(v):
    return "" if v is None else repr(float(v))


def _lattice_of(model) -> np.ndarray:
    return np.arange(model.n_min, model.n_max + 1)


def interior_slice(n_rows: int, trim: int) -> slice:
    if 2 * trim >= n_rows:
        raise ValueError(f"trim={trim} leaves no interior rows out of {n_rows}")
    return slice(trim, n_rows - trim)


def compare(estimate, truth, trim: int = 0) -> dict:
    """Interior error metrics of ``estimate`` against ``truth``.

    Both must share the lattice window and t-grid.  Returns a dict with
    ``errors`` (full array; rows outside the interior are zeroed),
    ``max_error``, ``l2_error`` (Hilbert-Schmidt norm of the interior
    difference) and ``rel_l2_error``.
    """
    est = estimate.coeffs if isinstance(estimate, OperatorModel) else estimate.heights
    ref = truth.coeffs if isinstance(truth, OperatorModel) else truth.heights
    if est.shape != ref.shape:
        raise ValueError(f"estimate shape {est.shape} differs from truth {ref.shape}")
    sl = interior_slice(est.shape[0], trim)
    diff = np.zeros(est.shape, dtype=complex)
    diff[sl] = est[sl] - ref[sl]
    if isinstance(truth, OperatorModel):
        w = truth.spacing * truth.temporal_support / truth.n_t
    else:
        w = 1.0 / truth.n_t
    l2 = math.sqrt(w * float(np.sum(np.abs(diff) ** 2)))
    ref_norm = math.sqrt(w * float(np.sum(np.abs(ref[sl]) ** 2)))
    return {
        "errors": diff,
        "max_error": float(np.max(np.abs(diff))) if diff.size else 0.0,
        "l2_error": l2,
        "rel_l2_error": l2 / ref_norm if ref_norm > 0 else l2,
    }


def finish_report(estimate, truth=None, trim: int = 0, **kwargs) -> ReconReport:
    rep = ReconReport(estimate=estimate, trim=trim, **kwargs)
    if truth is not None:
        cmp = compare(estimate, truth, trim)
        rep.errors = cmp["errors"]
        rep.max_error = cmp["max_error"]
        rep.l2_error = cmp["l2_error"]
        rep.rel_l2_error = cmp["rel_l2_error"]
        rep.notes.setdefault("truth_hs_norm", hs_norm(truth))
    return rep
