"""Config-driven experiment runs: generate, probe, reconstruct, report.

A config is an INI file with the sections ``[experiment]``, ``[model]``,
``[train]``, ``[recon]`` and ``[output]``.  Keys are flat; every key belongs to
exactly one field of :class:`ExperimentConfig`.  Unset fields take the
defaults of the chosen scenario.  Example::

    [experiment]
    scenario = uniform
    seed = 7

    [model]
    spacing = 1.25
    lattice_min = -64
    lattice_max = 64

    [train]
    pad = 32
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import identifiers as ids
from .errors import PreconditionError
from .irregular import (
    ExponentialFrame,
    beurling_density,
    frame_bound_curve,
    frame_bounds,
    kadec_check,
    reconstruct_irregular,
    separation_counterexample,
)
from .model import (
    OperatorModel,
    SampledOutput,
    aligned_grid,
    apply_train,
    hs_norm,
    random_haar_operator,
    random_operator,
)
from .multichannel import (
    derivative_outputs,
    derivative_two_channel_reconstruct,
    multichannel_outputs,
    pns_general_reconstruct,
    pns_outputs,
    pns_two_channel_reconstruct,
    random_mixing_coefficients,
    reconstruct_multichannel_dft,
    reconstruct_multichannel_general,
)
from .report import ReconReport
from .svg import fmt_float, line_plot
from .uniform import (
    haar_reconstruct,
    make_filter,
    reconstruct_uniform,
    verify_norm_identity_uniform,
    wks_reconstruct,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ResultRow",
    "SCENARIOS",
    "ANCHORS",
    "load_config",
    "parse_config",
    "run",
    "sweep",
    "write_csv",
    "generate_model",
    "probe",
    "recon",
]


class ConfigError(PreconditionError):
    """Invalid or incomplete experiment configuration."""


# kind of every config field: int, float, str, floats (comma list), ints
_FIELDS = {
    "experiment": {"scenario": "str", "seed": "int"},
    "model": {
        "spacing": "float",
        "temporal_support": "float",
        "lattice_min": "int",
        "lattice_max": "int",
        "n_t": "int",
    },
    "train": {
        "T": "float",
        "pad": "int",
        "M": "int",
        "N": "int",
        "alpha": "floats",
        "perturbation": "float",
        "kadec_amp": "float",
        "kadec_freq": "float",
        "gap": "float",
        "nodes": "str",
        "node_count": "int",
        "h_list": "floats",
        "sections": "ints",
        "signal": "str",
    },
    "recon": {
        "omega": "float",
        "section": "int",
        "rho": "float",
        "trim": "int",
    },
    "output": {"csv": "str", "svg": "str", "out_dir": "str"},
}
FIELD_KIND = {k: v for sec in _FIELDS.values() for k, v in sec.items()}
NUMERIC = {k for k, v in FIELD_KIND.items() if v in ("int", "float")}


@dataclass
class ExperimentConfig:
    """Flat experiment description; ``None`` means "scenario default"."""

    scenario: str = "uniform"
    seed: int | None = None
    spacing: float | None = None
    temporal_support: float | None = None
    lattice_min: int | None = None
    lattice_max: int | None = None
    n_t: int | None = None
    T: float | None = None
    pad: int | None = None
    M: int | None = None
    N: int | None = None
    alpha: tuple | None = None
    perturbation: float | None = None
    kadec_amp: float | None = None
    kadec_freq: float | None = None
    gap: float | None = None
    nodes: str | None = None
    node_count: int | None = None
    h_list: tuple | None = None
    sections: tuple | None = None
    signal: str | None = None
    omega: float | None = None
    section: int | None = None
    rho: float | None = None
    trim: int | None = None
    csv: str = "results.csv"
    svg: str | None = None
    out_dir: str = "."

    def resolved(self) -> "ExperimentConfig":
        """Copy with scenario defaults filled in and invariants checked."""
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        vals = dataclasses.asdict(self)
        for k, v in DEFAULTS[self.scenario].items():
            if vals.get(k) is None:
                vals[k] = v
        if vals["spacing"] is None and vals.get("omega") is not None:
            vals["spacing"] = 1.0 / vals["omega"]
        if vals["omega"] is None and vals.get("spacing") is not None:
            vals["omega"] = 1.0 / vals["spacing"]
        cfg = ExperimentConfig(**vals)
        if self.scenario in RANDOMIZED and cfg.seed is None:
            raise ConfigError(f"scenario {self.scenario!r} is randomized and needs a seed")
        return cfg

    def echo(self) -> str:
        """``key=value`` pairs of the fields this scenario uses."""
        parts = []
        for k in ECHO[self.scenario]:
            v = getattr(self, k)
            if isinstance(v, tuple):
                v = " ".join(fmt_float(x) for x in v)
            elif isinstance(v, float):
                v = fmt_float(v)
            parts.append(f"{k}={v}")
        return ";".join(parts)


def _convert(key: str, raw: str):
    kind = FIELD_KIND[key]
    raw = raw.strip()
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "floats":
            return tuple(float(x) for x in raw.replace(",", " ").split())
        if kind == "ints":
            return tuple(int(x) for x in raw.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"field {key!r}: cannot parse {raw!r} as {kind}") from exc
    return raw


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep T, M, N case-sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    vals = {}
    for section in cp.sections():
        if section not in _FIELDS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in cp.items(section):
            if key not in _FIELDS[section]:
                raise ConfigError(f"unknown field {key!r} in [{section}]")
            vals[key] = _convert(key, raw)
    return ExperimentConfig(**vals)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


@dataclass
class ResultRow:
    scenario: str
    seed: int | None
    params: str
    max_error: float | None = None
    l2_error: float | None = None
    norm_identity_residual: float | None = None
    condition_estimate: float | None = None
    runtime_ms: float = 0.0
    metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("max_error", "l2_error", "norm_identity_residual"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative")


CSV_COLUMNS = [
    "scenario",
    "seed",
    "params",
    "max_error",
    "l2_error",
    "norm_identity_residual",
    "condition_estimate",
    "metrics",
]


def write_csv(rows, path, anchor: str, timing: bool = False) -> None:
    """Write result rows; the first line is a ``#`` comment with the anchor.

    Runtime is omitted unless ``timing`` is set, so repeated runs of one
    config produce identical bytes.
    """
    cols = CSV_COLUMNS + (["runtime_ms"] if timing else [])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {anchor}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            metrics = ";".join(f"{k}={_fmt_metric(v)}" for k, v in sorted(r.metrics.items()))
            line = [
                r.scenario,
                "" if r.seed is None else r.seed,
                r.params,
                fmt_float(r.max_error),
                fmt_float(r.l2_error),
                fmt_float(r.norm_identity_residual),
                fmt_float(r.condition_estimate),
                metrics,
            ]
            if timing:
                line.append(fmt_float(r.runtime_ms))
            w.writerow(line)


def _fmt_metric(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return fmt_float(v)


# -- scenarios -------------------------------------------------------------------

ANCHORS = {
    "uniform": "uniform operator sampling: h(t,x)=r(t) T sum_n (H sum_k delta_kT)(t+nT) phi(x-t-nT); ||H||_HS = sqrt(T) ||H sum_n delta_nT||",
    "irregular": "irregular operator sampling with Kadec nodes |lambda_k - kT| <= L < T/4 and lambda_{k+1}-lambda_k >= T'",
    "dft_multichannel": "multi-channel sampling with DFT identifiers sum_n exp(2 pi i j n/MN) delta_{n/M}",
    "general_multichannel": "multi-channel sampling with periodic mixing A_k[j,l] = c_{j,k-l}",
    "pns": "periodic nonuniform sampling: h = sum_n y1(t+2n) S1(x-t-2n) + y2(t+2n+alpha) S2(x-t-2n-alpha)",
    "derivative": "derivative sampling: h = sum_n h(t,t+2n) sinc^2((x-t-2n)/2) + d_x h(t,t+2n) T_n(t,x)",
    "counterexample": "separation necessity: a two-column kernel annihilated by sum_k c_k delta_{lambda_k} when lambda_{l+1}-lambda_l < T",
    "density": "Beurling densities D+ = limsup n+(h)/h, D- = liminf n-(h)/h",
    "frame_bounds": "frames of exponentials {exp(-2 pi i lambda_k xi)} in L^2[-Omega/2, Omega/2]",
    "wks_baseline": "classical sampling f(x) = T sum_n f(nT) phi(x-nT)",
    "haar": "Haar shift-invariant class: kernel is a step function along diagonals",
}

_MODEL = {"lattice_min": -64, "lattice_max": 64, "n_t": 64, "trim": 8}
DEFAULTS = {
    "uniform": {**_MODEL, "spacing": 1.0, "temporal_support": 1.0, "T": 1.0, "pad": 16},
    "irregular": {
        **_MODEL,
        "lattice_min": -32,
        "lattice_max": 32,
        "n_t": 32,
        "omega": 0.95,
        "temporal_support": 0.5,
        "T": 1.0,
        "kadec_amp": 0.2,
        "kadec_freq": 2.7,
        "section": 128,
    },
    "dft_multichannel": {**_MODEL, "M": 2, "N": 2, "trim": 0},
    "general_multichannel": {**_MODEL, "M": 2, "N": 2, "perturbation": 0.2, "trim": 0},
    "pns": {**_MODEL, "M": 1, "N": 2, "alpha": (0.0, 0.37), "pad": 8192},
    "derivative": {**_MODEL, "pad": 8192},
    "counterexample": {"T": 1.0, "gap": 0.5, "n_t": 64, "node_count": 32, "spacing": 1.0},
    "density": {"nodes": "lattice", "h_list": (10.0, 25.0, 50.0, 100.0, 200.0), "alpha": (0.5,), "gap": 50.0},
    "frame_bounds": {
        "nodes": "kadec",
        "T": 1.0,
        "omega": 0.95,
        "kadec_amp": 0.2,
        "kadec_freq": 2.7,
        "sections": (16, 32, 64, 128),
    },
    "wks_baseline": {"T": 1.0, "omega": 0.8, "pad": 64, "signal": "exp"},
    "haar": {"lattice_min": -8, "lattice_max": 8, "n_t": 16, "trim": 0},
}
SCENARIOS = tuple(DEFAULTS)
RANDOMIZED = {"uniform", "irregular", "dft_multichannel", "general_multichannel", "pns", "derivative", "haar"}
ECHO = {
    "uniform": ("spacing", "temporal_support", "lattice_min", "lattice_max", "n_t", "T", "pad", "trim"),
    "irregular": (
        "omega", "temporal_support", "lattice_min", "lattice_max", "n_t", "T",
        "kadec_amp", "kadec_freq", "section", "rho", "trim",
    ),
    "dft_multichannel": ("M", "N", "lattice_min", "lattice_max", "n_t"),
    "general_multichannel": ("M", "N", "lattice_min", "lattice_max", "n_t", "perturbation"),
    "pns": ("M", "N", "alpha", "lattice_min", "lattice_max", "n_t", "pad", "trim"),
    "derivative": ("lattice_min", "lattice_max", "n_t", "pad", "trim"),
    "counterexample": ("T", "gap", "n_t", "node_count", "spacing"),
    "density": ("nodes", "h_list", "alpha", "gap"),
    "frame_bounds": ("nodes", "T", "omega", "kadec_amp", "kadec_freq", "sections"),
    "wks_baseline": ("T", "omega", "pad", "signal"),
    "haar": ("lattice_min", "lattice_max", "n_t"),
}


def _window(cfg):
    return (cfg.lattice_min, cfg.lattice_max)


def _kadec_perturbation(cfg):
    amp, freq, T = cfg.kadec_amp, cfg.kadec_freq, cfg.T
    return lambda k: amp * T * math.sin(freq * k)


def _irregular_nodes(cfg):
    half = cfg.section // 2
    return ids.kadec_train(cfg.T, _kadec_perturbation(cfg), (-half, cfg.section - half - 1))


def generate_model(cfg: ExperimentConfig):
    """Ground-truth operator of a model-based scenario."""
    cfg = cfg.resolved()
    s = cfg.scenario
    if s == "uniform":
        return random_operator(cfg.spacing, cfg.temporal_support, _window(cfg), cfg.n_t, cfg.seed)
    if s == "irregular":
        return random_operator(1.0 / cfg.omega, cfg.temporal_support, _window(cfg), cfg.n_t, cfg.seed)
    if s in ("dft_multichannel", "general_multichannel"):
        return random_operator(1.0 / cfg.M, float(cfg.N), _window(cfg), cfg.n_t, cfg.seed)
    if s == "pns":
        return random_operator(1.0 / cfg.M, float(cfg.N), _window(cfg), cfg.n_t, cfg.seed)
    if s == "derivative":
        return random_operator(1.0, 2.0, _window(cfg), cfg.n_t, cfg.seed)
    if s == "haar":
        return random_haar_operator(_window(cfg), cfg.n_t, cfg.seed)
    raise ConfigError(f"scenario {s!r} has no generated model")


def _uniform_shifts(cfg, model):
    lo = math.floor(model.n_min * model.spacing / cfg.T) - cfg.pad
    hi = math.ceil(model.n_max * model.spacing / cfg.T) + cfg.pad
    return np.arange(lo, hi + 1)


def _mixing_coeffs(cfg):
    return random_mixing_coefficients(cfg.M, cfg.N, cfg.seed, cfg.perturbation)


def probe(cfg: ExperimentConfig, model) -> list[SampledOutput]:
    """Channel outputs of ``model`` under the scenario's identifier(s)."""
    cfg = cfg.resolved()
    s = cfg.scenario
    if s == "uniform":
        n = _uniform_shifts(cfg, model)
        train = ids.uniform_train(cfg.T, (int(n[0]) - 2, int(n[-1]) + 1))
        return [apply_train(model, train, n * cfg.T)]
    if s == "irregular":
        train = _irregular_nodes(cfg)
        return [apply_train(model, train, train.nodes)]
    if s == "dft_multichannel":
        return multichannel_outputs(model, cfg.M, cfg.N)
    if s == "general_multichannel":
        return multichannel_outputs(model, cfg.M, cfg.N, _mixing_coeffs(cfg))
    if s == "pns":
        return pns_outputs(model, cfg.alpha, float(cfg.N), cfg.pad)
    if s == "derivative":
        return derivative_outputs(model, cfg.pad)
    if s == "haar":
        train = ids.uniform_train(1.0, (model.n_min - 2, model.n_max + 1))
        return [apply_train(model, train, np.arange(model.n_min, model.n_max + 1))]
    raise ConfigError(f"scenario {s!r} has no probe stage")


def recon(cfg: ExperimentConfig, outputs, truth=None) -> ReconReport:
    """Reconstruct from ``outputs`` with the scenario's formula."""
    cfg = cfg.resolved()
    s = cfg.scenario
    lw = None if truth is not None else _window(cfg)
    if s == "uniform":
        out = outputs[0]
        sp = cfg.spacing
        rep = reconstruct_uniform(
            out,
            cfg.T,
            cfg.temporal_support,
            make_filter(cfg.T, 1.0 / sp),
            spacing=sp,
            lattice_window=lw,
            truth=truth,
            trim=cfg.trim,
        )
        if truth is not None:
            rep.norm_residual = verify_norm_identity_uniform(truth, out, cfg.T).residual
        return rep
    if s == "irregular":
        train = _irregular_nodes(cfg)
        return reconstruct_irregular(
            outputs[0],
            train.nodes,
            cfg.temporal_support,
            cfg.omega,
            cfg.section,
            cfg.rho,
            spacing=1.0 / cfg.omega,
            lattice_window=lw,
            truth=truth,
            trim=cfg.trim,
        )
    if s == "dft_multichannel":
        return reconstruct_multichannel_dft(
            outputs, cfg.M, cfg.N, spacing=1.0 / cfg.M, lattice_window=lw, truth=truth, trim=cfg.trim
        )
    if s == "general_multichannel":
        return reconstruct_multichannel_general(
            outputs,
            _mixing_coeffs(cfg),
            cfg.M,
            cfg.N,
            spacing=1.0 / cfg.M,
            lattice_window=lw,
            truth=truth,
            trim=cfg.trim,
        )
    if s == "pns":
        if cfg.M == 1 and cfg.N == 2 and len(cfg.alpha) == 2 and cfg.alpha[0] == 0.0:
            return pns_two_channel_reconstruct(
                outputs, cfg.alpha[1], lattice_window=lw, truth=truth, trim=cfg.trim
            )
        return pns_general_reconstruct(
            outputs, cfg.alpha, cfg.M, cfg.N, lattice_window=lw, truth=truth, trim=cfg.trim
        )
    if s == "derivative":
        return derivative_two_channel_reconstruct(
            outputs[0], outputs[1], lattice_window=lw, truth=truth, trim=cfg.trim
        )
    if s == "haar":
        return haar_reconstruct(outputs[0], truth)
    raise ConfigError(f"scenario {s!r} has no reconstruction stage")


def _row_from_report(cfg, rep: ReconReport, metrics=None) -> ResultRow:
    return ResultRow(
        scenario=cfg.scenario,
        seed=cfg.seed,
        params=cfg.echo(),
        max_error=rep.max_error,
        l2_error=rep.l2_error,
        norm_identity_residual=rep.norm_residual,
        condition_estimate=rep.condition,
        metrics=dict(metrics or {}),
    )


def _run_model_scenario(cfg):
    model = generate_model(cfg)
    outputs = probe(cfg, model)
    rep = recon(cfg, outputs, truth=model)
    metrics = {}
    if cfg.scenario == "irregular":
        k = kadec_check(_irregular_nodes(cfg).nodes, cfg.T)
        A, B = rep.notes["gram_bounds"]
        A1, _ = frame_bounds(ExponentialFrame(_irregular_nodes(cfg).nodes, 1.0 / cfg.T))
        metrics.update(
            kadec_L=k.L, kadec_pass=k.passed, gram_A=A, gram_B=B, riesz_A=A1, rho=rep.regularization
        )
    if cfg.scenario == "haar":
        metrics["exact"] = rep.max_error == 0
    return [_row_from_report(cfg, rep, metrics)], {}


def _run_counterexample(cfg):
    half = cfg.node_count // 2
    left = -np.arange(half, 0, -1, dtype=float)
    right = cfg.gap + np.arange(1, cfg.node_count - half - 1, dtype=float)
    nodes = np.concatenate([left, [0.0, cfg.gap], right])
    c = np.ones(nodes.size)
    l = half
    model = separation_counterexample(nodes, c, l, cfg.T, spacing=cfg.spacing, n_t=cfg.n_t)
    train = ids.DeltaTrain(nodes, c, np.zeros(nodes.size, dtype=int))
    out = apply_train(model, train, nodes, base_grid=aligned_grid(cfg.T / cfg.n_t, cfg.T))
    hs = hs_norm(model)
    ratio = float(np.max(np.abs(out.values))) / hs
    row = ResultRow(
        cfg.scenario,
        cfg.seed,
        cfg.echo(),
        metrics={"max_output_over_hs_norm": ratio, "hs_norm": hs, "gap": cfg.gap},
    )
    return [row], {}


def density_nodes(kind: str, alpha=0.5, gap=50.0) -> np.ndarray:
    """Node families for the density scenario."""
    if kind == "lattice":
        return np.arange(-500, 501, dtype=float)
    if kind == "pns":
        n = np.arange(-250, 250)
        return np.sort(np.concatenate([2.0 * n, 2.0 * n + alpha]))
    if kind == "gap":
        base = np.arange(-500, 501, dtype=float)
        return base[(base <= 0) | (base >= gap)]
    raise ConfigError(f"unknown node family {kind!r}")


def _run_density(cfg):
    nodes = density_nodes(cfg.nodes, cfg.alpha[0], cfg.gap)
    rep = beurling_density(nodes, cfg.h_list)
    row = ResultRow(
        cfg.scenario,
        cfg.seed,
        cfg.echo(),
        metrics={"D_plus": float(rep.D_plus), "D_minus": float(rep.D_minus), "caveat": "finite_window"},
    )
    plot = {
        "title": f"window counts per length ({cfg.nodes})",
        "xlabel": "h",
        "ylabel": "n(h)/h",
        "series": [("n+(h)/h", rep.h, rep.ratio_plus), ("n-(h)/h", rep.h, rep.ratio_minus)],
    }
    return [row], plot


def _run_frame_bounds(cfg):
    size = max(cfg.sections)
    if cfg.nodes == "kadec":
        half = size // 2
        nodes = ids.kadec_train(cfg.T, _kadec_perturbation(cfg), (-half, size - half - 1)).nodes
    elif cfg.nodes == "lattice":
        nodes = cfg.T * np.arange(-(size // 2), size - size // 2, dtype=float)
    else:
        raise ConfigError(f"unknown node family {cfg.nodes!r}")
    curve = frame_bound_curve(ExponentialFrame(nodes, cfg.omega), cfg.sections)
    metrics = {}
    for s, A, B in curve:
        metrics[f"A_{int(s)}"] = float(A)
        metrics[f"B_{int(s)}"] = float(B)
    metrics["monotone"] = bool(np.all(np.diff(curve[:, 1]) <= 1e-12) and np.all(np.diff(curve[:, 2]) >= -1e-12))
    row = ResultRow(
        cfg.scenario,
        cfg.seed,
        cfg.echo(),
        condition_estimate=float(curve[-1, 2] / curve[-1, 1]) if curve[-1, 1] > 0 else math.inf,
        metrics=metrics,
    )
    plot = {
        "title": "Gram eigenvalue bounds vs section size",
        "xlabel": "section size",
        "ylabel": "eigenvalue",
        "series": [("A", curve[:, 0], curve[:, 1]), ("B", curve[:, 0], curve[:, 2])],
    }
    return [row], plot


def wks_signal(kind: str, omega: float):
    """Test signals for the function-sampling baseline."""
    if kind == "exp":
        nu0 = 0.3 * omega
        return lambda x: np.exp(2j * np.pi * nu0 * np.asarray(x))
    if kind == "sinc":
        return lambda x: np.sinc(omega * np.asarray(x))
    raise ConfigError(f"unknown signal {kind!r}")


def _run_wks(cfg):
    f = wks_signal(cfg.signal, cfg.omega)
    filt = make_filter(cfg.T, cfg.omega)
    n = np.arange(-cfg.pad, cfg.pad + 1)
    pos = n * cfg.T
    x = np.linspace(-cfg.pad * cfg.T / 4, cfg.pad * cfg.T / 4, 257)
    est = wks_reconstruct(pos, f(pos), filt, x)
    err = float(np.max(np.abs(est - f(x))))
    row = ResultRow(cfg.scenario, cfg.seed, cfg.echo(), max_error=err, metrics={"filter": filt.kind})
    return [row], {}


_RUNNERS = {
    "counterexample": _run_counterexample,
    "density": _run_density,
    "frame_bounds": _run_frame_bounds,
    "wks_baseline": _run_wks,
}


def run(cfg: ExperimentConfig, *, write: bool = True, timing: bool = False) -> list[ResultRow]:
    """Execute one scenario end to end; optionally write CSV (and SVG)."""
    cfg = cfg.resolved()
    t0 = time.perf_counter()
    runner = _RUNNERS.get(cfg.scenario, _run_model_scenario)
    rows, plot = runner(cfg)
    elapsed = 1e3 * (time.perf_counter() - t0)
    for r in rows:
        r.runtime_ms = elapsed
    if write:
        os.makedirs(cfg.out_dir, exist_ok=True)
        write_csv(rows, os.path.join(cfg.out_dir, cfg.csv), f"{cfg.scenario}: {ANCHORS[cfg.scenario]}", timing)
        if cfg.svg and plot:
            line_plot(os.path.join(cfg.out_dir, cfg.svg), plot["series"], title=plot["title"],
                      xlabel=plot["xlabel"], ylabel=plot["ylabel"])
    return rows


def sweep(cfg: ExperimentConfig, axis: str, values, *, timing: bool = False) -> list[ResultRow]:
    """One run per value of ``axis`` with a shared seed.

    Writes a combined CSV and, when ``cfg.svg`` is set, an error-vs-axis plot.
    An empty ``values`` list returns ``[]`` and writes nothing.
    """
    if axis not in NUMERIC:
        raise ConfigError(f"sweep axis {axis!r} is not a numeric config field")
    values = list(values)
    if not values:
        return []
    kind = FIELD_KIND[axis]
    rows = []
    for v in values:
        v = int(v) if kind == "int" else float(v)
        sub = dataclasses.replace(cfg, **{axis: v})
        rows.extend(run(sub, write=False, timing=timing))
    base = cfg.resolved()
    os.makedirs(base.out_dir, exist_ok=True)
    write_csv(rows, os.path.join(base.out_dir, base.csv), f"{base.scenario}: {ANCHORS[base.scenario]}", timing)
    if base.svg:
        xs = np.array(values, dtype=float)
        series = []
        for name in ("max_error", "l2_error", "norm_identity_residual"):
            ys = np.array([np.nan if getattr(r, name) is None else getattr(r, name) for r in rows])
            if np.any(np.isfinite(ys)):
                series.append((name, xs, ys))
        line_plot(os.path.join(base.out_dir, base.svg), series, title=f"{base.scenario}: error vs {axis}",
                  xlabel=axis, ylabel="error", logy=True)
    return rows
