"""Command-line driver.

Subcommands: ``run``, ``sweep``, ``gen``, ``probe``, ``recon``, ``analyze``.
Exit status is 0 on success, 2 on a precondition violation (bad config,
violated sampling condition, singular system) and 1 on any other error.

Conventions: ``sinc(u) = sin(pi u) / (pi u)`` with ``sinc(0) = 1``; an operator
is stored through ``h(t, x) = sum_n a[n](t) sinc((x - t - n*spacing)/spacing)``.
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import os
import sys

import numpy as np

from . import harness
from .errors import PreconditionError
from .irregular import ExponentialFrame, beurling_density, frame_bound_curve, kadec_check, sampling_bounds
from .model import load_model, load_output, save_model, save_output
from .report import ReconReport
from .svg import fmt_float, line_plot

EXIT_OK, EXIT_INTERNAL, EXIT_PRECONDITION = 0, 1, 2


def _common(p):
    p.add_argument("--config", help="INI experiment config")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out-dir", help="directory for all written files")
    p.add_argument("--csv", help="CSV file name inside --out-dir")
    p.add_argument("--svg", help="SVG file name inside --out-dir")
    p.add_argument("--scenario", choices=harness.SCENARIOS, help="override the config scenario")
    p.add_argument("--timing", action="store_true", help="add a runtime_ms column (breaks byte-reproducibility)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="opsample",
        description=__doc__.split("\n\n")[0],
        epilog="sinc(u) = sin(pi u)/(pi u), sinc(0) = 1. Exit codes: 0 ok, 2 precondition, 1 internal.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario end to end")
    _common(p)

    p = sub.add_parser("sweep", help="run a scenario over values of one numeric field")
    _common(p)
    p.add_argument("--axis", required=True, help="numeric config field to vary")
    p.add_argument("--values", default="", help="comma-separated values")

    p = sub.add_parser("gen", help="write the scenario's random ground-truth model")
    _common(p)
    p.add_argument("--model-out", default="model.txt", help="model file name inside --out-dir")

    p = sub.add_parser("probe", help="write channel outputs of a model")
    _common(p)
    p.add_argument("--model", required=True, help="model file written by gen")

    p = sub.add_parser("recon", help="reconstruct from channel outputs written by probe")
    _common(p)
    p.add_argument("--outputs", nargs="+", required=True, help="channel output files, in channel order")
    p.add_argument("--truth", help="optional ground-truth model for error metrics")

    p = sub.add_parser("analyze", help="Kadec, density and frame-bound analysis of a node file")
    p.add_argument("--nodes", required=True, help="train file (rows: lambda re im r) or one node per line")
    p.add_argument("--T", type=float, default=1.0, help="reference lattice step")
    p.add_argument("--omega", type=float, default=1.0, help="frequency interval width")
    p.add_argument("--h", default="", help="comma-separated density window lengths")
    p.add_argument("--sections", default="16,32,64,128", help="comma-separated section sizes")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--csv", default="analysis.csv")
    p.add_argument("--svg")
    return ap


def _config(args) -> harness.ExperimentConfig:
    cfg = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    over = {}
    for name in ("seed", "out_dir", "csv", "svg", "scenario"):
        v = getattr(args, name, None)
        if v is not None:
            over[name] = v
    return dataclasses.replace(cfg, **over)


def _read_nodes(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for ln in fh:
            if ln.strip() and not ln.startswith("#"):
                rows.append(float(ln.split()[0]))
    return np.array(rows)


def _floats(text):
    return [float(v) for v in text.replace(",", " ").split()]


def _report_csv(rep: ReconReport, path):
    rep.to_csv(path)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except PreconditionError as exc:
        print(f"opsample: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 1
        print(f"opsample: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "analyze":
        return _analyze(args)
    cfg = _config(args)
    timing = getattr(args, "timing", False)
    if cmd == "run":
        rows = harness.run(cfg, timing=timing)
        for r in rows:
            print(f"{r.scenario} max_error={fmt_float(r.max_error)} metrics={r.metrics}")
        return EXIT_OK
    if cmd == "sweep":
        rows = harness.sweep(cfg, args.axis, _floats(args.values), timing=timing)
        print(f"{len(rows)} rows")
        return EXIT_OK

    res = cfg.resolved()
    os.makedirs(res.out_dir, exist_ok=True)
    if cmd == "gen":
        model = harness.generate_model(res)
        if not hasattr(model, "coeffs"):
            raise PreconditionError("only sinc-series models can be written with gen")
        path = os.path.join(res.out_dir, args.model_out)
        save_model(model, path)
        print(path)
        return EXIT_OK
    if cmd == "probe":
        model = load_model(args.model)
        for out in harness.probe(res, model):
            path = os.path.join(res.out_dir, f"channel_{out.channel_tag}.txt")
            save_output(out, path)
            print(path)
        return EXIT_OK
    if cmd == "recon":
        files = []
        for pattern in args.outputs:
            files.extend(sorted(glob.glob(pattern)) or [pattern])
        outputs = [load_output(f) for f in files]
        outputs.sort(key=lambda o: o.channel_tag)
        truth = load_model(args.truth) if args.truth else None
        rep = harness.recon(res, outputs, truth)
        path = os.path.join(res.out_dir, res.csv)
        _report_csv(rep, path)
        print(f"{path} max_error={fmt_float(rep.max_error)}")
        return EXIT_OK
    raise PreconditionError(f"unknown command {cmd}")


def _analyze(args) -> int:
    nodes = _read_nodes(args.nodes)
    os.makedirs(args.out_dir, exist_ok=True)
    k = kadec_check(nodes, args.T)
    rows = [("kadec_L", k.L), ("kadec_pass", int(k.passed))]
    h = _floats(args.h)
    if h:
        dens = beurling_density(nodes, h)
        for hj, p, m in zip(dens.h, dens.n_plus, dens.n_minus):
            rows.append((f"n_plus_{fmt_float(hj)}", p))
            rows.append((f"n_minus_{fmt_float(hj)}", m))
        rows += [("D_plus", dens.D_plus), ("D_minus", dens.D_minus)]
    sections = [int(s) for s in _floats(args.sections) if int(s) <= nodes.size]
    curve = None
    if sections:
        curve = frame_bound_curve(ExponentialFrame(nodes, args.omega), sections)
        for s, A, B in curve:
            rows += [(f"gram_A_{int(s)}", A), (f"gram_B_{int(s)}", B)]
    A_s, B_s = sampling_bounds(nodes, args.omega)
    rows += [("sampling_A", A_s), ("sampling_B", B_s)]
    path = os.path.join(args.out_dir, args.csv)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("quantity,value\n")
        for name, v in rows:
            fh.write(f"{name},{v if isinstance(v, (int, np.integer)) else fmt_float(v)}\n")
    if args.svg and curve is not None:
        line_plot(os.path.join(args.out_dir, args.svg),
                  [("A", curve[:, 0], curve[:, 1]), ("B", curve[:, 0], curve[:, 2])],
                  title="Gram eigenvalue bounds vs section size", xlabel="section size", ylabel="eigenvalue")
    print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
