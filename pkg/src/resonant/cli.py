"""Command-line harness: data generation, fitting, prediction, scoring,
hyper-parameter search, transfer heatmaps, and SVG plots.

Every subcommand takes an optional TOML config file (``--config run.toml``
with one ``[subcommand]`` table per command; keys match the flag names with
underscores). Explicit flags override the config. Each output artifact
embeds or sidecars the resolved run configuration, and reruns with the
same configuration and seed produce byte-identical files.

Exit codes: 0 success, 2 input validation error, 1 runtime error,
3 hyper-parameter search where every evaluation diverged.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import artifacts, svgplot
from .activations import OUTPUT_ACTIVATIONS
from .bayesopt import (
    BoundsSpec,
    ForecastObjective,
    decode,
    optimize_hyperparams,
)
from .errors import (
    AllDiverged,
    DimensionMismatch,
    EmptyMix,
    OutOfBounds,
    ResonantError,
    ZeroNormTarget,
)
from .experiments import run_heatmap
from .pendulum import DT_COARSE, ForceSpec, add_noise, force_eval, integrate
from .reservoir import ReservoirModel
from .svgplot import Series
from .utils import worker_count

_VALIDATION_ERRORS = (
    ValueError,
    KeyError,
    FileNotFoundError,
    IsADirectoryError,
    json.JSONDecodeError,
    DimensionMismatch,
    OutOfBounds,
    EmptyMix,
    ZeroNormTarget,
)


def _fail(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _load_config(args) -> dict:
    path = getattr(args, "config", None)
    if not path:
        return {}
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return doc.get(args.command, {})


class _Resolver:
    """Effective option values: explicit flag, then config file, then default."""

    def __init__(self, args):
        self.args = args
        self.cfg = _load_config(args)
        self.resolved = {}

    def get(self, key, default=None):
        value = getattr(self.args, key, None)
        if value is None:
            value = self.cfg.get(key, default)
        self.resolved[key] = value
        return value

    def mix(self, default=None):
        """Activation mix from --activation-mix or the config's
        activation_function / activation_mix table."""
        raw = getattr(self.args, "activation_mix", None)
        if raw is None:
            raw = self.cfg.get("activation_mix", self.cfg.get("activation_function"))
        if raw is None:
            value = default if default is not None else {"tanh": 1.0}
        elif isinstance(raw, str):
            value = _parse_mix(raw)
        else:
            value = {str(k): float(v) for k, v in dict(raw).items()}
        self.resolved["activation_mix"] = value
        return value


def _parse_mix(text: str) -> dict:
    mix = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, weight = part.partition("=")
        if not weight:
            raise ValueError(f"activation mix entry {part!r} is not name=weight")
        mix[name.strip()] = float(weight)
    if not mix:
        raise ValueError("activation mix is empty")
    return mix


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _read_channels(path):
    """CSV -> (t or None, K x P array, channel names); 't' column is time."""
    columns = artifacts.read_series_csv(path)
    names = [name for name in columns if name != "t"]
    if not names:
        raise ValueError(f"{path}: no data columns")
    data = np.column_stack([columns[name] for name in names])
    return columns.get("t"), data, names


# -- generate-data ------------------------------------------------------------

def cmd_generate(args) -> int:
    res = _Resolver(args)
    spec = ForceSpec(
        family=res.get("force", "sin"),
        amplitude=res.get("amp", 0.5),
        frequency=res.get("freq", 0.2),
    )
    dt = res.get("dt", DT_COARSE)
    steps = res.get("steps", 12000)
    x0 = res.get("x0", 0.1)
    p0 = res.get("p0", 0.1)
    t0 = res.get("t0", 0.0)
    noise = res.get("noise", 0.0)
    seed = res.get("seed", 210)
    split = res.get("split", 0.2)

    traj = integrate(x0, p0, dt, steps, spec, t0=t0)
    if noise > 0:
        traj = add_noise(traj, noise, seed)
    out = res.get("out")
    if not out:
        raise ValueError("--out is required")
    artifacts.write_series_csv(out, {"t": traj.t, "x": traj.x, "p": traj.p})
    meta = {
        "command": "generate-data",
        "dt": dt,
        "force": spec.to_dict(),
        "x0": x0,
        "p0": p0,
        "t0": t0,
        "noise": {"amplitude": noise, "seed": seed},
        "n_samples": len(traj),
        "config": res.resolved,
    }
    artifacts.write_json(artifacts.sidecar_path(out), meta)

    force_out = res.get("force_out")
    if force_out:
        artifacts.write_series_csv(
            force_out, {"t": traj.t, "f": force_eval(spec, traj.t)}
        )
        artifacts.write_json(artifacts.sidecar_path(force_out), meta)
    train_out, test_out = res.get("train_out"), res.get("test_out")
    if train_out or test_out:
        k = int(round(split * len(traj)))
        if train_out:
            artifacts.write_series_csv(
                train_out, {"t": traj.t[:k], "x": traj.x[:k], "p": traj.p[:k]}
            )
            artifacts.write_json(artifacts.sidecar_path(train_out), meta)
        if test_out:
            artifacts.write_series_csv(
                test_out, {"t": traj.t[k:], "x": traj.x[k:], "p": traj.p[k:]}
            )
            artifacts.write_json(artifacts.sidecar_path(test_out), meta)
    return 0


# -- fit / predict / test ------------------------------------------------------

def cmd_fit(args) -> int:
    res = _Resolver(args)
    hps_path = res.get("hps")
    target_path = res.get("target")
    if not hps_path or not target_path:
        raise ValueError("--hps and --target are required")
    hps = artifacts.load_hyperparams(hps_path)
    _, y, channel_names = _read_channels(target_path)
    X = None
    input_path = res.get("input")
    if input_path:
        _, X, _ = _read_channels(input_path)

    model = ReservoirModel(
        hps,
        seed=res.get("seed", 210),
        feedback=bool(res.get("feedback", False)),
        activation_mix=res.mix(),
        output_activation=res.get("output_activation", "identity"),
        washout=res.get("washout"),
        input_scaling=res.get("input_scaling", 1.0),
        theta_star=res.get("theta_star", 1.0),
    )
    model.fit(y, X=X)
    model.channel_names = channel_names
    out = res.get("out")
    if not out:
        raise ValueError("--out is required")
    doc = model.to_dict()
    doc["run_config"] = res.resolved
    artifacts.write_json(out, doc)
    print(f"fit ok: train NMSE {model.train_score!r} -> {out}")
    return 0


def cmd_predict(args) -> int:
    res = _Resolver(args)
    model_path = res.get("model")
    if not model_path:
        raise ValueError("--model is required")
    model = ReservoirModel.load(model_path)
    X = None
    t = None
    input_path = res.get("input")
    if input_path:
        t, X, _ = _read_channels(input_path)
    steps = res.get("steps")
    prediction = model.predict(X=X, n_steps=steps)

    names = model.channel_names or [f"y{i}" for i in range(prediction.shape[1])]
    columns = {}
    if t is not None:
        columns["t"] = t
    else:
        columns["step"] = np.arange(prediction.shape[0])
    for j, name in enumerate(names):
        columns[name] = prediction[:, j]
    out = res.get("out")
    if not out:
        raise ValueError("--out is required")
    artifacts.write_series_csv(out, columns)
    artifacts.write_json(
        artifacts.sidecar_path(out),
        {"command": "predict", "model": model_path, "config": res.resolved},
    )
    return 0


def cmd_test(args) -> int:
    res = _Resolver(args)
    model_path = res.get("model")
    target_path = res.get("target")
    if not model_path or not target_path:
        raise ValueError("--model and --target are required")
    model = ReservoirModel.load(model_path)
    t, y, names = _read_channels(target_path)
    X = None
    input_path = res.get("input")
    if input_path:
        _, X, _ = _read_channels(input_path)
    criterion = res.get("criterion", "nmse")
    score, prediction = model.test(y, X=X, criterion=criterion)
    out = res.get("out")
    if not out:
        raise ValueError("--out is required")
    artifacts.write_json(
        out,
        {
            "command": "test",
            "criterion": criterion,
            "score": score,
            "n_steps": int(y.shape[0]),
            "model": model_path,
            "config": res.resolved,
        },
    )
    pred_out = res.get("pred_out")
    if pred_out:
        columns = {"t": t} if t is not None else {"step": np.arange(y.shape[0])}
        for j, name in enumerate(names):
            columns[f"{name}_true"] = y[:, j]
            columns[f"{name}_pred"] = prediction[:, j]
        artifacts.write_series_csv(pred_out, columns)
        artifacts.write_json(
            artifacts.sidecar_path(pred_out),
            {"command": "test", "model": model_path, "config": res.resolved},
        )
    print(f"{criterion} = {score!r}")
    return 0


# -- optimize -------------------------------------------------------------------

def cmd_optimize(args) -> int:
    res = _Resolver(args)
    bounds_path = res.get("bounds")
    target_path = res.get("target")
    if not bounds_path or not target_path:
        raise ValueError("--bounds and --target are required")
    with open(bounds_path, "rb") as fh:
        bounds = BoundsSpec.from_dict(tomllib.load(fh))
    _, y, _ = _read_channels(target_path)
    X = None
    input_path = res.get("input")
    if input_path:
        _, X, _ = _read_channels(input_path)

    seed = res.get("seed", 210)
    objective = ForecastObjective(
        targets=y,
        inputs=X,
        feedback=bool(res.get("feedback", True)),
        activation_mix=res.mix(),
        output_activation=res.get("output_activation", "identity"),
        washout=res.get("washout"),
        validation_fraction=res.get("val_fraction", 0.3),
        seed=seed,
    )
    out = res.get("out")
    trial_path = res.get("trial_log")
    if not out or not trial_path:
        raise ValueError("--out and --trial-log are required")

    resume_trials = None
    resume_path = res.get("resume")
    if resume_path:
        resume_trials = artifacts.read_trial_log(resume_path)

    writer = artifacts.TrialLogWriter(trial_path)
    try:
        result = optimize_hyperparams(
            bounds,
            objective,
            n_trust_regions=res.get("n_trust_regions", 6),
            max_evals=res.get("max_evals", 1200),
            initial_samples=res.get("initial_samples", 10),
            batch_size=res.get("batch_size", 1),
            seed=seed,
            n_jobs=res.get("n_jobs") or worker_count(),
            log_hook=lambda rec: writer(rec, decode(rec.point, bounds)),
            resume_trials=resume_trials,
        )
    finally:
        writer.close()
    artifacts.write_json(
        out,
        {
            "command": "optimize",
            "hyperparams": result.best_hps.to_dict(),
            "score": result.best_score,
            "n_evals": len(result.trials),
            "config": res.resolved,
        },
    )
    print(f"best validation score {result.best_score!r} -> {out}")
    return 0


# -- heatmap ---------------------------------------------------------------------

def cmd_heatmap(args) -> int:
    res = _Resolver(args)
    hps_path = res.get("hps")
    if not hps_path:
        raise ValueError("--hps is required")
    hps = artifacts.load_hyperparams(hps_path)
    amps = res.get("amps")
    freqs = res.get("freqs")
    amps = _parse_floats(amps) if isinstance(amps, str) else amps
    freqs = _parse_floats(freqs) if isinstance(freqs, str) else freqs
    kwargs = {}
    if amps:
        kwargs["amplitudes"] = amps
    if freqs:
        kwargs["frequencies"] = freqs
    result = run_heatmap(
        family=res.get("family", "sin"),
        mode=res.get("mode", "pure"),
        hps=hps,
        seed=res.get("seed", 210),
        x0=res.get("x0", 0.5),
        p0=res.get("p0", 0.5),
        n_steps=res.get("steps", 12000),
        dt=res.get("dt", DT_COARSE),
        split=res.get("split", 0.2),
        n_jobs=res.get("n_jobs"),
        **kwargs,
    )
    out = res.get("out")
    if not out:
        raise ValueError("--out is required")
    columns = {"amplitude": result.amplitudes}
    for j, f in enumerate(result.frequencies):
        col = []
        for i in range(len(result.amplitudes)):
            col.append("masked" if result.masked[i, j] else repr(float(result.nmse[i, j])))
        columns[f"f_{f:g}"] = np.array(col, dtype=object)
    _write_mixed_csv(out, columns)
    artifacts.write_json(
        artifacts.sidecar_path(out),
        {
            "command": "heatmap",
            "median_nmse": result.median_score(),
            "masked_cells": int(result.masked.sum()),
            "config": res.resolved | {"experiment": result.config},
        },
    )
    svg_out = res.get("svg")
    if svg_out:
        svg = svgplot.render_heatmap(
            result.amplitudes, result.frequencies, result.nmse, result.masked,
            f"{result.family} force, {result.mode} mode",
        )
        svgplot.save_svg(svg_out, svg)
    print(f"median NMSE {result.median_score()!r} ({int(result.masked.sum())} masked cells)")
    return 0


def _write_mixed_csv(path, columns: dict) -> None:
    import csv as _csv

    names = list(columns)
    length = len(columns[names[0]])
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(names)
        for k in range(length):
            row = []
            for name in names:
                v = columns[name][k]
                row.append(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v))
            writer.writerow(row)
    return None


# -- plot ------------------------------------------------------------------------

def cmd_plot(args) -> int:
    res = _Resolver(args)
    infile = res.get("infile")
    out = res.get("out")
    kind = res.get("kind", "trajectory")
    if not infile or not out:
        raise ValueError("--in and --out are required")
    columns = artifacts.read_series_csv(infile)
    time_axis = columns.get("t", columns.get("step"))
    if time_axis is None:
        first = next(iter(columns))
        time_axis = np.arange(len(columns[first]))
    pred_names = [n for n in columns if n.endswith("_pred")]
    true_names = [n for n in columns if n.endswith("_true")]
    plain = [n for n in columns if n not in ("t", "step")
             and not n.endswith("_pred") and not n.endswith("_true")]

    if kind == "trajectory":
        series = []
        for i, name in enumerate(true_names):
            series.append(Series(time_axis, columns[name], label=name,
                                 color=svgplot.PALETTE[i % len(svgplot.PALETTE)]))
        offset = len(series)
        for i, name in enumerate(pred_names or plain):
            series.append(Series(time_axis, columns[name], label=name,
                                 color=svgplot.PALETTE[(offset + i) % len(svgplot.PALETTE)],
                                 dashed=bool(true_names)))
        svg = svgplot.render_line_plot(series, "trajectory", "t", "value")
    elif kind == "residual":
        if not (pred_names and true_names):
            raise ValueError(
                "residual plot needs *_true and *_pred column pairs "
                "(write them with `test --pred-out`)"
            )
        series = []
        for i, pname in enumerate(pred_names):
            tname = pname[: -len("_pred")] + "_true"
            if tname not in columns:
                continue
            series.append(Series(
                time_axis, columns[pname] - columns[tname],
                label=pname[: -len("_pred")],
                color=svgplot.PALETTE[i % len(svgplot.PALETTE)],
            ))
        svg = svgplot.render_line_plot(series, "log residuals", "t",
                                       "log10 |error|", log_y=True)
    elif kind == "phase":
        series = []
        if len(true_names) >= 2:
            series.append(Series(columns[true_names[0]], columns[true_names[1]],
                                 label="truth", color=svgplot.PALETTE[0]))
        if len(pred_names) >= 2:
            series.append(Series(columns[pred_names[0]], columns[pred_names[1]],
                                 label="prediction", color=svgplot.PALETTE[1],
                                 dashed=True))
        if not series:
            if len(plain) < 2:
                raise ValueError("phase plot needs two channels (x and p)")
            series.append(Series(columns[plain[0]], columns[plain[1]],
                                 label=f"{plain[0]} vs {plain[1]}",
                                 color=svgplot.PALETTE[0]))
        svg = svgplot.render_line_plot(series, "phase space", "x (position)",
                                       "p (momentum)")
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    svgplot.save_svg(out, svg)
    artifacts.write_json(
        artifacts.sidecar_path(out),
        {"command": "plot", "config": res.resolved},
    )
    return 0


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resonant",
        description="Echo-state forecasting of the forced pendulum with "
                    "trust-region Bayesian hyper-parameter search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file; [command] table")
        p.add_argument("--seed", type=int)

    p = sub.add_parser("generate-data", help="integrate a forced-pendulum trajectory")
    common(p)
    p.add_argument("--force", choices=("sin", "sincos"))
    p.add_argument("--amp", type=float)
    p.add_argument("--freq", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--x0", type=float)
    p.add_argument("--p0", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--noise", type=float)
    p.add_argument("--split", type=float)
    p.add_argument("--out")
    p.add_argument("--force-out", dest="force_out")
    p.add_argument("--train-out", dest="train_out")
    p.add_argument("--test-out", dest="test_out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fit", help="train a reservoir readout")
    common(p)
    p.add_argument("--hps")
    p.add_argument("--target")
    p.add_argument("--input")
    p.add_argument("--feedback", action=argparse.BooleanOptionalAction)
    p.add_argument("--activation-mix", dest="activation_mix")
    p.add_argument("--output-activation", dest="output_activation",
                   choices=OUTPUT_ACTIVATIONS)
    p.add_argument("--washout", type=int)
    p.add_argument("--theta-star", dest="theta_star", type=float)
    p.add_argument("--input-scaling", dest="input_scaling", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="roll a fitted model forward")
    common(p)
    p.add_argument("--model")
    p.add_argument("--input")
    p.add_argument("--steps", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("test", help="predict and score against a target series")
    common(p)
    p.add_argument("--model")
    p.add_argument("--target")
    p.add_argument("--input")
    p.add_argument("--criterion")
    p.add_argument("--out")
    p.add_argument("--pred-out", dest="pred_out")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("optimize", help="trust-region Bayesian HP search")
    common(p)
    p.add_argument("--bounds")
    p.add_argument("--target")
    p.add_argument("--input")
    p.add_argument("--n-trust-regions", dest="n_trust_regions", type=int)
    p.add_argument("--max-evals", dest="max_evals", type=int)
    p.add_argument("--initial-samples", dest="initial_samples", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--val-fraction", dest="val_fraction", type=float)
    p.add_argument("--feedback", action=argparse.BooleanOptionalAction)
    p.add_argument("--activation-mix", dest="activation_mix")
    p.add_argument("--output-activation", dest="output_activation",
                   choices=OUTPUT_ACTIVATIONS)
    p.add_argument("--washout", type=int)
    p.add_argument("--n-jobs", dest="n_jobs", type=int)
    p.add_argument("--out")
    p.add_argument("--trial-log", dest="trial_log")
    p.add_argument("--resume")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("heatmap", help="transfer-learning score grid")
    common(p)
    p.add_argument("--hps")
    p.add_argument("--family", choices=("sin", "sincos"))
    p.add_argument("--mode", choices=("pure", "parameter_aware"))
    p.add_argument("--amps")
    p.add_argument("--freqs")
    p.add_argument("--steps", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--x0", type=float)
    p.add_argument("--p0", type=float)
    p.add_argument("--split", type=float)
    p.add_argument("--n-jobs", dest="n_jobs", type=int)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("plot", help="render trajectory/residual/phase SVGs")
    common(p)
    p.add_argument("--kind", choices=("trajectory", "residual", "phase"))
    p.add_argument("--in", dest="infile")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AllDiverged as exc:
        _fail(str(exc))
        return 3
    except _VALIDATION_ERRORS as exc:
        _fail(str(exc))
        return 2
    except (ResonantError, np.linalg.LinAlgError) as exc:
        _fail(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
