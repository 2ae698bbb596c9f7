"""Command line entry point.

    extremegaps <experiment> [--config FILE] [--seed N] [--n N] [--trials N] [--workers N] [--out DIR]

The config file is TOML. Top-level keys ``seed``, ``workers`` and ``out``
set the run options; every other key (or the keys of an ``[params]``
table) is an experiment parameter. Flags override the file. ``--n``
accepts a comma-separated list for experiments that sweep sizes.

Writes ``report.json`` (deterministic: sorted keys, no timings),
``runtime.json`` (wall time and worker count) and one CSV per plot table
into the output directory. Exit status: 0 on success, 1 on invalid input,
2 on a numerical failure.
"""
import argparse
import csv
import json
import os
import sys
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from . import __version__
from .errors import NumericalError, ValidationError
from .experiments import KINDS, ExperimentConfig, Report, run

SIZE_LIST_KINDS = ("largest_gaps", "toda_scaling")


def load_config_file(path):
    """Read a TOML config into ``(options, params)``."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"malformed config {path}: {exc}") from None
    params = dict(data.pop("params", {}))
    options = {k: data.pop(k) for k in ("experiment", "seed", "workers", "out") if k in data}
    params.update(data)
    return options, params


def _parse_sizes(text):
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ValidationError(f"--n expects integers, got {text!r}") from None
    if not sizes:
        raise ValidationError("--n is empty")
    return sizes


def build_config(args):
    options, params = load_config_file(args.config) if args.config else ({}, {})
    if options.get("experiment", args.experiment) != args.experiment:
        raise ValidationError(f"config is for {options['experiment']!r}, not {args.experiment!r}")
    if args.n is not None:
        sizes = _parse_sizes(args.n)
        if args.experiment in SIZE_LIST_KINDS:
            params["n_list"] = sizes
        elif len(sizes) == 1:
            params["n"] = sizes[0]
        else:
            raise ValidationError(f"{args.experiment} takes a single n")
    if args.trials is not None:
        params["trials"] = args.trials
    seed = args.seed if args.seed is not None else options.get("seed", 0)
    workers = args.workers if args.workers is not None else options.get("workers", 1)
    out = args.out if args.out is not None else options.get("out")
    return ExperimentConfig(args.experiment, seed=seed, workers=workers, out=out, params=params)


def emit_plot_data(report, target, names=None):
    """Write ``<target>/<table>.csv`` with columns ``x, empirical, reference``.

    ``names`` restricts the output to the given tables. Returns the paths.
    """
    tables = report.tables if isinstance(report, Report) else report.get("tables", {})
    if not tables:
        raise ValidationError("report has no plot tables")
    names = sorted(tables) if names is None else list(names)
    missing = [n for n in names if n not in tables]
    if missing:
        raise ValidationError(f"report has no table(s) {missing}")
    os.makedirs(target, exist_ok=True)
    paths = []
    for name in names:
        t = tables[name]
        cols = [np.asarray(t[c], dtype=float) for c in ("x", "empirical", "reference")]
        path = os.path.join(target, f"{name}.csv")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "empirical", "reference"])
            for row in zip(*cols):
                w.writerow([repr(float(v)) for v in row])
        paths.append(path)
    return paths


def write_outputs(report, out, elapsed, workers):
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    with open(os.path.join(out, "runtime.json"), "w", encoding="utf-8") as fh:
        json.dump({"seconds": round(elapsed, 3), "workers": workers, "version": __version__}, fh, indent=2)
        fh.write("\n")
    if report.tables:
        emit_plot_data(report, out)


def make_parser():
    ap = argparse.ArgumentParser(prog="extremegaps", description="Extreme eigenvalue gap experiments.")
    ap.add_argument("experiment", choices=KINDS)
    ap.add_argument("--config", help="TOML file with run options and parameters")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--n", help="matrix size, or comma-separated sizes for sweeps")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", help="output directory (default: results/<experiment>)")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        start = time.perf_counter()
        report = run(cfg)
        out = cfg.out or os.path.join("results", cfg.experiment)
        write_outputs(report, out, time.perf_counter() - start, cfg.workers)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    for name, check in sorted(report.checks.items()):
        print(f"{'PASS' if check['pass'] else 'FAIL'}  {name}: {check['value']}")
    print(f"report written to {os.path.join(out, 'report.json')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
