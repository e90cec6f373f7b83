"""Command-line entry point: each command writes a deterministic CSV.

Exit codes: 0 success, 2 configuration error, 3 failed check.
"""
from __future__ import annotations

import argparse
import io
import os
import sys
from dataclasses import fields
from pathlib import Path

from .experiments import (
    PROBES,
    ConfigError,
    ExperimentConfig,
    bounds_compare,
    oracle_verify,
    parse_config_text,
    scatter_random,
    sweep_time,
)
from .fock_oracle import CutoffTooSmallError
from .states import SamplingExhaustedError

OUT_DIR_ENV = "NOISEDISC_OUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 2, 3

HEADERS = {
    "sweep-time": ("t", "pair", "T_star", "p_star"),
    "scatter-random": ("state_id", "d1", "energy", "p_star"),
    "bounds-compare": ("t", "p_star", "F_m", "F_M", "Q_half"),
    "oracle-verify": ("check", "value", "bound", "status"),
}


def format_csv(header, rows) -> str:
    def cell(v):
        return v if isinstance(v, str) else "%.12g" % v

    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(cell(v) for v in row) + "\n")
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="key=value file; flags given here override it")
    common.add_argument("--probe", choices=PROBES)
    common.add_argument("--eps", type=float, help="STS energy parameter")
    common.add_argument("--gamma", type=float, help="STS squeezed fraction of the energy")
    common.add_argument("--nbar", type=float, help="SV/SSV thermal occupation")
    common.add_argument("--r", type=float, help="SV/SSV squeezing")
    common.add_argument("--mu", type=float, help="target purity of random states")
    common.add_argument("--lambda", dest="lam", type=float, help="noise coupling")
    common.add_argument("--tmin", type=float)
    common.add_argument("--tmax", type=float)
    common.add_argument("--tsteps", type=int)
    common.add_argument("--t", type=float, help="evaluation time for scatter-random")
    common.add_argument("--oracle-t", dest="oracle_t", type=float, help="evaluation time for the Fock checks")
    common.add_argument("--n", dest="n_states", type=int, help="number of random states")
    common.add_argument("--family-points", dest="family_points", type=int)
    common.add_argument("--rmax", type=float)
    common.add_argument("--cutoff", type=int, help="Fock cutoff for oracle-verify")
    common.add_argument("--n-traj", dest="n_traj", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--out", help=f"output CSV (default: ${OUT_DIR_ENV}/<command>.csv, else stdout)")

    parser = argparse.ArgumentParser(prog="noisediscrim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep-time", parents=[common], help="strip error vs time for all four quadrature pairs")
    sub.add_parser("scatter-random", parents=[common], help="random states and family curves at fixed purity")
    sub.add_parser("bounds-compare", parents=[common], help="strip error vs fidelity and Chernoff bounds")
    sub.add_parser("oracle-verify", parents=[common], help="Fock-space and Monte Carlo cross-checks")
    return parser


def resolve_config(argv=None) -> ExperimentConfig:
    """Defaults, then the --config file, then explicit flags."""
    ns = vars(build_parser().parse_args(argv))
    values = {}
    path = ns.pop("config", None)
    if path is not None:
        try:
            values.update(parse_config_text(Path(path).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    values.update(ns)
    names = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in values.items() if k in names}).validate()


def output_path(cfg: ExperimentConfig) -> Path | None:
    if cfg.out:
        return Path(cfg.out)
    out_dir = os.environ.get(OUT_DIR_ENV)
    return Path(out_dir) / f"{cfg.command}.csv" if out_dir else None


def run(cfg: ExperimentConfig) -> tuple[str, int]:
    """Return (CSV text, exit code) for a validated config."""
    if cfg.command == "sweep-time":
        rows, code = sweep_time(cfg), EXIT_OK
    elif cfg.command == "scatter-random":
        rows, code = scatter_random(cfg), EXIT_OK
    elif cfg.command == "bounds-compare":
        rows, code = bounds_compare(cfg), EXIT_OK
    else:
        report = oracle_verify(cfg)
        rows, code = report.rows(), EXIT_OK if report.passed else EXIT_CHECK
    return format_csv(HEADERS[cfg.command], rows), code


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
        text, code = run(cfg)
    except (ConfigError, CutoffTooSmallError, SamplingExhaustedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    path = output_path(cfg)
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    if code == EXIT_CHECK:
        print("error: one or more checks failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
