"""Regenerate the CSV data for every experiment, then print a short summary.

    python3 scripts/run_experiments.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

from noisediscrim import cli
from noisediscrim.experiments import ExperimentConfig, bounds_compare, qcb_beating_window, scatter_random, ssv_envelope_violation

RUNS = {
    "sweep_sts": ["sweep-time", "--probe", "sts", "--eps", "1", "--gamma", "0.7"],
    "sweep_sv": ["sweep-time", "--probe", "sv", "--nbar", "1", "--r", "0.7"],
    "sweep_ssv": ["sweep-time", "--probe", "ssv", "--nbar", "1", "--r", "0.7"],
    "scatter_mu06": ["scatter-random", "--mu", "0.6", "--t", "1", "--n", "200", "--family-points", "60", "--workers", "4"],
    "bounds_sts": ["bounds-compare", "--probe", "sts", "--eps", "1.956", "--gamma", "0.6593", "--tmin", "0.01", "--tmax", "3", "--tsteps", "300"],
    "bounds_ssv": ["bounds-compare", "--probe", "ssv", "--nbar", "0.3333", "--r", "1.470", "--tmin", "0.01", "--tmax", "3", "--tsteps", "300"],
    "oracles": ["oracle-verify", "--workers", "4"],
}


def main(out_dir="runs"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, argv in RUNS.items():
        code = cli.main([*argv, "--out", str(out / f"{name}.csv")])
        print(f"{name}: exit {code}")
        if code:
            return code

    worst, n = ssv_envelope_violation(scatter_random(ExperimentConfig(command="scatter-random", n_states=200, workers=4)))
    print(f"scatter: worst random-below-SSV {worst:.2e} over {n} states")
    for probe, kw in (("sts", dict(eps=1.956, gamma=0.6593)), ("ssv", dict(nbar=0.3333, r=1.470))):
        rows = bounds_compare(ExperimentConfig(command="bounds-compare", probe=probe, tmin=0.01, tmax=3.0, tsteps=300, **kw))
        gap = np.array([r[1] - r[4] for r in rows])
        print(f"bounds {probe}: p_star < Q/2 on {qcb_beating_window(rows)}, min p_star - Q/2 {gap.min():.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))
