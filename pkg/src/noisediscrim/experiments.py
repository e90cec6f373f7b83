"""Experiment drivers: time sweeps, random-state scans, bound comparisons and oracle checks.

Every driver returns plain rows (tuples) so the CLI and scripts can serialise them.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .channels import EnvironmentParams, beta_resonant, channel_outputs
from .discrimination import PAIRS, bounds, optimize_strip, pair_name
from .fock_oracle import gaussian_to_fock, helstrom, oracle_bounds
from .gaussian_core import energy, entanglement, purity
from .states import (
    STSParams,
    SVParams,
    random_standard_form,
    random_standard_forms,
    ssv_covariance,
    sts_covariance,
    sts_covariance_general,
    sv_covariance,
)
from .stochastic import empirical_channel

PROBES = ("sts", "sv", "ssv", "random")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str = "sweep-time"
    probe: str = "sts"
    eps: float = 1.0
    gamma: float = 0.7
    nbar: float = 1.0
    r: float = 0.7
    mu: float = 0.6
    lam: float = 1.0
    tmin: float = 0.1
    tmax: float = 5.0
    tsteps: int = 50
    t: float = 1.0
    oracle_t: float = 0.5
    n_states: int = 200
    family_points: int = 60
    rmax: float = 3.0
    cutoff: int = 20
    n_traj: int = 10_000
    seed: int = 0
    workers: int = 1
    out: str = ""

    _COMMANDS = ("sweep-time", "scatter-random", "bounds-compare", "oracle-verify")

    def validate(self) -> "ExperimentConfig":
        if self.command not in self._COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.probe not in PROBES:
            raise ConfigError(f"probe must be one of {PROBES}, got {self.probe!r}")
        if self.lam < 0:
            raise ConfigError("lambda must be >= 0")
        if not 0 <= self.tmin <= self.tmax:
            raise ConfigError("need 0 <= tmin <= tmax")
        if self.tsteps < 1:
            raise ConfigError("tsteps must be >= 1")
        if self.t < 0 or self.oracle_t < 0:
            raise ConfigError("t must be >= 0")
        if not 0 < self.mu <= 1:
            raise ConfigError("mu must lie in (0, 1]")
        if self.n_states < 0 or self.family_points < 0:
            raise ConfigError("counts must be >= 0")
        if self.cutoff < 2:
            raise ConfigError("cutoff must be >= 2")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            self.probe_covariance()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def probe_covariance(self) -> np.ndarray:
        if self.probe == "sts":
            return sts_covariance(STSParams(self.eps, self.gamma))
        if self.probe == "sv":
            return sv_covariance(SVParams(self.nbar, self.r))
        if self.probe == "ssv":
            return ssv_covariance(SVParams(self.nbar, self.r))
        return random_standard_form(self.mu, seed=self.seed)

    def times(self) -> np.ndarray:
        return np.linspace(self.tmin, self.tmax, self.tsteps)

    # -- key=value file form ---------------------------------------------------------------

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)!r}\n" for f in fields(self))

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        return cls(**parse_config_text(text)).validate()


def parse_config_text(text: str) -> dict:
    """Parse ``key=value`` lines (``#`` comments allowed) into typed config fields."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "lambda":
            key = "lam"
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        value = value.strip("'\"")
        try:
            out[key] = {"int": int, "float": float}.get(types[key], str)(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def _map(fn, items, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# -- sweep-time ------------------------------------------------------------------------------


def sweep_time(cfg: ExperimentConfig) -> list[tuple]:
    """Rows (t, pair, T_star, p_star) for all four quadrature pairs, sorted by (pair, t)."""
    sigma0 = cfg.probe_covariance()

    def at(t):
        L, C = channel_outputs(sigma0, EnvironmentParams(cfg.lam, float(t)))
        return [(float(t), pair_name(p), *optimize_strip(L, C, p)) for p in PAIRS]

    rows = [row for chunk in _map(at, cfg.times(), cfg.workers) for row in chunk]
    return sorted(rows, key=lambda r: (r[1], r[0]))


# -- scatter-random --------------------------------------------------------------------------


def _x_pstar(sigma0, env: EnvironmentParams) -> float:
    L, C = channel_outputs(sigma0, env)
    return optimize_strip(L, C, ("x1", "x2"))[1]


def family_states(mu: float, n_points: int, rmax: float) -> dict[str, list[np.ndarray]]:
    """STS, SV and SSV members with purity ``mu`` along a squeezing grid r in [0, rmax]."""
    rs = np.linspace(0.0, rmax, n_points)
    nbar_sts = 0.5 * (1.0 / np.sqrt(mu) - 1.0)
    nbar_sv = 0.5 * (1.0 / mu - 1.0)
    return {
        "sts": [sts_covariance_general(r, nbar_sts, nbar_sts) for r in rs],
        "sv": [sv_covariance(SVParams(nbar_sv, r)) for r in rs],
        "ssv": [ssv_covariance(SVParams(nbar_sv, r)) for r in rs],
    }


def scatter_random(cfg: ExperimentConfig) -> list[tuple]:
    """Rows (state_id, d1, energy, p_star) for random standard-form states at purity ``mu``,
    followed by the family curves at the same purity. ``n_states = 0`` yields no rows."""
    if cfg.n_states == 0:
        return []
    env = EnvironmentParams(cfg.lam, cfg.t)
    labelled = [(f"random:{i}", s) for i, s in enumerate(random_standard_forms(cfg.n_states, cfg.mu, cfg.seed))]
    for fam, states in family_states(cfg.mu, cfg.family_points, cfg.rmax).items():
        labelled += [(f"{fam}:{i}", s) for i, s in enumerate(states)]

    def row(item):
        label, s = item
        return (label, entanglement(s)[0], energy(s), _x_pstar(s, env))

    return _map(row, labelled, cfg.workers)


def ssv_envelope_violation(rows: list[tuple]) -> tuple[float, int]:
    """Largest amount by which a random state beats the SSV curve at equal d1.

    Only random states whose d1 lies inside the sampled SSV range are compared.
    Returns (max violation, number compared).
    """
    ssv = np.array([(r[1], r[3]) for r in rows if r[0].startswith("ssv:")])
    if ssv.size == 0:
        return float("nan"), 0
    order = np.argsort(ssv[:, 0])
    d_ref, p_ref = ssv[order, 0], ssv[order, 1]
    worst, count = -np.inf, 0
    for label, d1, _, p in rows:
        if not label.startswith("random:") or not d_ref[0] <= d1 <= d_ref[-1]:
            continue
        count += 1
        worst = max(worst, float(np.interp(d1, d_ref, p_ref) - p))
    return worst, count


# -- bounds-compare --------------------------------------------------------------------------


def bounds_compare(cfg: ExperimentConfig) -> list[tuple]:
    """Rows (t, p_star, F_m, F_M, Q_half) along the time grid (x1, x2 strip)."""
    sigma0 = cfg.probe_covariance()

    def at(t):
        L, C = channel_outputs(sigma0, EnvironmentParams(cfg.lam, float(t)))
        b = bounds(L, C)
        return (float(t), optimize_strip(L, C, ("x1", "x2"))[1], b.f_lower, b.f_upper, b.q_half)

    return _map(at, cfg.times(), cfg.workers)


def qcb_beating_window(rows: list[tuple]) -> tuple[float, float] | None:
    """First and last grid time where p_star < Q/2, or None."""
    ts = [r[0] for r in rows if r[1] < r[4]]
    return (min(ts), max(ts)) if ts else None


# -- oracle-verify ---------------------------------------------------------------------------

ORACLE_MAX_BETA = 0.5
ORACLE_MAX_ENERGY = 4.0
ORACLE_TOL = 1e-4
MC_TIMES = (0.5, 1.0, 2.0)


@dataclass
class Check:
    name: str
    value: float
    bound: float
    passed: bool


@dataclass
class OracleReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, value: float, bound: float, passed: bool):
        self.checks.append(Check(name, float(value), float(bound), bool(passed)))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def rows(self) -> list[tuple]:
        return [(c.name, c.value, c.bound, "pass" if c.passed else "FAIL") for c in self.checks]


def oracle_verify(cfg: ExperimentConfig) -> OracleReport:
    """Cross-check Gaussian formulas against the Fock oracle, and the channels against Monte Carlo.

    The Fock comparison runs at ``cfg.oracle_t``; the small-noise regime
    (beta <= 0.5, probe energy <= 4) is required.
    """
    sigma0 = cfg.probe_covariance()
    beta = beta_resonant(cfg.lam, cfg.oracle_t)
    if beta > ORACLE_MAX_BETA:
        raise ConfigError(f"oracle needs beta <= {ORACLE_MAX_BETA}, got {beta:.3f}")
    if energy(sigma0) > ORACLE_MAX_ENERGY:
        raise ConfigError(f"oracle needs probe energy <= {ORACLE_MAX_ENERGY}, got {energy(sigma0):.3f}")

    rep = OracleReport()
    L, C = channel_outputs(sigma0, EnvironmentParams(cfg.lam, cfg.oracle_t))
    b = bounds(L, C)
    p_star = optimize_strip(L, C, ("x1", "x2"))[1]
    rho_l, rho_c = gaussian_to_fock(L, cfg.cutoff), gaussian_to_fock(C, cfg.cutoff)
    ob = oracle_bounds(rho_l, rho_c)
    _, pe = helstrom(rho_l, rho_c)

    rep.add("fidelity_gauss_vs_fock", abs(b.fidelity - ob.fidelity), ORACLE_TOL, abs(b.fidelity - ob.fidelity) <= ORACLE_TOL)
    rep.add("qcb_gauss_vs_fock", abs(b.qcb - ob.qcb), ORACLE_TOL, abs(b.qcb - ob.qcb) <= ORACLE_TOL)
    rep.add("f_lower_le_helstrom", b.f_lower - pe, 0.0, b.f_lower <= pe + ORACLE_TOL)
    upper = min(b.q_half, p_star)
    rep.add("helstrom_le_min_qhalf_pstar", pe - upper, ORACLE_TOL, pe <= upper + ORACLE_TOL)
    rep.add("bound_sandwich", max(b.f_lower - b.q_half, b.q_half - b.f_upper), 1e-9,
            b.f_lower <= b.q_half + 1e-9 and b.q_half <= b.f_upper + 1e-9)
    rep.add("truncation_deficit", max(rho_l.eta, rho_c.eta), ORACLE_TOL, max(rho_l.eta, rho_c.eta) <= ORACLE_TOL)

    for k, t in enumerate(MC_TIMES):
        env_t = EnvironmentParams(cfg.lam, t)
        outs = dict(zip(("local", "common"), channel_outputs(sigma0, env_t)))
        for kind, expected in outs.items():
            emp = empirical_channel(sigma0, kind, env_t, cfg.n_traj, seed=cfg.seed + k, workers=cfg.workers)
            se = np.where(emp.stderr > 0, emp.stderr, np.inf)
            z = np.abs(emp.covariance - expected) / se
            z = np.where(np.isfinite(z), z, 0.0)
            rep.add(f"mc_{kind}_t{t:g}_max_z", float(np.max(z)), 3.0, bool(np.all(emp.within(expected))))
    return rep


def probe_summary(sigma0) -> dict:
    d1, logneg = entanglement(sigma0)
    return {"purity": purity(sigma0), "energy": energy(sigma0), "d1": d1, "logneg": logneg}
