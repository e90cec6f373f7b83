"""Monte Carlo check of the noise channels: Ornstein-Uhlenbeck fields and averaged displacements.

Each field component is a stationary OU process with autocorrelation
(lam/2) exp(-|tau|) (times in units of the correlation time). A trajectory of
the complex field C = C_x + i C_y displaces a mode by zeta = -i * int C ds,
i.e. x -> x + sqrt(2) Re(zeta), p -> p + sqrt(2) Im(zeta). Local noise drives
the two modes with independent fields, common noise with one shared field.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import EnvironmentParams, Kind
from .gaussian_core import as_covariance

DEFAULT_DT = 1e-3
MAX_DT = 1e-2
MIN_TRAJ = 1000
BATCH = 1000


@dataclass(frozen=True)
class FieldTrajectory:
    times: np.ndarray
    field: np.ndarray  # complex samples C(t_k)
    dt: float
    seed: int


def _ou_step_constants(lam: float, dt: float) -> tuple[float, float]:
    decay = np.exp(-dt)
    kick = np.sqrt(0.5 * lam * -np.expm1(-2.0 * dt))
    return decay, kick


def ou_sample(env: EnvironmentParams, dt: float = DEFAULT_DT, seed: int = 0) -> FieldTrajectory:
    """One stationary complex OU trajectory on [t0, t], exact one-step updates."""
    if not 0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}], got {dt}")
    n = int(round((env.t - env.t0) / dt))
    rng = np.random.default_rng(seed)
    decay, kick = _ou_step_constants(env.lam, dt)
    noise = rng.standard_normal((n + 1, 2))
    out = np.empty((n + 1, 2))
    out[0] = np.sqrt(0.5 * env.lam) * noise[0]
    for k in range(n):
        out[k + 1] = decay * out[k] + kick * noise[k + 1]
    return FieldTrajectory(env.t0 + dt * np.arange(n + 1), out[:, 0] + 1j * out[:, 1], dt, seed)


def _integrated_fields(lam: float, n_steps: int, dt: float, n_fields: int, n_paths: int, rng) -> np.ndarray:
    """Trapezoidal integrals of 2*n_fields independent OU components, shape (2*n_fields, n_paths)."""
    decay, kick = _ou_step_constants(lam, dt)
    x = np.sqrt(0.5 * lam) * rng.standard_normal((2 * n_fields, n_paths))
    acc = np.zeros_like(x)
    for _ in range(n_steps):
        nxt = decay * x + kick * rng.standard_normal(x.shape)
        acc += 0.5 * dt * (x + nxt)
        x = nxt
    return acc


def displacements(kind: Kind, env: EnvironmentParams, n_paths: int, rng, dt: float = DEFAULT_DT) -> np.ndarray:
    """Quadrature displacements (dx1, dp1, dx2, dp2) per trajectory, shape (n_paths, 4)."""
    n_steps = int(round((env.t - env.t0) / dt))
    n_fields = 2 if kind == "local" else 1
    ints = _integrated_fields(env.lam, n_steps, dt, n_fields, n_paths, rng)
    # zeta = -i (Ix + i Iy) = Iy - i Ix
    zetas = [(ints[2 * f + 1], -ints[2 * f]) for f in range(n_fields)]
    z1 = zetas[0]
    z2 = zetas[1] if kind == "local" else zetas[0]
    return np.sqrt(2.0) * np.column_stack([z1[0], z1[1], z2[0], z2[1]])


class InsufficientSamplesWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class EmpiricalChannel:
    covariance: np.ndarray
    added_noise: np.ndarray
    stderr: np.ndarray
    n_traj: int

    def within(self, expected_output, n_se: float = 3.0) -> np.ndarray:
        """Boolean mask of entries agreeing with ``expected_output`` to ``n_se`` standard errors."""
        return np.abs(self.covariance - expected_output) <= n_se * self.stderr


def empirical_channel(
    sigma0,
    kind: Kind,
    env: EnvironmentParams,
    n_traj: int = 10_000,
    seed: int = 0,
    dt: float = DEFAULT_DT,
    tol: float | None = None,
    workers: int = 1,
) -> EmpiricalChannel:
    """Empirical output covariance from ``n_traj`` simulated field realisations.

    Trajectories are grouped in batches of ``BATCH``; batch ``k`` draws from
    ``SeedSequence([seed, k])``, so the result does not depend on ``workers``.
    """
    s0 = as_covariance(sigma0)
    if kind not in ("local", "common"):
        raise ValueError(f"kind must be 'local' or 'common', got {kind!r}")
    if not env.resonant:
        raise ValueError("the stochastic oracle covers the resonant case only")
    if n_traj < MIN_TRAJ:
        raise ValueError(f"need at least {MIN_TRAJ} trajectories, got {n_traj}")
    if not 0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}], got {dt}")

    sizes = [BATCH] * (n_traj // BATCH) + ([n_traj % BATCH] if n_traj % BATCH else [])

    def run(k: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence([seed, k]))
        return displacements(kind, env, sizes[k], rng, dt)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(k) for k in range(len(sizes))]
    d = np.concatenate(parts, axis=0)

    # zero-mean by construction: raw second moments
    prods = d[:, :, None] * d[:, None, :]
    noise = np.sum(prods, axis=0) / n_traj
    stderr = np.std(prods, axis=0, ddof=1) / np.sqrt(n_traj) if n_traj > 1 else np.full((4, 4), np.inf)
    if tol is not None and np.max(stderr) > tol:
        warnings.warn(
            f"standard error {np.max(stderr):.2e} exceeds tolerance {tol:.2e}; increase n_traj",
            InsufficientSamplesWarning,
            stacklevel=2,
        )
    return EmpiricalChannel(s0 + noise, noise, stderr, n_traj)
