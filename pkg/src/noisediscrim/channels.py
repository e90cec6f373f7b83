"""Classical-noise Gaussian channels acting on two-mode covariance matrices.

Times and couplings are in units of the environment correlation time.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy import integrate

from .gaussian_core import as_covariance

Kind = Literal["local", "common"]

QUAD_RTOL = 1e-8


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EnvironmentParams:
    lam: float
    t: float
    delta1: float = 0.0
    delta2: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"coupling must be >= 0, got {self.lam}")
        if not self.t >= self.t0:
            raise ValueError(f"need t >= t0, got t={self.t}, t0={self.t0}")

    @property
    def resonant(self) -> bool:
        return self.delta1 == 0.0 and self.delta2 == 0.0


@dataclass(frozen=True)
class NoiseIntegrals:
    beta1: float
    beta2: float
    beta_c: float
    gamma_c: float


def ou_kernel(lam: float) -> Callable[[float, float], float]:
    """Ornstein-Uhlenbeck autocorrelation (lam/2) exp(-|s1 - s2|)."""

    def kernel(s1, s2):
        return 0.5 * lam * np.exp(-np.abs(s1 - s2))

    return kernel


def beta_resonant(lam: float, t) -> np.ndarray | float:
    """lam * (t - 1 + exp(-t)); expm1 keeps small-t values accurate."""
    t = np.asarray(t, dtype=float)
    if lam < 0 or np.any(t < 0):
        raise ValueError("need lam >= 0 and t >= 0")
    out = lam * (np.expm1(-t) + t)
    return float(out) if out.ndim == 0 else out


def _double_integral(f, t0: float, t: float, rtol: float, scale: float) -> float:
    """Integral of f(s1, s2) over [t0, t]^2, inner domain split at the kernel cusp s2 = s1.

    ``scale`` bounds |integral| (the integral of the bare kernel) and sets an
    absolute floor, so integrals that vanish by symmetry still converge.
    """
    if t == t0:
        return 0.0
    atol = rtol * scale
    inner_err = []

    def inner(s1):
        total = 0.0
        for lo, hi in ((t0, s1), (s1, t)):
            if hi > lo:
                val, err = integrate.quad(
                    lambda s2: f(s1, s2), lo, hi, epsabs=1e-2 * atol / (t - t0), epsrel=rtol * 1e-2, limit=200
                )
                inner_err.append(err)
                total += val
        return total

    val, err = integrate.quad(inner, t0, t, epsabs=0.5 * atol, epsrel=rtol * 0.5, limit=200)
    achieved = err + (max(inner_err) * (t - t0) if inner_err else 0.0)
    if achieved > rtol * max(abs(val), scale):
        raise QuadratureError(f"double integral did not converge: |value|={abs(val):.3e}, error estimate={achieved:.3e}")
    return val


def noise_integrals(env: EnvironmentParams, kernel=None, rtol: float = QUAD_RTOL) -> NoiseIntegrals:
    """Noise-matrix entries as double integrals of the field autocorrelation."""
    K = ou_kernel(env.lam) if kernel is None else kernel
    d1, d2 = env.delta1, env.delta2
    scale = max(abs(_double_integral(K, env.t0, env.t, rtol, 1e-300)), 1e-300)
    b1 = _double_integral(lambda s1, s2: np.cos(d1 * (s1 - s2)) * K(s1, s2), env.t0, env.t, rtol, scale)
    b2 = b1 if d2 == d1 else _double_integral(lambda s1, s2: np.cos(d2 * (s1 - s2)) * K(s1, s2), env.t0, env.t, rtol, scale)
    bc = _double_integral(lambda s1, s2: np.cos(d1 * s1 - d2 * s2) * K(s1, s2), env.t0, env.t, rtol, scale)
    if d1 == d2:
        # sin(d (s1 - s2)) K is odd under s1 <-> s2
        gc = 0.0
    else:
        gc = _double_integral(lambda s1, s2: np.sin(d1 * s1 - d2 * s2) * K(s1, s2), env.t0, env.t, rtol, scale)
    return NoiseIntegrals(b1, b2, bc, gc)


def resonant_integrals(lam: float, t: float) -> NoiseIntegrals:
    b = beta_resonant(lam, t)
    return NoiseIntegrals(b, b, b, 0.0)


def noise_matrix(kind: Kind, integrals: NoiseIntegrals, tol: float = 1e-12) -> np.ndarray:
    """Noise covariance in (x1, p1, x2, p2) ordering.

    The common cross block is R = [[beta_c, -gamma_c], [gamma_c, beta_c]]: for a
    shared circular field, Cov(x1, p2) = -Cov(p1, x2), which keeps the matrix
    positive semidefinite at unequal detunings.
    """
    if kind not in ("local", "common"):
        raise ValueError(f"kind must be 'local' or 'common', got {kind!r}")
    ig = integrals
    out = np.diag([ig.beta1, ig.beta1, ig.beta2, ig.beta2]).astype(float)
    if kind == "common":
        R = np.array([[ig.beta_c, -ig.gamma_c], [ig.gamma_c, ig.beta_c]])
        out[:2, 2:] = R
        out[2:, :2] = R.T
    w = np.linalg.eigvalsh(out)
    if w[0] < -tol * max(1.0, w[-1]):
        raise ValueError(f"noise matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    return out


def evolve(sigma0, noise) -> np.ndarray:
    """Output covariance sigma0 + 2 * noise."""
    return as_covariance(sigma0) + 2.0 * np.asarray(noise, dtype=float)


def channel_outputs(sigma0, env: EnvironmentParams) -> tuple[np.ndarray, np.ndarray]:
    """(local output, common output) for the probe ``sigma0``."""
    ig = resonant_integrals(env.lam, env.t - env.t0) if env.resonant else noise_integrals(env)
    return evolve(sigma0, noise_matrix("local", ig)), evolve(sigma0, noise_matrix("common", ig))
