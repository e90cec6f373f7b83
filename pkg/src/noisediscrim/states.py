"""Probe-state families: squeezed thermal (STS), single-mode squeezed mixed with vacuum (SV),
SV in standard form (SSV), and random standard-form states at fixed purity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian_core import (
    canonical_cd,
    is_physical,
    standard_form_matrix,
    to_standard_form,
)

MAX_DRAWS = 100_000


class SamplingExhaustedError(RuntimeError):
    pass


@dataclass(frozen=True)
class STSParams:
    """Symmetric squeezed thermal state, parametrised by the mean photon number per mode
    ``eps`` and the fraction ``gamma`` of it stored in squeezing."""

    eps: float
    gamma: float

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")

    @property
    def n_squeeze(self) -> float:
        return self.gamma * self.eps

    @property
    def nbar(self) -> float:
        return (1.0 - self.gamma) * self.eps / (1.0 + 2.0 * self.gamma * self.eps)

    @property
    def r(self) -> float:
        return float(np.arcsinh(np.sqrt(self.n_squeeze)))


@dataclass(frozen=True)
class SVParams:
    nbar: float
    r: float

    def __post_init__(self):
        if not self.nbar >= 0:
            raise ValueError(f"nbar must be >= 0, got {self.nbar}")
        if not np.isfinite(self.r):
            raise ValueError("r must be finite")


def sts_abc(r: float, n1: float, n2: float) -> tuple[float, float, float]:
    """(a, b, c) of a two-mode squeezed thermal state, before the overall 1/2."""
    ch2, sh2 = np.cosh(r) ** 2, np.sinh(r) ** 2
    a = np.cosh(2 * r) + 2 * n1 * ch2 + 2 * n2 * sh2
    b = np.cosh(2 * r) + 2 * n1 * sh2 + 2 * n2 * ch2
    c = (1 + n1 + n2) * np.sinh(2 * r)
    return float(a), float(b), float(c)


def sts_covariance_general(r: float, n1: float, n2: float) -> np.ndarray:
    if n1 < 0 or n2 < 0:
        raise ValueError("thermal photon numbers must be >= 0")
    a, b, c = sts_abc(r, n1, n2)
    return 0.5 * np.array(
        [
            [a, 0, c, 0],
            [0, a, 0, -c],
            [c, 0, b, 0],
            [0, -c, 0, b],
        ],
        dtype=float,
    )


def sts_covariance(params: STSParams) -> np.ndarray:
    return sts_covariance_general(params.r, params.nbar, params.nbar)


def sv_covariance(params: SVParams) -> np.ndarray:
    """Squeezed thermal mode mixed with vacuum on a balanced beam splitter."""
    g = 1 + 2 * params.nbar
    e = np.exp(2 * params.r)
    m = e * g + 1
    n = g / e + 1
    s1 = e * g - 1
    s2 = g / e - 1
    return 0.25 * np.array(
        [
            [m, 0, s1, 0],
            [0, n, 0, s2],
            [s1, 0, m, 0],
            [0, s2, 0, n],
        ],
        dtype=float,
    )


def ssv_covariance(params: SVParams) -> np.ndarray:
    return to_standard_form(sv_covariance(params))[0]


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_standard_form(
    mu_target: float,
    a_range: tuple[float, float] = (0.5, 5.0),
    seed: int | np.random.Generator | None = None,
    max_draws: int = MAX_DRAWS,
) -> np.ndarray:
    """Draw a random standard-form covariance matrix with purity exactly ``mu_target``.

    det(sigma) = 1/(16 mu^2) is fixed; a, b are uniform on ``a_range``, c is
    uniform on the interval where the matching d is real, and
    d = -sqrt(ab - det/(ab - c^2)). Draws failing the physicality check are
    rejected. The (c, d) pair is finally put in the c >= |d| convention.
    """
    if not 0.0 < mu_target <= 1.0:
        raise ValueError(f"purity must lie in (0, 1], got {mu_target}")
    lo, hi = a_range
    if not 0 < lo <= hi:
        raise ValueError(f"invalid a_range {a_range}")
    rng = _as_rng(seed)
    det = 1.0 / (16.0 * mu_target**2)

    if mu_target == 1.0:
        # pure states have measure zero under rejection; they are the a = b, c = -d family
        if hi < 0.5:
            raise SamplingExhaustedError("no pure state with a in a_range")
        a = rng.uniform(max(lo, 0.5), hi)
        c = np.sqrt(max(a * a - 0.25, 0.0))
        return standard_form_matrix(a, a, c, -c)

    for _ in range(max_draws):
        a, b = rng.uniform(lo, hi, size=2)
        ab = a * b
        c2_max = ab - det / ab
        if c2_max < 0:
            continue
        c = rng.uniform(0.0, np.sqrt(c2_max))
        d2 = ab - det / (ab - c * c)
        if d2 < 0:
            continue
        c_std, d_std = canonical_cd(c, -np.sqrt(d2))
        sigma = standard_form_matrix(a, b, c_std, d_std)
        if is_physical(sigma):
            return sigma
    raise SamplingExhaustedError(
        f"no physical state with purity {mu_target} found in {max_draws} draws for a_range={a_range}"
    )


def random_standard_forms(n: int, mu_target: float, seed: int, a_range=(0.5, 5.0)) -> list[np.ndarray]:
    """``n`` independent draws; draw ``i`` uses its own stream seeded with ``seed + i``."""
    return [random_standard_form(mu_target, a_range, np.random.default_rng(seed + i)) for i in range(n)]
