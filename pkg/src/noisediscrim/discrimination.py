"""Joint-homodyne strip discrimination of local vs common noise, and Gaussian bounds
(Uhlmann fidelity, Fuchs-van de Graaf bounds, quantum Chernoff quantity)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erf

from .gaussian_core import OMEGA, as_covariance, williamson

QUADRATURE_INDEX = {"x1": 0, "p1": 1, "x2": 2, "p2": 3}
PURE_TOL = 1e-9
FIDELITY_SNAP = 1e-12
S_EDGE = 1e-9
PAIRS = (("x1", "x2"), ("p1", "p2"), ("x1", "p2"), ("p1", "x2"))


def pair_name(pair) -> str:
    return f"{pair[0]}{pair[1]}"


def parse_pair(pair) -> tuple[str, str]:
    if isinstance(pair, str):
        if len(pair) != 4:
            raise ValueError(f"unknown quadrature pair {pair!r}")
        pair = (pair[:2], pair[2:])
    q1, q2 = pair
    if q1 not in ("x1", "p1") or q2 not in ("x2", "p2"):
        raise ValueError(f"unknown quadrature pair {pair!r}")
    return q1, q2


@dataclass(frozen=True)
class StripPOVM:
    """Infer common noise when |q1 - q2|/sqrt(2) <= half_width."""

    pair: tuple[str, str]
    half_width: float

    def __post_init__(self):
        object.__setattr__(self, "pair", parse_pair(self.pair))
        if not (self.half_width >= 0 and np.isfinite(self.half_width)) and self.half_width != np.inf:
            raise ValueError(f"half-width must be >= 0, got {self.half_width}")


def quadrature_marginal(sigma, pair) -> np.ndarray:
    """2x2 covariance of the jointly measured quadrature pair."""
    s = as_covariance(sigma)
    q1, q2 = parse_pair(pair)
    idx = [QUADRATURE_INDEX[q1], QUADRATURE_INDEX[q2]]
    return s[np.ix_(idx, idx)]


def difference_variance(sigma, pair) -> float:
    """Variance of u = (q1 - q2)/sqrt(2)."""
    m = quadrature_marginal(sigma, pair)
    return float(0.5 * (m[0, 0] + m[1, 1] - 2 * m[0, 1]))


def _prob_inside(T: float, v: float) -> float:
    """P(|u| <= T) for u ~ N(0, v); v = 0 is a point mass at the origin."""
    if v <= 0:
        return 1.0
    if np.isinf(T):
        return 1.0
    return float(erf(T / np.sqrt(2.0 * v)))


def error_from_variances(T: float, v_local: float, v_common: float) -> float:
    return 0.5 * (1.0 - (_prob_inside(T, v_common) - _prob_inside(T, v_local)))


def strip_error_probability(sigma_local, sigma_common, povm: StripPOVM) -> float:
    """Error probability of the strip rule at equal priors."""
    v_l = difference_variance(sigma_local, povm.pair)
    v_c = difference_variance(sigma_common, povm.pair)
    if povm.half_width == 0:
        return 0.5
    return error_from_variances(povm.half_width, v_l, v_c)


def optimal_half_width(v_local: float, v_common: float) -> float:
    """Crossing point of the two centred normal densities of u; nan when v_local <= v_common."""
    if not v_local > v_common:
        return float("nan")
    if v_common <= 0:
        return 0.0
    return float(np.sqrt(v_local * v_common * np.log(v_local / v_common) / (v_local - v_common)))


def optimize_strip(sigma_local, sigma_common, pair, refine: bool = True) -> tuple[float, float]:
    """Return (T_star, p_star). T_star is nan when the pair carries no information."""
    v_l = difference_variance(sigma_local, pair)
    v_c = difference_variance(sigma_common, pair)
    scale = max(abs(v_l), abs(v_c), 1e-300)
    if v_l - v_c <= 1e-14 * scale:
        return float("nan"), 0.5
    T = optimal_half_width(v_l, v_c)
    if refine and T > 0:
        res = minimize_scalar(
            lambda x: error_from_variances(x, v_l, v_c),
            bracket=(0.5 * T, T, 2.0 * T),
            method="golden",
            tol=1e-10,
        )
        if res.fun < error_from_variances(T, v_l, v_c):
            T = float(res.x)
    return T, error_from_variances(T, v_l, v_c)


# -- fidelity and Chernoff bounds --------------------------------------------------------


class BoundsError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BoundSet:
    fidelity: float
    f_lower: float
    f_upper: float
    qcb: float
    s_star: float

    @property
    def q_half(self) -> float:
        return 0.5 * self.qcb


def gaussian_fidelity(sigma_a, sigma_b) -> float:
    """Uhlmann fidelity (squared convention, F(rho, rho) = 1) of two zero-mean Gaussian states.

    Uses the auxiliary-matrix expression of Banchi, Braunstein and Pirandola,
    evaluated through the spectrum of V_aux @ Omega.
    """
    A = as_covariance(sigma_a)
    B = as_covariance(sigma_b)
    V = A + B
    det_v = np.linalg.det(V)
    if det_v <= 0:
        raise BoundsError("sigma_a + sigma_b is not positive definite")
    v_aux = OMEGA.T @ np.linalg.solve(V, OMEGA / 4.0 + B @ OMEGA @ A)
    lam = np.linalg.eigvals(v_aux @ OMEGA)
    if np.min(np.abs(lam)) < 1e-300:
        raise BoundsError("singular auxiliary matrix")
    z = 1.0 + 1.0 / (4.0 * lam.astype(complex) ** 2)
    # z vanishes for pure inputs; its round-off would otherwise surface as sqrt(eps)
    z[np.abs(z) < FIDELITY_SNAP] = 0.0
    factor = np.prod(np.sqrt(z) + 1.0)
    f4 = np.linalg.det(2.0 * v_aux) * factor
    if abs(f4.imag) > 1e-6 * max(1.0, abs(f4.real)) or f4.real < -1e-12:
        raise BoundsError(f"fidelity intermediate is not a non-negative real number: {f4}")
    root_f = max(f4.real, 0.0) ** 0.25 / det_v**0.25
    return float(min(root_f**2, 1.0))


def fidelity_bounds(F: float) -> tuple[float, float]:
    """Lower and upper bounds on the Helstrom error probability from the fidelity."""
    F = min(max(F, 0.0), 1.0)
    return 0.5 * (1.0 - np.sqrt(1.0 - F)), 0.5 * np.sqrt(F)


def _g(p: float, x: np.ndarray) -> np.ndarray:
    return 2.0**p / ((x + 1.0) ** p - (x - 1.0) ** p)


def _lam(p: float, x: np.ndarray) -> np.ndarray:
    return ((x + 1.0) ** p + (x - 1.0) ** p) / ((x + 1.0) ** p - (x - 1.0) ** p)


def _snap_pure(x: np.ndarray, tol: float = PURE_TOL) -> np.ndarray:
    # modes within tol of the vacuum are treated as exactly pure, so that the
    # s -> 0, 1 limits see their rank deficiency
    x = np.asarray(x, dtype=float).copy()
    x[x < 1.0 + tol] = 1.0
    return x


class _ChernoffFunction:
    """Q_s = Tr[rho_a^s rho_b^(1-s)] for zero-mean Gaussian states (Pirandola-Lloyd form)."""

    def __init__(self, sigma_a, sigma_b):
        # shot-noise-unit covariances (vacuum = identity)
        nu_a, self.S_a = williamson(as_covariance(sigma_a))
        nu_b, self.S_b = williamson(as_covariance(sigma_b))
        self.alpha = _snap_pure(2.0 * nu_a)
        self.beta = _snap_pure(2.0 * nu_b)

    def __call__(self, s: float) -> float:
        if s <= 0.0 or s >= 1.0:
            return 1.0
        va = self.S_a @ np.diag(np.repeat(_lam(s, self.alpha), 2)) @ self.S_a.T
        vb = self.S_b @ np.diag(np.repeat(_lam(1.0 - s, self.beta), 2)) @ self.S_b.T
        num = 4.0 * np.prod(_g(s, self.alpha)) * np.prod(_g(1.0 - s, self.beta))
        det = np.linalg.det(va + vb)
        if det <= 0:
            raise BoundsError(f"Chernoff determinant is not positive at s={s}")
        return float(num / np.sqrt(det))


def chernoff_function(sigma_a, sigma_b):
    return _ChernoffFunction(sigma_a, sigma_b)


def qcb(sigma_a, sigma_b, xtol: float = 1e-8) -> tuple[float, float]:
    """Return (Q, s_star), Q = inf over s in [0, 1] of Tr[rho_a^s rho_b^(1-s)]."""
    qs = _ChernoffFunction(sigma_a, sigma_b)
    res = minimize_scalar(qs, bounds=(0.0, 1.0), method="bounded", options={"xatol": xtol})
    s_star, q = float(res.x), float(res.fun)
    # infimum may sit at an endpoint when a state is rank deficient
    for s_edge in (S_EDGE, 1.0 - S_EDGE):
        q_edge = qs(s_edge)
        if q_edge < q:
            s_star, q = s_edge, q_edge
    q_mid = qs(0.5)
    if q_mid <= q + 1e-12:
        # flat profile (e.g. two pure states): report the symmetric point
        s_star, q = 0.5, min(q, q_mid)
    return min(q, 1.0), s_star


def bounds(sigma_a, sigma_b) -> BoundSet:
    F = gaussian_fidelity(sigma_a, sigma_b)
    f_lo, f_hi = fidelity_bounds(F)
    q, s = qcb(sigma_a, sigma_b)
    return BoundSet(F, f_lo, f_hi, q, s)
