"""Two-mode Gaussian states at covariance-matrix level.

Conventions used throughout the package: quadratures x = (a + a^dag)/sqrt(2),
p = (a - a^dag)/(i sqrt(2)), ordering (x1, p1, x2, p2), vacuum covariance I/2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

VACUUM_VARIANCE = 0.5
TOL_PHYS = 1e-9
TOL_STD = 1e-8
_TOL_SYM = 1e-12

OMEGA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.kron(np.eye(2), OMEGA1)
PT = np.diag([1.0, 1.0, 1.0, -1.0])


class NotPhysicalError(ValueError):
    pass


def as_covariance(sigma, tol: float = _TOL_SYM) -> np.ndarray:
    """Validate a 4x4 symmetric matrix and return it as a float array."""
    s = np.asarray(sigma, dtype=float)
    if s.shape != (4, 4):
        raise ValueError(f"expected a 4x4 covariance matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("covariance matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(s))))
    if np.max(np.abs(s - s.T)) > tol * scale:
        raise ValueError("covariance matrix is not symmetric")
    return 0.5 * (s + s.T)


def vacuum() -> np.ndarray:
    return VACUUM_VARIANCE * np.eye(4)


def thermal(n1: float, n2: float | None = None) -> np.ndarray:
    """Product of thermal states with mean photon numbers n1, n2."""
    n2 = n1 if n2 is None else n2
    return np.diag([n1 + 0.5, n1 + 0.5, n2 + 0.5, n2 + 0.5])


def direct_sum(s1, s2) -> np.ndarray:
    out = np.zeros((4, 4))
    out[:2, :2] = s1
    out[2:, 2:] = s2
    return out


def symplectic_eigenvalues(sigma) -> np.ndarray:
    """Symplectic spectrum (nu1 <= nu2) from the moduli of the eigenvalues of i*Omega*sigma."""
    s = as_covariance(sigma)
    ev = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ s)))
    # eigenvalues come in +/- pairs
    return np.array([0.5 * (ev[0] + ev[1]), 0.5 * (ev[2] + ev[3])])


def is_physical(sigma, tol: float = TOL_PHYS) -> bool:
    s = as_covariance(sigma)
    if np.any(np.linalg.eigvalsh(s) <= 0):
        return False
    return bool(symplectic_eigenvalues(s)[0] >= VACUUM_VARIANCE - tol)


def purity(sigma) -> float:
    s = as_covariance(sigma)
    det = np.linalg.det(s)
    if det <= 0:
        raise NotPhysicalError(f"det(sigma) = {det:.3e} must be positive")
    return float(1.0 / (4.0 * np.sqrt(det)))


def energy(sigma) -> float:
    """Mean total photon number, Tr(sigma)/2 - 1."""
    s = as_covariance(sigma)
    return float(np.trace(s) / 2.0 - 1.0)


def partial_transpose(sigma) -> np.ndarray:
    s = as_covariance(sigma)
    return PT @ s @ PT


def entanglement(sigma) -> tuple[float, float]:
    """Return (d1, logneg): smallest partial-transpose symplectic eigenvalue and log-negativity.

    The state is entangled iff d1 < 1/2. The log-negativity uses the natural log.
    """
    d1 = float(symplectic_eigenvalues(partial_transpose(sigma))[0])
    return d1, max(0.0, -np.log(2.0 * d1))


@dataclass(frozen=True)
class StateScalars:
    purity: float
    energy: float
    d1: float
    logneg: float
    nu: tuple[float, float]


def state_scalars(sigma) -> StateScalars:
    nu = symplectic_eigenvalues(sigma)
    d1, logneg = entanglement(sigma)
    return StateScalars(purity(sigma), energy(sigma), d1, logneg, (float(nu[0]), float(nu[1])))


def is_symplectic(S, tol: float = 1e-9) -> bool:
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    om = np.kron(np.eye(n // 2), OMEGA1)
    return bool(np.max(np.abs(S @ om @ S.T - om)) <= tol * max(1.0, np.max(np.abs(S)) ** 2))


def _sqrtm_spd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(w)) @ v.T


def williamson(sigma) -> tuple[np.ndarray, np.ndarray]:
    """Williamson decomposition sigma = S diag(nu1, nu1, nu2, nu2) S^T with S symplectic.

    Returns ``(nu, S)`` with ``nu`` ascending. Uses the real Schur form of the
    antisymmetric matrix sigma^{-1/2} Omega sigma^{-1/2}.
    """
    s = as_covariance(sigma)
    w, v = np.linalg.eigh(s)
    if np.any(w <= 0):
        raise NotPhysicalError("covariance matrix is not positive definite")
    s_half = (v * np.sqrt(w)) @ v.T
    s_mhalf = (v / np.sqrt(w)) @ v.T
    m = s_mhalf @ OMEGA @ s_mhalf
    m = 0.5 * (m - m.T)
    t, o = schur(m, output="real")

    cols, nus = [], []
    for k in (0, 2):
        b = t[k, k + 1]
        ck, ck1 = o[:, k], o[:, k + 1]
        if b < 0:
            ck, ck1 = ck1, ck
            b = -b
        cols.append((ck, ck1))
        nus.append(1.0 / b)
    order = np.argsort(nus)
    nu = np.array([nus[i] for i in order])
    O = np.column_stack([c for i in order for c in cols[i]])
    D = np.repeat(nu, 2)
    S = s_half @ O @ np.diag(1.0 / np.sqrt(D))
    return nu, S


def local_symplectic_reduce(block) -> np.ndarray:
    """Symplectic 2x2 K with K @ block @ K.T = sqrt(det block) * I."""
    block = np.asarray(block, dtype=float)
    det = np.linalg.det(block)
    if det <= 0 or block[0, 0] <= 0:
        raise NotPhysicalError("local block is singular (zero-variance quadrature)")
    root = _sqrtm_spd(block / np.sqrt(det))
    return np.linalg.inv(root)


def to_standard_form(sigma) -> tuple[np.ndarray, np.ndarray]:
    """Bring sigma to standard form by local symplectic operations.

    Returns ``(sigma_std, L)`` where ``L`` is block-diagonal symplectic and
    ``sigma_std = L @ sigma @ L.T`` has blocks aI, bI and coupling diag(c, d)
    with c >= |d|, c >= 0.
    """
    s = as_covariance(sigma)
    K1 = local_symplectic_reduce(s[:2, :2])
    K2 = local_symplectic_reduce(s[2:, 2:])
    C = K1 @ s[:2, 2:] @ K2.T

    U, sv, Vt = np.linalg.svd(C)
    V = Vt.T
    flip = np.diag([1.0, -1.0])
    sign = 1.0
    if np.linalg.det(U) < 0:
        U = U @ flip
        sign = -sign
    if np.linalg.det(V) < 0:
        V = V @ flip
        sign = -sign
    L = direct_sum(U.T @ K1, V.T @ K2)

    out = L @ s @ L.T
    a = np.sqrt(np.linalg.det(s[:2, :2]))
    b = np.sqrt(np.linalg.det(s[2:, 2:]))
    std = standard_form_matrix(a, b, sv[0], sign * sv[1])
    if np.max(np.abs(out - std)) > TOL_STD * max(1.0, np.max(np.abs(std))):
        raise ArithmeticError("standard-form reduction lost accuracy")
    return std, L


def standard_form_matrix(a: float, b: float, c: float, d: float) -> np.ndarray:
    return np.array(
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, d],
            [c, 0.0, b, 0.0],
            [0.0, d, 0.0, b],
        ]
    )


def canonical_cd(c: float, d: float) -> tuple[float, float]:
    """Apply the sign convention c >= |d|, c >= 0 using local rotations/flips.

    Local operations can map (c, d) to (d, c) and (-c, -d); the sign of c*d is invariant.
    """
    big, small = (c, d) if abs(c) >= abs(d) else (d, c)
    if big < 0:
        big, small = -big, -small
    return big, small
