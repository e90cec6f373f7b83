"""Brute-force truncated Fock-space oracle for two-mode Gaussian states.

The density matrix of a zero-mean Gaussian state is synthesised from its
Williamson decomposition: a product of thermal states is transformed by the
Gaussian unitary of the symplectic matrix, factorised as passive -> local
squeezing -> passive (Bloch-Messiah). Each factor is the exponential of a
quadratic Hamiltonian built from truncated mode operators in a padded working
space, and the result is cut down to the requested cutoff. The truncated state
is never renormalised; its trace deficit is reported as ``eta``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, logm
from scipy.optimize import minimize_scalar

from .gaussian_core import OMEGA, as_covariance, williamson

DEFAULT_CUTOFF = 15
ETA_MAX = 1e-4
EIG_CLIP = 1e-10
ROUNDOFF = 1e-13
S_EDGE = 1e-9
S_GRID = np.round(np.arange(1, 100) / 100.0, 2)


class CutoffTooSmallError(ValueError):
    def __init__(self, cutoff: int, eta: float, eta_max: float, required: int):
        super().__init__(
            f"cutoff {cutoff} loses trace {eta:.3e} > {eta_max:.1e}; "
            f"a cutoff of about {required} is required"
        )
        self.cutoff = cutoff
        self.eta = eta
        self.required = required


@dataclass(frozen=True)
class FockDensity:
    matrix: np.ndarray
    cutoff: int
    eta: float

    @property
    def dim(self) -> int:
        return self.cutoff**2


# -- mode operators ------------------------------------------------------------------------


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def _quadratures(dim: int) -> list[np.ndarray]:
    a = annihilation(dim)
    x = (a + a.T) / np.sqrt(2.0)
    p = (a - a.T) / (1j * np.sqrt(2.0))
    eye = np.eye(dim)
    return [np.kron(x, eye), np.kron(p, eye), np.kron(eye, x), np.kron(eye, p)]


def unitary_from_hamiltonian(G: np.ndarray) -> np.ndarray:
    w, v = eigh(G)
    return (v * np.exp(-1j * w)) @ v.conj().T


# -- symplectic factorisation ---------------------------------------------------------------


def _passive_to_unitary(O: np.ndarray) -> np.ndarray:
    """Mode-transformation matrix u (a -> u a) of an orthogonal symplectic O."""
    n = O.shape[0] // 2
    return np.array([[O[2 * j, 2 * k] + 1j * O[2 * j + 1, 2 * k] for k in range(n)] for j in range(n)])


def bloch_messiah(S: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """S = O1 @ diag(1/z1, z1, 1/z2, z2) @ O2 with O1, O2 orthogonal symplectic and z >= 1."""
    S = np.asarray(S, dtype=float)
    w, v = np.linalg.eigh(S.T @ S)
    P = (v * np.sqrt(w)) @ v.T
    W = S @ (v / np.sqrt(w)) @ v.T

    basis = np.eye(4)
    cols, zs = [], []
    for _ in range(2):
        sub = basis.T @ P @ basis
        ew, ev = np.linalg.eigh(0.5 * (sub + sub.T))
        wv = basis @ ev[:, -1]
        wv /= np.linalg.norm(wv)
        u = OMEGA @ wv
        cols += [u, wv]
        zs.append(max(float(ew[-1]), 1.0))
        # orthonormal complement of the vectors picked so far
        picked = np.column_stack(cols)
        pw, pv = np.linalg.eigh(np.eye(4) - picked @ picked.T)
        basis = pv[:, pw > 0.5]
    M = np.column_stack(cols)
    Z = np.diag([1 / zs[0], zs[0], 1 / zs[1], zs[1]])
    return W @ M, Z, M.T


def passive_unitary(O: np.ndarray, dim: int) -> np.ndarray:
    """Fock-space unitary U with U^dag a U = u a, built block by block in total photon number.

    With generator G = sum A_jk a_j^dag a_k the Heisenberg map is a -> expm(-iA) a,
    so A = i logm(u). Blocks with n1 + n2 < dim are exact.
    """
    A = 1j * logm(_passive_to_unitary(O))
    A = 0.5 * (A + A.conj().T)
    a = annihilation(dim)
    eye = np.eye(dim)
    ops = [np.kron(a, eye), np.kron(eye, a)]
    G = sum(A[j, k] * (ops[j].T @ ops[k]) for j in range(2) for k in range(2))
    n1, n2 = np.divmod(np.arange(dim * dim), dim)
    total = n1 + n2
    U = np.zeros((dim * dim, dim * dim), dtype=complex)
    for N in range(2 * dim - 1):
        idx = np.flatnonzero(total == N)
        U[np.ix_(idx, idx)] = unitary_from_hamiltonian(G[np.ix_(idx, idx)])
    return U


def squeezer_unitary(z: float, dim: int, work: int) -> np.ndarray:
    """Single-mode unitary with x -> x/z, p -> z p, computed in ``work`` levels and cut to ``dim``."""
    a = annihilation(work)
    x = (a + a.T) / np.sqrt(2.0)
    p = (a - a.T) / (1j * np.sqrt(2.0))
    # H = [[0, -l], [-l, 0]] for l = ln z, G = (1/2) r^T H r
    g = -0.5 * np.log(z) * (x @ p + p @ x)
    g = 0.5 * (g + g.conj().T)
    return unitary_from_hamiltonian(g)[:dim, :dim]


# -- state synthesis ---------------------------------------------------------------------


def thermal_weights(nbar: float, dim: int) -> np.ndarray:
    m = np.arange(dim)
    if nbar <= 0:
        return (m == 0).astype(float)
    return (nbar / (1.0 + nbar)) ** m / (1.0 + nbar)


def estimate_cutoff(sigma, eta_max: float = ETA_MAX) -> int:
    """Rough per-mode cutoff from a geometric tail bound on each mode's photon number."""
    s = as_covariance(sigma)
    worst = 2
    for j in (0, 2):
        n = max(0.5 * (s[j, j] + s[j + 1, j + 1]) - 0.5, 1e-12)
        worst = max(worst, int(np.ceil(np.log(eta_max / 4.0) / np.log(n / (n + 1.0)))))
    return worst


def gaussian_to_fock(
    sigma,
    cutoff: int = DEFAULT_CUTOFF,
    eta_max: float = ETA_MAX,
    pad: int | None = None,
) -> FockDensity:
    """Truncated density matrix of the zero-mean Gaussian state with covariance ``sigma``.

    ``pad`` extra levels per mode are kept while the unitaries act; the default
    (``pad = cutoff``) makes the final passive layer exact on the kept block.
    """
    s = as_covariance(sigma)
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    D = cutoff + (cutoff if pad is None else pad)

    nu, S = williamson(s)
    O1, Z, O2 = bloch_messiah(S)
    weights = np.kron(thermal_weights(nu[0] - 0.5, D), thermal_weights(nu[1] - 0.5, D))
    live = np.flatnonzero(weights > 1e-18)

    n1, n2 = np.divmod(np.arange(D * D), D)
    keep = np.flatnonzero((n1 < cutoff) & (n2 < cutoff))
    rows = passive_unitary(O1, D)[keep, :]
    u1 = squeezer_unitary(Z[1, 1], D, 2 * D)
    u2 = squeezer_unitary(Z[3, 3], D, 2 * D)
    rows = np.einsum("rab,ac,bd->rcd", rows.reshape(-1, D, D), u1, u2, optimize=True).reshape(len(keep), -1)
    rows = rows @ passive_unitary(O2, D)[:, live]

    rho = (rows * weights[live]) @ rows.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    eta = float(1.0 - np.trace(rho).real)
    if eta > eta_max:
        raise CutoffTooSmallError(cutoff, eta, eta_max, max(estimate_cutoff(s, eta_max), cutoff + 1))
    return FockDensity(rho, cutoff, eta)


def fock_state(n1: int, n2: int, cutoff: int) -> FockDensity:
    psi = np.zeros(cutoff * cutoff)
    psi[n1 * cutoff + n2] = 1.0
    return FockDensity(np.outer(psi, psi).astype(complex), cutoff, 0.0)


def moments(rho: FockDensity) -> tuple[np.ndarray, np.ndarray]:
    """(first moments, symmetrised covariance) of the truncated state."""
    r = _quadratures(rho.cutoff)
    m = rho.matrix
    mean = np.array([np.trace(m @ ri).real for ri in r])
    cov = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            sym = 0.5 * (r[i] @ r[j] + r[j] @ r[i])
            cov[i, j] = np.trace(m @ sym).real - mean[i] * mean[j]
    return mean, cov


def _hermite_functions(nmax: int, x: np.ndarray) -> np.ndarray:
    """psi_n(x), n < nmax, for the x = (a + a^dag)/sqrt(2) quadrature."""
    out = np.zeros((nmax, x.size))
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if nmax > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(2, nmax):
        out[n] = np.sqrt(2.0 / n) * x * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


def homodyne_density(rho: FockDensity, grid1: np.ndarray, grid2: np.ndarray) -> np.ndarray:
    """Joint density of (x1, x2) on the tensor grid, shape (len(grid1), len(grid2))."""
    d = rho.cutoff
    h1 = _hermite_functions(d, np.asarray(grid1, dtype=float))
    h2 = _hermite_functions(d, np.asarray(grid2, dtype=float))
    R = rho.matrix.reshape(d, d, d, d)
    # P(x1, x2) = sum rho[m1 m2, n1 n2] psi_m1(x1) psi_m2(x2) psi_n1(x1) psi_n2(x2)
    t = np.einsum("abcd,ai,ci->bdi", R, h1, h1, optimize=True)
    return np.einsum("bdi,bj,dj->ij", t, h2, h2, optimize=True).real


# -- distinguishability ---------------------------------------------------------------------


def _check_pair(rho_a: FockDensity, rho_b: FockDensity):
    if rho_a.cutoff != rho_b.cutoff:
        raise ValueError(f"cutoff mismatch: {rho_a.cutoff} vs {rho_b.cutoff}")


def helstrom(rho_a: FockDensity, rho_b: FockDensity) -> tuple[float, float]:
    """(trace distance, minimum error probability) at equal priors."""
    _check_pair(rho_a, rho_b)
    lam = np.linalg.eigvalsh(rho_b.matrix - rho_a.matrix)
    T = 0.5 * float(np.sum(np.abs(lam)))
    return T, float(min(max(0.5 * (1.0 - T), 0.0), 0.5))


def _spectrum(rho: FockDensity) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(rho.matrix)
    worst = w.min()
    if worst < -EIG_CLIP:
        raise ValueError(f"density matrix has eigenvalue {worst:.3e} below -{EIG_CLIP:g}")
    if worst < -ROUNDOFF:
        warnings.warn(f"clipping small negative eigenvalues (min {worst:.1e})", RuntimeWarning, stacklevel=3)
    # round-off level eigenvalues are exact zeros, so that s -> 0, 1 limits see the kernel
    w = np.where(w < ROUNDOFF, 0.0, w)
    return w, v


@dataclass(frozen=True)
class OracleBounds:
    fidelity: float
    s_grid: np.ndarray
    q_grid: np.ndarray
    qcb: float
    s_star: float

    @property
    def q_grid_min(self) -> float:
        return float(self.q_grid.min())


def oracle_bounds(rho_a: FockDensity, rho_b: FockDensity, refine: bool = True) -> OracleBounds:
    """Fidelity (squared convention) and the Chernoff function on a grid of s.

    ``qcb`` is the grid minimum, refined by a bounded scalar search when ``refine``.
    """
    _check_pair(rho_a, rho_b)
    wa, va = _spectrum(rho_a)
    wb, vb = _spectrum(rho_b)

    # Tr sqrt(sqrt(a) b sqrt(a)) = || sqrt(a) sqrt(b) ||_1, without square roots of round-off
    sqrt_a = (va * np.sqrt(wa)) @ va.conj().T
    sqrt_b = (vb * np.sqrt(wb)) @ vb.conj().T
    F = float(np.sum(np.linalg.svd(sqrt_a @ sqrt_b, compute_uv=False)) ** 2)

    overlap = np.abs(va.conj().T @ vb) ** 2

    def q_of(s: float) -> float:
        return float(np.power(wa, s) @ overlap @ np.power(wb, 1.0 - s))

    q_grid = np.array([q_of(s) for s in S_GRID])
    k = int(np.argmin(q_grid))
    q_min, s_min = float(q_grid[k]), float(S_GRID[k])
    if refine:
        lo = S_GRID[k - 1] if k > 0 else S_EDGE
        hi = S_GRID[k + 1] if k < len(S_GRID) - 1 else 1.0 - S_EDGE
        for s_edge in (lo, hi):
            if q_of(s_edge) < q_min:
                q_min, s_min = q_of(s_edge), float(s_edge)
        res = minimize_scalar(q_of, bounds=(lo, hi), method="bounded", options={"xatol": 1e-8})
        if res.fun < q_min:
            q_min, s_min = float(res.fun), float(res.x)
    return OracleBounds(F, S_GRID.copy(), q_grid, q_min, s_min)
