"""Bosonic Gaussian states in the covariance-matrix picture.

Conventions: quadratures x = a + a^dag, p = -i(a - a^dag), so the vacuum has
covariance I and a thermal state of mean photon number N has (2N+1) I.
Modes are interleaved, (x1, p1, x2, p2, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PHYSICAL_TOL = 1e-9
SYMPLECTIC_TOL = 1e-10


class UnphysicalStateError(ValueError):
    """Raised when a covariance matrix violates the uncertainty principle."""


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form with per-mode blocks [[0, 1], [-1, 0]]."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def is_symplectic(S: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    omega = symplectic_form(S.shape[0] // 2)
    return bool(np.max(np.abs(S @ omega @ S.T - omega)) < tol)


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Unclipped symplectic spectrum of ``cov``, descending, one per mode."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise ValueError(f"covariance must be square with even size, got {cov.shape}")
    if np.max(np.abs(cov - cov.T)) > 1e-12 * max(1.0, np.max(np.abs(cov))):
        raise ValueError("covariance matrix is not symmetric")
    n = cov.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ cov))
    # eigenvalues come in +-nu pairs
    return np.sort(ev)[::-1][::2]


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an n-mode Gaussian state.

    The covariance is symmetrized on construction and checked for
    physicality (all symplectic eigenvalues >= 1 up to ``PHYSICAL_TOL``).
    """

    mean: np.ndarray
    cov: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError(f"covariance must be 2n x 2n, got shape {cov.shape}")
        n = cov.shape[0] // 2
        mean = np.zeros(2 * n) if self.mean is None else np.array(self.mean, dtype=float)
        if mean.shape != (2 * n,):
            raise ValueError(f"mean must have length {2 * n}, got {mean.shape}")
        cov = 0.5 * (cov + cov.T)
        nu = symplectic_eigenvalues(cov)
        if nu[-1] < 1.0 - PHYSICAL_TOL:
            raise UnphysicalStateError(
                f"smallest symplectic eigenvalue {nu[-1]:.12g} < 1; state is unphysical"
            )
        cov.setflags(write=False)
        mean.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "n_modes", n)

    def __repr__(self):
        return f"GaussianState(n_modes={self.n_modes})"

    def is_zero_mean(self) -> bool:
        return not np.any(self.mean)

    def reduced(self, modes) -> "GaussianState":
        """Marginal state on ``modes`` (partial trace = dropping rows/cols)."""
        idx = _quad_indices(modes)
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])

    def permute(self, order) -> "GaussianState":
        """Reorder modes; mode ``order[k]`` of self becomes mode ``k``."""
        if sorted(order) != list(range(self.n_modes)):
            raise ValueError(f"{order} is not a permutation of the modes")
        idx = _quad_indices(order)
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])

    def transform(self, S: np.ndarray, modes=None) -> "GaussianState":
        """Apply the symplectic matrix ``S`` acting on ``modes`` (all by default)."""
        S = np.asarray(S, dtype=float)
        if modes is None:
            full = S
        else:
            full = embed(S, modes, self.n_modes)
        if full.shape != self.cov.shape:
            raise ValueError("symplectic matrix has the wrong size")
        return GaussianState(full @ self.mean, full @ self.cov @ full.T)


def tensor(*states: GaussianState) -> GaussianState:
    """Tensor product, modes concatenated in argument order."""
    mean = np.concatenate([s.mean for s in states])
    cov = _block_diag([s.cov for s in states])
    return GaussianState(mean, cov)


def _block_diag(blocks):
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    k = 0
    for b in blocks:
        d = b.shape[0]
        out[k:k + d, k:k + d] = b
        k += d
    return out


def _quad_indices(modes):
    return np.array([[2 * m, 2 * m + 1] for m in modes], dtype=int).ravel()


def _check_mode(n_modes, *modes):
    for m in modes:
        if not 0 <= m < n_modes:
            raise IndexError(f"mode {m} out of range for {n_modes}-mode state")
    if len(set(modes)) != len(modes):
        raise ValueError("modes must be distinct")


def embed(S: np.ndarray, modes, n_modes: int) -> np.ndarray:
    """Lift a k-mode symplectic matrix acting on ``modes`` to ``n_modes``."""
    _check_mode(n_modes, *modes)
    full = np.eye(2 * n_modes)
    idx = _quad_indices(modes)
    full[np.ix_(idx, idx)] = S
    return full


def vacuum(n_modes: int = 1) -> GaussianState:
    return thermal_state(0.0, n_modes)


def thermal_state(N: float, n_modes: int = 1) -> GaussianState:
    if N < 0:
        raise ValueError(f"mean photon number must be >= 0, got {N}")
    if n_modes < 1:
        raise ValueError("need at least one mode")
    return GaussianState(np.zeros(2 * n_modes), (2 * N + 1) * np.eye(2 * n_modes))


def coherent_state(alpha: complex, N: float = 0.0) -> GaussianState:
    """Single-mode (displaced thermal) state with amplitude ``alpha``."""
    if N < 0:
        raise ValueError(f"mean photon number must be >= 0, got {N}")
    alpha = complex(alpha)
    return GaussianState(np.array([2 * alpha.real, 2 * alpha.imag]), (2 * N + 1) * np.eye(2))


def tmsv(N_S: float) -> GaussianState:
    """Two-mode squeezed vacuum with N_S photons per mode (signal, idler)."""
    if N_S < 0:
        raise ValueError(f"N_S must be >= 0, got {N_S}")
    Cp = np.sqrt(N_S * (N_S + 1))
    Z = np.diag([1.0, -1.0])
    I = np.eye(2)
    cov = np.block([[(2 * N_S + 1) * I, 2 * Cp * Z], [2 * Cp * Z, (2 * N_S + 1) * I]])
    return GaussianState(np.zeros(4), cov)


def apply_thermal_loss(state: GaussianState, mode: int, kappa: float, N_B: float) -> GaussianState:
    """Thermal-loss channel a -> sqrt(kappa) a + sqrt(1-kappa) e on one mode.

    The environment mode carries N_B/(1-kappa) photons so that N_B noise
    photons reach the output.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    if N_B < 0:
        raise ValueError(f"N_B must be >= 0, got {N_B}")
    if kappa == 1.0 and N_B > 0:
        raise ValueError("kappa = 1 with N_B > 0 needs an infinitely hot environment")
    _check_mode(state.n_modes, mode)
    n2 = 2 * state.n_modes
    X = np.eye(n2)
    idx = _quad_indices([mode])
    X[idx, idx] = np.sqrt(kappa)
    Y = np.zeros((n2, n2))
    Y[idx, idx] = 2 * N_B + 1 - kappa
    return GaussianState(X @ state.mean, X @ state.cov @ X.T + Y)


def two_mode_squeezer_matrix(G: float) -> np.ndarray:
    """Symplectic matrix of a_i -> sqrt(G) a_i + sqrt(G-1) a_j^dag (and i<->j)."""
    if G < 1:
        raise ValueError(f"gain must be >= 1, got {G}")
    c, s = np.sqrt(G), np.sqrt(G - 1)
    Z = np.diag([1.0, -1.0])
    return np.block([[c * np.eye(2), s * Z], [s * Z, c * np.eye(2)]])


def beamsplitter_matrix(tau: float) -> np.ndarray:
    """a_i -> sqrt(tau) a_i + sqrt(1-tau) a_j,  a_j -> -sqrt(1-tau) a_i + sqrt(tau) a_j."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {tau}")
    t, r = np.sqrt(tau), np.sqrt(1 - tau)
    return np.block([[t * np.eye(2), r * np.eye(2)], [-r * np.eye(2), t * np.eye(2)]])


def phase_matrix(theta: float) -> np.ndarray:
    """a -> exp(i theta) a."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def single_mode_squeezer_matrix(r: float, phi: float = 0.0) -> np.ndarray:
    """a -> cosh(r) a - exp(i phi) sinh(r) a^dag."""
    R = phase_matrix(phi / 2)
    return R @ np.diag([np.exp(-r), np.exp(r)]) @ R.T


def two_mode_squeeze(state: GaussianState, i: int, j: int, G: float) -> GaussianState:
    return state.transform(two_mode_squeezer_matrix(G), (i, j))


def beamsplitter(state: GaussianState, i: int, j: int, tau: float) -> GaussianState:
    return state.transform(beamsplitter_matrix(tau), (i, j))


def phase_shift(state: GaussianState, mode: int, theta: float) -> GaussianState:
    return state.transform(phase_matrix(theta), (mode,))


def squeeze(state: GaussianState, mode: int, r: float, phi: float = 0.0) -> GaussianState:
    return state.transform(single_mode_squeezer_matrix(r, phi), (mode,))


def displace(state: GaussianState, mode: int, alpha: complex) -> GaussianState:
    _check_mode(state.n_modes, mode)
    alpha = complex(alpha)
    mean = np.array(state.mean)
    mean[2 * mode] += 2 * alpha.real
    mean[2 * mode + 1] += 2 * alpha.imag
    return GaussianState(mean, state.cov)


def williamson_eigenvalues(state: GaussianState) -> np.ndarray:
    """Symplectic eigenvalues, descending, with round-off below 1 clipped to 1."""
    nu = symplectic_eigenvalues(state.cov)
    nu[(nu < 1.0) & (nu >= 1.0 - PHYSICAL_TOL)] = 1.0
    return nu


def mean_photon(state: GaussianState, mode: int) -> float:
    _check_mode(state.n_modes, mode)
    i = 2 * mode
    V = state.cov
    mu = state.mean
    return float((V[i, i] + V[i + 1, i + 1] - 2) / 4 + (mu[i] ** 2 + mu[i + 1] ** 2) / 4)
