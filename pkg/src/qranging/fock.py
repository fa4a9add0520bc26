"""Truncated Fock-space oracle.

Everything here is brute force: states are explicit (possibly multimode)
density matrices or kets, Gaussian unitaries are matrix exponentials of
quadratic generators built from truncated ladder operators, and
distinguishability measures come from Hermitian eigendecompositions.  It is
deliberately independent of the covariance-matrix code in ``gaussian`` and
``distinguish`` so that it can serve as their ground truth.

Multimode index order is row-major over modes (mode 0 most significant),
matching ``np.kron(mode0, mode1, ...)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.csgraph import connected_components

DEFAULT_DEFICIT_BOUND = 1e-10
PINV_TOL = 1e-12
EIG_FLOOR = 1e-14


class TruncationError(RuntimeError):
    """The Fock cutoff discards more probability than allowed."""


@dataclass
class FockDensityMatrix:
    """Density matrix over a truncated multimode Fock basis."""

    mode_cutoffs: tuple
    data: np.ndarray
    trace_deficit: float = 0.0

    def __post_init__(self):
        self.mode_cutoffs = tuple(int(c) for c in self.mode_cutoffs)
        dim = math.prod(self.mode_cutoffs)
        if self.data.shape != (dim, dim):
            raise ValueError(f"data shape {self.data.shape} does not match cutoffs {self.mode_cutoffs}")

    @property
    def n_modes(self):
        return len(self.mode_cutoffs)

    @property
    def dim(self):
        return self.data.shape[0]

    def check(self, deficit_bound: float = DEFAULT_DEFICIT_BOUND):
        """Raise if the truncation lost too much weight or the matrix is not a state."""
        if self.trace_deficit >= deficit_bound:
            raise TruncationError(
                f"trace deficit {self.trace_deficit:.3g} >= {deficit_bound:.3g} "
                f"at cutoffs {self.mode_cutoffs}"
            )
        if np.max(np.abs(self.data - self.data.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(self.data)[0] < -1e-10:
            raise ValueError("density matrix has negative eigenvalues")
        return self


def ket_to_dm(psi: np.ndarray, mode_cutoffs, trace_deficit=0.0) -> FockDensityMatrix:
    return FockDensityMatrix(tuple(mode_cutoffs), np.outer(psi, psi.conj()), trace_deficit)


def tensor(*dms: FockDensityMatrix) -> FockDensityMatrix:
    data = dms[0].data
    for d in dms[1:]:
        data = np.kron(data, d.data)
    cut = sum((d.mode_cutoffs for d in dms), ())
    keep = math.prod(1.0 - d.trace_deficit for d in dms)
    return FockDensityMatrix(cut, data, 1.0 - keep)


# ---------------------------------------------------------------- states

def thermal_cutoff(N: float, eps: float = 1e-12) -> int:
    """Smallest cutoff whose discarded geometric tail is below ``eps``."""
    if N <= 0:
        return 1
    return int(math.ceil(math.log(eps) / math.log(N / (N + 1))))


def tmsv_vector(N_S: float, cutoff: int):
    """Schmidt-form TMSV ket on a cutoff x cutoff two-mode space.

    Returns ``(psi, trace_deficit)``; the kept amplitudes are renormalized.
    """
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    N_S = float(N_S)
    n = np.arange(cutoff)
    if N_S == 0:
        amp = (n == 0).astype(float)
    else:
        amp = np.sqrt(N_S ** n / (N_S + 1) ** (n + 1))
    kept = float(np.sum(amp ** 2))
    psi = np.zeros(cutoff * cutoff, dtype=complex)
    psi[n * cutoff + n] = amp / np.sqrt(kept)
    return psi, 1.0 - kept


def thermal_dm(N: float, cutoff: int) -> FockDensityMatrix:
    N = float(N)
    n = np.arange(cutoff)
    p = np.where(n == 0, 1.0, 0.0) if N == 0 else (N ** n) / (N + 1) ** (n + 1)
    kept = float(p.sum())
    return FockDensityMatrix((cutoff,), np.diag(p / kept).astype(complex), 1.0 - kept)


def coherent_vector(alpha: complex, cutoff: int):
    """Poissonian coherent-state amplitudes; returns ``(psi, trace_deficit)``."""
    n = np.arange(cutoff)
    log_amp = -abs(alpha) ** 2 / 2 - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    if alpha == 0:
        psi = (n == 0).astype(complex)
    else:
        psi = np.exp(log_amp + n * np.log(complex(alpha)))
    kept = float(np.sum(np.abs(psi) ** 2))
    return psi / np.sqrt(kept), 1.0 - kept


def ladder(cutoff: int) -> np.ndarray:
    """Truncated annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(complex)


def displacement_operator(alpha: complex, cutoff: int) -> np.ndarray:
    return gaussian_unitary("displacement", alpha, [cutoff]).toarray()


def displaced_thermal_dm(alpha: complex, N: float, cutoff: int,
                         work_cutoff: int | None = None) -> FockDensityMatrix:
    """D(alpha) rho_th(N) D(alpha)^dag computed on a larger working space, then truncated."""
    work = work_cutoff or cutoff + 40
    th = thermal_dm(N, work)
    D = displacement_operator(alpha, work)
    full = D @ th.data @ D.conj().T
    return _truncate_renorm(full, (work,), (cutoff,))


def _truncate_renorm(data, cut_in, cut_out) -> FockDensityMatrix:
    idx = _sub_indices(cut_in, cut_out)
    sub = data[np.ix_(idx, idx)]
    kept = float(np.trace(sub).real)
    sub = sub / kept
    sub = 0.5 * (sub + sub.conj().T)
    return FockDensityMatrix(tuple(cut_out), sub, max(0.0, 1.0 - kept))


def _sub_indices(cut_in, cut_out):
    grids = np.meshgrid(*[np.arange(c) for c in cut_out], indexing="ij")
    return np.ravel_multi_index([g.ravel() for g in grids], cut_in)


def truncate(dm: FockDensityMatrix, cutoffs) -> FockDensityMatrix:
    """Project onto smaller per-mode cutoffs and renormalize; deficits accumulate."""
    out = _truncate_renorm(dm.data, dm.mode_cutoffs, cutoffs)
    out.trace_deficit = 1.0 - (1.0 - dm.trace_deficit) * (1.0 - out.trace_deficit)
    return out


# ------------------------------------------------------------- unitaries

def _mode_op(op, mode, cutoffs, sparse=False):
    if sparse:
        out = sp.identity(1, format="csr", dtype=complex)
        for m, c in enumerate(cutoffs):
            out = sp.kron(out, sp.csr_matrix(op) if m == mode else sp.identity(c), format="csr")
        return out
    mats = [np.eye(c) for c in cutoffs]
    mats[mode] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _blockwise_expm(K) -> sp.csr_matrix:
    """expm of a sparse generator that splits into independent blocks.

    Gaussian unitaries conserve total photon number (passive) or photon
    number differences (squeezers), so the blocks stay small.
    """
    K = sp.csr_matrix(K)
    n_comp, labels = connected_components(abs(K) + abs(K.T), directed=False)
    rows, cols, vals = [], [], []
    for c in range(n_comp):
        idx = np.nonzero(labels == c)[0]
        blk = expm(K[idx][:, idx].toarray())
        r, q = np.meshgrid(idx, idx, indexing="ij")
        rows.append(r.ravel())
        cols.append(q.ravel())
        vals.append(blk.ravel())
    U = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=K.shape)
    U.eliminate_zeros()
    return U


def generator(kind: str, param, cutoffs):
    """Anti-Hermitian sparse generator K on the given modes, U = exp(K).

    ``kind`` is one of
      * ``"beamsplitter"`` (tau): a1 -> sqrt(tau) a1 + sqrt(1-tau) a2
      * ``"squeezer"`` (G): a1 -> sqrt(G) a1 + sqrt(G-1) a2^dag
      * ``"phase"`` (theta): a -> exp(i theta) a
      * ``"single_squeezer"`` ((r, phi)): a -> cosh r a - e^{i phi} sinh r a^dag
      * ``"displacement"`` (alpha)
    in the Heisenberg picture U^dag a U.
    """
    if kind in ("beamsplitter", "squeezer"):
        a1 = _mode_op(ladder(cutoffs[0]), 0, cutoffs, sparse=True)
        a2 = _mode_op(ladder(cutoffs[1]), 1, cutoffs, sparse=True)
        if kind == "beamsplitter":
            tau = float(param)
            if not 0 <= tau <= 1:
                raise ValueError("transmissivity must lie in [0, 1]")
            th = math.acos(math.sqrt(tau))
            return th * (a1.conj().T @ a2 - a2.conj().T @ a1)
        G = float(param)
        if G < 1:
            raise ValueError("gain must be >= 1")
        r = math.acosh(math.sqrt(G))
        return r * (a1.conj().T @ a2.conj().T - a1 @ a2)
    a = sp.csr_matrix(ladder(cutoffs[0]))
    if kind == "phase":
        return sp.diags(1j * float(param) * np.arange(cutoffs[0]))
    if kind == "single_squeezer":
        r, phi = param
        xi = r * np.exp(1j * phi)
        return 0.5 * (np.conj(xi) * a @ a - xi * a.conj().T @ a.conj().T)
    if kind == "displacement":
        return complex(param) * a.conj().T - np.conj(complex(param)) * a
    raise ValueError(f"unknown generator {kind!r}")


def gaussian_unitary(kind: str, param, cutoffs) -> sp.csr_matrix:
    return _blockwise_expm(generator(kind, param, cutoffs))


def _left_apply(U, data, cuts, modes):
    """(U acting on ``modes``) @ data, for data of shape (dim, dim)."""
    n = len(cuts)
    if sp.issparse(U) and U.nnz > 0.05 * U.shape[0] ** 2:
        U = U.toarray()
    others = [m for m in range(n) if m not in modes]
    order = list(modes) + others
    d = data.shape[1]
    t = data.reshape(list(cuts) + [d]).transpose(order + [n])
    shape = t.shape
    t = U @ t.reshape(math.prod(cuts[m] for m in modes), -1)
    t = np.asarray(t).reshape(shape).transpose(list(np.argsort(order)) + [n])
    return t.reshape(data.shape)


def apply_unitary(dm: FockDensityMatrix, U, modes) -> FockDensityMatrix:
    """Conjugate ``dm`` by ``U`` acting on ``modes`` (tensor identity elsewhere)."""
    modes = list(modes)
    cuts = dm.mode_cutoffs
    X = _left_apply(U, dm.data, cuts, modes)
    Y = _left_apply(U, X.conj().T, cuts, modes).conj().T
    return FockDensityMatrix(cuts, 0.5 * (Y + Y.conj().T), dm.trace_deficit)


def apply_gaussian_unitary(dm: FockDensityMatrix, kind: str, param, modes,
                           out_cutoffs=None,
                           deficit_bound: float = DEFAULT_DEFICIT_BOUND) -> FockDensityMatrix:
    """Apply a beamsplitter / squeezer / phase (or displacement) to ``dm``.

    The unitary is exponentiated on the current cutoffs; pass larger input
    cutoffs than needed and shrink with ``out_cutoffs``.  The truncation loss
    is accumulated in ``trace_deficit`` and checked against ``deficit_bound``
    (pass ``None`` to skip the check).
    """
    U = gaussian_unitary(kind, param, [dm.mode_cutoffs[m] for m in modes])
    out = apply_unitary(dm, U, modes)
    edge = _edge_weight(out)
    out.trace_deficit = 1.0 - (1.0 - out.trace_deficit) * (1.0 - edge)
    if out_cutoffs is not None:
        out = truncate(out, out_cutoffs)
    if deficit_bound is not None and out.trace_deficit >= deficit_bound:
        raise TruncationError(
            f"trace deficit {out.trace_deficit:.3g} after {kind} exceeds {deficit_bound:.3g}"
        )
    return out


def _edge_weight(dm: FockDensityMatrix) -> float:
    """Population on the highest kept level of any mode (a truncation-leak proxy)."""
    return _edge_weight_diag(np.real(np.diag(dm.data)), dm.mode_cutoffs)


def partial_trace(dm: FockDensityMatrix, keep) -> FockDensityMatrix:
    keep = list(keep)
    cuts = dm.mode_cutoffs
    n = len(cuts)
    rho = dm.data.reshape(cuts + cuts)
    traced = [m for m in range(n) if m not in keep]
    letters = "abcdefghijklmnopqrstuvwxyz"
    ket = [letters[i] for i in range(n)]
    bra = [letters[n + i] for i in range(n)]
    for m in traced:
        bra[m] = ket[m]
    out = [ket[m] for m in keep] + [bra[m] for m in keep]
    res = np.einsum("".join(ket + bra) + "->" + "".join(out), rho)
    d = math.prod(cuts[m] for m in keep)
    return FockDensityMatrix(tuple(cuts[m] for m in keep), res.reshape(d, d), dm.trace_deficit)


def thermal_loss_fock(dm: FockDensityMatrix, mode: int, kappa: float, N_B: float,
                      ancilla_cutoff: int | None = None) -> FockDensityMatrix:
    """Thermal-loss channel via a thermal ancilla, a beamsplitter and a partial trace.

    The output mode keeps its input cutoff; choose it large enough to hold
    kappa * n + N_B photons.  The ancilla also receives the reflected part of
    the signal, so by default it gets at least the signal mode's cutoff.
    Weight reaching the last kept level is added to ``trace_deficit``.
    """
    if not 0 <= kappa <= 1:
        raise ValueError("kappa must lie in [0, 1]")
    if kappa == 1:
        if N_B > 0:
            raise ValueError("kappa = 1 with N_B > 0 is not a valid channel")
        return dm
    N_env = N_B / (1 - kappa)
    anc_cut = ancilla_cutoff or max(2, thermal_cutoff(N_env, 1e-13), dm.mode_cutoffs[mode])
    anc = thermal_dm(N_env, anc_cut)
    joint = tensor(dm, anc)
    U = gaussian_unitary("beamsplitter", kappa, [dm.mode_cutoffs[mode], anc_cut])
    joint = apply_unitary(joint, U, [mode, dm.n_modes])
    edge = _edge_weight(joint)
    joint.trace_deficit = 1.0 - (1.0 - joint.trace_deficit) * (1.0 - edge)
    return partial_trace(joint, range(dm.n_modes))


def number_operator(dm_or_cutoffs, mode: int) -> np.ndarray:
    cuts = getattr(dm_or_cutoffs, "mode_cutoffs", dm_or_cutoffs)
    return _mode_op(np.diag(np.arange(cuts[mode])).astype(complex), mode, cuts, sparse=True)


def _expect(op, rho):
    return complex(np.sum(op.multiply(rho.T)))


def mean_photon_fock(dm: FockDensityMatrix, mode: int) -> float:
    return _expect(number_operator(dm, mode), dm.data).real


def covariance_fock(dm: FockDensityMatrix):
    """Mean vector and covariance (vacuum = I) from Fock-space moments."""
    cuts = dm.mode_cutoffs
    quads = []
    for m, c in enumerate(cuts):
        a = _mode_op(ladder(c), m, cuts, sparse=True)
        quads += [a + a.conj().T, -1j * (a - a.conj().T)]
    rho = dm.data
    mean = np.array([_expect(q, rho).real for q in quads])
    n = len(quads)
    cov = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            v = 0.5 * _expect(quads[i] @ quads[j] + quads[j] @ quads[i], rho).real
            cov[i, j] = cov[j, i] = v - mean[i] * mean[j]
    return mean, cov


# ------------------------------------------------------ spectral states

@dataclass
class SpectralState:
    """A state kept as rho = U diag(p) U^dag on a truncated Fock space.

    States prepared from thermal (diagonal) inputs by unitaries keep their
    exact eigenvalues this way, so fractional powers need no
    eigendecomposition and no eigenvalue floor.
    """

    mode_cutoffs: tuple
    p: np.ndarray
    U: np.ndarray
    trace_deficit: float = 0.0

    @classmethod
    def thermal(cls, occupations, cutoffs):
        """Product of thermal states (one occupation per mode)."""
        dms = [thermal_dm(N, c) for N, c in zip(occupations, cutoffs)]
        p = np.ones(1)
        for d in dms:
            p = np.kron(p, np.real(np.diag(d.data)))
        keep = math.prod(1.0 - d.trace_deficit for d in dms)
        return cls(tuple(cutoffs), p, np.eye(p.size, dtype=complex), 1.0 - keep)

    def apply(self, kind: str, param, modes) -> "SpectralState":
        V = gaussian_unitary(kind, param, [self.mode_cutoffs[m] for m in modes])
        U = _left_apply(V, self.U, self.mode_cutoffs, list(modes))
        out = SpectralState(self.mode_cutoffs, self.p, U, self.trace_deficit)
        edge = _edge_weight_diag(out.populations(), self.mode_cutoffs)
        out.trace_deficit = 1.0 - (1.0 - self.trace_deficit) * (1.0 - edge)
        return out

    def populations(self) -> np.ndarray:
        return (np.abs(self.U) ** 2) @ self.p

    def to_dm(self) -> FockDensityMatrix:
        data = (self.U * self.p) @ self.U.conj().T
        return FockDensityMatrix(self.mode_cutoffs, data, self.trace_deficit)


def spectral_tensor(a: SpectralState, b: SpectralState) -> SpectralState:
    keep = (1.0 - a.trace_deficit) * (1.0 - b.trace_deficit)
    return SpectralState(a.mode_cutoffs + b.mode_cutoffs, np.kron(a.p, b.p),
                         np.kron(a.U, b.U), 1.0 - keep)


def _edge_weight_diag(pop, cutoffs) -> float:
    pop = pop.reshape(cutoffs)
    w = 0.0
    for m, c in enumerate(cutoffs):
        if c > 1:
            w = max(w, float(np.take(pop, c - 1, axis=m).sum()))
    return w


# ---------------------------------------------------- distinguishability

def _eigh_psd(rho: np.ndarray):
    w, U = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = w > EIG_FLOOR
    return w[keep], U[:, keep]


def _as_matrix(x):
    return x.data if isinstance(x, FockDensityMatrix) else np.asarray(x)


def helstrom_binary(rho0, rho1, p0: float = 0.5) -> float:
    """Minimum error probability for two hypotheses."""
    A = p0 * _as_matrix(rho0) - (1 - p0) * _as_matrix(rho1)
    w = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
    return float(0.5 * (1 - np.sum(np.abs(w))))


def _factor(state):
    """Matrix B with state = B B^dag (ket -> column, density matrix -> eigen-factor)."""
    if isinstance(state, FockDensityMatrix):
        w, U = _eigh_psd(state.data)
        return U * np.sqrt(w)
    arr = np.asarray(state)
    if arr.ndim == 1:
        return arr[:, None]
    w, U = _eigh_psd(arr)
    return U * np.sqrt(w)


def pgm_error(states, priors=None) -> float:
    """Error probability of the pretty-good (square-root) measurement.

    States may be kets or density matrices.  Writing p_h rho_h = B_h B_h^dag
    and B = [B_1 ... B_m], the success probability is
    sum_h || (sqrt(B^dag B))_{hh} ||_F^2, which avoids forming operators on
    the full Fock space.
    """
    states = list(states)
    m = len(states)
    if priors is None:
        priors = np.full(m, 1.0 / m)
    priors = np.asarray(priors, dtype=float)
    if priors.shape != (m,) or abs(priors.sum() - 1) > 1e-12 or np.any(priors < 0):
        raise ValueError("priors must be a probability vector, one per state")
    blocks = [np.sqrt(p) * _factor(s) for p, s in zip(priors, states)]
    B = np.hstack(blocks)
    K = B.conj().T @ B
    w, V = np.linalg.eigh(0.5 * (K + K.conj().T))
    keep = w > PINV_TOL
    root = (V[:, keep] * np.sqrt(w[keep])) @ V[:, keep].conj().T
    # sum_h Pi_h must be the support projector U U^dag with U = B V w^{-1/2};
    # checked where dividing by sqrt(w) does not amplify round-off
    good = w > 1e-6 * w.max()
    Usup = (B @ V[:, good]) / np.sqrt(w[good])
    gram = Usup.conj().T @ Usup
    if np.max(np.abs(gram - np.eye(gram.shape[0])), initial=0.0) > 1e-8:
        raise ArithmeticError("PGM elements do not resolve the support projector")
    succ = 0.0
    k = 0
    for b in blocks:
        r = b.shape[1]
        succ += float(np.sum(np.abs(root[k:k + r, k:k + r]) ** 2))
        k += r
    return 1.0 - succ


def matrix_power_psd(rho: np.ndarray, s: float) -> np.ndarray:
    w, U = _eigh_psd(rho)
    return (U * w ** s) @ U.conj().T


def _spectrum(state):
    if isinstance(state, SpectralState):
        keep = state.p > 0
        return state.p[keep], state.U[:, keep]
    return _eigh_psd(_as_matrix(state))


def overlap_fock(rho1, rho2, s: float) -> float:
    """Tr[rho1^s rho2^(1-s)].

    Density matrices are diagonalized and eigenvalues below 1e-14 dropped;
    ``SpectralState`` inputs use their exact spectra (only zeros dropped).
    """
    return overlap_from_eig(_spectrum(rho1), _spectrum(rho2), s)


def overlap_from_eig(e1, e2, s: float) -> float:
    """Overlap from precomputed ``(eigenvalues, eigenvectors)`` pairs."""
    (w1, U1), (w2, U2) = e1, e2
    M = np.abs(U1.conj().T @ U2) ** 2
    return float((w1 ** s) @ M @ (w2 ** (1 - s)))


def overlap_curve(rho1, rho2):
    """Return ``q(s)`` evaluating Tr[rho1^s rho2^(1-s)] from one shared diagonalization."""
    (w1, U1), (w2, U2) = _spectrum(rho1), _spectrum(rho2)
    M = np.abs(U1.conj().T @ U2) ** 2

    def q(s: float) -> float:
        return float((w1 ** s) @ M @ (w2 ** (1 - s)))

    return q


def uhlmann_fidelity_fock(rho1, rho2, prune: float = 1e-10) -> float:
    """Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)).

    For two ``SpectralState`` inputs this is the nuclear norm of
    diag(sqrt p1) U1^dag U2 diag(sqrt p2).  Dropping a row i changes that
    norm by at most sqrt(p1_i) (the rows of a unitary have unit length), so
    the weakest rows and columns are pruned with total budget ``prune``.
    """
    if isinstance(rho1, SpectralState) and isinstance(rho2, SpectralState):
        (w1, U1), (w2, U2) = _spectrum(rho1), _spectrum(rho2)
        r1, r2 = np.sqrt(w1), np.sqrt(w2)
        k1, k2 = _prune_mask(r1, prune / 2), _prune_mask(r2, prune / 2)
        core = (r1[k1, None] * (U1[:, k1].conj().T @ U2[:, k2])) * r2[None, k2]
        return float(np.sum(np.linalg.svd(core, compute_uv=False)))
    w1, U1 = _eigh_psd(_as_matrix(rho1))
    # restrict to the support of rho1
    sq = U1 * np.sqrt(w1)
    inner = sq.conj().T @ _as_matrix(rho2) @ sq
    ev = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sum(np.sqrt(np.clip(ev, 0.0, None))))


def _prune_mask(weights, budget):
    """Keep-mask dropping the smallest entries whose total stays within ``budget``."""
    order = np.argsort(weights)
    dropped = np.cumsum(weights[order]) <= budget
    keep = np.ones(weights.size, dtype=bool)
    keep[order[dropped]] = False
    return keep


# --------------------------------------------------- composite oracles

def standard_form_parameters(a: float, b: float, c: float):
    """Williamson data of the covariance [[a I, c Z], [c Z, b I]] with c >= 0.

    Returns ``(n1, n2, G)``: thermal occupations of the two modes and the
    two-mode squeezer gain that maps thermal(n1) x thermal(n2) onto it.
    """
    if c < 0:
        raise ValueError("expects c >= 0")
    s2 = (a + b) ** 2 - 4 * c ** 2
    if s2 <= 0:
        raise ValueError("covariance is not positive definite")
    s = math.sqrt(s2)
    x, y = (s + a - b) / 2, (s - a + b) / 2
    if min(x, y) < 1 - 1e-12:
        raise ValueError("covariance violates the uncertainty principle")
    G = ((a + b) / s + 1) / 2
    return max(0.0, (x - 1) / 2), max(0.0, (y - 1) / 2), G


def two_mode_standard_form_dm(a: float, b: float, c: float, cutoffs,
                              work_pad: int = 12) -> FockDensityMatrix:
    """Zero-mean two-mode state with covariance [[a I, c Z], [c Z, b I]].

    Built as thermal x thermal followed by a two-mode squeezer, which is the
    Williamson form of such matrices.
    """
    n1, n2, G = standard_form_parameters(a, b, c)
    work = [c_ + work_pad for c_ in cutoffs]
    dm = tensor(thermal_dm(n1, work[0]), thermal_dm(n2, work[1]))
    dm = apply_gaussian_unitary(dm, "squeezer", G, [0, 1], deficit_bound=None)
    return truncate(dm, cutoffs)


def classical_pair_m2(alpha_sq: float, N_B: float, cutoff: int):
    """Single-mode reduction of the m = 2 coherent-state ranging pair.

    The pair  D(alpha)th (x) th  vs  th (x) D(alpha)th  is mapped by a 50:50
    beamsplitter to a common factor times  D(+-alpha/sqrt2) th,  so binary
    Helstrom and PGM errors can be computed on one mode.
    """
    amp = math.sqrt(alpha_sq / 2)
    return (displaced_thermal_dm(amp, N_B, cutoff), displaced_thermal_dm(-amp, N_B, cutoff))


def classical_helstrom_m2(alpha_sq: float, N_B: float, cutoff: int) -> tuple[float, float]:
    """(Helstrom error, trace deficit) for the concentrated m = 2 classical problem."""
    r0, r1 = classical_pair_m2(alpha_sq, N_B, cutoff)
    return helstrom_binary(r0, r1), max(r0.trace_deficit, r1.trace_deficit)


def classical_pgm_m2(alpha_sq: float, N_B: float, cutoff: int) -> tuple[float, float]:
    r0, r1 = classical_pair_m2(alpha_sq, N_B, cutoff)
    return pgm_error([r0, r1]), max(r0.trace_deficit, r1.trace_deficit)


def ppm_coherent_kets(m: int, alpha: complex, cutoff: int):
    """m-mode kets |alpha>_h (x) |0>_rest; pairwise overlap exp(-|alpha|^2)."""
    coh, deficit = coherent_vector(alpha, cutoff)
    vac = np.zeros(cutoff, dtype=complex)
    vac[0] = 1.0
    kets = []
    for h in range(m):
        psi = np.ones(1, dtype=complex)
        for k in range(m):
            psi = np.kron(psi, coh if k == h else vac)
        kets.append(psi)
    return kets, deficit
