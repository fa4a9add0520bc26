"""Closed-form distinguishability measures between Gaussian states.

``gaussian_overlap`` evaluates Q_s = Tr[rho1^s rho2^(1-s)] through the
Williamson decompositions of both states; ``chernoff_exponent`` maximizes
-ln Q_s over s.  ``gaussian_fidelity_zero_mean`` is the Uhlmann fidelity
for centred states.  All formulas use the vacuum = identity convention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur, sqrtm

from .gaussian import GaussianState, _quad_indices, symplectic_form

S_LO = 1e-6
S_HI = 1.0 - 1e-6
S_TOL = 1e-6
LOGQ_TOL = 1e-10


@dataclass(frozen=True)
class OverlapResult:
    s_star: float
    Q_star: float
    exponent: float


def williamson(cov: np.ndarray):
    """Williamson decomposition cov = S diag(nu_k I2) S^T.

    Returns ``(nu, S)`` with ``nu`` per mode (clipped at 1) and ``S``
    symplectic with respect to the interleaved form.
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    omega = symplectic_form(n)
    w, U = np.linalg.eigh(cov)
    if w[0] <= 0:
        raise ValueError("covariance matrix is not positive definite")
    v_half = (U * np.sqrt(w)) @ U.T
    v_mhalf = (U / np.sqrt(w)) @ U.T
    A = v_mhalf @ omega @ v_mhalf
    A = 0.5 * (A - A.T)
    T, K = schur(A, output="real")
    t = np.empty(n)
    for k in range(n):
        i = 2 * k
        if T[i, i + 1] < 0:
            K[:, [i, i + 1]] = K[:, [i + 1, i]]
        t[k] = abs(T[i, i + 1])
    nu = 1.0 / t
    S = v_half @ K @ np.diag(np.repeat(np.sqrt(t), 2))
    nu = np.maximum(nu, 1.0)
    return nu, S


def _pow_pair(x, p):
    """((x+1)^p + (x-1)^p, (x+1)^p - (x-1)^p) in log-stable form.

    Returns ``(log_diff, ratio_sum_over_diff)``.  Pure modes (x = 1) use the
    p -> 0+ convention (x-1)^p = 0.
    """
    x = np.asarray(x, dtype=float)
    log_diff = np.empty_like(x)
    lam = np.empty_like(x)
    pure = x <= 1.0 + 1e-14
    log_diff[pure] = p * np.log(2.0)
    lam[pure] = 1.0
    xm = x[~pure]
    if xm.size:
        if p == 0.0:
            log_diff[~pure] = -np.inf
            lam[~pure] = np.inf
        else:
            # (x+1)^p - (x-1)^p = (x-1)^p * expm1(p log1p(2/(x-1)))
            e = np.expm1(p * np.log1p(2.0 / (xm - 1.0)))
            log_diff[~pure] = p * np.log(xm - 1.0) + np.log(e)
            lam[~pure] = (e + 2.0) / e
    return log_diff, lam


def _log_overlap_interior(d1, d2, s):
    nu1, S1, delta = d1
    nu2, S2 = d2
    n = nu1.size
    ld1, lam1 = _pow_pair(nu1, s)
    ld2, lam2 = _pow_pair(nu2, 1.0 - s)
    # log G_p(x) = p ln 2 - ln[(x+1)^p - (x-1)^p]
    log_g = s * np.log(2) - ld1 + (1 - s) * np.log(2) - ld2
    V1 = (S1 * np.repeat(lam1, 2)) @ S1.T
    V2 = (S2 * np.repeat(lam2, 2)) @ S2.T
    W = V1 + V2
    sign, logdet = np.linalg.slogdet(W)
    quad = 0.0 if delta is None else float(delta @ np.linalg.solve(W, delta))
    return n * np.log(2) + float(np.sum(log_g)) - 0.5 * logdet - 0.5 * quad


def _log_support_overlap(cov1, mean1, nu1, S1, cov2, mean2):
    """ln Tr[P1 rho2] with P1 the support projector of rho1 (the s -> 0+ limit)."""
    pure = np.nonzero(nu1 <= 1.0 + 1e-9)[0]
    if pure.size == 0:
        return 0.0
    Sinv = np.linalg.inv(S1)
    V = Sinv @ cov2 @ Sinv.T
    d = Sinv @ (mean2 - mean1)
    idx = _quad_indices(pure)
    Vr = V[np.ix_(idx, idx)] + np.eye(idx.size)
    dr = d[idx]
    _, logdet = np.linalg.slogdet(Vr)
    return pure.size * np.log(2) - 0.5 * logdet - 0.5 * float(dr @ np.linalg.solve(Vr, dr))


class _Pair:
    """Caches both Williamson decompositions for repeated overlap evaluation."""

    def __init__(self, state1: GaussianState, state2: GaussianState):
        if state1.n_modes != state2.n_modes:
            raise ValueError(
                f"mode mismatch: {state1.n_modes} vs {state2.n_modes}"
            )
        self.s1, self.s2 = state1, state2
        nu1, S1 = williamson(state1.cov)
        nu2, S2 = williamson(state2.cov)
        delta = state1.mean - state2.mean
        self.d1 = (nu1, S1, None if not np.any(delta) else delta)
        self.d2 = (nu2, S2)
        self._ends = {}

    def log_q(self, s: float) -> float:
        if s <= 0.0:
            return self._end(0)
        if s >= 1.0:
            return self._end(1)
        return _log_overlap_interior(self.d1, self.d2, s)

    def _end(self, which):
        if which not in self._ends:
            a, b = (self.s1, self.s2) if which == 0 else (self.s2, self.s1)
            nu, S = self.d1[:2] if which == 0 else self.d2
            self._ends[which] = _log_support_overlap(a.cov, a.mean, nu, S, b.cov, b.mean)
        return self._ends[which]


def gaussian_overlap(state1: GaussianState, state2: GaussianState, s: float) -> float:
    """Q_s = Tr[rho1^s rho2^(1-s)] for 0 <= s <= 1 (endpoints as limits)."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    return float(np.exp(_Pair(state1, state2).log_q(s)))


def log_gaussian_overlap(state1: GaussianState, state2: GaussianState, s: float) -> float:
    return _Pair(state1, state2).log_q(s)


def are_permutation_related(state1: GaussianState, state2: GaussianState, tol=1e-12) -> bool:
    """True if some mode permutation maps state1 exactly onto state2."""
    n = state1.n_modes
    if n != state2.n_modes or n > 6:
        return False
    scale = max(1.0, float(np.max(np.abs(state1.cov))))
    for perm in itertools.permutations(range(n)):
        idx = _quad_indices(perm)
        if (np.max(np.abs(state1.cov[np.ix_(idx, idx)] - state2.cov)) <= tol * scale
                and np.max(np.abs(state1.mean[idx] - state2.mean), initial=0.0) <= tol * scale):
            return True
    return False


def _identical(state1: GaussianState, state2: GaussianState) -> bool:
    return np.array_equal(state1.cov, state2.cov) and np.array_equal(state1.mean, state2.mean)


def chernoff_exponent(state1: GaussianState, state2: GaussianState,
                      symmetric: bool | None = None) -> OverlapResult:
    """Quantum Chernoff exponent max_s -ln Q_s.

    ``ln Q_s`` is convex in s, so a ternary search on the interior is
    combined with the two endpoint limits.  Pairs related by a mode
    permutation (detected automatically unless ``symmetric`` is given) have
    Q_s symmetric about 1/2 and are evaluated there directly.
    """
    if _identical(state1, state2):
        return OverlapResult(0.5, 1.0, 0.0)
    pair = _Pair(state1, state2)
    if symmetric is None:
        symmetric = are_permutation_related(state1, state2)
    if symmetric:
        lq = pair.log_q(0.5)
        return OverlapResult(0.5, float(np.exp(lq)), max(0.0, -lq))

    lo, hi = S_LO, S_HI
    f_lo, f_hi = pair.log_q(lo), pair.log_q(hi)
    while hi - lo > S_TOL:
        a = lo + (hi - lo) / 3
        b = hi - (hi - lo) / 3
        fa, fb = pair.log_q(a), pair.log_q(b)
        if abs(fa - fb) <= LOGQ_TOL * 1e-3:
            lo, hi = a, b
        elif fa < fb:
            hi = b
        else:
            lo = a
    s_mid = 0.5 * (lo + hi)
    candidates = [(pair.log_q(s_mid), s_mid), (f_lo, S_LO), (f_hi, S_HI),
                  (pair.log_q(0.0), 0.0), (pair.log_q(1.0), 1.0)]
    lq, s_star = min(candidates, key=lambda c: c[0])
    return OverlapResult(float(s_star), float(np.exp(lq)), max(0.0, -lq))


def multihypothesis_exponent(states, symmetric: bool = False) -> float:
    """Asymptotic exponent of m-ary discrimination: the worst pairwise exponent.

    With ``symmetric=True`` every pair is assumed to be related by a mode
    permutation, so only the (0, 1) pair is evaluated.
    """
    states = list(states)
    if len(states) < 2:
        raise ValueError("need at least two hypotheses")
    if symmetric:
        return chernoff_exponent(states[0], states[1], symmetric=True).exponent
    return min(chernoff_exponent(a, b).exponent
               for a, b in itertools.combinations(states, 2))


def gaussian_fidelity_zero_mean(state1: GaussianState, state2: GaussianState) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)) of centred states.

    Uses the auxiliary-matrix formula for mixed Gaussian states, written for
    covariances with vacuum = I/2 (the inputs are rescaled internally).
    """
    if not (state1.is_zero_mean() and state2.is_zero_mean()):
        raise NotImplementedError("fidelity is only implemented for zero-mean states")
    if state1.n_modes != state2.n_modes:
        raise ValueError(f"mode mismatch: {state1.n_modes} vs {state2.n_modes}")
    if _identical(state1, state2):
        return 1.0
    n = state1.n_modes
    V1, V2 = state1.cov / 2, state2.cov / 2
    omega = symplectic_form(n)
    Vsum = V1 + V2
    Vaux = omega.T @ np.linalg.solve(Vsum, omega / 4 + V2 @ omega @ V1)
    X = Vaux @ omega
    A = np.eye(2 * n) + np.linalg.matrix_power(np.linalg.inv(X), 2) / 4
    lam = np.linalg.eigvals(A)
    # A has a real non-negative spectrum; round-off can push pure-state zeros negative
    root = np.sqrt(np.clip(lam.real, 0.0, None))
    _, logdet_aux = np.linalg.slogdet(Vaux)
    log_ftot4 = 2 * n * np.log(2) + float(np.sum(np.log1p(root))) + logdet_aux
    _, logdet_sum = np.linalg.slogdet(Vsum)
    # F <= 1; nearly identical states can round to 1 + O(1e-13)
    return min(1.0, float(np.exp(0.25 * log_ftot4 - 0.25 * logdet_sum)))


def _fidelity_via_sqrtm(state1, state2):
    """Same formula with an explicit matrix square root (debug cross-check)."""
    n = state1.n_modes
    V1, V2 = state1.cov / 2, state2.cov / 2
    omega = symplectic_form(n)
    Vaux = omega.T @ np.linalg.inv(V1 + V2) @ (omega / 4 + V2 @ omega @ V1)
    X = Vaux @ omega
    A = np.eye(2 * n) + np.linalg.matrix_power(np.linalg.inv(X), 2) / 4
    ftot4 = np.linalg.det(2 * (sqrtm(A) + np.eye(2 * n)) @ Vaux).real
    return float((ftot4 / np.linalg.det(V1 + V2)) ** 0.25)
