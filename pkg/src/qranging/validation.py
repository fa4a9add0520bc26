"""Analytic-vs-oracle checks shared by the test suite and ``qranging selftest``.

Each check returns a :class:`Check` holding the measured deviation and the
tolerance it is judged against.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import distinguish as dist
from . import fock
from . import gaussian as gc

S_GRID = np.round(np.arange(1, 10) / 10, 1)


@dataclass
class Check:
    name: str
    deviation: float
    tol: float
    detail: str = ""

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.deviation) and self.deviation <= self.tol)

    def line(self) -> str:
        flag = "PASS" if self.ok else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{flag}  {self.name}: deviation {self.deviation:.3e} (tol {self.tol:.1e}){extra}"


# one-mode pairs reach <n> ~ 1 cheaply; two-mode pairs stay moderate so the
# working cutoff (and the dense fidelity SVD) stays small
_ONE_MODE = dict(cutoff=120, occ=0.6, sq=0.4, disp=0.35)
_TWO_MODE = dict(cutoff=26, occ=0.25, gain=0.15, sq=0.2, disp=0.2)
DEFICIT_TARGET = 1e-11
CUTOFF_STEP = 4
MAX_CUTOFF_2MODE = 48


def random_gaussian_pair(rng, n_modes: int, zero_mean: bool, cutoff: int | None = None,
                         deficit_target: float | None = DEFICIT_TARGET):
    """Two random states built from random circuits of Gaussian unitaries.

    Returns ``(g1, g2, f1, f2)``: covariance-picture states and their
    ``fock.SpectralState`` twins.  Unless ``deficit_target`` is None the
    shared cutoff grows until both Fock twins lose less weight than that.
    """
    par = _ONE_MODE if n_modes == 1 else _TWO_MODE
    cut = cutoff or par["cutoff"]
    c1 = _random_circuit(rng, n_modes, zero_mean)
    c2 = _random_circuit(rng, n_modes, zero_mean)
    while True:
        a, A = _build(*c1, cut)
        b, B = _build(*c2, cut)
        worst = max(A.trace_deficit, B.trace_deficit)
        if deficit_target is None or worst < deficit_target or cut >= MAX_CUTOFF_2MODE:
            return a, b, A, B
        cut += CUTOFF_STEP


def _random_circuit(rng, n, zero_mean, max_photon=1.0):
    # rejection keeps every mode at <n> <= max_photon
    while True:
        occ, ops = _draw_circuit(rng, n, zero_mean)
        gs = _gaussian_side(occ, ops)
        if all(gc.mean_photon(gs, i) <= max_photon for i in range(n)):
            return occ, ops


def _draw_circuit(rng, n, zero_mean):
    par = _ONE_MODE if n == 1 else _TWO_MODE
    occ = rng.uniform(0, par["occ"], n)
    ops = []
    if n == 2:
        ops.append(("squeezer", 1 + rng.uniform(0, par["gain"]), [0, 1]))
        ops.append(("beamsplitter", rng.uniform(), [0, 1]))
        ops.append(("phase", rng.uniform(0, 2 * np.pi), [1]))
    ops.append(("single_squeezer", (rng.uniform(0, par["sq"]), rng.uniform(0, 2 * np.pi)),
                [int(rng.integers(n))]))
    if not zero_mean:
        ops.append(("displacement", complex(*rng.normal(0, par["disp"], 2)), [n - 1]))
    return occ, ops


def _gaussian_side(occ, ops):
    gs = gc.tensor(*[gc.thermal_state(x) for x in occ])
    for kind, p, modes in ops:
        if kind == "squeezer":
            gs = gc.two_mode_squeeze(gs, *modes, p)
        elif kind == "beamsplitter":
            gs = gc.beamsplitter(gs, *modes, p)
        elif kind == "phase":
            gs = gc.phase_shift(gs, modes[0], p)
        elif kind == "single_squeezer":
            gs = gc.squeeze(gs, modes[0], *p)
        else:
            gs = gc.displace(gs, modes[0], p)
    return gs


def _build(occ, ops, cutoff):
    sp = fock.SpectralState.thermal(occ, [cutoff] * len(occ))
    for kind, p, modes in ops:
        sp = sp.apply(kind, p, modes)
    return _gaussian_side(occ, ops), sp


def oracle_ensemble(n_pairs: int = 100, seed: int = 2024, cutoff_scale: float = 1.0):
    """Compare analytic overlaps/fidelities with the Fock oracle on random pairs.

    Pairs alternate 1/2 modes and displaced/centred; fidelities are compared
    on the centred pairs.  Returns a dict of worst-case statistics.
    """
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst_q = worst_f = max_def = max_n = 0.0
    n_fid = 0
    for k in range(n_pairs):
        n = 1 + k % 2
        zero_mean = (k // 2) % 2 == 0
        base = (_ONE_MODE if n == 1 else _TWO_MODE)["cutoff"]
        cut = max(2, int(round(base * cutoff_scale)))
        # a forced-low cutoff must show up as a deficit failure, not be repaired
        target = DEFICIT_TARGET if cutoff_scale >= 1 else None
        a, b, A, B = random_gaussian_pair(rng, n, zero_mean, cut, target)
        max_def = max(max_def, A.trace_deficit, B.trace_deficit)
        max_n = max(max_n, *(gc.mean_photon(x, i) for x in (a, b) for i in range(n)))
        q = fock.overlap_curve(A, B)
        pair = dist._Pair(a, b)
        for s in S_GRID:
            worst_q = max(worst_q, abs(math.exp(pair.log_q(s)) - q(s)))
        if zero_mean:
            n_fid += 1
            worst_f = max(worst_f, abs(dist.gaussian_fidelity_zero_mean(a, b)
                                       - fock.uhlmann_fidelity_fock(A, B)))
    return dict(n_pairs=n_pairs, n_fidelity=n_fid, overlap_err=worst_q, fidelity_err=worst_f,
                trace_deficit=max_def, max_photon=max_n, seconds=time.perf_counter() - t0)


def ranging_pair_spectral(N_S: float, kappa: float, N_B: float, cutoffs=(16, 16, 5)):
    """Fock twins of the centred three-mode (return 1, return 2, idler) pair.

    The correlated return mode and the idler form a two-mode standard-form
    state, prepared as thermal x thermal followed by a two-mode squeezer.
    """
    Cp = math.sqrt(N_S * (N_S + 1))
    n_ret, n_idl, G = fock.standard_form_parameters(2 * N_B + 1, 2 * N_S + 1,
                                                    2 * math.sqrt(kappa) * Cp)
    s1 = fock.SpectralState.thermal([n_ret, N_B, n_idl], cutoffs).apply("squeezer", G, [0, 2])
    s2 = fock.SpectralState.thermal([N_B, n_ret, n_idl], cutoffs).apply("squeezer", G, [1, 2])
    return s1, s2


def three_mode_fidelity(N_S=1e-3, kappa=0.01, N_B=0.2, cutoffs=(16, 16, 5)):
    from .ranging import RangingScenario, build_three_mode_covariances

    sc = RangingScenario(m=2, M=1, N_S=N_S, N_B=N_B, kappa=kappa)
    g1, g2 = build_three_mode_covariances(sc, passive_signature=False)
    f1, f2 = ranging_pair_spectral(N_S, kappa, N_B, cutoffs)
    F_gauss = dist.gaussian_fidelity_zero_mean(g1, g2)
    F_fock = fock.uhlmann_fidelity_fock(f1, f2)
    return F_gauss, F_fock, max(f1.trace_deficit, f2.trace_deficit)


def run_selftest(n_pairs: int = 100, cutoff_scale: float = 1.0, seed: int = 2024):
    """Oracle-equivalence and structural checks; returns a list of :class:`Check`."""
    from . import comm, receivers, ranging

    checks = []
    ens = oracle_ensemble(n_pairs, seed, cutoff_scale)
    checks.append(Check("trace deficit of oracle states", ens["trace_deficit"], 1e-10,
                        f"max <n> {ens['max_photon']:.3f}"))
    checks.append(Check(f"overlap Q_s vs Fock oracle ({n_pairs} pairs)", ens["overlap_err"], 1e-6,
                        f"{ens['seconds']:.1f} s"))
    checks.append(Check(f"fidelity vs Fock oracle ({ens['n_fidelity']} pairs)",
                        ens["fidelity_err"], 1e-6))
    cuts = tuple(max(2, int(round(c * cutoff_scale))) for c in (16, 16, 5))
    Fg, Ff, dfc = three_mode_fidelity(cutoffs=cuts)
    checks.append(Check("three-mode ranging pair fidelity vs Fock oracle", abs(Fg - Ff), 1e-6,
                        f"F = {Fg:.10f}"))
    checks.append(Check("three-mode oracle trace deficit", dfc, 1e-10))

    for c in receivers.dd_agreement_checks():
        checks.append(c)
    checks.append(Check("m=2 direct-detection reduction",
                        ranging.dd_reduction_deviation(), 1e-12))
    for c in structural_checks():
        checks.append(c)
    for c in comm.endpoint_checks():
        checks.append(c)
    return checks


def structural_checks(seed: int = 11):
    from .receivers import cascade_gains

    rng = np.random.default_rng(seed)
    worst_prod = worst_def = 0.0
    for _ in range(200):
        G = 1 + 10 ** rng.uniform(-4, 1)
        m = int(rng.integers(1, 60))
        gl = np.array(cascade_gains(G, m))
        worst_prod = max(worst_prod, abs(np.prod(gl) - G) / G)
        tail = np.concatenate([np.cumprod(gl[::-1])[::-1][1:], [1.0]])
        worst_def = max(worst_def, float(np.max(np.abs((gl - 1) * tail - (G - 1) / m))))
    worst_sym = 0.0
    for _ in range(50):
        for S in (gc.two_mode_squeezer_matrix(1 + rng.exponential(2)),
                  gc.beamsplitter_matrix(rng.uniform()),
                  gc.phase_matrix(rng.uniform(0, 7)),
                  gc.single_mode_squeezer_matrix(rng.uniform(0, 2), rng.uniform(0, 7))):
            om = gc.symplectic_form(S.shape[0] // 2)
            worst_sym = max(worst_sym, float(np.max(np.abs(S @ om @ S.T - om))))
    return [Check("cascade gain product", worst_prod, 1e-12),
            Check("cascade defining equations", worst_def, 1e-12),
            Check("symplectic matrices preserve Omega", worst_sym, 1e-10)]
