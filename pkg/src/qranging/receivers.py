"""Photon-counting receivers.

The m-OPA receiver combines the idler with phase-shifted returns,

    a_I' = sqrt(G) a_I + sqrt((G-1)/m) sum_l exp(i theta_l) a_l^dag,

realized as a cascade of two-mode squeezers with gains ``cascade_gains``.
Counting a_I' over M copies gives a negative-binomial count whose mean
depends on the phase of the slice holding the target.  For m = 2 with
phases (0, pi) a threshold on the count is the maximum-likelihood decision.

Classical direct detection is simulated after concentrating the signal of
each slice into one mode.

Monte Carlo runs are split into fixed-size chunks, each with its own
``SeedSequence(seed, spawn_key=(chunk,))`` stream, so results depend only on
the seed and never on how many workers process the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc
from scipy.stats import nbinom

from . import gaussian as gc
from .ranging import RangingScenario, classical_dd, ranging_state

CHUNK = 1 << 16
WORKERS_ENV = "QRANGING_WORKERS"


def n_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------- config

def default_gain(sc: RangingScenario) -> float:
    """G = 1 + m sqrt(N_S) / N_B."""
    if sc.N_B == 0:
        raise ValueError("default gain diverges at N_B = 0")
    return 1.0 + sc.m * math.sqrt(sc.N_S) / sc.N_B


def cascade_gains(G: float, m: int) -> list:
    """Gains G_1..G_m with (G_l - 1) prod_{k>l} G_k = (G-1)/m, by backward substitution."""
    if G < 1:
        raise ValueError(f"gain must be >= 1, got {G}")
    if m < 1:
        raise ValueError("m must be >= 1")
    step = (G - 1) / m
    gains = [0.0] * m
    tail = 1.0
    for ell in range(m - 1, -1, -1):
        gains[ell] = 1.0 + step / tail
        tail *= gains[ell]
    return gains


@dataclass(frozen=True)
class OpaConfig:
    """Gain, cascade gains and phases of an m-OPA receiver."""

    m: int
    G: float
    cascade_gains: tuple = field(default=None)
    phases: tuple = field(default=None)

    def __post_init__(self):
        if self.G < 1:
            raise ValueError(f"gain must be >= 1, got {self.G}")
        gains = self.cascade_gains or tuple(cascade_gains(self.G, self.m))
        phases = self.phases
        if phases is None:
            phases = tuple(2 * math.pi * ell / self.m for ell in range(self.m))
        if len(gains) != self.m or len(phases) != self.m:
            raise ValueError("need one gain and one phase per slice")
        object.__setattr__(self, "cascade_gains", tuple(float(g) for g in gains))
        object.__setattr__(self, "phases", tuple(float(p) for p in phases))

    @classmethod
    def for_scenario(cls, sc: RangingScenario, G: float | None = None, phases=None):
        return cls(sc.m, default_gain(sc) if G is None else G, None, phases)


@dataclass(frozen=True)
class CountModel:
    """Total count over M copies: negative binomial with per-copy mean ``n_bar``."""

    M: int
    n_bar: float

    def __post_init__(self):
        if self.n_bar < 0:
            raise ValueError("n_bar must be >= 0")

    @property
    def sigma_bar(self) -> float:
        return math.sqrt(self.n_bar * (self.n_bar + 1))

    def _dist(self):
        return nbinom(self.M, 1.0 / (1.0 + self.n_bar))


# ---------------------------------------------------------- statistics

def conditional_mean_photon(sc: RangingScenario, G: float, theta_h: float) -> float:
    """Per-copy mean count of the OPA output when the target slice has phase theta_h."""
    return (G * sc.N_S + (G - 1) * (sc.N_B + 1)
            + 2 * math.sqrt(G * (G - 1) * sc.kappa / sc.m) * math.cos(theta_h) * sc.Cp)


def opa_mean_photon_pipeline(sc: RangingScenario, config: OpaConfig, h: int) -> float:
    """Same quantity from the covariance picture: phase shifts, cascade, then <n> of the idler.

    A phase -theta_l on return l puts exp(i theta_l) on a_l^dag in the output.
    """
    state = ranging_state(sc, h, passive_signature=False)
    idler = sc.m
    for ell, (g, th) in enumerate(zip(config.cascade_gains, config.phases)):
        state = gc.phase_shift(state, ell, -th)
        state = gc.two_mode_squeeze(state, idler, ell, g)
    return gc.mean_photon(state, idler)


def count_pmf(n, model: CountModel):
    """P(n) = C(n+M-1, n) q^n (1-q)^M with q = n_bar / (1 + n_bar), via log-space evaluation."""
    return np.exp(count_logpmf(n, model))


def count_logpmf(n, model: CountModel):
    return model._dist().logpmf(n)


def ml_threshold(M: int, n0: float, n1: float) -> int:
    """Smallest count n* at which hypothesis 0 (mean n0 > n1) is at least as likely."""
    if not n0 > n1:
        raise ValueError("expects n0 > n1")
    if n1 == 0:
        return 1
    num = M * (math.log1p(n0) - math.log1p(n1))
    den = math.log(n0 / (1 + n0)) - math.log(n1 / (1 + n1))
    n_star = math.ceil(num / den)
    # guard the floating-point boundary with the exact log-likelihood ratio
    m0, m1 = CountModel(M, n0), CountModel(M, n1)
    while n_star > 0 and count_logpmf(n_star - 1, m0) >= count_logpmf(n_star - 1, m1):
        n_star -= 1
    while count_logpmf(n_star, m0) < count_logpmf(n_star, m1):
        n_star += 1
    return n_star


def threshold_error(M: int, n0: float, n1: float) -> float:
    """Equal-prior ML error between negative binomials of per-copy means n0 and n1.

    Ties go to the larger-mean hypothesis.
    """
    if n0 == n1:
        return 0.5
    if n0 < n1:
        n0, n1 = n1, n0
    n_star = ml_threshold(M, n0, n1)
    d0, d1 = CountModel(M, n0)._dist(), CountModel(M, n1)._dist()
    return 0.5 * (float(d0.cdf(n_star - 1)) + float(d1.sf(n_star - 1)))


def _require_m2(sc: RangingScenario):
    if sc.m != 2:
        raise NotImplementedError("not implemented: adaptive receiver (only m = 2 has a decision rule)")
    if sc.N_B == 0:
        raise ValueError("the OPA receiver needs N_B > 0")


def opa_means_m2(sc: RangingScenario, G: float | None = None):
    _require_m2(sc)
    G = default_gain(sc) if G is None else G
    return conditional_mean_photon(sc, G, 0.0), conditional_mean_photon(sc, G, math.pi)


def opa_error_exact_m2(sc: RangingScenario, G: float | None = None) -> float:
    """Exact error of the m = 2 OPA receiver with phases (0, pi) and the ML threshold."""
    n0, n1 = opa_means_m2(sc, G)
    return threshold_error(sc.M, n0, n1)


def opa_error_gaussian_m2(sc: RangingScenario, G: float | None = None) -> float:
    """Gaussian approximation 1/2 erfc(sqrt(M/2) (N0 - N1) / (sigma0 + sigma1))."""
    n0, n1 = opa_means_m2(sc, G)
    s0, s1 = CountModel(sc.M, n0).sigma_bar, CountModel(sc.M, n1).sigma_bar
    if n0 == n1:
        return 0.5
    return 0.5 * float(erfc(math.sqrt(sc.M / 2) * (n0 - n1) / (s0 + s1)))


# ---------------------------------------------------------- Monte Carlo

@dataclass(frozen=True)
class MCResult:
    error: float
    std_error: float
    trials: int

    def __iter__(self):
        return iter((self.error, self.std_error))


def _chunked(trials: int, seed: int, job, workers: int | None = None) -> MCResult:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    sizes = [CHUNK] * (trials // CHUNK)
    if trials % CHUNK:
        sizes.append(trials % CHUNK)

    def run(i):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i,))))
        return job(rng, sizes[i])

    workers = workers or n_workers()
    if workers == 1:
        errors = [run(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(workers) as ex:
            errors = list(ex.map(run, range(len(sizes))))
    p = sum(errors) / trials
    return MCResult(p, math.sqrt(p * (1 - p) / trials), trials)


def dd_monte_carlo(sc: RangingScenario, trials: int, seed: int, residual: bool = False,
                   workers: int | None = None) -> MCResult:
    """Monte Carlo error of classical direct detection with uniform random tie-breaking.

    After concentration each slice has one mode of interest.  The target
    slice holds a displaced thermal state, sampled through its
    P-representation (beta complex Gaussian around sqrt(M kappa N_S) with
    per-quadrature variance N_B/2, then Poisson(|beta|^2)); the others hold
    thermal light, i.e. geometric counts.  With ``residual=True`` the other
    M-1 (pure background) modes of each slice are counted too.
    """
    m, M, nb = sc.m, sc.M, sc.N_B
    amp = math.sqrt(M * sc.kappa * sc.N_S)
    n_bg = M if residual else 1

    def job(rng, n):
        h = rng.integers(m, size=n)
        counts = rng.negative_binomial(n_bg, 1 / (1 + nb), size=(n, m)).astype(float)
        sd = math.sqrt(nb / 2)
        beta = amp + rng.normal(0, sd, n) + 1j * rng.normal(0, sd, n)
        sig = rng.poisson(np.abs(beta) ** 2)
        if residual and M > 1:
            sig = sig + rng.negative_binomial(M - 1, 1 / (1 + nb), size=n)
        counts[np.arange(n), h] = sig
        # uniform jitter in [0, 1) breaks ties uniformly without reordering distinct counts
        guess = np.argmax(counts + rng.random((n, m)), axis=1)
        return int(np.count_nonzero(guess != h))

    return _chunked(trials, seed, job, workers)


def opa_monte_carlo_m2(sc: RangingScenario, G: float | None, trials: int, seed: int,
                       workers: int | None = None) -> MCResult:
    """Monte Carlo of the m = 2 OPA receiver with the exact ML threshold."""
    n0, n1 = opa_means_m2(sc, G)
    if n0 == n1:
        n_star = None
    else:
        n_star = ml_threshold(sc.M, max(n0, n1), min(n0, n1))
    means = np.array([n0, n1])
    hi = int(np.argmax(means))

    def job(rng, n):
        h = rng.integers(2, size=n)
        counts = rng.negative_binomial(sc.M, 1 / (1 + means[h]))
        if n_star is None:
            guess = rng.integers(2, size=n)
        else:
            guess = np.where(counts >= n_star, hi, 1 - hi)
        return int(np.count_nonzero(guess != h))

    return _chunked(trials, seed, job, workers)


def dd_agreement_checks(trials: int = 10 ** 6, seed: int = 7):
    """Monte Carlo vs closed-form direct detection at error levels in [0.1, 0.4]."""
    from .validation import Check

    out = []
    for m, M in ((2, 100_000), (3, 100_000)):
        sc = RangingScenario(m, M, 1e-3, 0.3, 0.01)
        exact = classical_dd(sc)
        mc = dd_monte_carlo(sc, trials, seed)
        z = abs(mc.error - exact) / mc.std_error
        out.append(Check(f"direct detection Monte Carlo, m={m}", z, 3.0,
                         f"exact {exact:.6f}, MC {mc.error:.6f} +- {mc.std_error:.1e} (in std errors)"))
    return out
