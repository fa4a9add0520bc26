"""Pulse-position-modulated entanglement-assisted communication.

A message h in 1..m is sent by putting the TMSV signal into slice h; the
receiver holds the idler.  With M repetition modes and per-slice brightness
n_S (so N_S = m n_S per pulse), the decoding error is the entangled Chernoff
bound of the ranging problem and the rate is I(p) / (M m) bits per mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .ranging import RangingScenario, entangled_qcb_asymptotic, entangled_qcb_full

LN2 = math.log(2)


def mutual_info_ppm(p: float, m: int) -> float:
    """Mutual information (bits) of m-ary PPM with symmetric error probability p."""
    if m < 2:
        raise ValueError("m must be >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    # grouped as (1-p) log2(m(1-p)) + p log2(m p/(m-1)); 0 log 0 = 0
    out = 0.0
    if p < 1:
        out += (1 - p) * math.log2(m * (1 - p))
    if p > 0:
        out += p * math.log2(m * p / (m - 1))
    return out


def _scenario(m: int, M: int, n_S: float, kappa: float, N_B: float) -> RangingScenario:
    return RangingScenario(m=m, M=M, N_S=m * n_S, N_B=N_B, kappa=kappa)


def error_probability(m: int, M: int, n_S: float, kappa: float, N_B: float,
                      asymptotic: bool = False) -> float:
    sc = _scenario(m, M, n_S, kappa, N_B)
    if asymptotic:
        return entangled_qcb_asymptotic(sc)
    return entangled_qcb_full(sc, passive_signature=True)


def rate(m: int, M: int, n_S: float, kappa: float, N_B: float, asymptotic: bool = False) -> float:
    """R_{m,M} = I(P_E) / (M m), bits per channel use per mode."""
    p = error_probability(m, M, n_S, kappa, N_B, asymptotic)
    return max(0.0, mutual_info_ppm(min(p, (m - 1) / m), m)) / (M * m)


def m_guide(M: int, n_S: float, kappa: float, N_B: float) -> float:
    """Leading-order optimal slice count N_B / (2 M kappa n_S)."""
    return N_B / (2 * M * kappa * n_S)


@dataclass(frozen=True)
class CommPoint:
    n_S: float
    kappa: float
    N_B: float
    M: int
    m_star: int
    R_star: float
    C: float
    C_E: float


def optimal_rate(M: int, n_S: float, kappa: float, N_B: float, asymptotic: bool = False,
                 grid_points: int = 60) -> CommPoint:
    """Maximize the rate over the integer slice count m.

    A logarithmic grid spanning [2, 10^3 m_guide] locates the peak; the
    bracket around the best grid point is then searched by integer ternary
    search and finished with a +-1 scan.
    """
    C = classical_capacity(kappa, N_B, n_S)
    CE = ea_capacity(kappa, N_B, n_S)
    if kappa == 0 or n_S == 0:
        return CommPoint(n_S, kappa, N_B, M, 2, 0.0, C, CE)

    cache = {}

    def R(m):
        m = int(m)
        if m not in cache:
            cache[m] = rate(m, M, n_S, kappa, N_B, asymptotic)
        return cache[m]

    hi = max(3.0, 1e3 * m_guide(M, n_S, kappa, N_B)) if N_B > 0 else 1e3
    grid = np.unique(np.round(np.geomspace(2, hi, grid_points)).astype(np.int64))
    vals = [R(m) for m in grid]
    i = int(np.argmax(vals))
    if vals[i] <= 0:
        return CommPoint(n_S, kappa, N_B, M, 2, 0.0, C, CE)
    lo, up = int(grid[max(i - 1, 0)]), int(grid[min(i + 1, grid.size - 1)])
    while up - lo > 2:
        a = lo + (up - lo) // 3
        b = up - (up - lo) // 3
        if R(a) < R(b):
            lo = a
        else:
            up = b
    best = max(range(max(2, lo - 1), up + 2), key=R)
    return CommPoint(n_S, kappa, N_B, M, best, R(best), C, CE)


def g_entropy(n: float) -> float:
    """Entropy (bits) of a thermal state with mean photon number n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return float((xlogy(n + 1, n + 1) - xlogy(n, n)) / LN2)


def classical_capacity(kappa: float, N_B: float, n_S: float) -> float:
    """g(kappa n_S + N_B) - g(N_B), written without cancellation for small kappa n_S."""
    d = kappa * n_S
    if N_B == 0:
        return g_entropy(d)
    if d == 0:
        return 0.0
    nb = N_B
    val = ((nb + 1) * math.log1p(d / (nb + 1)) - nb * math.log1p(d / nb)
           + d * math.log((nb + 1 + d) / (nb + d)))
    return val / LN2


def classical_capacity_low_brightness(kappa: float, N_B: float, n_S: float) -> float:
    return kappa * n_S / (LN2 * N_B)


def ea_capacity(kappa: float, N_B: float, n_S: float) -> float:
    """Entanglement-assisted classical capacity of the thermal-loss channel (bits)."""
    n_out = kappa * n_S + N_B
    D = math.sqrt((n_S + n_out + 1) ** 2 - 4 * kappa * n_S * (n_S + 1))
    a_plus = max(0.0, (D - 1 + (n_out - n_S)) / 2)
    a_minus = max(0.0, (D - 1 - (n_out - n_S)) / 2)
    return g_entropy(n_S) + g_entropy(n_out) - g_entropy(a_plus) - g_entropy(a_minus)


def ea_capacity_low_brightness(kappa: float, N_B: float, n_S: float) -> float:
    return kappa * n_S * math.log(1 / n_S) / (LN2 * N_B)


def endpoint_checks():
    from .validation import Check

    worst = 0.0
    for m in (2, 3, 7, 50, 1000):
        worst = max(worst, abs(mutual_info_ppm(0.0, m) - math.log2(m)),
                    abs(mutual_info_ppm((m - 1) / m, m)))
    return [Check("PPM mutual information endpoints", worst, 1e-15)]
