"""Ranging scenarios and closed-form error-probability bounds.

A :class:`RangingScenario` fixes the number of range slices ``m``, the number
of modes per pulse ``M``, the signal brightness ``N_S``, the background
``N_B`` and the reflectivity ``kappa``.  Every function here is a pure
function of a scenario.

Classical strategies (coherent-state inputs) and entangled strategies
(TMSV signal with a stored idler) are compared through

* Chernoff-type bounds ``(m-1)/m * exp(-M * C)``,
* a classical lower bound and the direct-detection error,
* a fidelity-based upper bound for the entangled strategy,
* closed forms for the noiseless, pure-state (GUS) case.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import mpmath
import numpy as np

from . import distinguish as dist
from .gaussian import GaussianState, UnphysicalStateError, _quad_indices

SPEED_OF_LIGHT = 299_792_458.0
DD_DOUBLE_MAX_M = 20
DD_MIN_DIGITS = 50


@dataclass(frozen=True)
class RangingScenario:
    """Parameters of one ranging problem; priors are uniform.

    ``N_S = 0`` and ``kappa = 0`` are accepted as degenerate limits.
    """

    m: int
    M: int
    N_S: float
    N_B: float
    kappa: float
    slice_width: float | None = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be an integer >= 1, got {self.M}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "M", int(self.M))
        for name in ("N_S", "N_B"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)
        k = float(self.kappa)
        if not 0.0 <= k <= 1.0:
            raise ValueError(f"kappa must lie in [0, 1], got {k}")
        object.__setattr__(self, "kappa", k)
        if self.slice_width is not None and not self.slice_width > 0:
            raise ValueError("slice_width must be positive")

    @property
    def priors(self) -> np.ndarray:
        return np.full(self.m, 1.0 / self.m)

    @property
    def Cp(self) -> float:
        return math.sqrt(self.N_S * (self.N_S + 1))

    def with_(self, **kw) -> "RangingScenario":
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(kw)
        return RangingScenario(**d)


def slice_time(ell: int, delta: float) -> float:
    """Round-trip arrival time 2 ell delta / c of slice ``ell`` (seconds)."""
    return 2.0 * ell * delta / SPEED_OF_LIGHT


def _random_guess(sc: RangingScenario) -> float:
    return (sc.m - 1) / sc.m


# ------------------------------------------------------------ classical

def classical_qcb_exponent(sc: RangingScenario, high_noise: bool = False) -> float:
    """Per-mode exponent of the classical Chernoff bound.

    ``high_noise=True`` gives the N_B >> 1 form kappa N_S / (2 N_B).
    """
    if high_noise:
        if sc.N_B == 0:
            raise ValueError("the high-noise form needs N_B > 0")
        return sc.kappa * sc.N_S / (2 * sc.N_B)
    nb = sc.N_B
    return 2 * sc.kappa * sc.N_S / (1 + 2 * nb + 2 * math.sqrt(nb * (1 + nb)))


def classical_qcb(sc: RangingScenario, high_noise: bool = False) -> float:
    return _random_guess(sc) * math.exp(-sc.M * classical_qcb_exponent(sc, high_noise))


def classical_lower_bound_exponent(sc: RangingScenario) -> float:
    return 2 * sc.N_S * sc.kappa / (1 + 2 * sc.N_B)


def classical_lower_bound(sc: RangingScenario) -> float:
    return (sc.m - 1) / (2 * sc.m) * math.exp(-sc.M * classical_lower_bound_exponent(sc))


def classical_dd(sc: RangingScenario, extended: bool = True, digits: int | None = None) -> float:
    """Error probability of coherent-state direct detection.

    The alternating binomial sum cancels catastrophically for large ``m``;
    it is evaluated with mpmath at ``digits`` significant digits (by default
    50 plus the number of digits of the largest binomial coefficient).
    ``extended=False`` uses doubles and is refused for m > 20.
    """
    m = sc.m
    x = sc.kappa * sc.M * sc.N_S
    nb = sc.N_B
    if not extended:
        if m > DD_DOUBLE_MAX_M:
            raise ValueError(f"double precision is refused above m = {DD_DOUBLE_MAX_M}")
        v = nb / (nb + 1)
        total = 0.0
        for k in range(2, m + 1):
            total += (-1) ** k * math.comb(m, k) * math.exp(
                -(1 - v) * (1 - v ** (k - 1)) * x / (1 - v ** k))
        return total / m
    if digits is None:
        digits = DD_MIN_DIGITS + len(str(math.comb(m, m // 2)))
    with mpmath.workdps(max(digits, DD_MIN_DIGITS)):
        nb_ = mpmath.mpf(nb)
        x_ = mpmath.mpf(sc.kappa) * sc.M * mpmath.mpf(sc.N_S)
        v = nb_ / (nb_ + 1)
        total = mpmath.mpf(0)
        for k in range(2, m + 1):
            e = (1 - v) * (1 - v ** (k - 1)) * x_ / (1 - v ** k)
            total += (-1) ** k * math.comb(m, k) * mpmath.exp(-e)
        return float(total / m)


def classical_dd_m2(sc: RangingScenario) -> float:
    """The m = 2 direct-detection error in closed form."""
    return 0.5 * math.exp(-sc.M * sc.kappa * sc.N_S / (2 * sc.N_B + 1))


def dd_reduction_deviation(seed: int = 5, n: int = 200) -> float:
    """Worst |classical_dd - classical_dd_m2| over random m = 2 scenarios."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        sc = RangingScenario(2, int(10 ** rng.uniform(0, 7)), 10 ** rng.uniform(-4, 0),
                             10 ** rng.uniform(-3, 3), rng.uniform(0, 1))
        worst = max(worst, abs(classical_dd(sc) - classical_dd_m2(sc)))
    return worst


@dataclass(frozen=True)
class ReducedClassical:
    """Concentrated single-mode description of the classical problem.

    Per slice, one mode carries the displaced thermal state with
    ``alpha_sq`` photons of signal and ``n_thermal`` further modes are pure
    background; every slice sees the same background occupation ``N_B``.
    """

    alpha_sq: float
    n_thermal: int
    N_B: float


def reduce_classical_to_single_mode(sc: RangingScenario) -> ReducedClassical:
    """Passive-linear-optics concentration of M coherent modes into one."""
    return ReducedClassical(sc.M * sc.kappa * sc.N_S, sc.M - 1, sc.N_B)


# ------------------------------------------------------------ entangled

def ranging_state(sc: RangingScenario, h: int, passive_signature: bool = False) -> GaussianState:
    """Single-copy return/idler state for hypothesis ``h`` (0-based).

    Modes 0..m-1 are the returns of the m slices and mode m is the idler.
    The return of slice ``h`` is correlated with the idler through
    2 sqrt(kappa) C_p Z.  With ``passive_signature`` its occupation is
    N_B + kappa N_S (the exact thermal-loss output); without it every return
    carries N_B photons, which drops the brightness signature and is only
    physical for kappa N_S <= N_B.
    """
    if not 0 <= h < sc.m:
        raise IndexError(f"hypothesis {h} out of range for m = {sc.m}")
    if not passive_signature and sc.kappa * sc.N_S > sc.N_B:
        # an N_B-photon return can hold at most N_B worth of idler correlation;
        # rejected exactly rather than through the physicality tolerance
        raise UnphysicalStateError("kappa N_S > N_B needs passive_signature=True")
    n = sc.m + 1
    cov = np.eye(2 * n) * (2 * sc.N_B + 1)
    idl = _quad_indices([sc.m])
    cov[np.ix_(idl, idl)] = (2 * sc.N_S + 1) * np.eye(2)
    ret = _quad_indices([h])
    if passive_signature:
        cov[np.ix_(ret, ret)] = (2 * (sc.N_B + sc.kappa * sc.N_S) + 1) * np.eye(2)
    c = 2 * math.sqrt(sc.kappa) * sc.Cp * np.diag([1.0, -1.0])
    cov[np.ix_(ret, idl)] = c
    cov[np.ix_(idl, ret)] = c
    return GaussianState(None, cov)


def build_three_mode_covariances(sc: RangingScenario, passive_signature: bool = False):
    """The pair (target in slice 1, target in slice 2) on modes (return 1, return 2, idler).

    By symmetry the m-ary exponent equals the exponent of this pair for any m.
    """
    two = sc.with_(m=2)
    return ranging_state(two, 0, passive_signature), ranging_state(two, 1, passive_signature)


def entangled_exponent(sc: RangingScenario, passive_signature: bool = False) -> dist.OverlapResult:
    s1, s2 = build_three_mode_covariances(sc, passive_signature)
    # the two states differ by a swap of the returns, so s* = 1/2
    return dist.chernoff_exponent(s1, s2, symmetric=True)


def entangled_qcb_full(sc: RangingScenario, passive_signature: bool = False) -> float:
    C = entangled_exponent(sc, passive_signature).exponent
    return _random_guess(sc) * math.exp(-sc.M * C)


def entangled_qcb_asymptotic_exponent(sc: RangingScenario) -> float:
    if sc.N_B == 0:
        raise ValueError("the asymptotic entangled bound needs N_B > 0")
    return 2 * sc.kappa * sc.N_S / sc.N_B


def entangled_qcb_asymptotic(sc: RangingScenario) -> float:
    return _random_guess(sc) * math.exp(-sc.M * entangled_qcb_asymptotic_exponent(sc))


def entangled_fidelity(sc: RangingScenario, passive_signature: bool = False) -> float:
    s1, s2 = build_three_mode_covariances(sc, passive_signature)
    return dist.gaussian_fidelity_zero_mean(s1, s2)


def entangled_upper_bound(sc: RangingScenario, passive_signature: bool = False) -> float:
    """(m-1) F^M, clamped to 1."""
    F = entangled_fidelity(sc, passive_signature)
    return min(1.0, (sc.m - 1) * math.exp(sc.M * math.log(F)))


def entangled_upper_bound_approx(sc: RangingScenario) -> float:
    """(m-1) exp(-M kappa N_S / N_B), clamped to 1."""
    if sc.N_B == 0:
        raise ValueError("the approximate upper bound needs N_B > 0")
    return min(1.0, (sc.m - 1) * math.exp(-sc.M * sc.kappa * sc.N_S / sc.N_B))


# ------------------------------------------------------------ noiseless

def gus_helstrom(m: int, zeta: float) -> float:
    """Helstrom error for m equiprobable pure states with real pairwise overlap zeta."""
    if m < 2:
        raise ValueError("m must be >= 2")
    if not 0.0 <= zeta <= 1.0:
        raise ValueError(f"zeta must lie in [0, 1], got {zeta}")
    return (m - 1) / m ** 2 * (math.sqrt(1 + (m - 1) * zeta) - math.sqrt(1 - zeta)) ** 2


def gus_helstrom_asymptotic(m: int, zeta: float) -> float:
    """Leading term (m-1) zeta^2 / 4 for m zeta << 1."""
    return 0.25 * (m - 1) * zeta ** 2


def noiseless_overlaps(N_S: float, M: int):
    """Pairwise overlaps (entangled, classical) of the noiseless lossless problem."""
    if N_S < 0 or M < 1:
        raise ValueError("need N_S >= 0 and M >= 1")
    return math.exp(-M * math.log1p(N_S)), math.exp(-M * N_S)


# --------------------------------------------------------------- report

@dataclass(frozen=True)
class BoundsReport:
    """All bounds for one scenario.  Exponents are per mode; NaN marks undefined entries."""

    p_c_qcb: float
    p_c_lb: float
    p_c_dd: float
    p_e_qcb_full: float
    p_e_qcb_asymptotic: float
    p_e_ub: float
    exp_c_qcb: float
    exp_c_lb: float
    exp_e_qcb_full: float
    exp_e_qcb_asymptotic: float
    exp_e_ub: float

    def as_dict(self) -> dict:
        return asdict(self)


def compute_bounds(sc: RangingScenario, passive_signature: bool = False) -> BoundsReport:
    nan = float("nan")
    try:
        C = entangled_exponent(sc, passive_signature).exponent
        F = entangled_fidelity(sc, passive_signature)
        p_full = _random_guess(sc) * math.exp(-sc.M * C)
        p_ub = min(1.0, (sc.m - 1) * math.exp(sc.M * math.log(F)))
        e_ub = -math.log(F)
    except UnphysicalStateError:
        # without the brightness term kappa N_S > N_B violates the uncertainty principle
        C = p_full = p_ub = e_ub = nan
    if sc.N_B > 0:
        e_asym = entangled_qcb_asymptotic_exponent(sc)
        p_asym = _random_guess(sc) * math.exp(-sc.M * e_asym)
    else:
        e_asym = p_asym = nan
    return BoundsReport(
        p_c_qcb=classical_qcb(sc),
        p_c_lb=classical_lower_bound(sc),
        p_c_dd=classical_dd(sc),
        p_e_qcb_full=p_full,
        p_e_qcb_asymptotic=p_asym,
        p_e_ub=p_ub,
        exp_c_qcb=classical_qcb_exponent(sc),
        exp_c_lb=classical_lower_bound_exponent(sc),
        exp_e_qcb_full=C,
        exp_e_qcb_asymptotic=e_asym,
        exp_e_ub=e_ub,
    )
