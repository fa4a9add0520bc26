import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qranging import ranging as rg
from qranging.ranging import RangingScenario

from oracles import dd_reference

FIG2A = RangingScenario(m=2, M=10_000, N_S=1e-3, N_B=3.0, kappa=0.01)


def test_scenario_validation():
    with pytest.raises(ValueError):
        RangingScenario(1, 10, 0.1, 1.0, 0.1)
    with pytest.raises(ValueError):
        RangingScenario(2, 0, 0.1, 1.0, 0.1)
    with pytest.raises(ValueError):
        RangingScenario(2, 10, -0.1, 1.0, 0.1)
    with pytest.raises(ValueError):
        RangingScenario(2, 10, 0.1, 1.0, 1.5)
    sc = RangingScenario(3, 10, 0.1, 1.0, 0.1)
    assert sc.priors.sum() == pytest.approx(1.0)
    assert sc.with_(m=5).m == 5


def test_slice_time():
    assert rg.slice_time(0, 150.0) == 0
    assert rg.slice_time(1, rg.SPEED_OF_LIGHT / 2) == 1.0
    assert rg.slice_time(1, 150.0) == pytest.approx(1.00069e-6, rel=1e-5)


def test_classical_qcb_examples():
    assert rg.classical_qcb(FIG2A.with_(kappa=0.0)) == 0.5
    assert rg.classical_qcb(FIG2A.with_(m=5, kappa=0.0)) == 0.8
    nb = 3.0
    expo = 2 * 1e-5 / (1 + 2 * nb + 2 * math.sqrt(nb * (1 + nb)))
    assert rg.classical_qcb(FIG2A) == pytest.approx(0.5 * math.exp(-1e4 * expo), rel=1e-14)
    assert rg.classical_qcb(FIG2A) == pytest.approx(0.492872, abs=5e-7)
    sc = FIG2A.with_(N_B=100.0)
    ratio = rg.entangled_qcb_asymptotic_exponent(sc) / rg.classical_qcb_exponent(sc)
    assert ratio == pytest.approx(4.01998, abs=1e-5)


def test_classical_lower_bound_examples():
    assert rg.classical_lower_bound(FIG2A.with_(kappa=0.0)) == 0.25
    assert rg.classical_lower_bound(FIG2A.with_(m=4, kappa=0.0)) == 0.375
    sc = RangingScenario(2, 35_000, 1e-3, 3.0, 0.01)
    assert rg.classical_lower_bound(sc) == pytest.approx(0.25 * math.exp(-0.1), rel=1e-12)
    assert rg.classical_lower_bound(sc) == pytest.approx(0.226209, abs=5e-7)
    big = FIG2A.with_(N_B=1e6)
    ratio = rg.classical_lower_bound_exponent(big) / rg.classical_qcb_exponent(big, True)
    assert ratio == pytest.approx(2.0, rel=1e-6)


def test_classical_dd_examples():
    sc = RangingScenario(2, 70_000, 1e-3, 3.0, 0.01)
    assert rg.classical_dd(sc) == pytest.approx(0.5 * math.exp(-0.1), rel=1e-13)
    assert rg.classical_dd(sc) == pytest.approx(0.452419, abs=5e-7)
    hi = RangingScenario(2, 10 ** 7, 1e-3, 100.0, 0.01)
    expo = -math.log(2 * rg.classical_dd(hi)) / hi.M
    assert expo / (hi.kappa * hi.N_S / (2 * hi.N_B)) == pytest.approx(1.0, abs=0.05)


def test_classical_dd_noiseless_limit():
    x = 0.8
    for m in (2, 3, 7):
        sc = RangingScenario(m, 1, x, 0.0, 1.0)
        closed = sum((-1) ** k * math.comb(m, k) for k in range(2, m + 1)) * math.exp(-x) / m
        assert rg.classical_dd(sc) == pytest.approx(closed, abs=1e-14)


@pytest.mark.parametrize("m", [3, 5, 12, 20])
def test_classical_dd_double_and_extended_agree(m):
    sc = RangingScenario(m, 50_000, 1e-3, 1.0, 0.01)
    assert rg.classical_dd(sc, extended=False) == pytest.approx(rg.classical_dd(sc), rel=1e-8)


def test_classical_dd_refuses_double_above_20():
    with pytest.raises(ValueError):
        rg.classical_dd(RangingScenario(21, 10, 1e-3, 1.0, 0.01), extended=False)


@pytest.mark.parametrize("M", [100, 10 ** 5, 10 ** 7])
def test_classical_dd_m50_against_100_digit_reference(M):
    sc = RangingScenario(50, M, 1e-3, 20.0, 0.01)
    ref = dd_reference(50, M * 0.01 * 1e-3, 20.0)
    assert rg.classical_dd(sc) == pytest.approx(ref, rel=1e-13)


def test_dd_m2_reduction_across_parameters():
    assert rg.dd_reduction_deviation() <= 1e-12


def test_reduction_examples():
    red = rg.reduce_classical_to_single_mode(RangingScenario(2, 1, 1e-3, 1.0, 0.01))
    assert red.alpha_sq == pytest.approx(1e-5) and red.n_thermal == 0
    red = rg.reduce_classical_to_single_mode(RangingScenario(2, 10_000, 1e-3, 1.0, 0.01))
    assert red.alpha_sq == pytest.approx(0.1, rel=1e-12)
    a = RangingScenario(4, 10_000, 1e-3, 1.0, 0.01)
    b = RangingScenario(4, 100, 1e-1, 1.0, 0.01)
    assert rg.classical_dd(a) == pytest.approx(rg.classical_dd(b), rel=1e-13)


def test_three_mode_covariances():
    sc = RangingScenario(2, 1, 1e-3, 3.0, 0.01)
    a, b = rg.build_three_mode_covariances(sc)
    c = 2 * math.sqrt(0.01) * math.sqrt(1e-3 * 1.001)
    assert c == pytest.approx(0.00632772, abs=5e-9)
    assert a.cov[0, 4] == pytest.approx(c, rel=1e-14) and a.cov[1, 5] == pytest.approx(-c)
    assert b.cov[2, 4] == pytest.approx(c, rel=1e-14)
    assert a.cov[0, 0] == 7.0 and a.cov[2, 2] == 7.0
    a, _ = rg.build_three_mode_covariances(sc, passive_signature=True)
    assert a.cov[0, 0] == pytest.approx(7.00002, abs=1e-12)
    assert a.cov[2, 2] == 7.0
    for flag in (False, True):
        a, b = rg.build_three_mode_covariances(sc.with_(kappa=0.0), flag)
        np.testing.assert_array_equal(a.cov, b.cov)


def test_entangled_bounds_degenerate_kappa():
    sc = FIG2A.with_(kappa=0.0, m=3)
    assert rg.entangled_qcb_full(sc) == pytest.approx(2 / 3, abs=1e-15)
    assert rg.entangled_qcb_asymptotic(sc) == pytest.approx(2 / 3, abs=1e-15)
    assert rg.entangled_upper_bound(sc) == 1.0


def test_entangled_asymptotic_example():
    assert rg.entangled_qcb_asymptotic(FIG2A) == pytest.approx(0.5 * math.exp(-1 / 15), rel=1e-14)
    assert rg.entangled_qcb_asymptotic(FIG2A) == pytest.approx(0.467753, abs=5e-7)
    with pytest.raises(ValueError):
        rg.entangled_qcb_asymptotic(FIG2A.with_(N_B=0.0))


@pytest.mark.parametrize("N_S,lo", [(1e-4, 0.97), (1e-6, 0.995)])
def test_full_exponent_approaches_asymptote_as_brightness_falls(N_S, lo):
    sc = RangingScenario(2, 1, N_S, 1000.0, 0.01)
    ratio = rg.entangled_exponent(sc).exponent / rg.entangled_qcb_asymptotic_exponent(sc)
    assert lo <= ratio <= 1.0


def test_closed_form_exponent_ordering():
    for nb in (10.0, 1e3, 1e6):
        sc = FIG2A.with_(N_B=nb)
        e_asym = rg.entangled_qcb_asymptotic_exponent(sc)
        assert e_asym == pytest.approx(4 * rg.classical_qcb_exponent(sc, high_noise=True), rel=1e-14)
        approx_ub = -math.log(rg.entangled_upper_bound_approx(sc.with_(M=1)) / (sc.m - 1))
        assert e_asym == pytest.approx(2 * approx_ub, rel=1e-12)


def test_upper_bound_slope_high_noise():
    sc = RangingScenario(2, 1, 1e-3, 100.0, 0.01)
    Ms = np.geomspace(1e5, 1e7, 9)
    logp = [math.log(rg.entangled_upper_bound(sc.with_(M=int(M)))) for M in Ms]
    slope = -np.polyfit(Ms, logp, 1)[0]
    assert slope / (sc.kappa * sc.N_S / sc.N_B) == pytest.approx(1.0, abs=0.05)


def test_full_exponent_monotone_on_grids():
    base = RangingScenario(2, 1, 1e-2, 1.0, 0.1)
    e = lambda **kw: rg.entangled_exponent(base.with_(**kw)).exponent
    nb = [e(N_B=x) for x in (0.1, 0.5, 1, 5, 20, 100)]
    assert all(a >= b for a, b in zip(nb, nb[1:]))
    ks = [e(kappa=x) for x in (0.01, 0.05, 0.2, 0.5, 0.9)]
    assert all(a <= b for a, b in zip(ks, ks[1:]))
    ns = [e(N_S=x) for x in (1e-4, 1e-3, 1e-2, 0.1, 1.0)]
    assert all(a <= b for a, b in zip(ns, ns[1:]))


def test_gus_helstrom_examples():
    assert rg.gus_helstrom(3, 0.0) == 0.0
    assert rg.gus_helstrom(2, 1.0) == pytest.approx(0.5)
    assert rg.gus_helstrom(5, 1.0) == pytest.approx(0.8)
    assert rg.gus_helstrom(2, 0.6) == pytest.approx(0.1, abs=1e-15)
    for z in np.linspace(0, 1, 41):
        assert rg.gus_helstrom(2, z) == pytest.approx((1 - math.sqrt(1 - z * z)) / 2, abs=1e-12)
    assert rg.gus_helstrom_asymptotic(4, 1e-4) == pytest.approx(rg.gus_helstrom(4, 1e-4), rel=1e-3)


def test_noiseless_overlaps():
    assert rg.noiseless_overlaps(0.0, 100) == (1.0, 1.0)
    zE, zC = rg.noiseless_overlaps(1e-6, 10)
    assert zE == pytest.approx(zC, rel=1e-9)
    # the entangled overlap is never smaller: no noiseless advantage
    for ns in (1e-3, 0.1, 1.0):
        zE, zC = rg.noiseless_overlaps(ns, 50)
        assert zE >= zC


@given(st.integers(2, 60), st.integers(1, 10 ** 7), st.floats(1e-5, 1), st.floats(0, 100),
       st.floats(0, 1))
@settings(max_examples=40, deadline=None)
def test_report_fields_are_probabilities(m, M, N_S, N_B, kappa):
    rep = rg.compute_bounds(RangingScenario(m, M, N_S, N_B, kappa))
    for k, v in rep.as_dict().items():
        if k.startswith("p_") and not math.isnan(v):
            assert 0.0 <= v <= 1.0, k
        if k.startswith("exp_") and not math.isnan(v):
            assert v >= 0.0, k


def test_unsigned_model_rejected_when_unphysical():
    sc = RangingScenario(2, 1, 1.0, 0.5, 1.0)
    with pytest.raises(rg.UnphysicalStateError):
        rg.ranging_state(sc, 0)
    assert math.isnan(rg.compute_bounds(sc).p_e_qcb_full)
    rg.ranging_state(sc.with_(N_B=1.0), 0)  # boundary kappa N_S = N_B is a valid state
    assert not math.isnan(rg.compute_bounds(sc, passive_signature=True).p_e_qcb_full)


def test_report_marks_undefined_entries_at_zero_background():
    rep = rg.compute_bounds(FIG2A.with_(N_B=0.0))
    assert math.isnan(rep.p_e_qcb_full) and math.isnan(rep.p_e_qcb_asymptotic)
    assert rep.p_c_dd == pytest.approx(0.5 * math.exp(-0.1), rel=1e-12)
    rep = rg.compute_bounds(FIG2A.with_(N_B=0.0), passive_signature=True)
    assert not math.isnan(rep.p_e_qcb_full)
