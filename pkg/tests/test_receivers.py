import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qranging import gaussian as gc
from qranging import receivers as rx
from qranging.ranging import RangingScenario, classical_dd

FIG2A = RangingScenario(m=2, M=100_000, N_S=1e-3, N_B=3.0, kappa=0.01)


def test_default_gain_examples():
    assert rx.default_gain(RangingScenario(2, 1, 1e-4, 1.0, 0.1)) == pytest.approx(1.02, abs=1e-15)
    assert rx.default_gain(RangingScenario(2, 1, 0.0, 1.0, 0.1)) == 1.0
    assert rx.default_gain(FIG2A) == pytest.approx(1 + 2 * math.sqrt(1e-3) / 3, rel=1e-15)
    assert rx.default_gain(FIG2A) == pytest.approx(1.0210818, abs=1e-7)
    with pytest.raises(ValueError):
        rx.default_gain(FIG2A.with_(N_B=0.0))


def test_cascade_gain_examples():
    assert rx.cascade_gains(3.5, 1) == [3.5]
    np.testing.assert_allclose(rx.cascade_gains(2.0, 2), [4 / 3, 3 / 2], rtol=1e-15)
    with pytest.raises(ValueError):
        rx.cascade_gains(0.5, 3)


@given(st.floats(1, 50), st.integers(1, 40))
@settings(max_examples=60, deadline=None)
def test_cascade_invariants(G, m):
    g = np.array(rx.cascade_gains(G, m))
    assert np.all(g >= 1)
    assert np.prod(g) == pytest.approx(G, rel=1e-12)
    tail = np.concatenate([np.cumprod(g[::-1])[::-1][1:], [1.0]])
    np.testing.assert_allclose((g - 1) * tail, (G - 1) / m, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("G,m", [(1.3, 1), (2.0, 2), (1.05, 5), (7.0, 4)])
def test_cascade_bogoliubov_coefficients(G, m):
    # compose the squeezers (idler = mode m with each return l) as one symplectic matrix
    S = np.eye(2 * (m + 1))
    for ell, g in enumerate(rx.cascade_gains(G, m)):
        S = gc.embed(gc.two_mode_squeezer_matrix(g), [m, ell], m + 1) @ S
    xI = 2 * m
    assert S[xI, xI] == pytest.approx(math.sqrt(G), rel=1e-12)
    for ell in range(m):
        assert S[xI, 2 * ell] == pytest.approx(math.sqrt((G - 1) / m), rel=1e-12)
        assert S[xI + 1, 2 * ell + 1] == pytest.approx(-math.sqrt((G - 1) / m), rel=1e-12)


def test_opa_config():
    cfg = rx.OpaConfig.for_scenario(FIG2A.with_(m=4))
    assert len(cfg.cascade_gains) == 4
    np.testing.assert_allclose(cfg.phases, [0, np.pi / 2, np.pi, 3 * np.pi / 2])
    with pytest.raises(ValueError):
        rx.OpaConfig(2, 1.1, phases=(0.0,))
    with pytest.raises(ValueError):
        rx.OpaConfig(2, 0.9)


def test_conditional_mean_examples():
    sc = FIG2A.with_(kappa=0.0)
    assert rx.conditional_mean_photon(sc, 1.5, 0.0) == rx.conditional_mean_photon(sc, 1.5, 2.0)
    assert rx.conditional_mean_photon(FIG2A, 1.0, 0.3) == FIG2A.N_S
    G = 1.2
    gap = rx.conditional_mean_photon(FIG2A, G, 0) - rx.conditional_mean_photon(FIG2A, G, np.pi)
    assert gap == pytest.approx(4 * FIG2A.Cp * math.sqrt(G * (G - 1) * FIG2A.kappa / 2), rel=1e-12)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_conditional_mean_matches_gaussian_pipeline(m):
    sc = RangingScenario(m, 1, 0.05, 0.7, 0.3)
    cfg = rx.OpaConfig.for_scenario(sc)
    for h in range(m):
        formula = rx.conditional_mean_photon(sc, cfg.G, cfg.phases[h])
        assert rx.opa_mean_photon_pipeline(sc, cfg, h) == pytest.approx(formula, abs=1e-10)


def test_count_pmf_examples():
    model = rx.CountModel(7, 0.4)
    assert rx.count_pmf(0, model) == pytest.approx(1.4 ** -7, rel=1e-13)
    geo = rx.CountModel(1, 0.8)
    n = np.arange(10)
    np.testing.assert_allclose(rx.count_pmf(n, geo), 0.8 ** n / 1.8 ** (n + 1), rtol=1e-12)
    assert model.sigma_bar == pytest.approx(math.sqrt(0.4 * 1.4), rel=1e-15)
    with pytest.raises(ValueError):
        rx.CountModel(3, -0.1)


@pytest.mark.parametrize("M,nbar", [(1, 0.3), (50, 0.08), (1000, 1.5)])
def test_count_pmf_normalization_and_moments(M, nbar):
    model = rx.CountModel(M, nbar)
    top = int(M * nbar + 40 * math.sqrt(M * nbar * (nbar + 1)) + 60)
    n = np.arange(top)
    p = rx.count_pmf(n, model)
    assert p.sum() == pytest.approx(1.0, abs=1e-10)
    mean = np.sum(n * p)
    var = np.sum((n - mean) ** 2 * p)
    assert mean == pytest.approx(M * nbar, rel=1e-8)
    assert var == pytest.approx(M * model.sigma_bar ** 2, rel=1e-8)


def test_threshold_error_examples():
    assert rx.threshold_error(10, 0.3, 0.3) == 0.5
    assert rx.threshold_error(1, 1.0, 0.0) == pytest.approx(0.25, abs=1e-15)
    assert rx.ml_threshold(1, 1.0, 0.0) == 1


def test_ml_threshold_is_likelihood_boundary():
    M, n0, n1 = 2000, 0.09, 0.08
    t = rx.ml_threshold(M, n0, n1)
    m0, m1 = rx.CountModel(M, n0), rx.CountModel(M, n1)
    assert rx.count_logpmf(t, m0) >= rx.count_logpmf(t, m1)
    assert rx.count_logpmf(t - 1, m0) < rx.count_logpmf(t - 1, m1)


def test_opa_equal_means_give_half():
    sc = FIG2A.with_(kappa=0.0)
    assert rx.opa_error_exact_m2(sc) == 0.5
    assert rx.opa_error_gaussian_m2(sc) == 0.5


def test_opa_gaussian_exponent_high_noise():
    sc = RangingScenario(2, 1, 1e-4, 50.0, 0.01)
    Ms = np.geomspace(1e7, 1e9, 7)
    logp = [math.log(2 * rx.opa_error_gaussian_m2(sc.with_(M=int(M)))) for M in Ms]
    slope = -np.polyfit(Ms, logp, 1)[0]
    assert slope / (sc.kappa * sc.N_S / sc.N_B) == pytest.approx(1.0, abs=0.10)


def test_opa_gaussian_tracks_exact():
    sc = FIG2A
    for M in (10 ** 5, 10 ** 6, 3 * 10 ** 6):
        s = sc.with_(M=M)
        n0, n1 = rx.opa_means_m2(s)
        snr = M * (n0 - n1) ** 2 / rx.CountModel(M, n0).sigma_bar ** 2
        if snr > 4:
            assert rx.opa_error_gaussian_m2(s) == pytest.approx(rx.opa_error_exact_m2(s), rel=0.10)


def test_opa_refuses_m3():
    with pytest.raises(NotImplementedError, match="not implemented: adaptive receiver"):
        rx.opa_error_exact_m2(FIG2A.with_(m=3))


def test_dd_monte_carlo_random_guess_at_zero_kappa():
    sc = RangingScenario(3, 1000, 1e-3, 0.5, 0.0)
    res = rx.dd_monte_carlo(sc, 200_000, 3)
    assert abs(res.error - 2 / 3) <= 3 * res.std_error


def test_dd_monte_carlo_matches_closed_form():
    sc = RangingScenario(2, 70_000, 1e-3, 3.0, 0.01)
    exact = classical_dd(sc)
    assert exact == pytest.approx(0.452419, abs=5e-7)
    res = rx.dd_monte_carlo(sc, 10 ** 6, 11)
    assert abs(res.error - exact) <= 3 * res.std_error


def test_dd_monte_carlo_noiseless_limit():
    sc = RangingScenario(4, 10 ** 6, 1e-3, 0.0, 0.05)
    assert rx.dd_monte_carlo(sc, 50_000, 5).error < 1e-3


def test_monte_carlo_determinism_and_worker_invariance():
    a = rx.dd_monte_carlo(FIG2A.with_(m=3), 200_000, 42, workers=1)
    b = rx.dd_monte_carlo(FIG2A.with_(m=3), 200_000, 42, workers=3)
    assert a == b
    c = rx.opa_monte_carlo_m2(FIG2A, None, 150_000, 42, workers=1)
    d = rx.opa_monte_carlo_m2(FIG2A, None, 150_000, 42, workers=2)
    assert c == d
    assert rx.dd_monte_carlo(FIG2A, 10_000, 43) != rx.dd_monte_carlo(FIG2A, 10_000, 42)


def test_monte_carlo_validates_inputs():
    with pytest.raises(ValueError):
        rx.dd_monte_carlo(FIG2A, 0, 1)
    with pytest.raises(ValueError):
        rx.dd_monte_carlo(FIG2A, 10, -1)


def test_opa_monte_carlo_examples():
    res = rx.opa_monte_carlo_m2(FIG2A.with_(kappa=0.0), None, 100_000, 9)
    assert abs(res.error - 0.5) <= 3 * res.std_error
    res = rx.opa_monte_carlo_m2(FIG2A, None, 10 ** 6, 9)
    assert abs(res.error - rx.opa_error_exact_m2(FIG2A)) <= 3 * res.std_error


def test_dd_monte_carlo_residual_variant_runs():
    res = rx.dd_monte_carlo(FIG2A.with_(M=1000), 20_000, 1, residual=True)
    assert 0 <= res.error <= 1 and res.trials == 20_000
