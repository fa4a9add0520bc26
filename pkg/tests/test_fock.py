import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qranging import fock
from qranging import gaussian as gc
from qranging.ranging import gus_helstrom


def pure(psi, cutoffs):
    return fock.ket_to_dm(psi, cutoffs)


def basis(n, cutoff):
    v = np.zeros(cutoff, dtype=complex)
    v[n] = 1
    return v


def test_tmsv_vector_examples():
    psi, d = fock.tmsv_vector(0.0, 5)
    np.testing.assert_array_equal(psi, np.kron(basis(0, 5), basis(0, 5)))
    assert d == 0
    c = 60
    psi, d = fock.tmsv_vector(1.0, c)
    n = np.arange(c)
    np.testing.assert_allclose(psi[n * c + n].real, 2.0 ** (-(n + 1) / 2), atol=1e-15)
    assert d == pytest.approx(2.0 ** -c, rel=1e-6)
    red = fock.partial_trace(pure(*fock.tmsv_vector(0.3, 40)[:1], (40, 40)), [0])
    np.testing.assert_allclose(red.data, fock.thermal_dm(0.3, 40).data, atol=1e-14)


def test_tmsv_vector_rejects_tiny_cutoff():
    with pytest.raises(ValueError):
        fock.tmsv_vector(0.1, 1)


def test_single_mode_constructors():
    np.testing.assert_array_equal(fock.thermal_dm(0, 4).data, np.diag([1, 0, 0, 0]))
    psi, d = fock.coherent_vector(0, 6)
    np.testing.assert_array_equal(psi, basis(0, 6))
    alpha = 0.8 - 0.3j
    coh, _ = fock.coherent_vector(alpha, 40)
    dm = fock.displaced_thermal_dm(alpha, 0.0, 40)
    np.testing.assert_allclose(dm.data, np.outer(coh, coh.conj()), atol=1e-10)


def test_thermal_cutoff_rule():
    for N in (0.01, 0.5, 1.0, 3.0):
        c = fock.thermal_cutoff(N)
        assert fock.thermal_dm(N, c).trace_deficit < 1e-11
        assert c >= math.log(1e-12) / math.log(N / (N + 1))


def test_beamsplitter_identity_and_number_conservation():
    rng = np.random.default_rng(0)
    psi = rng.normal(size=36) + 1j * rng.normal(size=36)
    psi[[5, 11, 17, 23, 29, 30, 31, 32, 33, 34, 35]] = 0  # keep weight off the edge
    dm = pure(psi / np.linalg.norm(psi), (6, 6))
    out = fock.apply_gaussian_unitary(dm, "beamsplitter", 1.0, [0, 1], deficit_bound=None)
    np.testing.assert_allclose(out.data, dm.data, atol=1e-12)
    big = fock.tensor(fock.thermal_dm(0.3, 30), fock.displaced_thermal_dm(0.5, 0.1, 30))
    out = fock.apply_gaussian_unitary(big, "beamsplitter", 0.37, [0, 1])
    tot = lambda d: fock.mean_photon_fock(d, 0) + fock.mean_photon_fock(d, 1)
    assert tot(out) == pytest.approx(tot(big), abs=1e-10)


def test_squeezer_on_vacuum_is_tmsv():
    G, c = 1.3, 40
    vac = fock.tensor(fock.thermal_dm(0, c), fock.thermal_dm(0, c))
    out = fock.apply_gaussian_unitary(vac, "squeezer", G, [0, 1])
    ref = pure(fock.tmsv_vector(G - 1, c)[0], (c, c))
    assert fock.uhlmann_fidelity_fock(out, ref) == pytest.approx(1.0, abs=1e-8)


def test_squeezer_low_cutoff_is_flagged():
    vac = fock.tensor(fock.thermal_dm(0, 6), fock.thermal_dm(0, 6))
    with pytest.raises(fock.TruncationError):
        fock.apply_gaussian_unitary(vac, "squeezer", 3.0, [0, 1])


def test_thermal_loss_examples():
    dm = fock.displaced_thermal_dm(0.6, 0.2, 25)
    assert fock.thermal_loss_fock(dm, 0, 1.0, 0.0) is dm
    alpha, kappa = 1.1, 0.45
    coh = pure(fock.coherent_vector(alpha, 30)[0], (30,))
    out = fock.thermal_loss_fock(coh, 0, kappa, 0.0)
    ref = fock.coherent_vector(math.sqrt(kappa) * alpha, 30)[0]
    np.testing.assert_allclose(out.data, np.outer(ref, ref.conj()), atol=1e-10)
    N_B = 0.3
    out = fock.thermal_loss_fock(dm, 0, kappa, N_B)
    n_in = fock.mean_photon_fock(dm, 0)
    assert fock.mean_photon_fock(out, 0) == pytest.approx(kappa * n_in + N_B, abs=1e-8)


def test_fock_moments_match_covariance_picture():
    g = gc.displace(gc.squeeze(gc.thermal_state(0.2), 0, 0.3, 0.7), 0, 0.4 + 0.1j)
    sp = (fock.SpectralState.thermal([0.2], [60]).apply("single_squeezer", (0.3, 0.7), [0])
          .apply("displacement", 0.4 + 0.1j, [0]))
    mean, cov = fock.covariance_fock(sp.to_dm())
    np.testing.assert_allclose(mean, g.mean, atol=1e-9)
    np.testing.assert_allclose(cov, g.cov, atol=1e-9)


def test_spectral_state_matches_density_matrix_route():
    sp = fock.SpectralState.thermal([0.3, 0.1], [14, 14]).apply("squeezer", 1.2, [0, 1])
    dm = fock.tensor(fock.thermal_dm(0.3, 14), fock.thermal_dm(0.1, 14))
    dm = fock.apply_gaussian_unitary(dm, "squeezer", 1.2, [0, 1], deficit_bound=None)
    np.testing.assert_allclose(sp.to_dm().data, dm.data, atol=1e-12)


def test_helstrom_examples():
    r = fock.thermal_dm(0.4, 10)
    assert fock.helstrom_binary(r, r) == pytest.approx(0.5, abs=1e-15)
    assert fock.helstrom_binary(pure(basis(0, 3), (3,)), pure(basis(1, 3), (3,))) == 0
    for zeta in (0.0, 0.3, 0.6, 0.99):
        a = np.array([1, 0], dtype=complex)
        b = np.array([zeta, math.sqrt(1 - zeta ** 2)], dtype=complex)
        p = fock.helstrom_binary(pure(a, (2,)), pure(b, (2,)))
        assert p == pytest.approx((1 - math.sqrt(1 - zeta ** 2)) / 2, abs=1e-14)


@given(st.floats(0.05, 0.95), st.floats(0, 2), st.floats(0, 2))
@settings(max_examples=30, deadline=None)
def test_helstrom_swap_symmetry_and_pgm_dominance(p0, n0, n1):
    r0 = fock.displaced_thermal_dm(0.3, n0 / 4, 30)
    r1 = fock.thermal_dm(n1 / 4, 30)
    h = fock.helstrom_binary(r0, r1, p0)
    assert h == pytest.approx(fock.helstrom_binary(r1, r0, 1 - p0), abs=1e-13)
    assert fock.pgm_error([r0, r1], [p0, 1 - p0]) >= h - 1e-12


def test_pgm_examples():
    kets = [basis(k, 4) for k in range(3)]
    assert fock.pgm_error(kets) == pytest.approx(0.0, abs=1e-14)
    r = fock.thermal_dm(0.5, 12)
    assert fock.pgm_error([r] * 4) == pytest.approx(0.75, abs=1e-12)


@pytest.mark.parametrize("zeta", [0.1, 0.5, 0.9])
def test_pgm_matches_gus_formula(zeta):
    kets, deficit = fock.ppm_coherent_kets(3, math.sqrt(-math.log(zeta)), 24)
    assert deficit < 1e-12
    assert abs(np.vdot(kets[0], kets[1])) == pytest.approx(zeta, abs=1e-12)
    assert fock.pgm_error(kets) == pytest.approx(gus_helstrom(3, zeta), abs=1e-8)


def test_pgm_rejects_bad_priors():
    with pytest.raises(ValueError):
        fock.pgm_error([basis(0, 2), basis(1, 2)], [0.7, 0.7])


def test_overlap_examples():
    r = fock.displaced_thermal_dm(0.2, 0.3, 30)
    for s in (0.2, 0.5, 0.9):
        assert fock.overlap_fock(r, r, s) == pytest.approx(1.0, abs=1e-12)
    q = fock.overlap_fock(fock.thermal_dm(0, 80), fock.thermal_dm(1, 80), 0.5)
    assert q == pytest.approx(2 ** -0.5, abs=1e-12)


def test_overlap_curve_matches_pointwise():
    a = fock.SpectralState.thermal([0.2], [40]).apply("single_squeezer", (0.2, 0.1), [0])
    b = fock.SpectralState.thermal([0.5], [40])
    q = fock.overlap_curve(a, b)
    for s in (0.1, 0.5, 0.9):
        assert q(s) == pytest.approx(fock.overlap_fock(a, b, s), abs=1e-14)


def test_fidelity_of_coherent_states():
    alpha, beta = 0.7 + 0.2j, -0.3 + 0.5j
    a = pure(fock.coherent_vector(alpha, 40)[0], (40,))
    b = pure(fock.coherent_vector(beta, 40)[0], (40,))
    F = fock.uhlmann_fidelity_fock(a, b)
    assert F == pytest.approx(math.exp(-abs(alpha - beta) ** 2 / 2), abs=1e-12)


def test_spectral_fidelity_pruning_is_conservative():
    a = fock.SpectralState.thermal([0.6, 0.2], [22, 22]).apply("squeezer", 1.1, [0, 1])
    b = fock.SpectralState.thermal([0.3, 0.4], [22, 22]).apply("beamsplitter", 0.3, [0, 1])
    exact = fock.uhlmann_fidelity_fock(a, b, prune=0.0)
    assert fock.uhlmann_fidelity_fock(a, b) == pytest.approx(exact, abs=1e-10)
    # the density-matrix route drops eigenvalues below 1e-14, worth up to sqrt(1e-14) each
    assert fock.uhlmann_fidelity_fock(a.to_dm(), b.to_dm()) == pytest.approx(exact, abs=1e-7)


def test_standard_form_parameters_round_trip():
    a, b, c = 3.0, 1.5, 1.2
    n1, n2, G = fock.standard_form_parameters(a, b, c)
    g = gc.two_mode_squeeze(gc.tensor(gc.thermal_state(n1), gc.thermal_state(n2)), 0, 1, G)
    Z = np.diag([1.0, -1.0])
    target = np.block([[a * np.eye(2), c * Z], [c * Z, b * np.eye(2)]])
    np.testing.assert_allclose(g.cov, target, atol=1e-12)
    with pytest.raises(ValueError):
        fock.standard_form_parameters(1.0, 1.0, 0.5)


def test_density_matrix_check():
    dm = fock.thermal_dm(2.0, 10)
    with pytest.raises(fock.TruncationError):
        dm.check()
    fock.thermal_dm(0.1, 20).check()
