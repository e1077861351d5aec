import math

import numpy as np
import pytest

from csfqlab.constants import GHz, Phi0, e, fF, h, uA
from csfqlab.model import (
    DeviceParams,
    EnergySpectrum,
    ModelError,
    build_hamiltonian,
    calibrate_cj,
    flux_sweep,
    ladder_spectrum,
    relative_levels,
    shunt_charging_energy,
    spectrum,
    transitions,
)

KHZ = 1e3


def dense_levels(params, flux, n, cutoff):
    """Oracle: full complex diagonalization without symmetry reduction."""
    w = np.linalg.eigvalsh(build_hamiltonian(params, flux, cutoff))
    return (w[:n] - w[0]) / h


def index(N, n1, n2):
    return (n1 + N) * (2 * N + 1) + (n2 + N)


def test_dimension_and_hermiticity(published_params):
    H = build_hamiltonian(published_params, 0.37, 2)
    assert H.shape == (25, 25)
    assert np.abs(H - H.conj().T).max() == 0.0


def test_energy_scales(published_params):
    assert published_params.EJ / h / GHz == pytest.approx(149.0, abs=0.05)
    assert shunt_charging_energy(published_params) / h / GHz == pytest.approx(0.208, abs=5e-4)


def test_matrix_elements_follow_convention(published_params):
    N = 3
    p = published_params
    H0 = build_hamiltonian(p, 0.0, N)
    H5 = build_hamiltonian(p, 0.5, N)
    EJ = p.I0 * Phi0 / (2 * math.pi)
    Cinv = np.linalg.inv([[p.Cj + p.alpha * p.Cj + p.Cs, -(p.alpha * p.Cj + p.Cs)],
                          [-(p.alpha * p.Cj + p.Cs), p.Cj + p.alpha * p.Cj + p.Cs]])
    # diagonal: charging energy plus the constant E_J (2 + alpha)
    k = index(N, 1, -2)
    kinetic = 2 * e**2 * (Cinv[0, 0] * 1 + 2 * Cinv[0, 1] * (1 * -2) + Cinv[1, 1] * 4)
    assert H0[k, k].real == pytest.approx(kinetic + EJ * (2 + p.alpha), rel=1e-12)
    # -E_J cos(phi1): hop in n1 by one
    assert H0[index(N, 1, 0), index(N, 0, 0)] == pytest.approx(-EJ / 2, rel=1e-12)
    # loop term couples (n1 + 1, n2 - 1); cos(pi + x) = -cos(x) flips its sign
    a, b = index(N, 1, -1), index(N, 0, 0)
    assert H0[a, b] == pytest.approx(-p.alpha * EJ / 2, rel=1e-12)
    assert H5[a, b].real == pytest.approx(+p.alpha * EJ / 2, rel=1e-12)
    assert abs(H5[a, b].imag) < 1e-12 * EJ


def test_singular_capacitance_rejected():
    # DeviceParams forbids Cs = 0, so build the degenerate case by hand
    p = DeviceParams(0.3 * uA, 0.41, 93 * fF, 0.0)
    object.__setattr__(p, "Cs", 0.0)
    with pytest.raises(ModelError, match="singular"):
        build_hamiltonian(p, 0.5, 2)


@pytest.mark.parametrize("bad", [dict(I0=0.0), dict(alpha=1.0), dict(alpha=0.0), dict(Cs=-1e-15), dict(Cj=-1e-15)])
def test_invalid_params_rejected(bad):
    kwargs = dict(I0=0.3 * uA, alpha=0.41, Cs=93 * fF, Cj=5 * fF)
    kwargs.update(bad)
    with pytest.raises(ModelError):
        DeviceParams(**kwargs)


@pytest.mark.parametrize(
    "flux,ng",
    [(0.5, (0.0, 0.0)), (0.51, (0.0, 0.0)), (0.37, (0.0, 0.0)), (0.51, (0.2, 0.2)), (0.51, (0.3, -0.1))],
)
def test_symmetry_reduced_levels_match_dense(published_params, flux, ng):
    p = published_params.with_(ng1=ng[0], ng2=ng[1])
    fast = relative_levels(p, flux, 6, 8)
    np.testing.assert_allclose(fast, dense_levels(p, flux, 6, 8), atol=1.0)


def test_spectrum_reference_and_order(device):
    spec = spectrum(device, 0.51, 5)
    assert spec.levels[0] == 0.0
    assert np.all(np.diff(spec.levels) > 0)
    assert spec.charge_cutoff == 12


def test_convergence_at_default_cutoff(device):
    w12 = relative_levels(device, 0.5, 2, 12)[1]
    w14 = relative_levels(device, 0.5, 2, 14)[1]
    assert abs(w12 - w14) <= KHZ
    assert spectrum(device, 0.5, 2).converged


def test_unconverged_cutoff_is_flagged(device):
    assert not spectrum(device, 0.5, 2, charge_cutoff=3).converged


@pytest.mark.parametrize("delta", [0.001, 0.005, 0.01, 0.02])
def test_symmetric_about_half_flux(device, delta):
    up = relative_levels(device, 0.5 + delta, 4)
    down = relative_levels(device, 0.5 - delta, 4)
    np.testing.assert_allclose(up, down, atol=KHZ)


@pytest.mark.parametrize("flux", [0.5, 0.51, 0.2])
def test_flux_periodicity(device, flux):
    np.testing.assert_allclose(relative_levels(device, flux + 1, 5), relative_levels(device, flux, 5), atol=KHZ)


def test_offset_charge_sign_flip(published_params):
    p = published_params.with_(ng1=0.23, ng2=-0.11)
    q = published_params.with_(ng1=-0.23, ng2=0.11)
    np.testing.assert_allclose(relative_levels(p, 0.51, 4, 8), relative_levels(q, 0.51, 4, 8), atol=KHZ)


def test_positive_anharmonicity_near_sweet_spot(device):
    lv = spectrum(device, 0.51, 4).levels
    assert lv[2] - lv[1] > lv[1]


def test_flux_sweep_minimum_and_symmetry(device):
    sweep = flux_sweep(device, 0.45, 0.55, 11, 2)
    w01 = np.array([s.levels[1] for s in sweep])
    assert [s.flux for s in sweep] == pytest.approx(list(np.linspace(0.45, 0.55, 11)))
    assert sweep[int(np.argmin(w01))].flux == pytest.approx(0.5)
    np.testing.assert_allclose(w01, w01[::-1], atol=KHZ)


def test_flux_sweep_parallel_matches_sequential(device):
    seq = flux_sweep(device, 0.48, 0.52, 5, 3, check_convergence=False)
    par = flux_sweep(device, 0.48, 0.52, 5, 3, workers=3, check_convergence=False)
    for a, b in zip(seq, par):
        np.testing.assert_array_equal(a.levels, b.levels)


def test_flux_sweep_rejects_bad_range(device):
    with pytest.raises(ModelError):
        flux_sweep(device, 0.55, 0.45, 11, 2)
    with pytest.raises(ModelError):
        flux_sweep(device, 0.45, 0.55, 1, 2)


def test_too_many_levels_rejected(device):
    with pytest.raises(ModelError):
        relative_levels(device, 0.5, 26, 2)


def test_transitions_on_measured_ladder():
    spec = ladder_spectrum(np.array([0.0, 5.3, 10.88, 16.71]) * GHz)
    ts = transitions(spec, 2)
    expected = {
        (0, 1, 1): 5.3,
        (1, 2, 1): 5.58,
        (2, 3, 1): 5.83,
        (0, 2, 2): 5.44,
        (1, 3, 2): (5.58 + 5.83) / 2,
    }
    for (i, j, m), f in expected.items():
        t = ts.find(i, j, m)
        assert t is not None
        assert t.freq / GHz == pytest.approx(f, rel=1e-9)


def test_transitions_two_levels():
    ts = transitions(ladder_spectrum([0.0, 1.0 * GHz]), 1)
    assert len(ts) == 1


def test_three_photon_entry():
    levels = np.array([0.0, 5.3, 10.88, 16.71]) * GHz
    ts = transitions(ladder_spectrum(levels), 3)
    t = ts.find(0, 3, 3)
    assert t.freq == pytest.approx(levels[3] / 3)
    # no multi-photon entries between adjacent levels
    assert ts.find(0, 1, 2) is None


def test_transition_frequency_invariant(device):
    spec = spectrum(device, 0.51, 5, check_convergence=False)
    for t in transitions(spec, 3):
        gap = spec.levels[t.j] - spec.levels[t.i]
        assert t.freq == pytest.approx(gap / t.order, rel=1e-6)


def test_calibrate_cj_reachable_target(published_params):
    cal = calibrate_cj(published_params, target=4.4 * GHz)
    assert cal.reached
    assert cal.omega01 == pytest.approx(4.4 * GHz, abs=KHZ)
    assert relative_levels(published_params.with_(Cj=cal.cj), 0.5, 2)[1] == pytest.approx(4.4 * GHz, abs=KHZ)


def test_calibrate_cj_out_of_reach_reports_closest_approach(published_params):
    cal = calibrate_cj(published_params, target=5.01 * GHz)
    assert not cal.reached
    # the reported Cj is a local maximum of omega01
    w = lambda c: relative_levels(published_params.with_(Cj=c), 0.5, 2)[1]
    assert w(cal.cj) >= w(cal.cj * 0.9)
    assert w(cal.cj) >= w(cal.cj * 1.1)
    assert cal.omega01 < 5.01 * GHz


def test_shipped_cj_is_the_calibrated_value(default_cfg, published_params):
    cal = calibrate_cj(published_params, target=5.01 * GHz, charge_cutoff=default_cfg.charge_cutoff)
    assert default_cfg.device.cj_fF == pytest.approx(cal.cj / fF, abs=0.01)
    shipped = relative_levels(default_cfg.to_params(), 0.5, 2)[1]
    assert shipped == pytest.approx(cal.omega01, abs=KHZ)
