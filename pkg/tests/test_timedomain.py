import math

import numpy as np
import pytest

from csfqlab.constants import ns, us
from csfqlab.timedomain import (
    DecayCurve,
    DecayFitError,
    coherence_relations,
    extract,
    generate,
    t2_from_rates,
)

CASES = {
    # kind: (tau, time grid)
    "t1": (513 * ns, np.linspace(0, 5 * 513 * ns, 121)),
    "ramsey": (5.6 * us, np.linspace(0, 3 * 5.6 * us, 241)),
    "echo": (9.4 * us, np.linspace(0, 4 * 9.4 * us, 121)),
}
AMP, OFF = 1.0, 0.2


def test_generate_definitions():
    t = np.array([0.0, 5.7 * us])
    c = generate("t1", 5.7 * us, t, amplitude=0.8, offset=0.1)
    assert c.signal[1] == pytest.approx(0.8 / math.e + 0.1, rel=1e-14)
    c = generate("echo", 9.4 * us, [0.0, 9.4 * us], amplitude=2.0, offset=-0.5)
    assert c.signal[1] == pytest.approx(2.0 / math.e - 0.5, rel=1e-14)
    c = generate("echo", 9.4 * us, [0.0, 9.4 * us], shape="gaussian")
    assert c.signal[1] == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_ramsey_without_detuning_is_exponential():
    t = np.linspace(0, 20 * us, 50)
    r = generate("ramsey", 5.6 * us, t, detuning=0.0)
    e = generate("t1", 5.6 * us, t)
    np.testing.assert_array_equal(r.signal, e.signal)
    assert np.all(np.diff(r.signal) < 0)


def test_ramsey_fringes():
    t = np.array([0.0, 2 * us, 4 * us])
    c = generate("ramsey", 5.6 * us, t, detuning=250e3)
    # 250 kHz: half a period at 2 us, a full period at 4 us
    assert c.signal[1] == pytest.approx(-math.exp(-2 / 5.6))
    assert c.signal[2] == pytest.approx(math.exp(-4 / 5.6))


def test_generate_rejects_bad_inputs():
    with pytest.raises(ValueError):
        generate("t1", 0.0, [0, 1])
    with pytest.raises(ValueError):
        generate("t3", 1.0, [0, 1])
    with pytest.raises(ValueError, match="random generator"):
        generate("t1", 1.0, [0, 1], noise=0.1)


def test_decay_curve_validation():
    with pytest.raises(ValueError):
        DecayCurve([0, 2, 1], [1, 2, 3], "t1")
    with pytest.raises(ValueError):
        DecayCurve([0, 1], [1, 2, 3], "t1")
    with pytest.raises(ValueError):
        DecayCurve([0, 1], [1, 2], "t1", shape="lorentzian")


@pytest.mark.parametrize(
    "kind,tau",
    [("t1", 513 * ns), ("ramsey", 5.6 * us), ("echo", 9.4 * us)],
)
def test_noiseless_recovery_examples(kind, tau):
    t = CASES[kind][1]
    fit = extract(generate(kind, tau, t))
    assert fit.converged
    assert fit.tau == pytest.approx(tau, rel=0.01)


def check_fit(fit, truth, rel):
    assert fit.tau == pytest.approx(truth["tau"], rel=rel)
    assert fit.amplitude == pytest.approx(truth["amplitude"], rel=rel)
    assert fit.offset == pytest.approx(truth["offset"], rel=rel)
    if "detuning" in truth:
        assert fit.detuning == pytest.approx(truth["detuning"], rel=rel)


@pytest.mark.parametrize("kind", ["t1", "ramsey", "echo"])
def test_round_trip_noiseless_50_trials(kind):
    base_tau, base_t = CASES[kind]
    rng = np.random.default_rng(7)
    for _ in range(50):
        tau = base_tau * rng.uniform(0.7, 1.3)
        amp = rng.uniform(0.5, 2.0)
        off = rng.uniform(-0.5, 0.5)
        det = rng.uniform(150e3, 350e3)
        curve = generate(kind, tau, base_t, amplitude=amp, offset=off, detuning=det)
        check_fit(extract(curve), curve.truth, 0.01)


@pytest.mark.parametrize("kind", ["t1", "ramsey", "echo"])
def test_round_trip_noisy_50_seeds(kind):
    tau, t = CASES[kind]
    for seed in range(50):
        curve = generate(kind, tau, t, amplitude=AMP, offset=OFF, noise=0.02, rng=np.random.default_rng(seed))
        check_fit(extract(curve), curve.truth, 0.10)


def test_noisy_generation_is_seeded():
    t = CASES["t1"][1]
    a = generate("t1", 1e-6, t, noise=0.02, rng=np.random.default_rng(3))
    b = generate("t1", 1e-6, t, noise=0.02, rng=np.random.default_rng(3))
    np.testing.assert_array_equal(a.signal, b.signal)


@pytest.mark.parametrize("true_shape,wrong", [("exponential", "gaussian"), ("gaussian", "exponential")])
def test_echo_shapes_distinguishable(true_shape, wrong):
    t1 = 5.7 * us
    t2 = 1.65 * t1
    curve = generate("echo", t2, np.linspace(0, 3 * t2, 121), shape=true_shape)
    right = extract(curve, shape=true_shape)
    bad = extract(curve, shape=wrong)
    assert bad.residual_rms >= 10 * max(right.residual_rms, 1e-15)
    assert right.tau == pytest.approx(t2, rel=0.01)


def test_constant_signal_rejected():
    t = np.linspace(0, 10 * us, 50)
    with pytest.raises(DecayFitError, match="constant") as info:
        extract(DecayCurve(t, np.full_like(t, 0.3), "t1"))
    assert info.value.residual == 0.0


def test_too_few_samples_rejected():
    t = np.linspace(0, 1e-6, 7)
    with pytest.raises(DecayFitError):
        extract(generate("t1", 1e-7, t))


def test_pure_noise_not_reported_as_decay():
    rng = np.random.default_rng(11)
    t = np.linspace(0, 10 * us, 101)
    curve = DecayCurve(t, 0.5 + 0.02 * rng.standard_normal(t.size), "t1")
    try:
        fit = extract(curve)
    except DecayFitError as exc:
        assert exc.residual is not None
    else:
        # if a fit is returned its amplitude must stay at the noise scale
        assert abs(fit.amplitude) < 0.1


def test_coherence_relations_measured_values():
    c = coherence_relations(5.7 * us, 5.6 * us, 9.4 * us)
    assert c.tphi_echo == pytest.approx(53.58 * us, rel=1e-3)
    assert c.tphi_star == pytest.approx(11.00690 * us, rel=1e-6)
    assert not c.lifetime_limited


def test_lifetime_limited():
    c = coherence_relations(513 * ns, t2_echo=1.026 * us)
    assert c.tphi_echo == math.inf
    assert c.tphi_star is None
    assert c.lifetime_limited


def test_t2_beyond_twice_t1_rejected():
    with pytest.raises(ValueError):
        coherence_relations(5.7 * us, t2_echo=2 * 5.7 * us * 1.06)
    # inside the 5% slack it is accepted as lifetime limited
    assert coherence_relations(5.7 * us, t2_echo=2 * 5.7 * us * 1.04).lifetime_limited
    with pytest.raises(ValueError):
        coherence_relations(0.0, 1e-6)


@pytest.mark.parametrize("t1,tphi", [(5.7e-6, 53.6e-6), (513e-9, 1e-6), (1e-4, 1e-7), (3.5e-6, 11e-6)])
def test_rates_round_trip(t1, tphi):
    t2 = t2_from_rates(t1, tphi)
    c = coherence_relations(t1, t2, t2)
    assert c.tphi_star == pytest.approx(tphi, rel=1e-9)
    assert c.tphi_echo == pytest.approx(tphi, rel=1e-9)
