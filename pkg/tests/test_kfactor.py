"""Moment-method Ricean K estimation and normal fits of K populations."""

import math

import numpy as np
import pytest

import chansounder as cs


def _rician(k_linear, n, rng):
    return math.sqrt(k_linear) + (rng.standard_normal(n)
                                  + 1j * rng.standard_normal(n)) / math.sqrt(2.0)


# -------------------------------------------------------------------- moments

def test_moments_constant_magnitude():
    h = 3.0 * np.exp(1j * np.linspace(0, 2 * np.pi, 64, endpoint=False))
    g_a, g_v = cs.moments(h)
    assert g_a == pytest.approx(9.0, abs=1e-9)
    assert g_v == pytest.approx(0.0, abs=1e-9)


def test_moments_two_sample_hand_case():
    # |H|^2 = 1 and 3: g_a = 2, g_v = (1 + 9) - 2*4 = 2
    h = np.array([1.0, math.sqrt(3.0)], dtype=complex)
    g_a, g_v = cs.moments(h)
    assert g_a == pytest.approx(2.0, abs=1e-12)
    assert g_v == pytest.approx(2.0, abs=1e-12)


def test_moments_rayleigh_ratio():
    # pure Rayleigh: E[g_v]/g_a^2 -> 1
    rng = np.random.default_rng(60)
    h = (rng.standard_normal(4096) + 1j * rng.standard_normal(4096)) / math.sqrt(2.0)
    g_a, g_v = cs.moments(h)
    ratio = g_v / g_a ** 2
    print("Rayleigh g_v/g_a^2 = %.4f" % ratio)
    assert abs(ratio - 1.0) < 0.05


def test_moments_needs_two_samples():
    with pytest.raises(cs.InsufficientSamples):
        cs.moments(np.array([1.0 + 0j]))


# ---------------------------------------------------------------- estimate_kf

def test_constant_spectrum_is_pure_los():
    est = cs.estimate_kf(np.full(32, 2.0 - 1.0j))
    assert est.k_linear == float("inf")
    assert est.k_db == float("inf")
    assert est.n_samples == 32


def test_mean_estimate_within_1db_of_truth():
    for k_db in (3.0, 10.0, 20.0):
        k = 10 ** (k_db / 10.0)
        got = []
        for trial in range(100):
            rng = np.random.default_rng([77, int(k_db), trial])
            got.append(cs.estimate_kf(_rician(k, 512, rng)).k_db)
        mean = float(np.mean(got))
        print("K=%g dB -> mean estimate %.3f dB" % (k_db, mean))
        assert abs(mean - k_db) < 1.0


def test_rayleigh_spectrum_clamps_to_zero():
    # negative discriminant in expectation; this seed realizes it
    rng = np.random.default_rng(40)
    h = (rng.standard_normal(512) + 1j * rng.standard_normal(512)) / math.sqrt(2.0)
    est = cs.estimate_kf(h)
    assert est.k_linear == 0.0
    assert est.k_db == float("-inf")


def test_scale_invariance_is_exact():
    # power-of-two scalings commute exactly with the moment algebra
    rng = np.random.default_rng(71)
    for _ in range(1000):
        n = int(rng.integers(8, 200))
        h = _rician(10 ** rng.uniform(-0.5, 2.0), n, rng)
        a = float(rng.choice([-1.0, 1.0])) * 2.0 ** int(rng.integers(-8, 9))
        base = cs.estimate_kf(h)
        scaled = cs.estimate_kf(a * h)
        assert scaled.k_linear == base.k_linear


def test_phase_rotation_invariance():
    rng = np.random.default_rng(73)
    h = _rician(5.0, 256, rng)
    base = cs.estimate_kf(h)
    for phi in (0.3, np.pi / 2, 4.0):
        rot = cs.estimate_kf(np.exp(1j * phi) * h)
        assert rot.k_linear == pytest.approx(base.k_linear, rel=1e-9)


def test_mean_estimate_monotone_in_truth():
    means = []
    for k_db in (0.0, 3.0, 10.0, 20.0):
        k = 10 ** (k_db / 10.0)
        trials = []
        for t in range(60):
            rng = np.random.default_rng([88, int(k_db * 10), t])
            trials.append(cs.estimate_kf(_rician(k, 512, rng)).k_linear)
        means.append(float(np.mean(trials)))
    assert all(a < b for a, b in zip(means, means[1:]))


def test_kf_from_synthetic_tap_amplitudes():
    # 4096 fading snapshots of one K = 10 dB tap through the full front end;
    # moment method applied to the recovered tap amplitudes
    k_lin = 10 ** (10.0 / 10.0)
    taps = cs.TapSet([cs.Tap(0.0, 0.0, k_lin)])
    recs = cs.generate_snapshots(taps, 4096, 128, 320e6, seed=33)
    y_th = cs.to_frequency_domain(cs.calibration_record(128, 320e6))
    amps = np.array([
        cs.to_cir(cs.deconvolve(cs.to_frequency_domain(r), y_th)).taps[0]
        for r in recs
    ])
    est = cs.estimate_kf(amps)
    print("tap-amplitude K estimate: %.3f dB" % est.k_db)
    assert abs(est.k_db - 10.0) < 1.0


# ------------------------------------------------------------------ fit_normal

def test_fit_normal_constant_values():
    fit = cs.fit_normal([7.19] * 8)
    assert fit.mu == pytest.approx(7.19)
    assert fit.sigma == 0.0
    assert fit.n_samples == 8
    assert fit.n_excluded == 0


def test_fit_normal_two_values():
    fit = cs.fit_normal([6.0, 8.0])
    assert fit.mu == pytest.approx(7.0)
    assert fit.sigma == pytest.approx(1.0)  # population convention


def test_fit_normal_recovers_parameters():
    rng = np.random.default_rng(70)
    vals = rng.normal(6.34, 4.18, size=10000)
    fit = cs.fit_normal(vals)
    print("normal fit: mu=%.4f sigma=%.4f dev=%.4f"
          % (fit.mu, fit.sigma, fit.cdf_max_dev))
    assert abs(fit.mu - 6.34) < 0.1
    assert abs(fit.sigma - 4.18) < 0.1
    assert fit.cdf_max_dev < 0.02


def test_fit_normal_excludes_infinities():
    fit = cs.fit_normal([5.0, 6.0, float("inf"), 7.0, float("-inf")])
    assert fit.n_samples == 3
    assert fit.n_excluded == 2
    assert fit.mu == pytest.approx(6.0)


def test_fit_normal_too_few_finite():
    with pytest.raises(cs.InsufficientSamples):
        cs.fit_normal([4.2, float("inf")])
