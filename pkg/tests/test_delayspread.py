"""Mean excess delay and RMS delay spread."""

import math

import numpy as np
import pytest

import chansounder as cs

NS = 1e-9


def _mpcs(delays_ns, powers_linear):
    powers_db = 10 * np.log10(np.asarray(powers_linear, dtype=float))
    return cs.MpcList(np.asarray(delays_ns, dtype=float) * NS, powers_db, -200.0)


def test_hand_worked_three_path_case():
    ds = cs.delay_spread(_mpcs([0.0, 50.0, 100.0], [0.5, 0.3, 0.2]))
    # mean = 0.3*50 + 0.2*100 = 35 ns; var = 0.5*35^2 + 0.3*15^2 + 0.2*65^2
    assert ds.mean_excess_delay_s / NS == pytest.approx(35.0, abs=1e-6)
    assert ds.rms_ds_s / NS == pytest.approx(math.sqrt(1525.0), abs=1e-6)
    assert round(ds.rms_ds_s / NS, 2) == 39.05
    assert ds.n_mpcs == 3


def test_single_path_spread_is_exactly_zero():
    ds = cs.delay_spread(_mpcs([123.0], [0.7]))
    assert ds.rms_ds_s == 0.0
    assert ds.mean_excess_delay_s == pytest.approx(123.0 * NS)
    assert ds.n_mpcs == 1


def test_two_equal_paths():
    ds = cs.delay_spread(_mpcs([0.0, 100.0], [0.4, 0.4]))
    assert ds.mean_excess_delay_s / NS == pytest.approx(50.0)
    assert ds.rms_ds_s / NS == pytest.approx(50.0)


def test_empty_mpc_list_rejected():
    with pytest.raises(cs.EmptyMpcSet):
        cs.delay_spread(cs.MpcList(np.array([]), np.array([]), -100.0))


def test_shift_scale_and_dilation_invariances():
    rng = np.random.default_rng(67)
    for _ in range(1000):
        m = int(rng.integers(2, 12))
        delays = np.sort(rng.uniform(0.0, 500.0, m))
        delays += np.arange(m) * 1e-3  # enforce strictly increasing
        powers = rng.uniform(0.01, 1.0, m)
        base = cs.delay_spread(_mpcs(delays, powers))

        # uniform delay shift leaves DS alone, moves the mean
        shift = cs.delay_spread(_mpcs(delays + 40.0, powers))
        assert shift.rms_ds_s == pytest.approx(base.rms_ds_s, rel=1e-9, abs=1e-21)
        assert shift.mean_excess_delay_s == pytest.approx(
            base.mean_excess_delay_s + 40.0 * NS, rel=1e-9)

        # uniform power scaling changes nothing
        scale = cs.delay_spread(_mpcs(delays, powers * 13.7))
        assert scale.rms_ds_s == pytest.approx(base.rms_ds_s, rel=1e-12, abs=1e-21)

        # delay dilation scales DS linearly
        dil = cs.delay_spread(_mpcs(delays * 3.0, powers))
        assert dil.rms_ds_s == pytest.approx(3.0 * base.rms_ds_s, rel=1e-9, abs=1e-21)

        # spread never exceeds the delay span
        assert base.rms_ds_s <= (delays[-1] - delays[0]) * NS + 1e-21


def test_aggregate_ds_basics():
    results = [cs.DsResult(0.0, v * NS, 2) for v in (10.0, 20.0, 30.0)]
    mean_ns, std_ns = cs.aggregate_ds(results)
    assert mean_ns == pytest.approx(20.0)
    assert std_ns == pytest.approx(8.165, abs=1e-3)  # population convention

    same = [cs.DsResult(0.0, 15.0 * NS, 3)] * 4
    mean_ns, std_ns = cs.aggregate_ds(same)
    assert mean_ns == pytest.approx(15.0)
    assert std_ns == 0.0


def test_aggregate_ds_empty_rejected():
    with pytest.raises(cs.InvalidInput):
        cs.aggregate_ds([])


def test_dsresult_validation():
    with pytest.raises(cs.InvalidInput):
        cs.DsResult(0.0, -1.0 * NS, 2)
    with pytest.raises(cs.InvalidInput):
        cs.DsResult(0.0, 1.0 * NS, 0)


def test_raw_bin_spread_close_to_mpc_spread():
    # sanity check of the sensitivity-study variant: dense two-tap APDP
    p = np.full(256, -120.0)
    p[10] = 10 * math.log10(0.6)
    p[42] = 10 * math.log10(0.4)
    apdp = cs.Apdp(p, 1 / 320e6, 1, noise_floor_db=-120.0)
    raw = cs.delay_spread_raw(apdp, margin_db=6.0)
    mpc = cs.delay_spread(_mpcs([10 / 0.32, 42 / 0.32], [0.6, 0.4]))
    assert raw.rms_ds_s == pytest.approx(mpc.rms_ds_s, rel=1e-9)
