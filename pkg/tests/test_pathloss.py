"""Link budget, CI/FI/free-space model evaluation and fitting."""

import math

import numpy as np
import pytest

import chansounder as cs

# ------------------------------------------------------------ received power


def _mpcs(powers_db):
    delays = np.arange(len(powers_db)) * 1e-9
    return cs.MpcList(delays, np.asarray(powers_db, dtype=float), -120.0)


def test_received_power_single_component():
    assert cs.received_power(_mpcs([-60.0])) == pytest.approx(-60.0, abs=1e-12)


def test_received_power_two_equal_components():
    got = cs.received_power(_mpcs([-60.0, -60.0]))
    assert got == pytest.approx(10 * math.log10(2e-6), abs=1e-12)
    assert round(got, 2) == -56.99


def test_received_power_linear_sum():
    got = cs.received_power(_mpcs([-50.0, -60.0, -70.0]))
    want = 10 * math.log10(1e-5 + 1e-6 + 1e-7)
    assert got == pytest.approx(want, abs=1e-12)
    assert got == pytest.approx(-49.54, abs=0.01)


def test_received_power_monotone_in_components():
    base = cs.received_power(_mpcs([-50.0, -60.0]))
    more = cs.received_power(_mpcs([-50.0, -60.0, -90.0]))
    assert more > base


def test_received_power_empty_rejected():
    empty = cs.MpcList(np.array([]), np.array([]), -120.0)
    with pytest.raises(cs.EmptyMpcSet):
        cs.received_power(empty)


# ------------------------------------------------------------------ path loss

def test_path_loss_worked_budget():
    budget = cs.LinkBudget(pt_dbm=20, ptht_dbm=20, pthr_dbm=-10,
                           gt_dbi=2, gr_dbi=2, gatt_db=30)
    assert cs.path_loss(-60.0, budget) == pytest.approx(84.0, abs=1e-12)


def test_path_loss_zero_budget():
    zero = cs.LinkBudget(0, 0, 0, 0, 0, 0)
    assert cs.path_loss(0.0, zero) == 0.0


def test_path_loss_linear_in_received_power():
    budget = cs.LinkBudget()
    assert cs.path_loss(-70.0, budget) - cs.path_loss(-60.0, budget) == pytest.approx(10.0)


def test_default_budget_constant():
    # 20 + 2 + 2 + (-10) - 20 + 30
    assert cs.LinkBudget().constant_db() == pytest.approx(24.0)


# ----------------------------------------------------------- model evaluation

def test_eval_ci_at_one_meter():
    for n in (1.0, 2.0, 3.37):
        assert cs.eval_ci(1.0, 2.4, n) == pytest.approx(40.0, abs=0.005)


def test_eval_ci_table_point():
    assert abs(cs.eval_ci(10.0, 6.0, 3.37) - 81.66) < 0.01


def test_eval_ci_n2_is_free_space():
    rng = np.random.default_rng(41)
    d = rng.uniform(0.5, 100.0, 50)
    f = rng.uniform(0.5, 10.0, 50)
    assert np.allclose(cs.eval_ci(d, f, 2.0), cs.eval_fspl(d, f), atol=1e-12)


def test_eval_fi_points():
    assert cs.eval_fi(1.0, 1.25, 41.23) == pytest.approx(41.23, abs=1e-12)
    assert abs(cs.eval_fi(10.0, 1.25, 41.23) - 53.73) < 0.01
    assert abs(cs.eval_fi(10.0, 1.66, 67.91) - 84.51) < 0.01


def test_eval_fspl_points():
    assert cs.eval_fspl(1.0, 1.0) == pytest.approx(32.4, abs=1e-12)
    assert abs(cs.eval_fspl(10.0, 5.0) - 66.38) < 0.01


def test_eval_fspl_octave_step():
    for d in (0.7, 3.0, 120.0):
        step = cs.eval_fspl(d, 4.0) - cs.eval_fspl(d, 2.0)
        assert step == pytest.approx(20 * math.log10(2.0), abs=1e-12)


@pytest.mark.parametrize("fn,args", [
    (cs.eval_ci, (0.0, 2.4, 2.0)),
    (cs.eval_ci, (5.0, -1.0, 2.0)),
    (cs.eval_fi, (-3.0, 1.5, 40.0)),
    (cs.eval_fspl, (0.0, 1.0)),
    (cs.eval_fspl, (1.0, 0.0)),
])
def test_eval_rejects_nonpositive(fn, args):
    with pytest.raises(cs.InvalidInput):
        fn(*args)


# ----------------------------------------------------------------- CI fitting

def _samples(d, pl, f=5.0, scenario=cs.Scenario.LOS):
    return [cs.PlSample(f"P{i:03d}", float(di), f, float(pli), scenario)
            for i, (di, pli) in enumerate(zip(d, pl))]


def test_fit_ci_noiseless_self_consistency():
    d = np.linspace(1.0, 40.0, 30)
    pl = cs.eval_ci(d, 5.0, 2.0)
    fit = cs.fit_ci(_samples(d, pl))
    assert fit.model is cs.PlModel.CI
    assert abs(fit.ple - 2.0) < 1e-9
    assert fit.sigma_db < 1e-9
    assert fit.offset_db is None
    assert fit.n_samples == 30


def test_fit_ci_two_point_exact():
    d = np.array([1.0, 10.0])
    pl = cs.eval_ci(d, 2.4, 1.45)
    fit = cs.fit_ci(_samples(d, pl, f=2.4))
    assert abs(fit.ple - 1.45) < 1e-9
    assert fit.sigma_db < 1e-9


def test_fit_ci_recovers_through_shadow_fading():
    rng = np.random.default_rng(17)
    d = np.linspace(1.0, 40.0, 200)
    pl = cs.eval_ci(d, 5.0, 2.0) + rng.normal(0.0, 3.0, size=200)
    fit = cs.fit_ci(_samples(d, pl))
    print("fit_ci: n=%.4f sigma=%.4f" % (fit.ple, fit.sigma_db))
    assert abs(fit.ple - 2.0) < 0.1
    assert abs(fit.sigma_db - 3.0) < 0.5


def test_fit_ci_mixed_bands_rejected():
    s = _samples([1.0, 5.0], [40.0, 60.0])
    s[1] = cs.PlSample("P001", 5.0, 2.4, 60.0)
    with pytest.raises(cs.InvalidInput):
        cs.fit_ci(s)


def test_fit_degenerate_distances():
    d = [7.0, 7.0, 7.0]
    pl = [60.0, 61.0, 62.0]
    with pytest.raises(cs.DegenerateGeometry):
        cs.fit_ci(_samples(d, pl))
    with pytest.raises(cs.DegenerateGeometry):
        cs.fit_fi(_samples(d, pl))


def test_fit_needs_two_samples():
    with pytest.raises(cs.InvalidInput):
        cs.fit_ci(_samples([3.0], [50.0]))


# ----------------------------------------------------------------- FI fitting

def test_fit_fi_noiseless_self_consistency():
    d = np.linspace(1.0, 40.0, 25)
    pl = cs.eval_fi(d, 1.5, 45.0)
    fit = cs.fit_fi(_samples(d, pl))
    assert fit.model is cs.PlModel.FI
    assert abs(fit.ple - 1.5) < 1e-9
    assert abs(fit.offset_db - 45.0) < 1e-9
    assert fit.sigma_db < 1e-9


def test_fit_fi_recovers_through_shadow_fading():
    rng = np.random.default_rng(17)
    d = np.linspace(1.0, 40.0, 200)
    pl = cs.eval_fi(d, 1.75, 48.93) + rng.normal(0.0, 3.0, size=200)
    fit = cs.fit_fi(_samples(d, pl))
    print("fit_fi: alpha=%.4f beta=%.4f sigma=%.4f"
          % (fit.ple, fit.offset_db, fit.sigma_db))
    assert abs(fit.ple - 1.75) < 0.15
    assert abs(fit.offset_db - 48.93) < 1.5


def test_fit_fi_offset_shift_property():
    rng = np.random.default_rng(43)
    d = rng.uniform(1.0, 40.0, 60)
    pl = cs.eval_fi(d, 1.9, 50.0) + rng.normal(0.0, 2.0, 60)
    base = cs.fit_fi(_samples(d, pl))
    lifted = cs.fit_fi(_samples(d, pl + 7.5))
    assert lifted.ple == pytest.approx(base.ple, abs=1e-9)
    assert lifted.offset_db == pytest.approx(base.offset_db + 7.5, abs=1e-9)


def test_fits_invariant_under_permutation():
    rng = np.random.default_rng(47)
    d = rng.uniform(1.0, 40.0, 40)
    pl = cs.eval_ci(d, 5.0, 2.1) + rng.normal(0.0, 3.0, 40)
    s = _samples(d, pl)
    shuffled = list(s)
    rng.shuffle(shuffled)
    a, b = cs.fit_ci(s), cs.fit_ci(shuffled)
    assert a.ple == pytest.approx(b.ple, abs=1e-12)
    assert a.sigma_db == pytest.approx(b.sigma_db, abs=1e-12)


def test_fi_never_fits_worse_than_ci():
    # the extra intercept can only shrink the residual
    rng = np.random.default_rng(53)
    for _ in range(20):
        m = int(rng.integers(3, 50))
        d = rng.uniform(0.8, 60.0, m)
        pl = 10 * rng.uniform(1.0, 4.0) * np.log10(d) + rng.uniform(30, 70) \
            + rng.normal(0, 4.0, m)
        s = _samples(d, pl)
        ci = cs.fit_ci(s)
        fi = cs.fit_fi(s)
        assert fi.sigma_db <= ci.sigma_db + 1e-12


# ----------------------------------------------------------- sample validation

def test_plsample_validation():
    with pytest.raises(cs.InvalidInput):
        cs.PlSample("P001", 0.0, 5.0, 60.0)
    with pytest.raises(cs.InvalidInput):
        cs.PlSample("P001", 3.0, 5.0, float("nan"))


def test_plfit_offset_discipline():
    with pytest.raises(cs.InvalidInput):
        cs.PlFit(cs.PlModel.CI, 2.0, 1.0, 10, offset_db=40.0)
    with pytest.raises(cs.InvalidInput):
        cs.PlFit(cs.PlModel.FI, 2.0, 1.0, 10)


def test_plfit_evaluate_round_trip():
    ci = cs.PlFit(cs.PlModel.CI, 2.0, 0.0, 10)
    assert ci.evaluate(10.0, f_ghz=5.0) == pytest.approx(cs.eval_ci(10.0, 5.0, 2.0))
    fi = cs.PlFit(cs.PlModel.FI, 1.75, 0.0, 10, offset_db=48.93)
    assert fi.evaluate(10.0) == pytest.approx(cs.eval_fi(10.0, 1.75, 48.93))
