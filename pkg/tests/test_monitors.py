import math

import numpy as np
import pytest

from fintstab.delays import DelayProfile, RateFunction
from fintstab.integrate import (HistoryTrajectory, IntegratorConfig,
                                RunningWindowSup, delayed_linear_rhs,
                                integrate)
from fintstab.monitors import (contact_point_decrease, detect_phases,
                               functional_series, trace_functional)


def _static_run(c3=2.1, c4=3.5, horizon=30.0):
    profile = DelayProfile.proportional(0.5)
    rhs = delayed_linear_rhs(1.0, 2.0, profile,
                             control=lambda t, p: -np.sign(p) * (c3 + c4 * np.abs(p)))
    cfg = IntegratorConfig(horizon=horizon, h=1e-3, zero_band=c3 * 1e-3)
    return integrate(rhs, [2.0], profile, cfg), profile


RATE = RateFunction.power(0.1)


def test_zero_trajectory_gives_zero_trace():
    traj = HistoryTrajectory.from_arrays(0.0, 0.01, np.zeros((501, 2)))
    prof = DelayProfile.proportional(0.5)
    tr = trace_functional(traj, "v1", RATE, prof)
    assert (tr.values == 0.0).all()
    assert (tr.window_sups == 0.0).all()


def test_v2_on_settled_trajectory_is_linear():
    traj = HistoryTrajectory.from_arrays(0.0, 0.01, np.zeros((501, 1)))
    prof = DelayProfile.proportional(0.5)
    eps2 = 0.09
    tr = trace_functional(traj, "v2", RATE, prof, eps2=eps2)
    assert np.allclose(tr.values, eps2 * traj.times)
    assert (np.diff(tr.values) > 0.0).all()
    assert np.allclose(tr.window_sups, tr.values)  # sup of increasing series


def test_functional_series_requires_inputs():
    traj = HistoryTrajectory.from_arrays(0.0, 0.01, np.zeros((11, 1)))
    with pytest.raises(ValueError):
        functional_series(traj, "v2", RATE)  # missing eps2
    with pytest.raises(ValueError):
        functional_series(traj, "vbar1", RATE)  # missing xi
    with pytest.raises(ValueError):
        functional_series(traj, "v3", RATE)  # missing gain data
    with pytest.raises(ValueError):
        functional_series(traj, "v99", RATE)


def test_window_sup_trace_matches_bruteforce_scan():
    traj, prof = _static_run(horizon=5.0)
    tr = trace_functional(traj, "v1", RATE, prof)
    rng = np.random.default_rng(3)
    vals = tr.values
    h = traj.h
    for k in sorted(rng.integers(1, len(vals), size=50).tolist()):
        t = k * h
        a = t - prof.envelope(t)
        u = a / h
        k_lo = max(0, int(math.ceil(u - 1e-12)))
        brute = vals[k_lo:k + 1].max()
        kb = max(0, int(math.floor(u)))
        frac = u - kb
        boundary = (1 - frac) * vals[kb] + frac * vals[min(kb + 1, k)]
        assert tr.window_sups[k] == pytest.approx(max(brute, float(boundary)),
                                                  rel=1e-12)


def test_contact_points_pass_on_feasible_run():
    traj, prof = _static_run()
    tr = trace_functional(traj, "v1", RATE, prof)
    contacts = contact_point_decrease(tr, traj)
    assert contacts  # this run produces real contacts, not a vacuous pass
    assert all(c.ok for c in contacts)


def test_contact_points_fail_on_infeasible_run():
    traj, prof = _static_run(c4=1.0, horizon=10.0)
    tr = trace_functional(traj, "v1", RATE, prof)
    contacts = contact_point_decrease(tr, traj)
    assert any(not c.ok for c in contacts)


def test_w1_nonincreasing_on_feasible_run():
    traj, prof = _static_run()
    tr = trace_functional(traj, "v1", RATE, prof)
    w = tr.window_sups[tr.start_index:]
    assert (np.diff(w) <= 1e-9).all()


def test_detect_phases_pure_sign_system():
    prof = DelayProfile.constant(0.0)
    cfg = IntegratorConfig(horizon=4.0, h=1e-3, zero_band=1e-3)
    traj = integrate(lambda t, p, tr: -np.sign(p), [2.0], prof, cfg)
    rep = detect_phases(traj, prof, "two", eps2=1.0, start_time=0.0)
    assert rep.T1 == pytest.approx(1.0, abs=2e-3)
    assert rep.T_settle == pytest.approx(2.0, abs=2e-3)
    assert rep.envelope_violations == 0


def test_detect_phases_feasible_run_respects_bound():
    traj, prof = _static_run()
    eps2 = 0.9 * 0.1
    rep = detect_phases(traj, prof, "two", eps2, start_time=1.0)
    assert math.isfinite(rep.T1)
    assert math.isfinite(rep.T_settle)
    assert rep.T_settle >= rep.T1
    assert rep.T_settle <= rep.T1 + 1.0 / eps2
    assert rep.envelope_violations == 0


def test_detect_phases_never_settling_run():
    traj, prof = _static_run(c4=1.0, horizon=10.0)
    rep = detect_phases(traj, prof, "two", 0.09, start_time=1.0)
    assert rep.T1 == math.inf
    assert rep.T_settle == math.inf


def test_adaptive_functionals_with_gain_columns():
    times = np.arange(0.0, 1.01, 0.01)
    n = times.shape[0]
    states = np.exp(-times)[:, None]
    gains = np.column_stack([np.linspace(0.0, 2.0, n), np.linspace(0.0, 3.0, n)])
    traj = HistoryTrajectory.from_arrays(0.0, 0.01, states,
                                         gain_names=("c3", "c4"), gains=gains)
    stars = {"c3": 2.0, "c4": 3.0}
    rates = {"d1": 0.1, "d2": 0.1, "d3": 0.1}
    v3 = functional_series(traj, "v3", RATE, gain_stars=stars, rates=rates)
    mu = RATE.mu(times)
    expect = mu * states[:, 0] ** 2 + (gains[:, 1] - 3.0) ** 2 / 0.1
    assert np.allclose(v3, expect)
    v4 = functional_series(traj, "v4", RATE, eps2=0.05, gain_stars=stars,
                           rates=rates)
    expect4 = (np.abs(states[:, 0])
               + (gains[:, 0] - 2.0) ** 2 / 0.2
               + (gains[:, 1] - 3.0) ** 2 / 0.2 + 0.05 * times)
    assert np.allclose(v4, expect4)


def test_network_functional_weighting():
    times = np.arange(0.0, 0.1, 0.01)
    n = times.shape[0]
    states = np.ones((n, 6))
    traj = HistoryTrajectory.from_arrays(0.0, 0.01, states)
    xi = np.array([0.25, 0.75])
    v = functional_series(traj, "vbar1", RATE, xi=xi)
    # sum_i xi_i e_i^T e_i with every component 1: 3*(0.25 + 0.75) = 3
    assert np.allclose(v, RATE.mu(times) * 3.0)
