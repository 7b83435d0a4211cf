import numpy as np
import pytest

from fintstab.control import NetworkControlSpec
from fintstab.delays import DelayProfile
from fintstab.integrate import IntegratorConfig
from fintstab.network import (LORENZ_A, LORENZ_B, LORENZ_DRIVE_INIT,
                              LORENZ_RESPONSE_INIT, NetworkModel,
                              SyncExperiment, error_index_series,
                              error_indices, estimate_lipschitz,
                              inner_sync_residual, lorenz_lipschitz_bound,
                              lorenz_preset, lorenz_rhs,
                              simulate_response_directly, simulate_sync,
                              sin_plus_linear)


def test_preset_matrices_and_delays():
    exp = lorenz_preset()
    m = exp.model
    assert np.allclose(m.A.sum(axis=1), 0.0)
    assert np.array_equal(m.A, LORENZ_A)
    assert np.array_equal(m.B, LORENZ_B)
    assert m.theta1 == 0.1 and m.theta2 == 1.0
    assert m.L_g == 3.0
    # pair delay for (i=1, j=1) follows the sin-indexed family
    d = m.pair_delay_times(10.0)
    assert 10.0 - d[0, 0] == pytest.approx(0.5 * (1 - 0.1 * abs(np.sin(3))) * 10)


def test_lorenz_rhs_vectorised():
    x = np.array([1.0, 2.0, 3.0])
    out = lorenz_rhs(x)
    assert np.allclose(out, [10.0, 28 - 2 - 3, 2 - 8.0])
    batch = lorenz_rhs(np.stack([x, x]))
    assert batch.shape == (2, 3)
    assert np.allclose(batch[0], out)


def test_g_lipschitz_constant():
    est = estimate_lipschitz(lambda x: sin_plus_linear(x),
                             [-10.0] * 3, [10.0] * 3, n_samples=5000, seed=1)
    assert est <= 3.0 + 1e-9
    assert est > 2.8
    assert lorenz_lipschitz_bound() > 0.0


def _small_model(B=None, delays=None):
    A = np.array([[-1.0, 1.0], [1.0, -1.0]])
    B = np.zeros((2, 2)) if B is None else B
    return NetworkModel(N=2, n=2, A=A, B=B, theta1=0.1, theta2=1.0,
                        f=lambda x: -np.asarray(x), g=sin_plus_linear,
                        L_f=1.0, L_g=3.0,
                        delays=delays or DelayProfile.proportional(0.5))


def test_identical_initial_states_zero_error():
    init = np.array([[1.0, -1.0], [0.5, 2.0]])
    exp = SyncExperiment(model=_small_model(), mode="outer",
                         drive_init=init.copy(), response_init=init.copy(),
                         integrator=IntegratorConfig(horizon=2.0, h=1e-3))
    res = simulate_sync(exp)
    assert np.abs(res.error.states).max() == 0.0
    assert np.allclose(res.response.states, res.drive.states)


def test_zero_input_swap_symmetry():
    d0 = np.array([[1.0, -1.0], [0.5, 2.0]])
    r0 = np.array([[0.0, 1.0], [1.5, -0.5]])
    cfg = IntegratorConfig(horizon=2.0, h=1e-3, zero_band=0.0)
    a = SyncExperiment(model=_small_model(), mode="outer", drive_init=d0,
                       response_init=r0, integrator=cfg)
    b = SyncExperiment(model=_small_model(), mode="outer", drive_init=r0,
                       response_init=d0, integrator=cfg)
    ra, rb = simulate_sync(a), simulate_sync(b)
    assert np.allclose(ra.error.states, -rb.error.states, atol=1e-12)


def test_error_indices_values():
    x = np.zeros((1, 9))
    x[0, 3:6] = [3.0, 4.0, 0.0]
    drive = type("T", (), {})()
    # use the vectorised series on raw arrays via a tiny trajectory
    from fintstab.integrate import HistoryTrajectory
    drive = HistoryTrajectory.from_arrays(0.0, 1.0, np.vstack([x, x]))
    resp_states = np.vstack([x, x]) + 1.0  # shift every component by 1
    resp = HistoryTrajectory.from_arrays(0.0, 1.0, resp_states)
    e1, e2, outer = error_indices(drive, resp, 0.0, 3, 3)
    assert e1 == pytest.approx(5.0)
    assert e2 == pytest.approx(5.0)
    assert outer == pytest.approx(3.0)  # 9 unit offsets: sqrt(9)
    s1, s2, so = error_index_series(drive, resp, 3, 3)
    assert s1[0] == pytest.approx(e1) and so[0] == pytest.approx(outer)


def test_index_consistency_zero_outer_error():
    exp = lorenz_preset(horizon=0.05, h=1e-3)
    exp.response_init = exp.drive_init.copy()
    res = simulate_sync(exp)
    _, _, outer = error_index_series(res.drive, res.response, 3, 3)
    assert np.abs(outer).max() == 0.0


def test_error_system_matches_direct_response():
    # full-node static control depends only on e, so the two integration
    # routes must agree to discretisation accuracy
    control = NetworkControlSpec(kind="full", theta3=10.0, theta4=5.0)
    exp = lorenz_preset(horizon=1.0, h=5e-4, control=control)
    exp.integrator = IntegratorConfig(horizon=1.0, h=5e-4, zero_band=0.0)
    res = simulate_sync(exp)
    direct = simulate_response_directly(exp, res.drive)
    diff = np.abs(direct.states - res.response.states).max()
    assert diff < 10.0 * 5e-4  # within 10 h per unit time (horizon 1)


def test_inner_sync_residual_reports_both_sums():
    exp = lorenz_preset(horizon=0.2, h=1e-3)
    model = exp.model
    from fintstab.integrate import integrate

    def ref_rhs(t, phi, traj):
        return model.f(phi)

    ref = integrate(ref_rhs, np.array([1.0, 1.0, 1.0]), model.delays,
                    IntegratorConfig(horizon=0.2, h=1e-3))
    resid = inner_sync_residual(model, ref, n_samples=16)
    assert set(resid) == {"row_max", "col_max"}
    # the preset's B does not satisfy the inner-sync constraint
    assert resid["row_max"] > 0.0


def test_uncontrolled_preset_desynchronized():
    exp = lorenz_preset(horizon=2.0, h=5e-4)
    res = simulate_sync(exp)
    _, _, outer = error_index_series(res.drive, res.response, 3, 3)
    assert outer.min() > 0.1


def test_model_validation():
    with pytest.raises(ValueError):
        NetworkModel(N=2, n=2, A=np.array([[-1.0, 0.5], [1.0, -1.0]]),
                     B=np.zeros((2, 2)), theta1=0.1, theta2=1.0,
                     f=lambda x: x, g=lambda x: x, L_f=1.0, L_g=1.0,
                     delays=DelayProfile.proportional(0.5))
    with pytest.raises(ValueError):
        NetworkModel(N=2, n=2, A=np.array([[-1.0, 1.0], [1.0, -1.0]]),
                     B=np.zeros((3, 3)), theta1=0.1, theta2=1.0,
                     f=lambda x: x, g=lambda x: x, L_f=1.0, L_g=1.0,
                     delays=DelayProfile.proportional(0.5))


def test_experiment_validation():
    model = _small_model()
    with pytest.raises(ValueError):
        SyncExperiment(model=model, mode="outer",
                       response_init=np.zeros((2, 2)))  # missing drive
    with pytest.raises(ValueError):
        SyncExperiment(model=model, mode="sideways",
                       response_init=np.zeros((2, 2)),
                       drive_init=np.zeros((2, 2)))


def test_inner_mode_runs_and_reports_residual():
    model = _small_model()
    exp = SyncExperiment(model=model, mode="inner",
                         reference_init=np.array([1.0, -1.0]),
                         response_init=np.array([[1.0, -1.0], [2.0, 0.5]]),
                         integrator=IntegratorConfig(horizon=1.0, h=1e-3))
    res = simulate_sync(exp)
    assert res.inner_residual is not None
    # node 1 starts on the reference; with B=0 and linear f it stays close
    assert res.response.states.shape[1] == 4
