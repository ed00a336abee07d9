import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from models.cemg import (CHANNELS, STATE_NAMES, CemgModel, MechParams, MotorParams, SystemParams, derivatives,
                         electromagnetic_torque, flat_profile, inductance_matrix, lbf_in_to_Nm, mesh_force,
                         resolve_substeps, simulate, steady_state_summary, supply_voltage)
from models.tvms import CrackSpec
from utils.exceptions import DomainError
from utils.metrics import rms, severity_trend

IDX = {name: i for i, name in enumerate(STATE_NAMES)}
THIRD = 2 * math.pi / 3


def random_state(rng):
    x = np.zeros(16)
    x[:6] = rng.normal(0.0, 10.0, 6)
    x[6:10] = rng.normal(0.0, 1e-5, 4)
    x[10:13] = rng.uniform(0.0, 2 * math.pi, 3)
    x[13:16] = rng.uniform(100.0, 160.0, 3)
    return x


def test_inductance_matrix_pattern():
    motor = MotorParams()
    L, dL = inductance_matrix(0.0, motor)
    assert_allclose(L, L.T, atol=0)
    assert_allclose(L[0, 3:], motor.L_ms * np.array([1.0, math.cos(THIRD), math.cos(-THIRD)]), rtol=1e-12)
    assert_allclose(np.diag(L), [motor.L_ss] * 3 + [motor.L_rr] * 3)
    assert L[0, 1] == -0.5 * motor.L_ms


def test_inductance_matrix_periodic_and_derivative(rng):
    motor = MotorParams()
    for theta in rng.uniform(0.0, 2 * math.pi, 10):
        L, dL = inductance_matrix(theta, motor)
        L2, _ = inductance_matrix(theta + 2 * math.pi, motor)
        assert_allclose(L, L2, atol=1e-14)
        h = 1e-6
        fd = (inductance_matrix(theta + h, motor)[0] - inductance_matrix(theta - h, motor)[0]) / (2 * h)
        scale = motor.pole_pairs * motor.L_ms
        assert np.max(np.abs(fd - dL)) <= 1e-8 * scale


def test_singular_motor_rejected():
    with pytest.raises(DomainError):
        MotorParams(L_ss=0.04, L_ms=0.0462)


def test_torque_vanishes_without_rotor_current(rng):
    motor = MotorParams()
    x = random_state(rng)
    x[3:6] = 0.0
    assert electromagnetic_torque(x, motor) == 0.0


def test_torque_periodic(rng):
    motor = MotorParams()
    x = random_state(rng)
    y = x.copy()
    y[IDX['theta_r']] += 2 * math.pi
    assert electromagnetic_torque(x, motor) == pytest.approx(electromagnetic_torque(y, motor), rel=1e-9, abs=1e-9)


def test_torque_is_coenergy_derivative(rng):
    motor = MotorParams()
    h = 1e-6
    for _ in range(100):
        x = random_state(rng)
        i, theta = x[:6], x[IDX['theta_r']]
        coenergy = lambda th: 0.5 * i @ inductance_matrix(th, motor)[0] @ i
        fd = (coenergy(theta + h) - coenergy(theta - h)) / (2 * h)
        te = electromagnetic_torque(x, motor)
        scale = motor.pole_pairs * motor.L_ms * np.sum(np.abs(i[:3])) * np.sum(np.abs(i[3:]))
        assert abs(te - fd) <= 1e-6 * scale


def test_torque_vectorised(rng):
    motor = MotorParams()
    states = np.array([random_state(rng) for _ in range(5)])
    assert_allclose(electromagnetic_torque(states, motor),
                    [electromagnetic_torque(s, motor) for s in states], rtol=1e-12)


def test_mesh_force(params):
    mech = params.mech
    x = np.zeros(16)
    assert mesh_force(x, 1e8, 100.0, mech) == 0.0
    x[IDX['y_p']] = 2e-6
    assert mesh_force(x, 1e8, 100.0, mech) == pytest.approx(200.0)
    # rigid rolling: translation matches the rotation at the base circles
    x = np.zeros(16)
    x[IDX['theta_p']], x[IDX['theta_g']] = 1e-3, 2e-4
    x[IDX['y_p']] = mech.r_p * 1e-3 - mech.r_g * 2e-4
    x[IDX['omega_p']], x[IDX['omega_g']] = 3.0, 1.0
    x[IDX['dy_p']] = mech.r_p * 3.0 - mech.r_g * 1.0
    assert mesh_force(x, 1e8, 100.0, mech) == pytest.approx(0.0, abs=1e-9)


def test_zero_state_zero_supply_is_equilibrium(params):
    quiet = replace(params, motor=replace(params.motor, supply_amplitude_V=0.0),
                    mech=replace(params.mech, T_L=0.0))
    profile = flat_profile(2e8, 1e3, params.geometry)
    assert np.all(derivatives(np.zeros(16), 0.0, quiet, profile) == 0.0)


def scalar_electrical_residual(x, dx, t, motor):
    """Voltage equations of the abc windings written out term by term: v = R i + d(psi)/dt."""
    ias, ibs, ics, iar, ibr, icr = x[:6]
    das, dbs, dcs, dar, dbr, dcr = dx[:6]
    p = motor.pole_pairs
    th = p * x[IDX['theta_r']]
    w = p * x[IDX['omega_r']]
    Ls, Lr, M = motor.L_ss, motor.L_rr, motor.L_ms
    c = lambda a: M * math.cos(a)
    s = lambda a: -M * math.sin(a) * w
    v = supply_voltage(t, motor)
    res = np.empty(6)
    res[0] = v[0] - motor.R_s * ias - (Ls * das - M / 2 * dbs - M / 2 * dcs
                                      + c(th) * dar + c(th + THIRD) * dbr + c(th - THIRD) * dcr
                                      + s(th) * iar + s(th + THIRD) * ibr + s(th - THIRD) * icr)
    res[1] = v[1] - motor.R_s * ibs - (-M / 2 * das + Ls * dbs - M / 2 * dcs
                                      + c(th - THIRD) * dar + c(th) * dbr + c(th + THIRD) * dcr
                                      + s(th - THIRD) * iar + s(th) * ibr + s(th + THIRD) * icr)
    res[2] = v[2] - motor.R_s * ics - (-M / 2 * das - M / 2 * dbs + Ls * dcs
                                      + c(th + THIRD) * dar + c(th - THIRD) * dbr + c(th) * dcr
                                      + s(th + THIRD) * iar + s(th - THIRD) * ibr + s(th) * icr)
    res[3] = 0.0 - motor.R_r * iar - (Lr * dar - M / 2 * dbr - M / 2 * dcr
                                     + c(th) * das + c(th - THIRD) * dbs + c(th + THIRD) * dcs
                                     + s(th) * ias + s(th - THIRD) * ibs + s(th + THIRD) * ics)
    res[4] = 0.0 - motor.R_r * ibr - (-M / 2 * dar + Lr * dbr - M / 2 * dcr
                                     + c(th + THIRD) * das + c(th) * dbs + c(th - THIRD) * dcs
                                     + s(th + THIRD) * ias + s(th) * ibs + s(th - THIRD) * ics)
    res[5] = 0.0 - motor.R_r * icr - (-M / 2 * dar - M / 2 * dbr + Lr * dcr
                                     + c(th - THIRD) * das + c(th + THIRD) * dbs + c(th) * dcs
                                     + s(th - THIRD) * ias + s(th + THIRD) * ibs + s(th) * ics)
    scale = motor.supply_amplitude_V + max(motor.R_s, motor.R_r) * np.max(np.abs(x[:6]))
    return np.max(np.abs(res)) / scale


def test_matrix_form_matches_scalar_equations(params, profiles, rng):
    model = CemgModel(params, profiles[0.0])
    for _ in range(100):
        x = random_state(rng)
        t = rng.uniform(0.0, 1.0)
        dx = model.derivatives(t, x)
        assert scalar_electrical_residual(x, dx, t, params.motor) <= 1e-10


def test_mechanical_equations(params, profiles, rng):
    profile = profiles[0.2]
    mech = params.mech
    for _ in range(5):
        x = random_state(rng)
        dx = derivatives(x, 0.1, params, profile)
        k_t, c_t = profile.lookup(x[IDX['theta_p']])
        N = mesh_force(x, k_t, c_t, mech)
        assert dx[IDX['dy_p']] == pytest.approx(
            (-mech.K_yp * x[IDX['y_p']] - mech.C_yp * x[IDX['dy_p']] - N) / mech.m_p, rel=1e-12)
        assert dx[IDX['dy_g']] == pytest.approx(
            (-mech.K_yg * x[IDX['y_g']] - mech.C_yg * x[IDX['dy_g']] + N) / mech.m_g, rel=1e-12)
        te = electromagnetic_torque(x, params.motor)
        expected = (-mech.K_t * (x[IDX['theta_r']] - x[IDX['theta_p']])
                    - mech.C_t * (x[IDX['omega_r']] - x[IDX['omega_p']]) - mech.B_v * x[IDX['omega_r']] + te)
        assert dx[IDX['omega_r']] == pytest.approx(expected / mech.i_m, rel=1e-9, abs=1e-6)
        assert dx[IDX['theta_p']] == x[IDX['omega_p']]


def test_system_params_defaults(params):
    assert params.mech.r_p == pytest.approx(params.geometry.base_radius_pinion_m)
    assert params.mech.r_g == pytest.approx(params.geometry.base_radius_gear_m)
    assert params.shaft_frequency_Hz == 25.0
    assert params.mesh_frequency_Hz == 475.0
    assert lbf_in_to_Nm(25.0) == pytest.approx(2.8247, abs=1e-4)
    assert params.with_load(5.0).mech.T_L == 5.0
    assert params.digest() == SystemParams().digest()
    assert params.digest() != params.with_load(5.0).digest()


def test_invalid_mech_params():
    with pytest.raises(DomainError):
        MechParams(m_p=0.0)
    with pytest.raises(ValueError):
        MechParams(C_t=-1.0)


def test_simulate_sample_count_and_channels(params):
    result = simulate(params, CrackSpec(0.2), 0.02, 10000.0)
    assert len(result) == 200
    assert set(result.channels) == set(CHANNELS)
    assert all(result[name].shape == (200,) for name in CHANNELS)
    assert_allclose(np.diff(result.t), 1e-4, rtol=1e-9)
    assert result.metadata['crack_depth_fraction'] == 0.2
    assert result.metadata['params_hash'] == params.digest()


def test_simulate_rejects_bad_inputs(params):
    with pytest.raises(DomainError):
        simulate(params, CrackSpec(), 0.0, 10000.0)
    with pytest.raises(DomainError):
        simulate(params, CrackSpec(), 0.1, 5000.0)


def test_simulate_zero_supply_stays_at_rest(params):
    quiet = replace(params, motor=replace(params.motor, supply_amplitude_V=0.0),
                    mech=replace(params.mech, T_L=0.0))
    result = simulate(quiet, CrackSpec(0.4), 0.01, 10000.0)
    for name in CHANNELS:
        assert np.all(result[name] == 0.0)


def test_simulate_deterministic(params):
    a = simulate(params, CrackSpec(0.4), 0.01, 10000.0, seed=7)
    b = simulate(params, CrackSpec(0.4), 0.01, 10000.0, seed=7)
    for name in CHANNELS:
        assert np.array_equal(a[name], b[name])


def test_auto_substeps_keep_rk4_stable(params, profiles):
    n = resolve_substeps('auto', params, profiles[0.0], 10000.0)
    omega = CemgModel(params, profiles[0.0]).max_mechanical_frequency()
    assert omega / (10000.0 * n) <= 1.0
    assert resolve_substeps(3, params, profiles[0.0], 10000.0) == 3


@pytest.mark.slow
def test_rk4_global_order(params):
    # a constant mesh stiffness keeps the right-hand side smooth; the motor starts up under load
    profile = flat_profile(5e7, 1e3, params.geometry)
    runs = [simulate(params, CrackSpec(), 0.1, 10000.0, substeps=n, profile=profile) for n in (16, 32, 64)]
    for name in ('I_as', 'I_ar', 'omega_r', 'y_p', 'theta_g'):
        scale = np.max(np.abs(runs[2][name]))
        e1 = np.max(np.abs(runs[0][name] - runs[1][name]))
        e2 = np.max(np.abs(runs[1][name] - runs[2][name]))
        assert 3.5 <= math.log2(e1 / e2) <= 4.5, name
        # halving the step moves the final state by less than 1e-4 of the channel scale
        assert abs(runs[1][name][-1] - runs[2][name][-1]) < 1e-4 * scale, name


@pytest.fixture(scope='module')
def steady_runs(params):
    runs = {}
    for name, load in (('unloaded', 0.0), ('loaded', params.mech.T_L), ('double', 2 * params.mech.T_L)):
        p = params.with_load(load)
        if name == 'unloaded':
            p = replace(p, mech=replace(p.mech, B_v=0.0))
        runs[name] = steady_state_summary(simulate(p, CrackSpec(), 1.2, 10000.0))
    return runs


@pytest.mark.slow
def test_unloaded_machine_runs_near_synchronous(steady_runs):
    summary = steady_runs['unloaded']
    assert abs(summary.slip) < 0.01
    assert summary.synchronous_speed == pytest.approx(2 * math.pi * 25.0)


@pytest.mark.slow
def test_slip_grows_with_load(steady_runs):
    assert steady_runs['double'].slip > steady_runs['loaded'].slip > 0.0
    assert steady_runs['loaded'].slip < 1.0


@pytest.mark.slow
def test_torque_balance_at_steady_state(steady_runs):
    summary = steady_runs['loaded']
    assert summary.converged
    assert summary.torque_balance_error < 0.05


def test_steady_state_needs_a_second(params):
    with pytest.raises(DomainError):
        steady_state_summary(simulate(params, CrackSpec(), 0.02, 10000.0))


@pytest.mark.slow
def test_vibration_grows_with_crack_depth(params):
    # final second after a 0.5 s start-up
    rms_by_depth = {}
    for depth in (0.0, 0.3, 0.6):
        result = simulate(params, CrackSpec(depth), 1.5, 10000.0)
        rms_by_depth[depth] = rms(result['ddy_p'][-10000:])
    trend = severity_trend({'25Hz-25lb': rms_by_depth})['25Hz-25lb']
    assert trend['depths'] == [0.0, 0.3, 0.6]
    assert trend['non_decreasing'], trend['rms']


@pytest.mark.slow
def test_speed_load_sets_the_running_speed(params):
    fast = params.with_speed_load(30.0, params.mech.T_L)
    assert fast.motor.supply_frequency_Hz == 60.0
    summary = steady_state_summary(simulate(fast, CrackSpec(), 1.5, 12000.0))
    assert summary.synchronous_speed == pytest.approx(2 * math.pi * 30.0)
    assert 0.0 < summary.slip < 0.05
    with pytest.raises(DomainError):
        params.with_speed_load(0.0, 1.0)
