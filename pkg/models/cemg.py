"""
Coupled electromechanical gearbox: a three-phase induction machine in the abc
frame drives a spur-gear pair through a flexible coupling.

State layout (16 entries): six winding currents, the pinion and gear
translations along the line of action with their velocities, the pinion,
gear and rotor angles and their speeds. The mesh couples the translations and
rotations through the crack-dependent stiffness profile.

The stator-rotor mutual inductances depend on the electrical angle
pole_pairs * theta_r; derivatives with respect to the mechanical rotor angle
therefore carry a factor pole_pairs. The rotor-stator block is the transpose
of the stator-rotor block so that the inductance matrix is symmetric.
"""

import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import linalg, stats

from layers.Integrators import FixedStepRK4, stable_substeps
from models.tvms import CrackSpec, GearGeometry, StiffnessProfile, build_profile
from utils.exceptions import DomainError
from utils.tools import params_hash

STATE_NAMES = ('I_as', 'I_bs', 'I_cs', 'I_ar', 'I_br', 'I_cr',
               'y_p', 'y_g', 'dy_p', 'dy_g',
               'theta_p', 'theta_g', 'theta_r',
               'omega_p', 'omega_g', 'omega_r')
DERIVED_NAMES = ('ddy_p', 'N', 'T_e')
CHANNELS = STATE_NAMES + DERIVED_NAMES

_IDX = {name: i for i, name in enumerate(STATE_NAMES)}
# stator-rotor phase shifts: row as = [0, +2pi/3, -2pi/3], cyclic for bs, cs
_SHIFT = 2.0 * np.pi / 3.0 * (np.arange(3)[None, :] - np.arange(3)[:, None])

LBF_IN_TO_NM = 0.1129848290276167


@dataclass(frozen=True)
class MotorParams:
    R_s: float = 0.435
    R_r: float = 0.816
    L_ss: float = 0.0482
    L_rr: float = 0.0482
    L_ms: float = 0.0462
    pole_pairs: int = 2
    supply_amplitude_V: float = 149.7
    supply_frequency_Hz: float = 50.0

    def __post_init__(self):
        if self.R_s <= 0 or self.R_r <= 0:
            raise DomainError('winding resistances must be positive')
        if not (self.L_ss > self.L_ms > 0 and self.L_rr > self.L_ms):
            raise DomainError('inductances must satisfy L_ss > L_ms > 0 and L_rr > L_ms')
        if int(self.pole_pairs) < 1:
            raise DomainError(f'pole_pairs must be >= 1, got {self.pole_pairs}')
        if self.supply_amplitude_V < 0 or self.supply_frequency_Hz <= 0:
            raise DomainError('supply amplitude must be >= 0 and frequency > 0')
        for theta in np.linspace(0.0, 2.0 * np.pi / self.pole_pairs, 64, endpoint=False):
            L, _ = inductance_matrix(theta, self)
            if np.linalg.cond(L) > 1e12:
                raise DomainError(f'inductance matrix is singular at theta_r = {theta:.4f} rad')

    @property
    def synchronous_speed(self):
        """Mechanical synchronous speed (rad/s)."""
        return 2.0 * np.pi * self.supply_frequency_Hz / self.pole_pairs


@dataclass(frozen=True)
class MechParams:
    m_p: float = 0.96
    m_g: float = 2.88
    K_yp: float = 1.0e8
    K_yg: float = 1.0e8
    C_yp: float = 1.0e3
    C_yg: float = 1.0e3
    i_m: float = 5.0e-3
    i_p: float = 4.36e-4
    i_g: float = 1.0e-2
    K_t: float = 4.4e4
    C_t: float = 0.5
    r_p: float = None
    r_g: float = None
    B_v: float = 1.0e-3
    T_L: float = 25 * LBF_IN_TO_NM
    M_p: float = 0.0
    M_g: float = 0.0
    zeta: float = 0.07

    def __post_init__(self):
        for name in ('m_p', 'm_g', 'K_yp', 'K_yg', 'i_m', 'i_p', 'i_g', 'K_t'):
            if not getattr(self, name) > 0:
                raise DomainError(f'{name} must be positive')
        for name in ('C_yp', 'C_yg', 'C_t', 'B_v', 'zeta'):
            if getattr(self, name) < 0:
                raise DomainError(f'{name} must be non-negative')
        for name in ('r_p', 'r_g'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise DomainError(f'{name} must be positive')


@dataclass(frozen=True)
class SystemParams:
    motor: MotorParams = field(default_factory=MotorParams)
    mech: MechParams = field(default_factory=MechParams)
    geometry: GearGeometry = field(default_factory=GearGeometry)
    profile_samples: int = 1024

    def __post_init__(self):
        # base radii follow the geometry unless given explicitly
        if self.mech.r_p is None or self.mech.r_g is None:
            object.__setattr__(self, 'mech', replace(
                self.mech,
                r_p=self.mech.r_p or self.geometry.base_radius_pinion_m,
                r_g=self.mech.r_g or self.geometry.base_radius_gear_m))

    @property
    def shaft_frequency_Hz(self):
        return self.motor.supply_frequency_Hz / self.motor.pole_pairs

    @property
    def mesh_frequency_Hz(self):
        return self.shaft_frequency_Hz * self.geometry.teeth_pinion

    def with_load(self, load_torque_Nm):
        return replace(self, mech=replace(self.mech, T_L=float(load_torque_Nm)))

    def with_speed_load(self, shaft_frequency_Hz, load_torque_Nm):
        """Supply frequency set for a synchronous shaft speed of ``shaft_frequency_Hz``; amplitude unchanged."""
        if not shaft_frequency_Hz > 0:
            raise DomainError(f'shaft frequency must be positive, got {shaft_frequency_Hz}')
        motor = replace(self.motor, supply_frequency_Hz=float(shaft_frequency_Hz) * self.motor.pole_pairs)
        return replace(self.with_load(load_torque_Nm), motor=motor)

    def digest(self):
        return params_hash(asdict(self))


@dataclass
class SimResult:
    sample_rate_Hz: float
    t: np.ndarray
    channels: dict
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return self.t.shape[0]

    def __getitem__(self, name):
        return self.channels[name]

    def state(self, k=-1):
        return np.array([self.channels[name][k] for name in STATE_NAMES])


@dataclass(frozen=True)
class SteadyState:
    mean_omega_r: float
    mean_T_e: float
    slip: float
    synchronous_speed: float
    speed_trend_per_s: float
    converged: bool
    expected_T_e: float
    torque_balance_error: float


def _as_state(state):
    if isinstance(state, dict):
        return np.array([state[name] for name in STATE_NAMES], dtype=float)
    return np.asarray(state, dtype=float)


def inductance_matrix(theta_r, motor):
    """L(theta_r) and dL/dtheta_r, both 6x6, winding order as, bs, cs, ar, br, cr."""
    p = motor.pole_pairs
    arg = p * theta_r + _SHIFT
    m_sr = motor.L_ms * np.cos(arg)
    dm_sr = -p * motor.L_ms * np.sin(arg)

    L = np.empty((6, 6))
    L[:3, :3] = -0.5 * motor.L_ms
    L[3:, 3:] = -0.5 * motor.L_ms
    L[[0, 1, 2], [0, 1, 2]] = motor.L_ss
    L[[3, 4, 5], [3, 4, 5]] = motor.L_rr
    L[:3, 3:] = m_sr
    L[3:, :3] = m_sr.T

    dL = np.zeros((6, 6))
    dL[:3, 3:] = dm_sr
    dL[3:, :3] = dm_sr.T
    return L, dL


def electromagnetic_torque(state, motor):
    """
    Torque from the derivative of the magnetic co-energy with respect to the
    mechanical rotor angle: pole_pairs times the three sine groups of the
    stator-rotor current products. Works along the last axis of ``state``.
    """
    x = _as_state(state)
    ias, ibs, ics, iar, ibr, icr = (x[..., k] for k in range(6))
    th = motor.pole_pairs * x[..., _IDX['theta_r']]
    third = 2.0 * np.pi / 3.0
    return -motor.pole_pairs * motor.L_ms * (
        (ias * iar + ibs * ibr + ics * icr) * np.sin(th)
        + (ias * icr + ibs * iar + ics * ibr) * np.sin(th - third)
        + (ias * ibr + ibs * icr + ics * iar) * np.sin(th + third))


def mesh_force(state, k_t, c_t, mech):
    """N = K [(y_p - y_g) - (r_p th_p - r_g th_g)] + C d/dt[...]."""
    x = _as_state(state)
    g = lambda name: x[..., _IDX[name]]
    stretch = (g('y_p') - g('y_g')) - (mech.r_p * g('theta_p') - mech.r_g * g('theta_g'))
    rate = (g('dy_p') - g('dy_g')) - (mech.r_p * g('omega_p') - mech.r_g * g('omega_g'))
    return k_t * stretch + c_t * rate


def supply_voltage(t, motor):
    phase = 2.0 * np.pi * motor.supply_frequency_Hz * t - 2.0 * np.pi / 3.0 * np.arange(3)
    return motor.supply_amplitude_V * np.cos(phase)


def flat_profile(k_N_per_m, c_Ns_per_m, geometry, samples_per_period=64):
    """Constant K and C over a mesh period, used for studies without parametric excitation."""
    grid = np.linspace(0.0, geometry.mesh_period_rad, samples_per_period + 1)
    return StiffnessProfile(grid, np.full_like(grid, float(k_N_per_m)),
                            np.full_like(grid, float(c_Ns_per_m)), np.zeros(grid.shape, dtype=bool))


class CemgModel(object):
    """Right-hand side of the coupled equations for one parameter set and stiffness profile."""

    def __init__(self, params, profile):
        self.params = params
        self.profile = profile
        motor = params.motor
        self._R = np.array([motor.R_s] * 3 + [motor.R_r] * 3)
        self._third = 2.0 * np.pi / 3.0 * np.arange(3)
        self._omega_e = 2.0 * np.pi * motor.supply_frequency_Hz

    def derivatives(self, t, x):
        motor, mech = self.params.motor, self.params.mech
        i = x[:6]
        y_p, y_g, dy_p, dy_g, th_p, th_g, th_r, w_p, w_g, w_r = x[6:]

        L, dL = inductance_matrix(th_r, motor)
        v = np.zeros(6)
        v[:3] = motor.supply_amplitude_V * np.cos(self._omega_e * t - self._third)
        rhs = v - self._R * i - w_r * (dL @ i)
        try:
            di = linalg.solve(L, rhs, assume_a='sym', check_finite=False)
        except linalg.LinAlgError as e:
            raise DomainError(f'singular inductance matrix at theta_r = {th_r:.6g} rad') from e

        k_t, c_t = self.profile.lookup(th_p)
        N = (k_t * ((y_p - y_g) - (mech.r_p * th_p - mech.r_g * th_g))
             + c_t * ((dy_p - dy_g) - (mech.r_p * w_p - mech.r_g * w_g)))
        T_e = i[:3] @ dL[:3, 3:] @ i[3:]

        dx = np.empty(16)
        dx[:6] = di
        dx[6] = dy_p
        dx[7] = dy_g
        dx[8] = (-mech.K_yp * y_p - mech.C_yp * dy_p - N) / mech.m_p
        dx[9] = (-mech.K_yg * y_g - mech.C_yg * dy_g + N) / mech.m_g
        dx[10] = w_p
        dx[11] = w_g
        dx[12] = w_r
        dx[13] = (mech.r_p * N - mech.K_t * (th_p - th_r) - mech.C_t * (w_p - w_r) + mech.M_p) / mech.i_p
        dx[14] = (-mech.r_g * N + mech.M_g - mech.T_L - mech.B_v * w_g) / mech.i_g
        dx[15] = (-mech.K_t * (th_r - th_p) - mech.C_t * (w_r - w_p) - mech.B_v * w_r + T_e) / mech.i_m
        return dx

    def max_mechanical_frequency(self):
        """Highest undamped natural frequency (rad/s) of the mechanical chain at the stiffest mesh."""
        mech = self.params.mech
        k_max = float(np.max(self.profile.k_total_N_per_m))
        g = np.array([1.0, -1.0, -mech.r_p, mech.r_g, 0.0])
        K = k_max * np.outer(g, g)
        K[0, 0] += mech.K_yp
        K[1, 1] += mech.K_yg
        K[2:5:2, 2:5:2] += mech.K_t * np.array([[1.0, -1.0], [-1.0, 1.0]])
        M = np.diag([mech.m_p, mech.m_g, mech.i_p, mech.i_g, mech.i_m])
        eig = linalg.eigh(K, M, eigvals_only=True)
        return float(np.sqrt(max(eig.max(), 0.0)))


def derivatives(state, t, params, profile):
    return CemgModel(params, profile).derivatives(t, _as_state(state))


def resolve_substeps(substeps, params, profile, sample_rate_Hz):
    if substeps in (None, 'auto'):
        omega = CemgModel(params, profile).max_mechanical_frequency()
        return stable_substeps(omega, 1.0 / sample_rate_Hz)
    return int(substeps)


def simulate(params, crack, duration_s, sample_rate_Hz, initial=None, seed=None,
             substeps='auto', profile=None, progress=False):
    """
    Integrate the coupled model with fixed-step RK4 and sample every channel
    at ``sample_rate_Hz`` (n = round(duration * rate) samples from t = 0).
    """
    if duration_s <= 0:
        raise DomainError(f'duration must be positive, got {duration_s}')
    if sample_rate_Hz < 20.0 * params.mesh_frequency_Hz:
        raise DomainError(f'sample rate {sample_rate_Hz} Hz is below 20x the mesh frequency '
                          f'({params.mesh_frequency_Hz:.1f} Hz)')
    crack = crack if crack is not None else CrackSpec()
    if profile is None:
        mech = params.mech
        profile = build_profile(params.geometry, crack, params.profile_samples,
                                m_p=mech.m_p, m_g=mech.m_g, zeta=mech.zeta)
    n = int(round(duration_s * sample_rate_Hz))
    x0 = np.zeros(len(STATE_NAMES)) if initial is None else _as_state(initial).copy()
    n_sub = resolve_substeps(substeps, params, profile, sample_rate_Hz)

    model = CemgModel(params, profile)
    integrator = FixedStepRK4(model.derivatives, sample_rate_Hz, n_sub, STATE_NAMES)
    t, states = integrator.integrate(x0, n, progress=progress, desc=f'simulate crack={crack.depth_fraction:g}')

    channels = {name: states[:, k] for k, name in enumerate(STATE_NAMES)}
    channels.update(derived_channels(states, params, profile))

    metadata = {
        'params_hash': params.digest(),
        'crack_depth_fraction': crack.depth_fraction,
        'crack_angle_rad': crack.crack_angle_rad,
        'seed': seed,
        'substeps': n_sub,
        'duration_s': duration_s,
        'pole_pairs': params.motor.pole_pairs,
        'supply_frequency_Hz': params.motor.supply_frequency_Hz,
        'r_p': params.mech.r_p,
        'r_g': params.mech.r_g,
        'T_L': params.mech.T_L,
        'B_v': params.mech.B_v,
        'M_p': params.mech.M_p,
        'M_g': params.mech.M_g,
    }
    return SimResult(float(sample_rate_Hz), t, channels, metadata)


def derived_channels(states, params, profile):
    mech = params.mech
    k_t, c_t = profile.interpolate(states[:, _IDX['theta_p']])
    N = mesh_force(states, k_t, c_t, mech)
    ddy_p = (-mech.K_yp * states[:, _IDX['y_p']] - mech.C_yp * states[:, _IDX['dy_p']] - N) / mech.m_p
    return {'ddy_p': ddy_p, 'N': N, 'T_e': electromagnetic_torque(states, params.motor)}


def steady_state_summary(result, window_fraction=0.5, trend_tolerance=0.01):
    """Operating point over the final ``window_fraction`` of the record."""
    meta = result.metadata
    duration = len(result) / result.sample_rate_Hz
    if duration <= 1.0:
        raise DomainError(f'steady-state summary needs more than 1 s of data, got {duration:.3g} s')
    start = int(len(result) * (1.0 - window_fraction))
    t = result.t[start:]
    w_r = result['omega_r'][start:]
    w_g = result['omega_g'][start:]
    mean_w = float(np.mean(w_r))
    mean_te = float(np.mean(result['T_e'][start:]))

    sync = 2.0 * np.pi * meta['supply_frequency_Hz'] / meta['pole_pairs']
    slip = (sync - mean_w) / sync
    trend = stats.linregress(t, w_r).slope / abs(mean_w) if mean_w != 0 else 0.0
    converged = abs(trend) <= trend_tolerance
    if not converged:
        warnings.warn(f'rotor speed still drifting at {100 * trend:.2f} %/s; steady state not reached')

    expected = (meta['B_v'] * mean_w
                + meta['r_p'] / meta['r_g'] * (meta['T_L'] + meta['B_v'] * float(np.mean(w_g)) - meta['M_g'])
                - meta['M_p'])
    error = abs(mean_te - expected) / max(abs(expected), 1e-12)
    return SteadyState(mean_w, mean_te, float(slip), float(sync), float(trend), bool(converged),
                       float(expected), float(error))


def lbf_in_to_Nm(value):
    return value * LBF_IN_TO_NM
