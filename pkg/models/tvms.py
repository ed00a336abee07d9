"""
Crack-dependent time-varying mesh stiffness (TVMS) of a spur gear pair.

Tooth compliance follows the potential energy method: bending, shear and
axial-compressive energy of the tooth body integrated along the involute from
the base circle to the contact point, the Sainsot fillet-foundation formula
and a nonlinear Hertzian contact stiffness linearised at a nominal force.

A root crack on the pinion tooth starts at the root point (x = 0, y = h_c) and
runs straight towards the tooth centre line at angle v to it. Its length is
q = depth_fraction * q_max, where q_max = h_c / sin(v) reaches the centre
line, so the tip sits at height h_q = h_c - q sin(v) and horizontal reach
x_q = q cos(v). Sections within the reach lose the material behind the crack:
the crack side contributes at most h_q, the other side keeps its full half
thickness. Sections beyond the tip are intact.

Angles follow the usual convention: alpha_2 is the half tooth angle on the
base circle, alpha_1 the angle between the contact force and the normal of
the tooth centre line, and the integration variable alpha runs from -alpha_1
(contact point) to alpha_2 (base circle).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from utils.exceptions import DomainError, GeometryError

# Sainsot et al. (2004) polynomial coefficients, rows L, M, P, Q
_SAINSOT = np.array([
    # A_i         B_i          C_i          D_i          E_i      F_i
    [-5.574e-5, -1.9986e-3, -2.3015e-4, 4.7702e-3, 0.0271, 6.8045],
    [60.111e-5, 28.100e-3, -83.431e-4, -9.9256e-3, 0.1624, 0.9086],
    [-50.952e-5, 185.50e-3, 0.0538e-4, 53.300e-3, 0.2895, 0.9236],
    [-6.2042e-5, 9.0889e-3, -4.0964e-4, 7.8297e-3, -0.1472, 0.6904],
])

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(64)


def involute(angle):
    return np.tan(angle) - angle


@dataclass(frozen=True)
class GearGeometry:
    teeth_pinion: int = 19
    teeth_gear: int = 48
    module_mm: float = 3.2
    pressure_angle_rad: float = math.radians(20.0)
    face_width_m: float = 0.016
    youngs_modulus_Pa: float = 2.068e11
    poisson_ratio: float = 0.3
    addendum_coeff: float = 1.0
    clearance_coeff: float = 0.25
    hub_bore_radius_pinion_m: float = 0.010
    hub_bore_radius_gear_m: float = 0.020
    nominal_force_N: float = 100.0
    structural_coupling_fraction: float = 0.1

    def __post_init__(self):
        if self.teeth_pinion < 12 or self.teeth_gear < 12:
            raise GeometryError(f'tooth counts must be >= 12, got {self.teeth_pinion}/{self.teeth_gear}')
        if not 0.0 < self.pressure_angle_rad < math.pi / 4:
            raise GeometryError(f'pressure angle must lie in (0, pi/4), got {self.pressure_angle_rad}')
        for name in ('module_mm', 'face_width_m', 'youngs_modulus_Pa', 'addendum_coeff',
                     'hub_bore_radius_pinion_m', 'hub_bore_radius_gear_m', 'nominal_force_N'):
            if not getattr(self, name) > 0:
                raise GeometryError(f'{name} must be positive')
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise GeometryError(f'poisson ratio must lie in [0, 0.5), got {self.poisson_ratio}')
        if not 0.0 <= self.structural_coupling_fraction < 1.0:
            raise GeometryError('structural_coupling_fraction must lie in [0, 1)')
        if not 1.0 < self.contact_ratio < 2.0:
            raise GeometryError(f'contact ratio must lie in (1, 2), got {self.contact_ratio:.4f}')
        if self.start_of_action_m <= 0.0:
            raise GeometryError('path of contact starts below the pinion base circle (interference)')
        for z in (self.teeth_pinion, self.teeth_gear):
            if self.root_radius(z) <= self.hub_bore_radius(z):
                raise GeometryError(f'root radius of the {z}-tooth wheel is inside its hub bore')

    # -- radii ---------------------------------------------------------------
    @property
    def module_m(self):
        return self.module_mm * 1e-3

    def pitch_radius(self, z):
        return self.module_m * z / 2.0

    def base_radius(self, z):
        return self.module_m * z * math.cos(self.pressure_angle_rad) / 2.0

    def addendum_radius(self, z):
        return self.pitch_radius(z) + self.addendum_coeff * self.module_m

    def root_radius(self, z):
        return self.pitch_radius(z) - (self.addendum_coeff + self.clearance_coeff) * self.module_m

    def hub_bore_radius(self, z):
        return self.hub_bore_radius_pinion_m if z == self.teeth_pinion else self.hub_bore_radius_gear_m

    def half_base_angle(self, z):
        """alpha_2: half tooth angle on the base circle."""
        return math.pi / (2.0 * z) + involute(self.pressure_angle_rad)

    @property
    def base_radius_pinion_m(self):
        return self.base_radius(self.teeth_pinion)

    @property
    def base_radius_gear_m(self):
        return self.base_radius(self.teeth_gear)

    @property
    def root_radius_m(self):
        return self.root_radius(self.teeth_pinion)

    # -- line of action ------------------------------------------------------
    @property
    def center_distance_m(self):
        return self.pitch_radius(self.teeth_pinion) + self.pitch_radius(self.teeth_gear)

    @property
    def line_of_centers_m(self):
        """Length of the line of action between the two base tangent points."""
        return self.center_distance_m * math.sin(self.pressure_angle_rad)

    @property
    def start_of_action_m(self):
        r_a, r_b = self.addendum_radius(self.teeth_gear), self.base_radius_gear_m
        return self.line_of_centers_m - math.sqrt(r_a ** 2 - r_b ** 2)

    @property
    def end_of_action_m(self):
        r_a, r_b = self.addendum_radius(self.teeth_pinion), self.base_radius_pinion_m
        return math.sqrt(r_a ** 2 - r_b ** 2)

    @property
    def base_pitch_m(self):
        return 2.0 * math.pi * self.base_radius_pinion_m / self.teeth_pinion

    @property
    def contact_ratio(self):
        return (self.end_of_action_m - self.start_of_action_m) / self.base_pitch_m

    @property
    def mesh_period_rad(self):
        """Pinion rotation per mesh cycle."""
        return 2.0 * math.pi / self.teeth_pinion

    @property
    def engagement_window_rad(self):
        """Pinion rotation during which one tooth pair stays in contact."""
        return self.contact_ratio * self.mesh_period_rad

    @property
    def double_contact_span_rad(self):
        return (self.contact_ratio - 1.0) * self.mesh_period_rad

    @property
    def hertz_stiffness(self):
        """Hertzian contact stiffness, E^0.9 L^0.8 F^0.1 / 1.275, at the nominal force."""
        return (self.youngs_modulus_Pa ** 0.9 * self.face_width_m ** 0.8
                * self.nominal_force_N ** 0.1 / 1.275)

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class CrackSpec:
    depth_fraction: float = 0.0
    crack_angle_rad: float = math.pi / 4

    def __post_init__(self):
        if not 0.0 <= self.depth_fraction < 1.0:
            raise GeometryError(f'crack depth fraction must lie in [0, 1), got {self.depth_fraction}')
        if not 0.0 < self.crack_angle_rad < math.pi / 2:
            raise GeometryError(f'crack angle must lie in (0, pi/2), got {self.crack_angle_rad}')

    @property
    def healthy(self):
        return self.depth_fraction == 0.0

    def crack_depth_m(self, geometry):
        """Crack length along its path; 100 % reaches the tooth centre line."""
        h_c = geometry.base_radius_pinion_m * math.sin(geometry.half_base_angle(geometry.teeth_pinion))
        return self.depth_fraction * h_c / math.sin(self.crack_angle_rad)

    def tip(self, h_c):
        """(h_q, x_q): crack-tip height above the centre line and horizontal reach from the root."""
        q = self.depth_fraction * h_c / math.sin(self.crack_angle_rad)
        return h_c - q * math.sin(self.crack_angle_rad), q * math.cos(self.crack_angle_rad)


@dataclass(frozen=True)
class ToothDeflection:
    """Per-tooth deflection along the line of action (m)."""
    tooth_body: np.ndarray
    fillet_foundation: np.ndarray
    structural_coupling: np.ndarray

    @property
    def total(self):
        return self.tooth_body + self.fillet_foundation + self.structural_coupling


@dataclass(frozen=True)
class StiffnessProfile:
    mesh_angle_grid: np.ndarray
    k_total_N_per_m: np.ndarray
    c_total_Ns_per_m: np.ndarray
    region_flags: np.ndarray
    depth_fraction: float = 0.0
    k_pair_entering: np.ndarray = field(default=None, repr=False)
    k_pair_leaving: np.ndarray = field(default=None, repr=False)

    @property
    def mesh_period_rad(self):
        return float(self.mesh_angle_grid[-1])

    @property
    def regions(self):
        return np.where(self.region_flags, 'double', 'single')

    def lookup(self, mesh_angle):
        """Linear interpolation of (K, C) at a pinion angle, periodic in the mesh period."""
        period = self.mesh_period_rad
        n = self.mesh_angle_grid.shape[0] - 1
        pos = (mesh_angle % period) / period * n
        i = int(pos)
        if i >= n:
            i = n - 1
        frac = pos - i
        k, c = self.k_total_N_per_m, self.c_total_Ns_per_m
        return (k[i] + frac * (k[i + 1] - k[i]),
                c[i] + frac * (c[i + 1] - c[i]))

    def interpolate(self, mesh_angle):
        period = self.mesh_period_rad
        theta = np.mod(np.asarray(mesh_angle, dtype=float), period)
        return (np.interp(theta, self.mesh_angle_grid, self.k_total_N_per_m),
                np.interp(theta, self.mesh_angle_grid, self.c_total_Ns_per_m))


# -- contact kinematics ------------------------------------------------------

def _check_window(geometry, contact_position):
    theta = np.asarray(contact_position, dtype=float)
    window = geometry.engagement_window_rad
    tol = 1e-12 * window
    if np.any(theta < -tol) or np.any(theta > window + tol):
        raise GeometryError(
            f'contact position outside the engagement window [0, {window:.6g}] rad')
    return np.clip(theta, 0.0, window)


def _force_angle(geometry, theta, side):
    """alpha_1 of the pinion or gear tooth for a pair at pinion roll angle theta."""
    s_p = geometry.start_of_action_m + geometry.base_radius_pinion_m * theta
    if side == 'pinion':
        z, r_b, s = geometry.teeth_pinion, geometry.base_radius_pinion_m, s_p
    elif side == 'gear':
        z, r_b, s = geometry.teeth_gear, geometry.base_radius_gear_m, geometry.line_of_centers_m - s_p
    else:
        raise ValueError(f'side must be pinion or gear, got {side}')
    return s / r_b - geometry.half_base_angle(z), z, r_b


def in_double_contact(geometry, contact_position):
    """A pair is in double contact while the preceding pair has not left or the next one has entered."""
    theta = np.asarray(contact_position, dtype=float)
    return (theta <= geometry.double_contact_span_rad) | (theta >= geometry.mesh_period_rad)


def _section_position(alpha, alpha_2, r_b):
    """Distance of the section at ``alpha`` from the base circle along the centre line."""
    return r_b * (np.cos(alpha) - (alpha_2 - alpha) * np.sin(alpha) - np.cos(alpha_2))


def _crack_split(alpha_2, r_b, x_q):
    """Integration angle of the section through the crack tip; sections at larger alpha are cut."""
    lowest = -math.pi / 2
    if x_q >= _section_position(lowest, alpha_2, r_b):
        return lowest
    return optimize.brentq(lambda a: _section_position(a, alpha_2, r_b) - x_q, lowest, alpha_2, xtol=1e-14)


def _body_compliance(geometry, a1, lo, hi, alpha_2, r_b, h_q=None):
    E = geometry.youngs_modulus_Pa
    L = geometry.face_width_m
    G = E / (2.0 * (1.0 + geometry.poisson_ratio))

    half = (hi - lo) / 2.0
    alpha = half * _NODES[None, :] + (hi + lo) / 2.0
    w = half * _WEIGHTS[None, :]

    lever = alpha_2 - alpha
    y = r_b * (np.sin(alpha) + lever * np.cos(alpha))
    dx = r_b * lever * np.cos(alpha)
    thickness = 2.0 * y if h_q is None else y + np.minimum(y, h_q)

    cos1, sin1 = np.cos(a1), np.sin(a1)
    moment_arm = r_b * (1.0 + cos1 * (lever * np.sin(alpha) - np.cos(alpha)))

    inv_kb = np.sum(w * 12.0 * moment_arm ** 2 / (E * L * thickness ** 3) * dx, axis=1)
    inv_ks = np.sum(w * 1.2 * cos1 ** 2 / (G * L * thickness) * dx, axis=1)
    inv_ka = np.sum(w * sin1 ** 2 / (E * L * thickness) * dx, axis=1)
    return inv_kb + inv_ks + inv_ka


def _tooth_compliance(geometry, alpha_1, z, r_b, crack=None):
    """Body (bending + shear + axial) and fillet compliances, per unit force."""
    E = geometry.youngs_modulus_Pa
    L = geometry.face_width_m
    alpha_2 = geometry.half_base_angle(z)

    a1 = np.atleast_1d(alpha_1)[:, None]
    if crack is None or crack.healthy:
        c_body = _body_compliance(geometry, a1, -a1, alpha_2, alpha_2, r_b)
    else:
        # intact from the contact point down to the crack tip, cut from there to the root
        h_q, x_q = crack.tip(r_b * math.sin(alpha_2))
        split = np.maximum(_crack_split(alpha_2, r_b, x_q), -a1)
        c_body = (_body_compliance(geometry, a1, -a1, split, alpha_2, r_b)
                  + _body_compliance(geometry, a1, split, alpha_2, alpha_2, r_b, h_q))

    a1 = a1[:, 0]
    r_f = geometry.root_radius(z)
    alpha_3 = math.asin(min(1.0, r_b * math.sin(alpha_2) / r_f))
    h_f = r_f / geometry.hub_bore_radius(z)
    X = (_SAINSOT[:, 0] / alpha_3 ** 2 + _SAINSOT[:, 1] * h_f ** 2 + _SAINSOT[:, 2] * h_f / alpha_3
         + _SAINSOT[:, 3] / alpha_3 + _SAINSOT[:, 4] * h_f + _SAINSOT[:, 5])
    x_contact = r_b * (np.cos(a1) + (a1 + alpha_2) * np.sin(a1))
    u_f = x_contact - r_f * math.cos(alpha_3)
    s_f = 2.0 * r_f * alpha_3
    inv_kf = np.cos(a1) ** 2 / (E * L) * (X[0] * (u_f / s_f) ** 2 + X[1] * u_f / s_f
                                          + X[2] * (1.0 + X[3] * np.tan(a1) ** 2))

    return c_body, inv_kf


def tooth_deflection(geometry, crack, contact_position, force, side='pinion', double_contact=None):
    """
    Deflection components of one tooth of the pair at ``contact_position``
    (pinion rotation since the pair entered contact).

    The crack only weakens the pinion tooth. The structural coupling term is
    a fixed fraction of the fillet deflection and is only present while the
    neighbouring pair is also in contact.
    """
    scalar = np.ndim(contact_position) == 0 and np.ndim(force) == 0
    theta = np.atleast_1d(_check_window(geometry, contact_position))
    force = np.asarray(force, dtype=float)
    if np.any(force < 0):
        raise GeometryError('mesh force must be non-negative')
    alpha_1, z, r_b = _force_angle(geometry, theta, side)
    c_body, c_fillet = _tooth_compliance(geometry, alpha_1, z, r_b, crack if side == 'pinion' else None)

    if double_contact is None:
        double_contact = in_double_contact(geometry, theta)
    coupling = np.where(double_contact, geometry.structural_coupling_fraction, 0.0)

    delta_t = force * c_body
    delta_f = force * c_fillet
    delta_c = coupling * delta_f
    if scalar:
        return ToothDeflection(float(delta_t[0]), float(delta_f[0]), float(delta_c[0]))
    return ToothDeflection(delta_t, delta_f, delta_c)


def tooth_stiffness(geometry, crack, contact_position, force=None, double_contact=None):
    """K_1^p and K_1^w of the tooth pair at ``contact_position``."""
    force = geometry.nominal_force_N if force is None else force
    stiffness = []
    for side in ('pinion', 'gear'):
        delta = tooth_deflection(geometry, crack, contact_position, force, side, double_contact).total
        if np.any(np.asarray(delta) <= 0) or not np.all(np.isfinite(delta)):
            raise GeometryError(f'singular {side} tooth geometry: zero or non-finite deflection')
        stiffness.append(force / delta)
    return stiffness[0], stiffness[1]


def pair_stiffness(geometry, crack, contact_position, double_contact=None):
    k_p, k_w = tooth_stiffness(geometry, crack, contact_position, double_contact=double_contact)
    return 1.0 / (1.0 / k_p + 1.0 / k_w + 1.0 / geometry.hertz_stiffness)


def mesh_stiffness_components(geometry, crack, mesh_angle):
    """
    K(t) together with the two pair contributions and the double-contact mask.

    The entering pair sits at theta, the leaving pair one mesh period ahead
    while it is still inside the engagement window.
    """
    period = geometry.mesh_period_rad
    theta = np.mod(np.atleast_1d(np.asarray(mesh_angle, dtype=float)), period)
    double = theta <= geometry.double_contact_span_rad

    k_entering = pair_stiffness(geometry, crack, theta)
    k_leaving = np.zeros_like(theta)
    if np.any(double):
        k_leaving[double] = pair_stiffness(geometry, crack, theta[double] + period)
    return k_entering + k_leaving, k_entering, k_leaving, double


def total_mesh_stiffness(geometry, crack, mesh_angle):
    k_total, _, _, _ = mesh_stiffness_components(geometry, crack, mesh_angle)
    return k_total if np.ndim(mesh_angle) else float(k_total[0])


def mesh_damping(k_total, m_p, m_g, zeta):
    """C(t) = 2 zeta sqrt(K m_p m_g / (m_p + m_g))."""
    if m_p <= 0 or m_g <= 0:
        raise DomainError(f'masses must be positive, got m_p={m_p}, m_g={m_g}')
    if zeta < 0:
        raise DomainError(f'damping ratio must be non-negative, got {zeta}')
    k_total = np.asarray(k_total, dtype=float)
    if np.any(k_total < 0):
        raise DomainError('mesh stiffness must be non-negative')
    return 2.0 * zeta * np.sqrt(k_total * m_p * m_g / (m_p + m_g))


def build_profile(geometry, crack, samples_per_period=1024, m_p=None, m_g=None, zeta=0.0):
    """Tabulate K and C over one mesh period (endpoint included) for the simulator."""
    if samples_per_period < 64:
        raise GeometryError(f'samples_per_period must be >= 64, got {samples_per_period}')
    grid = np.linspace(0.0, geometry.mesh_period_rad, int(samples_per_period) + 1)
    k_total, k_entering, k_leaving, double = mesh_stiffness_components(geometry, crack, grid)

    if m_p is None or m_g is None:
        c_total = np.zeros_like(k_total)
    else:
        c_total = mesh_damping(k_total, m_p, m_g, zeta)

    if np.any(k_total <= 0) or not np.all(np.isfinite(k_total)):
        raise GeometryError('mesh stiffness must be positive and finite over the mesh period')
    if abs(k_total[-1] - k_total[0]) > 1e-9 * abs(k_total[0]):
        raise GeometryError('mesh stiffness profile is not periodic')

    return StiffnessProfile(grid, k_total, c_total, double, crack.depth_fraction,
                            k_pair_entering=k_entering, k_pair_leaving=k_leaving)
