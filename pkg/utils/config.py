"""
YAML configuration: the system parameter file and the experiment file.

Every physical quantity carries its unit in the key name. The experiment file
points at the system file (relative paths resolve against the experiment
file's directory). Values are layered as built-in defaults < file < preset <
command-line overrides, and the result is a tree of frozen dataclasses.
"""

import math
import os
from dataclasses import dataclass, field, fields, replace

import yaml

from data_provider.vmd import VmdConfig
from models.cemg import MechParams, MotorParams, SystemParams, lbf_in_to_Nm
from models.tvms import CrackSpec, GearGeometry
from utils.exceptions import ConfigError, GearboxError
from utils.tools import case_seed

PRESETS = {
    'desk': {'sample_rate_Hz': 10000.0, 'duration_s': 1.5},
    'paper': {'sample_rate_Hz': 100000.0, 'duration_s': 4.0},
}

# yaml key -> dataclass field
_MOTOR_KEYS = {
    'stator_resistance_Ohm': 'R_s',
    'rotor_resistance_Ohm': 'R_r',
    'stator_self_inductance_H': 'L_ss',
    'rotor_self_inductance_H': 'L_rr',
    'mutual_inductance_H': 'L_ms',
    'pole_pairs': 'pole_pairs',
    'supply_amplitude_V': 'supply_amplitude_V',
    'supply_frequency_Hz': 'supply_frequency_Hz',
}
_MECH_KEYS = {
    'pinion_mass_kg': 'm_p',
    'gear_mass_kg': 'm_g',
    'pinion_bearing_stiffness_N_per_m': 'K_yp',
    'gear_bearing_stiffness_N_per_m': 'K_yg',
    'pinion_bearing_damping_Ns_per_m': 'C_yp',
    'gear_bearing_damping_Ns_per_m': 'C_yg',
    'motor_inertia_kgm2': 'i_m',
    'pinion_inertia_kgm2': 'i_p',
    'gear_inertia_kgm2': 'i_g',
    'coupling_stiffness_Nm_per_rad': 'K_t',
    'coupling_damping_Nms_per_rad': 'C_t',
    'pinion_base_radius_m': 'r_p',
    'gear_base_radius_m': 'r_g',
    'viscous_friction_Nms_per_rad': 'B_v',
    'load_torque_Nm': 'T_L',
    'pinion_friction_moment_Nm': 'M_p',
    'gear_friction_moment_Nm': 'M_g',
    'mesh_damping_ratio': 'zeta',
}
_GEOMETRY_KEYS = {
    'teeth_pinion': 'teeth_pinion',
    'teeth_gear': 'teeth_gear',
    'module_mm': 'module_mm',
    'pressure_angle_deg': 'pressure_angle_rad',
    'face_width_m': 'face_width_m',
    'youngs_modulus_Pa': 'youngs_modulus_Pa',
    'poisson_ratio': 'poisson_ratio',
    'addendum_coeff': 'addendum_coeff',
    'clearance_coeff': 'clearance_coeff',
    'pinion_hub_bore_radius_m': 'hub_bore_radius_pinion_m',
    'gear_hub_bore_radius_m': 'hub_bore_radius_gear_m',
    'nominal_mesh_force_N': 'nominal_force_N',
    'structural_coupling_fraction': 'structural_coupling_fraction',
}


@dataclass(frozen=True)
class SpeedLoad:
    name: str
    shaft_frequency_Hz: float
    load_torque_Nm: float


@dataclass(frozen=True)
class SimulationConfig:
    sample_rate_Hz: float = 10000.0
    duration_s: float = 1.5
    transient_s: float = 0.5
    substeps: object = 'auto'
    channel: str = 'ddy_p'


@dataclass(frozen=True)
class TsaConfig:
    period_source: str = 'nominal'


@dataclass(frozen=True)
class ChaosConfig:
    m: int = 3
    d: int = 1
    theiler_window: object = 'mesh_period'
    max_steps: int = 20

    def window_samples(self, period_samples, teeth_pinion):
        if self.theiler_window == 'mesh_period':
            return max(1, int(round(period_samples / teeth_pinion)))
        return int(self.theiler_window)


@dataclass(frozen=True)
class ReportConfig:
    le_sign_snr_db: float = -10.0
    le_sign_threshold: float = 0.75
    cd_families: tuple = ((-10.0, '25Hz-25lb', 5), (10.0, '25Hz-25lb', 4))
    le_depth_modes: tuple = (3, 4)
    severity_window_s: float = 2.0


@dataclass(frozen=True)
class PlotConfig:
    envelope_mode: int = 1
    render_png: bool = False


@dataclass(frozen=True)
class Case:
    case_id: str
    speed_load: SpeedLoad
    crack_depth: float
    condition: str
    snr_db: float
    seed: int

    @property
    def sim_id(self):
        return f'{self.speed_load.name}_{self.condition}'


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemParams
    system_file: str = None
    speed_loads: tuple = ()
    crack_levels: tuple = (0.0, 0.2, 0.4, 0.6)
    crack_angle_rad: float = math.pi / 4
    snr_levels_db: tuple = (10.0, -10.0)
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    vmd: VmdConfig = field(default_factory=VmdConfig)
    tsa: TsaConfig = field(default_factory=TsaConfig)
    chaos: ChaosConfig = field(default_factory=ChaosConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    plots: PlotConfig = field(default_factory=PlotConfig)
    output_dir: str = './results'
    master_seed: int = 2021
    workers: int = 1
    preset: str = None
    source: str = None

    def crack(self, depth):
        return CrackSpec(depth_fraction=float(depth), crack_angle_rad=self.crack_angle_rad)

    def params_for(self, speed_load):
        """System parameters driven at the speed-load's shaft frequency and load torque."""
        return self.system.with_speed_load(speed_load.shaft_frequency_Hz, speed_load.load_torque_Nm)

    def condition_of(self, depth):
        from utils.metrics import condition_labels
        return condition_labels(self.crack_levels)[depth]

    def cases(self):
        """Every (speed-load, crack, SNR) case in declaration order, each with its own seed."""
        out = []
        for sl in self.speed_loads:
            for depth in self.crack_levels:
                condition = self.condition_of(depth)
                for snr in self.snr_levels_db:
                    case_id = f'{sl.name}_{condition}_snr{snr:+g}dB'
                    out.append(Case(case_id, sl, float(depth), condition, float(snr),
                                    case_seed(self.master_seed, sl.name, condition, f'{snr:g}')))
        return out

    def simulations(self):
        """Distinct (speed-load, crack) simulations; the SNR cases share them."""
        seen = {}
        for case in self.cases():
            seen.setdefault(case.sim_id, case)
        return list(seen.values())


def _read_yaml(path):
    if not os.path.isfile(path):
        raise ConfigError(f'config file not found: {path}')
    with open(path, 'r') as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f'{path}: invalid YAML: {e}') from e
    if not isinstance(data, dict):
        raise ConfigError(f'{path}: top level must be a mapping')
    return data


def _map_section(section, keys, where):
    section = section or {}
    unknown = sorted(set(section) - set(keys))
    if unknown:
        raise ConfigError(f'{where}: unknown keys {unknown}')
    out = {}
    for key, value in section.items():
        target = keys[key]
        if key == 'pressure_angle_deg':
            value = math.radians(float(value))
        out[target] = value
    return out


def _build(cls, kwargs, where):
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (GearboxError, TypeError, ValueError) as e:
        raise ConfigError(f'{where}: {e}') from e


def load_system(path):
    data = _read_yaml(path)
    unknown = sorted(set(data) - {'motor', 'mechanical', 'geometry', 'profile_samples_per_period'})
    if unknown:
        raise ConfigError(f'{path}: unknown sections {unknown}')
    motor = _build(MotorParams, _map_section(data.get('motor'), _MOTOR_KEYS, f'{path}:motor'), f'{path}:motor')
    mech = _build(MechParams, _map_section(data.get('mechanical'), _MECH_KEYS, f'{path}:mechanical'),
                  f'{path}:mechanical')
    geometry = _build(GearGeometry, _map_section(data.get('geometry'), _GEOMETRY_KEYS, f'{path}:geometry'),
                      f'{path}:geometry')
    samples = int(data.get('profile_samples_per_period', 1024))
    if samples < 64:
        raise ConfigError(f'{path}: profile_samples_per_period must be >= 64, got {samples}')
    return SystemParams(motor=motor, mech=mech, geometry=geometry, profile_samples=samples)


def _speed_loads(entries, where):
    if not entries:
        raise ConfigError(f'{where}: at least one speed_load case is required')
    out = []
    for entry in entries:
        if 'load_torque_Nm' in entry:
            torque = float(entry['load_torque_Nm'])
        elif 'load_lbf_in' in entry:
            torque = lbf_in_to_Nm(float(entry['load_lbf_in']))
        else:
            raise ConfigError(f'{where}: speed_load {entry} needs load_torque_Nm or load_lbf_in')
        if 'name' not in entry or 'shaft_frequency_Hz' not in entry:
            raise ConfigError(f'{where}: speed_load {entry} needs name and shaft_frequency_Hz')
        freq = float(entry['shaft_frequency_Hz'])
        if freq <= 0 or torque < 0:
            raise ConfigError(f'{where}: speed_load {entry["name"]} needs shaft_frequency_Hz > 0 and load >= 0')
        out.append(SpeedLoad(str(entry['name']), freq, torque))
    names = [sl.name for sl in out]
    if len(set(names)) != len(names):
        raise ConfigError(f'{where}: duplicate speed_load names {names}')
    return tuple(out)


def load_config(path, overrides=None):
    """
    Load and validate the experiment file. ``overrides`` holds command-line
    values (preset, output_dir, seed, workers); None entries are ignored.
    """
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    data = _read_yaml(path)
    base = os.path.dirname(os.path.abspath(path))

    system_file = data.get('system_file')
    if not system_file:
        raise ConfigError(f'{path}: system_file is required')
    if not os.path.isabs(system_file):
        system_file = os.path.normpath(os.path.join(base, system_file))
    system = load_system(system_file)

    preset = overrides.get('preset', data.get('preset'))
    sim = dict(data.get('simulation') or {})
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f'unknown preset {preset!r}, options: {sorted(PRESETS)}')
        sim.update(PRESETS[preset])
    simulation = _build(SimulationConfig, sim, f'{path}:simulation')
    if simulation.duration_s <= simulation.transient_s or simulation.transient_s < 0:
        raise ConfigError(f'{path}: duration_s must exceed transient_s >= 0')
    if simulation.substeps != 'auto' and int(simulation.substeps) < 1:
        raise ConfigError(f'{path}: substeps must be auto or a positive integer')
    speed_loads = _speed_loads(data.get('speed_loads'), path)
    for sl in speed_loads:
        mesh_frequency_Hz = sl.shaft_frequency_Hz * system.geometry.teeth_pinion
        if simulation.sample_rate_Hz < 20 * mesh_frequency_Hz:
            raise ConfigError(f'{path}: sample_rate_Hz must be >= 20x the mesh frequency of speed_load '
                              f'{sl.name} ({20 * mesh_frequency_Hz:.0f} Hz)')
    crack_levels = tuple(float(c) for c in data.get('crack_levels', (0.0, 0.2, 0.4, 0.6)))
    snr_levels = tuple(float(s) for s in data.get('snr_levels_db', (10.0, -10.0)))
    if not crack_levels or not snr_levels:
        raise ConfigError(f'{path}: crack_levels and snr_levels_db need at least one entry')
    if len(set(crack_levels)) != len(crack_levels) or len(set(snr_levels)) != len(snr_levels):
        raise ConfigError(f'{path}: crack_levels and snr_levels_db must not repeat')
    crack_angle = float(data.get('crack_angle_rad', math.pi / 4))
    for depth in crack_levels:
        _build(CrackSpec, {'depth_fraction': depth, 'crack_angle_rad': crack_angle}, f'{path}:crack_levels')

    vmd = _build(VmdConfig, dict(data.get('vmd') or {}), f'{path}:vmd')
    tsa = _build(TsaConfig, dict(data.get('tsa') or {}), f'{path}:tsa')
    if tsa.period_source not in ('nominal', 'estimated'):
        raise ConfigError(f'{path}: tsa.period_source must be nominal or estimated')
    chaos = _build(ChaosConfig, dict(data.get('chaos') or {}), f'{path}:chaos')
    if chaos.m < 1 or chaos.d < 1 or chaos.max_steps < 2:
        raise ConfigError(f'{path}: chaos needs m >= 1, d >= 1, max_steps >= 2')
    if chaos.theiler_window != 'mesh_period' and int(chaos.theiler_window) < 0:
        raise ConfigError(f'{path}: chaos.theiler_window must be mesh_period or a non-negative integer')

    report_raw = dict(data.get('report') or {})
    if 'cd_families' in report_raw:
        report_raw['cd_families'] = tuple((float(f['snr_db']), str(f['speed_load']), int(f['mode']))
                                          for f in report_raw['cd_families'])
    if 'le_depth_modes' in report_raw:
        report_raw['le_depth_modes'] = tuple(int(k) for k in report_raw['le_depth_modes'])
    report = _build(ReportConfig, report_raw, f'{path}:report')
    plots = _build(PlotConfig, dict(data.get('plots') or {}), f'{path}:plots')
    if overrides.get('render_png'):
        plots = replace(plots, render_png=True)
    if not 1 <= plots.envelope_mode <= vmd.K:
        raise ConfigError(f'{path}: plots.envelope_mode must lie in [1, {vmd.K}]')

    output_dir = overrides.get('output_dir', data.get('output_dir', './results'))
    if not os.path.isabs(output_dir) and 'output_dir' not in overrides:
        output_dir = os.path.normpath(os.path.join(base, output_dir))
    workers = int(overrides.get('workers', data.get('workers', 1)))
    if workers < 1:
        raise ConfigError(f'workers must be >= 1, got {workers}')

    return ExperimentConfig(
        system=system, system_file=system_file, speed_loads=speed_loads, crack_levels=crack_levels,
        crack_angle_rad=crack_angle, snr_levels_db=snr_levels, simulation=simulation, vmd=vmd, tsa=tsa,
        chaos=chaos, report=report, plots=plots, output_dir=output_dir,
        master_seed=int(overrides.get('seed', data.get('master_seed', 2021))), workers=workers,
        preset=preset, source=os.path.abspath(path))


def as_dict(obj):
    """Flat-ish dict view of a config dataclass for JSON sidecars."""
    out = {}
    for f in fields(obj):
        value = getattr(obj, f.name)
        if hasattr(value, '__dataclass_fields__'):
            value = as_dict(value)
        elif isinstance(value, tuple):
            value = [as_dict(v) if hasattr(v, '__dataclass_fields__') else v for v in value]
        out[f.name] = value
    return out
