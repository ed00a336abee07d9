"""
Artifact persistence: CSV tables through pandas plus JSON sidecars.

Every loader takes the case id it works for so that a missing or corrupt
file surfaces as an ArtifactError naming that case.
"""

import os

import numpy as np
import pandas as pd

from data_provider.tsa import TsaResult
from data_provider.vmd import VmdResult
from models.cemg import CHANNELS, SimResult
from utils.exceptions import ArtifactError
from utils.metrics import FeatureRecord, table_columns
from utils.tools import file_checksum, read_json, write_json, write_table


def _read_csv(path, case):
    if not os.path.isfile(path):
        raise ArtifactError(case, f'missing artifact {path}')
    try:
        return pd.read_csv(path, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ArtifactError(case, f'unreadable artifact {path}: {e}') from e


def _read_json(path, case):
    if not os.path.isfile(path):
        raise ArtifactError(case, f'missing artifact {path}')
    try:
        return read_json(path)
    except (ValueError, UnicodeDecodeError) as e:
        raise ArtifactError(case, f'unreadable artifact {path}: {e}') from e


def _columns(df, names, path, case):
    missing = [c for c in names if c not in df.columns]
    if missing:
        raise ArtifactError(case, f'{path} lacks columns {missing}')
    values = df[list(names)].to_numpy(dtype=float)
    if not np.all(np.isfinite(values)):
        raise ArtifactError(case, f'{path} holds non-finite values')
    return values


def checksums(paths):
    return {name: file_checksum(path) for name, path in sorted(paths.items())}


def verify_checksums(paths, expected, case):
    """Raise ArtifactError unless every artifact exists with its recorded checksum."""
    for name, path in paths.items():
        if not os.path.isfile(path):
            raise ArtifactError(case, f'missing artifact {path}')
        if name in expected and file_checksum(path) != expected[name]:
            raise ArtifactError(case, f'checksum mismatch for {path}')
    return True


# -- simulation ----------------------------------------------------------------

def save_sim(result, folder, summary=None):
    columns = {'t': result.t}
    columns.update((name, result.channels[name]) for name in CHANNELS)
    csv_path = write_table(os.path.join(folder, 'sim.csv'), columns)
    sidecar = dict(result.metadata)
    sidecar.update({'sample_rate_Hz': result.sample_rate_Hz, 'n_samples': len(result),
                    'channels': list(CHANNELS), 'summary': summary})
    json_path = write_json(os.path.join(folder, 'sim.json'), sidecar)
    return {'sim.csv': csv_path, 'sim.json': json_path}


def load_sim(folder, case):
    csv_path = os.path.join(folder, 'sim.csv')
    meta = _read_json(os.path.join(folder, 'sim.json'), case)
    df = _read_csv(csv_path, case)
    values = _columns(df, ('t',) + CHANNELS, csv_path, case)
    if values.shape[0] != meta.get('n_samples'):
        raise ArtifactError(case, f'{csv_path} holds {values.shape[0]} rows, sidecar says {meta.get("n_samples")}')
    channels = {name: values[:, k + 1] for k, name in enumerate(CHANNELS)}
    metadata = {k: v for k, v in meta.items() if k not in ('sample_rate_Hz', 'n_samples', 'channels', 'summary')}
    return SimResult(float(meta['sample_rate_Hz']), values[:, 0], channels, metadata)


# -- decomposition ---------------------------------------------------------------

def save_vmd(result, folder, t0=0.0, extra=None):
    n = result.modes.shape[1]
    columns = {'t': t0 + np.arange(n) / result.sample_rate_Hz}
    for k in range(result.K):
        columns[f'mode_{k + 1}'] = result.modes[k]
    columns['residual'] = result.residual
    csv_path = write_table(os.path.join(folder, 'vmd.csv'), columns)
    sidecar = {'K': result.K, 'center_freqs_Hz': result.center_freqs_Hz, 'iterations': result.iterations,
               'final_update_norm': result.final_update_norm, 'converged': result.converged,
               'sample_rate_Hz': result.sample_rate_Hz}
    sidecar.update(extra or {})
    json_path = write_json(os.path.join(folder, 'vmd.json'), sidecar)
    return {'vmd.csv': csv_path, 'vmd.json': json_path}


def load_vmd(folder, case):
    csv_path = os.path.join(folder, 'vmd.csv')
    meta = _read_json(os.path.join(folder, 'vmd.json'), case)
    df = _read_csv(csv_path, case)
    K = int(meta['K'])
    names = [f'mode_{k + 1}' for k in range(K)] + ['residual']
    values = _columns(df, names, csv_path, case)
    return VmdResult(modes=values[:, :K].T.copy(), center_freqs_Hz=np.asarray(meta['center_freqs_Hz'], dtype=float),
                     residual=values[:, K].copy(), iterations=int(meta['iterations']),
                     final_update_norm=float(meta['final_update_norm']),
                     sample_rate_Hz=float(meta['sample_rate_Hz']), converged=bool(meta['converged']))


def save_tsa(results, folder, raw=None):
    """Mode k goes to tsa_mode_k.csv; the raw-signal average, when given, is mode 0."""
    paths, sidecar = {}, {}
    entries = ([(0, raw)] if raw is not None else []) + list(enumerate(results, start=1))
    for k, result in entries:
        name = f'tsa_mode_{k}.csv'
        paths[name] = write_table(os.path.join(folder, name),
                                  {'angle_fraction': result.angle_fraction, 'averaged_value': result.averaged})
        sidecar[str(k)] = {'V': result.period_samples, 'L': result.n_averages, 'residual_rms': result.residual_rms,
                           'drift_samples': result.drift_samples, 'drift_flag': result.drift_flag}
    paths['tsa.json'] = write_json(os.path.join(folder, 'tsa.json'), sidecar)
    return paths


def load_tsa(folder, case):
    """(raw or None, [mode 1 .. mode K])"""
    meta = _read_json(os.path.join(folder, 'tsa.json'), case)
    out = {}
    for key, info in meta.items():
        path = os.path.join(folder, f'tsa_mode_{key}.csv')
        values = _columns(_read_csv(path, case), ('averaged_value',), path, case)[:, 0]
        if values.shape[0] != info['V']:
            raise ArtifactError(case, f'{path} holds {values.shape[0]} samples, sidecar says V={info["V"]}')
        out[int(key)] = TsaResult(values, int(info['L']), int(info['V']), float(info['residual_rms']),
                                  float(info['drift_samples']), bool(info['drift_flag']))
    modes = [out[k] for k in sorted(out) if k > 0]
    return out.get(0), modes


# -- tables --------------------------------------------------------------------

def save_profile(profile, path):
    columns = {'mesh_angle_rad': profile.mesh_angle_grid, 'k_total': profile.k_total_N_per_m,
               'c_total': profile.c_total_Ns_per_m,
               'region': np.where(profile.region_flags, 'double', 'single')}
    if profile.k_pair_entering is not None:
        columns['k_pair_entering'] = profile.k_pair_entering
        columns['k_pair_leaving'] = profile.k_pair_leaving
    return write_table(path, columns)


def save_features(records, folder, name='features'):
    csv_path = write_table(os.path.join(folder, f'{name}.csv'), table_columns(records))
    json_path = write_json(os.path.join(folder, f'{name}.json'), [r.to_dict() for r in records])
    return {f'{name}.csv': csv_path, f'{name}.json': json_path}


def load_features(folder, case, name='features'):
    path = os.path.join(folder, f'{name}.json')
    rows = _read_json(path, case)
    try:
        records = [FeatureRecord(**row) for row in rows]
    except TypeError as e:
        raise ArtifactError(case, f'malformed feature records in {path}: {e}') from e
    for r in records:
        r.LE_fit_range = tuple(r.LE_fit_range) if r.LE_fit_range is not None else None
        r.CD_scaling_range = tuple(r.CD_scaling_range) if r.CD_scaling_range is not None else None
    return records
