import warnings
from dataclasses import asdict, dataclass

import numpy as np

from utils.chaos import correlation_dimension, lyapunov
from utils.exceptions import GearboxError, SignalError

TABLE_COLUMNS = ['condition', 'speed_load', 'snr_db', 'mode', 'LE_per_s', 'LE_r2', 'CD', 'CD_r2', 'reliable']


@dataclass
class FeatureRecord:
    condition: str
    speed_load: str
    snr_db: float
    mode: int
    label: str
    LE_per_s: float = None
    LE_per_sample: float = None
    LE_r2: float = None
    LE_fit_range: tuple = None
    CD: float = None
    CD_r2: float = None
    CD_scaling_range: tuple = None
    reliable: bool = False
    reason: str = None
    n_samples: int = None

    def row(self):
        return {k: getattr(self, k) for k in TABLE_COLUMNS}

    def to_dict(self):
        return asdict(self)


def condition_labels(crack_levels):
    """Healthy is 'H', cracked levels are C1, C2, ... in ascending depth."""
    labels, c = {}, 0
    for depth in sorted(crack_levels):
        if depth == 0:
            labels[depth] = 'H'
        else:
            c += 1
            labels[depth] = f'C{c}'
    return labels


def feature_label(condition, mode):
    # H{k}_{k} for healthy, C{c}_{k} for cracked
    if condition == 'H':
        return f'H{mode}_{mode}'
    return f'{condition}_{mode}'


def features_for_series(series, condition, speed_load, snr_db, mode, m=3, d=1, sample_rate_Hz=1.0,
                        theiler_window=10, le_kwargs=None, cd_kwargs=None):
    """LE and CD of one series; a failed estimate leaves the feature empty with a reason."""
    record = FeatureRecord(condition, speed_load, float(snr_db), int(mode), feature_label(condition, mode))
    record.n_samples = int(np.size(series))
    reasons = []
    le_ok = cd_ok = False
    try:
        le = lyapunov(series, m, d, sample_rate_Hz, theiler_window, **(le_kwargs or {}))
        record.LE_per_s = le.lambda_per_second
        record.LE_per_sample = le.lambda_per_sample
        record.LE_r2 = le.r2
        record.LE_fit_range = le.fit_range
        le_ok = le.reliable
    except GearboxError as e:
        reasons.append(f'LE: {type(e).__name__}: {e}')
    try:
        cd = correlation_dimension(series, m, d, theiler_window, **(cd_kwargs or {}))
        record.CD = cd.cd
        record.CD_r2 = cd.slope_r2
        record.CD_scaling_range = cd.scaling_range
        cd_ok = cd.reliable
    except GearboxError as e:
        reasons.append(f'CD: {type(e).__name__}: {e}')
    record.reliable = bool(le_ok and cd_ok)
    record.reason = '; '.join(reasons) or None
    return record


def check_lengths(pairs):
    """``pairs`` of (speed_load, series length); one length per speed-load or SignalError."""
    lengths = {}
    for speed_load, n in pairs:
        lengths.setdefault(speed_load, set()).add(int(n))
    for speed_load, found in sorted(lengths.items()):
        if len(found) > 1:
            raise SignalError(f'all TSA inputs of {speed_load} must share one length, got {sorted(found)}')


def merge_records(records):
    """Per-case records into one sorted table, under the same length rule as feature_table."""
    records = list(records)
    check_lengths((r.speed_load, r.n_samples) for r in records if r.n_samples is not None)
    return sort_records(records)


def feature_table(cases, m=3, d=1, sample_rate_Hz=1.0, theiler_window=10, le_kwargs=None, cd_kwargs=None):
    """
    One FeatureRecord per (case, mode). ``cases`` is an iterable of dicts with
    keys condition, speed_load, snr_db and tsa (list of TsaResult, mode order).
    """
    cases = list(cases)
    check_lengths((case['speed_load'], len(r.averaged)) for case in cases for r in case['tsa'])
    records = []
    for case in cases:
        for k, result in enumerate(case['tsa'], start=1):
            records.append(features_for_series(result.averaged, case['condition'], case['speed_load'],
                                               case['snr_db'], k, m, d, sample_rate_Hz, theiler_window,
                                               le_kwargs, cd_kwargs))
    return sort_records(records)


def _condition_key(condition):
    return (0, 0) if condition == 'H' else (1, int(condition[1:]))


def sort_records(records):
    return sorted(records, key=lambda r: (r.speed_load, r.snr_db, _condition_key(r.condition), r.mode))


def table_columns(records):
    return {col: [getattr(r, col) for r in records] for col in TABLE_COLUMNS}


# -- trend reports -------------------------------------------------------------

def _lookup(records):
    return {(r.speed_load, r.snr_db, r.condition, r.mode): r for r in records}


def le_sign_pattern(records, snr_db=-10.0, positive_modes=(1, 2, 3, 4), negative_modes=(5,), threshold=0.75):
    """Share of cases at ``snr_db`` where LE is positive on the low modes and negative on the last ones."""
    table = _lookup(records)
    cases = sorted({(r.speed_load, r.condition) for r in records if r.snr_db == snr_db},
                   key=lambda c: (c[0], _condition_key(c[1])))
    per_case = {}
    for speed_load, condition in cases:
        ok = True
        for mode in positive_modes + negative_modes:
            rec = table.get((speed_load, snr_db, condition, mode))
            if rec is None or rec.LE_per_s is None:
                ok = False
                break
            ok &= rec.LE_per_s > 0 if mode in positive_modes else rec.LE_per_s < 0
        per_case[f'{speed_load}/{condition}'] = bool(ok)
    fraction = float(np.mean(list(per_case.values()))) if per_case else 0.0
    reproduced = fraction >= threshold
    statement = (f'LE sign pattern (modes {list(positive_modes)} > 0, {list(negative_modes)} < 0) holds in '
                 f'{100 * fraction:.0f} % of {snr_db:g} dB cases; '
                 + ('reproduced' if reproduced else 'NOT reproduced at this scale'))
    return {'per_case': per_case, 'fraction': fraction, 'threshold': threshold,
            'reproduced': bool(reproduced), 'statement': statement}


def _depth_series(records, speed_load, snr_db, mode, field):
    table = _lookup(records)
    conditions = sorted({r.condition for r in records}, key=_condition_key)
    values = []
    for condition in conditions:
        rec = table.get((speed_load, snr_db, condition, mode))
        values.append(None if rec is None else getattr(rec, field))
    return conditions, values


def _non_increasing(values):
    if any(v is None for v in values):
        return False
    return all(b <= a for a, b in zip(values[:-1], values[1:]))


def cd_depth_trend(records, families):
    """CD non-increasing over H -> C1 -> C2 -> ... for each (snr_db, speed_load, mode) family."""
    report = []
    for snr_db, speed_load, mode in families:
        conditions, values = _depth_series(records, speed_load, float(snr_db), int(mode), 'CD')
        holds = _non_increasing(values)
        report.append({
            'snr_db': float(snr_db), 'speed_load': speed_load, 'mode': int(mode),
            'conditions': conditions, 'CD': values, 'reproduced': bool(holds),
            'statement': f'CD over {"->".join(conditions)} at {snr_db:g} dB/{speed_load}/mode {mode} '
                         + ('is non-increasing' if holds else 'is NOT non-increasing at this scale'),
        })
    return report


def le_depth_trend(records, snr_db=-10.0, modes=(3, 4)):
    """Whether positive LE on the given modes decreases with crack depth, per speed-load."""
    report = []
    for speed_load in sorted({r.speed_load for r in records}):
        for mode in modes:
            conditions, values = _depth_series(records, speed_load, float(snr_db), int(mode), 'LE_per_s')
            positive = all(v is not None and v > 0 for v in values)
            holds = positive and _non_increasing(values)
            report.append({
                'snr_db': float(snr_db), 'speed_load': speed_load, 'mode': int(mode),
                'conditions': conditions, 'LE_per_s': values, 'reproduced': bool(holds),
                'statement': f'positive LE of mode {mode} at {snr_db:g} dB/{speed_load} '
                             + ('decreases with crack depth' if holds else 'does NOT decrease with crack depth at this scale'),
            })
    return report


def severity_trend(rms_by_case):
    """``rms_by_case`` maps speed_load -> {crack depth: RMS of ddy_p}."""
    report = {}
    for speed_load, by_depth in sorted(rms_by_case.items()):
        depths = sorted(by_depth)
        values = [by_depth[k] for k in depths]
        holds = all(b >= a for a, b in zip(values[:-1], values[1:]))
        if not holds:
            warnings.warn(f'RMS of ddy_p is not non-decreasing in crack depth for {speed_load}')
        report[speed_load] = {'depths': depths, 'rms': values, 'non_decreasing': bool(holds)}
    return report


def rms(x):
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(np.mean(x ** 2)))
