import os
import warnings

import numpy as np

from data_provider.data_factory import load_features, load_sim, load_tsa, load_vmd, save_profile, verify_checksums
from exp.exp_basic import STAGES, Exp_Basic
from exp.exp_decompose import analysis_window
from exp.exp_features import chaos_settings
from models.tvms import build_profile
from utils.chaos import correlation_dimension, lyapunov
from utils.exceptions import ArtifactError, GearboxError
from utils.metrics import table_columns
from utils.spectral import envelope_spectrum
from utils.tools import visual, write_table

warnings.filterwarnings('ignore')

PLOTS = ('tvms', 'timeseries', 'vmfs', 'tsa', 'divergence', 'corr_sum', 'features', 'envelope')


class Exp_Plots(Exp_Basic):
    """Plot-ready CSV data for each figure; images only on request."""

    def __init__(self, args, config=None):
        super(Exp_Plots, self).__init__(args, config)
        self.plot_dir = os.path.join(self.output_dir, 'plots')

    def emit_plots(self, which):
        if which not in PLOTS:
            raise ValueError(f'unknown plot {which!r}, options: {list(PLOTS)}')
        print('>>>>>>>start plots : {}>>>>>>>>>>>>>>>>>>>>>>>>>>'.format(which))
        paths = getattr(self, f'_plot_{which}')()
        if self.config.plots.render_png:
            for path in paths:
                visual(path)
        print('{} plot-data files under {}'.format(len(paths), os.path.join(self.plot_dir, which)))
        return paths

    def _path(self, which, name):
        return os.path.join(self.plot_dir, which, f'{name}.csv')

    def _cases(self, stage):
        """Completed cases, verified against their checksums; an unfinished case is an error naming it."""
        for case in self.config.cases():
            entry = self.manifest['cases'].get(case.case_id)
            if not entry or entry.get('status') != 'done' or \
                    STAGES.index(entry.get('stage', STAGES[0])) < STAGES.index(stage):
                raise ArtifactError(case.case_id, f'case has not reached stage {stage!r}; run it first')
            verify_checksums(entry['artifacts'], entry['checksums'], case.case_id)
            yield case, entry

    def _tsa(self, case):
        raw, modes = load_tsa(self.case_dir(case.case_id), case.case_id)
        if not modes:
            raise ArtifactError(case.case_id, 'no TSA modes on disk')
        return raw, modes

    def _plot_tvms(self):
        system = self.config.system
        paths = []
        for depth in self.config.crack_levels:
            profile = build_profile(system.geometry, self.config.crack(depth), system.profile_samples,
                                    m_p=system.mech.m_p, m_g=system.mech.m_g, zeta=system.mech.zeta)
            paths.append(save_profile(profile, self._path('tvms', f'tvms_{self.config.condition_of(depth)}')))
        return paths

    def _plot_timeseries(self):
        paths = []
        for case, entry in self._cases('decomposed'):
            sim_entry = self.manifest['simulations'].get(case.sim_id)
            if not sim_entry or sim_entry.get('status') != 'done':
                raise ArtifactError(case.case_id, f'simulation {case.sim_id} is not available')
            verify_checksums(sim_entry['artifacts'], sim_entry['checksums'], case.case_id)
            sim = load_sim(self.sim_dir(case.sim_id), case.case_id)
            decomposition = load_vmd(self.case_dir(case.case_id), case.case_id)
            start = analysis_window(self.config, sim)
            paths.append(write_table(self._path('timeseries', case.case_id), {
                't': sim.t[start:],
                'clean': sim[self.config.simulation.channel][start:],
                'noisy': decomposition.modes.sum(axis=0) + decomposition.residual,
            }))
        return paths

    def _plot_vmfs(self):
        paths = []
        for case, entry in self._cases('decomposed'):
            decomposition = load_vmd(self.case_dir(case.case_id), case.case_id)
            n = decomposition.modes.shape[1]
            columns = {'t': np.arange(n) / decomposition.sample_rate_Hz}
            columns.update((f'mode_{k + 1}', mode) for k, mode in enumerate(decomposition.modes))
            paths.append(write_table(self._path('vmfs', case.case_id), columns))
        return paths

    def _plot_tsa(self):
        paths = []
        for case, entry in self._cases('decomposed'):
            raw, modes = self._tsa(case)
            columns = {'angle_fraction': modes[0].angle_fraction}
            if raw is not None:
                columns['raw'] = raw.averaged
            columns.update((f'mode_{k}', r.averaged) for k, r in enumerate(modes, start=1))
            paths.append(write_table(self._path('tsa', case.case_id), columns))
        return paths

    def _plot_divergence(self):
        paths = []
        fs = self.config.simulation.sample_rate_Hz
        for case, entry in self._cases('decomposed'):
            _, modes = self._tsa(case)
            m, d, window, le_kwargs = chaos_settings(self.config, modes[0].period_samples)
            curves = {}
            for k, result in enumerate(modes, start=1):
                try:
                    curves[f'mode_{k}'] = lyapunov(result.averaged, m, d, fs, window, **le_kwargs).divergence_curve
                except GearboxError:
                    curves[f'mode_{k}'] = None
            length = max((len(c) for c in curves.values() if c is not None), default=0)
            columns = {'step': np.arange(length)}
            columns.update((name, c if c is not None else np.full(length, np.nan)) for name, c in curves.items())
            paths.append(write_table(self._path('divergence', case.case_id), columns))
        return paths

    def _plot_corr_sum(self):
        paths = []
        for case, entry in self._cases('decomposed'):
            _, modes = self._tsa(case)
            m, d, window, _ = chaos_settings(self.config, modes[0].period_samples)
            rows = {'mode': [], 'radius': [], 'log_r': [], 'log_C': [], 'pair_count': [], 'in_fit': []}
            for k, result in enumerate(modes, start=1):
                try:
                    cd = correlation_dimension(result.averaged, m, d, window)
                except GearboxError:
                    continue
                lo, hi = cd.scaling_range
                rows['mode'].extend([k] * len(cd.radii))
                rows['radius'].extend(cd.radii)
                rows['log_r'].extend(cd.log_radii)
                rows['log_C'].extend(cd.log_corr_sums)
                rows['pair_count'].extend(cd.pair_counts)
                rows['in_fit'].extend((cd.radii >= lo) & (cd.radii <= hi))
            paths.append(write_table(self._path('corr_sum', case.case_id), rows))
        return paths

    def _plot_features(self):
        path = os.path.join(self.output_dir, 'features.json')
        if not os.path.isfile(path):
            raise ArtifactError('features', f'no aggregate feature table at {path}; run features first')
        records = load_features(self.output_dir, 'features')
        columns = {'label': [r.label for r in records]}
        columns.update(table_columns(records))
        return [write_table(self._path('features', 'features'), columns)]

    def _plot_envelope(self):
        paths = []
        mode = self.config.plots.envelope_mode
        fs = self.config.simulation.sample_rate_Hz
        for case, entry in self._cases('decomposed'):
            _, modes = self._tsa(case)
            freqs, magnitude = envelope_spectrum(modes[mode - 1].averaged, fs)
            paths.append(write_table(self._path('envelope', f'{case.case_id}_mode_{mode}'),
                                     {'freq_hz': freqs, 'magnitude': magnitude}))
        return paths
