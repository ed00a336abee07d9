import os
import warnings

from data_provider.data_factory import load_features, load_tsa, save_features, verify_checksums
from exp.exp_decompose import Exp_Decompose
from utils.exceptions import ArtifactError
from utils.metrics import feature_table, merge_records

warnings.filterwarnings('ignore')


def chaos_settings(config, period_samples):
    """(m, d, theiler window, lyapunov kwargs) for TSA series of ``period_samples`` samples."""
    chaos = config.chaos
    window = chaos.window_samples(period_samples, config.system.geometry.teeth_pinion)
    return chaos.m, chaos.d, window, {'max_steps': chaos.max_steps}


def case_features(config, case, modes, sample_rate_Hz):
    m, d, window, le_kwargs = chaos_settings(config, modes[0].period_samples)
    rows = [{'condition': case.condition, 'speed_load': case.speed_load.name, 'snr_db': case.snr_db, 'tsa': modes}]
    return feature_table(rows, m, d, sample_rate_Hz, window, le_kwargs)


def features_case(config, case, entry, folder):
    verify_checksums(entry['artifacts'], entry.get('checksums', {}), case.case_id)
    _, modes = load_tsa(folder, case.case_id)
    if not modes:
        raise ArtifactError(case.case_id, 'no TSA modes on disk')
    records = case_features(config, case, modes, config.simulation.sample_rate_Hz)
    paths = save_features(records, folder)
    return {'artifacts': paths, 'n_records': len(records), 'reliable': sum(r.reliable for r in records)}


class Exp_Features(Exp_Decompose):
    def __init__(self, args, config=None):
        super(Exp_Features, self).__init__(args, config)

    def features(self):
        """Features from the persisted decompositions; upstream stages are not rerun."""
        self._run_cases(('features',), 'features')
        return self.aggregate()

    def aggregate(self):
        records = []
        for case in self.config.cases():
            entry = self.manifest['cases'].get(case.case_id)
            if not entry or entry.get('status') != 'done' or entry.get('stage') != 'features':
                continue
            records.extend(load_features(self.case_dir(case.case_id), case.case_id))
        records = merge_records(records)
        paths = save_features(records, self.output_dir)
        print('feature table: {} rows -> {}'.format(len(records), os.path.abspath(paths['features.csv'])))
        return records
