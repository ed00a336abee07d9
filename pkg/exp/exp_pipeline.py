import os
import time
import warnings

from exp.exp_features import Exp_Features
from utils.metrics import cd_depth_trend, le_depth_trend, le_sign_pattern, severity_trend
from utils.tools import file_checksum, write_json

warnings.filterwarnings('ignore')


class Exp_Pipeline(Exp_Features):
    """simulate -> noise -> VMD -> TSA -> features for the whole matrix, then the trend report."""

    def __init__(self, args, config=None):
        super(Exp_Pipeline, self).__init__(args, config)

    def run(self):
        start = time.time()
        self.simulate()
        self._run_cases(('decomposed', 'features'), 'case')
        records = self.aggregate()
        report = self.report(records)
        print('run finished in {:.1f}s, {} failed'.format(time.time() - start, len(report['failed'])))
        return report

    def report(self, records):
        cfg = self.config.report
        K = self.config.vmd.K
        rms_by_case = {}
        for sim in self.config.simulations():
            entry = self.manifest['simulations'].get(sim.sim_id, {})
            if entry.get('status') == 'done':
                rms_by_case.setdefault(sim.speed_load.name, {})[sim.crack_depth] = entry['rms_ddy_p']

        table = os.path.join(self.output_dir, 'features.csv')
        report = {
            'preset': self.config.preset,
            'master_seed': self.config.master_seed,
            'config_hash': self.config_hash,
            'n_records': len(records),
            'expected_records': len(self.config.cases()) * K,
            'feature_table_sha256': file_checksum(table),
            'failed': self.failed_cases(),
            'le_sign_pattern': le_sign_pattern(records, cfg.le_sign_snr_db, tuple(range(1, K)), (K,),
                                               cfg.le_sign_threshold),
            'cd_depth_trend': cd_depth_trend(records, cfg.cd_families),
            'le_depth_trend': le_depth_trend(records, cfg.le_sign_snr_db, cfg.le_depth_modes),
            'severity_trend': severity_trend(rms_by_case),
        }
        write_json(os.path.join(self.output_dir, 'report.json'), report)

        print("\033[1m" + "Run Report" + "\033[0m")
        print('  ' + report['le_sign_pattern']['statement'])
        for item in report['cd_depth_trend'] + report['le_depth_trend']:
            print('  ' + item['statement'])
        for speed_load, item in report['severity_trend'].items():
            trend = 'non-decreasing' if item['non_decreasing'] else 'NOT non-decreasing'
            print(f'  RMS of ddy_p at {speed_load} is {trend} in crack depth: '
                  + ', '.join(f'{v:.4g}' for v in item['rms']))
        print(f'  feature table sha256 {report["feature_table_sha256"]}')
        print()
        return report
