import os
import time

from joblib import Parallel, delayed
from tqdm import tqdm

from data_provider.data_factory import verify_checksums
from utils.config import as_dict, load_config
from utils.exceptions import GearboxError
from utils.tools import params_hash, read_json, write_json

STAGES = ('decomposed', 'features')


def failure(stage, error):
    return {'status': 'failed', 'stage': stage, 'reason': f'{type(error).__name__}: {error}'}


class Exp_Basic(object):
    def __init__(self, args, config=None):
        self.args = args
        overrides = {
            'preset': getattr(args, 'preset', None),
            'output_dir': getattr(args, 'output_dir', None),
            'seed': getattr(args, 'seed', None),
            'workers': getattr(args, 'workers', None),
            'render_png': getattr(args, 'render_png', None),
        }
        self.config = config if config is not None else load_config(args.config, overrides)
        self.quiet = bool(getattr(args, 'quiet', False))
        self.output_dir = self.config.output_dir
        os.makedirs(self.output_dir, exist_ok=True)
        self.manifest_path = os.path.join(self.output_dir, 'manifest.json')
        self.config_hash = self._config_hash()
        self.manifest = self._load_manifest()

    def _config_hash(self):
        payload = as_dict(self.config)
        for key in ('output_dir', 'workers', 'source', 'plots', 'system_file', 'report'):
            payload.pop(key, None)
        return params_hash(payload)

    def _load_manifest(self):
        fresh = {'config_hash': self.config_hash, 'config': self.config.source, 'preset': self.config.preset,
                 'simulations': {}, 'cases': {}}
        if not os.path.isfile(self.manifest_path):
            return fresh
        try:
            manifest = read_json(self.manifest_path)
        except ValueError:
            print('manifest unreadable, starting over')
            return fresh
        if manifest.get('config_hash') != self.config_hash:
            print('configuration changed since the last run, recomputing every case')
            return fresh
        return manifest

    def save_manifest(self):
        # only the parent process writes the manifest
        write_json(self.manifest_path, self.manifest)

    def sim_dir(self, sim_id):
        return os.path.join(self.output_dir, 'sims', sim_id)

    def case_dir(self, case_id):
        return os.path.join(self.output_dir, 'cases', case_id)

    def entry_state(self, entry, stage=None, case='?'):
        """
        'done' when the entry reached ``stage`` and every artifact still carries
        its recorded checksum, 'corrupt' on a checksum mismatch (the entry is
        marked failed and recomputed on the next run), 'pending' otherwise.
        """
        if not entry or entry.get('status') != 'done':
            return 'pending'
        if stage is not None and STAGES.index(entry.get('stage', STAGES[0])) < STAGES.index(stage):
            return 'pending'
        try:
            verify_checksums(entry['artifacts'], entry['checksums'], case)
        except GearboxError as e:
            entry.update(failure(entry.get('stage'), e))
            print(f'{case}: {entry["reason"]}')
            return 'corrupt'
        return 'done'

    def _pool(self, func, jobs, desc):
        """Run independent jobs on a bounded worker pool; results come back in job order."""
        if not jobs:
            return []
        start = time.time()
        results = Parallel(n_jobs=self.config.workers)(
            delayed(func)(*job) for job in tqdm(jobs, desc=desc, disable=self.quiet))
        print(f'{desc}: {len(jobs)} jobs in {time.time() - start:.1f}s')
        return results

    def failed_cases(self):
        out = [k for k, v in self.manifest['simulations'].items() if v.get('status') != 'done']
        out += [k for k, v in self.manifest['cases'].items() if v.get('status') != 'done']
        return out
