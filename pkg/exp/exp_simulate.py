import time
import warnings
from dataclasses import asdict

from data_provider.data_factory import checksums, save_sim
from exp.exp_basic import Exp_Basic, failure
from models.cemg import simulate, steady_state_summary
from utils.exceptions import DomainError
from utils.metrics import rms
from utils.tools import case_seed

warnings.filterwarnings('ignore')


def severity_window(config):
    """Samples of the final 2 s, or of the post-transient span when shorter."""
    sim = config.simulation
    span = min(2.0, sim.duration_s - sim.transient_s)
    return int(round(span * sim.sample_rate_Hz))


def simulate_case(config, case, folder, progress=False):
    start = time.time()
    try:
        params = config.params_for(case.speed_load)
        seed = case_seed(config.master_seed, case.speed_load.name, case.condition)
        result = simulate(params, config.crack(case.crack_depth), config.simulation.duration_s,
                          config.simulation.sample_rate_Hz, seed=seed, substeps=config.simulation.substeps,
                          progress=progress)
        try:
            summary = asdict(steady_state_summary(result))
        except DomainError:
            summary = None
        paths = save_sim(result, folder, summary)
        entry = {
            'status': 'done', 'stage': 'simulated', 'reason': None,
            'artifacts': paths, 'checksums': checksums(paths),
            'seed': seed, 'substeps': result.metadata['substeps'], 'steady_state': summary,
            'rms_ddy_p': rms(result['ddy_p'][-severity_window(config):]),
        }
    except Exception as e:
        entry = failure('simulated', e)
    entry.update({'speed_load': case.speed_load.name, 'condition': case.condition,
                  'crack_depth': case.crack_depth, 'timing_s': time.time() - start})
    return entry


class Exp_Simulate(Exp_Basic):
    def __init__(self, args, config=None):
        super(Exp_Simulate, self).__init__(args, config)

    def simulate(self):
        jobs = []
        progress = not self.quiet and self.config.workers == 1
        for case in self.config.simulations():
            entry = self.manifest['simulations'].get(case.sim_id)
            state = self.entry_state(entry, None, case.sim_id)
            if state == 'pending':
                print('>>>>>>>start simulate : {}>>>>>>>>>>>>>>>>>>>>>>>>>>'.format(case.sim_id))
                jobs.append((self.config, case, self.sim_dir(case.sim_id), progress))
            elif state == 'done':
                print('>>>>>>>skip simulate : {} (finished)'.format(case.sim_id))

        for job, entry in zip(jobs, self._pool(simulate_case, jobs, 'simulate')):
            sim_id = job[1].sim_id
            self.manifest['simulations'][sim_id] = entry
            if entry['status'] != 'done':
                print(f'{sim_id} failed: {entry["reason"]}')
        self.save_manifest()
        return self.manifest
