import os
import time
import warnings

from data_provider.data_factory import checksums, load_sim, save_tsa, save_vmd, verify_checksums
from data_provider.tsa import estimate_shaft_frequency, tsa, tsa_bank
from data_provider.vmd import vmd
from exp.exp_simulate import Exp_Simulate
from exp.exp_basic import failure
from utils.augmentation import add_awgn
from utils.exceptions import ArtifactError

warnings.filterwarnings('ignore')


def analysis_window(config, sim):
    """First sample after the startup transient."""
    return int(round(config.simulation.transient_s * sim.sample_rate_Hz))


def shaft_frequency(config, case, sim, start):
    if config.tsa.period_source == 'estimated':
        return estimate_shaft_frequency(sim['omega_p'][start:])
    return case.speed_load.shaft_frequency_Hz


def decompose_case(config, case, sim_entry, folder):
    """Noise, VMD and TSA of one case, read back from the persisted simulation."""
    if not sim_entry or sim_entry.get('status') != 'done':
        raise ArtifactError(case.case_id, f'simulation {case.sim_id} is not available')
    verify_checksums(sim_entry['artifacts'], sim_entry['checksums'], case.case_id)
    sim = load_sim(os.path.dirname(sim_entry['artifacts']['sim.csv']), case.case_id)

    fs = sim.sample_rate_Hz
    start = analysis_window(config, sim)
    clean = sim[config.simulation.channel][start:]
    noisy = add_awgn(clean, case.snr_db, case.seed)
    decomposition = vmd(noisy.data, fs, config.vmd)
    f_shaft = shaft_frequency(config, case, sim, start)

    paths = save_vmd(decomposition, folder, t0=float(sim.t[start]), extra={
        'sim_id': case.sim_id, 'channel': config.simulation.channel, 'snr_db': case.snr_db,
        'achieved_snr_db': noisy.achieved_snr_db, 'seed': case.seed, 'shaft_freq_Hz': f_shaft,
        'transient_s': config.simulation.transient_s})
    paths.update(save_tsa(tsa_bank(decomposition, fs, f_shaft), folder, raw=tsa(noisy.data, fs, f_shaft)))
    return {'artifacts': paths, 'vmd_converged': decomposition.converged,
            'vmd_iterations': decomposition.iterations, 'shaft_freq_Hz': f_shaft}


def case_entry(case):
    return {'speed_load': case.speed_load.name, 'condition': case.condition, 'crack_depth': case.crack_depth,
            'snr_db': case.snr_db, 'seed': case.seed, 'sim_id': case.sim_id}


def process_case(config, case, sim_entry, prior, folder, stages):
    """
    Run the requested stages of one case. A stage already recorded in
    ``prior`` is reused; any failure is returned as a failed entry.
    """
    from exp.exp_features import features_case

    start = time.time()
    entry = dict(prior or {})
    entry.update(case_entry(case))
    stage = None
    try:
        if 'decomposed' in stages and entry.get('status') != 'done':
            stage = 'decomposed'
            result = decompose_case(config, case, sim_entry, folder)
            entry.update(result)
            entry.update({'status': 'done', 'stage': 'decomposed', 'reason': None,
                          'checksums': checksums(result['artifacts'])})
        if 'features' in stages:
            stage = 'features'
            if entry.get('status') != 'done':
                raise ArtifactError(case.case_id, 'decomposition is not available')
            result = features_case(config, case, entry, folder)
            entry['artifacts'] = dict(entry['artifacts'], **result.pop('artifacts'))
            entry.update(result)
            entry.update({'status': 'done', 'stage': 'features', 'reason': None,
                          'checksums': checksums(entry['artifacts'])})
    except Exception as e:
        entry.update(failure(stage, e))
    entry['timing_s'] = entry.get('timing_s', 0.0) + time.time() - start
    return entry


class Exp_Decompose(Exp_Simulate):
    def __init__(self, args, config=None):
        super(Exp_Decompose, self).__init__(args, config)

    def _run_cases(self, stages, desc):
        target = stages[-1]
        jobs = []
        for case in self.config.cases():
            entry = self.manifest['cases'].get(case.case_id)
            state = self.entry_state(entry, target, case.case_id)
            if state == 'done':
                print('>>>>>>>skip {} : {} (finished)'.format(desc, case.case_id))
                continue
            if state == 'corrupt':
                continue
            # a case only partly done resumes from its last finished stage
            prior = entry if entry and entry.get('status') == 'done' else None
            if prior is not None and self.entry_state(prior, prior['stage'], case.case_id) != 'done':
                continue
            print('>>>>>>>start {} : {}>>>>>>>>>>>>>>>>>>>>>>>>>>'.format(desc, case.case_id))
            sim_entry = self.manifest['simulations'].get(case.sim_id)
            jobs.append((self.config, case, sim_entry, prior, self.case_dir(case.case_id), stages))

        for job, entry in zip(jobs, self._pool(process_case, jobs, desc)):
            case_id = job[1].case_id
            self.manifest['cases'][case_id] = entry
            if entry['status'] != 'done':
                print(f'{case_id} failed: {entry["reason"]}')
        self.save_manifest()
        return self.manifest

    def decompose(self):
        self.simulate()
        return self._run_cases(('decomposed',), 'decompose')
