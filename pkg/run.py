import argparse
import os
import sys
import warnings

from exp.exp_decompose import Exp_Decompose
from exp.exp_features import Exp_Features
from exp.exp_pipeline import Exp_Pipeline
from exp.exp_plots import PLOTS, Exp_Plots
from exp.exp_simulate import Exp_Simulate
from utils.config import PRESETS, load_config
from utils.exceptions import ArtifactError, ConfigError
from utils.print_args import print_args
from utils.tools import Logger

warnings.filterwarnings('ignore')

VERBS = ('simulate', 'decompose', 'features', 'run', 'plots', 'validate-config')


def build_parser():
    parser = argparse.ArgumentParser(description='Gearbox crack chaos pipeline')

    # basic config
    parser.add_argument('verb', type=str, choices=VERBS,
                        help='options: [simulate, decompose, features, run, plots, validate-config]')
    parser.add_argument('--config', type=str, default='./configs/experiment.yaml', help='experiment file')
    parser.add_argument('--preset', type=str, default=None, choices=sorted(PRESETS),
                        help='desk: 10 kHz / 1.5 s, paper: 100 kHz / 4 s; overrides the simulation section')
    parser.add_argument('--output_dir', type=str, default=None, help='overrides output_dir of the experiment file')
    parser.add_argument('--seed', type=int, default=None, help='overrides master_seed')
    parser.add_argument('--workers', type=int, default=None, help='size of the case worker pool')
    parser.add_argument('--quiet', action='store_true', default=False, help='disable progress bars')

    # plots
    parser.add_argument('--which', type=str, default='features', choices=PLOTS, help='plot data to emit')
    parser.add_argument('--render_png', action='store_true', default=False,
                        help='also render a quick-look png next to each plot-data csv')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {'preset': args.preset, 'output_dir': args.output_dir, 'seed': args.seed,
                 'workers': args.workers, 'render_png': args.render_png}
    try:
        config = load_config(args.config, overrides)
    except ConfigError as e:
        print(f'config error: {e}')
        return 2

    if args.verb == 'validate-config':
        print('Args in experiment:')
        print_args(config, args)
        return 0

    os.makedirs(config.output_dir, exist_ok=True)
    sys.stdout = Logger(os.path.join(config.output_dir, 'run_log.txt'))
    print('Args in experiment:')
    print_args(config, args)

    try:
        if args.verb == 'simulate':
            exp = Exp_Simulate(args, config)
            exp.simulate()
        elif args.verb == 'decompose':
            exp = Exp_Decompose(args, config)
            exp.decompose()
        elif args.verb == 'features':
            exp = Exp_Features(args, config)
            exp.features()
        elif args.verb == 'run':
            exp = Exp_Pipeline(args, config)
            exp.run()
        else:
            exp = Exp_Plots(args, config)
            exp.emit_plots(args.which)
            return 0
    except ArtifactError as e:
        print(f'artifact error: {e}')
        return 1

    failed = exp.failed_cases()
    if failed:
        print('{} failed: {}'.format(len(failed), ', '.join(failed)))
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
