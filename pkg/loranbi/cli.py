"""Command-line front end: ``loranbi <experiment> [--config PATH] [options]``."""
import argparse
import contextlib
import logging
import os
import sys

from dask.diagnostics import ProgressBar

from ._version import __version__
from .errors import ConfigError, LoRaNBIError
from .experiment import EXPERIMENTS, FORMATS, ExperimentConfig, load_config, run_experiment

logger = logging.getLogger(__name__)

WORKERS_ENV = 'LORANBI_WORKERS'

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def default_workers(environ=os.environ):
    """Worker count from the environment, or None to let dask decide."""
    value = environ.get(WORKERS_ENV)
    if value in (None, ''):
        return None
    try:
        workers = int(value)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {value!r}") from None
    if workers < 1:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {value!r}")
    return workers


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog='loranbi',
        description="Monte Carlo robustness of LoRa against narrowband BPSK/GMSK interference.")
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', metavar='PATH', help="experiment configuration document")
    common.add_argument('--seed', type=_seed, help="master seed, overrides the configuration")
    common.add_argument('--trials', type=_positive_int, help="trials per scenario")
    common.add_argument('--out', metavar='PATH', help="output file")
    common.add_argument('--format', choices=FORMATS, help="output format")
    common.add_argument('--workers', type=_positive_int,
                        help=f"parallel workers, default from ${WORKERS_ENV}; never changes the results")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    verbosity.add_argument('-q', '--quiet', action='store_true', help="warnings only, no progress bar")

    subparsers = parser.add_subparsers(dest='experiment', metavar='EXPERIMENT', required=True)
    for name in EXPERIMENTS:
        subparsers.add_parser(name, parents=[common], aliases=[name.replace('_', '-')],
                              help=f"run the {name} experiment")
    return parser


def make_config(args):
    """Configuration from the document named by ``--config`` with the command-line overrides applied."""
    experiment = args.experiment.replace('-', '_')
    if args.config is not None:
        config = load_config(args.config)
        if config.experiment != experiment:
            raise ConfigError(f"configuration is for {config.experiment}, not {experiment}", key='experiment')
    else:
        config = ExperimentConfig(experiment)
    overrides = {'seed': args.seed, 'trials': args.trials, 'output': args.out, 'format': args.format}
    return config.replace(**{k: v for k, v in overrides.items() if v is not None})


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(stream=sys.stderr, level=level, format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    try:
        config = make_config(args)
        workers = args.workers if args.workers is not None else default_workers()
        progress = contextlib.nullcontext() if args.quiet else ProgressBar(minimum=1., out=sys.stderr)
        with progress:
            run_experiment(config, workers=workers)
    except ConfigError as err:
        logger.error("invalid configuration: %s", err)
        return EXIT_CONFIG
    except OSError as err:
        logger.error("%s", err)
        return EXIT_IO
    except LoRaNBIError as err:
        logger.error("%s: %s", type(err).__name__, err)
        return EXIT_ERROR
    return EXIT_OK
