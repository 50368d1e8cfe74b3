"""
The `token-lab` command line. Every subcommand writes one CSV table (to `--out` or standard output) and logs its
summary lines and run counters to standard error.

Exit codes: 0 on success, 2 for bad parameters or configuration, 3 for I/O failures, 4 when a computed quantity
violates an identity that must hold (a bug signal, never clamped away).
"""
from __future__ import (
    absolute_import,
    unicode_literals,
)

import argparse
import logging
import sys
from typing import (
    Any,
    Dict,
    List,
    Optional,
)

from conformity.error import ValidationError
import six

from token_lab.configuration import (
    coerce_settings,
    create_configuration,
    parse_config_file,
)
from token_lab.errors import (
    InconsistencyError,
    NumericConsistencyError,
    ParameterError,
)
from token_lab.figures import RUNNERS
from token_lab.publishers.csv import CsvPublisher
from token_lab.publishers.logging import LogPublisher
from token_lab.recorder import RunRecorder
from token_lab.streams import (
    THREADS_ENVIRONMENT_VARIABLE,
    worker_count,
)
from token_lab.version import __version__


__all__ = (
    'EXIT_IO_ERROR',
    'EXIT_NUMERIC_ERROR',
    'EXIT_OK',
    'EXIT_PARAMETER_ERROR',
    'build_parser',
    'entry_point',
    'main',
)


EXIT_OK = 0
EXIT_PARAMETER_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_NUMERIC_ERROR = 4

ERROR_LOGGER = 'token_lab.errors'
SUMMARY_LOGGER = 'token_lab.summary'

_logger = logging.getLogger('token_lab')

# Argument destinations that are not experiment settings
_CONTROL_DESTINATIONS = frozenset(('config', 'command', 'group'))


def _common_options():  # type: () -> argparse.ArgumentParser
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='A key = value settings file; flags override its values')
    common.add_argument('--seed', help='Seed of every random stream (default 0x5EED70CE)')
    common.add_argument('--out', help='Output CSV file (default: standard output)')
    common.add_argument(
        '--workers',
        help='Worker threads (default: ${} or 1)'.format(THREADS_ENVIRONMENT_VARIABLE),
    )
    common.add_argument('--log-level', dest='log_level', help='Summary log level (default INFO)')
    return common


def _energy_options(parser, payload=True):  # type: (argparse.ArgumentParser, bool) -> None
    parser.add_argument('--c0', help='Energy to make a bare token (default 2)')
    parser.add_argument('--ce', help='Energy to release and transport a token (default 2)')
    if payload:
        parser.add_argument('--c1', help='Base energy to make a payload token (default 2)')
        parser.add_argument('--dc1', help='Energy per inscribed character (default 2)')
        parser.add_argument('--b', help='Payload alphabet size (default 4)')


def build_parser():  # type: () -> argparse.ArgumentParser
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog='token-lab',
        description='Capacity bounds and simulations for timing channels built from identical tokens.',
    )
    parser.add_argument('--version', action='version', version='%(prog)s {}'.format(__version__))
    commands = parser.add_subparsers(dest='group', metavar='command')
    commands.required = True

    bounds = commands.add_parser('bounds', parents=[common], help='Capacity bounds over a log-spaced load grid')
    bounds.set_defaults(command='bounds')
    bounds.add_argument('--rho-min', dest='rho_min')
    bounds.add_argument('--rho-max', dest='rho_max')
    bounds.add_argument('--points')

    figures = commands.add_parser('figures', help='Cross-channel comparison curves')
    figure_commands = figures.add_subparsers(dest='figure', metavar='figure')
    figure_commands.required = True

    capacities = figure_commands.add_parser(
        'capacities',
        parents=[common],
        help='Timing-only and timing-plus-payload rates against power',
    )
    capacities.set_defaults(command='capacities')
    capacities.add_argument('--k', help='Payload lengths, comma separated')
    capacities.add_argument('--n', help='Parallel timing channel counts, comma separated')
    capacities.add_argument('--power-min', dest='power_min')
    capacities.add_argument('--power-max', dest='power_max')
    capacities.add_argument('--points')
    _energy_options(capacities)

    number = figure_commands.add_parser(
        'number-vs-timing',
        parents=[common],
        help='The number/concentration channel against the timing lower bound',
    )
    number.set_defaults(command='number-vs-timing')
    number.add_argument('--eps', help='Failure probabilities, comma separated')
    number.add_argument('--m-grid', dest='m_grid', help='Token counts, comma separated')

    ordering = commands.add_parser('ordering', help='Ordering entropy of sorted arrivals')
    ordering_commands = ordering.add_subparsers(dest='ordering', metavar='mode')
    ordering_commands.required = True

    exact = ordering_commands.add_parser('exact', parents=[common], help='Every ordering quantity for one channel use')
    exact.set_defaults(command='ordering-exact')
    exact.add_argument('--schedule', help='CSV with a launch_time column')
    exact.add_argument('--arrivals', help='CSV with an arrival_time column')
    exact.add_argument('--dist', help='First-passage law as kind:name=value,... (default exponential:rate=1)')

    asymptote = ordering_commands.add_parser(
        'asymptote',
        parents=[common],
        help='The limiting ordering entropy per token',
    )
    asymptote.set_defaults(command='ordering-asymptote')
    asymptote.add_argument('--rho', help='Loads, comma separated')
    asymptote.add_argument('--tolerance')

    convergence = commands.add_parser(
        'mc-convergence',
        parents=[common],
        help='Monte Carlo ordering entropy against its limit',
    )
    convergence.set_defaults(command='mc-convergence')
    convergence.add_argument('--m-grid', dest='m_grid', help='Token counts, comma separated')
    convergence.add_argument('--rho', help='The load (first value is used)')
    convergence.add_argument('--trials')
    convergence.add_argument('--tolerance')

    guard = commands.add_parser('guard-diagnostic', parents=[common], help='M·Ḡ(γ) over a token-count grid')
    guard.set_defaults(command='guard-diagnostic')
    guard.add_argument('--dist', help='First-passage law as kind:name=value,...')
    guard.add_argument('--intensity', help='Launch intensity λ (default 1)')
    guard.add_argument('--eps', help='Failure probabilities, comma separated')
    guard.add_argument('--m-grid', dest='m_grid', help='Token counts, comma separated')

    headline = commands.add_parser(
        'headline',
        parents=[common],
        help='Transmitter power needed for a target bit rate',
    )
    headline.set_defaults(command='headline')
    headline.add_argument('--n', help='Parallel channel counts to consider, comma separated')
    headline.add_argument('--target-bps', dest='target_bps')
    headline.add_argument('--passage-time', dest='passage_time', help='Mean passage time in seconds')
    headline.add_argument('--atp-joules', dest='atp_joules')
    _energy_options(headline, payload=False)

    simulate = commands.add_parser('simulate', parents=[common], help='One simulated channel use, per token')
    simulate.set_defaults(command='simulate')
    simulate.add_argument('--tokens', help='Tokens M')
    simulate.add_argument('--rho', help='The load (first value is used)')
    simulate.add_argument('--dist', help='First-passage law as kind:name=value,...')

    return parser


def _flag_settings(arguments):  # type: (argparse.Namespace) -> Dict[six.text_type, six.text_type]
    return {
        key: value
        for key, value in six.iteritems(vars(arguments))
        if key not in _CONTROL_DESTINATIONS and key not in ('figure', 'ordering') and value is not None
    }


def run(arguments):  # type: (argparse.Namespace) -> int
    raw = parse_config_file(arguments.config) if arguments.config else {}
    raw.pop('command', None)
    raw.update(_flag_settings(arguments))

    settings = coerce_settings(raw)  # type: Dict[six.text_type, Any]
    settings['command'] = arguments.command
    config = create_configuration(settings)

    logging.getLogger('token_lab').setLevel(config.log_level)
    workers = worker_count(config.workers)

    recorder = RunRecorder(prefix='token_lab')
    with recorder.timer('run.{}'.format(config.command)):
        table = RUNNERS[config.command](config, workers, recorder)

    publishers = [CsvPublisher(config.out), LogPublisher(SUMMARY_LOGGER)]
    for publisher in publishers:
        publisher.publish(table, error_logger=ERROR_LOGGER)
    recorder.publish_all(publishers, error_logger=ERROR_LOGGER)
    return EXIT_OK


def main(argv=None):  # type: (Optional[List[six.text_type]]) -> int
    logging.basicConfig(stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('token_lab').setLevel(logging.INFO)

    parser = build_parser()
    try:
        arguments = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_PARAMETER_ERROR

    try:
        return run(arguments)
    except ValidationError as e:
        _logger.error('Invalid configuration: %s', e)
        return EXIT_PARAMETER_ERROR
    except (ParameterError, InconsistencyError) as e:
        _logger.error('%s', e)
        return EXIT_PARAMETER_ERROR
    except NumericConsistencyError as e:
        _logger.error('Numeric consistency failure: %s', e)
        return EXIT_NUMERIC_ERROR
    except (IOError, OSError) as e:
        _logger.error('I/O failure: %s', e)
        return EXIT_IO_ERROR


def entry_point():  # type: () -> None
    sys.exit(main())
