from __future__ import (
    absolute_import,
    unicode_literals,
)

import copy
import io
from typing import (
    Any,
    Callable,
    Dict,
    List,
    Optional,
)

import attr
from conformity import (
    fields,
    validator,
)
from conformity.fields.logging import PythonLogLevel
import six

from token_lab.channel_variants import (
    ATP_JOULES,
    EnergyModel,
)
from token_lab.errors import ParameterError
from token_lab.first_passage import (
    FirstPassageDist,
    make_first_passage,
)
from token_lab.streams import (
    DEFAULT_SEED,
    MAX_SEED,
)


__all__ = (
    'COMMANDS',
    'DISTRIBUTION_SCHEMA',
    'EXPERIMENT_SCHEMA',
    'ExperimentConfig',
    'coerce_settings',
    'create_configuration',
    'parse_config_file',
    'parse_distribution',
)


def _number(**bounds):  # type: (**float) -> fields.Any
    return fields.Any(fields.Float(**bounds), fields.Integer(**bounds))


def _positive(description):  # type: (six.text_type) -> fields.Any
    return fields.Any(fields.Float(gt=0.0), fields.Integer(gt=0), description=description)


def _cost(description):  # type: (six.text_type) -> fields.Any
    return fields.Any(fields.Float(gte=0.0), fields.Integer(gte=0), description=description)


DISTRIBUTION_SCHEMA = fields.Polymorph(
    switch_field='kind',
    contents_map={
        'exponential': fields.Dictionary(
            {
                'kind': fields.Constant('exponential'),
                'rate': _positive('μ, the reciprocal of the mean passage time (default 1)'),
            },
            optional_keys=('rate', ),
        ),
        'gamma': fields.Dictionary(
            {
                'kind': fields.Constant('gamma'),
                'shape': _positive('The gamma shape k'),
                'rate': _positive('The gamma rate β (default 1)'),
            },
            optional_keys=('rate', ),
        ),
        'deterministic-shift': fields.Dictionary(
            {
                'kind': fields.Constant('deterministic-shift'),
                'shift': _cost('The fixed transit delay'),
                'rate': fields.Nullable(_positive('Rate of the exponential jitter; none for a pure delay')),
            },
            optional_keys=('rate', ),
        ),
        'table-defined': fields.Dictionary(
            {
                'kind': fields.Constant('table-defined'),
                'x': fields.List(_number(gte=0.0), min_length=2, description='Knots, strictly increasing from 0'),
                'cdf': fields.List(_number(gte=0.0, lte=1.0), min_length=2, description='CDF value at each knot'),
                'tail': fields.Constant('exponential', 'power', description='The tail fitted beyond the last knot'),
                'allow_infinite_mean': fields.Boolean(
                    description='Accept a power tail with an infinite mean; only guard diagnostics can use one',
                ),
            },
            optional_keys=('tail', 'allow_infinite_mean'),
        ),
    },
    description='A first-passage law: its `kind` plus that kind\'s named parameters.',
)
""""""  # Empty docstring to make autodoc document this data


COMMANDS = (
    'bounds',
    'capacities',
    'number-vs-timing',
    'ordering-exact',
    'ordering-asymptote',
    'mc-convergence',
    'guard-diagnostic',
    'headline',
    'simulate',
)

EXPERIMENT_SCHEMA = fields.Dictionary(
    {
        'command': fields.Constant(*COMMANDS, description='The experiment to run'),
        'dist': DISTRIBUTION_SCHEMA,
        'rho_min': _positive('Smallest load of the bounds grid'),
        'rho_max': _positive('Largest load of the bounds grid'),
        'points': fields.Integer(gte=1, description='Number of log-spaced grid points'),
        'rho': fields.List(_positive('A load ρ = λ/μ'), min_length=1),
        'm_grid': fields.List(fields.Integer(gte=1), min_length=1, description='Token counts M'),
        'eps': fields.List(_number(gt=0.0, lt=1.0), min_length=1, description='Failure probabilities ε'),
        'k': fields.List(fields.Integer(gte=0), min_length=1, description='Payload lengths K, in characters'),
        'n': fields.List(fields.Integer(gte=1), min_length=1, description='Parallel timing channel counts'),
        'c0': _cost('Energy to make a bare token'),
        'c1': _cost('Base energy to make a payload token'),
        'dc1': _cost('Energy per inscribed character'),
        'ce': _cost('Energy to release and transport a token'),
        'b': fields.Integer(gte=2, description='Payload alphabet size'),
        'power_min': _positive('Smallest power of the capacities grid, in energy units per passage time'),
        'power_max': _positive('Largest power of the capacities grid'),
        'intensity': _positive('Launch intensity λ'),
        'seed': fields.Integer(gte=0, lte=MAX_SEED, description='Seed of every random stream in the run'),
        'trials': fields.Integer(gte=1, description='Monte Carlo trials per grid point'),
        'tokens': fields.Integer(gte=1, description='Tokens M in a simulated channel use'),
        'tolerance': _positive('Relative truncation tolerance of the limiting series'),
        'schedule': fields.UnicodeString(description='CSV file with a launch_time column'),
        'arrivals': fields.UnicodeString(description='CSV file with an arrival_time column'),
        'target_bps': _positive('Target bit rate, bits per second'),
        'passage_time': _positive('Mean passage time 1/μ, in seconds'),
        'atp_joules': _positive('Energy of one ATP, in joules'),
        'out': fields.Nullable(fields.UnicodeString(description='Output file; `-` or null for standard output')),
        'workers': fields.Nullable(fields.Integer(gte=1, description='Worker threads, or null for the environment')),
        'log_level': PythonLogLevel(description='Level of the summary log'),
    },
    optional_keys=(
        'dist', 'rho_min', 'rho_max', 'points', 'rho', 'm_grid', 'eps', 'k', 'n', 'c0', 'c1', 'dc1', 'ce', 'b',
        'power_min', 'power_max', 'intensity', 'seed', 'trials', 'tolerance', 'schedule', 'arrivals', 'target_bps',
        'passage_time', 'atp_joules', 'tokens', 'out', 'workers', 'log_level',
    ),
    description='One experiment: the command and every setting it reads. Unset settings take the command defaults.',
)
""""""  # Empty docstring to make autodoc document this data


_COMMON_DEFAULTS = {
    'dist': {'kind': 'exponential', 'rate': 1.0},
    'seed': DEFAULT_SEED,
    'c0': 2.0,
    'c1': 2.0,
    'dc1': 2.0,
    'ce': 2.0,
    'b': 4,
    'intensity': 1.0,
    'tolerance': 1e-12,
    'trials': 200,
    'out': None,
    'workers': None,
    'log_level': 'INFO',
}  # type: Dict[six.text_type, Any]

_COMMAND_DEFAULTS = {
    'bounds': {'rho_min': 1e-3, 'rho_max': 1e3, 'points': 200},
    'capacities': {'k': [1, 2, 4], 'n': [1, 2, 4], 'power_min': 1e-3, 'power_max': 1e3, 'points': 61},
    'number-vs-timing': {'eps': [0.1, 0.2, 0.3], 'm_grid': [1, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000]},
    'ordering-exact': {},
    'ordering-asymptote': {'rho': [1.0]},
    'mc-convergence': {'rho': [1.0], 'm_grid': [125, 250, 500, 1000, 2000]},
    'guard-diagnostic': {'eps': [0.1], 'm_grid': [10, 20, 50, 100, 200, 500, 1000]},
    'headline': {'n': [1, 2, 4], 'target_bps': 1e6, 'passage_time': 1e-6, 'atp_joules': ATP_JOULES},
    'simulate': {'tokens': 8, 'rho': [1.0]},
}  # type: Dict[six.text_type, Dict[six.text_type, Any]]

# Settings that change where or how fast a run goes, never what it writes
_UNECHOED = frozenset(('out', 'workers', 'log_level'))


@attr.s
class ExperimentConfig(object):
    command = attr.ib()  # type: six.text_type
    settings = attr.ib()  # type: Dict[six.text_type, Any]
    dist = attr.ib()  # type: FirstPassageDist
    energy = attr.ib()  # type: EnergyModel

    @property
    def seed(self):  # type: () -> int
        return self.settings['seed']

    @property
    def out(self):  # type: () -> Optional[six.text_type]
        return self.settings['out']

    @property
    def workers(self):  # type: () -> Optional[int]
        return self.settings['workers']

    @property
    def log_level(self):  # type: () -> six.text_type
        return self.settings['log_level']

    def get(self, key):  # type: (six.text_type) -> Any
        try:
            return self.settings[key]
        except KeyError:
            raise ParameterError('The {} command needs a {!r} setting'.format(self.command, key))

    def parameters(self, keys):  # type: (List[six.text_type]) -> Dict[six.text_type, Any]
        """
        The settings to echo in the output header: the given keys that are set, minus output-only settings, with the
        law in its textual form.
        """
        echoed = {}  # type: Dict[six.text_type, Any]
        for key in keys:
            if key in _UNECHOED or key not in self.settings:
                continue
            echoed[key] = self.dist.describe() if key == 'dist' else self.settings[key]
        return echoed


@validator.validate_call(
    args=fields.Tuple(copy.deepcopy(EXPERIMENT_SCHEMA)),
    kwargs=None,
    returns=fields.ObjectInstance(ExperimentConfig),
)
def create_configuration(config_dict):  # type: (Dict[six.text_type, Any]) -> ExperimentConfig
    """
    Creates an `ExperimentConfig` from a validated settings dictionary, filling in the command's defaults.

    Expected format of config is a dict:

    .. code-block:: python

        {
            'command': 'guard-diagnostic',
            'dist': {'kind': 'table-defined', 'x': [0.0, 1.0], 'cdf': [0.0, 0.5], 'tail': 'power',
                     'allow_infinite_mean': True},
            'eps': [0.1],
            'm_grid': [10, 100, 1000],
            'seed': 1576898766,
        }
    """
    settings = dict(_COMMON_DEFAULTS)
    settings.update(_COMMAND_DEFAULTS[config_dict['command']])
    settings.update(config_dict)

    dist_settings = dict(settings['dist'])
    kind = dist_settings.pop('kind')
    dist = make_first_passage(kind, dist_settings)

    energy = EnergyModel(
        c0=float(settings['c0']),
        c1=float(settings['c1']),
        dc1=float(settings['dc1']),
        ce=float(settings['ce']),
        alphabet_size=settings['b'],
    )
    return ExperimentConfig(command=settings['command'], settings=settings, dist=dist, energy=energy)


def _float_list(raw):  # type: (six.text_type) -> List[float]
    return [float(v) for v in raw.split(',') if v.strip()]


def _int_list(raw):  # type: (six.text_type) -> List[int]
    return [int(v) for v in raw.split(',') if v.strip()]


def _optional_int(raw):  # type: (six.text_type) -> Optional[int]
    return int(raw) if raw.strip() else None


def _seed(raw):  # type: (six.text_type) -> int
    return int(raw, 0)


def _boolean(raw):  # type: (six.text_type) -> bool
    lowered = raw.strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError('not a boolean: {!r}'.format(raw))


def parse_distribution(text):  # type: (six.text_type) -> Dict[six.text_type, Any]
    """
    Parses `kind:name=value,name=value` into a `DISTRIBUTION_SCHEMA` dictionary. Table knots and CDF values are
    separated with `|`, as in `table-defined:x=0|1,cdf=0|0.5,tail=power`.
    """
    kind, _, body = text.strip().partition(':')
    result = {'kind': kind.strip()}  # type: Dict[six.text_type, Any]
    for item in body.split(','):
        if not item.strip():
            continue
        name, separator, value = item.partition('=')
        name, value = name.strip(), value.strip()
        if not separator or not name:
            raise ParameterError('Malformed first-passage parameter {!r} in {!r}'.format(item, text))
        try:
            if name in ('x', 'cdf'):
                result[name] = [float(v) for v in value.split('|')]
            elif name == 'tail':
                result[name] = value
            elif name == 'allow_infinite_mean':
                result[name] = _boolean(value)
            else:
                result[name] = float(value)
        except ValueError:
            raise ParameterError('Bad value {!r} for {!r} in {!r}'.format(value, name, text))
    return result


_COERCERS = {
    'dist': parse_distribution,
    'rho_min': float,
    'rho_max': float,
    'points': int,
    'rho': _float_list,
    'm_grid': _int_list,
    'eps': _float_list,
    'k': _int_list,
    'n': _int_list,
    'c0': float,
    'c1': float,
    'dc1': float,
    'ce': float,
    'b': int,
    'power_min': float,
    'power_max': float,
    'intensity': float,
    'seed': _seed,
    'trials': int,
    'tokens': int,
    'tolerance': float,
    'target_bps': float,
    'passage_time': float,
    'atp_joules': float,
    'workers': _optional_int,
}  # type: Dict[six.text_type, Callable[[six.text_type], Any]]


def coerce_settings(raw):  # type: (Dict[six.text_type, six.text_type]) -> Dict[six.text_type, Any]
    """
    Converts textual settings (from a config file or the command line) to the types `EXPERIMENT_SCHEMA` expects.
    Unknown keys are passed through untouched, so validation reports them.
    """
    settings = {}  # type: Dict[six.text_type, Any]
    for key, value in raw.items():
        coercer = _COERCERS.get(key)
        if coercer is None:
            settings[key] = value
            continue
        try:
            settings[key] = coercer(value)
        except ValueError:
            raise ParameterError('Bad value {!r} for setting {!r}'.format(value, key))
    return settings


def parse_config_file(path):  # type: (six.text_type) -> Dict[six.text_type, six.text_type]
    """
    Reads a plain-text `key = value` file. Blank lines and lines starting with `#` are ignored; dashes in keys are
    read as underscores so file keys can match the command-line flags.
    """
    raw = {}  # type: Dict[six.text_type, six.text_type]
    with io.open(path, 'r', encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            key, separator, value = line.partition('=')
            if not separator or not key.strip():
                raise ParameterError('{}:{}: expected key = value'.format(path, number))
            raw[key.strip().replace('-', '_')] = value.strip()
    return raw
