"""
First-passage (transit) time laws and the capacity-achieving launch-time law of the deadline-constrained exponential
channel.

Every law is causal (no mass below zero), has a finite strictly positive mean (unless a table law is explicitly
allowed an infinite one for guard-interval diagnostics) and is immutable after construction. Sampling always takes an
explicit `numpy.random.Generator`; nothing here touches global random state.
"""
from __future__ import (
    absolute_import,
    unicode_literals,
)

import abc
import math
from typing import (
    Any,
    Dict,
    Optional,
    Sequence,
    Tuple,
    Type,
    Union,
)

import attr
import numpy as np
from scipy import (
    integrate,
    stats,
)
import six

from token_lab.errors import (
    ParameterError,
    SingularityError,
)


__all__ = (
    'DeterministicShift',
    'Exponential',
    'FirstPassageDist',
    'Gamma',
    'KINDS',
    'OptimalInputDensity',
    'TableDefined',
    'make_first_passage',
    'numerical_mean',
    'sample_first_passage',
    'sample_optimal_input',
)


ArrayLike = Union[float, Sequence[float], np.ndarray]

TAIL_EXPONENTIAL = 'exponential'
TAIL_POWER = 'power'


def _positive(name):
    def validator(_instance, _attribute, value):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ParameterError('{} must be a finite positive number, got {!r}'.format(name, value))
    return validator


@six.add_metaclass(abc.ABCMeta)
class FirstPassageDist(object):
    """
    A causal transit-time law with density g, CDF G and CCDF Ḡ. All evaluation methods are vectorised: they accept a
    scalar or an array and return a `numpy` array (or a numpy scalar for scalar input).
    """

    kind = None  # type: six.text_type

    has_density = True
    """False for degenerate laws, whose `density` raises `SingularityError`."""

    @property
    @abc.abstractmethod
    def mean(self):  # type: () -> float
        """The mean first-passage time 1/μ (possibly infinite for table laws with an allowed heavy tail)."""

    @abc.abstractmethod
    def density(self, d):  # type: (ArrayLike) -> np.ndarray
        """g(d), zero for d < 0."""

    @abc.abstractmethod
    def cdf(self, x):  # type: (ArrayLike) -> np.ndarray
        """G(x) = P(D ≤ x)."""

    @abc.abstractmethod
    def ccdf(self, x):  # type: (ArrayLike) -> np.ndarray
        """Ḡ(x) = 1 − G(x)."""

    @abc.abstractmethod
    def sample(self, count, rng):  # type: (int, np.random.Generator) -> np.ndarray
        """Draws `count` i.i.d. durations."""

    @abc.abstractmethod
    def parameters(self):  # type: () -> Dict[six.text_type, Any]
        """The named parameters, as accepted by `make_first_passage`."""

    def log_density(self, d):  # type: (ArrayLike) -> np.ndarray
        with np.errstate(divide='ignore'):
            return np.log(self.density(d))

    @property
    def mu(self):  # type: () -> float
        """μ, the reciprocal of the mean."""
        return 1.0 / self.mean

    @property
    def has_finite_mean(self):  # type: () -> bool
        return math.isfinite(self.mean)

    def breakpoints(self):  # type: () -> Tuple[float, ...]
        """Points where G is not smooth, used to split quadrature."""
        return ()

    def describe(self):  # type: () -> six.text_type
        return '{}:{}'.format(self.kind, ','.join(
            '{}={}'.format(k, v) for k, v in sorted(self.parameters().items()) if v is not None
        ))


@attr.s(frozen=True)
class Exponential(FirstPassageDist):
    """
    g(d) = μ e^{−μd} for d ≥ 0. The only law for which every causal assignment of sorted arrivals to launches is
    equally likely.
    """

    kind = 'exponential'

    rate = attr.ib(default=1.0, validator=_positive('rate'))  # type: float

    @property
    def mean(self):  # type: () -> float
        return 1.0 / self.rate

    def density(self, d):  # type: (ArrayLike) -> np.ndarray
        d = np.asarray(d, dtype=float)
        return np.where(d >= 0, self.rate * np.exp(-self.rate * np.maximum(d, 0.0)), 0.0)

    def log_density(self, d):  # type: (ArrayLike) -> np.ndarray
        d = np.asarray(d, dtype=float)
        return np.where(d >= 0, math.log(self.rate) - self.rate * np.maximum(d, 0.0), -np.inf)

    def cdf(self, x):  # type: (ArrayLike) -> np.ndarray
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def ccdf(self, x):  # type: (ArrayLike) -> np.ndarray
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, np.exp(-self.rate * np.maximum(x, 0.0)), 1.0)

    def sample(self, count, rng):  # type: (int, np.random.Generator) -> np.ndarray
        return rng.exponential(1.0 / self.rate, size=count)

    def parameters(self):  # type: () -> Dict[six.text_type, Any]
        return {'rate': self.rate}


@attr.s(frozen=True)
class Gamma(FirstPassageDist):
    """
    g(d) = β^k d^{k−1} e^{−βd} / Γ(k). With shape k = 1 this is the exponential law; other shapes make the ordering
    entropy strictly smaller than the log of the admissible-permutation count.
    """

    kind = 'gamma'

    shape = attr.ib(validator=_positive('shape'))  # type: float
    rate = attr.ib(default=1.0, validator=_positive('rate'))  # type: float

    @property
    def mean(self):  # type: () -> float
        return self.shape / self.rate

    def density(self, d):  # type: (ArrayLike) -> np.ndarray
        return stats.gamma.pdf(np.asarray(d, dtype=float), self.shape, scale=1.0 / self.rate)

    def log_density(self, d):  # type: (ArrayLike) -> np.ndarray
        return stats.gamma.logpdf(np.asarray(d, dtype=float), self.shape, scale=1.0 / self.rate)

    def cdf(self, x):  # type: (ArrayLike) -> np.ndarray
        return stats.gamma.cdf(np.asarray(x, dtype=float), self.shape, scale=1.0 / self.rate)

    def ccdf(self, x):  # type: (ArrayLike) -> np.ndarray
        return stats.gamma.sf(np.asarray(x, dtype=float), self.shape, scale=1.0 / self.rate)

    def sample(self, count, rng):  # type: (int, np.random.Generator) -> np.ndarray
        # numpy draws gammas by Marsaglia-Tsang rejection
        return rng.gamma(self.shape, 1.0 / self.rate, size=count)

    def parameters(self):  # type: () -> Dict[six.text_type, Any]
        return {'shape': self.shape, 'rate': self.rate}


@attr.s(frozen=True)
class DeterministicShift(FirstPassageDist):
    """
    A fixed transit delay `shift`, optionally followed by exponential jitter with the given rate. Without jitter the
    law is degenerate: it can be sampled and its CDF evaluated, but it has no density.
    """

    kind = 'deterministic-shift'

    shift = attr.ib()  # type: float
    jitter_rate = attr.ib(default=None)  # type: Optional[float]

    def __attrs_post_init__(self):  # type: () -> None
        if self.jitter_rate is not None:
            _positive('rate')(self, None, self.jitter_rate)
            if not (isinstance(self.shift, (int, float)) and math.isfinite(self.shift) and self.shift >= 0):
                raise ParameterError('shift must be a finite nonnegative number, got {!r}'.format(self.shift))
        else:
            # G(0) = 0 requires the whole mass strictly after the origin
            _positive('shift')(self, None, self.shift)

    @property
    def has_density(self):  # type: ignore
        return self.jitter_rate is not None

    @property
    def mean(self):  # type: () -> float
        return self.shift + (1.0 / self.jitter_rate if self.jitter_rate else 0.0)

    def density(self, d):  # type: (ArrayLike) -> np.ndarray
        if self.jitter_rate is None:
            raise SingularityError('A deterministic shift without jitter has no density')
        d = np.asarray(d, dtype=float) - self.shift
        return np.where(d >= 0, self.jitter_rate * np.exp(-self.jitter_rate * np.maximum(d, 0.0)), 0.0)

    def cdf(self, x):  # type: (ArrayLike) -> np.ndarray
        x = np.asarray(x, dtype=float) - self.shift
        if self.jitter_rate is None:
            return np.where(x >= 0, 1.0, 0.0)
        return np.where(x > 0, -np.expm1(-self.jitter_rate * np.maximum(x, 0.0)), 0.0)

    def ccdf(self, x):  # type: (ArrayLike) -> np.ndarray
        x = np.asarray(x, dtype=float) - self.shift
        if self.jitter_rate is None:
            return np.where(x >= 0, 0.0, 1.0)
        return np.where(x > 0, np.exp(-self.jitter_rate * np.maximum(x, 0.0)), 1.0)

    def sample(self, count, rng):  # type: (int, np.random.Generator) -> np.ndarray
        if self.jitter_rate is None:
            return np.full(count, float(self.shift))
        return self.shift + rng.exponential(1.0 / self.jitter_rate, size=count)

    def parameters(self):  # type: () -> Dict[six.text_type, Any]
        return {'shift': self.shift, 'rate': self.jitter_rate}

    def breakpoints(self):  # type: () -> Tuple[float, ...]
        return (float(self.shift), )


@attr.s(frozen=True)
class TableDefined(FirstPassageDist):
    """
    A law given by CDF values at knots, linearly interpolated between knots. Beyond the last knot the CCDF follows a
    tail fitted through the last two knots: exponential (the default) or power-law, Ḡ(x) ∝ (1 + x)^{−α}.

    A power tail with α ≤ 1 has an infinite mean; such a table is rejected unless `allow_infinite_mean` is set, which
    only the guard-interval diagnostics have a use for.
    """

    kind = 'table-defined'

    x = attr.ib(converter=lambda v: tuple(float(i) for i in v))  # type: Tuple[float, ...]
    cdf_values = attr.ib(converter=lambda v: tuple(float(i) for i in v))  # type: Tuple[float, ...]
    tail = attr.ib(default=TAIL_EXPONENTIAL)  # type: six.text_type
    allow_infinite_mean = attr.ib(default=False)  # type: bool

    _tail_parameter = attr.ib(init=False, default=0.0, repr=False, eq=False)  # type: float
    _mean = attr.ib(init=False, default=0.0, repr=False, eq=False)  # type: float

    def __attrs_post_init__(self):  # type: () -> None
        xs, gs = self.x, self.cdf_values
        if len(xs) != len(gs) or len(xs) < 2:
            raise ParameterError('A table law needs at least two knots and one CDF value per knot')
        if not all(math.isfinite(v) for v in xs + gs):
            raise ParameterError('Table knots and CDF values must be finite')
        if xs[0] < 0:
            raise ParameterError('Table knots must start at or after the origin')
        if gs[0] != 0:
            raise SingularityError('CDF value {} at the first knot is a point mass'.format(gs[0]))
        for i in range(1, len(xs)):
            if xs[i] <= xs[i - 1]:
                if xs[i] == xs[i - 1] and gs[i] != gs[i - 1]:
                    raise SingularityError('CDF jumps at x={}: the law has a point mass there'.format(xs[i]))
                raise ParameterError('Table knots must be strictly increasing')
            if gs[i] < gs[i - 1]:
                raise ParameterError('Table CDF values must be nondecreasing')
        if gs[-1] > 1:
            raise ParameterError('Table CDF values cannot exceed 1')
        if self.tail not in (TAIL_EXPONENTIAL, TAIL_POWER):
            raise ParameterError('Unknown tail {!r}; use {!r} or {!r}'.format(self.tail, TAIL_EXPONENTIAL, TAIL_POWER))

        tail_parameter = 0.0
        survivor_last, survivor_before = 1.0 - gs[-1], 1.0 - gs[-2]
        if survivor_last > 0:
            if survivor_before <= survivor_last:
                raise ParameterError('Cannot fit a decaying tail: the CDF is flat over the last two knots')
            ratio = math.log(survivor_before / survivor_last)
            if self.tail == TAIL_EXPONENTIAL:
                tail_parameter = ratio / (xs[-1] - xs[-2])
            else:
                tail_parameter = ratio / math.log((1.0 + xs[-1]) / (1.0 + xs[-2]))
        object.__setattr__(self, '_tail_parameter', tail_parameter)

        survivors = 1.0 - np.asarray(gs)
        body = xs[0] + float(np.sum(0.5 * (survivors[1:] + survivors[:-1]) * np.diff(xs)))
        if survivor_last == 0:
            tail_mass = 0.0
        elif self.tail == TAIL_EXPONENTIAL:
            tail_mass = survivor_last / tail_parameter
        elif tail_parameter > 1:
            tail_mass = survivor_last * (1.0 + xs[-1]) / (tail_parameter - 1.0)
        else:
            tail_mass = float('inf')
        mean = body + tail_mass
        if not math.isfinite(mean) and not self.allow_infinite_mean:
            raise ParameterError(
                'The power tail (alpha={:.6g}) has an infinite mean; set allow_infinite_mean only for guard '
                'diagnostics'.format(tail_parameter),
            )
        if mean <= 0:
            raise ParameterError('The table law has a zero mean')
        object.__setattr__(self, '_mean', mean)

    @property
    def mean(self):  # type: () -> float
        return self._mean

    @property
    def tail_parameter(self):  # type: () -> float
        """β for an exponential tail, α for a power tail."""
        return self._tail_parameter

    def _tail_ccdf(self, x):  # type: (np.ndarray) -> np.ndarray
        survivor_last = 1.0 - self.cdf_values[-1]
        if survivor_last == 0:
            return np.zeros_like(x)
        if self.tail == TAIL_EXPONENTIAL:
            return survivor_last * np.exp(-self._tail_parameter * (x - self.x[-1]))
        return survivor_last * ((1.0 + x) / (1.0 + self.x[-1])) ** (-self._tail_parameter)

    def ccdf(self, x):  # type: (ArrayLike) -> np.ndarray
        x = np.asarray(x, dtype=float)
        inside = 1.0 - np.interp(x, self.x, self.cdf_values, left=0.0)
        beyond = self._tail_ccdf(np.maximum(x, self.x[-1]))
        return np.where(x > self.x[-1], beyond, inside)

    def cdf(self, x):  # type: (ArrayLike) -> np.ndarray
        return 1.0 - self.ccdf(x)

    def density(self, d):  # type: (ArrayLike) -> np.ndarray
        d = np.asarray(d, dtype=float)
        xs = np.asarray(self.x)
        slopes = np.diff(self.cdf_values) / np.diff(xs)
        index = np.clip(np.searchsorted(xs, d, side='right') - 1, 0, len(slopes) - 1)
        inside = np.where((d >= xs[0]) & (d <= xs[-1]), slopes[index], 0.0)
        clipped = np.maximum(d, xs[-1])
        if self.tail == TAIL_EXPONENTIAL:
            beyond = self._tail_parameter * self._tail_ccdf(clipped)
        else:
            beyond = self._tail_parameter * self._tail_ccdf(clipped) / (1.0 + clipped)
        return np.where(d > xs[-1], beyond, inside)

    def sample(self, count, rng):  # type: (int, np.random.Generator) -> np.ndarray
        u = rng.random(count)
        inside = np.interp(u, self.cdf_values, self.x)
        survivor_last = 1.0 - self.cdf_values[-1]
        if survivor_last == 0:
            return inside
        # Inverse of the fitted tail; u > G_n guarantees 1 - u < survivor_last
        tail_u = np.maximum(1.0 - u, np.finfo(float).tiny)
        if self.tail == TAIL_EXPONENTIAL:
            beyond = self.x[-1] + np.log(survivor_last / tail_u) / self._tail_parameter
        else:
            beyond = (1.0 + self.x[-1]) * (survivor_last / tail_u) ** (1.0 / self._tail_parameter) - 1.0
        return np.where(u > self.cdf_values[-1], beyond, inside)

    def parameters(self):  # type: () -> Dict[six.text_type, Any]
        return {
            'x': list(self.x),
            'cdf': list(self.cdf_values),
            'tail': self.tail,
            'allow_infinite_mean': self.allow_infinite_mean,
        }

    def describe(self):  # type: () -> six.text_type
        return '{}:x={},cdf={},tail={}'.format(
            self.kind,
            '|'.join('%.12g' % v for v in self.x),
            '|'.join('%.12g' % v for v in self.cdf_values),
            self.tail,
        )

    def breakpoints(self):  # type: () -> Tuple[float, ...]
        return self.x


KINDS = {
    Exponential.kind: Exponential,
    Gamma.kind: Gamma,
    DeterministicShift.kind: DeterministicShift,
    TableDefined.kind: TableDefined,
}  # type: Dict[six.text_type, Type[FirstPassageDist]]

_PARAMETER_NAMES = {
    Exponential.kind: {'rate': 'rate'},
    Gamma.kind: {'shape': 'shape', 'rate': 'rate'},
    DeterministicShift.kind: {'shift': 'shift', 'rate': 'jitter_rate'},
    TableDefined.kind: {'x': 'x', 'cdf': 'cdf_values', 'tail': 'tail', 'allow_infinite_mean': 'allow_infinite_mean'},
}  # type: Dict[six.text_type, Dict[six.text_type, six.text_type]]


def make_first_passage(kind, params=None):
    # type: (six.text_type, Optional[Dict[six.text_type, Any]]) -> FirstPassageDist
    """
    Builds a first-passage law from its kind and named parameters.

    :param kind: One of `exponential`, `gamma`, `deterministic-shift` or `table-defined`
    :param params: `rate` for exponential; `shape` and `rate` for gamma; `shift` and optional `rate` for the shift;
                   `x`, `cdf`, optional `tail` and `allow_infinite_mean` for table laws

    :return: The law
    """
    if kind not in KINDS:
        raise ParameterError('Unknown first-passage kind {!r}; expected one of {}'.format(
            kind,
            ', '.join(sorted(KINDS)),
        ))
    names = _PARAMETER_NAMES[kind]
    kwargs = {}
    for name, value in (params or {}).items():
        if name not in names:
            raise ParameterError('Unknown parameter {!r} for {} first passage'.format(name, kind))
        if value is not None:
            kwargs[names[name]] = value
    try:
        return KINDS[kind](**kwargs)
    except TypeError as e:
        raise ParameterError('Invalid parameters for {} first passage: {}'.format(kind, e))


def sample_first_passage(dist, count, rng):  # type: (FirstPassageDist, int, np.random.Generator) -> np.ndarray
    """
    Draws `count` i.i.d. transit durations from `dist` using the caller's stream.
    """
    if count < 0:
        raise ParameterError('count must be nonnegative, got {}'.format(count))
    if count == 0:
        return np.empty(0, dtype=float)
    return np.asarray(dist.sample(count, rng), dtype=float)


def numerical_mean(dist):  # type: (FirstPassageDist) -> float
    """
    E[D] = ∫₀^∞ Ḡ(x) dx by adaptive quadrature, split at the law's breakpoints.
    """
    def survivor(v):  # type: (float) -> float
        return float(dist.ccdf(v))

    points = sorted(p for p in dist.breakpoints() if p > 0)
    if not points:
        value, _ = integrate.quad(survivor, 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=200)
        return value
    edges = [0.0] + points
    total = math.fsum(
        integrate.quad(survivor, a, b, epsabs=0.0, epsrel=1e-11, limit=200)[0] for a, b in zip(edges[:-1], edges[1:])
    )
    tail, _ = integrate.quad(survivor, edges[-1], np.inf, epsabs=1e-14, epsrel=1e-11, limit=200)
    return total + tail


@attr.s(frozen=True)
class OptimalInputDensity(object):
    """
    The launch-time law that maximises h(T + D) for exponential D under the deadline T ∈ [0, τ]: an atom at 0 of mass
    1/(e + μτ), an atom at τ of mass (e − 1)/(e + μτ), and a uniform part of total mass μτ/(e + μτ) on (0, τ).

    The atom at τ is (e − 1)/(e + μτ), the unique nonnegative weight that normalises the mixture; the sign-reversed
    (1 − e) form would be a negative mass.
    """

    deadline = attr.ib()  # type: float
    rate = attr.ib(default=1.0, validator=_positive('rate'))  # type: float

    @deadline.validator
    def _check_deadline(self, _attribute, value):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
            raise ParameterError('The deadline must be a finite nonnegative time, got {!r}'.format(value))

    @property
    def _normaliser(self):  # type: () -> float
        return math.e + self.rate * self.deadline

    @property
    def mass_at_zero(self):  # type: () -> float
        return 1.0 / self._normaliser

    @property
    def mass_at_deadline(self):  # type: () -> float
        return (math.e - 1.0) / self._normaliser

    @property
    def uniform_mass(self):  # type: () -> float
        return self.rate * self.deadline / self._normaliser

    @property
    def masses(self):  # type: () -> Tuple[float, float, float]
        return self.mass_at_zero, self.mass_at_deadline, self.uniform_mass

    def sample(self, count, rng):  # type: (int, np.random.Generator) -> np.ndarray
        if count < 0:
            raise ParameterError('count must be nonnegative, got {}'.format(count))
        u = rng.random(count)
        position = rng.random(count) * self.deadline
        zero, at_deadline = self.mass_at_zero, self.mass_at_deadline
        return np.where(u < zero, 0.0, np.where(u < zero + at_deadline, float(self.deadline), position))


def sample_optimal_input(deadline, rate, count, rng):
    # type: (float, float, int, np.random.Generator) -> np.ndarray
    """
    Draws `count` i.i.d. launch times from the capacity-achieving input law on [0, deadline].
    """
    if deadline < 0:
        raise ParameterError('The deadline must be nonnegative, got {}'.format(deadline))
    return OptimalInputDensity(deadline, rate).sample(count, rng)
