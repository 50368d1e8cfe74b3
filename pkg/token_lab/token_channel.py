"""
One channel use of the identical-token timing channel: M tokens are launched inside the window [0, τ], each is
delayed by an i.i.d. first-passage time, and the receiver sees only the sorted arrival times. Successive uses are
separated by a guard interval so that, with high probability, every token of one use arrives before the next begins.
"""
from __future__ import (
    absolute_import,
    unicode_literals,
)

import csv
import io
import logging
import math
from typing import (
    Any,
    Dict,
    List,
    Optional,
    Sequence,
    Tuple,
)

import attr
import numpy as np
import six

from token_lab.errors import (
    NumericConsistencyError,
    ParameterError,
)
from token_lab.first_passage import (
    FirstPassageDist,
    OptimalInputDensity,
    sample_first_passage,
)
from token_lab.recorder import RunRecorder
from token_lab.streams import (
    map_ordered,
    spawn_streams,
)
from token_lab.tables import ResultTable


__all__ = (
    'ArrivalRecord',
    'CONVERGENT',
    'ChannelUseSummary',
    'GuardDiagnostic',
    'GuardPlan',
    'LaunchSchedule',
    'MAX_TIE_RESAMPLES',
    'NON_CONVERGENT',
    'TOKEN_COLUMNS',
    'UNDETERMINED',
    'guard_diagnostic',
    'overrun_bound',
    'plan_guard',
    'read_token_column',
    'record_table',
    'simulate_channel_use',
    'simulate_channel_uses',
)


_logger = logging.getLogger(__name__)

MAX_TIE_RESAMPLES = 1000

TOKEN_COLUMNS = ('index', 'launch_time', 'arrival_time', 'sorted_rank')

CONVERGENT = 'CONVERGENT'
NON_CONVERGENT = 'NON-CONVERGENT'
UNDETERMINED = 'UNDETERMINED'

_INTENSITY_TOLERANCE = 1e-9


def _to_times(values):  # type: (Sequence[float]) -> Tuple[float, ...]
    return tuple(float(v) for v in values)


@attr.s(frozen=True)
class LaunchSchedule(object):
    """
    The launch times t₁…t_M of one channel use, the emission deadline τ and the launch intensity λ, with λτ = M.

    When τ = 0 every token is launched at the origin and the intensity is not constrained by the deadline; it is
    carried as given (infinite by default).
    """

    times = attr.ib(converter=_to_times)  # type: Tuple[float, ...]
    deadline = attr.ib()  # type: float
    intensity = attr.ib()  # type: float

    def __attrs_post_init__(self):  # type: () -> None
        if not self.times:
            raise ParameterError('A launch schedule needs at least one token')
        if not (math.isfinite(self.deadline) and self.deadline >= 0):
            raise ParameterError('The deadline must be a finite nonnegative time, got {!r}'.format(self.deadline))
        if not all(math.isfinite(t) and 0 <= t <= self.deadline for t in self.times):
            raise ParameterError('Every launch time must lie in [0, {}]'.format(self.deadline))
        if not self.intensity > 0:
            raise ParameterError('The launch intensity must be positive, got {!r}'.format(self.intensity))
        if self.deadline > 0:
            if abs(self.intensity * self.deadline - self.token_count) > _INTENSITY_TOLERANCE * self.token_count:
                raise ParameterError(
                    'Intensity {} and deadline {} do not launch {} tokens (λτ must equal M)'.format(
                        self.intensity,
                        self.deadline,
                        self.token_count,
                    ),
                )

    @property
    def token_count(self):  # type: () -> int
        return len(self.times)

    @property
    def sorted_times(self):  # type: () -> np.ndarray
        return np.sort(np.asarray(self.times, dtype=float))

    @classmethod
    def from_times(cls, times, deadline=None):  # type: (Sequence[float], Optional[float]) -> LaunchSchedule
        """
        Builds a schedule whose intensity is implied by the deadline, which defaults to the latest launch.
        """
        times = _to_times(times)
        if not times:
            raise ParameterError('A launch schedule needs at least one token')
        if deadline is None:
            deadline = max(times)
        intensity = len(times) / deadline if deadline > 0 else float('inf')
        return cls(times, deadline, intensity)

    @classmethod
    def optimal(cls, token_count, load, rng, rate=1.0):
        # type: (int, float, np.random.Generator, float) -> LaunchSchedule
        """
        Draws i.i.d. launch times from the capacity-achieving input law with τ = M/(ρμ).

        :param token_count: M
        :param load: ρ = λ/μ
        :param rng: The caller's random stream
        :param rate: μ
        """
        if token_count < 1:
            raise ParameterError('token_count must be at least 1, got {}'.format(token_count))
        if not load > 0:
            raise ParameterError('The load must be positive, got {}'.format(load))
        deadline = token_count / (load * rate)
        times = OptimalInputDensity(deadline, rate).sample(token_count, rng)
        return cls(times, deadline, load * rate)


@attr.s(frozen=True)
class ArrivalRecord(object):
    """
    What one channel use produced. `permutation[k]` is the (zero-based) launch index of the k-th earliest arrival,
    so `arrivals[permutation] == sorted_arrivals`. `occupancies[m - 1]` is η_m, the number of arrivals before the
    (m + 1)-th earliest launch, with η_M = M.
    """

    launch_times = attr.ib(converter=_to_times)  # type: Tuple[float, ...]
    arrivals = attr.ib(converter=_to_times)  # type: Tuple[float, ...]
    sorted_arrivals = attr.ib(converter=_to_times)  # type: Tuple[float, ...]
    permutation = attr.ib(converter=tuple)  # type: Tuple[int, ...]
    occupancies = attr.ib(converter=tuple)  # type: Tuple[int, ...]
    tie_resamples = attr.ib(default=0, eq=False)  # type: int

    @property
    def token_count(self):  # type: () -> int
        return len(self.arrivals)

    @property
    def sorted_ranks(self):  # type: () -> Tuple[int, ...]
        """One-based position of each token's arrival in the sorted order."""
        ranks = [0] * self.token_count
        for position, launch_index in enumerate(self.permutation):
            ranks[launch_index] = position + 1
        return tuple(ranks)

    @property
    def last_arrival(self):  # type: () -> float
        return self.sorted_arrivals[-1]

    def to_rows(self):  # type: () -> List[Tuple[int, float, float, int]]
        return [
            (index + 1, launch, arrival, rank)
            for index, (launch, arrival, rank) in enumerate(zip(self.launch_times, self.arrivals, self.sorted_ranks))
        ]


@attr.s(frozen=True)
class GuardPlan(object):
    """
    Timing of sequential channel uses: M tokens in the window τ = M/λ, then γ = εM/λ of dead time.
    """

    token_count = attr.ib()  # type: int
    failure_probability = attr.ib()  # type: float
    guard = attr.ib()  # type: float
    window = attr.ib()  # type: float

    @guard.validator
    def _check_guard(self, _attribute, value):
        if not value > 0:
            raise ParameterError('The guard interval must be positive, got {!r}'.format(value))

    @property
    def period(self):  # type: () -> float
        return self.window + self.guard

    @property
    def effective_rate(self):  # type: () -> float
        """M/(τ + γ), which equals λ/(1 + ε) for every M."""
        return self.token_count / self.period


@attr.s
class ChannelUseSummary(object):
    records = attr.ib()  # type: List[ArrivalRecord]
    tie_resamples = attr.ib(default=0)  # type: int
    overruns = attr.ib(default=0)  # type: int

    @property
    def uses(self):  # type: () -> int
        return len(self.records)

    @property
    def overrun_frequency(self):  # type: () -> float
        return self.overruns / self.uses if self.records else 0.0


@attr.s
class GuardDiagnostic(object):
    """
    M·Ḡ(γ(M, ε)) over a grid of token counts. The verdict is `CONVERGENT` when every value over the second half of
    the grid is strictly below its predecessor or exactly zero. A grid of a single token count gives `UNDETERMINED`.
    """

    token_counts = attr.ib()  # type: List[int]
    guards = attr.ib()  # type: List[float]
    values = attr.ib()  # type: List[float]
    verdict = attr.ib()  # type: six.text_type

    @property
    def converges(self):  # type: () -> bool
        return self.verdict == CONVERGENT


def _validate_token_count(token_count):  # type: (int) -> None
    if isinstance(token_count, bool) or not isinstance(token_count, six.integer_types) or token_count < 1:
        raise ParameterError('The token count must be an integer of at least 1, got {!r}'.format(token_count))


def _validate_probability(epsilon):  # type: (float) -> None
    if not 0 < epsilon < 1:
        raise ParameterError('ε must lie strictly between 0 and 1, got {!r}'.format(epsilon))


def simulate_channel_use(schedule, dist, rng, recorder=None):
    # type: (LaunchSchedule, FirstPassageDist, np.random.Generator, Optional[RunRecorder]) -> ArrivalRecord
    """
    Launches the schedule's tokens, adds i.i.d. first-passage times and sorts the arrivals.

    Tied arrivals have probability zero for continuous laws; when rounding produces one anyway the whole use is drawn
    again (and counted on `channel.tie_resamples`), up to `MAX_TIE_RESAMPLES` times.

    :param schedule: The launch schedule
    :param dist: The first-passage law, which must have a finite mean
    :param rng: The stream this use draws from; the record depends only on the schedule, the law and this stream
    :param recorder: Optional run recorder for the tie counter

    :return: The arrival record
    """
    if not dist.has_finite_mean:
        raise ParameterError('Channel uses can only be simulated with a finite-mean first-passage law')

    launches = np.asarray(schedule.times, dtype=float)
    token_count = launches.size
    resamples = 0
    while True:
        arrivals = launches + sample_first_passage(dist, token_count, rng)
        order = np.argsort(arrivals, kind='stable')
        sorted_arrivals = arrivals[order]
        if token_count < 2 or np.all(np.diff(sorted_arrivals) > 0):
            break
        resamples += 1
        if recorder is not None:
            recorder.counter('channel.tie_resamples').increment()
        if resamples >= MAX_TIE_RESAMPLES:
            raise NumericConsistencyError(
                'Arrivals still tied after {} resamples; is the first-passage law degenerate?'.format(resamples),
            )
        _logger.debug('Tied arrivals in a channel use of %d tokens, drawing again', token_count)

    # η_m counts arrivals strictly before the (m + 1)-th earliest launch; the last boundary is +∞
    occupancies = np.append(np.searchsorted(sorted_arrivals, schedule.sorted_times[1:], side='left'), token_count)

    return ArrivalRecord(
        launch_times=schedule.times,
        arrivals=arrivals.tolist(),
        sorted_arrivals=sorted_arrivals.tolist(),
        permutation=order.tolist(),
        occupancies=occupancies.tolist(),
        tie_resamples=resamples,
    )


def simulate_channel_uses(
    schedule,  # type: LaunchSchedule
    dist,  # type: FirstPassageDist
    uses,  # type: int
    seed,  # type: int
    guard=None,  # type: Optional[GuardPlan]
    workers=1,  # type: int
    recorder=None,  # type: Optional[RunRecorder]
):
    # type: (...) -> ChannelUseSummary
    """
    Runs `uses` independent channel uses of the same schedule, each on its own substream of `seed`, and collects the
    records in use order. With a guard plan, a use whose last token arrives after τ + γ counts as an overrun; overruns
    are reported but the next use is not disturbed.
    """
    if uses < 0:
        raise ParameterError('The number of uses must be nonnegative, got {}'.format(uses))
    streams = spawn_streams(seed, uses)

    def run(rng):  # type: (np.random.Generator) -> ArrivalRecord
        return simulate_channel_use(schedule, dist, rng, recorder)

    records = map_ordered(run, streams, workers)
    summary = ChannelUseSummary(records=records, tie_resamples=sum(r.tie_resamples for r in records))
    if guard is not None:
        summary.overruns = sum(1 for r in records if r.last_arrival > guard.period)
        if recorder is not None and summary.overruns:
            recorder.counter('channel.guard_overruns').increment(summary.overruns)
    return summary


def plan_guard(token_count, epsilon, intensity):  # type: (int, float, float) -> GuardPlan
    """
    Plans sequential uses at launch intensity λ: the window is τ = M/λ and the guard interval γ = εM/λ, both in time
    units, so the effective rate M/(τ + γ) is λ/(1 + ε).
    """
    _validate_token_count(token_count)
    _validate_probability(epsilon)
    if not intensity > 0:
        raise ParameterError('The intensity must be positive, got {!r}'.format(intensity))
    return GuardPlan(
        token_count=token_count,
        failure_probability=epsilon,
        guard=epsilon * token_count / intensity,
        window=token_count / intensity,
    )


def overrun_bound(token_count, guard, dist):  # type: (int, float, FirstPassageDist) -> float
    """
    G^M(γ): a lower bound on the probability that every token of a use arrives before the next use begins.
    """
    _validate_token_count(token_count)
    if not guard >= 0:
        raise ParameterError('The guard interval must be nonnegative, got {!r}'.format(guard))
    survivor = float(dist.ccdf(guard))
    if survivor >= 1.0:
        return 0.0
    return math.exp(token_count * math.log1p(-survivor))


def guard_diagnostic(dist, intensity, epsilon, token_counts):
    # type: (FirstPassageDist, float, float, Sequence[int]) -> GuardDiagnostic
    """
    Tabulates M·Ḡ(γ(M, ε)) over the grid. For finite-mean laws the column decays to zero, which is what makes
    sequential uses asymptotically independent; an infinite-mean table law leaves it bounded away from zero.
    """
    _validate_probability(epsilon)
    if not intensity > 0:
        raise ParameterError('The intensity must be positive, got {!r}'.format(intensity))
    grid = sorted(set(token_counts))
    if not grid:
        raise ParameterError('The token-count grid is empty')
    guards = []  # type: List[float]
    values = []  # type: List[float]
    for token_count in grid:
        plan = plan_guard(token_count, epsilon, intensity)
        guards.append(plan.guard)
        values.append(token_count * float(dist.ccdf(plan.guard)))

    if len(values) < 2:
        return GuardDiagnostic(grid, guards, values, UNDETERMINED)
    tail = values[min(len(values) // 2, max(len(values) - 2, 0)):]
    decreasing = all(b == 0 or b < a for a, b in zip(tail[:-1], tail[1:]))
    return GuardDiagnostic(grid, guards, values, CONVERGENT if decreasing else NON_CONVERGENT)


def record_table(record, seed, parameters=None):
    # type: (ArrivalRecord, int, Optional[Dict[six.text_type, Any]]) -> ResultTable
    """
    The per-token CSV view of one channel use.
    """
    table = ResultTable(command='simulate', columns=TOKEN_COLUMNS, seed=seed, parameters=dict(parameters or {}))
    for row in record.to_rows():
        table.add_row(*row)
    return table


def read_token_column(path, column):  # type: (six.text_type, six.text_type) -> List[float]
    """
    Reads one column of a per-token CSV file (`# meta:` and other comment lines are skipped). A file with a single
    unnamed column is also accepted.
    """
    with io.open(path, 'r', encoding='utf-8', newline='') as f:
        rows = [row for row in csv.reader(line for line in f if not line.startswith('#')) if row]
    if not rows:
        raise ParameterError('{} holds no rows'.format(path))
    header = [cell.strip() for cell in rows[0]]
    if column in header:
        index = header.index(column)
        body = rows[1:]
    elif len(header) == 1:
        index = 0
        try:
            float(header[0])
            body = rows
        except ValueError:
            body = rows[1:]
    else:
        raise ParameterError('{} has no {!r} column'.format(path, column))
    try:
        return [float(row[index]) for row in body]
    except (IndexError, ValueError):
        raise ParameterError('{} has a malformed {!r} column'.format(path, column))
