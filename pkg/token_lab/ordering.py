"""
Ordering entropy H(Ω|S⃗,T): how much is left unknown about which launch produced which arrival once the receiver has
sorted its arrivals.

Four evaluations are provided, from exact to asymptotic: brute-force enumeration over permutations (M ≤ 8), the
admissible-permutation count |Ω| and the computable bound H↑ (M ≤ 512), a Monte Carlo estimate of log|Ω|/M under the
capacity-achieving launch law (any M) next to its exact finite-M expectation, and the limiting per-token series in
the channel load ρ.
"""
from __future__ import (
    absolute_import,
    unicode_literals,
)

import itertools
import logging
import math
from typing import (
    Callable,
    List,
    Optional,
    Sequence,
    Tuple,
)

import attr
import numpy as np
from scipy import (
    special,
    stats,
)

from token_lab.errors import (
    InconsistencyError,
    NumericConsistencyError,
    ParameterError,
    SizeError,
)
from token_lab.first_passage import (
    Exponential,
    FirstPassageDist,
    OptimalInputDensity,
)
from token_lab.streams import (
    DEFAULT_SEED,
    map_ordered,
    spawn_streams,
)
from token_lab.token_channel import (
    LaunchSchedule,
    simulate_channel_use,
)


__all__ = (
    'AdmissibleCount',
    'BRUTE_FORCE_ADMISSIBLE_CAP',
    'BRUTE_FORCE_HT_CAP',
    'EXACT_COUNT_CAP',
    'EXACT_ENTROPY_CAP',
    'OrderingEstimate',
    'PoissonBinomialPMF',
    'UPPER_BOUND_CAP',
    'asymptotic_ordering_entropy_per_token',
    'brute_force_Ht',
    'brute_force_admissible',
    'count_admissible',
    'exact_conditional_entropy',
    'expected_ordering_entropy_per_token',
    'limiting_series_direct',
    'mc_ordering_entropy_per_token',
    'upper_bound_Ht',
)


_logger = logging.getLogger(__name__)

EXACT_COUNT_CAP = 20
BRUTE_FORCE_ADMISSIBLE_CAP = 8
EXACT_ENTROPY_CAP = 8
UPPER_BOUND_CAP = 512
BRUTE_FORCE_HT_CAP = 10

DEFAULT_SERIES_TOLERANCE = 1e-12

_FLUSH_BELOW = 1e-300


@attr.s(frozen=True)
class AdmissibleCount(object):
    """
    The number of causal assignments of arrivals to launches. `count` is the exact integer for M ≤ 20 and `None`
    above; `log_count` (nats) is always available.
    """

    log_count = attr.ib()  # type: float
    count = attr.ib(default=None)  # type: Optional[int]
    token_count = attr.ib(default=0)  # type: int

    @property
    def per_token(self):  # type: () -> float
        return self.log_count / self.token_count if self.token_count else 0.0


@attr.s(frozen=True)
class PoissonBinomialPMF(object):
    """
    The law of a sum of independent Bernoulli variables with differing success probabilities.
    """

    probabilities = attr.ib(converter=lambda v: np.asarray(v, dtype=float), eq=False)  # type: np.ndarray

    @probabilities.validator
    def _check(self, _attribute, value):
        if np.any(value < 0) or abs(math.fsum(value) - 1.0) > 1e-12:
            raise NumericConsistencyError('Not a probability mass function: total {!r}'.format(math.fsum(value)))

    @classmethod
    def from_success_probabilities(cls, successes):  # type: (Sequence[float]) -> PoissonBinomialPMF
        """
        Builds the PMF by adding one Bernoulli at a time to the running convolution.
        """
        pmf = np.ones(1)
        for p in np.asarray(successes, dtype=float):
            if not 0 <= p <= 1:
                raise ParameterError('Success probabilities must lie in [0, 1], got {!r}'.format(p))
            nxt = np.zeros(pmf.size + 1)
            nxt[:-1] = pmf * (1.0 - p)
            nxt[1:] += pmf * p
            nxt[nxt < _FLUSH_BELOW] = 0.0
            pmf = nxt
        return cls(pmf)

    def expect(self, function):  # type: (Callable[[np.ndarray], np.ndarray]) -> float
        """E[f(X)], summed with compensation."""
        outcomes = np.arange(self.probabilities.size)
        return math.fsum(self.probabilities * function(outcomes))

    @property
    def mean(self):  # type: () -> float
        return self.expect(lambda k: k)


@attr.s(frozen=True)
class OrderingEstimate(object):
    estimate = attr.ib()  # type: float
    stderr = attr.ib()  # type: float
    trials = attr.ib()  # type: int
    token_count = attr.ib()  # type: int
    load = attr.ib()  # type: float


def _as_sorted(values):  # type: (Sequence[float]) -> np.ndarray
    array = np.sort(np.asarray(values, dtype=float))
    if array.ndim != 1 or not np.all(np.isfinite(array)):
        raise ParameterError('Times must be a flat sequence of finite numbers')
    return array


def _check_pair(schedule, arrivals):  # type: (Sequence[float], Sequence[float]) -> Tuple[np.ndarray, np.ndarray]
    launches, arrived = _as_sorted(schedule), _as_sorted(arrivals)
    if launches.size == 0:
        raise ParameterError('At least one token is required')
    if launches.size != arrived.size:
        raise ParameterError('{} launches but {} arrivals'.format(launches.size, arrived.size))
    return launches, arrived


def _check_cap(token_count, cap, operation, instead):  # type: (int, int, str, str) -> None
    if token_count > cap:
        raise SizeError('{} is limited to M <= {} (got M = {}); use {} instead'.format(
            operation,
            cap,
            token_count,
            instead,
        ))


def count_admissible(schedule, arrivals):  # type: (Sequence[float], Sequence[float]) -> AdmissibleCount
    """
    |Ω| = ∏_{m=1}^{M−1} (m + 1 − η_m), where η_m is the number of arrivals earlier than the (m + 1)-th earliest
    launch. Neither argument needs to be sorted; the count only depends on the two multisets.

    :raises InconsistencyError: if no causal assignment exists
    """
    launches, arrived = _check_pair(schedule, arrivals)
    token_count = launches.size
    if arrived[0] < launches[0]:
        raise InconsistencyError('An arrival at {} precedes every launch'.format(arrived[0]))

    occupancies = np.searchsorted(arrived, launches[1:], side='left')
    factors = np.arange(2, token_count + 1) - occupancies
    if np.any(factors < 1):
        m = int(np.argmax(factors < 1)) + 1
        raise InconsistencyError('{} arrivals precede launch {} of {}: no causal assignment exists'.format(
            occupancies[m - 1],
            m + 1,
            token_count,
        ))

    log_count = math.fsum(np.log(factors)) if factors.size else 0.0
    count = None
    if token_count <= EXACT_COUNT_CAP:
        count = 1
        for factor in factors.tolist():
            count *= factor
    return AdmissibleCount(log_count=log_count, count=count, token_count=token_count)


def _permutations(token_count):  # type: (int) -> np.ndarray
    return np.array(list(itertools.permutations(range(token_count))), dtype=int).reshape(-1, token_count)


def brute_force_admissible(schedule, arrivals):  # type: (Sequence[float], Sequence[float]) -> AdmissibleCount
    """
    Counts, by enumeration, the permutations that put every arrival at or after the launch it is paired with.
    """
    launches, arrived = _check_pair(schedule, arrivals)
    _check_cap(launches.size, BRUTE_FORCE_ADMISSIBLE_CAP, 'brute_force_admissible', 'count_admissible')
    permuted = arrived[_permutations(launches.size)]
    count = int(np.count_nonzero(np.all(permuted >= launches, axis=1)))
    return AdmissibleCount(
        log_count=math.log(count) if count else float('-inf'),
        count=count,
        token_count=launches.size,
    )


def exact_conditional_entropy(schedule, arrivals, dist):
    # type: (Sequence[float], Sequence[float], FirstPassageDist) -> float
    """
    H(Ω|s⃗,t) = −Σ p_n log p_n over the causal permutations, with p_n proportional to the product of first-passage
    densities of the transit times that permutation implies. Products are formed as sums of log densities and
    normalised with log-sum-exp.

    For exponential transport every causal permutation has the same weight and the result equals log|Ω|.

    :raises InconsistencyError: if no permutation has positive weight
    """
    launches, arrived = _check_pair(schedule, arrivals)
    _check_cap(launches.size, EXACT_ENTROPY_CAP, 'exact_conditional_entropy', 'upper_bound_Ht')

    transits = arrived[_permutations(launches.size)] - launches
    transits = transits[np.all(transits >= 0, axis=1)]
    if transits.shape[0] == 0:
        raise InconsistencyError('No causal assignment of arrivals to launches exists')

    with np.errstate(divide='ignore'):
        log_weights = np.sum(dist.log_density(transits), axis=1)
    log_weights = log_weights[np.isfinite(log_weights)]
    if log_weights.size == 0:
        raise InconsistencyError('Every causal assignment has zero probability under {}'.format(dist.describe()))
    if log_weights.size == 1:
        return 0.0

    log_probabilities = log_weights - special.logsumexp(log_weights)
    entropy = -math.fsum(np.exp(log_probabilities) * log_probabilities)
    return max(entropy, 0.0)


def _ht_successes(launches, m, dist):  # type: (np.ndarray, int, FirstPassageDist) -> np.ndarray
    # Ḡ(t⃗_{m+1} − t⃗_j), j = 1…m: the chance token j is still in transit at the next launch
    return np.asarray(dist.ccdf(launches[m] - launches[:m]), dtype=float)


def upper_bound_Ht(schedule, dist):  # type: (Sequence[float], FirstPassageDist) -> float
    """
    H↑(t) = Σ_{m=1}^{M−1} E[log(1 + η̄_m)], with η̄_m Poisson-binomial over the tokens launched before the (m + 1)-th
    launch. An upper bound on H(Ω|S⃗,t) for every first-passage law, with equality for exponential transport.
    """
    launches = _as_sorted(schedule)
    _check_cap(launches.size, UPPER_BOUND_CAP, 'upper_bound_Ht', 'mc_ordering_entropy_per_token')
    return math.fsum(
        PoissonBinomialPMF.from_success_probabilities(_ht_successes(launches, m, dist)).expect(np.log1p)
        for m in range(1, launches.size)
    )


def brute_force_Ht(schedule, dist):  # type: (Sequence[float], FirstPassageDist) -> float
    """
    H↑(t) as the literal sum over every occupancy vector x̄ ∈ {0, 1}^m, for checking `upper_bound_Ht`.
    """
    launches = _as_sorted(schedule)
    _check_cap(launches.size, BRUTE_FORCE_HT_CAP, 'brute_force_Ht', 'upper_bound_Ht')
    total = []  # type: List[float]
    for m in range(1, launches.size):
        successes = _ht_successes(launches, m, dist)
        vectors = (np.arange(2 ** m)[:, None] >> np.arange(m)) & 1
        probabilities = np.prod(np.where(vectors == 1, successes, 1.0 - successes), axis=1)
        total.extend((probabilities * np.log1p(vectors.sum(axis=1))).tolist())
    return math.fsum(total)


def _one_trial(token_count, load):  # type: (int, float) -> Callable[[np.random.Generator], float]
    transport = Exponential(1.0)

    def trial(rng):  # type: (np.random.Generator) -> float
        schedule = LaunchSchedule.optimal(token_count, load, rng)
        record = simulate_channel_use(schedule, transport, rng)
        return count_admissible(schedule.times, record.arrivals).per_token

    return trial


def mc_ordering_entropy_per_token(token_count, load, trials, seed=DEFAULT_SEED, workers=1):
    # type: (int, float, int, int, int) -> OrderingEstimate
    """
    Estimates H(Ω|S⃗,T)/M for exponential transport at load ρ by averaging log|Ω|/M over independent channel uses,
    with launches drawn i.i.d. from the capacity-achieving law on [0, M/ρ] (time in units of 1/μ). Each trial runs
    on its own substream of `seed`, so the estimate does not depend on `workers`.

    :return: The mean and its standard error
    """
    if token_count < 1:
        raise ParameterError('token_count must be at least 1, got {}'.format(token_count))
    if not load > 0:
        raise ParameterError('The load must be positive, got {}'.format(load))
    if trials < 1:
        raise ParameterError('trials must be at least 1, got {}'.format(trials))

    if token_count == 1:
        return OrderingEstimate(0.0, 0.0, trials, token_count, load)

    values = np.asarray(map_ordered(_one_trial(token_count, load), spawn_streams(seed, trials), workers))
    estimate = math.fsum(values) / trials
    stderr = float(np.std(values, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    _logger.debug('M=%d rho=%g: %.6g +/- %.2g over %d trials', token_count, load, estimate, stderr, trials)
    return OrderingEstimate(estimate, stderr, trials, token_count, load)


def expected_ordering_entropy_per_token(token_count, load):  # type: (int, float) -> float
    """
    The finite-M value that `mc_ordering_entropy_per_token` estimates, E[log|Ω|]/M for exponential transport under the
    capacity-achieving launch law with τ = M/ρ, computed without sampling.

    Each factor of |Ω| is one plus the number of earlier-launched tokens still in transit at a launch. At any launch
    time in (0, τ] another token is launched earlier and still in transit with probability 1/(e + τ), so:

    - tokens at the atom at 0 contribute log K₀! for K₀ ~ Bin(M, 1/(e + τ));
    - each uniformly placed token contributes E[log(1 + X)] for X ~ Bin(M − 1, 1/(e + τ));
    - the K₁ tokens at the atom at τ contribute Σ_{i=1}^{K₁} log(X + i), with X counting the other M − K₁ tokens.
    """
    if token_count < 1:
        raise ParameterError('token_count must be at least 1, got {}'.format(token_count))
    if not (math.isfinite(load) and load > 0):
        raise ParameterError('The load must be finite and positive, got {!r}'.format(load))
    if token_count == 1:
        return 0.0

    law = OptimalInputDensity(token_count / load)
    in_transit = 1.0 / (math.e + law.deadline)
    outcomes = np.arange(token_count + 1, dtype=float)

    at_zero = math.fsum(stats.binom.pmf(outcomes, token_count, law.mass_at_zero) * special.gammaln(outcomes + 1.0))
    uniform = token_count * law.uniform_mass * math.fsum(
        stats.binom.pmf(outcomes[:-1], token_count - 1, in_transit) * np.log1p(outcomes[:-1])
    )

    mean_at_deadline = token_count * law.mass_at_deadline
    last = min(token_count, int(math.ceil(mean_at_deadline + 12.0 * math.sqrt(mean_at_deadline) + 30.0)))
    counts = np.arange(1, last + 1)
    others = stats.binom.pmf(
        outcomes[None, :],
        (token_count - counts)[:, None],
        in_transit / (1.0 - law.mass_at_deadline),
    )
    stacked = special.gammaln(outcomes[None, :] + counts[:, None] + 1.0) - special.gammaln(outcomes[None, :] + 1.0)
    at_deadline = math.fsum(
        stats.binom.pmf(counts, token_count, law.mass_at_deadline) * np.sum(others * stacked, axis=1)
    )

    return (at_zero + uniform + at_deadline) / token_count


def _poisson_series(load, tolerance, term):
    # type: (float, float, Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float
    """
    Σ_{ℓ≥2} term(ℓ, p_ℓ) for p_ℓ the Poisson(ρ) PMF. Summation stops once a term falls below `tolerance` times the
    running total and ℓ ≥ ρ + 10√ρ + 20.
    """
    if not (math.isfinite(load) and load > 0):
        raise ParameterError('The load ρ must be finite and positive, got {!r}'.format(load))
    floor = int(math.ceil(load + 10.0 * math.sqrt(load) + 20.0))
    ceiling = floor + int(math.ceil(50.0 * math.sqrt(load))) + 1000
    block = np.arange(2, floor + 1, dtype=float)
    terms = []  # type: List[float]
    while True:
        probabilities = np.exp(block * math.log(load) - load - special.gammaln(block + 1.0))
        values = term(block, probabilities)
        terms.extend(values.tolist())
        accumulated = math.fsum(terms)
        if abs(values[-1]) <= tolerance * abs(accumulated) or block[-1] >= ceiling:
            return accumulated
        block = np.arange(block[-1] + 1, block[-1] + 65, dtype=float)


def asymptotic_ordering_entropy_per_token(load, tolerance=DEFAULT_SERIES_TOLERANCE):  # type: (float, float) -> float
    """
    lim_{M→∞} H(Ω|S⃗,T)/M = (1/ρ) E[ℓ log ℓ] for ℓ ~ Poisson(ρ), in nats per token. The Poisson weights include the
    e^{−ρ} factor.
    """
    return _poisson_series(load, tolerance, lambda ell, p: p * ell * np.log(ell)) / load


def limiting_series_direct(load, tolerance=DEFAULT_SERIES_TOLERANCE):  # type: (float, float) -> float
    """
    The same limit written as Σ_{k≥2} p_k (k/ρ − 1) log k!, whose terms change sign at k = ρ.
    """
    return _poisson_series(load, tolerance, lambda k, p: p * (k / load - 1.0) * special.gammaln(k + 1.0))
