"""
Energy accounting and capacity expressions for the channels the timing channel is compared with: tokens carrying an
inscribed payload, identifiable (distinguishable) tokens, and the number/concentration channel in which only the count
of tokens per interval carries information.

Power is measured in energy units per mean passage time and rates in nats per mean passage time, so time is
normalised by 1/μ throughout.
"""
from __future__ import (
    absolute_import,
    unicode_literals,
)

import math
from typing import (
    List,
    Optional,
    Sequence,
    Tuple,
)

import attr
import numpy as np
from scipy import optimize

from token_lab.capacity_bounds import (
    cq_lower,
    cq_upper,
    peak_timing_rate,
    timing_rate_per_passage,
)
from token_lab.errors import (
    NumericConsistencyError,
    ParameterError,
    SizeError,
)
from token_lab.ordering import asymptotic_ordering_entropy_per_token


__all__ = (
    'ChannelCapacities',
    'EnergyModel',
    'HeadlinePoint',
    'NumberChannelPoint',
    'binomial_zbar',
    'channel_capacities',
    'headline_operating_point',
    'identifiable_capacity',
    'identifiable_capacity_limit',
    'number_channel_point',
    'parallel_timing_rate',
    'payload_capacities',
    'payload_load_for_power',
    'payload_rate',
    'power_payload',
    'power_timing',
    'sequencing_overhead_per_token',
    'zbar',
)


BOUND_LOWER = 'lower'
BOUND_UPPER = 'upper'

BINOMIAL_ZBAR_CAP = 20
ZBAR_TERM_CUTOFF = 1e-15
ZBAR_MAX_TERMS = 100000

ATP_JOULES = 8e-20
"""Energy of one ATP hydrolysis; two of them add one nucleotide to a strand."""


def _nonnegative(_instance, attribute, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
        raise ParameterError('{} must be a finite nonnegative number, got {!r}'.format(attribute.name, value))


def _alphabet(_instance, _attribute, value):
    if not (isinstance(value, int) and value >= 2):
        raise ParameterError('The payload alphabet needs at least 2 characters, got {!r}'.format(value))


def _check_positive(name, value):  # type: (str, float) -> None
    if not (math.isfinite(value) and value > 0):
        raise ParameterError('{} must be finite and positive, got {!r}'.format(name, value))


@attr.s(frozen=True)
class EnergyModel(object):
    """
    Per-token energy costs. A bare token costs `c0` to make; a payload-carrying token costs `c1` plus `dc1` per
    inscribed character, for `payload_length` characters from an alphabet of `alphabet_size`. Releasing and
    transporting any token costs `ce`.
    """

    c0 = attr.ib(default=2.0, validator=_nonnegative)  # type: float
    c1 = attr.ib(default=2.0, validator=_nonnegative)  # type: float
    dc1 = attr.ib(default=2.0, validator=_nonnegative)  # type: float
    ce = attr.ib(default=2.0, validator=_nonnegative)  # type: float
    payload_length = attr.ib(default=0, validator=_nonnegative)  # type: int
    alphabet_size = attr.ib(default=4, validator=_alphabet)  # type: int

    @property
    def timing_token_cost(self):  # type: () -> float
        return self.c0 + self.ce

    @property
    def nats_per_character(self):  # type: () -> float
        return math.log(self.alphabet_size)

    def with_payload(self, payload_length):  # type: (int) -> EnergyModel
        return attr.evolve(self, payload_length=payload_length)


@attr.s(frozen=True)
class ChannelCapacities(object):
    timing = attr.ib()  # type: float
    timing_payload = attr.ib()  # type: float
    payload = attr.ib()  # type: float


@attr.s(frozen=True)
class NumberChannelPoint(object):
    """
    The number/concentration channel at maximum count M and failure probability ε: signalling interval τ(M), token
    rate λ(M), expected intervals z̄(M) spanned by one burst, the z̄-normalised capacity approximation C̃_N (nats per
    passage time) and the normalised power 𝒫 = λ/μ.
    """

    token_count = attr.ib()  # type: int
    failure_probability = attr.ib()  # type: float
    interval = attr.ib()  # type: float
    rate = attr.ib()  # type: float
    zbar = attr.ib()  # type: float
    capacity = attr.ib()  # type: float
    power = attr.ib()  # type: float

    def __attrs_post_init__(self):  # type: () -> None
        values = (self.interval, self.rate, self.zbar, self.capacity, self.power)
        if not all(math.isfinite(v) for v in values) or self.interval <= 0 or self.zbar < 1:
            raise NumericConsistencyError('Degenerate number-channel point {!r}'.format(self))


@attr.s(frozen=True)
class HeadlinePoint(object):
    """
    A timing-channel operating point in physical units: `channels` parallel channels, each at load `load`.
    """

    channels = attr.ib()  # type: int
    load = attr.ib()  # type: float
    bits_per_second = attr.ib()  # type: float
    atp_per_passage = attr.ib()  # type: float
    watts = attr.ib()  # type: float


def power_timing(intensity, model):  # type: (float, EnergyModel) -> float
    """λ(c₀ + c_e)."""
    _check_positive('λ', intensity)
    return intensity * model.timing_token_cost


def power_payload(intensity, rho, model, sequencing_per_token):
    # type: (float, float, EnergyModel, float) -> float
    """
    An upper bound on the power of payload-carrying tokens: λ(c₁ + c_e + (H↑/log b + K)Δc₁). The sequencing overhead
    H↑ (nats per token) is inscribed as extra characters, log b nats each.
    """
    _check_positive('λ', intensity)
    _check_positive('ρ', rho)
    if sequencing_per_token < 0:
        raise ParameterError('Sequencing overhead cannot be negative, got {!r}'.format(sequencing_per_token))
    characters = sequencing_per_token / model.nats_per_character + model.payload_length
    return intensity * (model.c1 + model.ce + characters * model.dc1)


def sequencing_overhead_per_token(rho):  # type: (float) -> float
    """
    Side information per token needed to put payload fragments back in launch order: the limiting ordering entropy
    per token for exponential transport.
    """
    return asymptotic_ordering_entropy_per_token(rho)


def channel_capacities(intensity, rho, payload_length, alphabet_size, bound=BOUND_LOWER):
    # type: (float, float, int, int, str) -> ChannelCapacities
    """
    𝒞_T = λC_q, 𝒞_{T+P} = λ(C_q + K log b) and 𝒞_P = 𝒞_{T+P} − 𝒞_T, with C_q the lower bound unless `bound` is
    `upper`. 𝒞_P is defined by the subtraction so the identity is exact in floating point.
    """
    _check_positive('λ', intensity)
    if payload_length < 0:
        raise ParameterError('The payload length cannot be negative, got {!r}'.format(payload_length))
    if alphabet_size < 2:
        raise ParameterError('The payload alphabet needs at least 2 characters, got {!r}'.format(alphabet_size))
    if bound == BOUND_LOWER:
        cq = cq_lower(rho)
    elif bound == BOUND_UPPER:
        cq = cq_upper(rho)
    else:
        raise ParameterError('bound must be {!r} or {!r}, got {!r}'.format(BOUND_LOWER, BOUND_UPPER, bound))
    timing = intensity * cq
    timing_payload = intensity * (cq + payload_length * math.log(alphabet_size))
    return ChannelCapacities(timing=timing, timing_payload=timing_payload, payload=timing_payload - timing)


def identifiable_capacity(rho, power):  # type: (float, float) -> float
    """
    The power-constrained capacity of distinguishable tokens, ρ log(1 + e^{𝒫/ρ}/(ρe)), in nats per passage time.
    Evaluated as ρ·logaddexp(0, 𝒫/ρ − log ρ − 1) so light loads do not overflow.
    """
    _check_positive('ρ', rho)
    _check_positive('𝒫', power)
    return rho * float(np.logaddexp(0.0, power / rho - math.log(rho) - 1.0))


def identifiable_capacity_limit(power):  # type: (float) -> float
    """The ρ → 0 limit of `identifiable_capacity`: 𝒫 itself."""
    _check_positive('𝒫', power)
    return power


def _check_number_channel(token_count, epsilon):  # type: (int, float) -> None
    if isinstance(token_count, bool) or not isinstance(token_count, int) or token_count < 1:
        raise ParameterError('M must be an integer of at least 1, got {!r}'.format(token_count))
    if not 0 < epsilon < 1:
        raise ParameterError('ε must lie strictly between 0 and 1, got {!r}'.format(epsilon))


def zbar(token_count, epsilon):  # type: (int, float) -> float
    """
    z̄(M) = Σ_{z≥0} (1 − (1 − ε^z)^M), the expected number of intervals a burst of M tokens spans. Summed directly,
    term by term, until a term drops below 1e−15.
    """
    _check_number_channel(token_count, epsilon)
    terms = [1.0]  # z = 0
    for z in range(1, ZBAR_MAX_TERMS):
        term = -math.expm1(token_count * math.log1p(-epsilon ** z))
        terms.append(term)
        if term < ZBAR_TERM_CUTOFF:
            break
    return math.fsum(terms)


def binomial_zbar(token_count, epsilon):  # type: (int, float) -> float
    """
    z̄(M) by the alternating binomial sum −Σ_{n=1}^{M} C(M, n)(−1)ⁿ/(1 − εⁿ). Cancels catastrophically as M grows,
    so it is limited to M ≤ 20 and kept for checking `zbar`.
    """
    _check_number_channel(token_count, epsilon)
    if token_count > BINOMIAL_ZBAR_CAP:
        raise SizeError('binomial_zbar is limited to M <= {}; use zbar instead'.format(BINOMIAL_ZBAR_CAP))
    return -math.fsum(
        math.comb(token_count, n) * (-1.0) ** n / (1.0 - epsilon ** n) for n in range(1, token_count + 1)
    )


def number_channel_point(token_count, epsilon, mu=1.0):  # type: (int, float, float) -> NumberChannelPoint
    """
    Sizes the signalling interval so that all M tokens of a burst arrive within it with probability 1 − ε:
    τ(M) = −(1/μ) log(1 − (1 − ε)^{1/M}); then λ(M) = M/(2τ), C̃_N = log(M + 1)/(z̄ μτ) and 𝒫 = λ/μ.
    """
    _check_number_channel(token_count, epsilon)
    _check_positive('μ', mu)
    interval = -math.log(-math.expm1(math.log1p(-epsilon) / token_count)) / mu
    rate = token_count / (2.0 * interval)
    spanned = zbar(token_count, epsilon)
    return NumberChannelPoint(
        token_count=token_count,
        failure_probability=epsilon,
        interval=interval,
        rate=rate,
        zbar=spanned,
        capacity=math.log(token_count + 1.0) / (spanned * mu * interval),
        power=rate / mu,
    )


def parallel_timing_rate(power, channels, model):  # type: (float, int, EnergyModel) -> Tuple[float, float]
    """
    Splits a power budget evenly over `channels` independent timing channels.

    :param power: Energy per passage time, in the model's units
    :param channels: n

    :return: The per-channel load ρ = 𝒫/(n(c₀ + c_e)) and the aggregate rate nρC_q(ρ) in nats per passage time
    """
    _check_positive('Power', power)
    if channels < 1:
        raise ParameterError('At least one channel is required, got {!r}'.format(channels))
    if model.timing_token_cost <= 0:
        raise ParameterError('Timing tokens must cost a positive amount of energy')
    rho = power / (channels * model.timing_token_cost)
    return rho, channels * timing_rate_per_passage(rho)


def _payload_power_at(rho, model):  # type: (float, EnergyModel) -> float
    return power_payload(rho, rho, model, sequencing_overhead_per_token(rho))


def payload_load_for_power(power, model):  # type: (float, EnergyModel) -> float
    """
    The load ρ at which payload-carrying tokens use exactly `power` per passage time, including the sequencing
    overhead. Power is increasing in ρ, and ignoring the overhead overestimates ρ, which brackets the root for
    Brent's method in log ρ.
    """
    _check_positive('Power', power)
    base_cost = model.c1 + model.ce + model.payload_length * model.dc1
    if base_cost <= 0:
        raise ParameterError('Payload tokens must cost a positive amount of energy')

    def excess(log_rho):  # type: (float) -> float
        return math.log(_payload_power_at(math.exp(log_rho), model)) - math.log(power)

    high = power / base_cost
    low = power / (_payload_power_at(high, model) / high)
    if excess(math.log(low)) >= 0:
        return low
    return math.exp(optimize.brentq(excess, math.log(low), math.log(high), xtol=1e-14, rtol=1e-13))


def payload_capacities(power, model, bound=BOUND_LOWER):
    # type: (float, EnergyModel, str) -> Tuple[float, ChannelCapacities]
    """
    :return: The load at the given power and all three capacities at that load, in nats per passage time
    """
    rho = payload_load_for_power(power, model)
    return rho, channel_capacities(rho, rho, model.payload_length, model.alphabet_size, bound)


def payload_rate(power, model, bound=BOUND_LOWER):  # type: (float, EnergyModel, str) -> Tuple[float, float]
    """
    :return: The load at the given power and 𝒞_{T+P} = ρ(C_q + K log b) there, in nats per passage time
    """
    rho, capacities = payload_capacities(power, model, bound)
    return rho, capacities.timing_payload


def headline_operating_point(
    target_bits_per_second=1e6,  # type: float
    passage_time=1e-6,  # type: float
    atp_joules=ATP_JOULES,  # type: float
    model=None,  # type: Optional[EnergyModel]
    channel_counts=(1, 2, 4),  # type: Sequence[int]
):
    # type: (...) -> Tuple[HeadlinePoint, List[HeadlinePoint]]
    """
    The cheapest way to reach a target bit rate with parallel timing channels built from bare tokens whose energy is
    counted in ATP. For each channel count the lightest per-channel load reaching the target is found below the peak
    of ρC_q(ρ); counts that cannot reach the target at any load are skipped.

    :return: The cheapest point, and every feasible point in channel-count order
    """
    _check_positive('The target rate', target_bits_per_second)
    _check_positive('The passage time', passage_time)
    _check_positive('The ATP energy', atp_joules)
    model = model or EnergyModel()

    peak_rho, peak_rate = peak_timing_rate()
    target_nats_per_passage = target_bits_per_second * passage_time * math.log(2.0)

    feasible = []  # type: List[HeadlinePoint]
    for channels in sorted(set(channel_counts)):
        needed = target_nats_per_passage / channels
        if needed > peak_rate:
            continue
        rho = optimize.brentq(
            lambda r: timing_rate_per_passage(r) - needed,
            1e-12,
            peak_rho,
            xtol=1e-15,
            rtol=1e-12,
        )
        atp_per_passage = channels * rho * model.timing_token_cost
        feasible.append(HeadlinePoint(
            channels=channels,
            load=rho,
            bits_per_second=channels * timing_rate_per_passage(rho) / math.log(2.0) / passage_time,
            atp_per_passage=atp_per_passage,
            watts=atp_per_passage * atp_joules / passage_time,
        ))

    if not feasible:
        raise ParameterError('No channel count in {} reaches {} bit/s'.format(
            list(channel_counts),
            target_bits_per_second,
        ))
    return min(feasible, key=lambda p: p.watts), feasible
