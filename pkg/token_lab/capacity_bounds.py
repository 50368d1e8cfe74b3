"""
Closed-form capacity quantities of the deadline-constrained exponential timing channel. Everything is in nats; use
`nats_to_bits` at the presentation layer.
"""
from __future__ import (
    absolute_import,
    unicode_literals,
)

import math
from typing import (
    List,
    Tuple,
)

import attr
import numpy as np
from scipy import optimize

from token_lab.errors import (
    NumericConsistencyError,
    ParameterError,
)
from token_lab.ordering import asymptotic_ordering_entropy_per_token


__all__ = (
    'CapacityPoint',
    'capacity_at_load',
    'capacity_point',
    'cq_lower',
    'cq_lower_simple',
    'cq_upper',
    'log_rho_grid',
    'max_entropy_S',
    'max_mi_single',
    'nats_to_bits',
    'peak_timing_rate',
    'timing_rate_per_passage',
)


_NEGATIVE_ZERO_TOLERANCE = 1e-12


def _check_rate(mu):  # type: (float) -> None
    if not (math.isfinite(mu) and mu > 0):
        raise ParameterError('μ must be finite and positive, got {!r}'.format(mu))


def _check_deadline(tau):  # type: (float) -> None
    if not (math.isfinite(tau) and tau >= 0):
        raise ParameterError('τ must be finite and nonnegative, got {!r}'.format(tau))


def _check_load(rho):  # type: (float) -> None
    if not (math.isfinite(rho) and rho > 0):
        raise ParameterError('ρ must be finite and positive, got {!r}'.format(rho))


def max_entropy_S(mu, tau):  # type: (float, float) -> float
    """
    The largest differential entropy of S = T + D over launch laws on [0, τ], for exponential D with rate μ:
    log((e + μτ)/μ).
    """
    _check_rate(mu)
    _check_deadline(tau)
    return math.log(math.e + mu * tau) - math.log(mu)


def max_mi_single(mu, tau):  # type: (float, float) -> float
    """
    The single-token capacity under the deadline: max I(S; T) = log(1 + μτ/e).
    """
    _check_rate(mu)
    _check_deadline(tau)
    return math.log1p(mu * tau / math.e)


def cq_lower_simple(rho):  # type: (float) -> float
    """max{−log ρ, 0} nats per token."""
    _check_load(rho)
    return max(-math.log(rho), 0.0)


def cq_lower(rho):  # type: (float) -> float
    """
    log(1/ρ) + (1/ρ) E[ℓ log ℓ], ℓ ~ Poisson(ρ). Nonnegative by Jensen; a rounding residue in (−1e−12, 0) is
    reported as 0, anything below is a numeric-consistency failure.
    """
    _check_load(rho)
    value = -math.log(rho) + asymptotic_ordering_entropy_per_token(rho)
    if value < 0:
        if value > -_NEGATIVE_ZERO_TOLERANCE:
            return 0.0
        raise NumericConsistencyError('cq_lower({}) = {} is negative'.format(rho, value))
    return value


def cq_upper(rho):  # type: (float) -> float
    """log(1/ρ + 4) nats per token."""
    _check_load(rho)
    return math.log(1.0 / rho + 4.0)


def nats_to_bits(value):  # type: (float) -> float
    return value / math.log(2.0)


@attr.s(frozen=True)
class CapacityPoint(object):
    """
    All bounds at one load ρ = λ/μ. Per-token values are in nats per token, per-time values in nats per unit time at
    intensity λ (C_t = λ C_q).
    """

    load = attr.ib()  # type: float
    intensity = attr.ib()  # type: float
    cq_lower_simple = attr.ib()  # type: float
    cq_lower = attr.ib()  # type: float
    cq_upper = attr.ib()  # type: float

    def __attrs_post_init__(self):  # type: () -> None
        if not (self.cq_lower_simple <= self.cq_lower <= self.cq_upper):
            raise NumericConsistencyError('Bound ordering violated at ρ={}: {} <= {} <= {} fails'.format(
                self.load,
                self.cq_lower_simple,
                self.cq_lower,
                self.cq_upper,
            ))

    @property
    def ct_lower(self):  # type: () -> float
        return self.intensity * self.cq_lower

    @property
    def ct_upper(self):  # type: () -> float
        return self.intensity * self.cq_upper

    @property
    def ct_lower_simple(self):  # type: () -> float
        return self.intensity * self.cq_lower_simple


def capacity_point(intensity, mu=1.0):  # type: (float, float) -> CapacityPoint
    """
    Assembles every bound at ρ = λ/μ.

    :param intensity: λ, tokens per unit time
    :param mu: μ, the reciprocal mean first-passage time
    """
    _check_rate(mu)
    if not (math.isfinite(intensity) and intensity > 0):
        raise ParameterError('λ must be finite and positive, got {!r}'.format(intensity))
    rho = intensity / mu
    return CapacityPoint(
        load=rho,
        intensity=intensity,
        cq_lower_simple=cq_lower_simple(rho),
        cq_lower=cq_lower(rho),
        cq_upper=cq_upper(rho),
    )


def capacity_at_load(rho):  # type: (float) -> CapacityPoint
    """The bounds at load ρ with time measured in passage times (μ = 1, so λ = ρ)."""
    return capacity_point(rho, 1.0)


def log_rho_grid(rho_min, rho_max, points):  # type: (float, float, int) -> List[float]
    """
    `points` loads spaced evenly in log ρ from `rho_min` to `rho_max` inclusive. The end points are `rho_min` and
    `rho_max` exactly.
    """
    _check_load(rho_min)
    _check_load(rho_max)
    if rho_min > rho_max:
        raise ParameterError('rho_min {} exceeds rho_max {}'.format(rho_min, rho_max))
    if points < 1:
        raise ParameterError('A grid needs at least one point, got {}'.format(points))
    if points == 1:
        return [float(rho_min)]
    grid = np.logspace(math.log10(rho_min), math.log10(rho_max), points).tolist()
    grid[0], grid[-1] = float(rho_min), float(rho_max)
    return grid


def timing_rate_per_passage(rho):  # type: (float) -> float
    """ρ·C_q lower bound: nats per mean passage time for a single timing channel at load ρ."""
    return rho * cq_lower(rho)


def peak_timing_rate(rho_min=1e-3, rho_max=1e3):  # type: (float, float) -> Tuple[float, float]
    """
    The load maximising `timing_rate_per_passage` and the maximum itself. The rate rises from 0 at light load, peaks
    below 0.6 nats, and settles towards 1/2 nat under heavy load.
    """
    result = optimize.minimize_scalar(
        lambda log_rho: -timing_rate_per_passage(math.exp(log_rho)),
        bounds=(math.log(rho_min), math.log(rho_max)),
        method='bounded',
        options={'xatol': 1e-10},
    )
    rho = math.exp(result.x)
    return rho, timing_rate_per_passage(rho)
