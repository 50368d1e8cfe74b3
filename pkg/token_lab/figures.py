"""
The experiments behind each command. Every `run_*` function takes an `ExperimentConfig` and returns a `ResultTable`
whose rows are in grid order regardless of how many workers computed them.
"""
from __future__ import (
    absolute_import,
    unicode_literals,
)

import math
from typing import (
    Callable,
    Dict,
    List,
    Optional,
    Tuple,
)

import six

from token_lab.capacity_bounds import (
    capacity_at_load,
    cq_lower,
    log_rho_grid,
    nats_to_bits,
    timing_rate_per_passage,
)
from token_lab.channel_variants import (
    ChannelCapacities,
    EnergyModel,
    headline_operating_point,
    number_channel_point,
    parallel_timing_rate,
    payload_capacities,
)
from token_lab.configuration import ExperimentConfig
from token_lab.errors import NumericConsistencyError
from token_lab.ordering import (
    BRUTE_FORCE_ADMISSIBLE_CAP,
    EXACT_ENTROPY_CAP,
    UPPER_BOUND_CAP,
    asymptotic_ordering_entropy_per_token,
    count_admissible,
    exact_conditional_entropy,
    expected_ordering_entropy_per_token,
    limiting_series_direct,
    mc_ordering_entropy_per_token,
    upper_bound_Ht,
)
from token_lab.recorder import RunRecorder
from token_lab.streams import (
    make_stream,
    map_ordered,
)
from token_lab.tables import (
    ResultTable,
    format_cell,
)
from token_lab.token_channel import (
    LaunchSchedule,
    guard_diagnostic,
    overrun_bound,
    read_token_column,
    record_table,
    simulate_channel_use,
)


__all__ = (
    'RUNNERS',
    'run_bounds',
    'run_capacities',
    'run_guard_diagnostic',
    'run_headline',
    'run_mc_convergence',
    'run_number_vs_timing',
    'run_ordering_asymptote',
    'run_ordering_exact',
    'run_simulate',
)


SERIES_AGREEMENT = 1e-9
RELATIVE_ERROR_TARGET = 0.03
MC_AGREEMENT_Z = 4.0


def run_bounds(config, workers=1, recorder=None):
    # type: (ExperimentConfig, int, Optional[RunRecorder]) -> ResultTable
    grid = log_rho_grid(config.get('rho_min'), config.get('rho_max'), config.get('points'))
    table = ResultTable(
        command='bounds',
        columns=('rho', 'cq_lower_simple', 'cq_lower', 'cq_upper', 'ct_lower', 'ct_upper'),
        seed=config.seed,
        parameters=config.parameters(['rho_min', 'rho_max', 'points']),
        rate_columns=('cq_lower_simple', 'cq_lower', 'cq_upper', 'ct_lower', 'ct_upper'),
    )
    for point in map_ordered(capacity_at_load, grid, workers):
        table.add_row(point.load, point.cq_lower_simple, point.cq_lower, point.cq_upper, point.ct_lower, point.ct_upper)
    table.summary.append('cq_lower_simple <= cq_lower <= cq_upper at all {} loads'.format(len(grid)))
    return table


def run_capacities(config, workers=1, recorder=None):
    # type: (ExperimentConfig, int, Optional[RunRecorder]) -> ResultTable
    """
    Timing-only curves for each parallel channel count n and timing-plus-payload curves for each payload length K,
    all on one power grid (energy units per passage time). Rates are in bits per passage time.

    Each payload curve `payload_k{K}` comes with `timing_at_payload_load_k{K}` and `payload_only_k{K}`, the timing and
    payload shares at the load that curve runs at. At every power the payload share is the payload curve minus the
    timing share.
    """
    powers = log_rho_grid(config.get('power_min'), config.get('power_max'), config.get('points'))
    energy = config.energy
    curves = []  # type: List[Tuple[six.text_type, List[float]]]
    splits = []  # type: List[Tuple[six.text_type, List[float]]]

    for channels in config.get('n'):
        def timing(power, channels=channels):  # type: (float, int) -> float
            return nats_to_bits(parallel_timing_rate(power, channels, energy)[1])
        curves.append(('timing_n{}'.format(channels), map_ordered(timing, powers, workers)))

    for length in config.get('k'):
        model = energy.with_payload(length)

        def payload(power, model=model):  # type: (float, EnergyModel) -> ChannelCapacities
            return payload_capacities(power, model)[1]
        capacities = map_ordered(payload, powers, workers)
        combined = [nats_to_bits(c.timing_payload) for c in capacities]
        timing_share = [nats_to_bits(c.timing) for c in capacities]
        curves.append(('payload_k{}'.format(length), combined))
        splits.append(('timing_at_payload_load_k{}'.format(length), timing_share))
        splits.append(('payload_only_k{}'.format(length), [t - s for t, s in zip(combined, timing_share)]))

    table = ResultTable(
        command='figures capacities',
        columns=('power_atp_per_passage', 'curve_id', 'rate_bits_per_passage'),
        seed=config.seed,
        parameters=config.parameters(['k', 'n', 'c0', 'c1', 'dc1', 'ce', 'b', 'power_min', 'power_max', 'points']),
        rate_columns=('rate_bits_per_passage', ),
    )
    for label, rates in curves + splits:
        for power, rate in zip(powers, rates):
            table.add_row(power, label, rate)

    for index, where in ((0, 'lowest'), (len(powers) - 1, 'highest')):
        best = max(curves, key=lambda c: c[1][index])
        table.summary.append('best curve at the {} power ({}): {} at {} bits/passage'.format(
            where,
            format_cell(powers[index]),
            best[0],
            format_cell(best[1][index]),
        ))
    return table


def run_number_vs_timing(config, workers=1, recorder=None):
    # type: (ExperimentConfig, int, Optional[RunRecorder]) -> ResultTable
    """
    The z̄-normalised number-channel rate C̃_N for each ε over the M grid, against the timing lower bound ρC_q(ρ)
    evaluated at the same normalised powers 𝒫 = ρ.
    """
    table = ResultTable(
        command='figures number-vs-timing',
        columns=('tokens_per_passage', 'curve_id', 'rate_nats_per_passage'),
        seed=config.seed,
        parameters=config.parameters(['eps', 'm_grid']),
        rate_columns=('rate_nats_per_passage', ),
    )
    number_rows = []  # type: List[Tuple[float, six.text_type, float]]
    for epsilon in config.get('eps'):
        label = 'number_eps{}'.format(format_cell(float(epsilon)))
        for token_count in config.get('m_grid'):
            point = number_channel_point(token_count, float(epsilon))
            number_rows.append((point.power, label, point.capacity))

    powers = sorted(set(row[0] for row in number_rows))
    timing = dict(zip(powers, map_ordered(timing_rate_per_passage, powers, workers)))

    for row in number_rows:
        table.add_row(*row)
    for power in powers:
        table.add_row(power, 'timing_lower', timing[power])

    margin = min(timing[power] / rate - 1.0 for power, _, rate in number_rows)
    table.summary.append('timing lower bound exceeds the number channel by at least {:.1%} at equal power'.format(
        margin,
    ))
    return table


def run_mc_convergence(config, workers=1, recorder=None):
    # type: (ExperimentConfig, int, Optional[RunRecorder]) -> ResultTable
    """
    The ordering entropy per token over the M grid against the limiting series. `finite_m` is the exact finite-M
    expectation and `abs_error` its distance to the series; `estimate` and `stderr` are the Monte Carlo mean of
    log|Ω|/M, and `mc_z` is its deviation from `finite_m` in standard errors.
    """
    rho = float(config.get('rho')[0])
    trials = config.get('trials')
    asymptote = asymptotic_ordering_entropy_per_token(rho, config.get('tolerance'))
    table = ResultTable(
        command='mc-convergence',
        columns=('M', 'estimate', 'stderr', 'finite_m', 'asymptote', 'abs_error', 'mc_z'),
        seed=config.seed,
        parameters=config.parameters(['m_grid', 'rho', 'trials', 'tolerance']),
        rate_columns=('estimate', 'stderr', 'finite_m', 'asymptote', 'abs_error'),
    )
    errors = []  # type: List[float]
    deviations = []  # type: List[float]
    estimate = 0.0
    for token_count in config.get('m_grid'):
        result = mc_ordering_entropy_per_token(token_count, rho, trials, seed=config.seed, workers=workers)
        finite = expected_ordering_entropy_per_token(token_count, rho)
        deviation = (result.estimate - finite) / result.stderr if result.stderr > 0 else 0.0
        errors.append(abs(finite - asymptote))
        deviations.append(abs(deviation))
        estimate = result.estimate
        table.add_row(token_count, result.estimate, result.stderr, finite, asymptote, errors[-1], deviation)
        if recorder is not None:
            recorder.counter('ordering.trials').increment(trials)

    decreasing = all(b < a for a, b in zip(errors[:-1], errors[1:]))
    table.summary.append('abs_error {} over the M grid'.format(
        'decreases monotonically' if decreasing else 'does not decrease monotonically',
    ))
    relative = abs(estimate - asymptote) / asymptote if asymptote > 0 else 0.0
    table.summary.append('relative error of the estimate at the largest M: {:.2%} ({} the {:.0%} target)'.format(
        relative,
        'within' if relative <= RELATIVE_ERROR_TARGET else 'outside',
        RELATIVE_ERROR_TARGET,
    ))
    table.summary.append('Monte Carlo estimates {} finite_m (largest |mc_z| {:.2f})'.format(
        'agree with' if max(deviations) <= MC_AGREEMENT_Z else 'disagree with',
        max(deviations),
    ))
    return table


def run_guard_diagnostic(config, workers=1, recorder=None):
    # type: (ExperimentConfig, int, Optional[RunRecorder]) -> ResultTable
    """
    M·Ḡ(γ(M, ε)) and the all-arrive bound G^M(γ) over the M grid for each ε, with a convergence verdict per ε.
    """
    intensity = float(config.get('intensity'))
    table = ResultTable(
        command='guard-diagnostic',
        columns=('M', 'eps', 'guard', 'm_ccdf', 'all_arrive_bound'),
        seed=config.seed,
        parameters=config.parameters(['dist', 'intensity', 'eps', 'm_grid']),
    )
    for epsilon in config.get('eps'):
        diagnostic = guard_diagnostic(config.dist, intensity, float(epsilon), config.get('m_grid'))
        for token_count, guard, value in zip(diagnostic.token_counts, diagnostic.guards, diagnostic.values):
            table.add_row(token_count, float(epsilon), guard, value, overrun_bound(token_count, guard, config.dist))
        table.summary.append('eps={}: {}'.format(format_cell(float(epsilon)), diagnostic.verdict))
    return table


def run_ordering_exact(config, workers=1, recorder=None):
    # type: (ExperimentConfig, int, Optional[RunRecorder]) -> ResultTable
    """
    Every ordering quantity available for one recorded channel use. Cells are left empty when M exceeds the cap of
    the corresponding computation.
    """
    launches = read_token_column(config.get('schedule'), 'launch_time')
    arrivals = read_token_column(config.get('arrivals'), 'arrival_time')
    count = count_admissible(launches, arrivals)
    token_count = count.token_count

    exact = exact_conditional_entropy(launches, arrivals, config.dist) if token_count <= EXACT_ENTROPY_CAP else ''
    bound = upper_bound_Ht(launches, config.dist) if token_count <= UPPER_BOUND_CAP else ''

    table = ResultTable(
        command='ordering exact',
        columns=('M', 'count', 'log_count', 'exact_entropy', 'upper_bound_ht'),
        seed=config.seed,
        parameters=config.parameters(['dist', 'schedule', 'arrivals']),
        rate_columns=('log_count', 'exact_entropy', 'upper_bound_ht'),
    )
    table.add_row(token_count, count.count if count.count is not None else '', count.log_count, exact, bound)
    if token_count > BRUTE_FORCE_ADMISSIBLE_CAP:
        table.summary.append('M={} is above the enumeration cap; counted by occupancies only'.format(token_count))
    return table


def run_ordering_asymptote(config, workers=1, recorder=None):
    # type: (ExperimentConfig, int, Optional[RunRecorder]) -> ResultTable
    """
    The limiting ordering entropy per token at each ρ, by both series forms.
    """
    tolerance = config.get('tolerance')
    table = ResultTable(
        command='ordering asymptote',
        columns=('rho', 'entropy_per_token', 'direct_series', 'cq_lower'),
        seed=config.seed,
        parameters=config.parameters(['rho', 'tolerance']),
        rate_columns=('entropy_per_token', 'cq_lower'),
    )
    for rho in config.get('rho'):
        rho = float(rho)
        compact = asymptotic_ordering_entropy_per_token(rho, tolerance)
        direct = limiting_series_direct(rho, tolerance)
        if abs(compact - direct) > SERIES_AGREEMENT * max(1.0, abs(compact)):
            raise NumericConsistencyError('Series forms disagree at ρ={}: {} vs {}'.format(rho, compact, direct))
        table.add_row(rho, compact, direct, cq_lower(rho))
    return table


def run_headline(config, workers=1, recorder=None):
    # type: (ExperimentConfig, int, Optional[RunRecorder]) -> ResultTable
    """
    The cheapest parallel timing-channel configuration reaching the target bit rate, in watts.
    """
    cheapest, feasible = headline_operating_point(
        target_bits_per_second=float(config.get('target_bps')),
        passage_time=float(config.get('passage_time')),
        atp_joules=float(config.get('atp_joules')),
        model=config.energy,
        channel_counts=config.get('n'),
    )
    table = ResultTable(
        command='headline',
        columns=('channels', 'load', 'bits_per_second', 'atp_per_passage', 'watts', 'cheapest'),
        seed=config.seed,
        parameters=config.parameters(['n', 'target_bps', 'passage_time', 'atp_joules', 'c0', 'ce']),
        rate_columns=('bits_per_second', 'atp_per_passage', 'watts'),
    )
    for point in feasible:
        table.add_row(
            point.channels,
            point.load,
            point.bits_per_second,
            point.atp_per_passage,
            point.watts,
            point is cheapest,
        )
    skipped = sorted(set(config.get('n')) - set(p.channels for p in feasible))
    if skipped:
        table.summary.append('cannot reach the target with n in {}'.format(skipped))
    table.summary.append('cheapest: n={} at {} W ({} orders of magnitude from 1e-13 W)'.format(
        cheapest.channels,
        format_cell(cheapest.watts),
        format_cell(round(abs(math.log10(cheapest.watts) + 13.0), 2)),
    ))
    return table


def run_simulate(config, workers=1, recorder=None):
    # type: (ExperimentConfig, int, Optional[RunRecorder]) -> ResultTable
    """
    One channel use of `tokens` launches drawn from the capacity-achieving law at load ρ, as a per-token table that
    `ordering exact` reads back.
    """
    rng = make_stream(config.seed)
    rho = float(config.get('rho')[0])
    schedule = LaunchSchedule.optimal(config.get('tokens'), rho, rng, rate=config.dist.mu)
    record = simulate_channel_use(schedule, config.dist, rng, recorder)
    table = record_table(record, config.seed, config.parameters(['dist', 'rho', 'tokens']))
    count = count_admissible(record.launch_times, record.arrivals)
    table.summary.append('deadline {}: log|Ω| = {} nats'.format(
        format_cell(schedule.deadline),
        format_cell(count.log_count),
    ))
    return table


RUNNERS = {
    'bounds': run_bounds,
    'capacities': run_capacities,
    'number-vs-timing': run_number_vs_timing,
    'ordering-exact': run_ordering_exact,
    'ordering-asymptote': run_ordering_asymptote,
    'mc-convergence': run_mc_convergence,
    'guard-diagnostic': run_guard_diagnostic,
    'headline': run_headline,
    'simulate': run_simulate,
}  # type: Dict[six.text_type, Callable[[ExperimentConfig, int, Optional[RunRecorder]], ResultTable]]
