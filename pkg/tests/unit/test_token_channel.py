from __future__ import (
    absolute_import,
    unicode_literals,
)

import io
import math
import os

import mock
import numpy as np
import pytest
from scipy import stats

from token_lab.errors import (
    NumericConsistencyError,
    ParameterError,
)
from token_lab.first_passage import (
    DeterministicShift,
    Exponential,
    Gamma,
    TableDefined,
)
from token_lab.publishers.csv import CsvPublisher
from token_lab.recorder import RunRecorder
from token_lab.streams import (
    make_stream,
    spawn_streams,
)
from token_lab.token_channel import (
    CONVERGENT,
    MAX_TIE_RESAMPLES,
    NON_CONVERGENT,
    TOKEN_COLUMNS,
    UNDETERMINED,
    LaunchSchedule,
    guard_diagnostic,
    overrun_bound,
    plan_guard,
    read_token_column,
    record_table,
    simulate_channel_use,
    simulate_channel_uses,
)


class TestLaunchSchedule(object):
    def test_from_times(self):  # type: () -> None
        schedule = LaunchSchedule.from_times([3.0, 0.0, 1.0, 2.0])

        assert schedule.token_count == 4
        assert schedule.deadline == 3.0
        assert schedule.intensity == pytest.approx(4.0 / 3.0)
        assert schedule.sorted_times.tolist() == [0.0, 1.0, 2.0, 3.0]

    def test_zero_deadline(self):  # type: () -> None
        schedule = LaunchSchedule.from_times([0.0, 0.0, 0.0])

        assert schedule.deadline == 0.0
        assert math.isinf(schedule.intensity)

    def test_intensity_must_launch_every_token(self):  # type: () -> None
        LaunchSchedule((0.0, 1.0), 2.0, 1.0)

        with pytest.raises(ParameterError):
            LaunchSchedule((0.0, 1.0), 2.0, 3.0)

    @pytest.mark.parametrize(('times', 'deadline'), [
        ((), 1.0),
        ((0.0, 2.0), 1.0),
        ((-0.5, 0.5), 1.0),
        ((0.0, float('nan')), 1.0),
        ((0.0, ), -1.0),
    ])
    def test_invalid(self, times, deadline):
        with pytest.raises(ParameterError):
            LaunchSchedule(times, deadline, 1.0)

    def test_optimal(self):  # type: () -> None
        schedule = LaunchSchedule.optimal(50, 2.0, make_stream(3), rate=0.5)

        assert schedule.token_count == 50
        assert schedule.deadline == pytest.approx(50.0)
        assert schedule.intensity == pytest.approx(1.0)
        assert all(0.0 <= t <= 50.0 for t in schedule.times)


class TestSimulateChannelUse(object):
    def test_constant_transit_preserves_order(self):  # type: () -> None
        record = simulate_channel_use(LaunchSchedule.from_times([0.0, 2.0]), DeterministicShift(1.0), make_stream(1))

        assert record.arrivals == (1.0, 3.0)
        assert record.sorted_arrivals == (1.0, 3.0)
        assert record.permutation == (0, 1)
        assert record.sorted_ranks == (1, 2)
        assert record.occupancies == (1, 2)

    def test_recorded_seed_is_reproducible(self):  # type: () -> None
        schedule = LaunchSchedule.from_times([0.0, 1.0, 2.0, 3.0])

        first = simulate_channel_use(schedule, Exponential(1.0), make_stream(0x5EED70CE))
        second = simulate_channel_use(schedule, Exponential(1.0), make_stream(0x5EED70CE))

        assert first == second
        assert record_table(first, 0x5EED70CE).rows == record_table(second, 0x5EED70CE).rows

    @pytest.mark.parametrize('law', [Exponential(1.0), Gamma(2.0, 1.0), DeterministicShift(0.2, 3.0)])
    def test_sorting_and_causality(self, law):
        rng = make_stream(11)
        for _ in range(50):
            schedule = LaunchSchedule.optimal(12, 1.0, rng)
            record = simulate_channel_use(schedule, law, rng)

            arrivals = np.asarray(record.arrivals)
            assert sorted(record.permutation) == list(range(12))
            assert arrivals[list(record.permutation)].tolist() == list(record.sorted_arrivals)
            assert np.all(np.diff(record.sorted_arrivals) > 0)
            assert np.min(arrivals - np.asarray(record.launch_times)) >= 0
            assert sorted(record.sorted_ranks) == list(range(1, 13))

    def test_occupancies(self):  # type: () -> None
        schedule = LaunchSchedule.from_times([0.0, 1.0, 2.0])
        with mock.patch('token_lab.token_channel.sample_first_passage', return_value=np.array([1.5, 0.2, 0.1])):
            record = simulate_channel_use(schedule, Exponential(), make_stream(1))

        assert record.arrivals == (1.5, 1.2, 2.1)
        assert record.permutation == (1, 0, 2)
        # No arrival before t=1; two before t=2; all three by the end
        assert record.occupancies == (0, 2, 3)

    def test_ties_are_resampled_and_counted(self):  # type: () -> None
        schedule = LaunchSchedule.from_times([0.0, 0.0])
        draws = [np.array([1.0, 1.0]), np.array([1.0, 1.0]), np.array([0.5, 0.7])]
        recorder = RunRecorder()

        with mock.patch('token_lab.token_channel.sample_first_passage', side_effect=draws):
            record = simulate_channel_use(schedule, Exponential(), make_stream(1), recorder)

        assert record.arrivals == (0.5, 0.7)
        assert record.tie_resamples == 2
        assert recorder.counter('channel.tie_resamples').value == 2

    def test_degenerate_ties_give_up(self):  # type: () -> None
        schedule = LaunchSchedule.from_times([0.0, 0.0])

        with pytest.raises(NumericConsistencyError):
            simulate_channel_use(schedule, DeterministicShift(1.0), make_stream(1))

        assert MAX_TIE_RESAMPLES == 1000

    def test_infinite_mean_is_refused(self):  # type: () -> None
        law = TableDefined(x=(0.0, 1.0), cdf_values=(0.0, 0.5), tail='power', allow_infinite_mean=True)

        with pytest.raises(ParameterError):
            simulate_channel_use(LaunchSchedule.from_times([0.0, 1.0]), law, make_stream(1))

    def test_equal_launches_give_uniform_orderings(self):  # type: () -> None
        schedule = LaunchSchedule.from_times([0.0, 0.0, 0.0])
        rng = make_stream(2024)
        uses = 100000
        counts = {}
        for _ in range(uses):
            permutation = simulate_channel_use(schedule, Exponential(1.0), rng).permutation
            counts[permutation] = counts.get(permutation, 0) + 1

        assert len(counts) == 6
        _, p_value = stats.chisquare(list(counts.values()))
        assert p_value > 0.001

    def test_launch_order_does_not_change_sorted_arrivals(self):  # type: () -> None
        times = [0.0, 0.3, 1.1, 2.0]
        uses = 20000
        first = [
            simulate_channel_use(LaunchSchedule.from_times(times), Exponential(1.0), rng).sorted_arrivals[0]
            for rng in spawn_streams(1, uses)
        ]
        second = [
            simulate_channel_use(LaunchSchedule.from_times(times[::-1]), Exponential(1.0), rng).sorted_arrivals[0]
            for rng in spawn_streams(2, uses)
        ]

        assert stats.ks_2samp(first, second).pvalue > 0.001


class TestSimulateChannelUses(object):
    def test_results_do_not_depend_on_workers(self):  # type: () -> None
        schedule = LaunchSchedule.from_times([0.0, 0.5, 1.0, 1.5])

        serial = simulate_channel_uses(schedule, Exponential(), 40, seed=9)
        threaded = simulate_channel_uses(schedule, Exponential(), 40, seed=9, workers=4)

        assert serial.uses == 40
        assert serial.records == threaded.records

    def test_overruns(self):  # type: () -> None
        schedule = LaunchSchedule((0.0, 1.0), 2.0, 1.0)
        guard = plan_guard(2, 0.5, 1.0)
        recorder = RunRecorder()

        summary = simulate_channel_uses(schedule, DeterministicShift(3.5, 100.0), 10, seed=1, guard=guard,
                                        recorder=recorder)

        # Every use has a token arriving after τ + γ = 3
        assert summary.overruns == 10
        assert summary.overrun_frequency == 1.0
        assert recorder.counter('channel.guard_overruns').value == 10

        summary = simulate_channel_uses(schedule, DeterministicShift(0.5, 100.0), 10, seed=1, guard=guard)
        assert summary.overruns == 0

    def test_no_uses(self):  # type: () -> None
        summary = simulate_channel_uses(LaunchSchedule.from_times([0.0]), Exponential(), 0, seed=1)

        assert summary.records == []
        assert summary.overrun_frequency == 0.0

        with pytest.raises(ParameterError):
            simulate_channel_uses(LaunchSchedule.from_times([0.0]), Exponential(), -1, seed=1)


class TestGuard(object):
    def test_plan_guard(self):  # type: () -> None
        plan = plan_guard(100, 0.01, 1.0)
        assert plan.guard == pytest.approx(1.0)
        assert plan.window == pytest.approx(100.0)

        plan = plan_guard(10, 0.5, 2.0)
        assert plan.guard == pytest.approx(2.5)
        assert plan.window == pytest.approx(5.0)

    @pytest.mark.parametrize('token_count', [1, 7, 100, 12345])
    def test_effective_rate(self, token_count):
        assert plan_guard(token_count, 0.2, 3.0).effective_rate == pytest.approx(3.0 / 1.2)

    @pytest.mark.parametrize(('token_count', 'epsilon', 'intensity'), [
        (0, 0.1, 1.0),
        (10, 0.0, 1.0),
        (10, 1.0, 1.0),
        (10, 0.1, 0.0),
    ])
    def test_plan_guard_invalid(self, token_count, epsilon, intensity):
        with pytest.raises(ParameterError):
            plan_guard(token_count, epsilon, intensity)

    def test_overrun_bound(self):  # type: () -> None
        assert overrun_bound(10, 10.0, Exponential(1.0)) == pytest.approx((1 - math.exp(-10)) ** 10, rel=1e-12)
        assert overrun_bound(10, 10.0, Exponential(1.0)) == pytest.approx(0.999546, abs=1e-6)
        assert overrun_bound(3, 0.0, Exponential(1.0)) == 0.0
        assert overrun_bound(1000, 20.0, Exponential(1.0)) >= 1 - 1000 * math.exp(-20)

    def test_diagnostic_for_exponential(self):  # type: () -> None
        diagnostic = guard_diagnostic(Exponential(1.0), 1.0, 0.1, [1000, 10, 100, 100, 20, 50, 200, 500])

        assert diagnostic.token_counts == [10, 20, 50, 100, 200, 500, 1000]
        assert diagnostic.values[3] == pytest.approx(100 * math.exp(-10), rel=1e-12)
        assert diagnostic.values[-1] == pytest.approx(1000 * math.exp(-100), rel=1e-9)
        assert diagnostic.values[-1] < 1e-6
        assert all(b < a for a, b in zip(diagnostic.values[:-1], diagnostic.values[1:]))
        assert diagnostic.verdict == CONVERGENT
        assert diagnostic.converges

    def test_diagnostic_for_infinite_mean(self):  # type: () -> None
        law = TableDefined(x=(0.0, 1.0), cdf_values=(0.0, 0.5), tail='power', allow_infinite_mean=True)
        diagnostic = guard_diagnostic(law, 1.0, 0.1, [10, 20, 50, 100, 200, 500, 1000])

        for token_count, value in zip(diagnostic.token_counts, diagnostic.values):
            assert value == pytest.approx(1.0 / (0.1 + 1.0 / token_count), rel=1e-9)
        assert diagnostic.verdict == NON_CONVERGENT

    def test_diagnostic_single_point_grid(self):  # type: () -> None
        law = TableDefined(x=(0.0, 1.0), cdf_values=(0.0, 0.5), tail='power', allow_infinite_mean=True)

        for dist in (law, Exponential(1.0)):
            diagnostic = guard_diagnostic(dist, 1.0, 0.1, [100, 100])

            assert diagnostic.token_counts == [100]
            assert diagnostic.verdict == UNDETERMINED
            assert not diagnostic.converges

        assert guard_diagnostic(law, 1.0, 0.1, [100, 1000]).verdict == NON_CONVERGENT

    def test_diagnostic_empty_grid(self):  # type: () -> None
        with pytest.raises(ParameterError):
            guard_diagnostic(Exponential(), 1.0, 0.1, [])


class TestTokenFiles(object):
    def test_record_table_round_trips_through_csv(self, tmpdir):
        schedule = LaunchSchedule.from_times([0.0, 1.0, 2.0])
        with mock.patch('token_lab.token_channel.sample_first_passage', return_value=np.array([1.5, 0.2, 0.1])):
            record = simulate_channel_use(schedule, Exponential(), make_stream(1))
        table = record_table(record, 42, {'tokens': 3})

        assert table.columns == TOKEN_COLUMNS
        assert table.rows == [(1, 0.0, 1.5, 2), (2, 1.0, 1.2, 1), (3, 2.0, 2.1, 3)]

        path = os.path.join(str(tmpdir), 'tokens.csv')
        CsvPublisher(path).publish(table)

        assert read_token_column(path, 'launch_time') == [0.0, 1.0, 2.0]
        assert read_token_column(path, 'arrival_time') == [1.5, 1.2, 2.1]

    def test_single_column_files(self, tmpdir):
        bare = os.path.join(str(tmpdir), 'bare.csv')
        with io.open(bare, 'w', encoding='utf-8') as f:
            f.write('0\n1.5\n')
        named = os.path.join(str(tmpdir), 'named.csv')
        with io.open(named, 'w', encoding='utf-8') as f:
            f.write('# hand-written\ntimes\n0\n2\n')

        assert read_token_column(bare, 'launch_time') == [0.0, 1.5]
        assert read_token_column(named, 'arrival_time') == [0.0, 2.0]

    def test_bad_files(self, tmpdir):
        empty = os.path.join(str(tmpdir), 'empty.csv')
        with io.open(empty, 'w', encoding='utf-8') as f:
            f.write('# nothing\n')
        wide = os.path.join(str(tmpdir), 'wide.csv')
        with io.open(wide, 'w', encoding='utf-8') as f:
            f.write('a,b\n1,2\n')
        malformed = os.path.join(str(tmpdir), 'malformed.csv')
        with io.open(malformed, 'w', encoding='utf-8') as f:
            f.write('launch_time\nsoon\n')

        for path in (empty, wide, malformed):
            with pytest.raises(ParameterError):
                read_token_column(path, 'launch_time')
