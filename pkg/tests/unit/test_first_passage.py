from __future__ import (
    absolute_import,
    unicode_literals,
)

import math

import numpy as np
import pytest

from token_lab.errors import (
    ParameterError,
    SingularityError,
)
from token_lab.first_passage import (
    DeterministicShift,
    Exponential,
    Gamma,
    OptimalInputDensity,
    TableDefined,
    make_first_passage,
    numerical_mean,
    sample_first_passage,
    sample_optimal_input,
)
from token_lab.streams import make_stream


def _pareto():  # type: () -> TableDefined
    # Ḡ(x) = 1/(1 + x) beyond x = 1
    return TableDefined(x=(0.0, 1.0), cdf_values=(0.0, 0.5), tail='power', allow_infinite_mean=True)


LAWS = [
    Exponential(1.0),
    Exponential(2.5),
    Gamma(2.0, 1.0),
    Gamma(0.5, 3.0),
    DeterministicShift(0.5, 2.0),
    DeterministicShift(2.0),
    TableDefined(x=(0.0, 0.5, 1.0, 2.0), cdf_values=(0.0, 0.3, 0.6, 0.8)),
    _pareto(),
]


class TestMakeFirstPassage(object):
    def test_exponential(self):  # type: () -> None
        law = make_first_passage('exponential', {'rate': 1.0})

        assert isinstance(law, Exponential)
        assert float(law.cdf(1.0)) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)
        assert float(law.cdf(1.0)) == pytest.approx(0.63212, abs=1e-5)
        assert float(law.density(0.5)) == pytest.approx(math.exp(-0.5), abs=1e-15)
        assert float(law.density(-0.1)) == 0.0

    def test_exponential_mean(self):  # type: () -> None
        assert make_first_passage('exponential', {'rate': 2.0}).mean == 0.5
        assert make_first_passage('exponential').mean == 1.0
        assert make_first_passage('exponential', {'rate': 2.0}).mu == 2.0

    def test_gamma_density(self):  # type: () -> None
        law = make_first_passage('gamma', {'shape': 2.0, 'rate': 1.0})

        assert float(law.density(1.0)) == pytest.approx(math.exp(-1.0), abs=1e-12)
        assert float(law.density(1.0)) == pytest.approx(0.36788, abs=1e-5)
        assert law.mean == 2.0

    def test_shift_rate_is_jitter(self):  # type: () -> None
        law = make_first_passage('deterministic-shift', {'shift': 1.0, 'rate': 4.0})

        assert law == DeterministicShift(1.0, 4.0)
        assert law.mean == 1.25
        assert law.describe() == 'deterministic-shift:rate=4.0,shift=1.0'

    def test_table(self):  # type: () -> None
        law = make_first_passage('table-defined', {'x': [0, 1, 2], 'cdf': [0, 0.5, 0.75]})

        assert isinstance(law, TableDefined)
        assert law.tail == 'exponential'
        assert float(law.cdf(0.5)) == pytest.approx(0.25)
        # Exponential tail through the last two knots halves the survivor per unit length
        assert float(law.ccdf(3.0)) == pytest.approx(0.125)
        assert law.describe() == 'table-defined:x=0|1|2,cdf=0|0.5|0.75,tail=exponential'

    @pytest.mark.parametrize(('kind', 'params'), [
        ('exponential', {'rate': 0.0}),
        ('exponential', {'rate': -1.0}),
        ('exponential', {'rate': float('inf')}),
        ('gamma', {'shape': 0.0}),
        ('gamma', {'shape': 1.0, 'rate': -2.0}),
        ('gamma', {}),
        ('deterministic-shift', {'shift': 0.0}),
        ('deterministic-shift', {'shift': -1.0, 'rate': 1.0}),
        ('exponential', {'shape': 1.0}),
        ('lognormal', {'rate': 1.0}),
    ])
    def test_invalid_parameters(self, kind, params):
        with pytest.raises(ParameterError):
            make_first_passage(kind, params)

    def test_table_point_masses_are_singular(self):  # type: () -> None
        with pytest.raises(SingularityError):
            make_first_passage('table-defined', {'x': [0, 1], 'cdf': [0.2, 0.5]})

        with pytest.raises(SingularityError):
            make_first_passage('table-defined', {'x': [0, 1, 1, 2], 'cdf': [0, 0.3, 0.6, 0.9]})

    def test_table_rejects_malformed_tables(self):  # type: () -> None
        with pytest.raises(ParameterError):
            TableDefined(x=(0.0, ), cdf_values=(0.0, ))
        with pytest.raises(ParameterError):
            TableDefined(x=(0.0, 2.0, 1.0), cdf_values=(0.0, 0.5, 0.6))
        with pytest.raises(ParameterError):
            TableDefined(x=(0.0, 1.0, 2.0), cdf_values=(0.0, 0.6, 0.5))
        with pytest.raises(ParameterError):
            TableDefined(x=(0.0, 1.0, 2.0), cdf_values=(0.0, 0.5, 0.5))
        with pytest.raises(ParameterError):
            TableDefined(x=(0.0, 1.0), cdf_values=(0.0, 0.5), tail='weibull')

    def test_infinite_mean_needs_override(self):  # type: () -> None
        with pytest.raises(ParameterError):
            TableDefined(x=(0.0, 1.0), cdf_values=(0.0, 0.5), tail='power')

        law = _pareto()
        assert law.tail_parameter == pytest.approx(1.0)
        assert not law.has_finite_mean
        assert float(law.ccdf(9.0)) == pytest.approx(0.1)

    def test_degenerate_shift_has_no_density(self):  # type: () -> None
        law = DeterministicShift(2.0)

        assert not law.has_density
        assert float(law.cdf(1.999)) == 0.0
        assert float(law.cdf(2.0)) == 1.0
        with pytest.raises(SingularityError):
            law.density(2.0)


class TestInvariants(object):
    @pytest.mark.parametrize('law', LAWS, ids=lambda law: law.describe())
    def test_cdf_and_ccdf_are_complementary(self, law):
        grid = np.concatenate([np.linspace(0.0, 5.0, 101), [7.5, 10.0, 50.0, 1000.0]])
        cdf = np.asarray(law.cdf(grid))
        ccdf = np.asarray(law.ccdf(grid))

        assert np.all(cdf >= 0) and np.all(cdf <= 1)
        assert np.max(np.abs(cdf + ccdf - 1.0)) < 1e-12
        assert np.all(np.diff(cdf) >= -1e-15)

    @pytest.mark.parametrize('law', LAWS, ids=lambda law: law.describe())
    def test_causal(self, law):
        assert float(law.cdf(-1.0)) == 0.0
        assert float(law.ccdf(-1.0)) == 1.0
        assert float(law.cdf(0.0)) == 0.0

    @pytest.mark.parametrize('law', [Exponential(1.0), Exponential(0.2), Gamma(2.0, 1.0), Gamma(0.5, 3.0)])
    def test_numerical_mean(self, law):
        assert numerical_mean(law) == pytest.approx(law.mean, rel=1e-6)

    def test_numerical_mean_of_table_and_shift(self):  # type: () -> None
        table = TableDefined(x=(0.0, 0.5, 1.0, 2.0), cdf_values=(0.0, 0.3, 0.6, 0.8))
        shift = DeterministicShift(0.5, 2.0)

        assert numerical_mean(table) == pytest.approx(table.mean, rel=1e-6)
        assert numerical_mean(shift) == pytest.approx(1.0, rel=1e-6)

    def test_table_density_matches_cdf_slopes(self):  # type: () -> None
        table = TableDefined(x=(0.0, 0.5, 1.0, 2.0), cdf_values=(0.0, 0.3, 0.6, 0.8))

        assert float(table.density(0.25)) == pytest.approx(0.6)
        assert float(table.density(1.5)) == pytest.approx(0.2)
        assert float(table.density(-0.5)) == 0.0
        step = 1e-6
        assert float(table.density(3.0)) == pytest.approx(
            float(table.cdf(3.0 + step) - table.cdf(3.0 - step)) / (2 * step),
            rel=1e-5,
        )


class TestSampling(object):
    def test_count_zero(self):  # type: () -> None
        assert sample_first_passage(Exponential(), 0, make_stream(1)).tolist() == []

        with pytest.raises(ParameterError):
            sample_first_passage(Exponential(), -1, make_stream(1))

    def test_exponential_sample_mean(self):  # type: () -> None
        draws = sample_first_passage(Exponential(1.0), 10 ** 6, make_stream(17))

        assert np.all(draws >= 0)
        assert abs(float(np.mean(draws)) - 1.0) < 0.01

    def test_degenerate_shift_samples(self):  # type: () -> None
        assert sample_first_passage(DeterministicShift(2.0), 5, make_stream(3)).tolist() == [2.0] * 5

    @pytest.mark.parametrize('law', [
        Gamma(2.0, 1.0),
        DeterministicShift(0.5, 2.0),
        TableDefined(x=(0.0, 0.5, 1.0, 2.0), cdf_values=(0.0, 0.3, 0.6, 0.8)),
    ])
    def test_sample_means(self, law):
        draws = sample_first_passage(law, 200000, make_stream(23))
        standard_error = float(np.std(draws)) / math.sqrt(draws.size)

        assert np.all(draws >= 0)
        assert abs(float(np.mean(draws)) - law.mean) < 5 * standard_error

    def test_same_stream_same_draws(self):  # type: () -> None
        law = Gamma(2.0, 1.0)

        assert sample_first_passage(law, 10, make_stream(5)).tolist() == sample_first_passage(
            law,
            10,
            make_stream(5),
        ).tolist()


class TestOptimalInputDensity(object):
    def test_masses_at_mu_tau_equal_e(self):  # type: () -> None
        law = OptimalInputDensity(math.e, 1.0)

        assert law.mass_at_zero == pytest.approx(1.0 / (2.0 * math.e), abs=1e-15)
        assert law.mass_at_zero == pytest.approx(0.18394, abs=1e-5)
        assert law.mass_at_deadline == pytest.approx(0.31606, abs=1e-5)
        assert law.uniform_mass == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize(('deadline', 'rate'), [(0.0, 1.0), (1.0, 1.0), (10.0, 1.0), (3.0, 0.25), (1e6, 2.0)])
    def test_masses_sum_to_one(self, deadline, rate):
        assert abs(math.fsum(OptimalInputDensity(deadline, rate).masses) - 1.0) < 1e-15
        assert all(mass >= 0 for mass in OptimalInputDensity(deadline, rate).masses)

    def test_zero_deadline_collapses_to_origin(self):  # type: () -> None
        assert sample_optimal_input(0.0, 1.0, 50, make_stream(1)).tolist() == [0.0] * 50

    def test_negative_deadline(self):  # type: () -> None
        with pytest.raises(ParameterError):
            sample_optimal_input(-1.0, 1.0, 5, make_stream(1))

    def test_atom_at_zero_frequency(self):  # type: () -> None
        count = 10 ** 6
        draws = sample_optimal_input(10.0, 1.0, count, make_stream(29))
        expected = 1.0 / (math.e + 10.0)
        sigma = math.sqrt(expected * (1.0 - expected) / count)

        assert np.all((draws >= 0) & (draws <= 10.0))
        assert abs(float(np.mean(draws == 0.0)) - expected) < 3 * sigma
        assert abs(float(np.mean(draws == 10.0)) - (math.e - 1.0) / (math.e + 10.0)) < 3 * sigma * 2
