from __future__ import (
    absolute_import,
    unicode_literals,
)

import pytest

from token_lab.errors import NumericConsistencyError
from token_lab.tables import (
    ResultTable,
    check_written_rows,
    format_cell,
    format_meta,
)
from token_lab.version import __version__


class TestFormatting(object):
    def test_format_cell(self):  # type: () -> None
        assert format_cell(0.1 + 0.2) == '0.3'
        assert format_cell(1.0 / 3.0) == '0.333333333333'
        assert format_cell(1e-20) == '1e-20'
        assert format_cell(7) == '7'
        assert format_cell(True) == 'true'
        assert format_cell([0.1, 0.2, 3]) == '0.1,0.2,3'
        assert format_cell('exponential:rate=1.0') == 'exponential:rate=1.0'

    def test_meta_sorts_parameters(self):  # type: () -> None
        meta = format_meta('bounds', 42, {'rho_max': 1000.0, 'points': 200, 'rho_min': 0.001})

        assert meta == (
            '# meta: tool=token-lab version={} command=bounds seed=42 '
            'params=points=200;rho_max=1000;rho_min=0.001'.format(__version__)
        )


class TestResultTable(object):
    def test_rows_and_columns(self):  # type: () -> None
        table = ResultTable(command='bounds', columns=['rho', 'cq_upper'], seed=1, rate_columns=['cq_upper'])
        table.add_row(1.0, 1.6)
        table.add_row(2.0, 1.5)

        assert table.columns == ('rho', 'cq_upper')
        assert table.column('cq_upper') == [1.6, 1.5]

        with pytest.raises(ValueError):
            table.add_row(3.0)

    def test_check_rates(self):  # type: () -> None
        table = ResultTable(command='bounds', columns=('rho', 'rate', 'label'), seed=1, rate_columns=('rate', ))
        table.add_row(-1.0, 0.0, 'negative non-rate columns are allowed')
        table.check_rates()

        table.add_row(1.0, -1e-9, 'x')
        with pytest.raises(NumericConsistencyError):
            table.check_rates()

    @pytest.mark.parametrize('value', [float('nan'), float('inf'), float('-inf')])
    def test_check_rates_rejects_non_finite(self, value):
        table = ResultTable(command='bounds', columns=('rho', 'rate'), seed=1)
        table.add_row(value, 1.0)

        with pytest.raises(NumericConsistencyError):
            table.check_rates()

    def test_check_written_rows(self):  # type: () -> None
        check_written_rows([])
        check_written_rows([['rho', 'rate', 'curve_id'], ['1', '0.5', 'timing_n1']], ['rate'])

        with pytest.raises(NumericConsistencyError):
            check_written_rows([['rho', 'rate'], ['1', 'nan']])

        with pytest.raises(NumericConsistencyError):
            check_written_rows([['rho', 'rate'], ['1', '-0.5']], ['rate'])
