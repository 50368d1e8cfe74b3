from __future__ import (
    absolute_import,
    unicode_literals,
)

import io
import os

import mock
import pytest

from token_lab.errors import NumericConsistencyError
from token_lab.instruments import Counter
from token_lab.publishers.csv import CsvPublisher
from token_lab.tables import ResultTable
from token_lab.version import __version__


def _table():  # type: () -> ResultTable
    table = ResultTable(
        command='bounds',
        columns=('rho', 'cq_upper', 'curve_id'),
        seed=1589,
        parameters={'points': 2},
        rate_columns=('cq_upper', ),
    )
    table.add_row(1.0, 1.6094379124341003, 'upper')
    table.add_row(0.1, 2.6390573296152584, 'upper')
    return table


class TestCsvPublisher(object):
    def test_render(self):  # type: () -> None
        assert CsvPublisher().render(_table()) == (
            '# meta: tool=token-lab version={} command=bounds seed=1589 params=points=2\r\n'
            'rho,cq_upper,curve_id\r\n'
            '1,1.60943791243,upper\r\n'
            '0.1,2.63905732962,upper\r\n'.format(__version__)
        )

    def test_writes_to_stdout(self):  # type: () -> None
        assert CsvPublisher().writes_to_stdout
        assert CsvPublisher('-').writes_to_stdout
        assert not CsvPublisher('out.csv').writes_to_stdout

        with mock.patch('token_lab.publishers.csv.sys.stdout') as mock_stdout:
            CsvPublisher().publish(_table())

        mock_stdout.write.assert_called_once_with(CsvPublisher().render(_table()))

    def test_file_is_byte_identical_on_rerun(self, tmpdir):
        first = os.path.join(str(tmpdir), 'first.csv')
        second = os.path.join(str(tmpdir), 'second.csv')

        CsvPublisher(first).publish(_table())
        CsvPublisher(second).publish(_table())

        with io.open(first, 'rb') as f:
            first_bytes = f.read()
        with io.open(second, 'rb') as f:
            assert f.read() == first_bytes
        assert first_bytes.startswith(b'# meta: tool=token-lab')

    def test_refuses_non_finite_rows(self, tmpdir):
        path = os.path.join(str(tmpdir), 'bad.csv')
        table = _table()
        table.add_row(10.0, float('nan'), 'upper')

        with pytest.raises(NumericConsistencyError):
            CsvPublisher(path).publish(table)
        assert not os.path.exists(path)

    @mock.patch('token_lab.publishers.csv.logging.getLogger')
    def test_unwritable_path(self, mock_get_logger, tmpdir):
        path = os.path.join(str(tmpdir), 'missing', 'out.csv')

        with pytest.raises((IOError, OSError)):
            CsvPublisher(path).publish(_table(), error_logger='token_lab.errors')

        mock_get_logger.assert_called_once_with('token_lab.errors')
        assert mock_get_logger.return_value.exception.call_count == 1

    def test_ignores_instruments(self):  # type: () -> None
        with mock.patch('token_lab.publishers.csv.sys.stdout') as mock_stdout:
            CsvPublisher().publish_instruments([Counter('channel.tie_resamples', initial_value=1)])

        assert mock_stdout.write.call_count == 0
