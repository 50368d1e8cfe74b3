from __future__ import (
    absolute_import,
    unicode_literals,
)

import logging

import mock

from token_lab.instruments import (
    Counter,
    Timer,
)
from token_lab.publishers.logging import LogPublisher
from token_lab.tables import ResultTable
from token_lab.version import __version__


@mock.patch('token_lab.publishers.logging.logging.getLogger')
class TestLogPublisher(object):
    def test_no_instruments_does_nothing(self, mock_get_logger):
        publisher = LogPublisher('token_lab.summary', 'WARNING')
        mock_get_logger.assert_called_once_with('token_lab.summary')
        assert publisher.log_level == logging.WARNING

        publisher.publish_instruments([])
        assert mock_get_logger.return_value.log.call_count == 0

    def test_no_instrument_values_does_nothing(self, mock_get_logger):
        publisher = LogPublisher('token_lab.summary')
        assert publisher.log_level == logging.INFO

        publisher.publish_instruments([Timer('run.bounds')])
        assert mock_get_logger.return_value.log.call_count == 0

    def test_instruments(self, mock_get_logger):
        publisher = LogPublisher('token_lab.summary', logging.DEBUG)

        timer = Timer('token_lab.run.simulate')
        timer.start()
        timer.stop()
        timer._elapsed = 0.004

        publisher.publish_instruments([
            timer,
            Counter('token_lab.channel.tie_resamples', initial_value=2),
            Counter('token_lab.ordering.trials', initial_value=200, grid=b'm', tokens=125),
        ])
        mock_get_logger.return_value.log.assert_called_once_with(
            logging.DEBUG,
            'counters.token_lab.channel.tie_resamples 2; '
            'counters.token_lab.ordering.trials{grid:m,tokens:125} 200; '
            'timers.token_lab.run.simulate 4',
        )

    def test_table_summary(self, mock_get_logger):
        publisher = LogPublisher('token_lab.summary')
        table = ResultTable(command='guard-diagnostic', columns=('M', 'm_ccdf'), seed=7, parameters={'eps': [0.1]})
        table.add_row(10, 0.5)
        table.summary.append('eps=0.1: CONVERGENT')

        publisher.publish(table)

        assert mock_get_logger.return_value.log.call_args_list == [
            mock.call(
                logging.INFO,
                '# meta: tool=token-lab version={} command=guard-diagnostic seed=7 params=eps=0.1 (1 rows)'.format(
                    __version__,
                ),
            ),
            mock.call(logging.INFO, 'guard-diagnostic: eps=0.1: CONVERGENT'),
        ]
