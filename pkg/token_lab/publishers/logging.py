from __future__ import (
    absolute_import,
    unicode_literals,
)

import logging
from typing import (
    Any,
    Iterable,
    Optional,
    Union,
    cast,
)

from conformity import fields
from conformity.fields.logging import PythonLogLevel
import six

from token_lab.instruments import (
    Counter,
    Instrument,
    Timer,
)
from token_lab.publishers.base import ResultPublisher
from token_lab.tables import (
    ResultTable,
    format_cell,
)


__all__ = (
    'LogPublisher',
)


@fields.ClassConfigurationSchema.provider(fields.Dictionary(
    {
        'log_name': fields.UnicodeString(description='The name of the logger to which to publish summaries'),
        'log_level': fields.Any(
            fields.Constant(10, 20, 30, 40, 50),
            PythonLogLevel(),
            description='The log level (name or int) for publishing, defaults to logging.INFO',
        ),
    },
    optional_keys=('log_level', ),
))
class LogPublisher(ResultPublisher):
    """
    Logs a table's metadata and summary lines, and the run's counters and timers, on a single line each.
    """

    def __init__(self, log_name, log_level=logging.INFO):  # type: (six.text_type, Union[int, six.text_type]) -> None
        self.log_name = log_name
        self.logger = logging.getLogger(self.log_name)

        if isinstance(log_level, int):
            self.log_level = log_level
        else:
            # getLevelName returns the int when given a name
            self.log_level = cast(int, logging.getLevelName(log_level))

    @staticmethod
    def _get_str_value(value):  # type: (Any) -> six.text_type
        if isinstance(value, six.binary_type):
            return value.decode('utf-8')
        return format_cell(value)

    def publish(self, table, error_logger=None):
        # type: (ResultTable, Optional[six.text_type]) -> None
        self.logger.log(self.log_level, '{} ({} rows)'.format(table.meta, len(table.rows)))
        for line in table.summary:
            self.logger.log(self.log_level, '{}: {}'.format(table.command, line))

    def publish_instruments(self, instruments, error_logger=None):
        # type: (Iterable[Instrument], Optional[six.text_type]) -> None
        formatted = []

        for instrument in sorted(instruments, key=lambda x: '.'.join((type(x).__name__, x.name))):
            if instrument.value is None:
                continue

            name = instrument.name
            if isinstance(instrument, Counter):
                name = '.'.join(('counters', name))
            elif isinstance(instrument, Timer):
                name = '.'.join(('timers', name))

            if instrument.tags:
                name += '{{{}}}'.format(
                    ','.join(
                        '{}:{}'.format(k, self._get_str_value(v) if v is not None else '[no value]')
                        for k, v in sorted(instrument.tags.items(), key=lambda x: x[0])
                    ),
                )

            formatted.append(' '.join((name, six.text_type(instrument.value))))

        if not formatted:
            return

        self.logger.log(self.log_level, '; '.join(formatted))
