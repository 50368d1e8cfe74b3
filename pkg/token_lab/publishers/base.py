from __future__ import (
    absolute_import,
    unicode_literals,
)

import abc
from typing import (
    Iterable,
    Optional,
)

import six

from token_lab.instruments import Instrument
from token_lab.tables import ResultTable


__all__ = (
    'ResultPublisher',
)


@six.add_metaclass(abc.ABCMeta)
class ResultPublisher(object):
    @abc.abstractmethod
    def publish(self, table, error_logger=None):
        # type: (ResultTable, Optional[six.text_type]) -> None
        """
        Publish the provided result table in the manner prescribed by the implementation's documentation.

        :param table: The table of rows, parameters and summary lines produced by a command
        :param error_logger: The name of the logger to which publication problems are reported, if any. Publishers
                             that cannot recover re-raise after logging.
        """

    def publish_instruments(self, instruments, error_logger=None):
        # type: (Iterable[Instrument], Optional[six.text_type]) -> None
        """
        Publish run-diagnostic instruments. Publishers that only write result files ignore them.

        :param instruments: The counters and timers collected during the run
        :param error_logger: As for `publish`
        """
