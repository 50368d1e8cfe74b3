from __future__ import (
    absolute_import,
    unicode_literals,
)

import math
from typing import (
    Any,
    Dict,
    List,
    Sequence,
    Tuple,
)

import attr
import six

from token_lab.errors import NumericConsistencyError
from token_lab.version import __version__


__all__ = (
    'ResultTable',
    'check_written_rows',
    'format_cell',
    'format_meta',
)


TOOL_NAME = 'token-lab'


def format_cell(value):  # type: (Any) -> six.text_type
    """
    Renders one CSV cell: floats in `%.12g`, everything else through `str`.
    """
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return '%.12g' % value
    if isinstance(value, (list, tuple)):
        return ','.join(format_cell(v) for v in value)
    return six.text_type(value)


def format_meta(command, seed, parameters):
    # type: (six.text_type, int, Dict[six.text_type, Any]) -> six.text_type
    """
    Builds the `# meta:` header line. Parameters are echoed in sorted key order so that identical configurations
    produce identical headers.
    """
    params = ';'.join('{}={}'.format(k, format_cell(parameters[k])) for k in sorted(parameters))
    return '# meta: tool={} version={} command={} seed={} params={}'.format(
        TOOL_NAME,
        __version__,
        command,
        seed,
        params,
    )


@attr.s
class ResultTable(object):
    """
    The output of one command: named columns, rows in fixed grid order, the parameters echoed in the metadata header,
    and human-readable summary lines.
    """

    command = attr.ib()  # type: six.text_type
    columns = attr.ib(converter=tuple)  # type: Tuple[six.text_type, ...]
    seed = attr.ib()  # type: int
    parameters = attr.ib(default=attr.Factory(dict))  # type: Dict[six.text_type, Any]
    rows = attr.ib(default=attr.Factory(list))  # type: List[Tuple[Any, ...]]
    rate_columns = attr.ib(default=(), converter=tuple)  # type: Tuple[six.text_type, ...]
    summary = attr.ib(default=attr.Factory(list))  # type: List[six.text_type]

    def add_row(self, *values):  # type: (*Any) -> None
        if len(values) != len(self.columns):
            raise ValueError('Row has {} values for {} columns'.format(len(values), len(self.columns)))
        self.rows.append(tuple(values))

    @property
    def meta(self):  # type: () -> six.text_type
        return format_meta(self.command, self.seed, self.parameters)

    def column(self, name):  # type: (six.text_type) -> List[Any]
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def check_rates(self):  # type: () -> None
        """
        Raises `NumericConsistencyError` if any numeric cell is NaN or infinite, or any rate column is negative.
        """
        rate_indexes = set(self.columns.index(c) for c in self.rate_columns)
        for row_number, row in enumerate(self.rows):
            for index, value in enumerate(row):
                _check_cell(value, index in rate_indexes, self.columns[index], row_number)


def _check_cell(value, is_rate, column, row_number):  # type: (Any, bool, six.text_type, int) -> None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return
    if not math.isfinite(value):
        raise NumericConsistencyError('Non-finite value {!r} in column {} row {}'.format(value, column, row_number))
    if is_rate and value < 0:
        raise NumericConsistencyError('Negative rate {!r} in column {} row {}'.format(value, column, row_number))


def check_written_rows(lines, rate_columns=()):
    # type: (Sequence[Sequence[six.text_type]], Sequence[six.text_type]) -> None
    """
    Re-checks rows read back from a written file (header first). Every cell that parses as a number must be finite,
    and rate columns must be nonnegative.
    """
    if not lines:
        return
    header = list(lines[0])
    rate_indexes = set(header.index(c) for c in rate_columns if c in header)
    for row_number, row in enumerate(lines[1:]):
        for index, cell in enumerate(row):
            try:
                number = float(cell)
            except ValueError:
                continue
            _check_cell(number, index in rate_indexes, header[index], row_number)
