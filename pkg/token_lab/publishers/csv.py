from __future__ import (
    absolute_import,
    unicode_literals,
)

import csv
import io
import logging
import sys
from typing import (
    Optional,
    TextIO,
)

from conformity import fields
import six

from token_lab.publishers.base import ResultPublisher
from token_lab.tables import (
    ResultTable,
    check_written_rows,
    format_cell,
)


__all__ = (
    'CsvPublisher',
)


STDOUT_PATH = '-'


@fields.ClassConfigurationSchema.provider(fields.Dictionary(
    {
        'path': fields.Nullable(fields.UnicodeString(
            description='The file to write, or `-` / null for standard output',
        )),
    },
    optional_keys=('path', ),
))
class CsvPublisher(ResultPublisher):
    """
    Writes a result table as a comma-separated file: one `# meta:` line, a header row, then the rows in grid order.
    Floats are rendered in `%.12g` and the line terminator is CRLF, so identical tables are byte-identical files.

    Rows are checked for NaN, infinity and negative rates before writing, and a written file is read back and checked
    again.
    """

    def __init__(self, path=None):  # type: (Optional[six.text_type]) -> None
        self.path = path

    @property
    def writes_to_stdout(self):  # type: () -> bool
        return not self.path or self.path == STDOUT_PATH

    @staticmethod
    def write_table(table, stream):  # type: (ResultTable, TextIO) -> None
        stream.write(table.meta + '\r\n')
        writer = csv.writer(stream, lineterminator='\r\n')
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_cell(value) for value in row])

    def render(self, table):  # type: (ResultTable) -> six.text_type
        buffer = io.StringIO()
        self.write_table(table, buffer)
        return buffer.getvalue()

    def publish(self, table, error_logger=None):
        # type: (ResultTable, Optional[six.text_type]) -> None
        table.check_rates()

        if self.writes_to_stdout:
            sys.stdout.write(self.render(table))
            sys.stdout.flush()
            return

        try:
            with io.open(self.path, 'w', encoding='utf-8', newline='') as f:
                self.write_table(table, f)
            with io.open(self.path, 'r', encoding='utf-8', newline='') as f:
                lines = [row for row in csv.reader(line for line in f if not line.startswith('#'))]
        except (IOError, OSError):
            if error_logger:
                logging.getLogger(error_logger).exception('Failed to write {}'.format(self.path))
            raise

        check_written_rows(lines, table.rate_columns)
