from __future__ import (
    absolute_import,
    unicode_literals,
)

from token_lab.cli import entry_point


if __name__ == '__main__':
    entry_point()
