from __future__ import (
    absolute_import,
    unicode_literals,
)

from concurrent.futures import ThreadPoolExecutor
import os
from typing import (
    Callable,
    Iterable,
    List,
    Optional,
    TypeVar,
)

import numpy as np

from token_lab.errors import ParameterError


__all__ = (
    'DEFAULT_SEED',
    'MAX_SEED',
    'THREADS_ENVIRONMENT_VARIABLE',
    'make_stream',
    'map_ordered',
    'spawn_streams',
    'worker_count',
)


DEFAULT_SEED = 0x5EED70CE
"""The seed every command uses unless one is given. Never derived from the wall clock."""

THREADS_ENVIRONMENT_VARIABLE = 'TOKEN_LAB_THREADS'

MAX_SEED = 2**64 - 1

A = TypeVar('A')
R = TypeVar('R')


def _check_seed(seed):  # type: (int) -> int
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
        raise ParameterError('Seeds must be integers in [0, 2**64 - 1], got {!r}'.format(seed))
    return seed


def make_stream(seed=DEFAULT_SEED):  # type: (int) -> np.random.Generator
    """
    Creates an independent PCG64 random stream for a single caller.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(_check_seed(seed))))


def spawn_streams(seed, count):  # type: (int, int) -> List[np.random.Generator]
    """
    Creates `count` statistically independent substreams of `seed`. Substream `i` depends only on `(seed, i)`, so a
    unit of work (a channel use, a Monte Carlo trial) sees the same numbers no matter which worker runs it.
    """
    if count < 0:
        raise ParameterError('Cannot spawn a negative number of streams')
    children = np.random.SeedSequence(_check_seed(seed)).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def worker_count(requested=None):  # type: (Optional[int]) -> int
    """
    The number of worker threads to use: the explicit request if given, else `TOKEN_LAB_THREADS`, else 1.
    """
    if requested is None:
        raw = os.environ.get(THREADS_ENVIRONMENT_VARIABLE, '').strip()
        if not raw:
            return 1
        try:
            requested = int(raw)
        except ValueError:
            raise ParameterError('{} must be an integer, got {!r}'.format(THREADS_ENVIRONMENT_VARIABLE, raw))
    if requested < 1:
        raise ParameterError('Worker count must be at least 1, got {}'.format(requested))
    return requested


def map_ordered(function, items, workers=1):  # type: (Callable[[A], R], Iterable[A], int) -> List[R]
    """
    Applies `function` to every item, possibly on a thread pool, and returns the results in input order.
    """
    if workers <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))
