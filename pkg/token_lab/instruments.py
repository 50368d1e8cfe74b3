from __future__ import (
    absolute_import,
    unicode_literals,
)

import enum
import threading
import time
from typing import (
    Any,
    Dict,
    Optional,
    Union,
)

import six


__all__ = (
    'Counter',
    'Instrument',
    'Tag',
    'Timer',
    'TimerResolution',
)


Tag = Union[six.text_type, int, float, bool, None]


class Instrument(object):
    """
    The base of the run-diagnostic instruments. Cannot be instantiated directly.
    """

    def __init__(self, name, **tags):  # type: (six.text_type, **Tag) -> None
        """
        :param name: The dotted instrument name, such as `channel.tie_resamples`
        :param tags: Extra labels that are echoed when the instrument is published
        """
        if self.__class__ == Instrument:
            raise TypeError('Cannot instantiate abstract class "Instrument"')
        if not isinstance(name, six.string_types) or not name:
            raise TypeError('Instrument names must be non-empty strings')

        self.name = name
        self.tags = tags  # type: Dict[six.text_type, Tag]
        self._lock = threading.Lock()

    @property
    def value(self):  # type: () -> Optional[int]
        raise NotImplementedError()

    def __repr__(self):
        return '{}(name="{}", value={})'.format(self.__class__.__name__, self.name, self.value)


class Counter(Instrument):
    """
    Counts events such as resampled channel uses or guard-interval overruns. Increments are safe from worker threads.
    """

    def __init__(self, name, initial_value=0, **tags):  # type: (six.text_type, int, **Tag) -> None
        if not isinstance(initial_value, six.integer_types) or isinstance(initial_value, bool) or initial_value < 0:
            raise TypeError('Counter values must be non-negative integers')

        super(Counter, self).__init__(name, **tags)
        self._initial_value = initial_value
        self._value = initial_value

    def increment(self, amount=1):  # type: (int) -> int
        """
        Increments this counter.

        :param amount: The amount to add, defaults to 1

        :return: The new value
        """
        if amount < 0:
            raise ValueError('Counters only move forward')
        with self._lock:
            self._value += amount
            return self._value

    def reset(self):  # type: () -> int
        with self._lock:
            self._value = self._initial_value
            return self._value

    @property
    def value(self):  # type: () -> int
        return self._value


class TimerResolution(enum.IntEnum):
    """
    Controls the unit in which a timer publishes its accumulated time.
    """

    MILLISECONDS = 10**3
    MICROSECONDS = 10**6


class Timer(Instrument):
    """
    Accumulates wall time over one or more `with` blocks (or `start` / `stop` pairs). A timer that has never been
    stopped has no value and is skipped on publication.
    """

    def __init__(self, name, resolution=TimerResolution.MILLISECONDS, **tags):
        # type: (six.text_type, TimerResolution, **Tag) -> None
        super(Timer, self).__init__(name, **tags)
        self.resolution = resolution
        self._start_time = None  # type: Optional[float]
        self._elapsed = 0.0
        self._stopped_once = False

    def start(self):  # type: () -> None
        self._start_time = time.time()

    def stop(self):  # type: () -> None
        if self._start_time is None:
            return
        with self._lock:
            self._elapsed += time.time() - self._start_time
            self._start_time = None
            self._stopped_once = True

    @property
    def elapsed_seconds(self):  # type: () -> float
        return self._elapsed

    @property
    def value(self):  # type: () -> Optional[int]
        """
        :return: The accumulated time multiplied by the resolution and rounded, or `None` if never stopped
        """
        if not self._stopped_once:
            return None
        # noinspection PyTypeChecker
        return int(round(self._elapsed * self.resolution))

    def __enter__(self):  # type: () -> Timer
        self.start()
        return self

    def __exit__(self, exc_type, exc_value, traceback):  # type: (Any, Any, Any) -> bool
        self.stop()
        return False
