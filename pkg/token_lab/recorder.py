from __future__ import (
    absolute_import,
    unicode_literals,
)

import threading
from typing import (
    Any,
    Dict,
    Iterable,
    List,
    Optional,
    Tuple,
)

import six

from token_lab.instruments import (
    Counter,
    Instrument,
    Tag,
    Timer,
    TimerResolution,
)
from token_lab.publishers.base import ResultPublisher


__all__ = (
    'RunRecorder',
)


class RunRecorder(object):
    """
    Collects the counters and timers of one command run. Instruments are created on first use and reused by name
    and tags afterwards, so simulation code can simply ask for `recorder.counter('channel.tie_resamples')`
    wherever the event happens.
    """

    def __init__(self, prefix=None):  # type: (Optional[six.text_type]) -> None
        """
        :param prefix: A nullable prefix, which if non-null will be prepended to all instrument names, with a single
                       period separating the prefix and the instrument name.
        """
        self.prefix = prefix
        self.counters = {}  # type: Dict[six.text_type, Counter]
        self.timers = {}  # type: Dict[six.text_type, Timer]
        self._lock = threading.Lock()

    def _get_name(self, name, tags):
        # type: (six.text_type, Dict[Any, Any]) -> Tuple[six.text_type, six.text_type]
        if self.prefix:
            name = '.'.join((self.prefix, name))
        internal_name = name
        if tags:
            internal_name += '#{}'.format(
                ','.join('{}={}'.format(k, v) for k, v in sorted(six.iteritems(tags), key=lambda x: x[0])),
            )
        return name, internal_name

    def counter(self, name, **tags):  # type: (six.text_type, **Tag) -> Counter
        name, internal_name = self._get_name(name, tags)
        with self._lock:
            if internal_name not in self.counters:
                self.counters[internal_name] = Counter(name, **tags)
            return self.counters[internal_name]

    def timer(self, name, resolution=TimerResolution.MILLISECONDS, **tags):
        # type: (six.text_type, TimerResolution, **Tag) -> Timer
        name, internal_name = self._get_name(name, tags)
        with self._lock:
            if internal_name not in self.timers:
                self.timers[internal_name] = Timer(name, resolution=resolution, **tags)
            return self.timers[internal_name]

    def get_all_instruments(self):  # type: () -> List[Instrument]
        instruments = []  # type: List[Instrument]
        instruments.extend(self.counters[k] for k in sorted(self.counters))
        instruments.extend(self.timers[k] for k in sorted(self.timers) if self.timers[k].value is not None)
        return instruments

    def publish_all(self, publishers, error_logger=None):
        # type: (Iterable[ResultPublisher], Optional[six.text_type]) -> None
        instruments = self.get_all_instruments()
        for publisher in publishers:
            publisher.publish_instruments(instruments, error_logger=error_logger)

    def clear(self):  # type: () -> None
        with self._lock:
            self.counters = {}
            self.timers = {}
