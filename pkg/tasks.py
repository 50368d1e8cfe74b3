# type: ignore
from __future__ import (
    absolute_import,
    unicode_literals,
)

from invoke_release.tasks import *  # noqa: F403


configure_release_parameters(  # noqa: F405
    module_name='token_lab',
    display_name='Token Lab',
    use_pull_request=True,
)
