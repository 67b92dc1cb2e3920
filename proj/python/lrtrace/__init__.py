"""Trace link recovery between requirements and regulatory provisions."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
