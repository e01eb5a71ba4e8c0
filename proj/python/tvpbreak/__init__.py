"""Structural breaks in time-varying regressions and VEC co-movement tracking."""

from ._core import *  # noqa: F401,F403
from ._core import TvpbreakError, __doc__  # noqa: F401

__version__ = "0.1.0"
