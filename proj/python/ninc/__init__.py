"""Exact parameters of nonlinear neutral coated inclusions."""

from ._ninc import *  # noqa: F401,F403
from ._ninc import __doc__  # noqa: F401

__version__ = "0.1.0"
