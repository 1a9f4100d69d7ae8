"""Level-crossing probabilities for renewal risk processes.

Thin wrapper over the C++ core; see the README for the command-line tool.
"""

from ._xcross import *  # noqa: F401,F403
from ._xcross import __doc__  # noqa: F401

__version__ = "0.1.0"
